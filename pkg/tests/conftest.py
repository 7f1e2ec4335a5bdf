from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def points():
    from hypercircle.moebius import HPoint

    return [
        HPoint(Fraction(0), Fraction(1)),
        HPoint(Fraction(1, 4), Fraction(3, 2)),
        HPoint(Fraction(-1, 3), Fraction(6, 5)),
        HPoint(Fraction(1, 2), Fraction(7, 8)),
        HPoint(Fraction(2, 7), Fraction(1, 5)),
    ]
