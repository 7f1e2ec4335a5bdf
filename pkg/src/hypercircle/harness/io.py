"""CSV and JSON manifest output.

Floats are written with 17 significant digits so they round-trip exactly;
Fractions are written as p/q.  CSV schemas carry a version column.
"""

from __future__ import annotations

import csv
import json
import platform
import sys
import time
from fractions import Fraction
from pathlib import Path

SCHEMA_VERSION = 1


def fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, complex):
        return f"{format(v.real, '.17g')}{format(v.imag, '+.17g')}j"
    return str(v)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["schema"] + list(header))
        for r in rows:
            w.writerow([SCHEMA_VERSION] + [fmt(v) for v in r])
    return path


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def versions() -> dict:
    from importlib.metadata import PackageNotFoundError, version

    out = {"python": sys.version.split()[0], "platform": platform.platform()}
    for pkg in ("artifact", "numpy", "scipy", "numba", "scikit-learn"):
        try:
            out[pkg] = version(pkg)
        except PackageNotFoundError:
            out[pkg] = None
    return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return fmt(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):
        return v.item()
    return v


def write_manifest(path, *, command: str, inputs: dict, outputs: dict, seed=None,
                   workers: int = 1, started: float, status: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "command": command,
        "inputs": _jsonable(inputs),
        "outputs": _jsonable(outputs),
        "seed": seed,
        "workers": workers,
        "status": status,
        "versions": versions(),
        "timing": {"started": started, "elapsed_s": time.time() - started},
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True))
    return path
