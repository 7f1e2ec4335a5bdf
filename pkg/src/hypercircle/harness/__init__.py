"""Experiment orchestration: domain quadrature, identity checks, error scans, CLI."""
