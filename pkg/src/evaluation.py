import math
from typing import Literal

from pydantic import BaseModel

Provenance = Literal["THEOREM", "DERIVED", "TRIVIAL", "MARGIN"]


class Claim(BaseModel):
    metric: str
    value: float
    expected: float | None = None
    low: float | None = None
    high: float | None = None
    tolerance: float | None = None
    provenance: Provenance
    param_name: str | None = None
    param_value: float | str | None = None
    passed: bool


def check_close(metric, value, expected, tolerance, provenance, param_name=None, param_value=None):
    """Pass when |value - expected| <= tolerance."""
    value, expected = float(value), float(expected)
    passed = math.isfinite(value) and abs(value - expected) <= tolerance
    return Claim(
        metric=metric,
        value=value,
        expected=expected,
        tolerance=tolerance,
        provenance=provenance,
        param_name=param_name,
        param_value=param_value,
        passed=passed,
    )


def check_small(metric, value, tolerance, provenance, param_name=None, param_value=None):
    """Pass when a deviation is at most `tolerance`."""
    return check_close(metric, value, 0.0, tolerance, provenance, param_name, param_value)


def check_above(metric, value, bound, provenance, param_name=None, param_value=None):
    value = float(value)
    return Claim(
        metric=metric,
        value=value,
        low=float(bound),
        provenance=provenance,
        param_name=param_name,
        param_value=param_value,
        passed=math.isfinite(value) and value > bound,
    )


def check_between(metric, value, low, high, provenance, param_name=None, param_value=None):
    value = float(value)
    return Claim(
        metric=metric,
        value=value,
        low=float(low),
        high=float(high),
        provenance=provenance,
        param_name=param_name,
        param_value=param_value,
        passed=math.isfinite(value) and low <= value <= high,
    )


def summarize_claims(claims):
    """Count passed and failed claims."""
    failed = [c.metric for c in claims if not c.passed]
    return {
        "total": len(claims),
        "passed": len(claims) - len(failed),
        "failed": len(failed),
        "failed_metrics": failed,
    }
