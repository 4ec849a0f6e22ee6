import math


def close_rel(got: float, want: float, rel: float = 1e-12, scale: float | None = None) -> bool:
    """Closeness relative to the magnitudes involved (|want|, |got|, or a
    caller-supplied scale), with a unit floor so subnormal noise cannot turn
    the threshold into an exact-equality test."""
    s = max(abs(got), abs(want), abs(scale) if scale is not None else 0.0, 1.0)
    return math.isfinite(got) and abs(got - want) <= rel * s
