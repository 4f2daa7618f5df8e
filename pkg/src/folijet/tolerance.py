"""Tolerance policy for approximate complex comparisons.

A single configuration object is threaded explicitly through every operation
that compares floating values; there is no mutable global state.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass


@dataclass(frozen=True)
class ToleranceConfig:
    """Absolute + relative tolerance pair used by all approximate checks."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-9

    def close(self, a: complex, b: complex) -> bool:
        """True when ``a`` and ``b`` agree within absolute or relative tolerance."""
        return abs(a - b) <= max(self.abs_tol, self.rel_tol * max(abs(a), abs(b)))

    def is_zero(self, a: complex, scale: float = 1.0) -> bool:
        """True when ``a`` is negligible against ``scale``."""
        return abs(a) <= max(self.abs_tol, self.rel_tol * abs(scale))


DEFAULT_TOL = ToleranceConfig()


def ensure_finite(value: complex, name: str = "value") -> complex:
    """Validate that a scalar is finite (rejects NaN and infinities)."""
    z = complex(value)
    if not (cmath.isfinite(z)):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return z
