"""Truncated series in one formal variable over a generic coefficient ring.

Coefficients may be complex scalars or any objects supporting +, -, * among
themselves and with ints/complex (Laurent jets, pole sums).  The jet order is
a hard property of the value: arithmetic between jets of different order
truncates to the minimum, never extends.  Operations return new jets; treat
jets as immutable after construction (safe to share across threads).
"""

from __future__ import annotations

from math import factorial
from typing import Sequence

from .partitions import enumerate_partitions
from .tolerance import DEFAULT_TOL, ToleranceConfig


class XJet:
    """Series sum_{r=0..order} coeffs[r] * x^r, truncated above ``order``."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Sequence, order: int | None = None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("jet order must be >= 0")
        if len(coeffs) < order + 1:
            raise ValueError(f"need {order + 1} coefficients, got {len(coeffs)}")
        self.order = order
        self.coeffs = coeffs[: order + 1]

    @classmethod
    def zero(cls, order: int) -> "XJet":
        return cls([0j] * (order + 1), order)

    @classmethod
    def identity(cls, order: int) -> "XJet":
        c = [0j] * (order + 1)
        if order >= 1:
            c[1] = 1.0 + 0j
        return cls(c, order)

    def __len__(self) -> int:
        return self.order + 1

    def __getitem__(self, r: int):
        return self.coeffs[r]

    def __repr__(self) -> str:
        return f"XJet(order={self.order}, coeffs={self.coeffs!r})"

    def truncated(self, order: int) -> "XJet":
        if order > self.order:
            raise ValueError(f"cannot extend order {self.order} jet to {order}")
        return XJet(self.coeffs[: order + 1], order)

    def __add__(self, other):
        if not isinstance(other, XJet):
            return NotImplemented
        n = min(self.order, other.order)
        return XJet([self.coeffs[r] + other.coeffs[r] for r in range(n + 1)], n)

    def __sub__(self, other):
        if not isinstance(other, XJet):
            return NotImplemented
        n = min(self.order, other.order)
        return XJet([self.coeffs[r] - other.coeffs[r] for r in range(n + 1)], n)

    def __neg__(self):
        return XJet([-c for c in self.coeffs], self.order)

    def scaled(self, factor) -> "XJet":
        return XJet([c * factor for c in self.coeffs], self.order)

    def __mul__(self, other):
        if not isinstance(other, XJet):
            return self.scaled(other)
        n = min(self.order, other.order)
        out = []
        for r in range(n + 1):
            acc = None
            for a in range(r + 1):
                term = self.coeffs[a] * other.coeffs[r - a]
                acc = term if acc is None else acc + term
            out.append(acc)
        return XJet(out, n)

    __rmul__ = scaled

    def shifted(self, powers: int) -> "XJet":
        """Multiply by x**powers (truncating at the jet order)."""
        c = [0j] * powers + self.coeffs
        return XJet(c[: self.order + 1], self.order)

    def evaluate(self, x: complex):
        """Horner evaluation of the truncation at a numeric point."""
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc


def compose(outer: XJet, inner: XJet, tol: ToleranceConfig = DEFAULT_TOL) -> XJet:
    """Jet of outer(inner(x)); ``inner`` must vanish at the origin.

    Coefficient k is the chain-rule sum over multisets of total k, with the
    integer multinomial weights of :mod:`folijet.partitions`.
    """
    z0 = inner.coeffs[0]
    if isinstance(z0, (int, float, complex)):
        if not tol.is_zero(z0, scale=1.0):
            raise ValueError(f"inner jet has nonzero constant term {z0!r}")
    n = min(outer.order, inner.order)
    out = [outer.coeffs[0]]
    for k in range(1, n + 1):
        acc = None
        for part in enumerate_partitions(k):
            if part.r > outer.order:
                continue
            term = outer.coeffs[part.r]
            for s, rs in enumerate(part.multiplicities, start=1):
                for _ in range(rs):
                    term = term * inner.coeffs[s]
            term = term * part.multinomial
            acc = term if acc is None else acc + term
        out.append(acc)
    return XJet(out, n)


def revert(f: XJet, tol: ToleranceConfig = DEFAULT_TOL) -> XJet:
    """Compositional inverse of a tangent-to-identity jet.

    Requires unit linear coefficient; the r-th inverse coefficient comes from
    the top-outer-reduced chain-rule sum applied to the already-known lower
    inverse coefficients.
    """
    if f.order < 1:
        raise ValueError("need at least a first-order jet to revert")
    f1 = f.coeffs[1]
    if isinstance(f1, (int, float, complex)):
        if not tol.close(f1, 1.0):
            raise ValueError(f"reversion requires unit linear coefficient, got {f1!r}")
    g = [0j, 1.0 + 0j]  # inverse coefficients, g[r] for x^r
    for r in range(2, f.order + 1):
        # 0 = r! g_r + fdb_p_hat(r, [s! g_s], [s! f_s]) with f_1 = 1
        w = [factorial(s) * g[s] if s < r else 0j for s in range(1, r + 1)]
        z = [factorial(s) * f.coeffs[s] for s in range(1, r + 1)]
        acc = None
        for part in enumerate_partitions(r):
            if part.r == r:  # top-outer term w_r * z_1^r excluded
                continue
            term = w[part.r - 1]
            for s, rs in enumerate(part.multiplicities, start=1):
                for _ in range(rs):
                    term = term * z[s - 1]
            term = term * part.weight
            acc = term if acc is None else acc + term
        g.append((-1.0 / factorial(r)) * acc if acc is not None else 0j)
    return XJet(g, f.order)
