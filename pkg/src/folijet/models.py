"""Local-model invariant data for a foliation pair and its auxiliary series.

A pair is described near each singular location p_i by an eigenvalue ratio
``lam`` and a level-curve displacement jet s_i(x), and near each tangency
location q_j by a holomorphic involution I_j (through the product function
g_j(u) = (q_j - u)(I_j(u) - q_j)) and a transverse displacement jet z_j(x)
with z_j'(0) != 0.  Background data carries the chart coefficient functions
of the ambient non-dicritical foliation; the default background is the
simplest data satisfying the normalizations (leading coefficients 1 at their
centers, all higher ones 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Sequence

import numpy as np

from .partitions import fdb_p_tilde
from .series import XJet, compose
from .tolerance import DEFAULT_TOL, ToleranceConfig, ensure_finite
from .ufunc import LaurentJet, MarkedPoints


def _falling(lam: complex, n: int) -> complex:
    out = 1.0 + 0j
    for t in range(n):
        out *= lam - t
    return out


@dataclass(frozen=True)
class SingularModel:
    """Linear local model at a singular location plus its displacement jet."""

    index: int
    location: complex
    lam: complex
    s_jet: XJet

    def __post_init__(self):
        ensure_finite(self.location, "location")
        ensure_finite(self.lam, "lam")
        if abs(self.s_jet.coeffs[0]) != 0.0:
            raise ValueError("displacement jet must vanish at the origin")

    def s_coeff(self, r: int) -> complex:
        return self.s_jet.coeffs[r] if r <= self.s_jet.order else 0j


@dataclass(frozen=True)
class TangencyModel:
    """Vertical local model at a tangency location.

    ``involution_jet`` holds the coefficients of I(u) - q in powers of
    v = u - q (linear coefficient -1); ``g_jet`` is the exact polynomial jet
    of g(u) = (q - u)(I(u) - q), with g(q) = g'(q) = 0, g''(q) = 2 and
    g'''(q) = -6 tau.
    """

    index: int
    location: complex
    involution_jet: XJet
    z_jet: XJet
    tau: complex = field(init=False)
    g_jet: LaurentJet = field(init=False)

    def __post_init__(self):
        ensure_finite(self.location, "location")
        iota = self.involution_jet
        if abs(iota.coeffs[0]) != 0.0:
            raise ValueError("involution jet must fix its center")
        if not DEFAULT_TOL.close(iota.coeffs[1], -1.0):
            raise ValueError("involution must have linear coefficient -1 at its center")
        twice = compose(iota, iota)
        res = max(
            abs(twice.coeffs[r] - (1.0 if r == 1 else 0.0))
            for r in range(twice.order + 1)
        )
        if res > 1e-9 * max(1.0, max(abs(c) for c in iota.coeffs)):
            raise ValueError(f"jet is not an involution (residual {res:.3e})")
        if abs(self.z_jet.coeffs[0]) != 0.0:
            raise ValueError("transverse displacement jet must vanish at the origin")
        if abs(self.z_jet.coeffs[1]) <= 1e-12:
            raise ValueError("transverse displacement must have nonzero linear coefficient")
        object.__setattr__(self, "tau", complex(iota.coeffs[2]) if iota.order >= 2 else 0j)
        g = np.zeros(iota.order + 2, dtype=np.complex128)
        for e in range(1, iota.order + 1):
            g[e + 1] = -iota.coeffs[e]
        object.__setattr__(
            self, "g_jet", LaurentJet(self.location, 0, g, exact_tail=True)
        )

    @classmethod
    def from_g(cls, index: int, location: complex, g_coeffs: Sequence[complex],
               z_jet: XJet) -> "TangencyModel":
        """Build from the product function's Taylor coefficients at q.

        Consistency is validated by deriving the involution jet
        I(u) - q = -g(u)/(u - q) and checking it squares to the identity.
        """
        g = [complex(c) for c in g_coeffs]
        if abs(g[0]) > 1e-12 or abs(g[1]) > 1e-12:
            raise ValueError("product function must have a double zero at its center")
        if not DEFAULT_TOL.close(g[2], 1.0):
            raise ValueError("product function must have second derivative 2 at its center")
        iota = XJet([0j] + [-g[e + 1] for e in range(1, len(g) - 1)])
        return cls(index, location, iota, z_jet)

    def z_coeff(self, r: int) -> complex:
        return self.z_jet.coeffs[r] if r <= self.z_jet.order else 0j

    def g_derivative(self, n: int) -> LaurentJet:
        out = self.g_jet
        for _ in range(n):
            out = out.differentiate()
        return out


class BackgroundData:
    """Chart coefficient functions of the ambient non-dicritical foliation.

    ``eps[i][r-1]`` is the order-r coefficient function at the i-th singular
    location (Laurent jet, holomorphic there), ``sig[j][r-1]`` at the j-th
    tangency location.  Normalizations enforced: eps[i][0](p_i) = 1,
    sig[j][0](q_j) = 1 and sig[j][r-1](q_j) = 0 for r >= 3.  The value of the
    order-2 coefficient at its center is accepted as free input, but nonzero
    values leak a simple pole into the order-2 canonical solutions; the
    default (and every shipped generator) keeps it 0.
    """

    def __init__(self, eps: Sequence[Sequence[LaurentJet]],
                 sig: Sequence[Sequence[LaurentJet]],
                 tol: ToleranceConfig = DEFAULT_TOL):
        self.eps = [list(rows) for rows in eps]
        self.sig = [list(rows) for rows in sig]
        for rows in self.eps:
            if not tol.close(rows[0].coefficient(0), 1.0):
                raise ValueError("leading singular chart coefficient must be 1 at its center")
        for rows in self.sig:
            if not tol.close(rows[0].coefficient(0), 1.0):
                raise ValueError("leading tangency chart coefficient must be 1 at its center")
            for r in range(3, len(rows) + 1):
                if not tol.is_zero(rows[r - 1].coefficient(0), scale=1.0):
                    raise ValueError(
                        f"tangency chart coefficient {r} must vanish at its center"
                    )

    @classmethod
    def default(cls, points: MarkedPoints, k0: int) -> "BackgroundData":
        eps = []
        for p in points.p:
            rows = [LaurentJet.constant(p, 1.0 if r == 1 else 0.0) for r in range(1, k0 + 1)]
            eps.append(rows)
        sig = []
        for q in points.q:
            rows = [LaurentJet.constant(q, 1.0 if r == 1 else 0.0) for r in range(1, k0 + 1)]
            sig.append(rows)
        return cls(eps, sig)

    def sig1_deriv_at_q(self, j: int) -> complex:
        return self.sig[j][0].coefficient(1)

    def order(self) -> int:
        rows = self.eps + self.sig
        return min((len(r) for r in rows), default=0)


@dataclass(frozen=True)
class FoliationPairData:
    """Complete invariant package of a foliation pair, truncated at order k0."""

    points: MarkedPoints
    singular: tuple
    tangency: tuple
    background: BackgroundData
    k0: int

    def __init__(self, points, singular, tangency, background=None, k0=None):
        singular = tuple(singular)
        tangency = tuple(tangency)
        if len(singular) != points.n_plus_1:
            raise ValueError("one singular model per singular location required")
        if len(tangency) != points.m:
            raise ValueError("one tangency model per tangency location required")
        for i, sm in enumerate(singular):
            if _key_eq(sm.location, points.p[i]):
                continue
            raise ValueError(f"singular model {i} at {sm.location}, expected {points.p[i]}")
        for j, tm in enumerate(tangency):
            if not _key_eq(tm.location, points.q[j]):
                raise ValueError(f"tangency model {j} at {tm.location}, expected {points.q[j]}")
        if k0 is None:
            orders = [sm.s_jet.order for sm in singular] + [tm.z_jet.order for tm in tangency]
            k0 = min(orders) if orders else 1
        if k0 < 1:
            raise ValueError("k0 must be >= 1")
        if background is None:
            background = BackgroundData.default(points, k0)
        if background.order() < k0:
            raise ValueError("background data shallower than k0")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "singular", singular)
        object.__setattr__(self, "tangency", tangency)
        object.__setattr__(self, "background", background)
        object.__setattr__(self, "k0", int(k0))

    @property
    def n_plus_1(self) -> int:
        return self.points.n_plus_1

    @property
    def m(self) -> int:
        return self.points.m

    def with_invariants(self, s_rows: Sequence[Sequence[complex]],
                        z_rows: Sequence[Sequence[complex]]) -> "FoliationPairData":
        """Copy with replaced displacement jets (coefficients indexed from x^1)."""
        singular = tuple(
            SingularModel(sm.index, sm.location, sm.lam,
                          XJet([0j] + [complex(c) for c in s_rows[i]]))
            for i, sm in enumerate(self.singular)
        )
        tangency = tuple(
            TangencyModel(tm.index, tm.location, tm.involution_jet,
                          XJet([0j] + [complex(c) for c in z_rows[j]]))
            for j, tm in enumerate(self.tangency)
        )
        return FoliationPairData(self.points, singular, tangency, self.background, self.k0)


def _key_eq(a: complex, b: complex) -> bool:
    return abs(complex(a) - complex(b)) < 1e-12


class SingularChartBuilder:
    """Rows of the chart x-component x * (1 + s(x)/(u - p))**lam.

    Row r depends only on the displacement coefficients below order r, each
    given by an independent closed sum, so rows are cached against the
    displacement prefix that produced them.
    """

    def __init__(self, location: complex, lam: complex):
        self.location = complex(location)
        self.lam = complex(lam)
        self._inv = LaurentJet.monomial(self.location, -1, 1.0)
        self._rows = [LaurentJet.constant(self.location, 1.0)]
        self._prefix: tuple = ()

    def _row(self, k: int, s: Sequence[complex]) -> LaurentJet:
        # order-(k+1) row from s_1..s_k
        w = [_falling(self.lam, rho) for rho in range(1, k + 1)]
        z = [self._inv * (factorial(r) * s[r - 1]) for r in range(1, k + 1)]
        return (self._inv * (self.lam * s[k - 1])
                + fdb_p_tilde(k, w, z) * (1.0 / factorial(k)))

    def rows(self, k0: int, s_coeffs: Sequence[complex]) -> list:
        """Rows 1..k0 for displacement coefficients ``s_coeffs`` (s_1 first)."""
        prefix = tuple(complex(c) for c in s_coeffs[: max(k0 - 1, 0)])
        keep = len(self._prefix)
        for idx in range(min(keep, len(prefix))):
            if prefix[idx] != self._prefix[idx]:
                keep = idx
                break
        self._rows = self._rows[: keep + 1]
        self._prefix = prefix
        while len(self._rows) < k0:
            k = len(self._rows)
            self._rows.append(self._row(k, prefix))
        return self._rows[:k0]


def singular_chart_x_coeffs(sm: SingularModel, k0: int) -> list:
    """Coefficient jets of the x-component x * (1 + s(x)/(u - p))**lam.

    Entry r-1 is the order-r coefficient; the leading one is 1 and the
    order-(k+1) one is a pure principal part of pole order <= k, given by the
    power-law chain-rule sum over the displacement coefficients.
    """
    builder = SingularChartBuilder(sm.location, sm.lam)
    return builder.rows(k0, [sm.s_coeff(r) for r in range(1, k0 + 1)])


class TangencyChartBuilder:
    """Rows of the chart u-component solving g(result) = g(u) + z(x).

    The x-derivative rows obey the recursion
    D_k = (k-th derivative of z - chain-rule sum of lower rows against g's
    higher derivatives) / g'(u); the dependence on the top displacement
    coefficient is exactly (k! z_k) / g', so a committed lower state extends
    in one step per order.
    """

    def __init__(self, tm: TangencyModel, k0: int, max_exp: int):
        self.location = tm.location
        self.k0 = k0
        gprime = tm.g_jet.differentiate()
        self.inv_gp = gprime.invert(order=max_exp + 2 * k0 + 2)
        self._g_derivs = [tm.g_jet]
        for _ in range(k0 + 1):
            self._g_derivs.append(self._g_derivs[-1].differentiate())
        self._d_rows: list = []   # committed derivative rows, true coefficients
        self._prefix: tuple = ()  # committed displacement coefficients
        self._zero_top_cache: dict = {}

    def _base_row(self, k: int) -> LaurentJet:
        """D_k with the order-k displacement coefficient set to zero."""
        cached = self._zero_top_cache.get(k)
        if cached is not None and cached[0] == self._prefix[: k - 1]:
            return cached[1]
        rhs = LaurentJet.constant(self.location, 0.0)
        if k >= 2:
            w = [self._g_derivs[r] for r in range(1, k + 1)]
            dummy_top = LaurentJet.constant(self.location, 0.0)
            rhs = rhs - fdb_p_tilde(k, w, self._d_rows[: k - 1] + [dummy_top])
        base = rhs * self.inv_gp
        self._zero_top_cache[k] = (self._prefix[: k - 1], base)
        return base

    def _sync(self, z_coeffs: Sequence[complex], upto: int) -> None:
        prefix = tuple(complex(c) for c in z_coeffs[:upto])
        keep = len(self._prefix)
        for idx in range(min(keep, len(prefix))):
            if prefix[idx] != self._prefix[idx]:
                keep = idx
                break
        self._d_rows = self._d_rows[:keep]
        self._prefix = prefix[:keep]
        while len(self._d_rows) < upto:
            k = len(self._d_rows) + 1
            self._prefix = prefix[: k - 1]
            row = self._base_row(k) + self.inv_gp * (factorial(k) * prefix[k - 1])
            self._d_rows.append(row)
            self._prefix = prefix[:k]

    def rows(self, k0: int, z_coeffs: Sequence[complex],
             zero_top: bool = False) -> list:
        """Coefficient rows 1..k0; with ``zero_top`` the order-k0 displacement
        coefficient is treated as zero (residual computations)."""
        upto = k0 - 1 if zero_top else k0
        self._sync(z_coeffs, upto)
        rows = [self._d_rows[k - 1] * (1.0 / factorial(k)) for k in range(1, upto + 1)]
        if zero_top:
            rows.append(self._base_row(k0) * (1.0 / factorial(k0)))
        return rows


def tangency_chart_u_coeffs(tm: TangencyModel, k0: int, max_exp: int | None = None) -> list:
    """Coefficient jets of the u-component solving g(result) = g(u) + z(x).

    Entry k-1 is the order-k coefficient, a rational jet whose denominator is
    an odd power of g'.
    """
    if max_exp is None:
        max_exp = 4 * k0 + 12
    builder = TangencyChartBuilder(tm, k0, max_exp)
    return builder.rows(k0, [tm.z_coeff(r) for r in range(1, k0 + 1)])


def tangency_diagonal(tm: TangencyModel, bg: BackgroundData, k: int) -> complex:
    """Diagonal entry of the order-k curve-matching matrix at a tangency point:
    -(3/2) tau + k * (leading chart coefficient)'(q)."""
    if k < 1:
        raise ValueError("order must be >= 1")
    return -1.5 * tm.tau + k * bg.sig1_deriv_at_q(tm.index)
