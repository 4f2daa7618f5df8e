"""Parametrizations of the curves of tangencies from the normal-form table.

Every marked point carries one smooth branch transversal to the divisor,
parametrized by x.  At a singular point the branch of the local model is
u = p - lam * x * s'(x); pushing it through the normalized transformation
gives an implicit pair (alpha, beta), and the branch coefficients are those
of beta composed with the inverse of alpha.  At a tangency point the local
branch is u = q and only the values of the table jets at q enter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .models import FoliationPairData
from .normalform import NormalFormEngine, NormalFormTable
from .series import XJet, compose, revert
from .tolerance import DEFAULT_TOL, ToleranceConfig


@dataclass(frozen=True)
class BranchJet:
    """Branch u = anchor + sum_{r=1..k0} coeffs[r-1] x^r."""

    anchor: complex
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "anchor", complex(self.anchor))
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def coefficient(self, k: int) -> complex:
        return self.coeffs[k - 1]

    def plane_jet(self) -> XJet:
        """Blow-down y(x) = x * (anchor + sum coeffs x^r) in plane coordinates."""
        return XJet([0j, self.anchor] + list(self.coeffs))


@dataclass(frozen=True)
class TangencyCurveJets:
    """One branch per marked point, singular locations first."""

    branches_p: tuple
    branches_q: tuple

    @property
    def all_branches(self) -> tuple:
        return self.branches_p + self.branches_q

    def order(self) -> int:
        return min(b.order for b in self.all_branches)

    def quadratics(self) -> np.ndarray:
        """First-order branch coefficients (quadratic plane coefficients)."""
        return np.array([b.coefficient(1) for b in self.all_branches],
                        dtype=np.complex128)

    def coefficient_vector(self, k: int) -> np.ndarray:
        return np.array([b.coefficient(k) for b in self.all_branches],
                        dtype=np.complex128)


def displacement_slope_jet(lam: complex, s_coeffs: Sequence[complex], order: int) -> XJet:
    """- lam * x * s'(x) as a jet; the local-model branch at a singular point."""
    c = [0j] * (order + 1)
    for r in range(1, order + 1):
        if r < len(s_coeffs) + 1:
            c[r] = -lam * r * (s_coeffs[r - 1] if r - 1 < len(s_coeffs) else 0j)
    return XJet(c, order)


def _implicit_p(table: NormalFormTable, i: int, lam: complex,
                s_coeffs: Sequence[complex], order: int,
                tol: ToleranceConfig = DEFAULT_TOL):
    stilde = displacement_slope_jet(lam, s_coeffs, order)
    alpha = XJet.zero(order)
    beta = XJet.zero(order)
    for r in range(1, order + 1):
        sub_a = table.a_sing[i][r - 1].compose_series(stilde, order=order - r, tol=tol)
        sub_b = table.b_sing[i][r - 1].compose_series(stilde, order=order - r, tol=tol)
        for k in range(r, order + 1):
            alpha.coeffs[k] += sub_a.coeffs[k - r]
            beta.coeffs[k] += sub_b.coeffs[k - r]
    return alpha, beta + stilde


def _implicit_q(table: NormalFormTable, j: int, order: int):
    alpha = XJet.zero(order)
    beta = XJet.zero(order)
    for r in range(1, order + 1):
        alpha.coeffs[r] = table.a_tang[j][r - 1].coefficient(0)
        beta.coeffs[r] = table.b_tang[j][r - 1].coefficient(0)
    return alpha, beta


def implicit_param_p(i: int, table: NormalFormTable, fp: FoliationPairData,
                     tol: ToleranceConfig = DEFAULT_TOL):
    """Implicit branch pair (alpha, beta) at the i-th singular point."""
    table.require_complete(1)
    sm = fp.singular[i]
    s_coeffs = [sm.s_coeff(r) for r in range(1, table.k0 + 1)]
    return _implicit_p(table, i, sm.lam, s_coeffs, table.k0, tol)


def implicit_param_q(j: int, table: NormalFormTable, fp: FoliationPairData):
    """Implicit branch pair (alpha, beta) at the j-th tangency point."""
    table.require_complete(1)
    return _implicit_q(table, j, table.k0)


def curve_coeffs(anchor: complex, alpha: XJet, beta: XJet,
                 tol: ToleranceConfig = DEFAULT_TOL) -> BranchJet:
    """Branch coefficients of beta composed with the inverse of alpha."""
    c = compose(beta, revert(alpha, tol), tol)
    return BranchJet(anchor, c.coeffs[1:])


def tangency_curves(fp: FoliationPairData, table: NormalFormTable | None = None,
                    tol: ToleranceConfig = DEFAULT_TOL) -> TangencyCurveJets:
    """All branch jets of the curve of tangencies, one per marked point."""
    if table is None:
        from .normalform import compute_normal_form

        table = compute_normal_form(fp, tol=tol)
    branches_p = tuple(
        curve_coeffs(fp.points.p[i], *implicit_param_p(i, table, fp, tol), tol)
        for i in range(fp.n_plus_1)
    )
    branches_q = tuple(
        curve_coeffs(fp.points.q[j], *implicit_param_q(j, table, fp), tol)
        for j in range(fp.m)
    )
    return TangencyCurveJets(branches_p, branches_q)


def curves_from_engine(engine: NormalFormEngine, order: int | None = None,
                       tol: ToleranceConfig = DEFAULT_TOL) -> TangencyCurveJets:
    """Branches from an engine's current table and invariant state.

    Used where the invariants may not form a valid model on their own (the
    inverse solver's intermediate stages, zeroed-top offset computations).
    """
    order = engine.stage if order is None else order
    table = engine.table()
    fp = engine.fp
    branches_p = []
    for i in range(fp.n_plus_1):
        s_coeffs = [engine.s[i][r - 1] for r in range(1, order + 1)]
        alpha, beta = _implicit_p(table, i, fp.singular[i].lam, s_coeffs, order, tol)
        branches_p.append(curve_coeffs(fp.points.p[i], alpha, beta, tol))
    branches_q = [curve_coeffs(fp.points.q[j], *_implicit_q(table, j, order), tol)
                  for j in range(fp.m)]
    return TangencyCurveJets(tuple(branches_p), tuple(branches_q))


def offset_vector(fp: FoliationPairData, k: int,
                  tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Order-k branch coefficients with the order-k displacements zeroed.

    These are the inhomogeneous offsets of the order-k curve-matching linear
    systems; they vanish identically at k = 1 and depend only on invariants
    of orders below k.
    """
    if k == 1:
        return np.zeros(fp.n_plus_1 + fp.m, dtype=np.complex128)
    engine = NormalFormEngine(fp, tol=tol)
    for i in range(fp.n_plus_1):
        engine.s[i][k - 1] = 0j
    for j in range(fp.m):
        engine.z[j][k - 1] = 0j
    engine.run(upto=k)
    return curves_from_engine(engine, order=k, tol=tol).coefficient_vector(k)
