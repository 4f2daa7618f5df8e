"""Canonical normal-form coefficients of the normalizing transformations.

The gluing identities between the local normalizations and the global one
determine, order by order in x, residual functions of u at every marked
point; the canonical solution takes the global order-k coefficients to be
minus the sum of the principal parts of the (normalized) residuals, and the
local coefficients then follow from closed formulas.  Residuals are never
built symbolically: they are the order-k coefficients of the gluing
composites evaluated with the order-k unknowns zeroed.

The composites run on packed bivariate jets (x-order rows, fixed Laurent
exponent window) through the convolution kernels; every stage's inputs are
regenerated exactly from rational/finite data, so window truncation only has
to survive a single composite evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .models import FoliationPairData, SingularChartBuilder, TangencyChartBuilder
from .tolerance import DEFAULT_TOL, ToleranceConfig
from .ufunc import DepthError, LaurentJet, PoleSum

ASSEMBLY_DROP_TOL = 1e-14  # principal coefficients below this are dropped


class IncompleteTableError(ValueError):
    """Raised when a recursion stage is requested before its prerequisites."""


@dataclass(frozen=True)
class NormalFormTable:
    """Canonical coefficients through order k0.

    ``a_global[k-1]``/``b_global[k-1]`` are rational functions on the sphere
    (pole sums over the marked points); the local entries are Laurent jets at
    their marked point, holomorphic there up to numerical noise.
    """

    k0: int
    a_global: tuple
    b_global: tuple
    a_sing: tuple
    b_sing: tuple
    a_tang: tuple
    b_tang: tuple

    def require_complete(self, k: int) -> None:
        if len(self.a_global) < k:
            raise IncompleteTableError(f"table complete to {len(self.a_global)}, need {k}")


class JetFrame:
    """Fixed exponent window for packed jets of one run."""

    def __init__(self, k0: int, depth: int | None = None, height: int | None = None):
        self.k0 = k0
        self.rows = k0 + 1
        self.M = 2 * k0 + 6 if depth is None else depth
        self.N = 3 * k0 + 8 if height is None else height
        self.W = self.M + self.N + 1

    def zero_rows(self) -> np.ndarray:
        return np.zeros((self.rows, self.W), dtype=np.complex128)

    def embed(self, jet: LaurentJet) -> np.ndarray:
        if jet.min_exp < -self.M and np.any(jet.coeffs[: -self.M - jet.min_exp]):
            raise DepthError(
                f"jet pole order {-jet.min_exp} exceeds window depth {self.M}"
            )
        if not jet.exact_tail and jet.max_exp < self.N:
            raise DepthError(
                f"jet known to exponent {jet.max_exp}, window needs {self.N}"
            )
        out = np.zeros(self.W, dtype=np.complex128)
        lo = max(jet.min_exp, -self.M)
        hi = min(jet.max_exp, self.N)
        if hi >= lo:
            out[lo + self.M: hi + self.M + 1] = jet.coeffs[lo - jet.min_exp: hi - jet.min_exp + 1]
        return out

    def extract(self, row: np.ndarray, center: complex, max_exp: int) -> LaurentJet:
        hi = min(max_exp, self.N)
        return LaurentJet(center, -self.M, row[: hi + self.M + 1].copy())



class NormalFormEngine:
    """Order-by-order solver; mutable invariants support the inverse problem."""

    def __init__(self, fp: FoliationPairData, tol: ToleranceConfig = DEFAULT_TOL,
                 frame: JetFrame | None = None):
        self.fp = fp
        self.tol = tol
        self.k0 = fp.k0
        self.frame = frame if frame is not None else JetFrame(fp.k0)
        self.n_pub = fp.k0 + 2  # stored exponent ceiling of table jets
        # mutable invariant state (1-indexed by order through index k-1)
        self.s = [np.array([sm.s_coeff(r) for r in range(1, self.k0 + 1)],
                           dtype=np.complex128) for sm in fp.singular]
        self.z = [np.array([tm.z_coeff(r) for r in range(1, self.k0 + 1)],
                           dtype=np.complex128) for tm in fp.tangency]
        # static per-point data and incremental chart-row builders
        self._x_chart = [SingularChartBuilder(sm.location, sm.lam) for sm in fp.singular]
        self._u_chart = [TangencyChartBuilder(tm, self.k0, max_exp=self.frame.N + self.k0 + 2)
                         for tm in fp.tangency]
        self.inv_gp = [builder.inv_gp for builder in self._u_chart]
        self._eps_rows = [[self.frame.embed(jet) for jet in rows]
                          for rows in fp.background.eps]
        self._sig_rows = [[self.frame.embed(jet) for jet in rows]
                          for rows in fp.background.sig]
        self._row_cache: dict = {}  # embedded expansions of global rows
        self._exp_cache: dict = {}  # local expansions of reused global rows
        # table columns (index k-1)
        self.a_global: list[PoleSum] = []
        self.b_global: list[PoleSum] = []
        self.a_sing = [[] for _ in fp.singular]
        self.b_sing = [[] for _ in fp.singular]
        self.a_tang = [[] for _ in fp.tangency]
        self.b_tang = [[] for _ in fp.tangency]

    # ------------------------------------------------------------------
    @property
    def stage(self) -> int:
        return len(self.a_global)

    def set_invariants(self, k: int, s_vals: Sequence[complex],
                       z_vals: Sequence[complex]) -> None:
        """Install the order-k displacement coefficients (1-indexed order)."""
        for i, v in enumerate(s_vals):
            self.s[i][k - 1] = v
        for j, v in enumerate(z_vals):
            self.z[j][k - 1] = v

    def seed(self, table: NormalFormTable, upto: int) -> None:
        """Adopt a previously computed table prefix (global rows drive everything)."""
        table.require_complete(upto)
        self.a_global = list(table.a_global[:upto])
        self.b_global = list(table.b_global[:upto])
        self.a_sing = [list(col[:upto]) for col in table.a_sing]
        self.b_sing = [list(col[:upto]) for col in table.b_sing]
        self.a_tang = [list(col[:upto]) for col in table.a_tang]
        self.b_tang = [list(col[:upto]) for col in table.b_tang]

    # ------------------------------------------------------------------
    def _delta_powers(self, delta: np.ndarray, kmax: int) -> np.ndarray:
        """Stacked powers of a packed jet with zero constant row, t = 0..kmax."""
        out = np.zeros((kmax + 1, self.frame.rows, self.frame.W), dtype=np.complex128)
        out[0, 0, self.frame.M] = 1.0
        cur = out[0]
        for t in range(1, kmax + 1):
            cur = kernels.axis_mul(cur, delta, self.frame.M, cap=kmax)
            out[t] = cur
            if not cur.any():
                break
        return out

    def _shifted_outer(self, row_vec: np.ndarray, dpows: np.ndarray, t_max: int,
                       cap: int = -1) -> np.ndarray:
        """Packed jet of F(u + delta) from F's window row and delta powers."""
        return kernels.taylor_shift_row(dpows[: t_max + 1], row_vec, self.frame.M, cap)

    def _composite_row_k(self, outer_rows: list, dpows: np.ndarray, xpows: np.ndarray,
                         k: int) -> np.ndarray:
        """Order-k row of sum_r outer_r(u + delta) * X^r, outer rows 1..len."""
        acc = np.zeros(self.frame.W, dtype=np.complex128)
        for r in range(1, len(outer_rows) + 1):
            shifted = self._shifted_outer(outer_rows[r - 1], dpows, k - r, cap=k - r)
            acc += kernels.row_product(shifted, xpows[r], k, self.frame.M)
        return acc

    def _expand_cached(self, ps: PoleSum, center: complex, order: int):
        key = (id(ps), center, order)
        hit = self._exp_cache.get(key)
        if hit is None or hit[0] is not ps:
            jet = ps.expand_at(center, order)
            self._exp_cache[key] = (ps, jet)
            return jet
        return hit[1]

    def _global_rows_at(self, column: list, center: complex, upto: int) -> list:
        rows = []
        for r in range(1, upto + 1):
            ps = column[r - 1]
            key = (id(ps), center)
            hit = self._row_cache.get(key)
            if hit is None or hit[0] is not ps:
                vec = self.frame.embed(ps.expand_at(center, self.frame.N))
                self._row_cache[key] = (ps, vec)
                rows.append(vec)
            else:
                rows.append(hit[1])
        return rows

    # ------------------------------------------------------------------
    def residuals(self, k: int) -> dict:
        """Residual function pairs (A, B) at every marked point for stage k.

        Stage 1 residuals vanish identically; for k >= 2 they are the order-k
        coefficients of the gluing composites with every order-k unknown
        zeroed, so they depend only on data of orders < k.
        """
        if k < 1 or k > self.k0:
            raise ValueError(f"stage {k} out of range 1..{self.k0}")
        if self.stage < k - 1:
            raise IncompleteTableError(f"stage {k} requested with table at {self.stage}")
        fp = self.fp
        out = {}
        if k == 1:
            for i, sm in enumerate(fp.singular):
                zero = LaurentJet.constant(sm.location, 0.0)
                out[("p", i)] = (zero, zero)
            for j, tm in enumerate(fp.tangency):
                zero = LaurentJet.constant(tm.location, 0.0)
                out[("q", j)] = (zero, zero)
            return out
        for i in range(fp.n_plus_1):
            out[("p", i)] = self._residual_singular(i, k)
        for j in range(fp.m):
            out[("q", j)] = self._residual_tangency(j, k)
        return out

    def _residual_singular(self, i: int, k: int):
        fp, frame = self.fp, self.frame
        sm = fp.singular[i]
        center = sm.location
        # inner u-shift: the scalar displacement truncated below order k
        delta = frame.zero_rows()
        for r in range(1, k):
            delta[r, frame.M] = self.s[i][r - 1]
        dpows = self._delta_powers(delta, k)
        # x-component of the chart transform, orders <= k, built from s_{<k}
        chart_rows = self._x_chart[i].rows(k, [self.s[i][r - 1] for r in range(1, k)])
        chart = frame.zero_rows()
        for r in range(1, k + 1):
            chart[r] = frame.embed(chart_rows[r - 1])
        chart_pows = self._delta_powers(chart, k)
        # inner x-component: sum_{r<k} eps_r(u + delta) * chart^r
        x_grid = self.frame.zero_rows()
        for r in range(1, k):
            shifted = self._shifted_outer(self._eps_rows[i][r - 1], dpows, k - r,
                                          cap=k - r)
            x_grid += kernels.axis_mul(shifted, chart_pows[r], frame.M, cap=k)
        xpows = self._delta_powers(x_grid, k)
        a_rows = self._global_rows_at(self.a_global, center, k - 1)
        b_rows = self._global_rows_at(self.b_global, center, k - 1)
        a_res = self._composite_row_k(a_rows, dpows, xpows, k)
        b_res = self._composite_row_k(b_rows, dpows, xpows, k)
        return (frame.extract(a_res, center, self.n_pub),
                frame.extract(b_res, center, self.n_pub))

    def _residual_tangency(self, j: int, k: int):
        fp, frame = self.fp, self.frame
        tm = fp.tangency[j]
        center = tm.location
        # inner u-shift: chart u-component minus u, from z_{<k} (order-k zeroed)
        phi_rows = self._u_chart[j].rows(
            k, [self.z[j][r - 1] for r in range(1, k)], zero_top=True)
        delta = frame.zero_rows()
        for r in range(1, k + 1):
            delta[r] = frame.embed(phi_rows[r - 1])
        dpows = self._delta_powers(delta, k)
        # inner x-component: sum_{r<k} sig_r(u + delta) * x^r
        x_grid = frame.zero_rows()
        for r in range(1, k):
            shifted = self._shifted_outer(self._sig_rows[j][r - 1], dpows, k - r,
                                          cap=k - r)
            x_grid[r:] += shifted[: frame.rows - r]
        xpows = self._delta_powers(x_grid, k)
        a_rows = self._global_rows_at(self.a_global, center, k - 1)
        b_rows = self._global_rows_at(self.b_global, center, k - 1)
        a_res = self._composite_row_k(a_rows, dpows, xpows, k)
        b_res = self._composite_row_k(b_rows, dpows, xpows, k) + delta[k]
        return (frame.extract(a_res, center, self.n_pub),
                frame.extract(b_res, center, self.n_pub))

    # ------------------------------------------------------------------
    def apply_step(self, k: int, residuals: dict) -> None:
        """Install stage k from its residuals and the current invariants.

        Calling again at the same stage replaces it (used by the inverse
        solver after the order-k invariants are recovered).
        """
        if k == self.stage:
            self._pop_stage()
        elif k != self.stage + 1:
            raise IncompleteTableError(f"stage {k} applied with table at {self.stage}")
        fp, frame = self.fp, self.frame
        inv_order = frame.M + self.n_pub + 2
        eps1_k = [self._jet_power(fp.background.eps[i][0], k) for i in range(fp.n_plus_1)]
        sig1_k = [self._jet_power(fp.background.sig[j][0], k) for j in range(fp.m)]
        inv_eps1_k = [jet.invert(order=inv_order) for jet in eps1_k]
        inv_sig1_k = [jet.invert(order=inv_order) for jet in sig1_k]

        a_parts, b_parts = [], []
        for i, sm in enumerate(fp.singular):
            a_res, b_res = residuals[("p", i)]
            a_parts.append((sm.location, -(a_res * inv_eps1_k[i]).principal_coeffs()))
            b_parts.append((sm.location, -(b_res * inv_eps1_k[i]).principal_coeffs()))
        for j, tm in enumerate(fp.tangency):
            a_res, b_res = residuals[("q", j)]
            a_parts.append((tm.location, -(a_res * inv_sig1_k[j]).principal_coeffs()))
            b_full = b_res + self.inv_gp[j] * self.z[j][k - 1]
            b_parts.append((tm.location, -(b_full * inv_sig1_k[j]).principal_coeffs()))
        if k == 1:
            a_k = PoleSum.constant(1.0)
        else:
            a_k = PoleSum.from_parts(a_parts, drop_tol=ASSEMBLY_DROP_TOL)
        b_k = PoleSum.from_parts(b_parts, drop_tol=ASSEMBLY_DROP_TOL)
        self.a_global.append(a_k)
        self.b_global.append(b_k)

        b1 = self.b_global[0]
        if k == 1:
            # base stage: locals are the leading chart coefficients directly
            for i, sm in enumerate(fp.singular):
                eps1 = fp.background.eps[i][0]
                self.a_sing[i].append(eps1)
                self.b_sing[i].append(
                    self.s[i][0] + eps1 * self._expand_cached(b1, sm.location, self.n_pub + 1))
            for j, tm in enumerate(fp.tangency):
                sig1 = fp.background.sig[j][0]
                self.a_tang[j].append(sig1)
                self.b_tang[j].append(
                    self.inv_gp[j] * self.z[j][0]
                    + sig1 * self._expand_cached(b1, tm.location, self.n_pub + 1))
            return
        for i, sm in enumerate(fp.singular):
            a_res, b_res = residuals[("p", i)]
            eps_k = fp.background.eps[i][k - 1]
            a_loc = eps_k + a_res + eps1_k[i] * a_k.expand_at(sm.location, self.n_pub)
            b_loc = (b_res + self.s[i][k - 1]
                     + eps_k * self._expand_cached(b1, sm.location, self.n_pub + 1)
                     + eps1_k[i] * b_k.expand_at(sm.location, self.n_pub))
            self.a_sing[i].append(a_loc)
            self.b_sing[i].append(b_loc)
        for j, tm in enumerate(fp.tangency):
            a_res, b_res = residuals[("q", j)]
            sig_k = fp.background.sig[j][k - 1]
            a_loc = sig_k + a_res + sig1_k[j] * a_k.expand_at(tm.location, self.n_pub)
            b_loc = (b_res + self.inv_gp[j] * self.z[j][k - 1]
                     + sig_k * self._expand_cached(b1, tm.location, self.n_pub + 1)
                     + sig1_k[j] * b_k.expand_at(tm.location, self.n_pub))
            self.a_tang[j].append(a_loc)
            self.b_tang[j].append(b_loc)

    def _pop_stage(self) -> None:
        self.a_global.pop()
        self.b_global.pop()
        for col in self.a_sing + self.b_sing + self.a_tang + self.b_tang:
            col.pop()

    @staticmethod
    def _jet_power(jet: LaurentJet, k: int) -> LaurentJet:
        out = jet
        for _ in range(k - 1):
            out = out * jet
        return out

    # ------------------------------------------------------------------
    def run(self, upto: int | None = None) -> NormalFormTable:
        upto = self.k0 if upto is None else upto
        for k in range(self.stage + 1, upto + 1):
            self.apply_step(k, self.residuals(k))
        return self.table()

    def table(self) -> NormalFormTable:
        return NormalFormTable(
            k0=self.stage,
            a_global=tuple(self.a_global),
            b_global=tuple(self.b_global),
            a_sing=tuple(tuple(col) for col in self.a_sing),
            b_sing=tuple(tuple(col) for col in self.b_sing),
            a_tang=tuple(tuple(col) for col in self.a_tang),
            b_tang=tuple(tuple(col) for col in self.b_tang),
        )


def compute_normal_form(fp: FoliationPairData, k0: int | None = None,
                        tol: ToleranceConfig = DEFAULT_TOL) -> NormalFormTable:
    """Canonical normal-form table of ``fp`` through order ``k0`` (default fp.k0)."""
    engine = NormalFormEngine(fp, tol=tol)
    return engine.run(upto=fp.k0 if k0 is None else k0)


def _seeded_engine(fp: FoliationPairData, table: NormalFormTable, k: int) -> NormalFormEngine:
    if k < 1:
        raise ValueError("stage must be >= 1")
    engine = NormalFormEngine(fp)
    engine.seed(table, k - 1)
    return engine


def residual_at_singular(fp: FoliationPairData, table: NormalFormTable, i: int, k: int):
    """Residual pair (A, B) at the i-th singular point for stage ``k``,
    computed against the given lower table."""
    return _seeded_engine(fp, table, k).residuals(k)[("p", i)]


def residual_at_tangency(fp: FoliationPairData, table: NormalFormTable, j: int, k: int):
    """Residual pair (A, B) at the j-th tangency point for stage ``k``."""
    return _seeded_engine(fp, table, k).residuals(k)[("q", j)]


def canonical_step(fp: FoliationPairData, table: NormalFormTable, k: int,
                   residuals: dict | None = None) -> NormalFormTable:
    """Extend a stage-(k-1) table to stage k from residual data."""
    engine = _seeded_engine(fp, table, k)
    engine.apply_step(k, engine.residuals(k) if residuals is None else residuals)
    return engine.table()
