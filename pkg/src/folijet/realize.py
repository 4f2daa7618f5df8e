"""Inverse problem: recover displacement jets from a prescribed curve.

The order-k branch coefficients, minus offsets determined by lower orders,
are a fixed linear image of the order-k displacement coefficients: a square
matrix with the eigenvalue-ratio factors (1 - k lam_i) on the singular
diagonal, Cauchy kernels 1/(p-q) and 1/(q-q') off the diagonal, and the
tangency diagonals -(3/2) tau_j + k sigma'.  Genericity (all these systems
invertible, plus a surjectivity property of the quadratic-shift action) is
certified numerically before solving, and the recursion solves one order at
a time, recomputing offsets operationally with the top order zeroed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .models import FoliationPairData, tangency_diagonal
from .normalform import NormalFormEngine
from .series import XJet
from .tangency import BranchJet, TangencyCurveJets, curves_from_engine
from .tolerance import DEFAULT_TOL, ToleranceConfig
from .ufunc import MarkedPoints


class NonGenericConfigError(ValueError):
    """Configuration outside the certified generic set."""

    def __init__(self, certificate: "GenericityCertificate"):
        self.certificate = certificate
        super().__init__(
            "non-generic configuration; failing factors: "
            + ", ".join(certificate.failing)
        )


class NonGenericCurveError(ValueError):
    """Curve whose quadratic data forces a vanishing leading displacement."""


def build_V(points: MarkedPoints) -> np.ndarray:
    """(n+1+m) x 4 matrix with rows (1, rho, rho^2, rho^3) over all marked points."""
    rho = np.array(points.all, dtype=np.complex128)
    return np.vander(rho, 4, increasing=True)


def build_Ak(fp: FoliationPairData, k: int) -> np.ndarray:
    """Order-k curve-matching matrix over (singular, tangency) blocks."""
    if k < 1:
        raise ValueError("order must be >= 1")
    n1, m = fp.n_plus_1, fp.m
    out = np.zeros((n1 + m, n1 + m), dtype=np.complex128)
    p = np.array(fp.points.p, dtype=np.complex128)
    q = np.array(fp.points.q, dtype=np.complex128)
    for i, sm in enumerate(fp.singular):
        out[i, i] = 1.0 - k * sm.lam
        for j in range(m):
            out[i, n1 + j] = 1.0 / (p[i] - q[j])
    for j, tm in enumerate(fp.tangency):
        out[n1 + j, n1 + j] = tangency_diagonal(tm, fp.background, k)
        for l in range(m):
            if l != j:
                out[n1 + j, n1 + l] = 1.0 / (q[j] - q[l])
    return out


def tangency_block(fp: FoliationPairData, k: int) -> np.ndarray:
    """Lower-right m x m block of the order-k matrix."""
    n1 = fp.n_plus_1
    return build_Ak(fp, k)[n1:, n1:]


def lambda_rect(fp: FoliationPairData) -> np.ndarray:
    """m x (m+4) block [tangency block at order 1 | Vandermonde of q]."""
    m = fp.m
    q = np.array(fp.points.q, dtype=np.complex128)
    return np.hstack([tangency_block(fp, 1), np.vander(q, 4, increasing=True)])


def lambda_tilde(ys: Sequence[complex], thetas: Sequence[complex]) -> np.ndarray:
    """Square Cauchy/Vandermonde hybrid on s+4 nodes with s diagonal entries.

    Its determinant equals prod_{s+1<=i<j<=s+4}(y_j - y_i) * theta_1...theta_s
    plus terms of lower degree in the thetas.
    """
    ys = [complex(y) for y in ys]
    thetas = [complex(t) for t in thetas]
    s = len(thetas)
    if len(ys) != s + 4:
        raise ValueError("need exactly four more nodes than diagonal entries")
    n = s + 4
    out = np.zeros((n, n), dtype=np.complex128)
    for r in range(n):
        for c in range(s):
            out[r, c] = thetas[c] if r == c else 1.0 / (ys[r] - ys[c])
        for c in range(4):
            out[r, s + c] = ys[r] ** c
    return out


def _block_families(m: int) -> list:
    """Index families (1-based) covering {1..m} by quadruples; m >= 5."""
    s0 = m // 4
    families = [tuple(range(4 * s - 3, 4 * s + 1)) for s in range(1, s0 + 1)]
    families.append((m - 3, m - 2, m - 1, m))
    return families


@dataclass(frozen=True)
class GenericityCertificate:
    """Named nonvanishing checks guarding the realization linear systems."""

    k0: int
    lambda_factors: tuple      # ((name, value), ...) for 1 - k*lam_i
    det_A: tuple               # det of every order matrix, k = 1..k0
    det_A_tilde: tuple         # det of every tangency block
    cond_A: tuple              # condition numbers of the order matrices
    block_dets: tuple          # ((name, value), ...) for the quadruple minors
    block_route_trivial: bool  # m <= 4: surjectivity holds structurally
    rank_margins: tuple        # smallest required singular value per zeroed slot
    surjectivity_routes_disagree: bool
    failing: tuple
    verdict: bool
    curve_quadratics: tuple = ()


def check_genericity(fp: FoliationPairData, k0: int | None = None,
                     curve_quadratics: Sequence[complex] | None = None,
                     factor_tol: float = 1e-8,
                     rank_tol: float = 1e-6) -> GenericityCertificate:
    """Certify invertibility of every order system plus the quadratic-shift
    surjectivity property, reporting each factor by name."""
    k0 = fp.k0 if k0 is None else k0
    n1, m = fp.n_plus_1, fp.m
    failing = []
    lam_factors = []
    for k in range(1, k0 + 1):
        for i, sm in enumerate(fp.singular):
            name = f"(1-{k}*lambda_{i + 1})"
            value = 1.0 - k * sm.lam
            lam_factors.append((name, value))
            if abs(value) <= factor_tol:
                failing.append(name)
    det_A, det_At, cond_A = [], [], []
    for k in range(1, k0 + 1):
        ak = build_Ak(fp, k)
        det_A.append(complex(np.linalg.det(ak)))
        cond_A.append(float(np.linalg.cond(ak)) if ak.size else 1.0)
        if m:
            dt = complex(np.linalg.det(tangency_block(fp, k)))
        else:
            dt = 1.0 + 0j
        det_At.append(dt)
        name = f"det(A~_{k})"
        if abs(dt) <= factor_tol:
            failing.append(name)

    block_dets = []
    block_trivial = m <= 4
    block_ok = True
    if m > 4:
        rect = lambda_rect(fp)
        for s_idx, family in enumerate(_block_families(m), start=1):
            keep = [c for c in range(m) if (c + 1) not in family] + list(range(m, m + 4))
            minor = rect[:, keep]
            value = complex(np.linalg.det(minor))
            name = f"det(Lambda_J{s_idx})"
            block_dets.append((name, value))
            if abs(value) <= factor_tol:
                failing.append(name)
                block_ok = False

    # direct rank route for the same surjectivity property
    rank_margins = []
    rank_ok = True
    if m:
        a1 = build_Ak(fp, 1)
        v = build_V(fp.points)
        for j in range(m):
            cols = [c for c in range(n1 + m) if c != n1 + j]
            stacked = np.hstack([a1[:, cols], v])
            sv = np.linalg.svd(stacked, compute_uv=False)
            margin = float(sv[n1 + m - 1])
            rank_margins.append(margin)
            if margin <= rank_tol:
                failing.append(f"surjectivity(z_{j + 1})")
                rank_ok = False
    disagree = (not block_trivial) and (block_ok != rank_ok)
    return GenericityCertificate(
        k0=k0,
        lambda_factors=tuple(lam_factors),
        det_A=tuple(det_A),
        det_A_tilde=tuple(det_At),
        cond_A=tuple(cond_A),
        block_dets=tuple(block_dets),
        block_route_trivial=block_trivial,
        rank_margins=tuple(rank_margins),
        surjectivity_routes_disagree=disagree,
        failing=tuple(failing),
        verdict=not failing,
        curve_quadratics=tuple(curve_quadratics) if curve_quadratics is not None else (),
    )


def shift_quadratics(curve: TangencyCurveJets, correction: Sequence[complex],
                     points: MarkedPoints) -> TangencyCurveJets:
    """Shift every branch's first coefficient by the Vandermonde image of a
    4-vector (the quadratic action of a tangent-to-identity plane map)."""
    correction = np.asarray(list(correction), dtype=np.complex128)
    if correction.shape != (4,):
        raise ValueError("correction must have exactly four coefficients")
    delta = build_V(points) @ correction
    branches = list(curve.all_branches)
    out = []
    for b, d in zip(branches, delta):
        coeffs = list(b.coeffs)
        coeffs[0] += d
        out.append(BranchJet(b.anchor, coeffs))
    n1 = len(curve.branches_p)
    return TangencyCurveJets(tuple(out[:n1]), tuple(out[n1:]))


@dataclass(frozen=True)
class RealizationResult:
    """Recovered displacement jets plus the certificate and residual."""

    s_jets: tuple
    z_jets: tuple
    certificate: GenericityCertificate
    residual: float
    correction_used: tuple
    curve: TangencyCurveJets


def realize(fp_template: FoliationPairData, curve: TangencyCurveJets,
            k0: int | None = None, correction: Sequence[complex] | None = None,
            factor_tol: float = 1e-8, rank_tol: float = 1e-6,
            z1_tol: float = 1e-9,
            tol: ToleranceConfig = DEFAULT_TOL) -> RealizationResult:
    """Recover displacement jets whose curve of tangencies matches ``curve``.

    ``fp_template`` supplies the marked points, eigenvalue ratios,
    involutions and background; its own displacement jets are ignored.  The
    order-k systems are solved inductively, with offsets recomputed from the
    already-recovered lower orders (top order zeroed).
    """
    fp = fp_template
    k0 = fp.k0 if k0 is None else k0
    if curve.order() < k0:
        raise ValueError(f"curve order {curve.order()} below requested {k0}")
    if len(curve.branches_p) != fp.n_plus_1 or len(curve.branches_q) != fp.m:
        raise ValueError("curve must carry one branch per marked point")
    for b, loc in zip(curve.all_branches, fp.points.all):
        if abs(b.anchor - loc) > 1e-9:
            raise ValueError(f"branch anchored at {b.anchor}, expected {loc}")
    cert = check_genericity(fp, k0, curve_quadratics=curve.quadratics(),
                            factor_tol=factor_tol, rank_tol=rank_tol)
    if not cert.verdict:
        raise NonGenericConfigError(cert)
    correction_used = (0j, 0j, 0j, 0j)
    if correction is not None:
        curve = shift_quadratics(curve, correction, fp.points)
        correction_used = tuple(complex(c) for c in correction)

    n1, m = fp.n_plus_1, fp.m
    lu = {}
    a1 = build_Ak(fp, 1)
    for k in range(1, k0 + 1):
        ak = build_Ak(fp, k)
        off_diag = ak - np.diag(np.diag(ak))
        if k > 1 and not np.allclose(off_diag, a1 - np.diag(np.diag(a1)), rtol=0, atol=0):
            raise AssertionError("order matrices must differ only on the diagonal")
        lu[k] = scipy.linalg.lu_factor(ak)

    engine = NormalFormEngine(fp, tol=tol)
    for i in range(n1):
        engine.s[i][:] = 0j
    for j in range(m):
        engine.z[j][:] = 0j
    for k in range(1, k0 + 1):
        residuals = engine.residuals(k)
        engine.apply_step(k, residuals)  # provisional stage, top order zero
        offsets = curves_from_engine(engine, order=k, tol=tol).coefficient_vector(k)
        rhs = curve.coefficient_vector(k) - offsets
        solution = scipy.linalg.lu_solve(lu[k], rhs)
        s_vals = solution[:n1]
        z_vals = -2.0 * solution[n1:]
        if k == 1 and m and np.min(np.abs(z_vals)) <= z1_tol:
            raise NonGenericCurveError(
                "curve quadratics force a vanishing leading displacement; "
                "shift them inside the quadratic action (see shift_quadratics)"
            )
        engine.set_invariants(k, s_vals, z_vals)
        engine.apply_step(k, residuals)  # final stage with recovered tops
    recovered = curves_from_engine(engine, order=k0, tol=tol)
    residual = 0.0
    for k in range(1, k0 + 1):
        residual = max(residual, float(np.max(np.abs(
            recovered.coefficient_vector(k) - curve.coefficient_vector(k)))))
    s_jets = tuple(XJet([0j] + list(engine.s[i][:k0])) for i in range(n1))
    z_jets = tuple(XJet([0j] + list(engine.z[j][:k0])) for j in range(m))
    return RealizationResult(
        s_jets=s_jets,
        z_jets=z_jets,
        certificate=cert,
        residual=residual,
        correction_used=correction_used,
        curve=recovered,
    )
