"""Seeded verification suite behind the `folijet verify` command.

Runs the independent brute-force engines against the library's main paths
on randomly generated configurations and reports the worst residual of each
check.  Deterministic for a fixed seed.
"""

from __future__ import annotations

import numpy as np

from . import oracle
from .models import tangency_chart_u_coeffs
from .normalform import compute_normal_form
from .random_data import random_pair, random_scalar_jet
from .realize import build_Ak, realize
from .series import compose, revert
from .tangency import offset_vector, tangency_curves


def _check(name: str, residual: float, tolerance: float) -> dict:
    return {"name": name, "max_residual": float(residual),
            "tolerance": float(tolerance), "pass": bool(residual < tolerance)}


def _factorization_residual(fp, table, vmin: int, vmax: int) -> float:
    k0 = table.k0
    worst = 0.0

    def global_grid(column, center):
        g = oracle.BiJet(center, k0, vmin, vmax)
        for r in range(1, k0 + 1):
            g.embed_row(r, column[r - 1].expand_at(center, vmax))
        return g

    for i, sm in enumerate(fp.singular):
        c = sm.location
        a_g = global_grid(table.a_global, c)
        b_g = global_grid(table.b_global, c)
        psi = oracle.binomial_chart_bijet(
            c, sm.lam, [0] + [sm.s_coeff(r) for r in range(1, k0 + 1)], k0, vmin, vmax)
        v = oracle.BiJet.variable_v(c, k0, vmin, vmax)
        for r in range(1, k0 + 1):
            v.set_term(r, 0, sm.s_coeff(r))
        eps_g = oracle.BiJet(c, k0, vmin, vmax)
        for r in range(1, k0 + 1):
            eps_g.embed_row(r, fp.background.eps[i][r - 1])
        x_g = oracle.bicompose(eps_g, psi, v)
        a_comp = oracle.bicompose(a_g, x_g, v)
        b_comp = oracle.bicompose(b_g, x_g, v) + v
        for r in range(1, k0 + 1):
            for e in range(vmin, k0 + 2):
                worst = max(worst, abs(a_comp.coefficient(r, e)
                                       - table.a_sing[i][r - 1].coefficient(e)))
                worst = max(worst, abs(b_comp.coefficient(r, e)
                                       - table.b_sing[i][r - 1].coefficient(e)))
    for j, tm in enumerate(fp.tangency):
        c = tm.location
        a_g = global_grid(table.a_global, c)
        b_g = global_grid(table.b_global, c)
        phi_rows = tangency_chart_u_coeffs(tm, k0, max_exp=vmax + 2)
        v = oracle.BiJet.variable_v(c, k0, vmin, vmax)
        for r in range(1, k0 + 1):
            v.embed_row(r, phi_rows[r - 1])
        x_unit = oracle.BiJet(c, k0, vmin, vmax)
        x_unit.set_term(1, 0, 1.0)
        sig_g = oracle.BiJet(c, k0, vmin, vmax)
        for r in range(1, k0 + 1):
            sig_g.embed_row(r, fp.background.sig[j][r - 1])
        x_g = oracle.bicompose(sig_g, x_unit, v)
        a_comp = oracle.bicompose(a_g, x_g, v)
        b_comp = oracle.bicompose(b_g, x_g, v) + v
        for r in range(1, k0 + 1):
            for e in range(vmin, k0 + 2):
                worst = max(worst, abs(a_comp.coefficient(r, e)
                                       - table.a_tang[j][r - 1].coefficient(e)))
                worst = max(worst, abs(b_comp.coefficient(r, e)
                                       - table.b_tang[j][r - 1].coefficient(e)))
    return worst


def run_verification(seed: int = 0, k0: int = 6, trials: int = 5) -> dict:
    """Oracle-vs-main-path property report; deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    checks = []

    # scalar composition against Horner substitution
    worst = 0.0
    for _ in range(trials * 10):
        outer = random_scalar_jet(rng, 10, 0.5)
        outer.coeffs[0] = complex(rng.normal(), rng.normal())
        inner = random_scalar_jet(rng, 10, 0.5)
        got = compose(outer, inner)
        want = oracle.substitute(outer, inner)
        worst = max(worst, max(abs(a - b) for a, b in zip(got.coeffs, want.coeffs)))
    checks.append(_check("compose-vs-substitution", worst, 1e-10))

    # reversion identity, relative to the inverse's coefficient scale
    worst = 0.0
    for _ in range(trials * 10):
        f = random_scalar_jet(rng, 12, 0.4, first=1.0)
        g = revert(f)
        scale = max(1.0, max(abs(c) for c in g.coeffs))
        for side in (compose(f, g), compose(g, f)):
            worst = max(worst, max(abs(c - (1.0 if r == 1 else 0.0))
                                   for r, c in enumerate(side.coeffs)) / scale)
    checks.append(_check("reversion-identity", worst, 1e-10))

    # chart u-component defining relation (pointwise Newton oracle); samples
    # stay well inside the slope function's zero-free disk and the truncation
    # radius in x
    worst = 0.0
    for _ in range(trials):
        fp = random_pair(rng, 1, 1, k0)
        tm = fp.tangency[0]
        rows = tangency_chart_u_coeffs(tm, k0)
        for _ in range(4):
            u0 = tm.location + 0.25 * np.exp(1j * rng.uniform(0, 2 * np.pi))
            x0 = 0.002 * np.exp(1j * rng.uniform(0, 2 * np.pi))
            series_val = u0 + sum(rows[r - 1].evaluate(u0) * x0 ** r
                                  for r in range(1, k0 + 1))
            newton_val = oracle.newton_phi(tm, x0, u0)
            worst = max(worst, abs(series_val - newton_val))
    checks.append(_check("chart-u-defining-relation", worst, 1e-8))

    # gluing identities against grid substitution
    worst = 0.0
    for t in range(trials):
        fp = random_pair(rng, 2, 1, min(k0, 5),
                         background="default" if t % 2 == 0 else "random")
        table = compute_normal_form(fp)
        worst = max(worst, _factorization_residual(
            fp, table, -(2 * fp.k0 + 6), 3 * fp.k0 + 10))
    checks.append(_check("gluing-vs-grid-oracle", worst, 1e-9))

    # matrix identity for the curve coefficients
    worst = 0.0
    for _ in range(trials):
        fp = random_pair(rng, 2, 2, k0)
        curve = tangency_curves(fp)
        for k in range(1, k0 + 1):
            vec = np.concatenate([
                [fp.singular[i].s_coeff(k) for i in range(fp.n_plus_1)],
                [-fp.tangency[j].z_coeff(k) / 2 for j in range(fp.m)]])
            lhs = build_Ak(fp, k) @ vec
            rhs = curve.coefficient_vector(k) - offset_vector(fp, k)
            scale = max(1.0, float(np.max(np.abs(lhs))))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))) / scale)
    checks.append(_check("curve-matrix-identity", worst, 1e-9))

    # determinant factorization against pivoted elimination
    worst = 0.0
    for _ in range(trials):
        fp = random_pair(rng, 2, 2, k0)
        for k in range(1, k0 + 1):
            ak = build_Ak(fp, k)
            lam_prod = np.prod([1.0 - k * sm.lam for sm in fp.singular])
            tilde = oracle.lu_det(ak[fp.n_plus_1:, fp.n_plus_1:])
            full = oracle.lu_det(ak)
            scale = max(1.0, abs(full))
            worst = max(worst, abs(full - tilde * lam_prod) / scale)
    checks.append(_check("determinant-factorization", worst, 1e-9))

    # realization round trip
    worst = 0.0
    for _ in range(trials):
        fp = random_pair(rng, 2, 2, k0)
        curve = tangency_curves(fp)
        res = realize(fp, curve)
        for i in range(fp.n_plus_1):
            worst = max(worst, max(abs(a - b) for a, b in zip(
                res.s_jets[i].coeffs[1:], fp.singular[i].s_jet.coeffs[1: k0 + 1])))
        for j in range(fp.m):
            worst = max(worst, max(abs(a - b) for a, b in zip(
                res.z_jets[j].coeffs[1:], fp.tangency[j].z_jet.coeffs[1: k0 + 1])))
        worst = max(worst, res.residual)
    checks.append(_check("realization-round-trip", worst, 1e-8))

    return {"seed": int(seed), "k0": int(k0), "trials": int(trials),
            "checks": checks, "pass": all(c["pass"] for c in checks)}
