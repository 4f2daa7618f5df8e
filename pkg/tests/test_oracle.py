"""The brute-force engines themselves."""

import numpy as np
import pytest

from folijet.oracle import (
    BiJet,
    GridOverflowError,
    bicompose,
    fit_taylor,
    laurent_divide,
    lu_det,
    multilinear_coefficient,
    substitute,
)
from folijet.series import XJet, compose
from folijet.ufunc import LaurentJet

C = 0.1 + 0.2j


def random_bijet(rng, kx=4, vmin=-3, vmax=6, scale=0.4):
    g = BiJet(C, kx, vmin, vmax)
    g.grid[:] = rng.normal(size=g.grid.shape) * scale \
        + 1j * rng.normal(size=g.grid.shape) * scale
    return g


def test_identity_composition():
    outer = BiJet.variable_v(C, 3, -2, 4)
    inner_x = BiJet(C, 3, -2, 4)
    inner_x.set_term(1, 0, 1.0)
    inner_v = BiJet.variable_v(C, 3, -2, 4)
    inner_v.set_term(1, 0, 1.0)  # new v = v + x
    out = bicompose(outer, inner_x, inner_v)
    assert out.coefficient(0, 1) == 1.0
    assert out.coefficient(1, 0) == 1.0
    assert out.max_abs() == 1.0


def test_matches_scalar_compose_for_u_independent_outer(rng):
    order = 6
    outer_jet = XJet([0j] + list(rng.normal(size=order) + 1j * rng.normal(size=order)))
    inner_jet = XJet([0j] + list(rng.normal(size=order) * 0.5))
    outer = BiJet(C, order, -2, 4)
    inner_x = BiJet(C, order, -2, 4)
    for r in range(1, order + 1):
        outer.set_term(r, 0, outer_jet.coeffs[r])
        inner_x.set_term(r, 0, inner_jet.coeffs[r])
    inner_v = BiJet.variable_v(C, order, -2, 4)
    got = bicompose(outer, inner_x, inner_v)
    want = compose(outer_jet, inner_jet)
    for r in range(order + 1):
        assert got.coefficient(r, 0) == pytest.approx(want.coeffs[r], abs=1e-12)


def test_bicompose_associativity(rng):
    # low v-degree components keep every composite inside the frame, so the
    # truncated compositions associate exactly
    kx, vmin, vmax = 4, -3, 8
    deg = 2

    def random_map(scale=0.25):
        x = random_bijet(rng, kx, vmin, vmax, scale)
        v = random_bijet(rng, kx, vmin, vmax, scale)
        for g in (x, v):
            g.grid[0, :] = 0
            g.grid[:, : -vmin] = 0            # holomorphic
            g.grid[:, -vmin + deg + 1:] = 0   # degree cap
        v.set_term(0, 1, 1.0)  # v-component = v + higher
        x.set_term(1, 0, 1.0 + 0.2j)
        return x, v

    ax, av = random_map()
    bx, bv = random_map()
    outer = random_bijet(rng, kx, vmin, vmax, 0.5)
    outer.grid[:, : -vmin] = 0
    outer.grid[:, -vmin + deg + 1:] = 0
    # (outer o a) o b == outer o (a o b)
    oa = bicompose(outer, ax, av)
    lhs = bicompose(oa, bx, bv)
    abx = bicompose(ax, bx, bv)
    abv = bicompose(av, bx, bv)
    rhs = bicompose(outer, abx, abv)
    assert np.max(np.abs(lhs.grid - rhs.grid)) < 1e-10 * max(1.0, rhs.max_abs())


def test_grid_overflow_reported():
    g = BiJet(C, 3, -2, 4)
    with pytest.raises(GridOverflowError):
        g.set_term(1, -3, 1.0)
    deep = LaurentJet(C, -4, [1.0, 0, 0, 0, 1.0], exact_tail=True)
    with pytest.raises(GridOverflowError):
        g.embed_row(1, deep)


def test_substitution_requires_vanishing_inner():
    with pytest.raises(ValueError):
        substitute(XJet([0, 1]), XJet([1, 1]))


def test_laurent_division_against_multiplication(rng):
    for _ in range(30):
        q_true = LaurentJet(C, -2, rng.normal(size=8) + 1j * rng.normal(size=8))
        h = LaurentJet(C, 1, rng.normal(size=8) + 1j * rng.normal(size=8))
        if abs(h.coefficient(1)) < 0.3:
            continue
        f = q_true * h
        got = laurent_divide(f, h, 6)
        assert got.min_exp == q_true.min_exp
        for e in range(q_true.min_exp, q_true.min_exp + 6):
            assert got.coefficient(e) == pytest.approx(q_true.coefficient(e), abs=1e-9)


def test_lu_det_matches_numpy(rng):
    for n in (1, 3, 6):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        assert lu_det(a) == pytest.approx(complex(np.linalg.det(a)), rel=1e-10)
    singular = np.array([[1.0, 2.0], [2.0, 4.0]], dtype=complex)
    assert lu_det(singular) == pytest.approx(0.0, abs=1e-12)


def test_fit_taylor_recovers_polynomial(rng):
    coeffs = rng.normal(size=5) + 1j * rng.normal(size=5)
    xs = [0.3 * np.exp(2j * np.pi * t / 11) for t in range(11)]
    vals = [sum(c * x ** k for k, c in enumerate(coeffs)) for x in xs]
    got = fit_taylor(xs, vals, 4)
    assert np.allclose(got, coeffs, atol=1e-11)


def test_multilinear_coefficient_extraction():
    def f(t):
        return 2.0 * t[0] * t[1] + 3.0 * t[0] - 1.5 * t[1] + 7.0

    assert multilinear_coefficient(f, 2) == pytest.approx(2.0)
