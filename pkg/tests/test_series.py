"""Scalar truncated-series composition and reversion."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folijet.oracle import substitute
from folijet.series import XJet, compose, revert


def random_jet(rng, order, scale=0.5, first=None):
    c = [0j] + list(rng.normal(size=order) * scale + 1j * rng.normal(size=order) * scale)
    if first is not None:
        c[1] = first
    return XJet(c)


def test_identity_outer_returns_inner(rng):
    f = random_jet(rng, 6)
    got = compose(XJet.identity(6), f)
    assert np.allclose(got.coeffs, f.coeffs)


def test_square_composed_with_x_plus_x2():
    # (x + x^2)^2 = x^2 + 2x^3 + x^4
    got = compose(XJet([0, 0, 1, 0, 0]), XJet([0, 1, 1, 0, 0]))
    assert np.allclose(got.coeffs, [0, 0, 1, 2, 1])


def test_compose_matches_substitution_oracle(rng):
    worst = 0.0
    for _ in range(50):
        outer = random_jet(rng, 10)
        outer.coeffs[0] = complex(rng.normal(), rng.normal())
        inner = random_jet(rng, 10)
        got = compose(outer, inner)
        want = substitute(outer, inner)
        scale = max(1.0, max(abs(c) for c in want.coeffs))
        worst = max(worst, max(abs(a - b) for a, b in zip(got.coeffs, want.coeffs)) / scale)
    assert worst < 1e-10


def test_compose_requires_vanishing_inner():
    with pytest.raises(ValueError):
        compose(XJet([0, 1, 0]), XJet([1, 1, 0]))


def test_mixed_order_truncates_to_minimum():
    a = XJet([1, 2, 3, 4])
    b = XJet([0, 1])
    assert (a + b).order == 1
    assert (a * b).order == 1
    assert compose(a, b).order == 1
    with pytest.raises(ValueError):
        a.truncated(5)


def test_revert_identity():
    g = revert(XJet.identity(5))
    assert np.allclose(g.coeffs, XJet.identity(5).coeffs)


def test_revert_x_plus_x2_by_hand():
    # inverse of x + x^2 is x - x^2 + 2x^3 - 5x^4 (Catalan signs)
    g = revert(XJet([0, 1, 1, 0, 0]))
    assert np.allclose(g.coeffs, [0, 1, -1, 2, -5])


def test_revert_requires_unit_linear_part():
    with pytest.raises(ValueError):
        revert(XJet([0, 2.0, 1.0]))
    with pytest.raises(ValueError):
        revert(XJet([0, 0.0, 1.0]))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_reversion_is_two_sided_inverse(seed):
    rng = np.random.default_rng(seed)
    f = random_jet(rng, 12, scale=0.4, first=1.0)
    g = revert(f)
    scale = max(1.0, max(abs(c) for c in g.coeffs))
    for comp in (compose(f, g), compose(g, f)):
        target = XJet.identity(12)
        assert max(abs(a - b) for a, b in zip(comp.coeffs, target.coeffs)) < 1e-10 * scale


def test_evaluate_horner():
    f = XJet([1, 2, 3])
    assert f.evaluate(0.5) == pytest.approx(1 + 2 * 0.5 + 3 * 0.25)
