"""Laurent jets, pole sums, principal-part extraction."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folijet.oracle import laurent_divide
from folijet.ufunc import (
    DegenerateInputError,
    LaurentJet,
    MarkedPoints,
    PoleEvaluationError,
    PoleSum,
    principal_part_quotient,
)

CENTER = 0.4 - 0.7j


def random_jet(rng, min_exp, max_exp, scale=1.0, exact=False):
    width = max_exp - min_exp + 1
    c = rng.normal(size=width) * scale + 1j * rng.normal(size=width) * scale
    return LaurentJet(CENTER, min_exp, c, exact_tail=exact)


# ---------------------------------------------------------------- quotient

def test_constant_over_double_zero_matches_residue_formula():
    # h with double zero, second derivative 2: principal part of c/h' is c/(2 v)
    tau = 0.3 + 0.2j
    g = LaurentJet(CENTER, 0, [0, 0, 1.0, -tau], exact_tail=True)
    h = g.differentiate()  # 2v - 3 tau v^2
    c = 1.7 - 0.4j
    f = LaurentJet.constant(CENTER, c, max_exp=4)
    principal, regular = principal_part_quotient(f, h)
    assert principal.coefficient(-1) == pytest.approx(c / 2)
    assert principal.pole_order() == 1
    # regular value f'/h' - f h''/(2 h'^2) = -(c/2) g'''(center)/4 = (3/4) c tau
    assert regular == pytest.approx(0.75 * c * tau, rel=1e-12)
    # cross-check against the full division oracle
    quot = laurent_divide(f, h, 6)
    assert regular == pytest.approx(quot.coefficient(0), rel=1e-12)


def test_quotient_of_jet_by_itself():
    rng = np.random.default_rng(0)
    h = random_jet(rng, 0, 8)
    h.coeffs[0] = 0.0  # simple zero at the center
    h = LaurentJet(CENTER, 0, h.coeffs)
    principal, regular = principal_part_quotient(h, h)
    assert np.all(np.abs(principal.principal_coeffs()) < 1e-12)
    assert regular == pytest.approx(1.0)


def test_quotient_matches_long_division_oracle(rng):
    worst = 0.0
    for _ in range(200):
        f = random_jet(rng, 0, 10)
        h = random_jet(rng, 0, 10)
        h.coeffs[0] = 0.0
        h = LaurentJet(CENTER, 0, h.coeffs)
        if abs(h.coefficient(1)) < 0.1:
            continue
        principal, regular = principal_part_quotient(f, h)
        want = laurent_divide(f, h, 4)
        worst = max(worst, abs(principal.coefficient(-1) - want.coefficient(-1)))
        worst = max(worst, abs(regular - want.coefficient(0)))
    assert worst < 1e-10


def test_degenerate_denominator_rejected():
    # leading coefficient too small to trust, too large to discard as zero
    f = LaurentJet.constant(CENTER, 1.0, max_exp=4)
    h = LaurentJet(CENTER, 0, [0, 1e-8, 1.0, 0.5], exact_tail=True)
    with pytest.raises(DegenerateInputError):
        principal_part_quotient(f, h)


def test_simple_pole_regular_value_formula(rng):
    # regular value f'/h' - f h''/(2 h'^2) at a simple zero
    for _ in range(20):
        f = random_jet(rng, 0, 8)
        h = random_jet(rng, 1, 8)  # h(center) = 0
        if abs(h.coefficient(1)) < 0.2:
            continue
        _, regular = principal_part_quotient(f, h)
        f0, f1 = f.coefficient(0), f.coefficient(1)
        h1, h2 = h.coefficient(1), 2 * h.coefficient(2)
        assert regular == pytest.approx(f1 / h1 - f0 * h2 / (2 * h1 ** 2), rel=1e-10)


# ---------------------------------------------------------------- expansion

def test_expand_own_pole_is_pure_principal():
    q1 = 1.0 + 0.5j
    ps = PoleSum.from_parts([(q1, [1.0])])
    jet = ps.expand_at(q1, 3)
    assert jet.coefficient(-1) == 1.0
    assert all(abs(jet.coefficient(e)) == 0 for e in range(0, 4))


def test_expand_geometric_series_by_hand():
    a, b = 0.3 + 0.1j, -1.2 + 0.8j
    ps = PoleSum.from_parts([(a, [1.0])])
    jet = ps.expand_at(b, 2)
    d = b - a
    assert jet.coefficient(0) == pytest.approx(1 / d)
    assert jet.coefficient(1) == pytest.approx(-1 / d ** 2)
    assert jet.coefficient(2) == pytest.approx(1 / d ** 3)


def test_expansion_is_linear(rng):
    a, b, c = 1.0, -1.0 + 0.2j, 0.1 + 1.1j
    p1 = PoleSum.from_parts([(a, [0.3 - 1j, 0.5])])
    p2 = PoleSum.from_parts([(b, [1.1, 0, 2.0])])
    lhs = (p1 + p2).expand_at(c, 6)
    rhs = p1.expand_at(c, 6) + p2.expand_at(c, 6)
    assert np.allclose(lhs.coeffs, rhs.coeffs)


def test_principal_round_trip(rng):
    points = [0.9 + 0.1j, -1.1 + 0.4j, 0.1 - 1.0j]
    parts = [(p, rng.normal(size=3) + 1j * rng.normal(size=3)) for p in points]
    ps = PoleSum.from_parts(parts)
    rebuilt = PoleSum.from_parts(
        [(p, ps.expand_at(p, 0).principal_coeffs()) for p in points])
    for p, original in parts:
        assert np.allclose(rebuilt.principal_at(p), original, atol=1e-12)


# ---------------------------------------------------------------- calculus

def test_derivative_of_simple_pole():
    c, a = 2.0 - 1j, 0.5
    ps = PoleSum.from_parts([(a, [c])])
    d = ps.differentiate()
    assert np.allclose(d.principal_at(a), [0, -c])


def test_evaluate_simple_pole():
    a, b = 0.5, 2.0 + 1j
    ps = PoleSum.from_parts([(a, [1.0])])
    assert ps.evaluate(b) == pytest.approx(1 / (b - a))
    with pytest.raises(PoleEvaluationError):
        ps.evaluate(a)


def test_jet_product_matches_convolution_oracle(rng):
    for _ in range(50):
        a = random_jet(rng, -2, 6, exact=True)
        b = random_jet(rng, -1, 5, exact=True)
        got = a * b
        want = np.convolve(a.coeffs, b.coeffs)
        assert got.min_exp == a.min_exp + b.min_exp
        assert np.allclose(got.coeffs, want[: len(got.coeffs)])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 9999))
def test_linearity_and_leibniz(seed):
    rng = np.random.default_rng(seed)
    a = random_jet(rng, -3, 7)
    b = random_jet(rng, -2, 7)
    s = (a + b).differentiate()
    t = a.differentiate() + b.differentiate()
    lo, hi = max(s.min_exp, t.min_exp), min(s.max_exp, t.max_exp)
    assert all(abs(s.coefficient(e) - t.coefficient(e)) < 1e-12 for e in range(lo, hi + 1))
    lhs = (a * b).differentiate()
    rhs = a.differentiate() * b + a * b.differentiate()
    lo, hi = max(lhs.min_exp, rhs.min_exp), min(lhs.max_exp, rhs.max_exp)
    scale = max(1.0, lhs.max_abs())
    assert all(abs(lhs.coefficient(e) - rhs.coefficient(e)) < 1e-11 * scale
               for e in range(lo, hi + 1))


def test_inversion_identity(rng):
    for _ in range(20):
        h = random_jet(rng, 1, 9)
        if abs(h.coefficient(1)) < 0.3:
            continue
        inv = h.invert(order=4)
        one = h * inv
        assert one.coefficient(0) == pytest.approx(1.0)
        assert all(abs(one.coefficient(e)) < 1e-11 for e in range(one.min_exp, 0))


# ---------------------------------------------------------------- marked points

def test_marked_points_reject_near_coincidence():
    with pytest.raises(ValueError):
        MarkedPoints([0.0, 1e-8], [1.0])
    with pytest.raises(ValueError):
        MarkedPoints([0.0], [1.0, 1.0 + 1e-9j])
    pts = MarkedPoints([0.0, 1.0], [2.0])
    assert pts.n_plus_1 == 2 and pts.m == 1


def test_jet_evaluation_at_pole_rejected():
    jet = LaurentJet.monomial(CENTER, -1, 1.0)
    with pytest.raises(PoleEvaluationError):
        jet.evaluate(CENTER)
    assert jet.evaluate(CENTER + 0.5) == pytest.approx(2.0)
