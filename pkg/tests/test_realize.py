"""Matrices, genericity certificate and the inverse solver."""

import numpy as np
import pytest

from folijet.models import FoliationPairData, SingularModel, TangencyModel
from folijet.oracle import lu_det, multilinear_coefficient
from folijet.random_data import (
    random_involution_jet,
    random_marked_points,
    random_pair,
    random_scalar_jet,
)
from folijet.realize import (
    NonGenericConfigError,
    NonGenericCurveError,
    build_Ak,
    build_V,
    check_genericity,
    lambda_tilde,
    realize,
    shift_quadratics,
    tangency_block,
)
from folijet.tangency import tangency_curves


def with_lambda(fp, i, lam):
    singular = list(fp.singular)
    sm = singular[i]
    singular[i] = SingularModel(sm.index, sm.location, lam, sm.s_jet)
    return FoliationPairData(fp.points, singular, fp.tangency, fp.background, fp.k0)


# ----------------------------------------------------------- matrices

def test_single_point_matrix_is_scalar(rng):
    fp = random_pair(rng, 1, 0, 3)
    ak = build_Ak(fp, 2)
    assert ak.shape == (1, 1)
    assert ak[0, 0] == pytest.approx(1 - 2 * fp.singular[0].lam)


def test_matrix_blocks(rng):
    fp = random_pair(rng, 2, 2, 4)
    ak = build_Ak(fp, 3)
    p, q = fp.points.p, fp.points.q
    assert ak[0, 0] == pytest.approx(1 - 3 * fp.singular[0].lam)
    assert ak[0, 2] == pytest.approx(1 / (p[0] - q[0]))
    assert ak[1, 3] == pytest.approx(1 / (p[1] - q[1]))
    assert np.all(ak[2:, :2] == 0)
    assert ak[2, 3] == pytest.approx(1 / (q[0] - q[1]))
    assert ak[2, 2] == pytest.approx(-1.5 * fp.tangency[0].tau)


def test_vandermonde_rows(rng):
    fp = random_pair(rng, 2, 1, 3)
    v = build_V(fp.points)
    rho = fp.points.all[2]
    assert np.allclose(v[2], [1, rho, rho ** 2, rho ** 3])


def test_determinant_factorization_vs_lu_oracle(rng):
    for _ in range(10):
        fp = random_pair(rng, 2, 2, 6)
        for k in range(1, 7):
            ak = build_Ak(fp, k)
            full = lu_det(ak)
            tilde = lu_det(tangency_block(fp, k))
            lam_prod = np.prod([1 - k * sm.lam for sm in fp.singular])
            assert abs(full - tilde * lam_prod) < 1e-9 * max(1.0, abs(full))


@pytest.mark.parametrize("m", [2, 3])
def test_leading_coefficient_of_tangency_determinant(rng, m):
    """det of the tangency block is (-3/2)^m tau_1..tau_m plus lower order."""
    fp = random_pair(rng, 1, m, 3)
    q = fp.points.q

    def det_at(taus):
        a = np.zeros((m, m), dtype=np.complex128)
        for j in range(m):
            a[j, j] = -1.5 * taus[j]
            for l in range(m):
                if l != j:
                    a[j, l] = 1 / (q[j] - q[l])
        return lu_det(a)

    lead = multilinear_coefficient(det_at, m, probe=1.3 - 0.4j)
    assert abs(lead - (-1.5) ** m) < 1e-6 * abs(lead)


def test_matrices_differ_only_on_diagonal(rng):
    fp = random_pair(rng, 2, 2, 5)
    a1 = build_Ak(fp, 1)
    for k in (2, 5):
        ak = build_Ak(fp, k)
        off = ak - np.diag(np.diag(ak))
        assert np.array_equal(off, a1 - np.diag(np.diag(a1)))


# ----------------------------------------------------------- Cauchy/Vandermonde minors

@pytest.mark.parametrize("s", [1, 2])
def test_hybrid_determinant_leading_term(rng, s):
    ys = []
    while len(ys) < s + 4:
        cand = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if all(abs(cand - o) > 0.4 for o in ys):
            ys.append(cand)

    def det_at(thetas):
        return lu_det(lambda_tilde(ys, thetas))

    lead = multilinear_coefficient(det_at, s, probe=0.9 + 0.3j)
    want = np.prod([ys[j] - ys[i]
                    for i in range(s, s + 4) for j in range(i + 1, s + 4)])
    assert abs(lead - want) < 1e-8 * max(1.0, abs(want))


# ----------------------------------------------------------- certificate

def test_resonant_ratio_rejected_with_named_factor(rng):
    fp = random_pair(rng, 2, 1, 4)
    fp = with_lambda(fp, 0, 0.5 + 0j)  # 1 - 2*lambda = 0
    cert = check_genericity(fp)
    assert not cert.verdict
    assert "(1-2*lambda_1)" in cert.failing


def test_tau_on_fitted_zero_set_rejected(rng):
    # pick tau_1 on the zero set of the first tangency-block determinant by
    # an affine fit in that variable
    points = random_marked_points(rng, 1, 2)
    lam = [complex(2.3, 1.1)]
    z1 = random_scalar_jet(rng, 4, 0.3, first=1.0)
    z2 = random_scalar_jet(rng, 4, 0.3, first=0.8)
    tau2 = 1.1 - 0.3j

    def build(tau1):
        tang = [
            TangencyModel(0, points.q[0], random_involution_jet(rng, 4, tau=tau1), z1),
            TangencyModel(1, points.q[1], random_involution_jet(rng, 4, tau=tau2), z2),
        ]
        sing = [SingularModel(0, points.p[0], lam[0], random_scalar_jet(rng, 4, 0.3))]
        return FoliationPairData(points, sing, tang, None, 4)

    d0 = lu_det(tangency_block(build(0.0), 1))
    d1 = lu_det(tangency_block(build(1.0), 1))
    tau_zero = -d0 / (d1 - d0)
    cert = check_genericity(build(tau_zero))
    assert not cert.verdict
    assert "det(A~_1)" in cert.failing


def test_random_generic_configurations_pass(rng):
    for seed in range(25):
        fp = random_pair(np.random.default_rng(seed), 2, 2, 6)
        cert = check_genericity(fp)
        assert cert.verdict, cert.failing


def test_small_m_skips_block_route(rng):
    fp = random_pair(rng, 1, 2, 3)
    cert = check_genericity(fp)
    assert cert.block_route_trivial
    assert cert.block_dets == ()
    assert not cert.surjectivity_routes_disagree


def test_block_route_present_for_large_m(rng):
    fp = random_pair(rng, 1, 5, 2)
    cert = check_genericity(fp)
    assert not cert.block_route_trivial
    names = [name for name, _ in cert.block_dets]
    assert names == ["det(Lambda_J1)", "det(Lambda_J2)"]
    assert cert.verdict, cert.failing


def test_certificate_records_quadratics(rng):
    fp = random_pair(rng, 1, 1, 3)
    cert = check_genericity(fp, curve_quadratics=[1 + 2j, 3.0])
    assert cert.curve_quadratics == (1 + 2j, 3.0 + 0j)


# ----------------------------------------------------------- solver

def test_round_trip_recovers_invariants(rng):
    fp = random_pair(rng, 2, 2, 6)
    curve = tangency_curves(fp)
    res = realize(fp, curve)
    for i, sm in enumerate(fp.singular):
        got = np.asarray(res.s_jets[i].coeffs[1:])
        want = np.asarray(sm.s_jet.coeffs[1:7])
        assert np.max(np.abs(got - want)) < 1e-8 * max(1.0, np.max(np.abs(want)))
    for j, tm in enumerate(fp.tangency):
        got = np.asarray(res.z_jets[j].coeffs[1:])
        want = np.asarray(tm.z_jet.coeffs[1:7])
        assert np.max(np.abs(got - want)) < 1e-8 * max(1.0, np.max(np.abs(want)))
    assert res.residual < 1e-10
    assert res.correction_used == (0j, 0j, 0j, 0j)


def test_zero_curve_is_non_generic(rng):
    fp = random_pair(rng, 1, 1, 3)
    curve = tangency_curves(fp)
    flat = shift_quadratics(curve, [0, 0, 0, 0], fp.points)
    from folijet.tangency import BranchJet, TangencyCurveJets

    zero = TangencyCurveJets(
        tuple(BranchJet(b.anchor, [0] * 3) for b in flat.branches_p),
        tuple(BranchJet(b.anchor, [0] * 3) for b in flat.branches_q),
    )
    with pytest.raises(NonGenericCurveError):
        realize(fp, zero)


def test_non_generic_template_rejected(rng):
    fp = random_pair(rng, 1, 1, 4)
    fp = with_lambda(fp, 0, 1.0 / 3.0 + 0j)
    curve = tangency_curves(random_pair(rng, 1, 1, 4))
    bad_points_curve = tangency_curves(fp)
    with pytest.raises(NonGenericConfigError) as err:
        realize(fp, bad_points_curve)
    assert "(1-3*lambda_1)" in err.value.certificate.failing


def test_quadratic_shift_moves_inside_vandermonde_image(rng):
    fp = random_pair(rng, 2, 1, 4)
    curve = tangency_curves(fp)
    t4 = [0.2, -0.1j, 0.05, 0.01 + 0.01j]
    shifted = shift_quadratics(curve, t4, fp.points)
    delta = shifted.quadratics() - curve.quadratics()
    assert np.allclose(delta, build_V(fp.points) @ np.asarray(t4, dtype=complex))
    for b0, b1 in zip(curve.all_branches, shifted.all_branches):
        assert b0.coeffs[1:] == b1.coeffs[1:]


def test_realize_reports_explicit_correction(rng):
    fp = random_pair(rng, 1, 1, 4)
    curve = tangency_curves(fp)
    t4 = [0.05, 0.02j, 0.0, 0.0]
    res = realize(fp, curve, correction=t4)
    assert res.correction_used == tuple(complex(c) for c in t4)
    want = shift_quadratics(curve, t4, fp.points)
    assert res.residual < 1e-9
    assert np.allclose(res.curve.quadratics(), want.quadratics(), atol=1e-10)


def test_mismatched_curve_rejected(rng):
    fp = random_pair(rng, 2, 1, 4)
    other = random_pair(rng, 2, 1, 4)
    curve = tangency_curves(other)
    with pytest.raises(ValueError):
        realize(fp, curve)


def test_round_trip_at_envelope_corner(rng):
    # largest shipped desk-scale configuration: n+1 = 3, m = 3, order 10
    fp = random_pair(rng, 3, 3, 10, scale=0.3, tau_range=(0.5, 1.0),
                     resonance_margin=0.35)
    curve = tangency_curves(fp)
    res = realize(fp, curve)
    for i, sm in enumerate(fp.singular):
        got = np.asarray(res.s_jets[i].coeffs[1:])
        want = np.asarray(sm.s_jet.coeffs[1:11])
        assert np.max(np.abs(got - want)) < 1e-8 * max(1.0, np.max(np.abs(want)))
    for j, tm in enumerate(fp.tangency):
        got = np.asarray(res.z_jets[j].coeffs[1:])
        want = np.asarray(tm.z_jet.coeffs[1:11])
        assert np.max(np.abs(got - want)) < 1e-8 * max(1.0, np.max(np.abs(want)))


def test_realize_deterministic(rng):
    fp = random_pair(rng, 2, 1, 5)
    curve = tangency_curves(fp)
    one = realize(fp, curve)
    two = realize(fp, curve)
    for a, b in zip(one.s_jets, two.s_jets):
        assert a.coeffs == b.coeffs
    for a, b in zip(one.z_jets, two.z_jets):
        assert a.coeffs == b.coeffs
