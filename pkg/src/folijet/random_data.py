"""Seeded random configurations for verification and tests.

Samples live at desk scale: marked points separated by order one,
displacement coefficients a few tenths, involutions conjugated from the
sign flip by small tangent-to-identity jets.  This keeps the Laurent-jet
arithmetic well inside its conditioning envelope, which is what the shipped
tolerances assume.
"""

from __future__ import annotations

import numpy as np

from .models import BackgroundData, FoliationPairData, SingularModel, TangencyModel
from .series import XJet, compose, revert
from .ufunc import LaurentJet, MarkedPoints


def random_marked_points(rng: np.random.Generator, n_plus_1: int, m: int,
                         min_distance: float = 0.9) -> MarkedPoints:
    pts: list = []
    while len(pts) < n_plus_1 + m:
        cand = complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
        if all(abs(cand - other) >= min_distance for other in pts):
            pts.append(cand)
    return MarkedPoints(pts[:n_plus_1], pts[n_plus_1:], min_distance=min_distance / 2)


def random_scalar_jet(rng: np.random.Generator, order: int, scale: float = 0.35,
                      first: complex | None = None) -> XJet:
    c = [0j] + list(rng.normal(size=order) * scale + 1j * rng.normal(size=order) * scale)
    if first is not None:
        c[1] = complex(first)
    return XJet(c)


def random_unit(rng: np.random.Generator, lo: float = 0.6, hi: float = 1.4) -> complex:
    return complex(rng.uniform(lo, hi) * np.exp(1j * rng.uniform(0, 2 * np.pi)))


def random_involution_jet(rng: np.random.Generator, order: int,
                          scale: float = 0.08,
                          tau: complex | None = None) -> XJet:
    """Conjugate of the sign flip by a random tangent-to-identity jet.

    The conjugation with quadratic coefficient a yields quadratic involution
    coefficient -2a, so ``tau`` can be prescribed exactly.
    """
    pert = rng.normal(size=order) * scale + 1j * rng.normal(size=order) * scale
    coeffs = [0j, 1.0 + 0j] + list(pert[: order - 1])
    if tau is not None and order >= 2:
        coeffs[2] = -complex(tau) / 2.0
    sigma = XJet(coeffs)
    flip = XJet([0j, -1.0 + 0j] + [0j] * (order - 1))
    return compose(revert(sigma), compose(flip, sigma))


def random_eigenratio(rng: np.random.Generator, k0: int,
                      margin: float = 0.25) -> complex:
    """Eigenvalue ratio staying clear of every resonance 1/k, k <= k0."""
    while True:
        lam = complex(rng.uniform(-1.8, 1.8), rng.uniform(-1.8, 1.8))
        if all(abs(1.0 - k * lam) > margin for k in range(1, k0 + 1)):
            return lam


def random_background(rng: np.random.Generator, points: MarkedPoints, k0: int,
                      scale: float = 0.2, degree: int | None = None) -> BackgroundData:
    """Random chart coefficient jets satisfying the normalizations.

    The tangency jets vanish at their center from order 2 on (the order-2
    center value is a free input of the model; nonzero choices leak a pole
    into the canonical solutions, so the generator keeps it zero).
    """
    degree = k0 + 2 if degree is None else degree
    eps = []
    for p in points.p:
        rows = []
        for r in range(1, k0 + 1):
            c = rng.normal(size=degree + 1) * scale + 1j * rng.normal(size=degree + 1) * scale
            if r == 1:
                c[0] = 1.0
            rows.append(LaurentJet(p, 0, c, exact_tail=True))
        eps.append(rows)
    sig = []
    for q in points.q:
        rows = []
        for r in range(1, k0 + 1):
            c = rng.normal(size=degree + 1) * scale + 1j * rng.normal(size=degree + 1) * scale
            c[0] = 1.0 if r == 1 else 0.0
            rows.append(LaurentJet(q, 0, c, exact_tail=True))
        sig.append(rows)
    return BackgroundData(eps, sig)


def random_pair(rng: np.random.Generator, n_plus_1: int = 2, m: int = 2,
                k0: int = 6, scale: float = 0.35,
                background: str = "default",
                tau_range: tuple = (0.5, 1.2),
                resonance_margin: float = 0.25) -> FoliationPairData:
    """A random generic configuration (points, ratios, involutions, jets)."""
    points = random_marked_points(rng, n_plus_1, m)
    singular = [
        SingularModel(i, points.p[i], random_eigenratio(rng, k0, resonance_margin),
                      random_scalar_jet(rng, k0, scale))
        for i in range(n_plus_1)
    ]
    tangency = [
        TangencyModel(j, points.q[j],
                      random_involution_jet(rng, k0, tau=random_unit(rng, *tau_range)),
                      random_scalar_jet(rng, k0, scale, first=random_unit(rng)))
        for j in range(m)
    ]
    bg = None if background == "default" else random_background(rng, points, k0)
    return FoliationPairData(points, singular, tangency, bg, k0)
