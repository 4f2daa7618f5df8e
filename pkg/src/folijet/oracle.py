"""Brute-force verification engines.

Everything here is deliberately naive and shares no machinery with the
modules it checks: bivariate composition is raw truncated substitution on
rectangular coefficient grids (no chain-rule shortcuts), scalar composition
is Horner substitution, quotients are term-by-term long division, and
determinants come from a hand-rolled pivoted elimination.  These functions
exist only for tests and the verification command; they are not part of the
stable library API.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .series import XJet
from .ufunc import LaurentJet


class GridOverflowError(ValueError):
    """Raised when data does not fit the fixed grid frame."""


class BiJet:
    """Truncated series in (x, v) on a fixed rectangle of exponents.

    ``grid[k, e - vmin]`` is the coefficient of x^k v^e; v exponents may be
    negative.  Products are truncated back to the same frame.
    """

    def __init__(self, center: complex, kx: int, vmin: int, vmax: int,
                 grid: np.ndarray | None = None):
        self.center = complex(center)
        self.kx = int(kx)
        self.vmin = int(vmin)
        self.vmax = int(vmax)
        width = vmax - vmin + 1
        if grid is None:
            grid = np.zeros((kx + 1, width), dtype=np.complex128)
        grid = np.asarray(grid, dtype=np.complex128)
        if grid.shape != (kx + 1, width):
            raise ValueError("grid shape does not match the frame")
        self.grid = grid

    # -- constructors ---------------------------------------------------
    def like(self) -> "BiJet":
        return BiJet(self.center, self.kx, self.vmin, self.vmax)

    @classmethod
    def variable_v(cls, center: complex, kx: int, vmin: int, vmax: int) -> "BiJet":
        out = cls(center, kx, vmin, vmax)
        out.grid[0, 1 - vmin] = 1.0
        return out

    @classmethod
    def one(cls, center: complex, kx: int, vmin: int, vmax: int) -> "BiJet":
        out = cls(center, kx, vmin, vmax)
        out.grid[0, -vmin] = 1.0
        return out

    def set_term(self, k: int, e: int, value: complex) -> None:
        if not (0 <= k <= self.kx and self.vmin <= e <= self.vmax):
            raise GridOverflowError(f"term x^{k} v^{e} outside the grid frame")
        self.grid[k, e - self.vmin] = value

    def embed_row(self, k: int, jet: LaurentJet) -> None:
        """Install a Laurent jet as the x^k coefficient row."""
        if jet.min_exp < self.vmin and np.any(jet.coeffs[: self.vmin - jet.min_exp]):
            raise GridOverflowError("jet principal part deeper than the grid frame")
        if not jet.exact_tail and jet.max_exp < self.vmax:
            raise GridOverflowError("jet tail shallower than the grid frame")
        lo = max(jet.min_exp, self.vmin)
        hi = min(jet.max_exp, self.vmax)
        if hi >= lo:
            self.grid[k, lo - self.vmin: hi - self.vmin + 1] = \
                jet.coeffs[lo - jet.min_exp: hi - jet.min_exp + 1]

    def coefficient(self, k: int, e: int) -> complex:
        if not (0 <= k <= self.kx and self.vmin <= e <= self.vmax):
            return 0j
        return complex(self.grid[k, e - self.vmin])

    def row(self, k: int) -> np.ndarray:
        return self.grid[k].copy()

    def copy(self) -> "BiJet":
        return BiJet(self.center, self.kx, self.vmin, self.vmax, self.grid.copy())

    # -- arithmetic (plain truncated convolution) ------------------------
    def _compat(self, other: "BiJet") -> None:
        if (self.kx, self.vmin, self.vmax) != (other.kx, other.vmin, other.vmax):
            raise ValueError("grid frames differ")

    def __add__(self, other: "BiJet") -> "BiJet":
        self._compat(other)
        return BiJet(self.center, self.kx, self.vmin, self.vmax, self.grid + other.grid)

    def __sub__(self, other: "BiJet") -> "BiJet":
        self._compat(other)
        return BiJet(self.center, self.kx, self.vmin, self.vmax, self.grid - other.grid)

    def scaled(self, c: complex) -> "BiJet":
        return BiJet(self.center, self.kx, self.vmin, self.vmax, self.grid * c)

    def __mul__(self, other: "BiJet") -> "BiJet":
        self._compat(other)
        out = self.like()
        width = self.vmax - self.vmin + 1
        shift = -self.vmin  # index of exponent 0 in a conv of two rows
        for k1 in range(self.kx + 1):
            r1 = self.grid[k1]
            if not r1.any():
                continue
            for k2 in range(self.kx + 1 - k1):
                r2 = other.grid[k2]
                if not r2.any():
                    continue
                out.grid[k1 + k2] += np.convolve(r1, r2)[shift: shift + width]
        return out

    def power(self, n: int) -> "BiJet":
        if n < 0:
            return self.inverse().power(-n)
        out = BiJet.one(self.center, self.kx, self.vmin, self.vmax)
        for _ in range(n):
            out = out * self
        return out

    def inverse(self) -> "BiJet":
        """Reciprocal of a grid with nonzero constant term, geometric series."""
        c0 = self.coefficient(0, 0)
        if abs(c0) < 1e-300:
            raise GridOverflowError("inverse of a grid with zero constant term")
        e = self.scaled(1.0 / c0)
        e.grid[0, -self.vmin] -= 1.0
        out = BiJet.one(self.center, self.kx, self.vmin, self.vmax)
        acc = BiJet.one(self.center, self.kx, self.vmin, self.vmax)
        sign = -1.0
        limit = (self.kx + 1) + (self.vmax - self.vmin + 1)
        for _ in range(limit):
            acc = acc * e
            if not acc.grid.any():
                break
            out.grid += sign * acc.grid
            sign = -sign
        out.grid /= c0
        return out

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.grid)))


def bicompose(outer: BiJet, inner_x: BiJet, inner_v: BiJet) -> BiJet:
    """outer(inner_x, inner_v) by raw truncated substitution.

    ``inner_x`` must vanish at x = 0; ``inner_v`` must have zero constant
    term and a simple v-factor at x = 0 (it is the new value of v).
    """
    outer._compat(inner_x)
    outer._compat(inner_v)
    if inner_x.grid[0].any():
        raise ValueError("inner x-component must vanish at x = 0")
    if abs(inner_v.coefficient(0, 0)) > 0:
        raise ValueError("inner v-component must have zero constant term")
    kx, vmin, vmax = outer.kx, outer.vmin, outer.vmax
    # positive and negative powers of the new v
    v_pows_pos = [BiJet.one(outer.center, kx, vmin, vmax)]
    for _ in range(vmax):
        v_pows_pos.append(v_pows_pos[-1] * inner_v)
    v_pows_neg = []
    if vmin < 0:
        if abs(inner_v.coefficient(0, 1)) < 1e-300:
            raise GridOverflowError("cannot invert an inner v-component without a simple v-factor")
        # inner_v = v * w with w of nonzero constant term: shift rows one step down
        # inner_v = v * w with w of nonzero constant term; 1/inner_v is then
        # the exponent-shifted reciprocal of w
        w = inner_v.like()
        w.grid[:, : -1] = inner_v.grid[:, 1:]
        w.grid[:, -1] = 0.0
        w_inv = w.inverse()
        v_inv = w_inv.like()
        v_inv.grid[:, : -1] = w_inv.grid[:, 1:]
        v_inv.grid[:, -1] = 0.0
        cur = BiJet.one(outer.center, kx, vmin, vmax)
        for _ in range(-vmin):
            cur = cur * v_inv
            v_pows_neg.append(cur)
    x_pows = [BiJet.one(outer.center, kx, vmin, vmax)]
    for _ in range(kx):
        x_pows.append(x_pows[-1] * inner_x)
    out = outer.like()
    for k in range(kx + 1):
        if not outer.grid[k].any():
            continue
        row_acc = outer.like()
        for e in range(vmin, vmax + 1):
            c = outer.coefficient(k, e)
            if c == 0:
                continue
            vp = v_pows_pos[e] if e >= 0 else v_pows_neg[-e - 1]
            row_acc.grid += c * vp.grid
        out.grid += (row_acc * x_pows[k]).grid
    return out


def substitute(outer: XJet, inner: XJet) -> XJet:
    """Scalar-jet composition by Horner substitution (no chain-rule machinery)."""
    if abs(complex(inner.coeffs[0])) > 0:
        raise ValueError("inner jet must vanish at the origin")
    n = min(outer.order, inner.order)
    inner_arr = np.asarray([complex(c) for c in inner.coeffs[: n + 1]])
    acc = np.zeros(n + 1, dtype=np.complex128)
    for k in range(outer.order, -1, -1):
        acc = np.convolve(acc, inner_arr)[: n + 1]
        acc[0] += complex(outer.coeffs[k])
    return XJet(list(acc), n)


def binomial_chart_bijet(center: complex, lam: complex, s_coeffs: Sequence[complex],
                         kx: int, vmin: int, vmax: int) -> BiJet:
    """Grid of x * (1 + s(x)/v)**lam by the binomial series (chart-x oracle)."""
    out = BiJet(center, kx, vmin, vmax)
    s = np.zeros(kx + 1, dtype=np.complex128)
    for r, c in enumerate(s_coeffs[: kx + 1]):
        s[r] = complex(c)
    if abs(s[0]) > 0:
        raise ValueError("displacement must vanish at the origin")
    pw = np.zeros(kx + 1, dtype=np.complex128)
    pw[0] = 1.0
    for t in range(0, kx + 1):
        if t > 0:
            pw = np.convolve(pw, s)[: kx + 1]
        if -t < vmin:
            break
        coef = 1.0 + 0j
        for i in range(t):
            coef *= (lam - i) / (i + 1)
        for k in range(1, kx + 1):
            out.grid[k, -t - vmin] += coef * pw[k - 1]
    return out


def newton_phi(tm, x0: complex, u0: complex, tol: float = 1e-12,
               max_iter: int = 50) -> complex:
    """Solve g(w) = g(u0) + z(x0) for w near u0 by damped Newton iteration."""
    g = tm.g_jet

    def geval(u):
        v = u - g.center
        return sum(g.coeffs[i] * v ** (i + g.min_exp) for i in range(len(g.coeffs)))

    gp = g.differentiate()

    def gpeval(u):
        v = u - gp.center
        return sum(gp.coeffs[i] * v ** (i + gp.min_exp) for i in range(len(gp.coeffs)))

    target = geval(u0) + complex(tm.z_jet.evaluate(x0))
    w = complex(u0)
    for _ in range(max_iter):
        f = geval(w) - target
        if abs(f) < tol:
            return w
        d = gpeval(w)
        if abs(d) < 1e-300:
            raise ArithmeticError("derivative vanished during Newton iteration")
        step = f / d
        # damping: halve until the residual decreases
        lam_d = 1.0
        for _ in range(30):
            cand = w - lam_d * step
            if abs(geval(cand) - target) < abs(f):
                w = cand
                break
            lam_d *= 0.5
        else:
            raise ArithmeticError("Newton damping failed to reduce the residual")
    raise ArithmeticError(f"no convergence in {max_iter} iterations")


def laurent_divide(f: LaurentJet, h: LaurentJet, n_terms: int) -> LaurentJet:
    """Quotient f/h by term-at-a-time long division (lowest exponent first)."""
    hv = None
    scale = float(np.max(np.abs(h.coeffs)))
    for e in range(h.min_exp, h.max_exp + 1):
        if abs(h.coefficient(e)) > 1e-13 * scale:
            hv = e
            break
    if hv is None:
        raise ZeroDivisionError("division by a numerically zero jet")
    lead = h.coefficient(hv)
    q_min = f.min_exp - hv
    q = np.zeros(n_terms, dtype=np.complex128)
    # working copy of the remainder, aligned to f's exponents
    width = n_terms + (h.max_exp - h.min_exp + 1) + 2
    r = np.zeros(width, dtype=np.complex128)
    n_copy = min(width, len(f.coeffs))
    r[:n_copy] = f.coeffs[:n_copy]
    h_arr = h.coeffs
    for t in range(n_terms):
        c = r[t] / lead
        q[t] = c
        # subtract c * v^{q_min + t} * h
        for idx in range(len(h_arr)):
            pos = t + idx + (h.min_exp - hv)
            if 0 <= pos < width:
                r[pos] -= c * h_arr[idx]
    return LaurentJet(f.center, q_min, q)


def lu_det(matrix: np.ndarray) -> complex:
    """Determinant by hand-rolled partially pivoted elimination."""
    a = np.array(matrix, dtype=np.complex128)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("square matrix required")
    det = 1.0 + 0j
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[pivot, col]) == 0.0:
            return 0j
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            det = -det
        det *= a[col, col]
        factors = a[col + 1:, col] / a[col, col]
        a[col + 1:, col:] -= np.outer(factors, a[col, col:])
    return complex(det)


def fit_taylor(xs: Sequence[complex], values: Sequence[complex], degree: int) -> np.ndarray:
    """Least-squares Taylor coefficients (constant term first) from samples."""
    xs = np.asarray(xs, dtype=np.complex128)
    vand = np.vander(xs, degree + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(vand, np.asarray(values, dtype=np.complex128), rcond=None)
    return coeffs


def multilinear_coefficient(func: Callable[[Sequence[complex]], complex],
                            s: int, probe: complex = 1.0) -> complex:
    """Coefficient of t_1 t_2 ... t_s in a multilinear-affine function.

    Extracted exactly by inclusion-exclusion over the 2^s corner evaluations
    with each t_i in {0, probe}.
    """
    total = 0j
    for mask in range(1 << s):
        point = [probe if mask & (1 << i) else 0.0 for i in range(s)]
        sign = (-1) ** (s - bin(mask).count("1"))
        total += sign * func(point)
    return total / probe ** s
