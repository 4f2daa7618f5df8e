"""Coefficient ring for u-dependent series coefficients.

Two representations:

* :class:`LaurentJet` — truncated Laurent expansion at one marked point,
  contiguous exponent range [min_exp, max_exp].  Negative exponents are always
  exact (a finite principal part); the positive tail is a truncation unless
  ``exact_tail`` is set, and every arithmetic op propagates the largest
  exponent that is still complete.
* :class:`PoleSum` — a global rational function: low-degree polynomial part
  plus finitely many principal parts at marked points.  Closed under the
  linear operations and differentiation; expansion about any point is exact
  to the requested order.

All values are immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .tolerance import DEFAULT_TOL, ToleranceConfig, ensure_finite


class DegenerateInputError(ValueError):
    """Raised when a quotient/inversion hits a zero of the wrong order."""


class PoleEvaluationError(ValueError):
    """Raised when a rational function is evaluated at one of its poles."""


class DepthError(ValueError):
    """Raised when a read exceeds the reliable exponent window of a jet."""


_PLACES = 12  # rounding used to key pole locations


def _key(z: complex) -> tuple:
    return (round(z.real, _PLACES), round(z.imag, _PLACES))


@dataclass(frozen=True)
class MarkedPoints:
    """Distinct singular locations p (n+1 of them) and tangency locations q (m)."""

    p: tuple
    q: tuple

    def __init__(self, p: Iterable[complex], q: Iterable[complex],
                 min_distance: float = 1e-6):
        p = tuple(ensure_finite(z, "p") for z in p)
        q = tuple(ensure_finite(z, "q") for z in q)
        if not p:
            raise ValueError("need at least one singular location")
        pts = p + q
        for a in range(len(pts)):
            for b in range(a + 1, len(pts)):
                if abs(pts[a] - pts[b]) < min_distance:
                    raise ValueError(
                        f"marked points {pts[a]} and {pts[b]} closer than {min_distance}"
                    )
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def all(self) -> tuple:
        return self.p + self.q

    @property
    def n_plus_1(self) -> int:
        return len(self.p)

    @property
    def m(self) -> int:
        return len(self.q)


class LaurentJet:
    """Truncated Laurent expansion sum_e coeffs[e - min_exp] * (u - center)^e."""

    __slots__ = ("center", "min_exp", "coeffs", "exact_tail")

    def __init__(self, center: complex, min_exp: int, coeffs,
                 exact_tail: bool = False):
        self.center = complex(center)
        min_exp = int(min_exp)
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.ndim != 1 or len(coeffs) == 0:
            raise ValueError("coefficients must be a nonempty 1-d array")
        # exact zero edges carry no information but degrade window bookkeeping
        lead = 0
        while lead < len(coeffs) - 1 and coeffs[lead] == 0.0:
            lead += 1
        if lead:
            coeffs = coeffs[lead:]
            min_exp += lead
        if exact_tail:
            trail = len(coeffs)
            while trail > 1 and coeffs[trail - 1] == 0.0:
                trail -= 1
            coeffs = coeffs[:trail]
        self.min_exp = min_exp
        self.coeffs = coeffs
        self.exact_tail = bool(exact_tail)

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, center: complex, value: complex, max_exp: int = 0) -> "LaurentJet":
        c = np.zeros(max_exp + 1, dtype=np.complex128)
        c[0] = value
        return cls(center, 0, c, exact_tail=True)

    @classmethod
    def from_taylor(cls, center: complex, coeffs, exact_tail: bool = False) -> "LaurentJet":
        return cls(center, 0, coeffs, exact_tail=exact_tail)

    @classmethod
    def monomial(cls, center: complex, exponent: int, value: complex = 1.0) -> "LaurentJet":
        return cls(center, exponent, [value], exact_tail=True)

    # -- inspection ---------------------------------------------------
    @property
    def max_exp(self) -> int:
        return self.min_exp + len(self.coeffs) - 1

    def coefficient(self, e: int) -> complex:
        """Coefficient of (u-center)^e; raises DepthError beyond the window."""
        if e > self.max_exp and not self.exact_tail:
            raise DepthError(f"exponent {e} beyond reliable window {self.max_exp}")
        if e < self.min_exp or e > self.max_exp:
            return 0j
        return complex(self.coeffs[e - self.min_exp])

    def principal_part(self) -> "LaurentJet":
        """Portion with exponents < 0 (exact by construction)."""
        if self.min_exp >= 0:
            return LaurentJet.monomial(self.center, -1, 0.0)
        n = -self.min_exp
        return LaurentJet(self.center, self.min_exp, self.coeffs[:n].copy(),
                          exact_tail=True)

    def principal_coeffs(self) -> np.ndarray:
        """Array [c_1, c_2, ...] with c_m the coefficient of (u-center)^-m."""
        depth = max(0, -self.min_exp)
        out = np.zeros(depth, dtype=np.complex128)
        for m in range(1, depth + 1):
            out[m - 1] = self.coefficient(-m)
        return out

    def pole_order(self, tol: ToleranceConfig = DEFAULT_TOL, scale: float = 1.0) -> int:
        pc = self.principal_coeffs()
        for m in range(len(pc), 0, -1):
            if not tol.is_zero(pc[m - 1], scale):
                return m
        return 0

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __repr__(self) -> str:
        return (f"LaurentJet(center={self.center}, exps=[{self.min_exp}..{self.max_exp}]"
                f"{', exact' if self.exact_tail else ''})")

    # -- arithmetic ---------------------------------------------------
    def _check_center(self, other: "LaurentJet") -> None:
        if self.center != other.center and _key(self.center) != _key(other.center):
            raise ValueError(f"centers differ: {self.center} vs {other.center}")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = LaurentJet.constant(self.center, other)
        if not isinstance(other, LaurentJet):
            return NotImplemented
        self._check_center(other)
        lo = min(self.min_exp, other.min_exp)
        if self.exact_tail and other.exact_tail:
            hi, exact = max(self.max_exp, other.max_exp), True
        elif self.exact_tail:
            hi, exact = other.max_exp, False
        elif other.exact_tail:
            hi, exact = self.max_exp, False
        else:
            hi, exact = min(self.max_exp, other.max_exp), False
        if hi < lo:
            raise DepthError("sum has no reliable exponent window")
        out = np.zeros(hi - lo + 1, dtype=np.complex128)
        for jet in (self, other):
            a = max(jet.min_exp, lo)
            b = min(jet.max_exp, hi)
            if b >= a:
                out[a - lo: b - lo + 1] += jet.coeffs[a - jet.min_exp: b - jet.min_exp + 1]
        return LaurentJet(self.center, lo, out, exact_tail=exact)

    __radd__ = __add__

    def __neg__(self):
        return LaurentJet(self.center, self.min_exp, -self.coeffs, self.exact_tail)

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = LaurentJet.constant(self.center, other)
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return LaurentJet(self.center, self.min_exp, self.coeffs * other,
                              self.exact_tail)
        if not isinstance(other, LaurentJet):
            return NotImplemented
        self._check_center(other)
        lo = self.min_exp + other.min_exp
        if self.exact_tail and other.exact_tail:
            hi, exact = self.max_exp + other.max_exp, True
        elif self.exact_tail:
            hi, exact = other.max_exp + self.min_exp, False
        elif other.exact_tail:
            hi, exact = self.max_exp + other.min_exp, False
        else:
            hi = min(self.max_exp + other.min_exp, other.max_exp + self.min_exp)
            exact = False
        if hi < lo:
            raise DepthError("product has no reliable exponent window")
        full = np.convolve(self.coeffs, other.coeffs)
        out = full[: hi - lo + 1]
        return LaurentJet(self.center, lo, out, exact_tail=exact)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scaled(self, factor):
        return self.__mul__(factor)

    def differentiate(self) -> "LaurentJet":
        """d/du; lowers every exponent by one."""
        exps = np.arange(self.min_exp, self.max_exp + 1)
        return LaurentJet(self.center, self.min_exp - 1, self.coeffs * exps,
                          self.exact_tail)

    def power(self, n: int, order: int | None = None) -> "LaurentJet":
        """Integer power; negative n via :func:`invert`."""
        if n == 0:
            return LaurentJet.constant(self.center, 1.0)
        base = self if n > 0 else self.invert(order=order)
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    def valuation(self, tol: ToleranceConfig = DEFAULT_TOL, scale: float | None = None) -> int:
        if scale is None:
            scale = self.max_abs()
        if scale == 0.0:
            raise DegenerateInputError("valuation of the zero jet")
        for e in range(self.min_exp, self.max_exp + 1):
            if not tol.is_zero(self.coefficient(e), scale):
                return e
        raise DegenerateInputError("valuation of a numerically zero jet")

    def invert(self, order: int | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> "LaurentJet":
        """Reciprocal jet via the geometric series at the leading term.

        ``order`` is the requested max_exp of the result; defaults to the
        maximum the operand's window supports.
        """
        v = self.valuation(tol)
        lead = self.coefficient(v)
        if self.exact_tail:
            avail = None  # any depth
        else:
            avail = self.max_exp - 2 * v
        if order is None:
            if avail is None:
                raise ValueError("inversion of an exact jet needs an explicit order")
            order = avail
        if avail is not None and order > avail:
            raise DepthError(
                f"inversion to exponent {order} needs operand depth {order + 2 * v}, have {self.max_exp}"
            )
        n_terms = order + v  # powers of w kept, w = tail/lead of valuation >= 1
        # self = lead * v^v * (1 + w)
        w_hi = n_terms if self.exact_tail else self.max_exp - v
        w_width = w_hi + 1
        w = np.zeros(w_width, dtype=np.complex128)
        for e in range(1, w_hi + 1):
            src = e + v
            if self.min_exp <= src <= self.max_exp:
                w[e] = self.coeffs[src - self.min_exp] / lead
        geom = np.zeros(n_terms + 1, dtype=np.complex128)
        geom[0] = 1.0
        acc = np.zeros(n_terms + 1, dtype=np.complex128)
        acc[0] = 1.0
        for _ in range(n_terms):
            acc = -np.convolve(acc, w)[: n_terms + 1]
            if not np.any(acc):
                break
            geom += acc
        return LaurentJet(self.center, -v, geom / lead, exact_tail=False)

    # -- evaluation ---------------------------------------------------
    def evaluate(self, u0: complex) -> complex:
        """Numeric evaluation of the stored truncation at ``u0``."""
        v = complex(u0) - self.center
        if v == 0:
            if self.pole_order() > 0:
                raise PoleEvaluationError("evaluation at the expansion center pole")
            return self.coefficient(0) if self.min_exp <= 0 <= self.max_exp else 0j
        acc = 0j
        for e in range(self.max_exp, self.min_exp - 1, -1):
            acc = acc * v + self.coeffs[e - self.min_exp]
        return acc * v ** self.min_exp

    def compose_series(self, shift, order: int | None = None,
                       tol: ToleranceConfig = DEFAULT_TOL, scale: float = 1.0):
        """Substitute u = center + shift(x) into the regular part.

        ``shift`` is a scalar XJet with zero constant term; principal-part
        coefficients must be negligible (the jet must be holomorphic at the
        center up to noise).  Returns a scalar XJet.
        """
        from .series import XJet

        n = shift.order if order is None else min(order, shift.order)
        sc = max(scale, self.max_abs())
        for m in range(1, -self.min_exp + 1 if self.min_exp < 0 else 0):
            c = self.coefficient(-m)
            if abs(c) > 1e-7 * max(1.0, sc):
                raise DegenerateInputError(
                    f"substitution into a jet with a genuine pole (|c_-{m}| = {abs(c):.3e})"
                )
        if not self.exact_tail and self.max_exp < n:
            raise DepthError(f"need Taylor coefficients to order {n}, window ends at {self.max_exp}")
        out = XJet.zero(n)
        pw = XJet([1.0 + 0j] + [0j] * n, n)
        for e in range(0, n + 1):
            c = self.coefficient(e) if (self.exact_tail or e <= self.max_exp) else 0j
            if e > 0:
                pw = pw * shift
            out = out + pw.scaled(c)
        return out


def expand_at(ps: "PoleSum", center: complex, order: int) -> LaurentJet:
    """Exact Laurent expansion of a pole sum about ``center`` (function form)."""
    return ps.expand_at(center, order)


def principal_part_quotient(f: LaurentJet, h: LaurentJet,
                            tol: ToleranceConfig = DEFAULT_TOL):
    """Principal part and regular value at the center of the quotient f/h.

    For the simple-zero case (h(c) = 0, h'(c) != 0) the results reduce to the
    residue f(c)/h'(c) over (u - c) and the regular value
    f'(c)/h'(c) - f(c) h''(c) / (2 h'(c)^2); the general case is Laurent
    division.  Returns ``(principal: LaurentJet, regular_at_center: complex)``.
    """
    if _key(f.center) != _key(h.center):
        raise ValueError("operands expanded at different centers")
    scale = max(h.max_abs(), 1e-300)
    v = h.valuation(tol, scale)
    if abs(h.coefficient(v)) < 1e-6 * scale:
        raise DegenerateInputError(
            f"denominator leading coefficient {abs(h.coefficient(v)):.3e} below tolerance"
        )
    order = max(0, -f.min_exp) + max(0, f.max_exp)
    if not h.exact_tail:
        order = min(order, h.max_exp - 2 * v)
    quot = f * h.invert(order=order, tol=tol)
    return quot.principal_part(), quot.coefficient(0)


@dataclass(frozen=True)
class PoleSum:
    """Rational function: polynomial part + principal parts at fixed poles.

    ``poles`` and ``principal`` are parallel tuples; principal[i][m-1] is the
    coefficient of (u - poles[i])^-m.  Supports the linear ops, derivative,
    exact local expansion and evaluation — no general product.
    """

    poly: tuple = ()
    poles: tuple = ()
    principal: tuple = ()

    @classmethod
    def zero(cls) -> "PoleSum":
        return cls()

    @classmethod
    def constant(cls, value: complex) -> "PoleSum":
        return cls(poly=(complex(value),)) if value != 0 else cls()

    @classmethod
    def from_parts(cls, parts: Sequence[tuple], poly: Sequence[complex] = (),
                   drop_tol: float = 1e-14) -> "PoleSum":
        """Build from (location, [c_1, c_2, ...]) pairs, merging duplicates.

        Pole order is fixed by summation order of ``parts``; coefficients with
        |c| < drop_tol are dropped to keep the representation sparse.
        """
        locs: list = []
        data: dict = {}
        for loc, coeffs in parts:
            k = _key(complex(loc))
            if k not in data:
                locs.append(complex(loc))
                data[k] = np.zeros(len(coeffs), dtype=np.complex128)
            arr = data[k]
            coeffs = np.asarray(coeffs, dtype=np.complex128)
            if len(coeffs) > len(arr):
                arr = np.concatenate([arr, np.zeros(len(coeffs) - len(arr))])
            arr[: len(coeffs)] += coeffs
            data[k] = arr
        poles, princ = [], []
        for loc in locs:
            arr = data[_key(loc)]
            arr[np.abs(arr) < drop_tol] = 0.0
            while len(arr) and arr[-1] == 0.0:
                arr = arr[:-1]
            if len(arr):
                poles.append(loc)
                princ.append(tuple(complex(c) for c in arr))
        poly = tuple(complex(c) for c in poly)
        while poly and poly[-1] == 0:
            poly = poly[:-1]
        return cls(poly=poly, poles=tuple(poles), principal=tuple(princ))

    # -- linear structure ----------------------------------------------
    def parts(self):
        return [(loc, np.asarray(pc, dtype=np.complex128))
                for loc, pc in zip(self.poles, self.principal)]

    def __add__(self, other: "PoleSum") -> "PoleSum":
        if not isinstance(other, PoleSum):
            return NotImplemented
        n = max(len(self.poly), len(other.poly))
        poly = np.zeros(n, dtype=np.complex128)
        poly[: len(self.poly)] += np.asarray(self.poly, dtype=np.complex128)
        poly[: len(other.poly)] += np.asarray(other.poly, dtype=np.complex128)
        return PoleSum.from_parts(self.parts() + other.parts(), poly=poly, drop_tol=0.0)

    def __sub__(self, other: "PoleSum") -> "PoleSum":
        return self.__add__(other.scaled(-1.0))

    def __neg__(self) -> "PoleSum":
        return self.scaled(-1.0)

    def scaled(self, factor: complex) -> "PoleSum":
        return PoleSum(
            poly=tuple(c * factor for c in self.poly),
            poles=self.poles,
            principal=tuple(tuple(c * factor for c in pc) for pc in self.principal),
        )

    def differentiate(self) -> "PoleSum":
        poly = tuple((e + 1) * self.poly[e + 1] for e in range(len(self.poly) - 1))
        princ = tuple(
            tuple(0j if m == 0 else -m * pc[m - 1] for m in range(len(pc) + 1))
            for pc in self.principal
        )
        return PoleSum(poly=poly, poles=self.poles, principal=princ)

    def derivative(self, n: int = 1) -> "PoleSum":
        out = self
        for _ in range(n):
            out = out.differentiate()
        return out

    # -- inspection / evaluation ----------------------------------------
    def principal_at(self, location: complex) -> np.ndarray:
        k = _key(complex(location))
        for loc, pc in zip(self.poles, self.principal):
            if _key(loc) == k:
                return np.asarray(pc, dtype=np.complex128)
        return np.zeros(0, dtype=np.complex128)

    def vanishes_at_infinity(self) -> bool:
        return len(self.poly) == 0

    def max_abs(self) -> float:
        vals = [abs(c) for c in self.poly]
        for pc in self.principal:
            vals.extend(abs(c) for c in pc)
        return max(vals, default=0.0)

    def evaluate(self, u0: complex, tol: ToleranceConfig = DEFAULT_TOL) -> complex:
        u0 = complex(u0)
        acc = 0j
        for e in range(len(self.poly) - 1, -1, -1):
            acc = acc * u0 + self.poly[e]
        for loc, pc in zip(self.poles, self.principal):
            d = u0 - loc
            if abs(d) <= 1e-12:
                raise PoleEvaluationError(f"evaluation at pole {loc}")
            for m in range(1, len(pc) + 1):
                acc += pc[m - 1] / d ** m
        return acc

    def expand_at(self, center: complex, order: int, min_exp: int | None = None) -> LaurentJet:
        """Exact Laurent expansion about ``center`` to exponent ``order``.

        Principal exponents appear only when ``center`` is itself a pole; the
        expansions of the remaining terms are exact geometric series.
        """
        center = complex(center)
        ck = _key(center)
        self_depth = max((len(pc) for loc, pc in zip(self.poles, self.principal)
                          if _key(loc) == ck), default=0)
        lo = -self_depth if min_exp is None else min(min_exp, -self_depth)
        out = np.zeros(order - lo + 1, dtype=np.complex128)
        for e, c in enumerate(self.poly):
            # (u)^e = (center + v)^e, exact binomial
            for t in range(0, min(e, order) + 1):
                out[t - lo] += c * comb(e, t) * center ** (e - t)
        # one vectorized geometric-series batch over every (pole, depth) pair:
        # (u - loc)^-m about the center is d^-m (1 + v/d)^-m with d = center-loc,
        # whose v^t coefficient is (-1)^t C(m+t-1, t) d^{-m-t}
        batch_pc, batch_m, batch_d = [], [], []
        for loc, pc in zip(self.poles, self.principal):
            if _key(loc) == ck:
                for m in range(1, len(pc) + 1):
                    out[-m - lo] += pc[m - 1]
                continue
            d = center - loc
            for m in range(1, len(pc) + 1):
                batch_pc.append(pc[m - 1])
                batch_m.append(m)
                batch_d.append(d)
        if batch_pc:
            t_range = np.arange(1, order + 1, dtype=np.complex128)
            m_col = np.asarray(batch_m, dtype=np.complex128)[:, None]
            d_col = np.asarray(batch_d, dtype=np.complex128)[:, None]
            tails = np.empty((len(batch_pc), order + 1), dtype=np.complex128)
            tails[:, 0] = (d_col[:, 0]) ** (-m_col[:, 0])
            if order:
                ratios = -(m_col + t_range[None, :] - 1.0) / (t_range[None, :] * d_col)
                tails[:, 1:] = tails[:, :1] * np.cumprod(ratios, axis=1)
            out[-lo:] += np.asarray(batch_pc, dtype=np.complex128) @ tails
        return LaurentJet(center, lo, out, exact_tail=False)
