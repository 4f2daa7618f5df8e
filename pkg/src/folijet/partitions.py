"""Multiset partitions and the higher-order chain-rule sums built on them.

The k-th derivative of a composition h(f(x)) is a weighted sum over multisets
of positive integers with total k (Faa di Bruno's formula).  Each multiset is
stored with its exact integer weight; weights touch floating coefficients only
once, at evaluation time.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Sequence, Tuple


@dataclass(frozen=True)
class FdBPartition:
    """One multiset {1^r1, 2^r2, ..., k^rk} with sum(s * r_s) = k.

    ``weight`` is k! / (r1! ... rk! (1!)^r1 ... (k!)^rk), an exact positive
    integer (the number of set partitions of {1..k} with this block profile).
    ``multinomial`` is r! / (r1! ... rk!), the weight that appears when the
    sum is written over ordinary series coefficients instead of derivatives.
    """

    k: int
    multiplicities: Tuple[int, ...]
    r: int
    weight: int
    multinomial: int


def _weights(k: int, mult: Tuple[int, ...]) -> Tuple[int, int, int]:
    r = sum(mult)
    denom = 1
    for s, rs in enumerate(mult, start=1):
        denom *= factorial(rs) * factorial(s) ** rs
    weight, rem = divmod(factorial(k), denom)
    if rem:
        raise AssertionError("partition weight is not an integer")
    multi_denom = 1
    for rs in mult:
        multi_denom *= factorial(rs)
    return r, weight, factorial(r) // multi_denom


@lru_cache(maxsize=None)
def enumerate_partitions(k: int) -> Tuple[FdBPartition, ...]:
    """All multisets of positive integers summing to ``k``, with weights.

    Deterministic order: lexicographic in the multiplicity tuple (r1..rk).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    out = []

    def descend(part: int, remaining: int, mult: list) -> None:
        if remaining == 0:
            tup = tuple(mult)
            r, w, m = _weights(k, tup)
            out.append(FdBPartition(k, tup, r, w, m))
            return
        if part > remaining:
            return
        # choose multiplicity of `part`, largest part first for determinism
        descend(part + 1, remaining, mult)
        for count in range(1, remaining // part + 1):
            mult[part - 1] = count
            descend(part + 1, remaining - count * part, mult)
        mult[part - 1] = 0

    descend(1, k, [0] * k)
    out.sort(key=lambda p: p.multiplicities)
    return tuple(out)


def fdb_p(k: int, w: Sequence, z: Sequence):
    """Derivative-weighted chain-rule sum of order ``k``.

    ``w[s-1]`` plays the role of the s-th outer derivative, ``z[s-1]`` of the
    s-th inner derivative; returns
    sum over multisets of  k!/(r1!..rk!) * w_r * prod_s (z_s/s!)^{r_s},
    an element of whatever ring the inputs live in (complex, Laurent jets...).
    """
    if len(w) < k or len(z) < k:
        raise ValueError(f"need {k} outer and inner values, got {len(w)}, {len(z)}")
    total = None
    for part in enumerate_partitions(k):
        term = w[part.r - 1]
        for s, rs in enumerate(part.multiplicities, start=1):
            for _ in range(rs):
                term = term * z[s - 1]
        term = term * part.weight
        total = term if total is None else total + term
    return total


def fdb_p_tilde(k: int, w: Sequence, z: Sequence):
    """``fdb_p`` minus its single top-inner term w_1 * z_k (zero when k = 1)."""
    if k == 1:
        return fdb_p(1, w, z) * 0
    return fdb_p(k, w, z) - w[0] * z[k - 1]


def fdb_p_hat(k: int, w: Sequence, z: Sequence):
    """``fdb_p`` minus its single top-outer term w_k * z_1**k (zero when k = 1)."""
    if k == 1:
        return fdb_p(1, w, z) * 0
    zpow = z[0]
    for _ in range(k - 1):
        zpow = zpow * z[0]
    return fdb_p(k, w, z) - w[k - 1] * zpow
