"""Exact independence checks for shift-sequence layer indicators.

For a region K with dyadic corners and the shift sequence x_n = frac(2^(n-1) x_1)
from a uniform seed, the centered indicators f_K(x_n) = 1_K(x_n) - vol(K) at two
indices n < n' are exactly independent once the index gap reaches
level + 2 + ceil(log2 d).  This module verifies that with zero tolerance: the
seed cube decomposes into axis-aligned cells on which the relevant indicators
are constant, so the joint law of (f_K(x_n), f_K(x_n')) is a finite sum of
exact cell probabilities.  Enumerating all cells gives the law exactly, and
the factorization defect max |P(c1,c2) - P(c1)P(c2)| is an exact rational:
zero iff independent.

The enumeration resolution is 2^-r per axis with
r = max(n'-1, n-1+level+2) + ceil(log2 d): fine enough that f_K(x_n) is
constant per cell, and at least as fine as the standard decomposition for the
pair (so gap-violating counterexamples are handled exactly too).  Cells at
index a map to x_n-images aligned to K's corner grid, while x_n' sweeps a box
of width 2^-(r - n' + 1) per axis uniformly, whose overlap with K is exact
integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .bounds import ceil_log2

__all__ = [
    "LayerFunction",
    "JointDistribution",
    "EnumerationGuardExceeded",
    "exact_joint",
    "factorization_gap",
    "exact_joint_kwise",
    "kwise_factorization_gap",
]

# (resolution bits) * d is capped to keep enumeration at ~1.7e7 cells.
GUARD_BITS = 24


class EnumerationGuardExceeded(ValueError):
    """Requested configuration needs more than 2**GUARD_BITS cells."""


@dataclass(frozen=True)
class LayerFunction:
    """Centered indicator of a difference region K = [0,hi) \\ [0,lo).

    Corners must lie on the dyadic grid 2^-(level+2+ceil(log2 d)) and the
    volume must not exceed 2^-level, matching the layer sets produced by the
    chaining decomposition.
    """

    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]
    level: int

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError(f"need level >= 0, got {self.level}")
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("corner dimension mismatch")
        grid = self.corner_denominator
        for lo, hi in zip(self.lower, self.upper):
            if not (0 <= lo <= hi <= 1):
                raise ValueError(f"corners not ordered in [0,1]: {lo}, {hi}")
            if (lo * grid).denominator != 1 or (hi * grid).denominator != 1:
                raise ValueError(f"corners not on the 1/{grid} dyadic grid")
        if self.mean > Fraction(1, 1 << self.level):
            raise ValueError(
                f"volume {self.mean} exceeds 2^-{self.level} for level {self.level}"
            )

    @property
    def d(self) -> int:
        return len(self.lower)

    @property
    def corner_denominator(self) -> int:
        return 1 << (self.level + 2 + ceil_log2(self.d))

    @property
    def mean(self) -> Fraction:
        vol_hi = Fraction(1)
        vol_lo = Fraction(1)
        for lo, hi in zip(self.lower, self.upper):
            vol_hi *= hi
            vol_lo *= lo
        return vol_hi - vol_lo

    def contains(self, x: Sequence[Fraction | int | float]) -> bool:
        x = tuple(Fraction(c) for c in x)
        in_hi = all(c < b for c, b in zip(x, self.upper))
        in_lo = all(c < b for c, b in zip(x, self.lower))
        return in_hi and not in_lo

    def centered_values(self) -> tuple[Fraction, Fraction]:
        """(value inside K, value outside K) of the centered indicator."""
        return 1 - self.mean, -self.mean


@dataclass(frozen=True)
class JointDistribution:
    """Exact joint law of a pair of centered layer indicators."""

    probabilities: Mapping[tuple[Fraction, Fraction], Fraction]
    marginal_first: Mapping[Fraction, Fraction]
    marginal_second: Mapping[Fraction, Fraction]
    cell_resolution: Fraction
    n: int
    n_prime: int

    def __post_init__(self) -> None:
        if sum(self.probabilities.values()) != 1:
            raise ValueError("joint probabilities do not sum to 1")
        for value, target in (
            (self.marginal_first, 0),
            (self.marginal_second, 1),
        ):
            for c, p in value.items():
                total = sum(q for key, q in self.probabilities.items() if key[target] == c)
                if total != p:
                    raise ValueError("marginals inconsistent with joint law")


def _axis_tables(K: LayerFunction, n: int, n_prime: int,
                 r: int) -> tuple[list[np.ndarray], ...]:
    """Per-axis lookup tables over cell index a in 0..2^r-1.

    in_hi/in_lo: whether the x_n-image of the cell lies under K's corners
    (constant per cell by resolution choice).  ov_hi/ov_lo: integer overlap
    of the x_n'-image box with [0, corner) at denominator 2^r.
    """
    R = 1 << r
    a = np.arange(R, dtype=np.int64)
    pos_n = (a << (n - 1)) & (R - 1)
    box_w = 1 << min(n_prime - 1, r)
    pos_np = (a << (n_prime - 1)) & (R - 1) if n_prime - 1 < r else np.zeros(R, np.int64)

    in_hi, in_lo, ov_hi, ov_lo = [], [], [], []
    for lo, hi in zip(K.lower, K.upper):
        hi_int = int(hi * R)
        lo_int = int(lo * R)
        in_hi.append((pos_n < hi_int).astype(np.int64))
        in_lo.append((pos_n < lo_int).astype(np.int64))
        ov_hi.append(np.clip(hi_int - pos_np, 0, box_w))
        ov_lo.append(np.clip(lo_int - pos_np, 0, box_w))
    return in_hi, in_lo, ov_hi, ov_lo


def _resolution_bits(K: LayerFunction, n: int, n_prime: int) -> int:
    big_l = ceil_log2(K.d)
    r = max(n_prime - 1 + big_l, n - 1 + K.level + 2 + big_l)
    if r * K.d > GUARD_BITS:
        raise EnumerationGuardExceeded(
            f"enumeration needs 2^{r * K.d} cells, guard is 2^{GUARD_BITS}"
        )
    return r


def exact_joint(K: LayerFunction, n: int, n_prime: int) -> JointDistribution:
    """Exact joint law of (f_K(x_n), f_K(x_n')) under a uniform seed.

    Enumerates every cell of the seed decomposition; f_K(x_n) is constant per
    cell, and the conditional law of f_K(x_n') per cell is an exact volume
    ratio.  All probabilities are exact rationals.
    """
    if not 1 <= n < n_prime:
        raise ValueError(f"need 1 <= n < n_prime, got n={n}, n_prime={n_prime}")
    d = K.d
    r = _resolution_bits(K, n, n_prime)
    R = 1 << r
    in_hi, in_lo, ov_hi, ov_lo = _axis_tables(K, n, n_prime, r)
    box_w = 1 << min(n_prime - 1, r)

    cells_total = R ** d
    count_in = 0       # cells whose x_n-image lies in K
    weight_total = 0   # sum over cells of overlap(K, x_n'-image box)
    weight_in = 0      # same sum restricted to x_n-in-K cells
    chunk = 1 << 20
    for start in range(0, cells_total, chunk):
        flat = np.arange(start, min(start + chunk, cells_total), dtype=np.int64)
        memb_hi = np.ones(len(flat), dtype=np.int64)
        memb_lo = np.ones(len(flat), dtype=np.int64)
        wt_hi = np.ones(len(flat), dtype=np.int64)
        wt_lo = np.ones(len(flat), dtype=np.int64)
        for i in range(d):
            a = (flat >> (r * (d - 1 - i))) & (R - 1)
            memb_hi *= in_hi[i][a]
            memb_lo *= in_lo[i][a]
            wt_hi *= ov_hi[i][a]
            wt_lo *= ov_lo[i][a]
        member = memb_hi - memb_lo
        weight = wt_hi - wt_lo
        count_in += int(member.sum())
        weight_total += int(weight.sum())
        weight_in += int((member * weight).sum())

    box_vol = box_w ** d
    denom = cells_total * box_vol
    c_in, c_out = K.centered_values()
    joint: dict[tuple[Fraction, Fraction], Fraction] = {}

    def add(c1: Fraction, c2: Fraction, p: Fraction) -> None:
        if p:
            joint[(c1, c2)] = joint.get((c1, c2), Fraction(0)) + p

    add(c_in, c_in, Fraction(weight_in, denom))
    add(c_in, c_out, Fraction(count_in * box_vol - weight_in, denom))
    add(c_out, c_in, Fraction(weight_total - weight_in, denom))
    add(c_out, c_out,
        Fraction(denom - count_in * box_vol - weight_total + weight_in, denom))

    marg1: dict[Fraction, Fraction] = {}
    marg2: dict[Fraction, Fraction] = {}
    for (c1, c2), p in joint.items():
        marg1[c1] = marg1.get(c1, Fraction(0)) + p
        marg2[c2] = marg2.get(c2, Fraction(0)) + p
    return JointDistribution(
        probabilities=joint,
        marginal_first=marg1,
        marginal_second=marg2,
        cell_resolution=Fraction(1, R),
        n=n,
        n_prime=n_prime,
    )


def factorization_gap(joint: JointDistribution) -> Fraction:
    """max over support pairs of |P(c1,c2) - P(c1)P(c2)|, exact; 0 iff independent."""
    gap = Fraction(0)
    for c1, p1 in joint.marginal_first.items():
        for c2, p2 in joint.marginal_second.items():
            p12 = joint.probabilities.get((c1, c2), Fraction(0))
            gap = max(gap, abs(p12 - p1 * p2))
    return gap


def exact_joint_kwise(K: LayerFunction, indices: Sequence[int],
                      ) -> dict[tuple[Fraction, ...], Fraction]:
    """Exact joint law of (f_K(x_n))_{n in indices} by full enumeration.

    Uses a resolution at which every indicator is constant per cell, so the
    law is a plain cell count; intended for small configurations such as
    triples in d=1.
    """
    indices = tuple(indices)
    if len(indices) < 1 or any(a >= b for a, b in zip(indices, indices[1:])):
        raise ValueError("indices must be strictly increasing")
    if indices[0] < 1:
        raise ValueError("indices start at 1")
    d = K.d
    big_l = ceil_log2(d)
    r = indices[-1] - 1 + K.level + 2 + big_l
    if r * d > GUARD_BITS:
        raise EnumerationGuardExceeded(
            f"enumeration needs 2^{r * d} cells, guard is 2^{GUARD_BITS}"
        )
    R = 1 << r
    k = len(indices)
    tables = []
    for n in indices:
        in_hi, in_lo, _, _ = _axis_tables(K, n, indices[-1], r)
        tables.append((in_hi, in_lo))

    cells_total = R ** d
    counts = [0] * (1 << k)
    chunk = 1 << 20
    for start in range(0, cells_total, chunk):
        flat = np.arange(start, min(start + chunk, cells_total), dtype=np.int64)
        code = np.zeros(len(flat), dtype=np.int64)
        for j, (in_hi, in_lo) in enumerate(tables):
            memb_hi = np.ones(len(flat), dtype=np.int64)
            memb_lo = np.ones(len(flat), dtype=np.int64)
            for i in range(d):
                a = (flat >> (r * (d - 1 - i))) & (R - 1)
                memb_hi *= in_hi[i][a]
                memb_lo *= in_lo[i][a]
            code |= (memb_hi - memb_lo) << j
        binned = np.bincount(code, minlength=1 << k)
        for c, v in enumerate(binned.tolist()):
            counts[c] += v

    c_in, c_out = K.centered_values()
    law: dict[tuple[Fraction, ...], Fraction] = {}
    for code in range(1 << k):
        if counts[code]:
            values = tuple(c_in if (code >> j) & 1 else c_out for j in range(k))
            law[values] = law.get(values, Fraction(0)) + Fraction(int(counts[code]), cells_total)
    return law


def kwise_factorization_gap(K: LayerFunction, indices: Sequence[int]) -> Fraction:
    """max over value tuples of |P(tuple) - prod of marginals|, exact."""
    law = exact_joint_kwise(K, indices)
    k = len(tuple(indices))
    marginals: list[dict[Fraction, Fraction]] = [dict() for _ in range(k)]
    for values, p in law.items():
        for j, c in enumerate(values):
            marginals[j][c] = marginals[j].get(c, Fraction(0)) + p
    gap = Fraction(0)
    c_in, c_out = K.centered_values()
    support = {c_in, c_out}
    for code in range(len(support) ** k):
        values = []
        rem = code
        ordered = sorted(support)
        for _ in range(k):
            values.append(ordered[rem % len(ordered)])
            rem //= len(ordered)
        values = tuple(values)
        product = Fraction(1)
        for j, c in enumerate(values):
            product *= marginals[j].get(c, Fraction(0))
        gap = max(gap, abs(law.get(values, Fraction(0)) - product))
    return gap
