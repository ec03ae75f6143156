"""Star discrepancy, exactly.

The star discrepancy of x_1..x_N is the supremum over anchored boxes [0, y)
of |fraction of points inside - volume|.  For a finite point set the
supremum is attained on the critical grid built from the coordinate values:
with per-axis value sets G_i = {x_{n,i}} and G_i+ = G_i u {1},

    D*_N = max( max_{y in prod G_i+}  vol(y) - strict(y)/N,
                max_{y in prod G_i }  closed(y)/N - vol(y) ),

where strict counts points with x < y in every axis and closed counts
x <= y (the closed side realizes the limit of boxes shrinking onto their
boundary).  Everything is computed in exact rational arithmetic: coordinates
are dyadic with denominator 2**H, volumes are integers over 2**(d*H), and
the maxima are taken over integer-valued objectives, so there are no
floating-point ties.

A delta-bracketing cover gives a two-sided enclosure instead: for any y
with v <= y <= w the local discrepancy is squeezed between corner
expressions, so scanning the cover yields lower <= D* <= upper with
upper - lower <= delta at a cost independent of the critical-grid size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .covers import BracketingCover
from .points import PointSet

__all__ = [
    "LocalDiscrepancy",
    "DiscrepancyBounds",
    "GridBudgetExceeded",
    "box_count",
    "local_discrepancy",
    "exact_star_discrepancy",
    "star_discrepancy_1d",
    "bracket_bounds",
    "critical_grid_size",
    "DEFAULT_GRID_BUDGET",
]

DEFAULT_GRID_BUDGET = 10 ** 8
# Prefix-count tensors are used while they stay at or below ~2^26 counters.
_PREFIX_GRID_LIMIT = 1 << 26


class GridBudgetExceeded(RuntimeError):
    """The critical grid exceeds the evaluation budget; use bracket_bounds."""


@dataclass(frozen=True)
class LocalDiscrepancy:
    """Both one-sided local discrepancies at a corner y, exact.

    under = vol([0,y)) - strict/N;  over = closed/N - vol([0,y)).
    Their sum is the (nonnegative) boundary mass (closed - strict)/N.
    """

    under: Fraction
    over: Fraction
    y: tuple[Fraction, ...]


@dataclass(frozen=True)
class DiscrepancyBounds:
    """Two-sided enclosure lower <= D*_N <= upper from a delta-cover."""

    lower: Fraction
    upper: Fraction
    delta: Fraction

    def __post_init__(self) -> None:
        if not 0 <= self.lower <= self.upper <= 1:
            raise ValueError(f"invalid enclosure [{self.lower}, {self.upper}]")
        if self.upper - self.lower > self.delta:
            raise ValueError(
                f"enclosure gap {self.upper - self.lower} exceeds delta {self.delta}"
            )

    @property
    def gap(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2


def _as_corner(points: PointSet, y: Sequence[Fraction | int | float]) -> tuple[Fraction, ...]:
    corner = tuple(Fraction(c) for c in y)
    if len(corner) != points.d:
        raise ValueError(f"corner has {len(corner)} coordinates, expected {points.d}")
    if any(c < 0 or c > 1 for c in corner):
        raise ValueError(f"corner {corner} outside [0,1]^d")
    return corner


def box_count(points: PointSet, y: Sequence[Fraction | int | float],
              mode: str = "strict") -> int:
    """Number of points in the anchored box at y.

    mode='strict' counts x with x_i < y_i for every axis (points of [0,y)),
    mode='closed' counts x_i <= y_i.
    """
    if mode not in ("strict", "closed"):
        raise ValueError(f"unknown mode {mode!r}")
    corner = _as_corner(points, y)
    scale = 1 << points.precision
    thresholds = np.empty(points.d, dtype=np.int64)
    for i, c in enumerate(corner):
        t = c * scale
        thresholds[i] = math.ceil(t) - 1 if mode == "strict" else math.floor(t)
    inside = (points.numerators <= thresholds).all(axis=1)
    return int(inside.sum())


def local_discrepancy(points: PointSet, y: Sequence[Fraction | int | float]) -> LocalDiscrepancy:
    """Exact one-sided local discrepancies of the box [0, y)."""
    corner = _as_corner(points, y)
    vol = Fraction(1)
    for c in corner:
        vol *= c
    strict = box_count(points, corner, "strict")
    closed = box_count(points, corner, "closed")
    return LocalDiscrepancy(
        under=vol - Fraction(strict, points.n),
        over=Fraction(closed, points.n) - vol,
        y=corner,
    )


def critical_grid_size(points: PointSet) -> int:
    """Number of critical-grid evaluations exact_star_discrepancy would do."""
    size = 1
    for i in range(points.d):
        size *= len(np.unique(points.numerators[:, i])) + 1
    return size


def _padded_prefix(hist: np.ndarray) -> np.ndarray:
    """S with S[j] = #cells c < j componentwise (inclusive prefix, padded)."""
    out = np.zeros(tuple(s + 1 for s in hist.shape), dtype=np.int64)
    out[tuple(slice(1, None) for _ in hist.shape)] = hist
    for axis in range(hist.ndim):
        np.cumsum(out, axis=axis, out=out)
    return out


def _rank_prefix(points: PointSet) -> tuple[list[np.ndarray], np.ndarray]:
    """Per-axis sorted unique values and the padded rank-count tensor."""
    axes = [np.unique(points.numerators[:, i]) for i in range(points.d)]
    ranks = np.empty_like(points.numerators)
    for i, vals in enumerate(axes):
        ranks[:, i] = np.searchsorted(vals, points.numerators[:, i])
    flat = np.ravel_multi_index(tuple(ranks.T), tuple(len(v) for v in axes))
    hist = np.bincount(flat, minlength=math.prod(len(v) for v in axes))
    hist = hist.reshape(tuple(len(v) for v in axes)).astype(np.int64)
    return axes, _padded_prefix(hist)


def _max_objective_int64(value_axes: list[np.ndarray], counts: np.ndarray,
                         n: int, scale: int, side: str) -> int:
    prods = None
    for vals in value_axes:
        prods = vals if prods is None else prods[..., None] * vals
    if side == "under":
        objective = n * prods - counts * scale
    else:
        objective = counts * scale - n * prods
    return int(objective.max())


def _max_objective_exact(value_axes: list[list[int]], counts: np.ndarray,
                         n: int, scale: int, side: str) -> int:
    d = len(value_axes)
    best: int | None = None

    def recurse(axis: int, prod: int, idx: tuple[int, ...]) -> None:
        nonlocal best
        if axis == d - 1:
            row = counts[idx] if d > 1 else counts
            row_list = row.tolist()
            for j, v in enumerate(value_axes[axis]):
                p = prod * v
                c = row_list[j]
                t = n * p - c * scale if side == "under" else c * scale - n * p
                if best is None or t > best:
                    best = t
        else:
            for j, v in enumerate(value_axes[axis]):
                recurse(axis + 1, prod * v, idx + (j,))

    recurse(0, 1, ())
    assert best is not None
    return best


def exact_star_discrepancy(points: PointSet,
                           grid_budget: int = DEFAULT_GRID_BUDGET) -> Fraction:
    """Exact star discrepancy via the critical grid, as a Fraction.

    Raises :class:`GridBudgetExceeded` when the candidate grid would exceed
    ``grid_budget`` evaluations; callers should then fall back to
    :func:`bracket_bounds` with a cover of the desired resolution.
    """
    size = critical_grid_size(points)
    if size > grid_budget:
        raise GridBudgetExceeded(
            f"critical grid needs {size} evaluations (budget {grid_budget}); "
            "use bracket_bounds with a delta-bracketing cover instead"
        )
    n, d, h_bits = points.n, points.d, points.precision
    one = 1 << h_bits
    scale = 1 << (d * h_bits)
    axes, prefix = _rank_prefix(points)
    # Closed counts sit one index further into the padded prefix tensor.
    closed_counts = prefix[tuple(slice(1, None) for _ in range(d))]

    under_axes = [np.concatenate([vals, [one]]).astype(np.int64) for vals in axes]
    over_axes = [vals.astype(np.int64) for vals in axes]

    # The integer objectives are bounded by N * 2^(d*H); stay in int64 when
    # that fits, otherwise recurse with Python integers (exact at any size).
    if n.bit_length() + d * h_bits <= 62:
        best_under = _max_objective_int64(under_axes, prefix, n, scale, "under")
        best_over = _max_objective_int64(over_axes, closed_counts, n, scale, "over")
    else:
        best_under = _max_objective_exact(
            [[int(v) for v in vals] for vals in under_axes], prefix, n, scale, "under")
        best_over = _max_objective_exact(
            [[int(v) for v in vals] for vals in over_axes], closed_counts, n, scale, "over")
    return Fraction(max(best_under, best_over), n * scale)


def star_discrepancy_1d(points: PointSet) -> Fraction:
    """Exact star discrepancy for d=1 via the sorted-order formula.

    D* = max_i max(i/N - x_(i), x_(i) - (i-1)/N) over the sorted values;
    used as an O(N log N) fast path and as an independent cross-check.
    """
    if points.d != 1:
        raise ValueError(f"star_discrepancy_1d needs d=1, got d={points.d}")
    n = points.n
    one = 1 << points.precision
    xs = np.sort(points.numerators[:, 0])
    i = np.arange(1, n + 1, dtype=object)
    xs = xs.astype(object)
    best = max(max(ii * one - n * x, n * x - (ii - 1) * one) for ii, x in zip(i, xs))
    return Fraction(int(best), n * one)


# -- bracket enclosure -----------------------------------------------------


def _corner_cells(numerators: np.ndarray, h_bits: int, m: int,
                  rounding: str) -> np.ndarray:
    """floor or ceil of coordinate * m, exact (cells on the 1/m grid)."""
    if h_bits + m.bit_length() > 62:
        work = numerators.astype(object)  # products may overflow int64
    else:
        work = numerators
    if rounding == "floor":
        cells = (work * m) // (1 << h_bits)
    else:
        cells = (work * m + (1 << h_bits) - 1) // (1 << h_bits)
    return np.asarray(cells, dtype=np.int64)


def _prefix_count_grids(points: PointSet, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Strict and closed prefix-count tensors on the 1/m corner grid.

    strict(k) = F[k] counts x < k/m componentwise (floor cells), and
    closed(k) = G[k+1] counts x <= k/m (ceil cells); both exact because
    floor(x*m) < k iff x < k/m and ceil(x*m) <= k iff x <= k/m.
    """
    d = points.d
    fc = _corner_cells(points.numerators, points.precision, m, "floor")
    cc = _corner_cells(points.numerators, points.precision, m, "ceil")
    hist_f = np.bincount(
        np.ravel_multi_index(tuple(fc.T), (m,) * d), minlength=m ** d
    ).reshape((m,) * d).astype(np.int64)
    hist_c = np.bincount(
        np.ravel_multi_index(tuple(cc.T), (m + 1,) * d), minlength=(m + 1) ** d
    ).reshape((m + 1,) * d).astype(np.int64)
    return _padded_prefix(hist_f), _padded_prefix(hist_c)


def _row_products(arr: np.ndarray) -> np.ndarray:
    out = arr[:, 0].copy()
    for i in range(1, arr.shape[1]):
        out *= arr[:, i]
    return out


def bracket_bounds(points: PointSet, cover: BracketingCover) -> DiscrepancyBounds:
    """Two-sided enclosure of D*_N from a delta-bracketing cover.

    lower: the best local discrepancy witnessed at any bracket corner (both
    sides, absolute value), always a valid lower bound for the supremum.
    upper: per bracket, every y between the corners satisfies
    |vol(y) - strict(y)/N| <= max(strict(w)/N - vol(v), vol(w) - strict(v)/N),
    and every y is in some bracket, so the maximum over brackets bounds D*.
    The gap never exceeds delta.

    Corner counting uses prefix-count tensors on the cover's corner grid
    while they fit in memory, and per-corner counting otherwise.
    """
    if cover.d != points.d:
        raise ValueError(f"dimension mismatch: points d={points.d}, cover d={cover.d}")
    if cover.cardinality < 1:
        raise ValueError("cover has no brackets")
    n, d = points.n, points.d

    mesh_backed = cover.kind in ("grid", "snapped")
    common_den = 0
    if mesh_backed:
        common_den = cover._mesh if cover.kind == "grid" else cover._fine_den  # noqa: SLF001
    elif cover.corner_denominator:
        common_den = cover.corner_denominator

    if mesh_backed and common_den and (common_den + 1) ** d <= _PREFIX_GRID_LIMIT:
        return _bracket_bounds_prefix(points, cover, common_den)
    return _bracket_bounds_generic(points, cover)


def _bracket_bounds_prefix(points: PointSet, cover: BracketingCover,
                           m: int) -> DiscrepancyBounds:
    n, d = points.n, points.d
    strict_f, closed_g = _prefix_count_grids(points, m)
    scale = m ** d
    int64_ok = n.bit_length() + d * m.bit_length() <= 62

    best_low = 0
    best_up = None
    for v_num, v_den, w_num, w_den in cover.corner_chunks():
        kv = v_num * (m // v_den)
        kw = w_num * (m // w_den)
        sv = strict_f[tuple(kv.T)]
        sw = strict_f[tuple(kw.T)]
        cv = closed_g[tuple((kv + 1).T)]
        cw = closed_g[tuple((kw + 1).T)]
        if int64_ok:
            pv = _row_products(kv)
            pw = _row_products(kw)
            under_v = n * pv - sv * scale
            over_v = cv * scale - n * pv
            under_w = n * pw - sw * scale
            over_w = cw * scale - n * pw
            low = np.maximum(np.maximum(np.abs(under_v), over_v),
                             np.maximum(np.abs(under_w), over_w))
            up = np.maximum(sw * scale - n * pv, n * pw - sv * scale)
            best_low = max(best_low, int(low.max()))
            chunk_up = int(up.max())
        else:
            kv_l, kw_l = kv.tolist(), kw.tolist()
            sv_l, sw_l = sv.tolist(), sw.tolist()
            cv_l, cw_l = cv.tolist(), cw.tolist()
            chunk_up = None
            for row in range(len(kv_l)):
                pv = math.prod(kv_l[row])
                pw = math.prod(kw_l[row])
                low = max(abs(n * pv - sv_l[row] * scale), cv_l[row] * scale - n * pv,
                          abs(n * pw - sw_l[row] * scale), cw_l[row] * scale - n * pw)
                up = max(sw_l[row] * scale - n * pv, n * pw - sv_l[row] * scale)
                best_low = max(best_low, low)
                chunk_up = up if chunk_up is None else max(chunk_up, up)
        best_up = chunk_up if best_up is None else max(best_up, chunk_up)
    assert best_up is not None
    return DiscrepancyBounds(
        lower=Fraction(best_low, n * scale),
        upper=Fraction(best_up, n * scale),
        delta=cover.delta,
    )


def _bracket_bounds_generic(points: PointSet, cover: BracketingCover) -> DiscrepancyBounds:
    n = points.n
    best_low = Fraction(0)
    best_up: Fraction | None = None
    for br in cover.iter_brackets():
        vol_v = Fraction(1)
        for c in br.lower:
            vol_v *= c
        vol_w = Fraction(1)
        for c in br.upper:
            vol_w *= c
        sv = box_count(points, br.lower, "strict")
        sw = box_count(points, br.upper, "strict")
        cv = box_count(points, br.lower, "closed")
        cw = box_count(points, br.upper, "closed")
        for vol, strict, closed in ((vol_v, sv, cv), (vol_w, sw, cw)):
            best_low = max(best_low, abs(vol - Fraction(strict, n)),
                           abs(Fraction(closed, n) - vol))
        up = max(Fraction(sw, n) - vol_v, vol_w - Fraction(sv, n))
        best_up = up if best_up is None else max(best_up, up)
    assert best_up is not None
    return DiscrepancyBounds(lower=best_low, upper=best_up, delta=cover.delta)
