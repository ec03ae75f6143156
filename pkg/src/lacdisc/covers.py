"""Bracketing covers of the unit cube and the chaining decomposition.

A delta-bracketing cover is a finite set of corner pairs (v, w), v <= w
componentwise, such that every point of [0,1)^d is sandwiched by some pair
whose bracket [0,w) \\ [0,v) has volume at most delta.  Three constructions
live here:

* a uniform mesh of grid cells (the base cover; coverage is trivial because
  the cells partition the cube),
* its dyadic snap: lower corners floored to the grid 2^-(h+1+ceil(log2 d)),
  upper corners ceiled to 2^-(h+2+ceil(log2 d)), which turns a 2^-(h+2)
  cover into a 2^-h cover with fully dyadic corners,
* explicit corner lists for hand-built covers.

On top of the snapped covers sits the chaining decomposition of a target
point y: nested dyadic corners 0 = beta_0 <= ... <= beta_H <= y <= beta_H+1
whose difference layers have geometrically decreasing volume.  Bracket
lookup is by floor-indexing into the mesh, so every beta_h is a
deterministic function of its successor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .bounds import ChainInfeasibleError, ceil_log2, chaining_depth

__all__ = [
    "Bracket",
    "BracketingCover",
    "ChainingDecomposition",
    "build_base_cover",
    "dyadic_snap",
    "explicit_cover",
    "build_chain",
    "cover_cardinality_bound",
    "probe_cover",
]

_FractionLike = Fraction | int | float


def _as_corner(d: int, y: Sequence[_FractionLike]) -> tuple[Fraction, ...]:
    corner = tuple(Fraction(c) for c in y)
    if len(corner) != d:
        raise ValueError(f"corner has {len(corner)} coordinates, expected {d}")
    if any(c < 0 or c > 1 for c in corner):
        raise ValueError(f"corner {corner} outside [0,1]^d")
    return corner


def _volume(corner: tuple[Fraction, ...]) -> Fraction:
    vol = Fraction(1)
    for c in corner:
        vol *= c
    return vol


@dataclass(frozen=True)
class Bracket:
    """A corner pair v <= w; its weight is vol([0,w)) - vol([0,v)) >= 0."""

    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.lower) != len(self.upper):
            raise ValueError("corner dimension mismatch")
        if any(v > w for v, w in zip(self.lower, self.upper)):
            raise ValueError(f"bracket corners not ordered: {self.lower} !<= {self.upper}")

    @property
    def weight(self) -> Fraction:
        return _volume(self.upper) - _volume(self.lower)

    def contains(self, y: Sequence[_FractionLike]) -> bool:
        y = tuple(Fraction(c) for c in y)
        return all(v <= c <= w for v, c, w in zip(self.lower, y, self.upper))


class BracketingCover:
    """A delta-bracketing cover of [0,1)^d.

    ``corner_denominator`` is a power of two when every corner lies on that
    dyadic grid, and 0 for non-dyadic covers (e.g. a mesh of 23 cells per
    axis).  Mesh-backed covers are stored implicitly; their brackets are
    enumerated on demand, which keeps hypercube-sized covers usable for
    lookup even when materializing them would be hopeless.
    """

    def __init__(self, d: int, delta: Fraction, kind: str, *,
                 mesh: int | None = None, level: int | None = None,
                 brackets: tuple[Bracket, ...] | None = None,
                 corner_denominator: int | None = None) -> None:
        if kind not in ("grid", "snapped", "explicit"):
            raise ValueError(f"unknown cover kind {kind!r}")
        self.d = d
        self.delta = Fraction(delta)
        self.kind = kind
        self._mesh = mesh
        self._level = level
        self._brackets = brackets
        if kind == "grid":
            assert mesh is not None
            self.cardinality = mesh ** d
            self.corner_denominator = mesh if mesh & (mesh - 1) == 0 else 0
        elif kind == "snapped":
            assert mesh is not None and level is not None
            self.cardinality = mesh ** d
            self.corner_denominator = 1 << (level + 2 + ceil_log2(d))
        else:
            assert brackets is not None
            self.cardinality = len(brackets)
            self.corner_denominator = (
                corner_denominator if corner_denominator is not None else 0
            )

    # -- snapping grids -------------------------------------------------

    @property
    def _coarse_den(self) -> int:
        assert self.kind == "snapped" and self._level is not None
        return 1 << (self._level + 1 + ceil_log2(self.d))

    @property
    def _fine_den(self) -> int:
        assert self.kind == "snapped" and self._level is not None
        return 1 << (self._level + 2 + ceil_log2(self.d))

    # -- lookup ----------------------------------------------------------

    def _cell_of(self, y: tuple[Fraction, ...]) -> tuple[int, ...]:
        m = self._mesh
        assert m is not None
        return tuple(min(int(c * m), m - 1) for c in y)

    def _cell_bracket(self, cell: tuple[int, ...]) -> Bracket:
        m = self._mesh
        assert m is not None
        if self.kind == "grid":
            return Bracket(
                lower=tuple(Fraction(k, m) for k in cell),
                upper=tuple(Fraction(k + 1, m) for k in cell),
            )
        g1, g2 = self._coarse_den, self._fine_den
        return Bracket(
            lower=tuple(Fraction(k * g1 // m, g1) for k in cell),
            upper=tuple(Fraction(-((-(k + 1) * g2) // m), g2) for k in cell),
        )

    def find_bracket(self, y: Sequence[_FractionLike]) -> Bracket:
        """The bracket containing y (floor-indexed for mesh-backed covers)."""
        corner = _as_corner(self.d, y)
        if self.kind in ("grid", "snapped"):
            return self._cell_bracket(self._cell_of(corner))
        assert self._brackets is not None
        for br in self._brackets:
            if br.contains(corner):
                return br
        raise ValueError(f"no bracket contains {corner}")

    def iter_brackets(self) -> Iterator[Bracket]:
        if self.kind == "explicit":
            assert self._brackets is not None
            yield from self._brackets
            return
        m = self._mesh
        assert m is not None
        for cell in product(range(m), repeat=self.d):
            yield self._cell_bracket(cell)

    # -- vectorized corner access (mesh-backed covers only) ---------------

    def corner_chunks(self, max_rows: int = 1 << 16,
                      ) -> Iterator[tuple[np.ndarray, int, np.ndarray, int]]:
        """Yield (v_num, v_den, w_num, w_den) integer corner blocks.

        Exact: v = v_num / v_den and w = w_num / w_den componentwise.
        """
        if self.kind == "explicit":
            raise ValueError("explicit covers have no mesh to enumerate")
        m = self._mesh
        assert m is not None
        total = self.cardinality
        shape = (m,) * self.d
        for start in range(0, total, max_rows):
            idx = np.arange(start, min(start + max_rows, total))
            cells = np.stack(np.unravel_index(idx, shape), axis=1).astype(np.int64)
            if self.kind == "grid":
                yield cells, m, cells + 1, m
            else:
                g1, g2 = self._coarse_den, self._fine_den
                v = cells * g1 // m
                w = -((-(cells + 1) * g2) // m)
                yield v, g1, w, g2


def cover_cardinality_bound(d: int, delta: Fraction | float) -> float:
    """Analytic cover-size bound (2e)^d * (1/delta + 1)^d / 2 for reporting."""
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    return 0.5 * (2.0 * math.e) ** d * float(1 / delta + 1) ** d


@lru_cache(maxsize=None)
def _min_mesh(d: int, delta: Fraction) -> int:
    """Smallest mesh count m with 1 - (1 - 1/m)^d <= delta, checked exactly."""

    def ok(m: int) -> bool:
        # m^d - (m-1)^d <= delta * m^d in integers
        return (m ** d - (m - 1) ** d) * delta.denominator <= delta.numerator * m ** d

    if delta >= 1:
        return 1
    guess = 1.0 / (1.0 - (1.0 - float(delta)) ** (1.0 / d))
    m = max(1, int(guess) - 2)
    while not ok(m):
        m += 1
    while m > 1 and ok(m - 1):
        m -= 1
    return m


def build_base_cover(d: int, delta: Fraction | float) -> BracketingCover:
    """Uniform-mesh delta-bracketing cover: per-axis mesh 1/m, cells as brackets.

    m is minimal with 1 - (1 - 1/m)^d <= delta, so the largest cell weight
    (the top corner cell) meets the bound and coverage holds by partition.
    """
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if delta > 1:
        delta = Fraction(1)
    return BracketingCover(d, delta, "grid", mesh=_min_mesh(d, delta))


def dyadic_snap(cover: BracketingCover, h: int, d: int | None = None) -> BracketingCover:
    """Snap a 2^-(h+2) cover onto dyadic grids, yielding a 2^-h cover.

    Lower corners are floored to multiples of 2^-(h+1+ceil(log2 d)), upper
    corners ceiled to multiples of 2^-(h+2+ceil(log2 d)).  Each side inflates
    the bracket weight by at most d grid cells' worth of volume, which is
    what turns delta = 2^-(h+2) into 2^-h.
    """
    if h < 0:
        raise ValueError(f"need h >= 0, got {h}")
    if d is not None and d != cover.d:
        raise ValueError(f"dimension mismatch: cover has d={cover.d}, got {d}")
    d = cover.d
    if cover.delta > Fraction(1, 1 << (h + 2)):
        raise ValueError(
            f"input delta {cover.delta} exceeds 2^-(h+2) = {Fraction(1, 1 << (h + 2))}"
        )
    target = Fraction(1, 1 << h)
    if cover.kind == "grid":
        return BracketingCover(d, target, "snapped", mesh=cover._mesh, level=h)
    g1 = 1 << (h + 1 + ceil_log2(d))
    g2 = 1 << (h + 2 + ceil_log2(d))
    seen: dict[tuple, Bracket] = {}
    for br in cover.iter_brackets():
        lower = tuple(Fraction(math.floor(v * g1), g1) for v in br.lower)
        upper = tuple(Fraction(math.ceil(w * g2), g2) for w in br.upper)
        seen.setdefault((lower, upper), Bracket(lower=lower, upper=upper))
    return BracketingCover(d, target, "explicit",
                           brackets=tuple(seen.values()), corner_denominator=g2)


def explicit_cover(d: int, delta: Fraction | float,
                   brackets: Sequence[Bracket]) -> BracketingCover:
    """Wrap a hand-built bracket list as a cover (weights are validated)."""
    delta = Fraction(delta)
    brackets = tuple(brackets)
    for br in brackets:
        if len(br.lower) != d:
            raise ValueError("bracket dimension mismatch")
        if br.weight > delta:
            raise ValueError(f"bracket weight {br.weight} exceeds delta {delta}")
    dens = {c.denominator for br in brackets for c in br.lower + br.upper}
    common = math.lcm(*dens) if dens else 1
    corner_den = common if common & (common - 1) == 0 else 0
    return BracketingCover(d, delta, "explicit", brackets=brackets,
                           corner_denominator=corner_den)


def probe_cover(cover: BracketingCover, n_probes: int,
                master_seed: int = 0) -> tuple[bool, Fraction]:
    """Probe coverage with pseudorandom dyadic points.

    Returns (every probe was bracketed, max bracket weight seen).  Weights
    are computed exactly.
    """
    rng = np.random.default_rng(master_seed)
    probe_bits = 30
    nums = rng.integers(0, 1 << probe_bits, size=(n_probes, cover.d), dtype=np.int64)
    scale = 1 << probe_bits
    if cover.kind == "explicit":
        max_weight = Fraction(0)
        for row in nums:
            br = cover.find_bracket([Fraction(int(p), scale) for p in row])
            max_weight = max(max_weight, br.weight)
        return True, max_weight
    m = cover._mesh
    assert m is not None
    cells = nums * m // scale
    if cover.kind == "grid":
        v_num, v_den, w_num, w_den = cells, m, cells + 1, m
    else:
        g1, g2 = cover._coarse_den, cover._fine_den
        v_num, v_den = cells * g1 // m, g1
        w_num, w_den = -((-(cells + 1) * g2) // m), g2
    # contain check, exact: v <= p/2^30 <= w
    ok = ((v_num * scale <= nums * v_den).all()
          and (nums * w_den <= w_num * scale).all())
    # weight over the common denominator w_den^d
    ratio = w_den // v_den
    wn = w_num[:, 0].copy()
    vn = (v_num[:, 0] * ratio).copy()
    for i in range(1, cover.d):
        wn *= w_num[:, i]
        vn *= v_num[:, i] * ratio
    weight_num = wn - vn
    return bool(ok), Fraction(int(weight_num.max()), w_den ** cover.d)


# -- chaining ------------------------------------------------------------


@dataclass(frozen=True)
class ChainingDecomposition:
    """Nested dyadic corners beta_0 <= ... <= beta_H <= y <= beta_{H+1}.

    Layer h is the difference set K_h = [0, beta_{h+1}) \\ [0, beta_h); the
    layers are pairwise disjoint, their union up to h < H is contained in
    [0, y), including h = H it contains [0, y), and layer h has volume at
    most 2^-h.
    """

    y: tuple[Fraction, ...]
    depth: int
    betas: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    @property
    def d(self) -> int:
        return len(self.y)

    def layer(self, h: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        if not 0 <= h <= self.depth:
            raise IndexError(f"layer index {h} outside 0..{self.depth}")
        return self.betas[h], self.betas[h + 1]

    def layer_volume(self, h: int) -> Fraction:
        lo, hi = self.layer(h)
        return _volume(hi) - _volume(lo)

    def layer_contains(self, h: int, x: Sequence[_FractionLike]) -> bool:
        lo, hi = self.layer(h)
        x = tuple(Fraction(c) for c in x)
        in_hi = all(c < b for c, b in zip(x, hi))
        in_lo = all(c < b for c, b in zip(x, lo))
        return in_hi and not in_lo

    def validate(self) -> None:
        """Check every structural invariant exactly; raises on violation."""
        if len(self.betas) != self.depth + 2:
            raise AssertionError("beta count != depth + 2")
        if any(c != 0 for c in self.betas[0]):
            raise AssertionError("beta_0 != 0")
        for h in range(self.depth + 1):
            lo, hi = self.betas[h], self.betas[h + 1]
            if any(a > b for a, b in zip(lo, hi)):
                raise AssertionError(f"beta_{h} !<= beta_{h + 1}")
            vol = _volume(hi) - _volume(lo)
            if vol < 0 or vol > Fraction(1, 1 << h):
                raise AssertionError(f"layer {h} volume {vol} exceeds 2^-{h}")
        if any(b > c for b, c in zip(self.betas[self.depth], self.y)):
            raise AssertionError("beta_H !<= y")
        if any(c > b for c, b in zip(self.y, self.betas[self.depth + 1])):
            raise AssertionError("y !<= beta_{H+1}")
        big_l = ceil_log2(self.d)
        for h in range(1, self.depth + 1):
            grid = 1 << (h + 1 + big_l)
            if any((c * grid).denominator != 1 for c in self.betas[h]):
                raise AssertionError(f"beta_{h} not on the 2^-{h + 1 + big_l} grid")
        top_grid = 1 << (self.depth + 2 + big_l)
        if any((c * top_grid).denominator != 1 for c in self.betas[self.depth + 1]):
            raise AssertionError("beta_{H+1} not on its dyadic grid")


@lru_cache(maxsize=None)
def _chain_cover(d: int, h: int) -> BracketingCover:
    """Level-h snapped cover used for chain lookups (2^-(h+2) base mesh)."""
    return dyadic_snap(build_base_cover(d, Fraction(1, 1 << (h + 2))), h)


def build_chain(y: Sequence[_FractionLike], d: int, n_points: int) -> ChainingDecomposition:
    """Chaining decomposition of the box [0, y) at the depth set by (N, d).

    The top bracket comes from the level-H cover's cell containing y; each
    deeper corner beta_h is the snapped lower corner of the level-h cell
    containing beta_{h+1}, so the whole chain is a deterministic function of
    y and corners at the same level agree whenever their successors do.
    """
    depth = chaining_depth(n_points, d)
    if depth < 1:
        raise ChainInfeasibleError(
            f"chaining depth {depth} < 1 for N={n_points}, d={d}"
        )
    corner = _as_corner(d, y)
    if any(c >= 1 for c in corner):
        raise ValueError("target must lie in [0,1)^d")
    betas: list[tuple[Fraction, ...] | None] = [None] * (depth + 2)
    top = _chain_cover(d, depth).find_bracket(corner)
    betas[depth + 1] = top.upper
    betas[depth] = top.lower
    for h in range(depth - 1, 0, -1):
        betas[h] = _chain_cover(d, h).find_bracket(betas[h + 1]).lower
    betas[0] = (Fraction(0),) * d
    return ChainingDecomposition(y=corner, depth=depth, betas=tuple(betas))
