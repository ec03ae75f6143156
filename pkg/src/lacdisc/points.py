"""Point sets on the dyadic grid: binary-shift orbits and i.i.d. baselines.

A point set is N points in [0,1)^d stored exactly as dyadic fractions
``numerator / 2**precision`` with a common precision H.  The shift
construction draws one bit row of length ``H + N - 1`` per coordinate and
reads point n as the H-bit window starting at bit n, i.e.

    x[n] = 0.b[n] b[n+1] ... b[n+H-1]   (binary),

so consecutive points are one-bit shifts of each other (the truncated
doubling map ``x -> frac(2x)``) and the whole set costs ``d*(H+N-1)`` random
bits.  The i.i.d. baseline draws every coordinate fresh, costing ``d*H*N``
bits, which is what the shift construction is meant to undercut.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, TextIO

import numpy as np

from .rng import TAG_IID_ROW, TAG_SHIFT_ROW, stream_bits, stream_key

# Numerators are stored in int64 arrays, which caps the usable precision.
MAX_PRECISION = 62


def _check_positive(**params: int) -> None:
    for name, value in params.items():
        if int(value) != value or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")


def _check_precision(precision: int) -> None:
    if precision > MAX_PRECISION:
        raise ValueError(
            f"precision {precision} exceeds the supported maximum {MAX_PRECISION} "
            "(coordinates are stored as int64 numerators)"
        )


@dataclass(frozen=True)
class DyadicCoord:
    """Exact coordinate ``numerator / 2**precision`` in [0,1)."""

    numerator: int
    precision: int

    def __post_init__(self) -> None:
        if not 0 <= self.numerator < (1 << self.precision):
            raise ValueError(
                f"numerator {self.numerator} out of range for precision {self.precision}"
            )

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.precision)

    def __float__(self) -> float:
        return self.numerator / (1 << self.precision)


@dataclass(frozen=True)
class SeedBits:
    """The random seed point as d rows of explicit binary-fraction bits.

    Each row holds exactly ``precision + n_points - 1`` bits: enough to read
    n_points overlapping windows of ``precision`` bits.  Regenerating with the
    same (master_seed, d, n_points, precision) reproduces identical bits.
    """

    d: int
    n_points: int
    precision: int
    master_seed: int
    rows: np.ndarray = field(repr=False)  # (d, precision + n_points - 1) uint8

    def __post_init__(self) -> None:
        expected = (self.d, self.bits_per_row)
        if self.rows.shape != expected:
            raise ValueError(f"rows shape {self.rows.shape} != {expected}")
        self.rows.setflags(write=False)

    @property
    def bits_per_row(self) -> int:
        return self.precision + self.n_points - 1

    @property
    def total_bits(self) -> int:
        return self.d * self.bits_per_row


@dataclass(frozen=True)
class PointSet:
    """N points in [0,1)^d as exact dyadic fractions with common precision."""

    d: int
    n: int
    precision: int
    numerators: np.ndarray = field(repr=False)  # (n, d) int64
    kind: str = "external"  # 'lacunary' | 'iid' | 'external'
    bits_consumed: int = 0

    def __post_init__(self) -> None:
        if self.numerators.shape != (self.n, self.d):
            raise ValueError(
                f"numerators shape {self.numerators.shape} != {(self.n, self.d)}"
            )
        if self.numerators.size and (
            self.numerators.min() < 0 or self.numerators.max() >> self.precision
        ):
            raise ValueError("coordinate numerators out of [0, 2**precision) range")
        if self.kind == "lacunary":
            expected = self.d * (self.precision + self.n - 1)
        elif self.kind == "iid":
            expected = self.d * self.precision * self.n
        else:
            expected = self.bits_consumed
        if self.bits_consumed != expected:
            raise ValueError(
                f"bits_consumed {self.bits_consumed} inconsistent with kind "
                f"{self.kind!r} (expected {expected})"
            )
        self.numerators.setflags(write=False)

    def coord(self, n: int, i: int) -> DyadicCoord:
        return DyadicCoord(int(self.numerators[n, i]), self.precision)

    def fraction(self, n: int, i: int) -> Fraction:
        return Fraction(int(self.numerators[n, i]), 1 << self.precision)

    def point(self, n: int) -> tuple[Fraction, ...]:
        scale = 1 << self.precision
        return tuple(Fraction(int(v), scale) for v in self.numerators[n])

    def as_floats(self) -> np.ndarray:
        return self.numerators / float(1 << self.precision)


def derive_seed(master_seed: int, d: int, n_points: int, precision: int) -> SeedBits:
    """Derive the d bit rows for an (n_points, precision) shift point set.

    Row i is the prefix of an infinite per-coordinate stream keyed by
    (master_seed, i), so growing d, n_points, or precision extends existing
    rows instead of reshuffling them.
    """
    _check_positive(d=d, n_points=n_points, precision=precision)
    _check_precision(precision)
    n_bits = precision + n_points - 1
    rows = np.empty((d, n_bits), dtype=np.uint8)
    for i in range(d):
        rows[i] = stream_bits(stream_key(master_seed, i, tag=TAG_SHIFT_ROW), n_bits)
    return SeedBits(d=d, n_points=n_points, precision=precision,
                    master_seed=master_seed & ((1 << 64) - 1), rows=rows)


def _window_numerators(row: np.ndarray, n_points: int, precision: int) -> np.ndarray:
    """Read n_points overlapping precision-bit windows of a bit row, MSB first."""
    windows = np.lib.stride_tricks.sliding_window_view(row, precision)[:n_points]
    weights = (np.uint64(1) << np.arange(precision - 1, -1, -1, dtype=np.uint64))
    return (windows.astype(np.uint64) * weights).sum(axis=1).astype(np.int64)


def generate_lacunary(seed: SeedBits, n_points: int | None = None,
                      precision: int | None = None) -> PointSet:
    """Shift point set from a bit seed: point n is the window at offset n.

    Truncation (not rounding) to ``precision`` bits preserves the exact shift
    identity: the leading precision-1 bits of x[n+1] equal bits 2..precision
    of x[n].
    """
    n_points = seed.n_points if n_points is None else n_points
    precision = seed.precision if precision is None else precision
    _check_positive(n_points=n_points, precision=precision)
    _check_precision(precision)
    needed = precision + n_points - 1
    if seed.rows.shape[1] < needed:
        raise ValueError(
            f"seed rows hold {seed.rows.shape[1]} bits, need {needed} "
            f"for n_points={n_points}, precision={precision}"
        )
    numerators = np.empty((n_points, seed.d), dtype=np.int64)
    for i in range(seed.d):
        numerators[:, i] = _window_numerators(seed.rows[i], n_points, precision)
    return PointSet(d=seed.d, n=n_points, precision=precision,
                    numerators=numerators, kind="lacunary",
                    bits_consumed=seed.d * needed)


def generate_iid(master_seed: int, d: int, n_points: int, precision: int) -> PointSet:
    """i.i.d. uniform dyadic point set; every coordinate costs fresh bits."""
    _check_positive(d=d, n_points=n_points, precision=precision)
    _check_precision(precision)
    numerators = np.empty((n_points, d), dtype=np.int64)
    weights = (np.uint64(1) << np.arange(precision - 1, -1, -1, dtype=np.uint64))
    for i in range(d):
        bits = stream_bits(stream_key(master_seed, i, tag=TAG_IID_ROW),
                           n_points * precision)
        windows = bits.reshape(n_points, precision)
        numerators[:, i] = (windows.astype(np.uint64) * weights).sum(axis=1).astype(np.int64)
    return PointSet(d=d, n=n_points, precision=precision, numerators=numerators,
                    kind="iid", bits_consumed=d * precision * n_points)


def from_fractions(coords: Sequence[Sequence[Fraction | float | int]],
                   precision: int | None = None) -> PointSet:
    """Build a PointSet from exact coordinates with power-of-two denominators."""
    rows = [tuple(Fraction(c) for c in row) for row in coords]
    if not rows:
        raise ValueError("empty point list")
    d = len(rows[0])
    if any(len(r) != d for r in rows):
        raise ValueError("ragged coordinate rows")
    if precision is None:
        precision = 1
        for row in rows:
            for c in row:
                q = c.denominator
                if q & (q - 1):
                    raise ValueError(f"coordinate {c} is not dyadic")
                precision = max(precision, q.bit_length() - 1)
    _check_precision(precision)
    scale = 1 << precision
    numerators = np.empty((len(rows), d), dtype=np.int64)
    for n, row in enumerate(rows):
        for i, c in enumerate(row):
            num = c * scale
            if num.denominator != 1:
                raise ValueError(f"coordinate {c} not representable at precision {precision}")
            if not 0 <= num.numerator < scale:
                raise ValueError(f"coordinate {c} outside [0,1)")
            numerators[n, i] = int(num)
    return PointSet(d=d, n=len(rows), precision=precision, numerators=numerators)


def dyadic_decimal(numerator: int, precision: int) -> str:
    """Exact decimal expansion of numerator / 2**precision in [0,1)."""
    if numerator == 0:
        return "0"
    digits = str(numerator * 5 ** precision).rjust(precision, "0").rstrip("0")
    return "0." + digits


def write_points_csv(points: PointSet, out: TextIO, fmt: str = "decimal") -> None:
    """Dump a point set as CSV with header ``n,x1,...,xd``.

    fmt='decimal' prints exact decimal expansions; fmt='bits' prints each
    coordinate as its ``precision`` binary digits.
    """
    if fmt not in ("decimal", "bits"):
        raise ValueError(f"unknown format {fmt!r}")
    out.write("n," + ",".join(f"x{i + 1}" for i in range(points.d)) + "\n")
    for n in range(points.n):
        if fmt == "decimal":
            cells = [dyadic_decimal(int(v), points.precision) for v in points.numerators[n]]
        else:
            cells = [format(int(v), f"0{points.precision}b") for v in points.numerators[n]]
        out.write(f"{n + 1}," + ",".join(cells) + "\n")


def read_points_csv(src: TextIO | str) -> PointSet:
    """Parse a CSV produced by :func:`write_points_csv` (decimal format)."""
    if isinstance(src, str):
        src = io.StringIO(src)
    header = src.readline().strip().split(",")
    if not header or header[0] != "n":
        raise ValueError("expected header 'n,x1,...,xd'")
    d = len(header) - 1
    if d < 1:
        raise ValueError("no coordinate columns")
    rows: list[tuple[Fraction, ...]] = []
    for line in src:
        line = line.strip()
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != d + 1:
            raise ValueError(f"row has {len(cells) - 1} coordinates, expected {d}")
        rows.append(tuple(Fraction(c) for c in cells[1:]))
    return from_fractions(rows)
