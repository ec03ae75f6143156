from fractions import Fraction

import numpy as np
import pytest

from lacdisc.points import (
    PointSet,
    SeedBits,
    derive_seed,
    dyadic_decimal,
    from_fractions,
    generate_iid,
    generate_lacunary,
    read_points_csv,
    write_points_csv,
)

import io


def test_derive_seed_shapes_and_determinism():
    seed = derive_seed(7, 2, 4, 3)
    assert seed.rows.shape == (2, 6)  # H + N - 1 = 6 bits per row
    again = derive_seed(7, 2, 4, 3)
    assert np.array_equal(seed.rows, again.rows)


def test_derive_seed_minimal():
    seed = derive_seed(7, 1, 1, 1)
    assert seed.rows.shape == (1, 1)


def test_derive_seed_total_bits():
    seed = derive_seed(7, 3, 100, 32)
    assert seed.total_bits == 3 * 131 == 393


def test_derive_seed_rejects_zero_parameters():
    with pytest.raises(ValueError):
        derive_seed(7, 0, 4, 3)
    with pytest.raises(ValueError):
        derive_seed(7, 2, 0, 3)
    with pytest.raises(ValueError):
        derive_seed(7, 2, 4, 0)


def test_rows_do_not_depend_on_d():
    few = derive_seed(123, 2, 16, 8)
    many = derive_seed(123, 5, 16, 8)
    assert np.array_equal(few.rows, many.rows[:2])


def _seed_from_bits(bits, n_points, precision):
    row = np.array(bits, dtype=np.uint8)[None, :]
    return SeedBits(d=1, n_points=n_points, precision=precision,
                    master_seed=0, rows=row)


def test_lacunary_bit_windows():
    # row 0110110001, H=4, N=3: windows 0110, 1101, 1011
    seed = _seed_from_bits([0, 1, 1, 0, 1, 1, 0, 0, 0, 1], 7, 4)
    points = generate_lacunary(seed, n_points=3, precision=4)
    assert points.fraction(0, 0) == Fraction(6, 16)
    assert points.fraction(1, 0) == Fraction(13, 16)
    assert points.fraction(2, 0) == Fraction(11, 16)


def test_lacunary_single_bit_precision():
    seed = _seed_from_bits([1, 0, 0, 0], 4, 1)
    points = generate_lacunary(seed, n_points=3, precision=1)
    assert [points.fraction(n, 0) for n in range(3)] == [
        Fraction(1, 2), Fraction(0), Fraction(0)]


def test_lacunary_bit_accounting():
    seed = derive_seed(42, 2, 5, 8)
    points = generate_lacunary(seed)
    assert points.bits_consumed == 2 * (8 + 5 - 1) == 24
    assert points.kind == "lacunary"


def test_lacunary_insufficient_bits():
    seed = derive_seed(42, 1, 3, 4)
    with pytest.raises(ValueError, match="bits"):
        generate_lacunary(seed, n_points=10, precision=4)


def test_shift_property_random_seeds():
    # floor(x[n+1] * 2^(H-1)) == floor(frac(2 x[n]) * 2^(H-1))
    for master in range(25):
        points = generate_lacunary(derive_seed(master, 3, 20, 16))
        h = points.precision
        nums = points.numerators
        doubled = (nums[:-1] << 1) & ((1 << h) - 1)
        assert np.array_equal(nums[1:] >> 1, doubled >> 1)


def test_iid_bit_accounting():
    points = generate_iid(9, 3, 100, 32)
    assert points.bits_consumed == 9600
    single = generate_iid(9, 1, 1, 1)
    assert single.bits_consumed == 1
    assert single.fraction(0, 0) in (Fraction(0), Fraction(1, 2))


def test_iid_determinism():
    a = generate_iid(77, 2, 50, 16)
    b = generate_iid(77, 2, 50, 16)
    assert np.array_equal(a.numerators, b.numerators)


def test_marginal_uniformity_over_seeds():
    # every bit of every generated coordinate is 1 with frequency 0.5 +- 0.02
    n_seeds = 10_000
    h, n, d = 8, 2, 2
    ones = np.zeros((n, d, h), dtype=np.int64)
    for master in range(n_seeds):
        points = generate_lacunary(derive_seed(master, d, n, h))
        for row in range(n):
            for col in range(d):
                num = int(points.numerators[row, col])
                for b in range(h):
                    ones[row, col, b] += (num >> (h - 1 - b)) & 1
    freq = ones / n_seeds
    assert np.all(np.abs(freq - 0.5) <= 0.02)


def test_point_set_invariant_checks():
    nums = np.array([[3, 1]], dtype=np.int64)
    with pytest.raises(ValueError, match="bits_consumed"):
        PointSet(d=2, n=1, precision=2, numerators=nums, kind="lacunary",
                 bits_consumed=1)
    with pytest.raises(ValueError, match="range"):
        PointSet(d=2, n=1, precision=1, numerators=nums)


def test_from_fractions_infers_precision():
    points = from_fractions([(Fraction(1, 2), Fraction(3, 8))])
    assert points.precision == 3
    assert points.fraction(0, 1) == Fraction(3, 8)
    with pytest.raises(ValueError, match="dyadic"):
        from_fractions([(Fraction(1, 3),)])


def test_dyadic_decimal_exact():
    assert dyadic_decimal(0, 4) == "0"
    assert dyadic_decimal(6, 4) == "0.375"
    assert dyadic_decimal(13, 4) == "0.8125"
    assert dyadic_decimal(1, 10) == "0.0009765625"


def test_csv_round_trip():
    points = generate_lacunary(derive_seed(5, 2, 6, 10))
    buf = io.StringIO()
    write_points_csv(points, buf)
    parsed = read_points_csv(buf.getvalue())
    assert parsed.d == points.d and parsed.n == points.n
    for n in range(points.n):
        assert parsed.point(n) == points.point(n)


def test_csv_bits_format():
    points = from_fractions([(Fraction(5, 8),)], precision=3)
    buf = io.StringIO()
    write_points_csv(points, buf, fmt="bits")
    assert buf.getvalue().splitlines()[1] == "1,101"
