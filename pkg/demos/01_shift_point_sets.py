"""Shift point sets: N points from d*(H+N-1) random bits.

Each coordinate row draws one bit string; point n reads the H-bit window
starting at bit n, so point n+1 is the doubling map frac(2*x) applied to
point n (truncated to H bits).  An i.i.d. set needs d*H*N fresh bits.
"""

from lacdisc import bitcost_report, derive_seed, generate_iid, generate_lacunary

d, n, h = 2, 8, 16
seed = derive_seed(master_seed=42, d=d, n_points=n, precision=h)
print(f"seed rows: {seed.rows.shape[0]} x {seed.rows.shape[1]} bits "
      f"(d * (H + N - 1) = {seed.total_bits} total)")

points = generate_lacunary(seed)
print(f"\nfirst coordinates of the orbit (H = {h} bits):")
for i in range(4):
    x = points.fraction(i, 0)
    print(f"  x_{i + 1} = {str(x):>12}  = {float(x):.6f}")

# one-bit shift structure: the leading H-1 bits of x_{n+1} are bits 2..H of x_n
b = points.numerators
print("\nshift check: x_{n+1} >> 1 == (2 x_n mod 1) >> 1 for all n:",
      bool(((b[1:, :] >> 1) == (((b[:-1, :] << 1) & ((1 << h) - 1)) >> 1)).all()))

baseline = generate_iid(master_seed=42, d=d, n_points=n, precision=h)
print(f"\nbit budgets: shift {points.bits_consumed}, i.i.d. {baseline.bits_consumed}")

report = bitcost_report(3, 100, 32)
print(f"at d=3, N=100, H=32: {report.shift_bits} vs {report.iid_bits} bits "
      f"({report.ratio:.1f}x saving)")
