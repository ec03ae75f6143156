"""Exact star discrepancy via the critical grid.

D*_N is the sup over anchored boxes [0,y) of |points inside / N - volume|.
The sup is attained on the grid of coordinate values (plus 1 per axis for
the under side), and all arithmetic is rational, so the result is exact.
"""

from fractions import Fraction

from lacdisc import (
    box_count,
    critical_grid_size,
    derive_seed,
    exact_star_discrepancy,
    from_fractions,
    generate_lacunary,
    local_discrepancy,
    star_discrepancy_1d,
)

# a two-point toy set: counts and local discrepancies by hand
toy = from_fractions([(Fraction(1, 2), Fraction(1, 2)),
                      (Fraction(1, 4), Fraction(3, 4))])
corner = (Fraction(1, 2), Fraction(3, 4))
print("toy set {(1/2,1/2), (1/4,3/4)} at corner (1/2, 3/4):")
print("  strict count", box_count(toy, corner, "strict"),
      " closed count", box_count(toy, corner, "closed"))
ld = local_discrepancy(toy, corner)
print(f"  under = {ld.under}, over = {ld.over}")
print("  D* =", exact_star_discrepancy(toy), "(attained by the closed side here)")

# a shift set, exact value as a fraction
points = generate_lacunary(derive_seed(7, 2, 64, 16))
value = exact_star_discrepancy(points)
print(f"\nshift set d=2, N=64, H=16: critical grid {critical_grid_size(points)} nodes")
print(f"  D* = {value} = {float(value):.8f}")

# d=1 has an O(N log N) sorted-order formula; it agrees exactly
line = generate_lacunary(derive_seed(7, 1, 50, 16))
assert star_discrepancy_1d(line) == exact_star_discrepancy(line)
print(f"\nd=1, N=50: sorted formula agrees exactly, D* = {float(star_discrepancy_1d(line)):.6f}")
