"""Bracketing covers: enclosing D* without the critical grid.

A delta-bracketing cover sandwiches every point of the cube between corner
pairs whose bracket has volume <= delta.  Scanning the cover gives
lower <= D* <= upper with gap <= delta, at a cost independent of N's
critical-grid size.  Dyadic snapping coarsens a 2^-(h+2) cover into a 2^-h
cover whose corners all sit on explicit dyadic grids.
"""

from fractions import Fraction

from lacdisc import (
    bracket_bounds,
    build_base_cover,
    cover_cardinality_bound,
    derive_seed,
    dyadic_snap,
    exact_star_discrepancy,
    generate_lacunary,
    probe_cover,
)

points = generate_lacunary(derive_seed(3, 2, 64, 16))
exact = exact_star_discrepancy(points)
print(f"exact D* = {float(exact):.6f}")
for delta in (Fraction(1, 16), Fraction(1, 64)):
    cover = build_base_cover(2, delta)
    enclosure = bracket_bounds(points, cover)
    print(f"  delta={str(delta):>5}: cover {cover.cardinality:>6} brackets, "
          f"[{float(enclosure.lower):.6f}, {float(enclosure.upper):.6f}] "
          f"gap {float(enclosure.gap):.6f}")
    assert enclosure.lower <= exact <= enclosure.upper

# dyadic snapping: floor lower corners to 2^-(h+1+ceil(log2 d)), ceil upper
# corners to 2^-(h+2+ceil(log2 d)); a 2^-(h+2) cover becomes a 2^-h cover
h = 2
snapped = dyadic_snap(build_base_cover(2, Fraction(1, 1 << (h + 2))), h)
bracket = snapped.find_bracket((Fraction(3, 10), Fraction(3, 10)))
print(f"\nsnapped cover at level h={h}: corner denominator {snapped.corner_denominator}")
print(f"  bracket of (0.3, 0.3): lower {tuple(map(str, bracket.lower))}, "
      f"upper {tuple(map(str, bracket.upper))}, weight {bracket.weight}")

covered, max_weight = probe_cover(snapped, 100_000, master_seed=1)
print(f"  probe 1e5 points: all covered = {covered}, max weight {max_weight} "
      f"<= 2^-{h} = {max_weight <= Fraction(1, 1 << h)}")
print(f"  analytic cardinality bound for delta=2^-{h}: "
      f"{cover_cardinality_bound(2, Fraction(1, 1 << h)):.1f} "
      f"(grid construction uses {snapped.cardinality})")
