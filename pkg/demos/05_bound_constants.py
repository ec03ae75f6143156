"""The probability bound and the audit of its constants.

With probability at least 1 - eps the shift set satisfies
D*_N <= (87 - 7/d log eps) sqrt(d log2 d / N); a sharper constant pair
(86.357, 6.081) comes out of the same summation.  The bound is vacuous
(> 1) until N is large, and honesty about that is part of the API.
"""

from lacdisc import (
    bernstein_tail,
    constants,
    constants_audit,
    hnww_bound,
    layer_tail_bound,
    theorem_bound,
    union_budget,
)

print("bound values at d=2, eps=0.1:")
for n in (2 ** 10, 2 ** 14, 2 ** 16, 2 ** 20):
    stated = theorem_bound(2, n, 0.1)
    detailed = theorem_bound(2, n, 0.1, "detailed")
    flag = " (vacuous)" if stated.vacuous else ""
    print(f"  N = 2^{n.bit_length() - 1:>2}: stated {stated.value:.5f}, "
          f"detailed {detailed.value:.5f}{flag}")
print(f"  i.i.d. existence baseline at N=2^16: "
      f"{hnww_bound(2, 2 ** 16, c_abs=1.0):.5f} (unknown constant)")

params = constants(2, 0.1, h=1)
print(f"\ntail constants at (d=2, eps=0.1, h=1): c1={params.c1:.3f} "
      f"c2={params.c2:.3f} c3={params.c3:.4f} c4={params.c4:.4f}")
print(f"per-layer failure bounds: h=0: {layer_tail_bound(0, 2, 2**16, 0.1):.3e}, "
      f"h=1: {layer_tail_bound(1, 2, 2**16, 0.1):.3e}")
print(f"maximal Bernstein tail (N=1000, var=7/64, t=30): "
      f"{bernstein_tail(1000, 7 / 64, 30.0):.4f}")

budget = union_budget(2, 2 ** 20, 0.1)
print(f"\nunion budget at d=2, N=2^20, eps=0.1 (depth {budget.depth}):")
for h, (term, cap) in enumerate(zip(budget.layer_terms, budget.layer_budgets)):
    print(f"  layer {h}: {term:.3e} <= {cap:.3e}")
print(f"  total {budget.total:.4f} <= 0.1 -> {'PASS' if budget.passed else 'FAIL'}")

print("\nfull constants audit:")
print(constants_audit().summary())
