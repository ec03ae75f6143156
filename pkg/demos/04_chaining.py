"""The chaining decomposition behind the probability bound.

A target box [0, y) is approximated by nested dyadic corners
0 = beta_0 <= ... <= beta_H <= y <= beta_{H+1}; the difference layers
K_h = [0, beta_{h+1}) \\ [0, beta_h) are disjoint, sandwich the box, and
have volume <= 2^-h.  The depth H grows like log2(N / (d log2 d)) / 2.
"""

from fractions import Fraction

from lacdisc import build_chain, chaining_depth

for n in (1024, 65536):
    print(f"chaining depth at d=2, N={n}: H = {chaining_depth(n, 2)}")

y = (Fraction(3, 10), Fraction(7, 10))
chain = build_chain(y, d=2, n_points=1024)
chain.validate()
print(f"\nchain of y = (0.3, 0.7) at d=2, N=1024 (depth {chain.depth}):")
for h, beta in enumerate(chain.betas):
    label = f"beta_{h}" if h <= chain.depth else f"beta_{chain.depth}+1"
    print(f"  {label:>8} = ({', '.join(str(b) for b in beta)})")
print("layer volumes vs their ceilings:")
for h in range(chain.depth + 1):
    vol = chain.layer_volume(h)
    print(f"  vol(K_{h}) = {str(vol):>10} <= 2^-{h} : {vol <= Fraction(1, 1 << h)}")
