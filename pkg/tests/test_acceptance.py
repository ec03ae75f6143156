"""Acceptance suite: one test per shipping criterion, each printing a
PASS/FAIL line with its headline numbers (run with -s to see them inline).
"""

import math
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from lacdisc.bounds import (
    bernstein_tail,
    ceil_log2,
    constants_audit,
    theorem_bound,
    union_budget,
)
from lacdisc.covers import build_base_cover, build_chain, dyadic_snap, probe_cover
from lacdisc.discrepancy import (
    bracket_bounds,
    exact_star_discrepancy,
    star_discrepancy_1d,
)
from lacdisc.harness import (
    ExperimentConfig,
    bitcost_report,
    exceedance_ci,
    run_trials,
)
from lacdisc.independence import (
    EnumerationGuardExceeded,
    LayerFunction,
    exact_joint,
    factorization_gap,
)
from lacdisc.points import derive_seed, generate_iid, generate_lacunary

from oracles import brute_force_star_discrepancy, max_partial_sum_tails


def _report(index: int, name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    suffix = f" [{detail}]" if detail else ""
    print(f"ACCEPTANCE {index} ({name}): {status}{suffix}")
    assert passed, f"criterion {index} ({name}) failed{suffix}"


def test_acceptance_01_discrepancy_oracle_equivalence():
    # 200 random instances, d in {1,2,3}, N <= 16, H = 8: the exact value
    # matches a dense-lattice brute force within d*2^-10 + 1e-12 and matches
    # the 1-d sorted formula exactly.  The d=3 lattice runs at 2^-8: with
    # 8-bit coordinates every strict/closed count is constant on 2^-8-aligned
    # runs of the finer lattice, and each run's extreme-volume node is a
    # 2^-8 node, so the 2^-10 lattice maximum equals the 2^-8 one exactly.
    rng = np.random.default_rng(101)
    plan = [(1, 100), (2, 60), (3, 40)]
    checked = 0
    worst = 0.0
    for d, count in plan:
        resolution = 10 if d <= 2 else 8
        for _ in range(count):
            n = int(rng.integers(1, 17))
            master = int(rng.integers(0, 2 ** 48))
            if rng.integers(0, 2):
                points = generate_iid(master, d, n, 8)
            else:
                points = generate_lacunary(derive_seed(master, d, n, 8))
            exact = exact_star_discrepancy(points)
            brute = brute_force_star_discrepancy(points, resolution)
            diff = abs(float(exact) - brute)
            worst = max(worst, diff)
            assert diff <= d * 2 ** -10 + 1e-12, (d, n, master, diff)
            if d == 1:
                assert star_discrepancy_1d(points) == exact, (n, master)
            checked += 1
    _report(1, "discrepancy oracle equivalence", checked == 200,
            f"200 instances, max |exact - lattice| = {worst:.2e}")


def test_acceptance_02_bracket_enclosure():
    deltas = (Fraction(1, 16), Fraction(1, 64))
    covers = {delta: build_base_cover(2, delta) for delta in deltas}
    checked = 0
    for master in range(50):
        points = generate_lacunary(derive_seed(master, 2, 64, 16))
        exact = exact_star_discrepancy(points)
        for delta in deltas:
            enclosure = bracket_bounds(points, covers[delta])
            assert enclosure.lower <= exact <= enclosure.upper, (master, delta)
            assert enclosure.gap <= delta, (master, delta)
            checked += 1
    _report(2, "bracket enclosure", checked == 100,
            "50 seeds x {1/16, 1/64}, enclosure and gap exact")


def test_acceptance_03_cover_validity():
    probes = 100_000
    combos = 0
    for d in range(1, 6):
        for h in range(1, 7):
            cover = dyadic_snap(build_base_cover(d, Fraction(1, 1 << (h + 2))), h)
            covered, max_weight = probe_cover(cover, probes, master_seed=31 * d + h)
            assert covered, (d, h)
            assert max_weight <= Fraction(1, 1 << h), (d, h, max_weight)
            g1 = 1 << (h + 1 + ceil_log2(d))
            g2 = 1 << (h + 2 + ceil_log2(d))
            assert cover.corner_denominator == g2
            rng = np.random.default_rng(d * 100 + h)
            for _ in range(200):
                y = [Fraction(int(v), 1 << 20) for v in rng.integers(0, 1 << 20, size=d)]
                bracket = cover.find_bracket(y)
                for v, w in zip(bracket.lower, bracket.upper):
                    a = v * g1
                    b = w * g2
                    assert a.denominator == 1 and 0 <= a <= g1, (d, h)
                    assert b.denominator == 1 and 0 <= b <= g2, (d, h)
            combos += 1
    _report(3, "cover validity", combos == 30,
            f"30 (d,h) combos x {probes} probes, weights <= 2^-h, corners on dyadic grids")


def test_acceptance_04_chaining_invariants():
    n_targets = 10_000
    rng = np.random.default_rng(404)
    built = 0
    for d in (2, 3):
        for _ in range(n_targets // 2):
            y = [Fraction(int(v), 1 << 20) for v in rng.integers(0, 1 << 20, size=d)]
            chain = build_chain(y, d, 1024)
            chain.validate()  # monotone, layer volumes <= 2^-h, dyadic corners
            built += 1
    _report(4, "chaining invariants", built == n_targets,
            f"{n_targets} random targets at d in {{2,3}}, N=1024, zero tolerance")


def _level_layers(d: int, h: int, count: int) -> list[LayerFunction]:
    cover = dyadic_snap(build_base_cover(d, Fraction(1, 1 << (h + 2))), h)
    total = cover.cardinality
    picks = {(k * total) // count + (k % 3) for k in range(count)}
    layers = []
    for i, bracket in enumerate(cover.iter_brackets()):
        if i in picks:
            layers.append(LayerFunction(lower=bracket.lower, upper=bracket.upper, level=h))
        if len(layers) == count:
            break
    return layers


def test_acceptance_05_exact_independence():
    configs = 0
    for d in (1, 2):
        big_l = ceil_log2(d)
        for h in (0, 1):
            min_gap = h + 2 + big_l
            layers = _level_layers(d, h, 2)
            n_prime = 1 + min_gap
            while True:
                try:
                    for layer in layers:
                        joint = exact_joint(layer, 1, n_prime)
                        assert factorization_gap(joint) == 0, (d, h, n_prime)
                        inside = 1 - layer.mean
                        assert joint.marginal_first.get(inside, Fraction(0)) == layer.mean
                except EnumerationGuardExceeded:
                    break
                configs += 1
                n_prime += 1
    # the gap-1 counterexample is dependent with defect exactly 1/16
    quarter = LayerFunction(lower=(Fraction(0),), upper=(Fraction(1, 4),), level=0)
    counter_gap = factorization_gap(exact_joint(quarter, 1, 2))
    assert counter_gap == Fraction(1, 16)
    _report(5, "exact independence", configs >= 40,
            f"{configs} admissible-gap configs all factor exactly; "
            f"gap-1 counterexample defect = {counter_gap}")


def test_acceptance_06_bernstein_empirical_validity():
    thresholds = np.arange(5, 55, 5, dtype=float)
    empirical = max_partial_sum_tails(1000, 1 / 8, thresholds, 100_000, seed=20240601)
    sigma2 = (1 / 8) * (7 / 8)
    margins = []
    for t, freq in zip(thresholds, empirical):
        bound = bernstein_tail(1000, sigma2, float(t))
        assert freq <= bound, (t, freq, bound)
        margins.append(bound - freq)
    _report(6, "maximal Bernstein empirical validity", True,
            f"1e5 runs of N=1000 Bernoulli(1/8): tail <= bound at all t, "
            f"min margin {min(margins):.2e}")


def test_acceptance_07_constants_audit():
    report = constants_audit()  # d in 2..64, h in 1..40, five epsilons
    assert report.passed, report.summary()
    grid_ok = True
    for d in (2, 3, 4, 8, 16, 32, 64):
        for eps in (0.9, 0.5, 0.1, 1e-3, 1e-6):
            budget = union_budget(d, 1 << 20, eps)
            grid_ok = grid_ok and budget.feasible and budget.passed
    base_term = union_budget(2, 1 << 20, 0.1).layer_terms[0]
    assert base_term == pytest.approx(0.0494, abs=2e-4)
    assert base_term <= 0.05
    tail_sum = sum(math.sqrt(h * 2.0 ** (-h)) for h in range(1, 1001))
    assert tail_sum <= (82.357 - 9.864) / 15.465
    _report(7, "constants audit", grid_ok,
            f"audit grid green; base-layer term {base_term:.4f} <= 0.05; "
            f"tail sum {tail_sum:.3f} <= 4.688")


def test_acceptance_08_nonvacuous_theorem_check():
    config = ExperimentConfig(d=2, n=65536, epsilon=0.1, trials=100,
                              precision=32, master_seed=2024,
                              method="brackets", delta=Fraction(1, 256))
    records = run_trials(config)
    stated = theorem_bound(2, 65536, 0.1).value
    assert stated == pytest.approx(0.52513, abs=1e-5)
    assert not theorem_bound(2, 65536, 0.1).vacuous
    estimate = exceedance_ci(records)
    max_upper = max(float(r.dstar_upper) for r in records)
    assert estimate.exceed_count == 0
    assert estimate.indeterminate == 0
    assert estimate.upper95 == pytest.approx(0.0362, abs=2e-4)
    assert estimate.upper95 <= 0.1
    assert max_upper < 0.05
    _report(8, "non-vacuous probability bound", True,
            f"bound {stated:.5f}; 0/100 exceedances, CP upper {estimate.upper95:.4f}"
            f" <= 0.1; max dstar_upper {max_upper:.4f} < 0.05")


def test_acceptance_09_bitcost_accounting():
    report = bitcost_report(3, 100, 32)
    assert report.shift_bits == 393
    assert report.iid_bits == 9600
    points = generate_lacunary(derive_seed(5, 3, 100, 32))
    assert points.bits_consumed == 393
    baseline = generate_iid(5, 3, 100, 32)
    assert baseline.bits_consumed == 9600
    _report(9, "bit-cost accounting", True, "d(H+N-1)=393 vs dHN=9600")


def test_acceptance_10_determinism(tmp_path):
    args = [sys.executable, "-m", "lacdisc.cli", "verify", "--d", "2",
            "--n", "1024", "--trials", "8", "--h-precision", "24",
            "--eps", "0.1", "--method", "brackets", "--delta", "1/32",
            "--seed", "99"]
    outputs = []
    for run, workers in enumerate((1, 2, 4)):
        path = tmp_path / f"run{run}.csv"
        proc = subprocess.run([*args, "--workers", str(workers),
                               "--out", str(path)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
    _report(10, "byte-identical determinism", True,
            "verify CSV identical across reruns at 1, 2, and 4 workers")
