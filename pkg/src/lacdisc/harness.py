"""Monte Carlo experiments: per-seed discrepancy against the probability bound.

Each trial derives its own 64-bit seed from (master_seed, trial_index),
generates a point set, measures or encloses its star discrepancy, and
compares against the high-probability bound.  Everything is a pure function
of the configuration, so reruns (at any worker count) are byte-identical.

Exceedance is tri-state: 'yes' when even the discrepancy lower bound beats
the stated bound, 'no' when the upper bound stays below it, and
'indeterminate' when the bound falls inside the enclosure; indeterminate
trials get one enclosure refinement at delta/4 before being reported.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from scipy.stats import beta as _beta_dist

from .bounds import theorem_bound
from .covers import build_base_cover
from .discrepancy import (
    DEFAULT_GRID_BUDGET,
    bracket_bounds,
    critical_grid_size,
    exact_star_discrepancy,
)
from .points import PointSet, derive_seed, generate_iid, generate_lacunary
from .rng import trial_seed

__all__ = [
    "TrialRecord",
    "ExperimentConfig",
    "ExceedanceEstimate",
    "ScalingRow",
    "BitCostReport",
    "InfeasibleInstanceError",
    "run_trials",
    "exceedance_ci",
    "scaling_study",
    "bitcost_report",
    "records_to_csv",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("trial", "seed", "d", "N", "H", "method",
               "dstar_lower", "dstar_upper", "bound_stated", "bound_detailed",
               "exceeded")

MIN_DELTA_EXP = 4  # enclosure parameter is capped at 2^-4


class InfeasibleInstanceError(RuntimeError):
    """No usable discrepancy method for this (N, d) configuration."""


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    d: int
    n: int
    precision: int
    method: str  # 'exact' | 'brackets'
    dstar_lower: Fraction
    dstar_upper: Fraction
    bound_stated: float
    bound_detailed: float
    exceeded: str  # 'yes' | 'no' | 'indeterminate'

    def __post_init__(self) -> None:
        if self.dstar_lower > self.dstar_upper:
            raise ValueError("dstar_lower > dstar_upper")
        if self.exceeded not in ("yes", "no", "indeterminate"):
            raise ValueError(f"bad exceeded value {self.exceeded!r}")

    def csv_row(self) -> str:
        cells = (self.trial, self.seed, self.d, self.n, self.precision,
                 self.method, self.dstar_lower, self.dstar_upper,
                 repr(self.bound_stated), repr(self.bound_detailed),
                 self.exceeded)
        return ",".join(str(c) for c in cells)


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    n: int | None = None
    n_grid: tuple[int, ...] = ()
    epsilon: float = 0.1
    trials: int = 10
    precision: int = 32
    master_seed: int = 0
    method: str = "auto"  # 'exact' | 'brackets' | 'auto'
    delta: Fraction | None = None
    kind: str = "lacunary"  # 'lacunary' | 'iid'
    grid_budget: int = DEFAULT_GRID_BUDGET
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("need trials >= 1")
        if self.method not in ("exact", "brackets", "auto"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.kind not in ("lacunary", "iid"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.delta is not None:
            delta = Fraction(self.delta)
            if delta <= 0 or (delta.numerator != 1 or
                              delta.denominator & (delta.denominator - 1)):
                raise ValueError(f"delta must be a dyadic unit fraction, got {delta}")
        if self.n is None and not self.n_grid:
            raise ValueError("need n or n_grid")


def _default_delta(bound_stated: float) -> Fraction:
    """Largest power of two at most bound_stated/10, capped at 2^-4."""
    target = bound_stated / 10.0
    exp = MIN_DELTA_EXP
    if target < 2.0 ** (-MIN_DELTA_EXP):
        exp = -math.floor(math.log2(target))
        if 2.0 ** (-exp) > target:  # guard against log2 rounding
            exp += 1
    return Fraction(1, 1 << exp)


def _generate(config: ExperimentConfig, n: int, seed: int) -> PointSet:
    if config.kind == "iid":
        return generate_iid(seed, config.d, n, config.precision)
    bits = derive_seed(seed, config.d, n, config.precision)
    return generate_lacunary(bits)


def _run_one(config: ExperimentConfig, n: int, index: int) -> TrialRecord:
    seed = trial_seed(config.master_seed, index)
    points = _generate(config, n, seed)
    stated = theorem_bound(config.d, n, config.epsilon, "stated")
    detailed = theorem_bound(config.d, n, config.epsilon, "detailed")
    bound = Fraction(stated.value)

    method = config.method
    if method == "auto":
        method = "exact" if critical_grid_size(points) <= config.grid_budget else "brackets"

    if method == "exact":
        value = exact_star_discrepancy(points, config.grid_budget)
        lower = upper = value
        exceeded = "yes" if value > bound else "no"
    else:
        delta = config.delta if config.delta is not None else _default_delta(stated.value)
        enclosure = bracket_bounds(points, build_base_cover(config.d, delta))
        if enclosure.lower <= bound < enclosure.upper:
            # one refinement pass before reporting an indeterminate outcome
            enclosure = bracket_bounds(points, build_base_cover(config.d, delta / 4))
        lower, upper = enclosure.lower, enclosure.upper
        if lower > bound:
            exceeded = "yes"
        elif upper <= bound:
            exceeded = "no"
        else:
            exceeded = "indeterminate"

    return TrialRecord(
        trial=index, seed=seed, d=config.d, n=n, precision=config.precision,
        method=method, dstar_lower=lower, dstar_upper=upper,
        bound_stated=stated.value, bound_detailed=detailed.value,
        exceeded=exceeded,
    )


def _run_one_packed(args: tuple[ExperimentConfig, int, int]) -> TrialRecord:
    return _run_one(*args)


def run_trials(config: ExperimentConfig, n: int | None = None) -> list[TrialRecord]:
    """Run all trials of a configuration; deterministic given the config.

    Trials are pure functions of (config, trial index), so any worker count
    produces identical records; results are ordered by trial index.
    """
    if n is None:
        if config.n is None:
            raise ValueError("config has no point count")
        n = config.n
    if config.d < 2:
        raise InfeasibleInstanceError("the probability bound needs d >= 2")
    jobs = [(config, n, t) for t in range(config.trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_run_one_packed, jobs, chunksize=8))
    else:
        records = [_run_one_packed(job) for job in jobs]
    records.sort(key=lambda r: r.trial)
    return records


@dataclass(frozen=True)
class ExceedanceEstimate:
    """Exceedance frequency with an exact (Clopper-Pearson) 95% interval."""

    exceed_count: int
    total: int
    indeterminate: int
    estimate: float
    lower95: float
    upper95: float


def clopper_pearson(k: int, n: int, alpha: float = 0.05) -> tuple[float, float]:
    """Exact two-sided binomial interval for k successes in n trials."""
    if not 0 <= k <= n or n < 1:
        raise ValueError(f"need 0 <= k <= n, n >= 1; got k={k}, n={n}")
    lower = 0.0 if k == 0 else float(_beta_dist.ppf(alpha / 2, k, n - k + 1))
    upper = 1.0 if k == n else float(_beta_dist.ppf(1 - alpha / 2, k + 1, n - k))
    return lower, upper


def exceedance_ci(records: Sequence[TrialRecord], alpha: float = 0.05) -> ExceedanceEstimate:
    """Estimate P(D* exceeds the stated bound) from trial records.

    The binomial counts 'yes' outcomes over all trials; indeterminate trials
    (bound inside the enclosure after refinement) are reported separately so
    callers can see when the enclosure was too coarse to decide.
    """
    if not records:
        raise ValueError("no records")
    k = sum(r.exceeded == "yes" for r in records)
    indet = sum(r.exceeded == "indeterminate" for r in records)
    n = len(records)
    lower, upper = clopper_pearson(k, n, alpha)
    return ExceedanceEstimate(exceed_count=k, total=n, indeterminate=indet,
                              estimate=k / n, lower95=lower, upper95=upper)


@dataclass(frozen=True)
class ScalingRow:
    n: int
    trials: int
    median_normalized: float
    max_normalized: float
    median_dstar_upper: float


def scaling_study(config: ExperimentConfig) -> tuple[list[ScalingRow], bool]:
    """Normalized statistics D* * sqrt(N / (d log2 d)) across an N grid.

    Returns the per-N rows and a drift flag: True when the normalized median
    at the largest N exceeds the one at the smallest N by more than 25%
    (an empirical stability alarm, not a theoretical claim).  The enclosure
    upper bound stands in for D* when the bracket method is used.
    """
    if not config.n_grid:
        raise ValueError("scaling_study needs config.n_grid")
    rows = []
    norm_factor = config.d * math.log2(config.d)
    for n in config.n_grid:
        records = run_trials(config, n=n)
        normalized = sorted(float(r.dstar_upper) * math.sqrt(n / norm_factor)
                            for r in records)
        uppers = sorted(float(r.dstar_upper) for r in records)
        mid = len(normalized) // 2
        median = (normalized[mid] if len(normalized) % 2
                  else (normalized[mid - 1] + normalized[mid]) / 2)
        med_up = (uppers[mid] if len(uppers) % 2
                  else (uppers[mid - 1] + uppers[mid]) / 2)
        rows.append(ScalingRow(n=n, trials=config.trials,
                               median_normalized=median,
                               max_normalized=normalized[-1],
                               median_dstar_upper=med_up))
    drift = len(rows) > 1 and rows[-1].median_normalized > 1.25 * rows[0].median_normalized
    return rows, drift


@dataclass(frozen=True)
class BitCostReport:
    """Exact random-bit budgets: shift construction vs i.i.d. baseline."""

    d: int
    n: int
    precision: int
    shift_bits: int
    iid_bits: int

    @property
    def ratio(self) -> float:
        return self.iid_bits / self.shift_bits


def bitcost_report(d: int, n_points: int, precision: int) -> BitCostReport:
    """d*(H+N-1) bits for the shift set vs d*H*N for i.i.d. points."""
    if d < 1 or n_points < 1 or precision < 1:
        raise ValueError("need positive d, n_points, precision")
    return BitCostReport(d=d, n=n_points, precision=precision,
                         shift_bits=d * (precision + n_points - 1),
                         iid_bits=d * precision * n_points)


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    """Serialize records with the fixed column set, byte-deterministic.

    Discrepancy bounds are written as exact fractions 'p/q'; float bounds
    use repr, which round-trips.
    """
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for record in records:
        out.write(record.csv_row() + "\n")
    return out.getvalue()
