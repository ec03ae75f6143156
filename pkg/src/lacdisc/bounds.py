"""The probabilistic discrepancy bound and every constant behind it.

The headline statement: for the d-dimensional binary-shift point set from a
uniform random seed, with probability at least 1 - eps,

    D*_N  <=  (87 - 7/d * log(eps)) * sqrt(d * log2(d) / N).

This module evaluates that bound (and the sharper constant pair 86.357 /
6.081 from the underlying summation), plus all supporting machinery: the
chaining depth H, the modulo-class partition that restores independence, the
maximal Bernstein tail, per-layer tail bounds, the union-bound budget, and a
numeric audit of every closed-form constant.  ``log`` with no base is the
natural logarithm throughout; base-2 logs are always written log2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ceil_log2",
    "chaining_depth",
    "kappa",
    "modulo_classes",
    "bernstein_tail",
    "constants",
    "derived_tail_constants",
    "layer_thresholds",
    "layer_tail_bound",
    "union_budget",
    "theorem_bound",
    "hnww_bound",
    "constants_audit",
    "BoundParams",
    "ModuloClassPartition",
    "BudgetReport",
    "TheoremBound",
    "AuditCheck",
    "AuditReport",
    "ChainInfeasibleError",
]

# Stated bound: (87 - 7/d log eps) sqrt(d log2 d / N).
STATED_MAIN = 87.0
STATED_EPS_COEFF = 7.0
# Detailed bound recovered from the final summation: 9.864 + 15.465 * sum_h
# sqrt(h 2^-h) <= 82.357 plus 4 for the outermost layer's volume defect.
DETAILED_MAIN = 86.357
DETAILED_EPS_COEFF = 6.081

# Per-layer tail constants (natural-log closed forms).
C3_BASE = 6.31  # deep layers, h >= 1
C4_BASE = 4.46  # base layer, h = 0
C1_BASE, C1_EPS_COEFF = 15.465, 1.155
C2_BASE, C2_EPS_COEFF = 9.864, 2.0 / 3.0


class ChainInfeasibleError(ValueError):
    """Chaining depth < 1: N too small relative to d*log2(d)."""


def ceil_log2(n: int) -> int:
    """Smallest k with 2**k >= n, for n >= 1."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return (n - 1).bit_length()


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0,1), got {epsilon}")


def _check_dimension(d: int) -> None:
    if d < 2:
        raise ValueError(f"need d >= 2 (d*log2(d) degenerates at d=1), got {d}")


def chaining_depth(n_points: int, d: int) -> int:
    """Chaining depth H = ceil(log2(N)/2 - log2(d*log2(d))/2 - 2).

    May be <= 0 for small N; callers that need a chain must reject that.  For
    H >= 0 the returned depth is checked to satisfy the defining property
    sqrt(d*log2(d)*N) <= 2**-h * N for every h in {0,...,H}.
    """
    _check_dimension(d)
    if n_points < 1:
        raise ValueError(f"need n_points >= 1, got {n_points}")
    depth = math.ceil(math.log2(n_points) / 2 - math.log2(d * math.log2(d)) / 2 - 2)
    if depth >= 0:
        lhs = math.sqrt(d * math.log2(d)) * math.sqrt(n_points)
        for h in range(depth + 1):
            if lhs > n_points / (1 << h):
                raise AssertionError(
                    f"chaining depth property violated at h={h} (N={n_points}, d={d})"
                )
    return depth


def kappa(h: int, d: int) -> int:
    """Modulo-class exponent ceil(log2(h + 2 + ceil(log2 d))), exact."""
    if h < 0 or d < 1:
        raise ValueError(f"need h >= 0 and d >= 1, got h={h}, d={d}")
    return ceil_log2(h + 2 + ceil_log2(d))


@dataclass(frozen=True)
class ModuloClassPartition:
    """The 2**kappa residue classes of {1,...,N} modulo 2**kappa."""

    n: int
    kappa: int
    classes: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        total = sum(len(c) for c in self.classes)
        if total != self.n or len(self.classes) != 1 << self.kappa:
            raise ValueError("classes do not partition {1,...,N}")

    @property
    def max_class_size(self) -> int:
        return max(len(c) for c in self.classes)


def modulo_classes(n_points: int, kappa_exp: int) -> ModuloClassPartition:
    """Split {1,...,N} by residue mod 2**kappa_exp.

    Within a class, consecutive indices differ by exactly 2**kappa_exp, which
    is the index gap that makes the shift-set layer indicators independent.
    """
    if n_points < 1 or kappa_exp < 0:
        raise ValueError(f"need n_points >= 1 and kappa_exp >= 0")
    size = 1 << kappa_exp
    classes = tuple(
        tuple(range(gamma, n_points + 1, size)) for gamma in range(1, size + 1)
    )
    return ModuloClassPartition(n=n_points, kappa=kappa_exp, classes=classes)


def bernstein_tail(n_points: int, sigma2: float, t: float) -> float:
    """Maximal Bernstein tail 2*exp(-t^2 / (2*N*sigma^2 + 2t/3)).

    Bounds P(max_M |sum_{n<=M} Z_n| > t) for i.i.d. centered Z with variance
    sigma^2 and |Z| <= 1.  sigma2 is a free parameter so callers can plug in
    either the true variance or any upper bound for it.
    """
    if n_points < 1:
        raise ValueError(f"need n_points >= 1, got {n_points}")
    if sigma2 <= 0 or t <= 0:
        raise ValueError("sigma2 and t must be positive")
    return 2.0 * math.exp(-t * t / (2.0 * n_points * sigma2 + 2.0 * t / 3.0))


@dataclass(frozen=True)
class BoundParams:
    """The four tail constants for one (d, epsilon, h) configuration.

    c1/c2 feed the Bernstein thresholds; c3/c4 are the per-layer exponent
    rates.  When populated via :func:`derived_tail_constants` the identities
    c3 = c1^2/(4 + 2/sqrt(3)*c1) - 1 and c4 = c2^2/(4 + 2/3*c2) - 1 hold
    exactly; the closed-form values returned by :func:`constants` satisfy
    them with slack instead (the derived rates strictly dominate).
    """

    d: int
    epsilon: float
    h: int
    c1: float
    c2: float
    c3: float
    c4: float
    thresholds: tuple[float, ...] | None = None

    def eq4_residuals(self) -> tuple[float, float]:
        """Signed slack of the derived rates over the stored c3/c4."""
        c3_derived, c4_derived = derived_tail_constants(self.c1, self.c2)
        return c3_derived - self.c3, c4_derived - self.c4


def derived_tail_constants(c1: float, c2: float) -> tuple[float, float]:
    """Exponent rates induced by Bernstein constants c1, c2."""
    c3 = c1 * c1 / (4.0 + 2.0 / math.sqrt(3.0) * c1) - 1.0
    c4 = c2 * c2 / (4.0 + 2.0 / 3.0 * c2) - 1.0
    return c3, c4


def constants(d: int, epsilon: float, h: int) -> BoundParams:
    """Closed-form tail constants for dimension d, failure budget epsilon.

    c4 = 4.46 - log(eps)/d          (base layer)
    c3 = 6.31 - log(eps)/(d*h)      (deep layer h >= 1)
    c1 = 15.465 - 1.155*log(eps)/d
    c2 = 9.864 - (2/3)*log(eps)/d
    """
    _check_dimension(d)
    _check_epsilon(epsilon)
    if h < 1:
        raise ValueError(f"need h >= 1, got {h}")
    log_eps = math.log(epsilon)
    return BoundParams(
        d=d,
        epsilon=epsilon,
        h=h,
        c1=C1_BASE - C1_EPS_COEFF * log_eps / d,
        c2=C2_BASE - C2_EPS_COEFF * log_eps / d,
        c3=C3_BASE - log_eps / (d * h),
        c4=C4_BASE - log_eps / d,
    )


def layer_thresholds(d: int, n_points: int, epsilon: float, depth: int) -> tuple[float, ...]:
    """Bernstein thresholds t_h for layers h = 0..depth.

    t_0 = c2 * sqrt(d*log2(d)*N); t_h = c1 * sqrt(d*log2(d)*N) * sqrt(h*2^-h).
    """
    _check_dimension(d)
    _check_epsilon(epsilon)
    if depth < 1:
        raise ChainInfeasibleError(f"depth {depth} < 1")
    params = constants(d, epsilon, 1)
    scale = math.sqrt(d * math.log2(d)) * math.sqrt(n_points)
    out = [params.c2 * scale]
    for h in range(1, depth + 1):
        out.append(params.c1 * scale * math.sqrt(h * 2.0 ** (-h)))
    return tuple(out)


def layer_tail_bound(h: int, d: int, n_points: int, epsilon: float) -> float:
    """Per-layer failure bound: 2*exp(-c4*d) at h=0, 2*exp(-c3*d*h) at h>=1."""
    if h < 0:
        raise ValueError(f"need h >= 0, got {h}")
    if h == 0:
        params = constants(d, epsilon, 1)
        return 2.0 * math.exp(-params.c4 * d)
    params = constants(d, epsilon, h)
    return 2.0 * math.exp(-params.c3 * d * h)


def _cover_count_factor(d: int, h: int) -> float:
    """Cardinality majorant (2e)^d * sqrt(5)^((h+3)d) / 2 of the level-h cover."""
    return 0.5 * (2.0 * math.e) ** d * math.sqrt(5.0) ** ((h + 3) * d)


@dataclass(frozen=True)
class BudgetReport:
    """Union-bound ledger: per-layer terms against the failure budget epsilon.

    ``layer_terms[h]`` is the level-h cover cardinality majorant times the
    layer tail bound.  The budget passes when the base-layer term is at most
    eps/2, the level-h term at most eps/2^(h+1), and the total at most eps.
    """

    d: int
    n: int
    epsilon: float
    depth: int
    feasible: bool
    layer_terms: tuple[float, ...] = ()
    layer_budgets: tuple[float, ...] = ()
    majorization_ok: bool = True

    @property
    def total(self) -> float:
        return sum(self.layer_terms)

    @property
    def layer_ok(self) -> tuple[bool, ...]:
        return tuple(t <= b for t, b in zip(self.layer_terms, self.layer_budgets))

    @property
    def passed(self) -> bool:
        return (
            self.feasible
            and self.majorization_ok
            and all(self.layer_ok)
            and self.total <= self.epsilon
        )


def _majorization_holds(h_max: int = 60) -> bool:
    # (2^(h+3) + 1)^2 <= 5^(h+3), checked in exact integers.
    return all(
        ((1 << (h + 3)) + 1) ** 2 <= 5 ** (h + 3) for h in range(h_max + 1)
    )


def union_budget(d: int, n_points: int, epsilon: float) -> BudgetReport:
    """Evaluate the union bound over all chaining layers for (d, N, epsilon).

    Returns a chain-infeasible report (rather than raising) when the chaining
    depth is < 1, so parameter sweeps over small N do not abort.
    """
    _check_dimension(d)
    _check_epsilon(epsilon)
    depth = chaining_depth(n_points, d)
    if depth < 1:
        return BudgetReport(d=d, n=n_points, epsilon=epsilon, depth=depth,
                            feasible=False)
    terms = []
    budgets = []
    for h in range(depth + 1):
        terms.append(_cover_count_factor(d, h) * layer_tail_bound(h, d, n_points, epsilon))
        budgets.append(epsilon / 2.0 if h == 0 else epsilon / (1 << (h + 1)))
    return BudgetReport(
        d=d,
        n=n_points,
        epsilon=epsilon,
        depth=depth,
        feasible=True,
        layer_terms=tuple(terms),
        layer_budgets=tuple(budgets),
        majorization_ok=_majorization_holds(),
    )


@dataclass(frozen=True)
class TheoremBound:
    """A probabilistic discrepancy bound value with an honest vacuity flag."""

    value: float
    vacuous: bool
    variant: str
    d: int
    n: int
    epsilon: float


def theorem_bound(d: int, n_points: int, epsilon: float,
                  variant: str = "stated") -> TheoremBound:
    """High-probability bound on D*_N of the shift point set.

    variant='stated':   (87 - 7/d * log eps) * sqrt(d*log2(d)/N)
    variant='detailed': (86.357 - 6.081/d * log eps) * sqrt(d*log2(d)/N)

    Values above 1 are vacuous (any point set satisfies them) and are
    returned as-is with ``vacuous=True``; the detailed variant never exceeds
    the stated one.
    """
    _check_dimension(d)
    _check_epsilon(epsilon)
    if n_points < 1:
        raise ValueError(f"need n_points >= 1, got {n_points}")
    if variant == "stated":
        main, coeff = STATED_MAIN, STATED_EPS_COEFF
    elif variant == "detailed":
        main, coeff = DETAILED_MAIN, DETAILED_EPS_COEFF
    else:
        raise ValueError(f"unknown variant {variant!r}")
    value = (main - coeff * math.log(epsilon) / d) * math.sqrt(
        d * math.log2(d) / n_points
    )
    return TheoremBound(value=value, vacuous=value > 1.0, variant=variant,
                        d=d, n=n_points, epsilon=epsilon)


def hnww_bound(d: int, n_points: int, c_abs: float) -> float:
    """Baseline existence bound sqrt(c_abs * d / N) for comparison reports."""
    if d < 1 or n_points < 1:
        raise ValueError("need d >= 1 and n_points >= 1")
    if c_abs <= 0:
        raise ValueError(f"c_abs must be positive, got {c_abs}")
    return math.sqrt(c_abs * d / n_points)


@dataclass(frozen=True)
class AuditCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class AuditReport:
    checks: tuple[AuditCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def constants_audit(
    d_values: range | tuple[int, ...] = range(2, 65),
    h_values: range | tuple[int, ...] = range(1, 41),
    eps_values: tuple[float, ...] = (0.9, 0.5, 0.1, 1e-3, 1e-6),
) -> AuditReport:
    """Numerically audit every closed-form constant on a parameter grid.

    Failures are reported, not raised.  The checks:

    1. base-layer constant: 4.46 >= 1 + log 2 + 1.5 log 5 + log2(2)/d.
    2. deep-layer constant: (1 + 2 log 2 + 1.5 log 5) d + (log 5 / 2) d h
       + h log 2 - log eps <= (6.31 - log(eps)/(d h)) d h on the grid.
    3. tail sum: sum_h sqrt(h 2^-h) (~4.14) <= (82.357 - 9.864)/15.465, and
       82.357 + 4 = 86.357 ties the detailed bound together.
    4. constant slack: the rates derived from c1, c2 dominate the closed-form
       c3, c4 everywhere on the grid.
    5. cover growth majorization: 2^(h+3) + 1 <= 5^((h+3)/2) for h <= 60,
       verified in exact integer arithmetic.
    """
    checks: list[AuditCheck] = []
    log2_, log5 = math.log(2.0), math.log(5.0)

    # 1. base-layer closed form (epsilon cancels, so only d matters).
    base_rhs = [1.0 + log2_ + 1.5 * log5 + log2_ / d for d in d_values]
    worst = max(base_rhs)
    checks.append(AuditCheck(
        "base-layer-constant",
        all(r <= C4_BASE for r in base_rhs),
        f"max over d of 1+log2+1.5*log5+log2/d = {worst:.6f} <= {C4_BASE}",
    ))

    # 2. deep-layer closed form over the (d, h, eps) grid.
    ok = True
    worst_margin = math.inf
    for d in d_values:
        for h in h_values:
            for eps in eps_values:
                log_eps = math.log(eps)
                lhs = ((1.0 + 2.0 * log2_ + 1.5 * log5) * d
                       + 0.5 * log5 * d * h + log2_ * h - log_eps)
                rhs = (C3_BASE - log_eps / (d * h)) * d * h
                worst_margin = min(worst_margin, rhs - lhs)
                ok = ok and lhs <= rhs
    checks.append(AuditCheck(
        "deep-layer-constant",
        ok,
        f"min slack of the layer-rate inequality on the grid = {worst_margin:.6f}",
    ))

    # 3. geometric tail sum feeding the detailed constant.
    tail_sum = sum(math.sqrt(h * 2.0 ** (-h)) for h in range(1, 1001))
    tail_cap = (82.357 - C2_BASE) / C1_BASE
    checks.append(AuditCheck(
        "tail-sum",
        tail_sum <= tail_cap and abs(82.357 + 4.0 - DETAILED_MAIN) < 1e-12,
        f"sum sqrt(h*2^-h) = {tail_sum:.6f} <= {tail_cap:.6f}; "
        f"82.357 + 4 = {DETAILED_MAIN}",
    ))

    # 3b. epsilon coefficient of the detailed bound dominates its summation.
    eps_sum = C2_EPS_COEFF + C1_EPS_COEFF * tail_sum
    checks.append(AuditCheck(
        "tail-sum-eps-coefficient",
        eps_sum <= DETAILED_EPS_COEFF,
        f"2/3 + 1.155 * sum sqrt(h*2^-h) = {eps_sum:.6f} <= {DETAILED_EPS_COEFF}",
    ))

    # 4. derived tail rates dominate the closed forms, with slack.
    c3_base_derived, c4_base_derived = derived_tail_constants(C1_BASE, C2_BASE)
    ok = c3_base_derived >= C3_BASE and c4_base_derived >= C4_BASE
    worst_c3 = worst_c4 = math.inf
    for d in d_values:
        for eps in eps_values:
            for h in h_values:
                params = constants(d, eps, h)
                r3, r4 = params.eq4_residuals()
                worst_c3 = min(worst_c3, r3)
                worst_c4 = min(worst_c4, r4)
                ok = ok and r3 >= 0 and r4 >= 0
    checks.append(AuditCheck(
        "tail-constant-slack",
        ok,
        f"base slack: c1 gives {c3_base_derived:.4f} >= {C3_BASE}, "
        f"c2 gives {c4_base_derived:.4f} >= {C4_BASE}; "
        f"grid min slacks {worst_c3:.4f}, {worst_c4:.4f}",
    ))

    # 5. cover growth majorization, exact integers.
    checks.append(AuditCheck(
        "cover-growth-majorization",
        _majorization_holds(60),
        "(2^(h+3)+1)^2 <= 5^(h+3) for h in 0..60 (exact)",
    ))

    return AuditReport(checks=tuple(checks))
