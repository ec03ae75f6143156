"""Command-line interface.

Subcommands: generate, disc, cover, bound, audit, indep, verify.
Exit codes: 0 success, 1 usage error, 2 infeasible instance,
3 verification-gate failure (audit, verify --gate).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bounds as bounds_mod
from . import covers as covers_mod
from . import discrepancy as disc_mod
from . import harness as harness_mod
from . import independence as indep_mod
from . import points as points_mod

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_GATE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_fraction(text: str) -> Fraction:
    """Accept 'p/q', decimal strings, and '2^-k' notation."""
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return Fraction(int(base)) ** int(exp)
    return Fraction(text)


def _parse_n_grid(text: str) -> tuple[int, ...]:
    """'2^a..2^b' expands to all powers of two in between; else a comma list."""
    if ".." in text:
        lo, hi = text.split("..", 1)

        def as_exp(t: str) -> int:
            t = t.strip()
            if t.startswith("2^"):
                return int(t[2:])
            n = int(t)
            if n & (n - 1):
                raise ValueError(f"{t} is not a power of two")
            return n.bit_length() - 1

        a, b = as_exp(lo), as_exp(hi)
        if a > b:
            raise ValueError("empty grid")
        return tuple(1 << e for e in range(a, b + 1))
    return tuple(int(t) for t in text.split(","))


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        keys = sorted(payload)
        print(",".join(keys))
        print(",".join(str(payload[k]) for k in keys))


def _load_or_generate(args: argparse.Namespace) -> points_mod.PointSet:
    if args.input:
        with open(args.input) as fh:
            return points_mod.read_points_csv(fh)
    if args.d is None or args.n is None:
        raise ValueError("need --input or all of --d/--n (with --seed, --h-precision)")
    seed_bits = points_mod.derive_seed(args.seed, args.d, args.n, args.h_precision)
    return points_mod.generate_lacunary(seed_bits)


def _cmd_generate(args: argparse.Namespace) -> int:
    if args.kind == "iid":
        points = points_mod.generate_iid(args.seed, args.d, args.n, args.h_precision)
    else:
        points = points_mod.generate_lacunary(
            points_mod.derive_seed(args.seed, args.d, args.n, args.h_precision))
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        points_mod.write_points_csv(points, out, fmt=args.format)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def _cmd_disc(args: argparse.Namespace) -> int:
    points = _load_or_generate(args)
    method = args.method
    if method == "auto":
        grid = disc_mod.critical_grid_size(points)
        method = "exact" if grid <= disc_mod.DEFAULT_GRID_BUDGET else "brackets"
    payload: dict = {"n": points.n, "d": points.d, "method": method}
    if method == "exact":
        value = disc_mod.exact_star_discrepancy(points)
        payload["dstar"] = float(value)
        payload["dstar_exact"] = str(value)
    else:
        delta = parse_fraction(args.delta) if args.delta else Fraction(1, 16)
        enclosure = disc_mod.bracket_bounds(points, covers_mod.build_base_cover(points.d, delta))
        payload["lower"] = float(enclosure.lower)
        payload["upper"] = float(enclosure.upper)
        payload["delta"] = str(delta)
    _emit(payload, args.format)
    return EXIT_OK


def _cmd_cover(args: argparse.Namespace) -> int:
    if args.delta is not None:
        delta = parse_fraction(args.delta)
    elif args.h is not None:
        delta = Fraction(1, 1 << ((args.h + 2) if args.snap else args.h))
    else:
        raise ValueError("need --h or --delta")
    cover = covers_mod.build_base_cover(args.d, delta)
    if args.snap:
        if args.h is None:
            raise ValueError("--snap needs --h")
        cover = covers_mod.dyadic_snap(cover, args.h)
    covered, max_weight = covers_mod.probe_cover(cover, args.probe, args.seed)
    payload = {
        "d": cover.d,
        "delta": str(cover.delta),
        "cardinality": cover.cardinality,
        "cardinality_analytic_bound": covers_mod.cover_cardinality_bound(cover.d, cover.delta),
        "corner_denominator": cover.corner_denominator,
        "probes": args.probe,
        "all_probes_covered": covered,
        "max_probe_weight": str(max_weight),
        "max_probe_weight_float": float(max_weight),
    }
    _emit(payload, args.format)
    return EXIT_OK


def _cmd_bound(args: argparse.Namespace) -> int:
    if args.variant == "hnww":
        value = bounds_mod.hnww_bound(args.d, args.n, args.c_abs)
        payload = {"d": args.d, "N": args.n, "variant": "hnww",
                   "c_abs": args.c_abs, "bound": value, "vacuous": value > 1.0}
    else:
        result = bounds_mod.theorem_bound(args.d, args.n, args.eps, args.variant)
        payload = {"d": args.d, "N": args.n, "epsilon": args.eps,
                   "variant": result.variant, "bound": result.value,
                   "vacuous": result.vacuous}
    _emit(payload, "json")
    return EXIT_OK


def _cmd_audit(args: argparse.Namespace) -> int:
    report = bounds_mod.constants_audit()
    print(report.summary())
    all_ok = report.passed
    for d in (2, 3, 8, 16, 64):
        budget = bounds_mod.union_budget(d, args.n, args.eps)
        status = "PASS" if budget.passed else "FAIL"
        print(f"[{status}] union-budget d={d} N={args.n} eps={args.eps}: "
              f"total {budget.total:.3e} <= {args.eps} "
              f"(depth {budget.depth})")
        all_ok = all_ok and budget.passed
    print(f"audit: {'PASS' if all_ok else 'FAIL'}")
    return EXIT_OK if all_ok else EXIT_GATE


def _cmd_indep(args: argparse.Namespace) -> int:
    lo_txt, hi_txt = args.box.split(":", 1)
    lower = tuple(parse_fraction(t) for t in lo_txt.split(","))
    upper = tuple(parse_fraction(t) for t in hi_txt.split(","))
    if len(lower) != args.d or len(upper) != args.d:
        raise ValueError(f"box corners must have {args.d} coordinates")
    layer = indep_mod.LayerFunction(lower=lower, upper=upper, level=args.h)
    joint = indep_mod.exact_joint(layer, args.n, args.n_prime)
    gap = indep_mod.factorization_gap(joint)
    payload = {
        "d": args.d, "h": args.h, "n": args.n, "n_prime": args.n_prime,
        "volume": str(layer.mean),
        "cell_resolution": str(joint.cell_resolution),
        "joint": {f"{c1}|{c2}": str(p) for (c1, c2), p in sorted(joint.probabilities.items())},
        "marginal_n": {str(c): str(p) for c, p in sorted(joint.marginal_first.items())},
        "marginal_n_prime": {str(c): str(p) for c, p in sorted(joint.marginal_second.items())},
        "factorization_gap": str(gap),
        "independent": gap == 0,
    }
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    config = harness_mod.ExperimentConfig(
        d=args.d,
        n=args.n,
        n_grid=_parse_n_grid(args.n_grid) if args.n_grid else (),
        epsilon=args.eps,
        trials=args.trials,
        precision=args.h_precision,
        master_seed=args.seed,
        method=args.method,
        delta=parse_fraction(args.delta) if args.delta else None,
        workers=args.workers,
    )
    if config.n_grid:
        rows, drift = harness_mod.scaling_study(config)
        lines = ["N,trials,median_normalized,max_normalized,median_dstar_upper"]
        lines += [f"{r.n},{r.trials},{r.median_normalized!r},{r.max_normalized!r},"
                  f"{r.median_dstar_upper!r}" for r in rows]
        lines.append(f"# normalized_median_drift_flag,{drift}")
        text = "\n".join(lines) + "\n"
    else:
        records = harness_mod.run_trials(config)
        if args.format == "json":
            payload = [{
                "trial": r.trial, "seed": r.seed, "d": r.d, "N": r.n, "H": r.precision,
                "method": r.method, "dstar_lower": str(r.dstar_lower),
                "dstar_upper": str(r.dstar_upper), "bound_stated": r.bound_stated,
                "bound_detailed": r.bound_detailed, "exceeded": r.exceeded,
            } for r in records]
            text = json.dumps(payload, sort_keys=True) + "\n"
        else:
            text = harness_mod.records_to_csv(records)
        estimate = harness_mod.exceedance_ci(records)
        summary = (f"# exceedances,{estimate.exceed_count},total,{estimate.total},"
                   f"indeterminate,{estimate.indeterminate},"
                   f"upper95,{estimate.upper95!r}")
        if args.format == "csv":
            text += summary + "\n"
        if args.gate:
            # no exceedances allowed; the binomial certificate upper95 <= eps
            # is only demanded where the bound is non-vacuous (<= 1)
            non_vacuous = all(r.bound_stated <= 1.0 for r in records)
            gate_ok = all(r.exceeded != "yes" for r in records) and (
                not non_vacuous or estimate.upper95 <= args.eps)
            if not gate_ok:
                _write_out(args.out, text)
                print(f"gate: FAIL (upper95={estimate.upper95:.4f}, eps={args.eps})",
                      file=sys.stderr)
                return EXIT_GATE
    _write_out(args.out, text)
    return EXIT_OK


def _write_out(out_path: str | None, text: str) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> _Parser:
    parser = _Parser(prog="lacdisc",
                     description="Shift point sets, exact star discrepancy, "
                                 "and probabilistic discrepancy bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="dump a point set as CSV")
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--h-precision", type=int, default=32)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--kind", choices=("lacunary", "iid"), default="lacunary")
    gen.add_argument("--format", choices=("decimal", "bits"), default="decimal")
    gen.add_argument("--out")

    disc = sub.add_parser("disc", help="star discrepancy of a point set")
    disc.add_argument("--input", help="points CSV (from `generate`)")
    disc.add_argument("--d", type=int)
    disc.add_argument("--n", type=int)
    disc.add_argument("--h-precision", type=int, default=32)
    disc.add_argument("--seed", type=int, default=0)
    disc.add_argument("--method", choices=("exact", "brackets", "auto"), default="auto")
    disc.add_argument("--delta", help="enclosure parameter (e.g. 1/16 or 2^-4)")
    disc.add_argument("--format", choices=("json", "csv"), default="json")

    cover = sub.add_parser("cover", help="build and probe a bracketing cover")
    cover.add_argument("--d", type=int, required=True)
    cover.add_argument("--h", type=int, help="target level: delta = 2^-h")
    cover.add_argument("--delta", help="explicit delta instead of --h")
    cover.add_argument("--snap", action="store_true",
                       help="dyadic-snap a 2^-(h+2) base cover to level h")
    cover.add_argument("--probe", type=int, default=100_000)
    cover.add_argument("--seed", type=int, default=0)
    cover.add_argument("--format", choices=("json", "csv"), default="json")

    bound = sub.add_parser("bound", help="evaluate the probability bound")
    bound.add_argument("--d", type=int, required=True)
    bound.add_argument("--n", type=int, required=True)
    bound.add_argument("--eps", type=float, default=0.1)
    bound.add_argument("--variant", choices=("stated", "detailed", "hnww"),
                       default="stated")
    bound.add_argument("--c-abs", type=float, default=1.0)

    audit = sub.add_parser("audit", help="audit all bound constants (exit 3 on failure)")
    audit.add_argument("--n", type=int, default=1 << 20,
                       help="point count for the union-budget checks")
    audit.add_argument("--eps", type=float, default=0.1)

    indep = sub.add_parser("indep", help="exact joint law of two layer indicators")
    indep.add_argument("--d", type=int, required=True)
    indep.add_argument("--h", type=int, required=True)
    indep.add_argument("--n", type=int, required=True)
    indep.add_argument("--n-prime", type=int, required=True)
    indep.add_argument("--box", required=True,
                       help="difference-region corners 'lo1,..,lod:hi1,..,hid'")

    verify = sub.add_parser("verify", help="Monte Carlo check of the bound")
    verify.add_argument("--d", type=int, required=True)
    verify.add_argument("--n", type=int)
    verify.add_argument("--n-grid", help="e.g. 2^8..2^14 or 256,1024")
    verify.add_argument("--eps", type=float, default=0.1)
    verify.add_argument("--trials", type=int, default=10)
    verify.add_argument("--h-precision", type=int, default=32)
    verify.add_argument("--method", choices=("exact", "brackets", "auto"),
                        default="auto")
    verify.add_argument("--delta")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out")
    verify.add_argument("--format", choices=("json", "csv"), default="csv")
    verify.add_argument("--workers", type=int, default=1)
    verify.add_argument("--gate", action="store_true",
                        help="exit 3 unless the exceedance gate passes")
    return parser


_COMMANDS = {
    "generate": _cmd_generate,
    "disc": _cmd_disc,
    "cover": _cmd_cover,
    "bound": _cmd_bound,
    "audit": _cmd_audit,
    "indep": _cmd_indep,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (disc_mod.GridBudgetExceeded,
            bounds_mod.ChainInfeasibleError,
            harness_mod.InfeasibleInstanceError,
            indep_mod.EnumerationGuardExceeded) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
