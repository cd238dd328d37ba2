"""Command-line entry point: ``entconc <command> [options]``.

Output is CSV (default) or JSON with a ``schema_version`` field. CSV
files carry one row per record and ``# key: value`` summary lines.

Exit codes: 0 success, 2 precondition failure, 3 invariant or check
failure, 4 resource-cap refusal.

Kernel files (``postproc --kernel-out``/``--kernel-in``) are plain text::

    n <copies>
    d <local dimension>
    support <y_1> <y_2> ...
    row <Q(y_1|y_i)> <Q(y_2|y_i)> ...   (one line per support point)
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import parallel
from .errors import InvariantError, PreconditionError, ResourceCapError
from .estimation import cramer_rao_literal, estimator_error_exponent, estimator_mse
from .oracle import (
    OracleCaps,
    random_local_unitaries,
    verify_extracted_entanglement,
    verify_outcome_law,
    verify_projectors,
)
from .partitions import dim_u, dim_v_determinant, dim_v_product, enumerate_young_indices, MAX_DETERMINANT_D
from .postproc import (
    apply_kernel,
    generalized_yield,
    format_kernel,
    linear_utility,
    optimal_under_average_constraint,
    optimal_under_worst_constraint,
    optimize_weighted_sum,
    parse_kernel,
    step_utility,
    validate_utility,
)
from .protocols import (
    average_yield,
    bbps_average_yield_exact,
    estimation_based_bound,
    exponent,
    gap_constant,
    hardy_qubit_expansion,
    hardy_qubit_yield,
    log2_failure_probability,
    log2_infidelity,
    log2_strong_converse_probability,
)
from .rates import expansion_coefficients_bbps, rate_function, shannon_entropy
from .reports import ExperimentReport
from .schur_measure import yield_distribution
from .spectrum import SchmidtSpectrum

OUTPUT_DIR_ENV = "ENTCONC_OUTPUT_DIR"
EXIT_OK, EXIT_PRECONDITION, EXIT_INVARIANT, EXIT_RESOURCE = 0, 2, 3, 4


def _spectrum(text: str) -> SchmidtSpectrum:
    if text.startswith("@"):
        text = Path(text[1:]).read_text().strip().replace("\n", ",")
    return SchmidtSpectrum.parse(text)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("copy counts must be positive")
    return values


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _utility(spec: str, d: int):
    if spec == "linear":
        return linear_utility(d)
    if spec.startswith("step@"):
        return step_utility(float(spec[5:]))
    if spec.startswith("table:"):
        pts = np.loadtxt(spec[6:], ndmin=2)
        xs, ys = pts[:, 0], pts[:, 1]

        def f(x):
            return float(np.interp(x, xs, ys))
        f.label = spec
        return f
    raise PreconditionError(f"unknown utility {spec!r}; use linear, step@THRESHOLD or table:PATH")


# -- commands ---------------------------------------------------------------

def cmd_dims(args) -> ExperimentReport:
    n, d = args.n, args.d
    if n < 0 or d < 1:
        raise PreconditionError("need n >= 0 and d >= 1")
    rows, total = [], 0
    for lam in enumerate_young_indices(n, d):
        v_prod = dim_v_product(lam)
        v_det = dim_v_determinant(lam) if d <= MAX_DETERMINANT_D else None
        if v_det is not None and v_det != v_prod:
            raise InvariantError(f"dimension formulas disagree at {lam}")
        u = dim_u(lam)
        total += u * v_prod
        rows.append({"index": str(lam), "dim_v_determinant": v_det, "dim_v_product": v_prod,
                     "dim_u": u, "yield": math.log2(v_prod) / n if n else 0.0})
    if total != d ** n:
        raise InvariantError(f"sum of dimU*dimV = {total} != d^n = {d ** n}")
    return ExperimentReport("dims", {"n": n, "d": d}, rows,
                            {"sum_dimU_dimV": total, "d_pow_n": d ** n})


def cmd_measure(args) -> ExperimentReport:
    spec = _spectrum(args.spectrum)
    dist = yield_distribution(args.n, spec)
    rows = [{"index": str(lam), "probability": pr, "yield": float(y)} for lam, pr, y in dist.items()]
    total = dist.total()
    return ExperimentReport("measure", {"n": args.n, "spectrum": str(spec), "exact": dist.exact},
                            rows, {"total_probability": total, "average_yield": average_yield(dist)})


def cmd_exponents(args) -> ExperimentReport:
    spec = _spectrum(args.spectrum)
    rates = args.rate
    dists = dict(zip(args.n_list, parallel.pmap(lambda n: yield_distribution(n, spec, exact=False), args.n_list)))
    rows = []
    for rate in rates:
        target = rate_function(spec, rate)
        for n, dist in dists.items():
            lf = log2_failure_probability(dist, rate)
            ls = log2_strong_converse_probability(dist, rate)
            li = log2_infidelity(dist, rate)
            rows.append({
                "rate": rate, "n": n,
                "failure": 2.0 ** lf, "strong_converse": 2.0 ** ls, "infidelity": 2.0 ** li,
                "failure_exponent": exponent(lf, n),
                "strong_converse_exponent": exponent(ls, n),
                "infidelity_exponent": exponent(li, n),
                "rate_function": target,
            })
    return ExperimentReport("exponents", {"spectrum": str(spec), "rates": rates, "n_list": args.n_list},
                            rows, {"entropy": shannon_entropy(spec)})


def cmd_compare(args) -> ExperimentReport:
    spec = _spectrum(args.spectrum)
    h = shannon_entropy(spec)
    a, b = expansion_coefficients_bbps(spec)
    qubit = spec.d == 2 and not spec.is_degenerate and spec.strictly_positive
    constant = gap_constant(spec) if not spec.is_degenerate and spec.strictly_positive else None

    def row(n):
        universal = average_yield(yield_distribution(n, spec, exact=False))
        known = bbps_average_yield_exact(n, spec)
        out = {
            "n": n,
            "universal_yield": universal,
            "bbps_yield": known,
            "gap_times_n": n * (known - universal),
            "bbps_residual_times_n": n * abs(known - (h + a * math.log2(n) / n + b / n)),
            "estimation_bound": estimation_based_bound(n, math.sqrt(n), spec),
        }
        if qubit:
            hardy = hardy_qubit_yield(n, spec)
            out["hardy_yield"] = hardy
            out["hardy_residual_times_n"] = n * abs(hardy - hardy_qubit_expansion(n, spec))
        return out

    rows = parallel.pmap(row, args.n_list)
    return ExperimentReport("compare", {"spectrum": str(spec), "n_list": args.n_list}, rows,
                            {"entropy": h, "bbps_A": a, "bbps_B": b, "gap_constant": constant})


def cmd_postproc(args) -> ExperimentReport:
    spec = _spectrum(args.spectrum)
    dist = yield_distribution(args.n, spec, exact=False)
    f = _utility(args.utility, spec.d)
    validate_utility(f, [0.0, *dist.yield_law()[0], math.log2(spec.d)], spec.d)
    baseline = generalized_yield(dist, f)
    summary = {"identity_value": baseline}
    if args.kernel_in:
        kernel = parse_kernel(Path(args.kernel_in).read_text())
        law, _ = apply_kernel(dist, kernel)
        value = generalized_yield(law, f)
    elif args.constraint == "weighted":
        if args.level <= 1:
            raise PreconditionError("weighted-sum objective needs weight > 1")
        kernel, value = optimize_weighted_sum(dist, f, args.level)
        summary["identity_optimal"] = kernel.is_identity
        summary["threshold_copies"] = -math.log2(1 - 1 / args.level) / math.log2(spec.d)
    elif args.constraint == "worst":
        kernel, value = optimal_under_worst_constraint(dist, f, args.level)
        summary["improvement_bound"] = -math.log2(1 - args.level) / args.n / math.log2(spec.d)
    else:
        kernel, value = optimal_under_average_constraint(dist, f, args.level)
        summary["lagrangian_bound"] = baseline + 1.001 * args.level
    _, report = apply_kernel(dist, kernel)
    summary.update(value=value, worst_case_distortion=report.worst_case,
                   average_distortion=report.average)
    if args.kernel_out:
        Path(args.kernel_out).write_text(format_kernel(kernel))
    rows = [{"from": x, **{f"to_{j}": float(v) for j, v in enumerate(row)}}
            for x, row in zip(kernel.support, kernel.rows)]
    config = {"spectrum": str(spec), "n": args.n, "utility": args.utility,
              "constraint": args.constraint, "level": args.level}
    return ExperimentReport("postproc", config, rows, summary)


def cmd_estimate(args) -> ExperimentReport:
    spec = _spectrum(args.spectrum)
    tails = estimator_error_exponent(spec, args.delta, args.n_list)
    rows = []
    for tail in tails:
        primary, typed, bound = estimator_mse(spec, tail.n)
        rows.append({"n": tail.n, "lower_exponent": tail.lower, "lower_target": tail.lower_target,
                     "upper_exponent": tail.upper, "upper_target": tail.upper_target,
                     "n_mse_primary": primary, "n_mse_type": typed, "variance_bound": bound})
    return ExperimentReport("estimate", {"spectrum": str(spec), "delta": args.delta, "n_list": args.n_list},
                            rows, {"entropy": shannon_entropy(spec),
                                   "variance_bound": rows[0]["variance_bound"] if rows else None,
                                   "literal_bound_form": cramer_rao_literal(spec)})


def cmd_oracle_check(args) -> ExperimentReport:
    spec = _spectrum(args.spectrum)
    caps = OracleCaps(max_party_dim=args.max_dim)
    tol = 1e-10
    rows = []
    proj = verify_projectors(spec.d, args.n, caps)
    rows.append({"check": "projectors", "residual": max(proj.values()), "passed": max(proj.values()) <= tol})
    dev = verify_outcome_law(spec, args.n, caps=caps)
    rows.append({"check": "outcome_law", "residual": dev, "passed": dev <= tol})
    local = random_local_unitaries(spec.d, args.seed)
    dev_rot = verify_outcome_law(spec, args.n, local=local, caps=caps)
    rows.append({"check": "outcome_law_rotated", "residual": dev_rot, "passed": dev_rot <= tol})
    dist = yield_distribution(args.n, spec, exact=False)
    for lam, pr in zip(dist.indices, dist.prob_array()):
        if pr <= 1e-6:
            continue
        chk = verify_extracted_entanglement(spec, args.n, lam, caps=caps)
        resid = max(chk.group_residual, chk.entropy_residual)
        rows.append({"check": f"extraction {lam}", "residual": resid,
                     "passed": chk.rank_ok and resid <= 1e-8, "extracted_bits": chk.extracted_bits})
    ok = all(r["passed"] for r in rows)
    return ExperimentReport("oracle-check", {"spectrum": str(spec), "n": args.n, "seed": args.seed},
                            rows, {"all_passed": ok}, ok=ok)


# -- wiring -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", help=f"output file (default: ${OUTPUT_DIR_ENV}/<command>.<format> or stdout)")
    common.add_argument("--seed", type=int, default=0, help="PRNG seed (recorded in the report)")
    common.add_argument("--threads", type=int, default=None, help="cap on worker threads")

    parser = argparse.ArgumentParser(prog="entconc", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    spec_help = 'spectrum as "3/4,1/4" (exact), "0.6,0.4" (float) or @FILE'

    p = sub.add_parser("dims", parents=[common],
                       help="columns: index, dim_v_determinant, dim_v_product, dim_u, yield")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("measure", parents=[common], help="columns: index, probability, yield")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--spectrum", required=True, help=spec_help)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("exponents", parents=[common],
                       help="columns: rate, n, failure, strong_converse, infidelity, their exponents, rate_function")
    p.add_argument("--spectrum", required=True, help=spec_help)
    p.add_argument("--rate", type=_float_list, required=True, help="comma-separated rates (bits/copy)")
    p.add_argument("--n-list", type=_int_list, default=[50, 100, 200, 400])
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("compare", parents=[common],
                       help="columns: n, universal_yield, bbps_yield, gap_times_n, residuals, estimation_bound, hardy_yield")
    p.add_argument("--spectrum", required=True, help=spec_help)
    p.add_argument("--n-list", type=_int_list, default=[200, 500, 1000, 2000])
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("postproc", parents=[common], help="columns: from, to_<j> (kernel rows)")
    p.add_argument("--spectrum", required=True, help=spec_help)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--utility", default="linear", help="linear | step@THRESHOLD | table:PATH (yield, utility pairs)")
    p.add_argument("--constraint", choices=("weighted", "worst", "average"), default="weighted")
    p.add_argument("--level", type=float, default=1.001,
                   help="weight for 'weighted', distortion budget for 'worst'/'average'")
    p.add_argument("--kernel-in", help="apply this kernel file instead of optimising")
    p.add_argument("--kernel-out", help="write the kernel to this file")
    p.set_defaults(func=cmd_postproc)

    p = sub.add_parser("estimate", parents=[common],
                       help="columns: n, tail exponents and targets, n_mse_primary, n_mse_type, variance_bound")
    p.add_argument("--spectrum", required=True, help=spec_help)
    p.add_argument("--n-list", type=_int_list, default=[50, 100, 200])
    p.add_argument("--delta", type=float, default=0.2)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("oracle-check", parents=[common], help="columns: check, residual, passed")
    p.add_argument("--spectrum", required=True, help=spec_help)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-dim", type=int, default=OracleCaps().max_party_dim,
                   help="cap on d^n for dense matrices")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def _destination(args) -> Path | None:
    if args.output:
        return Path(args.output)
    env_dir = os.environ.get(OUTPUT_DIR_ENV)
    if env_dir:
        return Path(env_dir) / f"{args.command}.{args.format}"
    return None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            parser.error("--threads must be >= 1")
        parallel.set_max_workers(args.threads)
    try:
        report = args.func(args)
    except ResourceCapError as exc:
        print(f"entconc: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InvariantError as exc:
        print(f"entconc: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (PreconditionError, OSError) as exc:
        print(f"entconc: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    report.config["seed"] = args.seed
    text = report.render(args.format)
    dest = _destination(args)
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text)
    return EXIT_OK if report.ok else EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
