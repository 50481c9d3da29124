"""Command-line interface: ``psdperm {check,per,rel,lower,estimate,bounds,tight}``.

Exit codes: 0 success, 2 parse/validation failure, 3 size gate, 4 solver failure.
The seed defaults to ``$PERMBOUND_SEED`` when ``--seed`` is absent.
"""

import argparse
import os
import sys
from pathlib import Path

from .certificates import EULER_GAMMA, extract_rank1, gurvits_estimate
from .errors import (
    DegenerateSamples,
    EmptyEigenspace,
    ParseError,
    SolverError,
    TooLarge,
    ValidationError,
)
from .fileio import build_bound_report, decimal_string, emit_report, load_matrix
from .linalg import cholesky_factor, lambda_max, lambda_min
from .permanent import LogNonneg, per_naive, per_psd_log, per_tensor
from .relaxation import SolverOptions, rel_solve
from .sampling import DEFAULT_SEED
from .tightness import ExperimentConfig, ratio_experiment

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SIZE = 3
EXIT_SOLVER = 4


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("PERMBOUND_SEED")
    return int(env) if env else DEFAULT_SEED


def _int_list(text):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _pairs(v):
    return [[float(z.real), float(z.imag)] for z in v]


def cmd_check(args):
    loaded = load_matrix(args.file)
    A = loaded.A
    return {
        "verdict": "admitted",
        "n": A.shape[0],
        "rank": cholesky_factor(A).d,
        "lambda_min": lambda_min(A),
        "lambda_max": lambda_max(A),
        "input_digest": loaded.digest,
    }


def cmd_per(args):
    A = load_matrix(args.file).A
    method = args.method
    if method == "auto":
        method = "ryser"
    if method == "ryser":
        log_per = per_psd_log(A)
    else:
        value = (per_naive if method == "naive" else per_tensor)(A).real
        log_per = LogNonneg.from_value(max(value, 0.0))
    return {"log_per": log_per.log, "per_decimal": decimal_string(log_per.log), "method": method, "n": A.shape[0]}


def _options(args):
    return SolverOptions(tol_opt=args.tol, max_stages=args.max_stages)


def cmd_rel(args):
    A = load_matrix(args.file).A
    sol = rel_solve(A, _options(args))
    return {
        "log_rel": sol.log_rel,
        "rel_decimal": decimal_string(sol.log_rel),
        "x": sol.x,
        "feas_margin": sol.feas_margin,
        "rank": sol.rank,
        "stages": len(sol.stages),
        "newton_steps": sum(s.newton_steps for s in sol.stages),
        "degenerate": sol.degenerate,
        "tol_opt": args.tol,
    }


def cmd_lower(args):
    A = load_matrix(args.file).A
    sol = rel_solve(A, _options(args))
    seed = _seed(args)
    if sol.degenerate:
        return {"log_lower": None, "log_rel": sol.log_rel, "degenerate": True, "seed": seed}
    cert = extract_rank1(A, sol, n_samples=args.samples, seed=seed)
    n = A.shape[0]
    return {
        "w": _pairs(cert.w),
        "log_lower": cert.log_lower.log,
        "lower_decimal": decimal_string(cert.log_lower.log),
        "loewner_margin": cert.loewner_margin,
        "eigenspace_dim": cert.eigenspace_dim,
        "log_rel": sol.log_rel,
        "gap_per_n": round((sol.log_rel - cert.log_lower.log) / n, 6),
        "guarantee_per_n": EULER_GAMMA + 1.0,
        "seed": seed,
    }


def cmd_estimate(args):
    A = load_matrix(args.file).A
    seed = _seed(args)
    est = gurvits_estimate(cholesky_factor(A), args.samples, seed=seed)
    return {"mean_log": est.mean_log, "std_err_rel": est.std_err_rel, "samples": est.samples, "seed": est.seed}


def cmd_bounds(args):
    loaded = load_matrix(args.file)
    return build_bound_report(
        loaded.A, loaded.digest, _seed(args), _options(args), mc_samples=args.samples
    )


def cmd_tight(args):
    seeds = args.seeds if args.seeds is not None else (_seed(args),)
    config = ExperimentConfig(
        d_list=args.d,
        n_list=args.n,
        k_list=args.k,
        seeds=seeds,
        samples_mc=args.samples_mc,
        per_cutoff_n=args.per_cutoff,
        parallel=args.parallel,
    )
    rows = ratio_experiment(config)
    if args.out:
        Path(args.out).write_bytes(emit_report(rows, "csv"))
    return rows


def build_parser():
    parser = argparse.ArgumentParser(prog="psdperm", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--seed", type=int, default=None)
    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--tol", type=float, default=SolverOptions.tol_opt)
    solver.add_argument("--max-stages", type=int, default=SolverOptions.max_stages)

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", parents=[common], help="validate a matrix file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("per", parents=[common], help="exact permanent (log)")
    p.add_argument("file")
    p.add_argument("--method", choices=("naive", "ryser", "tensor", "auto"), default="auto")
    p.set_defaults(func=cmd_per)

    p = sub.add_parser("rel", parents=[common, solver], help="solve the diagonal relaxation")
    p.add_argument("file")
    p.set_defaults(func=cmd_rel)

    p = sub.add_parser("lower", parents=[common, solver], help="rank-one lower-bound certificate")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=512)
    p.set_defaults(func=cmd_lower)

    p = sub.add_parser("estimate", parents=[common], help="Monte-Carlo permanent estimate")
    p.add_argument("file")
    p.add_argument("--samples", type=int, required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("bounds", parents=[common, solver], help="full bound report")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=10_000, help="Monte-Carlo samples")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("tight", parents=[common], help="ratio experiment on worst-case instances")
    p.add_argument("--d", type=_int_list, required=True)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--k", type=_int_list, default=(1,))
    p.add_argument("--seeds", type=_int_list, default=None)
    p.add_argument("--samples-mc", type=int, default=100_000)
    p.add_argument("--per-cutoff", type=int, default=14)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--out", default=None, help="also write rows as CSV")
    p.set_defaults(func=cmd_tight)
    return parser


def run_cli(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout.buffer
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"psdperm: validation failed: {exc}", file=stderr)
        if args.format == "json":
            stdout.write(emit_report({"error": type(exc).__name__, "message": str(exc)}, "json"))
        return EXIT_VALIDATION
    except TooLarge as exc:
        print(f"psdperm: {exc}", file=stderr)
        return EXIT_SIZE
    except (SolverError, EmptyEigenspace, DegenerateSamples) as exc:
        print(f"psdperm: solver failure: {exc}", file=stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"psdperm: {exc}", file=stderr)
        return EXIT_VALIDATION
    stdout.write(emit_report(result, args.format))
    stdout.flush()
    if getattr(result, "orderings", None) and not all(result.orderings.values()):
        print("psdperm: warning: bound orderings violated", file=stderr)
    return EXIT_OK


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
