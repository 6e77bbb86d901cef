"""Command-line entry point: ``curvlab analyze | index | verify | fuzz``."""

import argparse
import sys

from .algebra_oracle import balas_sweep, child_seed, random_constrained_block, theorem3_equivalence_sweep
from .chern_weil import index_report
from .errors import CurvlabError
from .report import RunConfig, analyze_points, encode_records, encode_reports, flatten
from .verify import verify_model

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def _common(p):
    p.add_argument("--model", default="cp2", help="built-in model: torus, cp2, ball, kt, s2xs2 (default cp2)")
    p.add_argument("--user", default=None, help="path of a user model file (overrides --model)")
    p.add_argument("--k", type=float, default=None, help="holomorphic sectional curvature for cp2/ball")
    p.add_argument("--points", default=None,
                   help="a count of random points, or 'x1,x2,x3,x4;...' (default: chart centre; verify: 50)")
    p.add_argument("--n-samples", type=int, default=RunConfig.n_samples, help="directions per constancy test (default 256)")
    p.add_argument("--tol", type=float, default=RunConfig.tol, help="relative tolerance for HSC checks (default 1e-8)")
    p.add_argument("--quad-order", type=int, default=RunConfig.quad_order, help="Gauss-Legendre order (default 16)")
    p.add_argument("--seed", type=int, default=RunConfig.seed, help="random seed (default 0)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default $CURVLAB_THREADS or 1)")


def build_parser():
    parser = argparse.ArgumentParser(prog="curvlab", description="Curvature analysis of almost Hermitian 4-manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("analyze", "per-point curvature report"),
        ("index", "signature and Euler characteristic from both connections"),
        ("verify", "pass/fail table of all checks that apply to the model"),
    ):
        _common(sub.add_parser(name, help=text))
    fz = sub.add_parser("fuzz", help="exact algebraic oracle sweeps")
    _common(fz)
    fz.add_argument("--n", type=int, default=RunConfig.n, help="number of random blocks (default 10000)")
    fz.add_argument("--grid", action="store_true", help="also sweep the exhaustive {-1,0,1} grid")
    return parser


def config_from_args(args):
    d = {k: v for k, v in vars(args).items() if k != "command"}
    return RunConfig.from_dict(d)


def cmd_analyze(config, out):
    model = config.load_model()
    reports = analyze_points(model, config.resolve_points(model), config)
    out.write(encode_reports(reports, config.format))
    return EXIT_OK if all(r.structural_ok for r in reports) else EXIT_FAILED


def cmd_index(config, out):
    model = config.load_model()
    rep = index_report(model, quad_order=config.quad_order, threads=config.thread_count)
    out.write(encode_records([flatten(rep)], config.format))
    return EXIT_OK if rep.passed() else EXIT_FAILED


def cmd_verify(config, out):
    model = config.load_model()
    checks = verify_model(model, config)
    out.write(encode_records([c.as_record(model.name) for c in checks], config.format))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAILED


def cmd_fuzz(config, out, err=sys.stderr):
    if config.n < 1:
        raise CurvlabError("--n must be at least 1")
    t3 = theorem3_equivalence_sweep(config.n, seed=config.seed, grid=config.grid)
    bal = balas_sweep(config.n, seed=config.seed)
    record = {
        "n": config.n,
        "seed": config.seed,
        "grid_size": t3.grid_size,
        "theorem3_agree": t3.agree_count,
        "theorem3_disagree": len(t3.disagree_examples),
        "balas_agree": bal.agree_count,
        "balas_disagree": len(bal.disagree_examples),
        "holk1_true": t3.holk1_true,
    }
    out.write(encode_records([record], config.format))
    if config.n <= 10:
        for i in range(config.n):
            err.write(f"block {i}: {random_constrained_block(child_seed(config.seed, i))}\n")
    bad = t3.disagree_examples + bal.disagree_examples
    for m in bad:
        err.write(f"counterexample: {m}\n")
    return EXIT_FAILED if bad else EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "index": cmd_index, "verify": cmd_verify, "fuzz": cmd_fuzz}


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        if args.command == "fuzz":
            return cmd_fuzz(config, out, err)
        return COMMANDS[args.command](config, out)
    except CurvlabError as exc:
        err.write(f"curvlab {args.command}: error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
