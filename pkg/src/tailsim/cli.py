"""Command line entry point: ``tailsim run | check | analyze``."""

import argparse
import csv
import dataclasses
import logging
import os
import sys
from pathlib import Path

from .config import ConfigError, parse_config
from .engine import simulate, year_loss_table
from .kernels import BACKEND
from .sampling import SampleMode
from .stats import k2_inequality_check, variance_gap_quadrature

logger = logging.getLogger("tailsim")

RESULTS_HEADER = [
    "contract", "occ_attach", "occ_limit", "agg_attach", "agg_limit",
    "el", "el_percent", "k",
    "sim_error_regular_pct", "sim_error_enhanced_pct", "sample_improvement",
]
SWEEP_HEADER = ["k", "contract", "sample_improvement"]

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _fmt(x):
    return f"{x:.6f}"


def _ordered(metrics, contracts):
    order = {c.name: i for i, c in enumerate(contracts)}
    return sorted(metrics, key=lambda m: (order[m.contract.name], m.k))


def emit_results(result, path):
    """Write one CSV row per (contract, k) in contract order, then ascending k."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        for m in _ordered(result.metrics, result.plan.contracts):
            c = m.contract
            writer.writerow([
                c.name, _fmt(c.occ_attach), _fmt(c.occ_limit), _fmt(c.agg_attach), _fmt(c.agg_limit),
                _fmt(m.expected_loss), _fmt(m.el_percent), _fmt(m.k),
                _fmt(100 * m.sim_error_regular), _fmt(100 * m.sim_error_enhanced),
                _fmt(m.sample_improvement),
            ])


def emit_sweep(result, path):
    """Sample improvement by k and contract (plot data for the k sweep)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        by_k = sorted(result.metrics, key=lambda m: m.k)
        for k in sorted({m.k for m in by_k}):
            for m in _ordered([m for m in by_k if m.k == k], result.plan.contracts):
                writer.writerow([_fmt(k), m.contract.name, _fmt(m.sample_improvement)])


def _dump_paths(path, k_values):
    path = Path(path)
    if len(k_values) == 1:
        return [path]
    return [path.with_name(f"{path.stem}_k{k:g}{path.suffix}") for k in k_values]


def dump_ylt(plan, path, threads=1):
    """Write ``trial,weight,net_loss_<contract>...`` for every configured k."""
    for k_index, out in enumerate(_dump_paths(path, plan.k_values)):
        table = year_loss_table(plan, k_index, threads)
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["trial", "weight"] + [f"net_loss_{c.name}" for c in plan.contracts])
            for t in range(len(table)):
                writer.writerow([t + 1, repr(float(table.trial_weight[t]))]
                                + [repr(float(v)) for v in table.net_loss[:, t]])


def _load(args):
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc.strerror or exc}") from None
    plan = parse_config(text, source=str(args.config))
    overrides = {}
    if getattr(args, "trials", None) is not None:
        overrides["num_trials"] = args.trials
    if getattr(args, "seed", None) is not None or getattr(args, "mode", None) is not None:
        overrides["mode"] = SampleMode(
            args.mode if args.mode is not None else plan.mode.mode,
            args.seed if args.seed is not None else plan.mode.seed,
        )
    return dataclasses.replace(plan, **overrides) if overrides else plan


def run(plan, out, sweep_out, threads=1, dump=None):
    """Simulate ``plan`` and write the results and sweep tables."""
    def progress(done, total, k):
        logger.info("k=%g done (%d/%d)", k, done, total)

    result = simulate(plan, threads=threads, progress=progress)
    emit_results(result, out)
    emit_sweep(result, sweep_out)
    if dump:
        dump_ylt(plan, dump, threads)
    return result


def _cmd_run(args):
    plan = _load(args)
    logger.info("backend=%s threads=%d", BACKEND, args.threads)
    run(plan, args.out, args.sweep_out, threads=args.threads, dump=args.dump_ylt)
    return EXIT_OK


def _cmd_check(args):
    plan = _load(args)
    print(f"ok: {plan.num_trials} trials, {len(plan.contracts)} contracts, k = {list(plan.k_values)}")
    return EXIT_OK


def _cmd_analyze(args):
    plan = _load(args)
    severity = plan.severity
    print(f"severity mu={severity.mu:.9g} sigma={severity.sigma:.9g}")
    print("k,var_y_minus_var_x")
    for k in plan.k_values:
        print(f"{k:g},{variance_gap_quadrature(severity, k):.9g}")
    lhs, rhs = k2_inequality_check(severity)
    verdict = "reduces" if lhs > rhs else "does not reduce"
    print(f"k=2 integrals: lhs={lhs:.9g} rhs={rhs:.9g} ({verdict} variance)")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="tailsim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate and write result tables")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True, help="results CSV")
    p_run.add_argument("--sweep-out", required=True, help="k sweep CSV")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--trials", type=int)
    p_run.add_argument("--mode", choices=("riemann", "random"))
    p_run.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p_run.add_argument("--dump-ylt", metavar="PATH", help="also write the per-trial year loss table")
    p_run.set_defaults(func=_cmd_run)

    p_check = sub.add_parser("check", help="validate a config without running")
    p_check.add_argument("--config", required=True)
    p_check.set_defaults(func=_cmd_check)

    p_an = sub.add_parser("analyze", help="variance-gap quadrature for each configured k")
    p_an.add_argument("--config", required=True)
    p_an.set_defaults(func=_cmd_analyze)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "command", "") == "run" or args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"tailsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - top-level reporting
        print(f"tailsim: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
