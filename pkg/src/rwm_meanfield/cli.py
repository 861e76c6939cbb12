"""Command-line front end.

Subcommands wire configs to the library and emit CSV artifacts whose
'#'-headers are their run manifests.  Exit codes: 0 success, 1 a
benchmark/oracle criterion failed, 2 usage error (bad flags, unreadable
paths).  A `--config path` file of flat key=value lines supplies
defaults; explicit flags override it.  `--threads` only changes how
replicas are scheduled, never the bytes written.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import __version__
from .benchmarks import BenchmarkScale, run_full_benchmark
from .chain import ChainConfig, parse_init, run_replicas
from .coefficients import ScalingParams, gaussian_exp_cross, gaussian_exp_first, gaussian_exp_second, gee_gaussian_smoothing
from .mean_field import EnsembleConfig, run_ensemble
from .moment_ode import integrate_moment_ode
from .potentials import parse_potential
from .reporting import (
    base_manifest,
    write_chain_csv,
    write_closedforms_csv,
    write_limit_csv,
    write_ode_csv,
    write_report_csv,
    report_from_files,
)

__all__ = ["main", "console_main"]


class UsageError(Exception):
    pass


def _parse_record(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"bad --record list {text!r}") from exc


def _apply_config_file(argv: list[str]) -> list[str]:
    """Expand `--config file` into leading flags so explicit flags win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise UsageError("--config needs a path")
    path = argv[idx + 1]
    rest = argv[:idx] + argv[idx + 2:]
    if not os.path.isfile(path):
        raise UsageError(f"config file not readable: {path}")
    injected: list[str] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"config line is not key=value: {line!r}")
            injected += [f"--{key.strip()}", value.strip()]
    # subcommand stays first; config flags go right after it
    if rest and not rest[0].startswith("-"):
        return [rest[0]] + injected + rest[1:]
    return injected + rest


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rwm-meanfield",
                                     description="RWM chain vs mean-field limit toolkit")
    parser.add_argument("--version", action="version", version=f"rwm-meanfield {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-closed-forms", help="MC-oracle suite for the Gaussian identities")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--draws", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="closedforms.csv")

    p = sub.add_parser("run-chain", help="simulate RWM chain replicas")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=float, default=2.38)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--potential", default="gaussian:1")
    p.add_argument("--init", default="stationary")
    p.add_argument("--record", default="0")
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--store-components", type=int, default=5)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default="chain.csv")

    p = sub.add_parser("run-limit", help="particle ensemble of the nonlinear limit SDE")
    p.add_argument("--particles", type=int, required=True)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--l", type=float, default=2.38)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--potential", default="gaussian:1")
    p.add_argument("--init", default="stationary")
    p.add_argument("--record", default="")
    p.add_argument("--dump-marginals", default=None,
                   help="path prefix for per-time marginal sample files")
    p.add_argument("--out", default="limit.csv")

    p = sub.add_parser("gaussian-ode", help="reference second-moment ODE for gaussian targets")
    p.add_argument("--m0", type=float, required=True)
    p.add_argument("--l", type=float, default=2.38)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--out", default="ode.csv")

    p = sub.add_parser("compare", help="chain-vs-limit report from CSV artifacts")
    p.add_argument("--chain", required=True)
    p.add_argument("--limit", required=True)
    p.add_argument("--out", default="report.csv")

    p = sub.add_parser("full-benchmark", help="gaussian pipeline + pass/fail per criterion")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--outdir", default="benchmark_out")
    p.add_argument("--quick", action="store_true",
                   help="reduced-scale smoke run (statistical criteria not meaningful)")
    return parser


def cmd_verify_closed_forms(args) -> int:
    from .benchmarks import run_closed_form_suite

    scale = BenchmarkScale(mc_samples=args.samples, mc_draws=args.draws)
    t0 = time.perf_counter()
    rows, worst_z = run_closed_form_suite(scale, args.seed)
    write_closedforms_csv(args.out, rows, base_manifest("verify-closed-forms", {
        "samples": args.samples, "draws": args.draws, "seed": args.seed}))
    print(f"wrote {args.out}: {len(rows)} identity checks, max|z|={worst_z:.3f} "
          f"in {time.perf_counter() - t0:.1f}s")
    return 0 if worst_z <= 3.0 else 1


def cmd_run_chain(args) -> int:
    pot = parse_potential(args.potential)
    init = parse_init(args.init)
    record = _parse_record(args.record)
    cfg = ChainConfig(n=args.n, l=args.l, steps=args.steps, seed=args.seed, init=init)
    t0 = time.perf_counter()
    runs = run_replicas(cfg, pot, record, args.replicas, args.threads)
    manifest = base_manifest("run-chain", {
        "n": args.n, "l": args.l, "steps": args.steps, "seed": args.seed,
        "potential": args.potential, "init": args.init, "record": args.record,
        "replicas": args.replicas, "store_components": args.store_components,
    })
    write_chain_csv(args.out, runs, pot, args.store_components, manifest)
    print(f"wrote {args.out} ({args.replicas} replicas) in {time.perf_counter() - t0:.2f}s")
    return 0


def cmd_run_limit(args) -> int:
    pot = parse_potential(args.potential)
    init = parse_init(args.init)
    record = _parse_record(args.record) if args.record else []
    cfg = EnsembleConfig(n_particles=args.particles, dt=args.dt, horizon=args.horizon,
                         l=args.l, seed=args.seed, init=init)
    t0 = time.perf_counter()
    result = run_ensemble(cfg, pot, record)
    manifest = base_manifest("run-limit", {
        "particles": args.particles, "dt": args.dt, "horizon": args.horizon,
        "l": args.l, "seed": args.seed, "potential": args.potential, "init": args.init,
    })
    write_limit_csv(args.out, result, manifest, dump_marginals=args.dump_marginals)
    print(f"wrote {args.out} in {time.perf_counter() - t0:.2f}s")
    return 0


def cmd_gaussian_ode(args) -> int:
    curve = integrate_moment_ode(args.m0, args.l, args.horizon, args.dt)
    manifest = base_manifest("gaussian-ode", {
        "m0": args.m0, "l": args.l, "horizon": args.horizon, "dt": args.dt})
    write_ode_csv(args.out, curve, manifest)
    print(f"wrote {args.out} (step-halving err {curve.err_estimate:.2e})")
    return 0


def cmd_compare(args) -> int:
    for path in (args.chain, args.limit):
        if not os.path.isfile(path):
            raise UsageError(f"not readable: {path}")
    report = report_from_files(args.chain, args.limit)
    write_report_csv(args.out, report, base_manifest("compare", {
        "chain": os.path.basename(args.chain), "limit": os.path.basename(args.limit)}))
    print(f"wrote {args.out} ({len(report.rows)} rows)")
    return 0


def cmd_full_benchmark(args) -> int:
    scale = BenchmarkScale.quick() if args.quick else BenchmarkScale.full()
    t0 = time.perf_counter()
    results = run_full_benchmark(seed=args.seed, threads=args.threads,
                                 outdir=args.outdir, scale=scale)
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed "
          f"in {time.perf_counter() - t0:.1f}s; artifacts in {args.outdir}/")
    return 0 if n_fail == 0 else 1


_DISPATCH = {
    "verify-closed-forms": cmd_verify_closed_forms,
    "run-chain": cmd_run_chain,
    "run-limit": cmd_run_limit,
    "gaussian-ode": cmd_gaussian_ode,
    "compare": cmd_compare,
    "full-benchmark": cmd_full_benchmark,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        argv = _apply_config_file(argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
            return int(exc.code or 0)
        return _DISPATCH[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
