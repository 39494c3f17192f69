"""Command-line entry point.

    fvceuler run --test sod_sonic --scheme fvc --cells 200
    fvceuler campaign --table1 --out results/
    fvceuler campaign --all-figures --out results/ --jobs 2

Settings resolve as: command-line flags, then the ``--config`` file, then
the benchmark's own defaults, then the library defaults.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import harness
from .config import SCHEMES, ConfigError, SchemeConfig, load_config, parse_alpha, parse_cfl_mode, parse_limiter, write_config
from .gas_dynamics import PrimitiveState
from .fvc import LimiterKind

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_SOLVER = 4
EXIT_IO = 5


class UsageError(Exception):
    pass


@dataclass
class RunSpec:
    command: str  # "run" | "campaign"
    benchmark: harness.Benchmark
    config: SchemeConfig
    cells: int
    t_end: float
    out: Path | None = None
    plots: bool = False
    jobs: int = 1
    repetitions: int = 3
    grids: tuple[int, ...] = harness.DEFAULT_GRIDS
    campaigns: tuple[str, ...] = ()
    # every resolved setting, echoed into the output directory
    settings: dict = field(default_factory=dict)


def _state(text: str, name: str) -> PrimitiveState:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(name, f"expected three numbers rho,u,p, got {text!r}") from None
    if len(values) != 3:
        raise ConfigError(name, f"expected three numbers rho,u,p, got {text!r}")
    rho, u, p = values
    if not rho > 0.0:
        raise ConfigError(f"{name}.rho", f"density must be positive, got {rho}")
    if not p > 0.0:
        raise ConfigError(f"{name}.p", f"pressure must be positive, got {p}")
    return PrimitiveState(rho, u, p)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key-value settings file (see fvceuler.config)")
    p.add_argument("--test", help=f"benchmark name: {', '.join(b.name for b in harness.builtin_benchmarks())}, or custom")
    p.add_argument("--scheme", choices=SCHEMES, help="numerical scheme")
    p.add_argument("--cells", type=int, help="number of interior cells")
    p.add_argument("--cfl", type=float, help="Courant number")
    p.add_argument("--alpha", help="adaptive | fixed:<value>")
    p.add_argument("--limiter", choices=[k.value for k in LimiterKind], help="slope limiter for alpha")
    p.add_argument("--gamma", type=float, help="ratio of specific heats")
    p.add_argument("--entropy-fix", dest="entropy_fix", type=float, help="Harten threshold factor for roe")
    p.add_argument("--cfl-mode", dest="cfl_mode", help="base | alpha (alpha-weighted, FVC only)")
    p.add_argument("--tend", type=float, help="final time")
    p.add_argument("--out", help="output directory")
    p.add_argument("--jobs", type=int, help="maximum concurrent runs")
    p.add_argument("--repetitions", type=int, help="timing repetitions (at least 3)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fvceuler", description="1D Euler benchmark runner")
    sub = parser.add_subparsers(dest="command", metavar="{run,campaign}")
    run = sub.add_parser("run", help="run one benchmark with one scheme")
    _add_common(run)
    run.add_argument("--left", help="custom left state rho,u,p (with --test custom)")
    run.add_argument("--right", help="custom right state rho,u,p (with --test custom)")
    run.add_argument("--split", type=float, help="custom initial jump position")
    run.add_argument("--plots", action="store_true", help="also write a plotting script")
    camp = sub.add_parser("campaign", help="reproduce the error table, timing table or figures")
    _add_common(camp)
    which = camp.add_mutually_exclusive_group(required=True)
    which.add_argument("--table1", action="store_true", help="L1 density errors and convergence rates")
    which.add_argument("--table2", action="store_true", help="median wall-clock times")
    which.add_argument("--all-figures", dest="all_figures", action="store_true", help="every figure reproduction")
    camp.add_argument("--grids", help="comma-separated doubling grid levels")
    return parser


def _flag_settings(args: argparse.Namespace) -> dict:
    keys = ("test", "scheme", "cells", "cfl", "alpha", "limiter", "gamma", "entropy_fix", "cfl_mode",
            "tend", "out", "jobs", "repetitions", "left", "right", "split")
    converters = {"alpha": parse_alpha, "limiter": parse_limiter, "cfl_mode": parse_cfl_mode}
    values = {}
    for key in keys:
        raw = getattr(args, key, None)
        if raw is not None:
            values[key] = converters[key](raw) if key in converters else raw
    return values


def resolve(args: argparse.Namespace) -> RunSpec:
    """Merge flags, config file and defaults into a validated RunSpec."""
    try:
        settings = load_config(args.config) if args.config else {}
    except ConfigError as exc:
        # enumerated choices are usage errors, like their command-line twins
        if exc.key in ("limiter", "scheme.limiter"):
            raise UsageError(str(exc)) from None
        raise
    settings.update(_flag_settings(args))

    test = settings.get("test", "sod_sonic")
    if test == "custom":
        if args.command != "run" or not ("left" in settings and "right" in settings):
            raise UsageError("--test custom needs --left and --right (run only)")
        left = _state(settings["left"], "left")
        right = _state(settings["right"], "right")
        split = settings.get("split", 0.5)
        if not 0.0 <= split <= 1.0:
            raise ConfigError("split", f"must lie in [0, 1], got {split}")
        if "tend" not in settings:
            raise UsageError("--test custom needs --tend")
        bench = harness.Benchmark("custom", left, right, settings["tend"], x_split=split)
        settings["split"] = split
    else:
        try:
            bench = harness.get_benchmark(test)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None

    scheme = settings.get("scheme", "fvc")
    if scheme not in SCHEMES:
        raise UsageError(f"unknown scheme {scheme!r}; expected one of {', '.join(SCHEMES)}")
    overrides = {}
    for key, attr in (("cfl", "courant"), ("alpha", "alpha_mode"), ("limiter", "limiter"), ("gamma", "gamma"),
                      ("entropy_fix", "entropy_fix"), ("cfl_mode", "cfl_mode")):
        if key in settings:
            overrides[attr] = settings[key]
    config = bench.scheme_config(scheme, **overrides)

    cells = settings.get("cells", bench.cells)
    if cells < 1:
        raise ConfigError("cells", f"must be positive, got {cells}")
    t_end = settings.get("tend", bench.t_end)
    if not t_end > 0.0:
        raise ConfigError("tend", f"must be positive, got {t_end}")
    jobs = settings.get("jobs", 1)
    if jobs < 1:
        raise ConfigError("jobs", f"must be at least 1, got {jobs}")
    repetitions = settings.get("repetitions", 3)
    if repetitions < 3:
        raise ConfigError("repetitions", f"must be at least 3, got {repetitions}")

    spec = RunSpec(
        command=args.command,
        benchmark=bench,
        config=config,
        cells=cells,
        t_end=t_end,
        out=Path(settings["out"]) if "out" in settings else None,
        plots=getattr(args, "plots", False),
        jobs=jobs,
        repetitions=repetitions,
    )
    if args.command == "campaign":
        spec.campaigns = tuple(k for k in ("table1", "table2", "all_figures") if getattr(args, k))
        if args.grids:
            try:
                spec.grids = tuple(int(v) for v in args.grids.split(","))
            except ValueError:
                raise ConfigError("grids", f"expected comma-separated integers, got {args.grids!r}") from None
            if any(b != 2 * a for a, b in zip(spec.grids, spec.grids[1:])) or min(spec.grids) < 1:
                raise ConfigError("grids", f"levels must be positive and double, got {args.grids}")
    spec.settings = dict(settings, test=bench.name, scheme=scheme, cells=cells, tend=t_end,
                         cfl=config.courant, alpha=config.alpha_mode, limiter=config.limiter,
                         gamma=config.gamma, entropy_fix=config.entropy_fix, cfl_mode=config.cfl_mode)
    return spec


def parse_args(argv: Sequence[str] | None = None) -> RunSpec:
    """argv -> RunSpec; raises UsageError or ConfigError."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(parser.format_usage().strip())
    return resolve(args)


def _summary(result: harness.RunResult) -> str:
    parts = [
        f"{result.benchmark.name}",
        f"scheme={result.label}",
        f"cells={result.cells}",
        f"t={result.field.t:.6g}",
        f"steps={result.steps}",
    ]
    if result.ok:
        err = result.errors()
        parts += [f"L1(rho)={err['rho']:.6e}", f"L1(u)={err['u']:.6e}", f"L1(p)={err['p']:.6e}"]
    parts.append(f"wall={result.wall_time:.3f}s")
    return " ".join(parts)


def _write_manifest(spec: RunSpec) -> None:
    spec.out.mkdir(parents=True, exist_ok=True)
    values = {k: v for k, v in spec.settings.items() if k not in ("out",)}
    write_config(values, spec.out / "manifest.ini")
    if spec.benchmark.notes:
        (spec.out / "benchmark_notes.txt").write_text(f"{spec.benchmark.name}: {spec.benchmark.notes}\n")


def _do_run(spec: RunSpec) -> int:
    result = harness.run_benchmark(spec.benchmark, spec.config, spec.cells, spec.t_end)
    if spec.out is not None:
        _write_manifest(spec)
        harness.emit_artifacts(spec.out, [result])
        if spec.plots:
            fig = harness.FigureSpec(0, spec.benchmark.name, "profiles", (result.label,), spec.benchmark.name)
            harness.write_plot_script(fig, spec.out, [(result.label, harness.profile_name(result))],
                                      f"{spec.benchmark.name}_exact_{spec.cells}.csv")
    print(_summary(result))
    if not result.ok:
        print(f"error: {result.label} failed at step {result.failure_step} "
              f"(t={result.failure_time:.6g}): {result.failure}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _print_table(title: str, grids, columns: dict[str, Sequence[float]], fmt: str) -> None:
    print(title)
    names = list(columns)
    print("cells " + " ".join(f"{n:>14}" for n in names))
    for k, n in enumerate(grids):
        print(f"{n:5d} " + " ".join(f"{columns[name][k]:>14{fmt}}" for name in names))


def _do_campaign(spec: RunSpec) -> int:
    out = spec.out or Path("results")
    spec.out = out
    _write_manifest(spec)
    status = EXIT_OK
    bench = spec.benchmark
    overrides = dict(courant=spec.config.courant, gamma=spec.config.gamma)
    configs = [bench.scheme_config(s, **overrides) for s in harness.TABLE_SCHEMES]
    if "table1" in spec.campaigns:
        campaign = None
        for cfg in configs:
            part = harness.convergence_study(bench, cfg, spec.grids, spec.jobs)
            campaign = part if campaign is None else campaign.merge(part)
        harness.write_table1(campaign, out / "table1_reproduction.csv")
        cols = {lab: campaign.density_errors(lab) for lab in campaign.errors}
        _print_table(f"L1 density error, {bench.name}", spec.grids, cols, ".6e")
        print("overall rate " + " ".join(f"{lab}={campaign.overall_rate(lab):.3f}" for lab in cols))
        for lab, fails in campaign.failures.items():
            for n, msg in zip(spec.grids, fails):
                if msg:
                    print(f"error: {lab} at {n} cells: {msg}", file=sys.stderr)
                    status = EXIT_SOLVER
    if "table2" in spec.campaigns:
        grids = spec.grids if spec.grids != harness.DEFAULT_GRIDS else (1600, 3200)
        timing = harness.timing_study(bench, configs, grids, spec.repetitions)
        harness.write_table2(timing, out / "table2_timing.csv")
        _print_table(f"median wall time [s], {bench.name}", grids, timing.wall_times, ".3f")
        print(f"environment: {timing.environment['cpu']}")
    if "all_figures" in spec.campaigns:
        results = harness.figure_campaign(out, jobs=spec.jobs, grids=spec.grids)
        for number, runs in results.items():
            for r in runs:
                line = f"fig{number:02d} " + _summary(r)
                print(line if r.ok else line + f" FAILED at step {r.failure_step}: {r.failure}")
    return status


def main(argv: Sequence[str] | None = None) -> int:
    try:
        spec = parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        if spec.command == "run":
            return _do_run(spec)
        return _do_campaign(spec)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
