"""Benchmark problems, the time loop, error/convergence/timing campaigns and
CSV / plot-script output."""
from __future__ import annotations

import csv
import json
import os
import platform
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .classic_schemes import NumericalFlux, godunov_type_step
from .config import SchemeConfig
from .exact_riemann import exact_profile
from .fvc import AlphaMode, fvc_step
from .gas_dynamics import (
    EulerDomainError,
    GasModel,
    PrimitiveState,
    riemann_invariants,
    to_conserved,
)
from .mesh import CflRule, Field, Mesh, init_riemann, l1_error

DEFAULT_GRIDS = (100, 200, 400, 800, 1600, 3200)
# column order of the L1 table
TABLE_SCHEMES = ("rusanov", "roe", "hll", "fvc")
PROFILE_COLUMNS = ("x", "rho", "u", "p", "E", "mach", "alpha")


@dataclass(frozen=True)
class Benchmark:
    name: str
    left: PrimitiveState
    right: PrimitiveState
    t_end: float
    cells: int = 200
    x_split: float = 0.5
    courant: float = 0.8
    # pinned alpha for FVC runs of this problem; None keeps the adaptive blend
    alpha_mode: AlphaMode | None = None
    x_min: float = 0.0
    x_max: float = 1.0
    notes: str = ""

    def __post_init__(self):
        if not self.t_end > 0.0:
            raise ValueError(f"{self.name}: t_end must be positive")
        for side, state in (("left", self.left), ("right", self.right)):
            try:
                to_conserved(state)
            except EulerDomainError as exc:
                raise ValueError(f"{self.name}: invalid {side} state: {exc}") from None
        if not self.x_min <= self.x_split <= self.x_max:
            raise ValueError(f"{self.name}: x_split outside the domain")

    def mesh(self, cells: int | None = None) -> Mesh:
        return Mesh(self.x_min, self.x_max, cells or self.cells)

    def scheme_config(self, scheme: str = "fvc", **overrides) -> SchemeConfig:
        """Scheme settings this problem is run with unless overridden."""
        settings = {"scheme": scheme, "courant": self.courant}
        if scheme == "fvc" and self.alpha_mode is not None:
            settings["alpha_mode"] = self.alpha_mode
        settings.update(overrides)
        return SchemeConfig(**settings)

    def exact(self, mesh: Mesh, gas: GasModel, t: float | None = None) -> PrimitiveState:
        return exact_profile(self.left, self.right, self.x_split, self.t_end if t is None else t, mesh, gas)


def builtin_benchmarks() -> list[Benchmark]:
    P = PrimitiveState
    return [
        Benchmark("sod_sonic", P(1.0, 0.75, 1.0), P(0.125, 0.0, 0.1), 0.2,
                  notes="Sod shock tube with a sonic point inside the rarefaction"),
        Benchmark("vacuum123", P(1.0, -2.0, 0.4), P(1.0, 2.0, 0.4), 0.15,
                  notes="double rarefaction (123 problem) with substituted data u = -/+2.0, "
                        "p = 0.4 on both sides; a variant listing p = -2.0 is inadmissible"),
        Benchmark("blast_left", P(1.0, 0.0, 1000.0), P(1.0, 0.0, 0.01), 0.012, cells=2000,
                  notes="strong right-moving shock"),
        Benchmark("blast_right", P(1.0, 0.0, 0.01), P(1.0, 0.0, 100.0), 0.035, cells=2000,
                  notes="strong left-moving shock"),
        Benchmark("contact_stationary", P(1.4, 0.0, 1.0), P(1.0, 0.0, 1.0), 2.0,
                  notes="isolated stationary contact"),
        Benchmark("contact_slow", P(1.4, 0.1, 1.0), P(1.0, 0.1, 1.0), 2.0, alpha_mode=AlphaMode(0.5),
                  notes="isolated slowly moving contact; FVC runs with alpha fixed at 1/2"),
    ]


def get_benchmark(name: str) -> Benchmark:
    table = {b.name: b for b in builtin_benchmarks()}
    try:
        return table[name]
    except KeyError:
        raise KeyError(f"unknown test {name!r}; expected one of {', '.join(table)}") from None


@dataclass
class RunResult:
    benchmark: Benchmark
    config: SchemeConfig
    cells: int
    t_end: float
    field: Field  # final state, or the last valid one when the run failed
    steps: int
    wall_time: float
    alpha: np.ndarray | None = None  # per interface, from the last FVC step
    failure: str | None = None
    failure_step: int | None = None
    failure_time: float | None = None
    snapshots: list[Field] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failure is None

    @property
    def label(self) -> str:
        return self.config.label()

    @property
    def gas(self) -> GasModel:
        return self.config.gas

    @property
    def mesh(self) -> Mesh:
        return self.field.mesh

    @property
    def x(self) -> np.ndarray:
        return self.mesh.centers()

    def primitive(self) -> PrimitiveState:
        return self.field.primitive(self.gas)

    def energy(self) -> np.ndarray:
        return self.field.interior[2].copy()

    def mach(self) -> np.ndarray:
        rho, u, p = self.primitive()
        return u / np.sqrt(self.gas.gamma * p / rho)

    def exact(self) -> PrimitiveState:
        return self.benchmark.exact(self.mesh, self.gas, self.field.t)

    def errors(self) -> dict[str, float]:
        """L1 errors of rho, u, p against the exact solution at the final time."""
        num = self.primitive()
        ref = self.exact()
        dx = self.mesh.dx
        return {name: float(l1_error(a, b, dx)) for name, a, b in zip(("rho", "u", "p"), num, ref)}

    def riemann_invariants(self) -> tuple[np.ndarray, np.ndarray]:
        return riemann_invariants(self.primitive(), self.gas)

    def cell_alpha(self) -> np.ndarray | None:
        """Cell-centred alpha: mean of the two faces of each cell."""
        if self.alpha is None:
            return None
        return 0.5 * (self.alpha[:-1] + self.alpha[1:])


def advance(fld: Field, config: SchemeConfig, t_end: float | None = None) -> Field:
    """One time step of the configured scheme."""
    gas = config.gas
    if config.scheme == "fvc":
        return fvc_step(fld, config.courant, config.alpha_mode, config.limiter, gas, t_end, config.cfl_mode)
    flux = NumericalFlux(config.scheme, config.entropy_fix)
    return godunov_type_step(fld, flux, CflRule(config.courant), gas, t_end)


def run_benchmark(
    bench: Benchmark,
    config: SchemeConfig,
    cells: int | None = None,
    t_end: float | None = None,
    snapshot_times: Iterable[float] = (),
    monitor: Callable[[Field], None] | None = None,
    max_steps: int = 10_000_000,
) -> RunResult:
    """March to exactly ``t_end`` (default: the benchmark's).

    Scheme failures (positivity loss, Roe average breakdown, CFL violations)
    end the run early and are recorded in the result instead of raised.
    ``monitor`` is called with the field after every step.
    """
    gas = config.gas
    cells = cells or bench.cells
    t_end = bench.t_end if t_end is None else t_end
    if not t_end > 0.0:
        raise ValueError("t_end must be positive")
    fld = init_riemann(bench.mesh(cells), bench.left, bench.right, bench.x_split, gas)
    targets = sorted(t for t in set(snapshot_times) if 0.0 < t < t_end) + [t_end]
    snapshots = []
    failure = None
    failed_at = None
    start = time.perf_counter()
    try:
        for target in targets:
            while fld.t < target:
                if fld.step >= max_steps:
                    raise EulerDomainError(f"step limit {max_steps} reached at t={fld.t:.6g}")
                fld = advance(fld, config, target)
                if monitor is not None:
                    monitor(fld)
            if target < t_end:
                snapshots.append(fld.copy())
    except EulerDomainError as exc:
        failure = f"{type(exc).__name__}: {exc}"
        failed_at = getattr(exc, "time", None)
    wall = time.perf_counter() - start
    return RunResult(
        benchmark=bench,
        config=config,
        cells=cells,
        t_end=t_end,
        field=fld,
        steps=fld.step,
        wall_time=wall,
        alpha=None if fld.alpha is None else fld.alpha.copy(),
        failure=failure,
        failure_step=None if failure is None else fld.step + 1,
        failure_time=None if failure is None else (fld.t if failed_at is None else failed_at),
        snapshots=snapshots,
    )


def environment() -> dict:
    """Machine description stored alongside timings."""
    cpu = platform.processor() or platform.machine()
    try:
        with open("/proc/cpuinfo") as fh:
            for line in fh:
                if line.startswith("model name"):
                    cpu = line.split(":", 1)[1].strip()
                    break
    except OSError:
        pass
    return {
        "cpu": cpu,
        "cpu_count": os.cpu_count(),
        "platform": platform.platform(),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


@dataclass
class CampaignResult:
    benchmark: str
    grids: list[int]
    # label -> one entry per grid level
    errors: dict[str, list[dict | None]] = dc_field(default_factory=dict)
    wall_times: dict[str, list[float]] = dc_field(default_factory=dict)
    steps: dict[str, list[int]] = dc_field(default_factory=dict)
    failures: dict[str, list[str | None]] = dc_field(default_factory=dict)
    environment: dict = dc_field(default_factory=dict)

    @property
    def labels(self) -> list[str]:
        return list(self.errors or self.wall_times)

    def density_errors(self, label: str) -> np.ndarray:
        return np.array([np.nan if e is None else e["rho"] for e in self.errors[label]])

    def rates(self, label: str) -> np.ndarray:
        """log2(e_k / e_{k+1}) between consecutive levels; NaN unless the grid doubles."""
        e = self.density_errors(label)
        out = np.full(len(self.grids) - 1, np.nan)
        for k in range(len(self.grids) - 1):
            if self.grids[k + 1] == 2 * self.grids[k]:
                out[k] = np.log2(e[k] / e[k + 1])
        return out

    def overall_rate(self, label: str) -> float:
        """Least-squares slope of -log(e) against log(N) over all levels."""
        e = self.density_errors(label)
        slope = np.polyfit(np.log(self.grids), np.log(e), 1)[0]
        return float(-slope)

    def merge(self, other: "CampaignResult") -> "CampaignResult":
        if other.grids != self.grids or other.benchmark != self.benchmark:
            raise ValueError("can only merge campaigns over the same benchmark and grids")
        for attr in ("errors", "wall_times", "steps", "failures"):
            getattr(self, attr).update(getattr(other, attr))
        self.environment = self.environment or other.environment
        return self


def _run_args(args):
    bench, config, cells = args
    return run_benchmark(bench, config, cells)


def run_many(jobs_list: Sequence[tuple[Benchmark, SchemeConfig, int]], jobs: int = 1) -> list[RunResult]:
    """Independent runs, optionally in ``jobs`` worker processes; results keep input order."""
    if jobs <= 1 or len(jobs_list) <= 1:
        return [_run_args(a) for a in jobs_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_args, jobs_list))


def convergence_study(
    bench: Benchmark,
    config: SchemeConfig,
    grids: Sequence[int] = DEFAULT_GRIDS,
    jobs: int = 1,
) -> CampaignResult:
    grids = list(grids)
    if any(b != 2 * a for a, b in zip(grids, grids[1:])):
        raise ValueError(f"grid levels must double, got {grids}")
    runs = run_many([(bench, config, n) for n in grids], jobs)
    label = config.label()
    return CampaignResult(
        benchmark=bench.name,
        grids=grids,
        errors={label: [r.errors() if r.ok else None for r in runs]},
        wall_times={label: [r.wall_time for r in runs]},
        steps={label: [r.steps for r in runs]},
        failures={label: [r.failure for r in runs]},
    )


def timing_study(
    bench: Benchmark,
    configs: Sequence[SchemeConfig],
    grids: Sequence[int] = (1600, 3200),
    repetitions: int = 3,
) -> CampaignResult:
    """Median wall time per (scheme, grid).

    Runs are serial; each (scheme, grid) gets one discarded warm-up run and
    the repetitions of different schemes are interleaved so that slow drifts
    of the machine load hit every scheme alike.
    """
    if repetitions < 3:
        raise ValueError("timing needs at least 3 repetitions")
    grids = list(grids)
    labels = [c.label() for c in configs]
    samples = {lab: [[] for _ in grids] for lab in labels}
    steps = {lab: [0] * len(grids) for lab in labels}
    failures = {lab: [None] * len(grids) for lab in labels}
    for gi, n in enumerate(grids):
        for cfg in configs:
            run_benchmark(bench, cfg, n)
        for _ in range(repetitions):
            for cfg, lab in zip(configs, labels):
                r = run_benchmark(bench, cfg, n)
                samples[lab][gi].append(r.wall_time)
                steps[lab][gi] = r.steps
                failures[lab][gi] = r.failure
    return CampaignResult(
        benchmark=bench.name,
        grids=grids,
        wall_times={lab: [statistics.median(s) for s in samples[lab]] for lab in labels},
        steps=steps,
        failures=failures,
        environment=environment(),
    )


# ---------------------------------------------------------------- output

def _fmt(value) -> str:
    if value is None or not np.isfinite(value):
        return ""
    return f"{float(value):.17g}"


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def profile_name(result: RunResult) -> str:
    return f"{result.benchmark.name}_{result.label}_{result.cells}.csv"


def write_profile(result: RunResult, path: Path) -> Path:
    rho, u, p = result.primitive()
    alpha = result.cell_alpha()
    alpha = [None] * len(rho) if alpha is None else alpha
    rows = zip(result.x, rho, u, p, result.energy(), result.mach(), alpha)
    return _write_rows(path, PROFILE_COLUMNS, rows)


def write_exact_profile(bench: Benchmark, mesh: Mesh, gas: GasModel, path: Path, t: float | None = None) -> Path:
    rho, u, p = bench.exact(mesh, gas, t)
    energy = 0.5 * rho * u * u + p / (gas.gamma - 1.0)
    c = np.sqrt(gas.gamma * p / np.where(rho > 0.0, rho, 1.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        mach = np.where(c > 0.0, u / c, np.nan)
    rows = zip(mesh.centers(), rho, u, p, energy, mach, [None] * len(rho))
    return _write_rows(path, PROFILE_COLUMNS, rows)


def write_alpha_profile(result: RunResult, path: Path) -> Path:
    """Per-interface alpha of the last step."""
    if result.alpha is None:
        raise ValueError("alpha profile needs an FVC run")
    return _write_rows(path, ("x", "alpha"), zip(result.mesh.interfaces(), result.alpha))


def write_invariants(result: RunResult, path: Path) -> Path:
    w_minus, w_plus = result.riemann_invariants()
    return _write_rows(path, ("x", "w_minus", "w_plus"), zip(result.x, w_minus, w_plus))


def write_table1(campaign: CampaignResult, path: Path) -> Path:
    labels = [s for s in TABLE_SCHEMES if s in campaign.errors] + [
        s for s in campaign.errors if s not in TABLE_SCHEMES
    ]
    rows = [[n] + [campaign.density_errors(lab)[k] for lab in labels] for k, n in enumerate(campaign.grids)]
    rows = [[str(r[0])] + r[1:] for r in rows]
    _write_rows(path, ["cells"] + labels, rows)
    rate_rows = [
        [f"{a}-{b}"] + [campaign.rates(lab)[k] for lab in labels]
        for k, (a, b) in enumerate(zip(campaign.grids, campaign.grids[1:]))
    ]
    rate_rows.append(["overall"] + [campaign.overall_rate(lab) for lab in labels])
    _write_rows(path.with_name(path.stem + "_rates.csv"), ["levels"] + labels, rate_rows)
    return path


def write_table2(campaign: CampaignResult, path: Path) -> Path:
    labels = [s for s in TABLE_SCHEMES if s in campaign.wall_times] + [
        s for s in campaign.wall_times if s not in TABLE_SCHEMES
    ]
    rows = [[str(n)] + [campaign.wall_times[lab][k] for lab in labels] for k, n in enumerate(campaign.grids)]
    _write_rows(path, ["cells"] + labels, rows)
    with path.with_name("timing_environment.json").open("w") as fh:
        json.dump(campaign.environment, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def emit_artifacts(
    out_dir: str | Path,
    runs: Iterable[RunResult] = (),
    convergence: CampaignResult | None = None,
    timing: CampaignResult | None = None,
) -> list[Path]:
    """Profiles for every run (plus the exact profile per benchmark/grid and
    alpha / invariant diagnostics for FVC), and the L1 and timing tables."""
    out = Path(out_dir)
    written = []
    exact_done = set()
    for r in runs:
        written.append(write_profile(r, out / profile_name(r)))
        key = (r.benchmark.name, r.cells, r.config.gamma)
        if key not in exact_done:
            exact_done.add(key)
            name = f"{r.benchmark.name}_exact_{r.cells}.csv"
            written.append(write_exact_profile(r.benchmark, r.mesh, r.gas, out / name, r.field.t))
        if r.alpha is not None and r.ok:
            # fixed-alpha variants share a directory with the adaptive run
            suffix = "" if r.label == "fvc" else f"_{r.label}"
            written.append(write_alpha_profile(r, out / f"alpha_profile{suffix}.csv"))
            written.append(write_invariants(r, out / f"riemann_invariants{suffix}.csv"))
    if convergence is not None:
        written.append(write_table1(convergence, out / "table1_reproduction.csv"))
    if timing is not None:
        written.append(write_table2(timing, out / "table2_timing.csv"))
    return written


# ---------------------------------------------------------------- figures

@dataclass(frozen=True)
class FigureSpec:
    number: int
    benchmark: str
    kind: str  # profiles | sonic | alpha | invariants | convergence
    schemes: tuple = ("fvc",)
    title: str = ""


FIGURES = (
    FigureSpec(2, "sod_sonic", "profiles", ("fvc",), "Sod shock tube with sonic point"),
    FigureSpec(3, "sod_sonic", "sonic", ("fvc", "roe", "roe-eps0", "hll", "rusanov"), "Sonic point"),
    FigureSpec(4, "sod_sonic", "alpha", ("fvc", "fvc-alpha0.5", "fvc-alpha1"), "Choice of alpha"),
    FigureSpec(5, "sod_sonic", "invariants", ("fvc",), "Riemann invariants and alpha"),
    FigureSpec(6, "sod_sonic", "convergence", TABLE_SCHEMES, "L1 density error"),
    FigureSpec(7, "vacuum123", "profiles", ("fvc", "hll", "rusanov", "roe"), "Vacuum test"),
    FigureSpec(8, "vacuum123", "invariants", ("fvc",), "Riemann invariants and alpha, vacuum test"),
    FigureSpec(9, "blast_left", "profiles", ("fvc", "roe", "hll", "rusanov"), "Strong right shock"),
    FigureSpec(10, "blast_right", "profiles", ("fvc", "roe", "hll", "rusanov"), "Strong left shock"),
    FigureSpec(11, "contact_stationary", "profiles", ("fvc", "roe", "hll", "rusanov"), "Stationary contact"),
    FigureSpec(12, "contact_slow", "profiles", ("fvc", "roe", "hll", "rusanov"), "Slow contact"),
)


def config_for_label(bench: Benchmark, label: str) -> SchemeConfig:
    """Inverse of SchemeConfig.label for the labels used in FIGURES."""
    if label.startswith("fvc-alpha"):
        return bench.scheme_config("fvc", alpha_mode=AlphaMode(float(label[len("fvc-alpha"):])))
    if label.startswith("roe-eps"):
        return bench.scheme_config("roe", entropy_fix=float(label[len("roe-eps"):]))
    return bench.scheme_config(label)


_PLOT_HEADER = '''"""{title}: reads the CSV files next to this script and writes {png}."""
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = Path(__file__).resolve().parent


def load(name):
    return np.genfromtxt(HERE / name, delimiter=",", names=True)

'''

_PLOT_PROFILES = '''
exact = load({exact!r})
runs = {runs!r}
fig, axes = plt.subplots(2, 2, figsize=(10, 8))
for ax, var, name in zip(axes.flat, ("rho", "u", "p", "E"), ("density", "velocity", "pressure", "total energy")):
    ax.plot(exact["x"], exact[var], "k-", lw=1.2, label="exact")
    for label, csv_name in runs:
        data = load(csv_name)
        ax.plot(data["x"], data[var], ".", ms=3, label=label)
    ax.set_title(name)
    ax.set_xlabel("x")
axes[0, 0].legend()
fig.suptitle({title!r})
fig.tight_layout()
fig.savefig(HERE / {png!r}, dpi=150)
'''

_PLOT_SONIC = '''
exact = load({exact!r})
runs = {runs!r}
fig, axes = plt.subplots(2, 2, figsize=(10, 8))
for row, var in enumerate(("rho", "mach")):
    for col, zoom in enumerate((None, (0.35, 0.6))):
        ax = axes[row, col]
        ax.plot(exact["x"], exact[var], "k-", lw=1.2, label="exact")
        for label, csv_name in runs:
            data = load(csv_name)
            ax.plot(data["x"], data[var], ".-", ms=3, lw=0.6, label=label)
        if zoom:
            ax.set_xlim(*zoom)
        ax.set_title(("density" if var == "rho" else "Mach number") + (" (zoom)" if zoom else ""))
axes[0, 0].legend()
fig.suptitle({title!r})
fig.tight_layout()
fig.savefig(HERE / {png!r}, dpi=150)
'''

_PLOT_INVARIANTS = '''
inv = load("riemann_invariants.csv")
alpha = load("alpha_profile.csv")
fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4))
left.plot(inv["x"], inv["w_minus"], ".-", ms=3, label="u - 2c/(gamma-1)")
left.plot(inv["x"], inv["w_plus"], ".-", ms=3, label="u + 2c/(gamma-1)")
left.set_title("Riemann invariants")
left.legend()
right.plot(alpha["x"], alpha["alpha"], ".-", ms=3)
right.set_title("alpha at interfaces")
for ax in (left, right):
    ax.set_xlabel("x")
fig.suptitle({title!r})
fig.tight_layout()
fig.savefig(HERE / {png!r}, dpi=150)
'''

_PLOT_CONVERGENCE = '''
table = load("table1_reproduction.csv")
fig, ax = plt.subplots(figsize=(6, 5))
for name in table.dtype.names[1:]:
    ax.loglog(table["cells"], table[name], "o-", label=name)
ax.set_xlabel("cells")
ax.set_ylabel("L1 density error")
ax.legend()
ax.set_title({title!r})
fig.tight_layout()
fig.savefig(HERE / {png!r}, dpi=150)
'''


def write_plot_script(spec: FigureSpec, directory: Path, run_files: Sequence[tuple[str, str]], exact_file: str | None) -> Path:
    png = f"fig{spec.number:02d}.png"
    template = {
        "profiles": _PLOT_PROFILES,
        "alpha": _PLOT_PROFILES,
        "sonic": _PLOT_SONIC,
        "invariants": _PLOT_INVARIANTS,
        "convergence": _PLOT_CONVERGENCE,
    }[spec.kind]
    body = _PLOT_HEADER.format(title=spec.title, png=png) + template.format(
        title=spec.title, png=png, exact=exact_file, runs=[tuple(r) for r in run_files]
    )
    path = directory / f"plot_fig{spec.number:02d}.py"
    directory.mkdir(parents=True, exist_ok=True)
    path.write_text(body)
    return path


def figure_campaign(
    out_dir: str | Path,
    numbers: Iterable[int] | None = None,
    jobs: int = 1,
    grids: Sequence[int] = DEFAULT_GRIDS,
) -> dict[int, list[RunResult]]:
    """Run and write every figure reproduction into ``out_dir/figNN/``.

    Failed runs (Roe on the vacuum test) are kept: their last valid state is
    written and the failure is listed in ``failures.txt``.
    """
    out = Path(out_dir)
    wanted = set(numbers) if numbers is not None else {f.number for f in FIGURES}
    results: dict[int, list[RunResult]] = {}
    for spec in FIGURES:
        if spec.number not in wanted:
            continue
        bench = get_benchmark(spec.benchmark)
        directory = out / f"fig{spec.number:02d}"
        if spec.kind == "convergence":
            campaign = None
            for label in spec.schemes:
                part = convergence_study(bench, config_for_label(bench, label), grids, jobs)
                campaign = part if campaign is None else campaign.merge(part)
            write_table1(campaign, directory / "table1_reproduction.csv")
            write_plot_script(spec, directory, [], None)
            results[spec.number] = []
            continue
        configs = [config_for_label(bench, lab) for lab in spec.schemes]
        runs = run_many([(bench, c, bench.cells) for c in configs], jobs)
        emit_artifacts(directory, runs)
        failed = [f"{r.label}: step {r.failure_step}, t={r.failure_time:.6g}: {r.failure}" for r in runs if not r.ok]
        if failed:
            (directory / "failures.txt").write_text("\n".join(failed) + "\n")
        run_files = [(r.label, profile_name(r)) for r in runs]
        write_plot_script(spec, directory, run_files, f"{bench.name}_exact_{bench.cells}.csv")
        results[spec.number] = runs
    return results
