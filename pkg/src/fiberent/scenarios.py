"""Scenario configurations, named presets and sweep execution.

A scenario is a parameter set, an initial ground-manifold state and
either a time grid (time-series mode) or up to two sweep axes evaluated
at ``record_time`` (sweep mode).  Sweeps may include the evolution time
itself as an axis named ``t``.

All rates are in units of ``g``.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .dynamics import (
    INITIAL_STATES,
    DensityMatrix,
    TimeSeries,
    build_liouvillian,
    evolve_to,
    propagate,
    steady_state,
)
from .errors import ConfigError, DomainError
from .hilbert import build_basis
from .model import RATE_FIELDS, SystemParams, hamiltonian, lindblad_set
from .observables import RECORD_FIELDS, ObservableRecord, observe, photon_traced_fidelity

WORKERS_ENV = "FIBERENT_WORKERS"
TIME_AXIS = "t"
DEFAULT_STEP = 10.0
# Sweeps only need the final state; longer exact steps cut the matvec count.
SWEEP_STEP = 200.0

# Cavity parameters (g, kappa, gamma) / 2pi in MHz used for the experimental estimate.
EXPERIMENT_MHZ = (34.0, 4.1, 3.6)


@dataclass(frozen=True)
class SweepAxis:
    """One sweep axis.

    ``fields`` are moved together (``("beta", "kappa", "gamma")`` sweeps
    the three rates jointly).  With ``relative=True`` the axis values are
    fractional deviations: ``field = base * (1 + value)``.  Explicit
    ``values`` take precedence over ``lo/hi/points``.
    """

    fields: tuple[str, ...]
    lo: float = 0.0
    hi: float = 0.0
    points: int = 2
    relative: bool = False
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        if self.values is not None:
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.fields:
            raise ConfigError("sweep axis needs at least one field")
        for name in self.fields:
            if name not in RATE_FIELDS and name != TIME_AXIS:
                raise ConfigError(
                    f"cannot sweep {name!r}: expected a rate or drive amplitude {RATE_FIELDS} or {TIME_AXIS!r}"
                )
        if TIME_AXIS in self.fields and (len(self.fields) > 1 or self.relative):
            raise ConfigError("the time axis cannot be combined with other fields or be relative")
        if self.values is None and self.points < 1:
            raise ConfigError("sweep axis needs at least one point")
        if self.values is not None and not self.values:
            raise ConfigError("explicit sweep values must not be empty")

    @property
    def is_time(self) -> bool:
        return self.fields == (TIME_AXIS,)

    @property
    def name(self) -> str:
        return ("rel_" if self.relative else "") + "_".join(self.fields)

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.array(self.values)
        return np.linspace(self.lo, self.hi, self.points)

    def apply(self, params: SystemParams, value: float) -> SystemParams:
        changes = {}
        for name in self.fields:
            base = getattr(params, name)
            changes[name] = base * (1 + value) if self.relative else value
        try:
            return params.replace(**changes)
        except DomainError as exc:
            raise ConfigError(f"sweep point {self.name}={value}: {exc}") from exc

    def to_dict(self) -> dict:
        d = {"fields": list(self.fields), "relative": self.relative}
        if self.values is not None:
            d["values"] = list(self.values)
        else:
            d.update(lo=self.lo, hi=self.hi, points=self.points)
        return d


@dataclass(frozen=True)
class ScenarioConfig:
    params: SystemParams
    initial_state: str = "ket11"
    t_max: float = 1e4
    n_records: int = 1001
    sweep: tuple[SweepAxis, ...] = ()
    record_time: float | None = None
    output: str | None = None
    evaluate_steady: bool = False
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "sweep", tuple(self.sweep))
        if self.initial_state not in INITIAL_STATES:
            raise ConfigError(f"initial_state must be one of {INITIAL_STATES}, got {self.initial_state!r}")
        if not self.t_max > 0:
            raise ConfigError("t_max must be positive")
        if int(self.n_records) != self.n_records or self.n_records < 2:
            raise ConfigError("n_records must be an integer >= 2")
        if len(self.sweep) > 2:
            raise ConfigError("at most two sweep axes are supported")
        if self.sweep and self.record_time is None and not any(a.is_time for a in self.sweep):
            raise ConfigError("sweep mode needs record_time or a time axis")
        if self.record_time is not None and not self.record_time > 0:
            raise ConfigError("record_time must be positive")
        if sum(a.is_time for a in self.sweep) > 1:
            raise ConfigError("only one time axis allowed")

    @property
    def mode(self) -> str:
        return "sweep" if self.sweep else "evolve"

    def replace(self, **changes) -> ScenarioConfig:
        return replace(self, **changes)

    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, int(self.n_records))

    def to_dict(self) -> dict:
        d = {
            "params": self.params.as_dict(),
            "initial_state": self.initial_state,
            "t_max": self.t_max,
            "n_records": int(self.n_records),
            "sweep": [a.to_dict() for a in self.sweep],
            "record_time": self.record_time,
            "output": self.output,
            "evaluate_steady": self.evaluate_steady,
        }
        if self.name:
            d["name"] = self.name
        return d


# --------------------------------------------------------------------------
# JSON round trip


def _axis_from_dict(d: dict) -> SweepAxis:
    if not isinstance(d, dict):
        raise ConfigError(f"sweep axis must be an object, got {d!r}")
    d = dict(d)
    if "field" in d:
        d["fields"] = [d.pop("field")]
    allowed = {f.name for f in fields(SweepAxis)}
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown sweep axis keys {sorted(unknown)}")
    if "fields" not in d:
        raise ConfigError("sweep axis needs 'field' or 'fields'")
    return SweepAxis(**d)


def params_from_dict(d: dict) -> SystemParams:
    allowed = {f.name for f in fields(SystemParams)}
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown parameter names {sorted(unknown)}")
    try:
        return SystemParams(**d)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def config_from_dict(d: dict) -> ScenarioConfig:
    if not isinstance(d, dict):
        raise ConfigError("configuration must be a JSON object")
    d = dict(d)
    allowed = {f.name for f in fields(ScenarioConfig)}
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown configuration keys {sorted(unknown)}")
    d["params"] = params_from_dict(d.get("params", {}))
    d["sweep"] = tuple(_axis_from_dict(a) for a in d.get("sweep") or ())
    try:
        return ScenarioConfig(**d)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ScenarioConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    return config_from_dict(data)


# --------------------------------------------------------------------------
# presets

_FIG3_DRIVE = dict(omega=0.008, nu=1.0)


def _fig3(omega_mw_ratio, **rates):
    return SystemParams(omega_mw=omega_mw_ratio * 0.008, **_FIG3_DRIVE, **rates)


def _fig4(x, y):
    axes = tuple(SweepAxis((f,), 0.0, 0.06, 7) for f in (x, y))
    return ScenarioConfig(_fig3(0.25), sweep=axes, record_time=1.5e4)


def _exp_check():
    g_mhz, kappa_mhz, gamma_mhz = EXPERIMENT_MHZ
    kappa = kappa_mhz / g_mhz
    params = SystemParams(nu=0.9, omega=0.015, omega_mw=0.36 * 0.015,
                          beta=kappa, kappa=kappa, gamma=gamma_mhz / g_mhz)
    return ScenarioConfig(params, t_max=2e4, n_records=2001, evaluate_steady=True)


def _time_axis(t_max, points):
    return SweepAxis((TIME_AXIS,), 0.0, t_max, points)


_PRESETS = {
    "fig3a": (lambda: ScenarioConfig(_fig3(0.25, beta=0.1)),
              "fiber loss only (beta=0.1g): populations"),
    "fig3b": (lambda: ScenarioConfig(_fig3(0.25, beta=0.1)),
              "fiber loss only (beta=0.1g): fidelity"),
    "fig3b_inset": (lambda: ScenarioConfig(_fig3(0.25), sweep=(SweepAxis(("beta",), 0.0, 0.1, 11),),
                                           record_time=8e3),
                    "fidelity vs beta in [0, 0.1g] at t=8e3/g"),
    "fig3c": (lambda: ScenarioConfig(_fig3(0.2, kappa=0.1), t_max=1.6e4, n_records=1601),
              "cavity decay only (kappa=0.1g): populations"),
    "fig3d": (lambda: ScenarioConfig(_fig3(0.2, kappa=0.1), t_max=1.6e4, n_records=1601),
              "cavity decay only (kappa=0.1g): fidelity"),
    "fig3d_inset": (lambda: ScenarioConfig(_fig3(0.2), sweep=(SweepAxis(("kappa",), 0.0, 0.1, 11),),
                                           record_time=1.6e4),
                    "fidelity vs kappa in [0, 0.1g] at t=1.6e4/g"),
    "fig3e": (lambda: ScenarioConfig(_fig3(0.2, gamma=0.1), t_max=1.6e4, n_records=1601),
              "spontaneous emission only (gamma=0.1g): populations"),
    "fig3f": (lambda: ScenarioConfig(_fig3(0.2, gamma=0.1), t_max=1.6e4, n_records=1601),
              "spontaneous emission only (gamma=0.1g): fidelity"),
    "fig3f_inset": (lambda: ScenarioConfig(_fig3(0.2), sweep=(SweepAxis(("gamma",), 0.0, 0.1, 11),),
                                           record_time=1.6e4),
                    "fidelity vs gamma in [0, 0.1g] at t=1.6e4/g"),
    "fig4a": (lambda: _fig4("beta", "kappa"), "fidelity over (beta, kappa) in [0, 0.06g]^2, gamma=0, t=1.5e4/g"),
    "fig4b": (lambda: _fig4("beta", "gamma"), "fidelity over (beta, gamma) in [0, 0.06g]^2, kappa=0, t=1.5e4/g"),
    "fig4c": (lambda: _fig4("gamma", "kappa"), "fidelity over (gamma, kappa) in [0, 0.06g]^2, beta=0, t=1.5e4/g"),
    "fig5": (lambda: ScenarioConfig(
                _fig3(0.25),
                sweep=(SweepAxis(("beta", "kappa", "gamma"), values=(0.0, 0.01, 0.02, 0.04, 0.08, 0.12)),
                       _time_axis(2e4, 21))),
             "fidelity vs time for beta=kappa=gamma in {0, .01, .02, .04, .08, .12}g"),
    "fig6a": (lambda: ScenarioConfig(
                SystemParams(omega=0.008, omega_mw=0.002, nu=1.0, beta=0.04, kappa=0.04, gamma=0.04),
                sweep=(SweepAxis(("omega",), -0.5, 0.5, 11, relative=True),
                       SweepAxis(("omega_mw",), -0.5, 0.5, 11, relative=True)),
                record_time=2e4),
              "fidelity vs relative errors of Omega and Omega_MW (+-50%) at t=2e4/g"),
    "fig6b": (lambda: ScenarioConfig(
                SystemParams(omega=0.008, omega_mw=0.002, nu=1.0, beta=0.04, kappa=0.04, gamma=0.04),
                sweep=(SweepAxis(("nu",), 0.5, 1.5, 11), _time_axis(2e4, 21))),
              "fidelity vs nu in [0.5, 1.5]g and evolution time"),
    "exp_check": (_exp_check,
                  "experimental cavity parameters; fidelity at t=2e4/g and at steady state"),
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str) -> ScenarioConfig:
    try:
        factory, _ = _PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}") from None
    return factory().replace(name=name)


def preset_descriptions() -> dict[str, str]:
    return {name: desc for name, (_, desc) in _PRESETS.items()}


# --------------------------------------------------------------------------
# execution


@dataclass
class SweepGrid:
    """Fidelity over the sweep grid; arrays have one dimension per axis.

    ``trace_error`` and ``min_eig`` are sanity metrics of the evaluated
    states and are not written to the CSV.
    """

    axes: tuple[SweepAxis, ...]
    values: np.ndarray
    trace_error: np.ndarray | None = None
    min_eig: np.ndarray | None = None

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes) + ("fidelity",)

    def rows(self):
        grids = [a.grid() for a in self.axes]
        for idx in itertools.product(*(range(len(g)) for g in grids)):
            yield tuple(g[i] for g, i in zip(grids, idx)) + (self.values[idx],)

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows():
            writer.writerow([f"{v:.12g}" for v in row])


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    series: TimeSeries | None = None
    sweep: SweepGrid | None = None
    steady: ObservableRecord | None = None
    summary: dict = field(default_factory=dict)
    outputs: list[Path] = field(default_factory=list)


def _liouvillian(params: SystemParams):
    basis = build_basis(1)
    return basis, build_liouvillian(hamiltonian(basis, params), lindblad_set(basis, params))


def run_evolution(config: ScenarioConfig) -> TimeSeries:
    basis, liou = _liouvillian(config.params)
    rho0 = DensityMatrix.from_label(basis, config.initial_state)
    return propagate(rho0, liou, config.time_grid())


def _time_schedule(times: np.ndarray) -> tuple[float, int, int]:
    """Express sorted, uniform non-negative times as ``(step, first, count)`` multiples."""
    if times.size == 1:
        return float(times[0]), 1, 1
    step = float(times[1] - times[0])
    if step <= 0 or np.max(np.abs(np.diff(times) - step)) > 1e-9 * step:
        raise ConfigError("time axis must be uniform and increasing")
    first = times[0] / step
    if times[0] < 0 or abs(first - round(first)) > 1e-9:
        raise ConfigError("time axis must start at a non-negative multiple of its spacing")
    return step, int(round(first)), times.size


def _evaluate_point(args) -> list[tuple[float, float, float]]:
    """``(fidelity, trace_error, min_eig)`` at each requested time."""
    params_dict, initial_state, times = args
    params = SystemParams(**params_dict)
    basis, liou = _liouvillian(params)
    rho0 = DensityMatrix.from_label(basis, initial_state)
    times = np.asarray(times, dtype=float)
    if times.size == 1:
        rec = observe(evolve_to(rho0, liou, float(times[0]), SWEEP_STEP))
        return [(rec.fidelity, rec.trace_error, rec.min_eig)]
    step, first, count = _time_schedule(times)
    grid = step * np.arange(first + count)
    records = propagate(rho0, liou, grid).records[first:]
    return [(r.fidelity, r.trace_error, r.min_eig) for r in records]


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def run_sweep(config: ScenarioConfig, workers: int | None = None) -> SweepGrid:
    """Evaluate the fidelity over the sweep grid.

    Grid points are independent; with ``workers > 1`` they run in worker
    processes and are reassembled by grid index, so the result does not
    depend on the worker count.
    """
    if not config.sweep:
        raise ConfigError("configuration has no sweep axes")
    workers = default_workers() if workers is None else max(1, int(workers))
    axes = config.sweep
    param_axes = [a for a in axes if not a.is_time]
    time_axis = next((a for a in axes if a.is_time), None)
    times = time_axis.grid() if time_axis is not None else np.array([config.record_time])
    if time_axis is not None and np.any(times < 0):
        raise ConfigError("time axis values must be non-negative")

    jobs, keys = [], []
    for idx in itertools.product(*(range(len(a.grid())) for a in param_axes)):
        params = config.params
        for axis, i in zip(param_axes, idx):
            params = axis.apply(params, float(axis.grid()[i]))
        jobs.append((params.as_dict(), config.initial_state, tuple(times)))
        keys.append(idx)

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_point, jobs))
    else:
        results = [_evaluate_point(j) for j in jobs]

    shape = tuple(len(a.grid()) for a in axes)
    out = np.empty(shape + (3,))
    for idx, per_time in zip(keys, results):
        for k, triple in enumerate(per_time):
            it = iter(idx)
            full = tuple(k if a.is_time else next(it) for a in axes)
            out[full] = triple
    return SweepGrid(axes, out[..., 0], out[..., 1], out[..., 2])


def run_steady(config: ScenarioConfig) -> tuple[ObservableRecord, float]:
    """Steady-state observables and the photon-traced fidelity."""
    _, liou = _liouvillian(config.params)
    rho = steady_state(liou)
    return observe(rho), photon_traced_fidelity(rho)


def _write(path: Path, writer):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer(fh)
    return path


def write_steady_csv(fh, record: ObservableRecord, traced: float):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(RECORD_FIELDS + ("photon_traced_fidelity",))
    w.writerow([f"{v:.12g}" for v in (*record.as_tuple(), traced)])


def steady_path(output) -> Path:
    p = Path(output)
    return p.with_name(p.stem + "_steady" + (p.suffix or ".csv"))


def run_scenario(config: ScenarioConfig, output=None, workers: int | None = None) -> ScenarioResult:
    """Run a scenario and write its CSV file(s) when an output path is given.

    Time-series mode writes ``t,P00,PS,PT,P11,fidelity,trace_error,min_eig``;
    sweep mode writes the axis values followed by ``fidelity``.  With
    ``evaluate_steady`` the steady-state observables go to
    ``<output stem>_steady.csv``.
    """
    output = output if output is not None else config.output
    result = ScenarioResult(config)
    if config.mode == "sweep":
        grid = run_sweep(config, workers)
        result.sweep = grid
        result.summary["min_fidelity"] = float(np.min(grid.values))
        result.summary["max_fidelity"] = float(np.max(grid.values))
        if output:
            result.outputs.append(_write(Path(output), grid.write_csv))
    else:
        series = run_evolution(config)
        result.series = series
        result.summary["t_final"] = float(series.times[-1])
        result.summary["final_fidelity"] = series.records[-1].fidelity
        result.summary["final_photon_traced_fidelity"] = photon_traced_fidelity(series.final_state)
        if output:
            result.outputs.append(_write(Path(output), series.write_csv))
    if config.evaluate_steady:
        record, traced = run_steady(config)
        result.steady = record
        result.summary["steady_fidelity"] = record.fidelity
        result.summary["steady_photon_traced_fidelity"] = traced
        if output:
            result.outputs.append(_write(steady_path(output), lambda fh: write_steady_csv(fh, record, traced)))
    fids = [v for k, v in result.summary.items() if k in ("final_fidelity", "steady_fidelity")]
    if fids:
        result.summary["best_fidelity"] = max(fids)
    return result


def axis_from_string(text: str) -> SweepAxis:
    """Parse ``FIELDS:LO:HI:POINTS[:rel]``; joint fields are joined with ``+``."""
    parts = text.split(":")
    if len(parts) not in (4, 5) or (len(parts) == 5 and parts[4] != "rel"):
        raise ConfigError(f"axis {text!r} must look like FIELDS:LO:HI:POINTS[:rel]")
    try:
        lo, hi, points = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise ConfigError(f"axis {text!r} has non-numeric bounds") from None
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError(f"axis {text!r} bounds must be finite")
    return SweepAxis(tuple(parts[0].split("+")), lo, hi, points, relative=len(parts) == 5)


def dump_config(config: ScenarioConfig) -> str:
    return json.dumps(config.to_dict(), indent=2, sort_keys=True)
