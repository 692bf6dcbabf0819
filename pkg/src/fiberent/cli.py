"""Command-line scenario runner.

Subcommands: ``spectra``, ``evolve``, ``sweep``, ``steady``, ``preset NAME``
and ``list-presets``.  A JSON configuration (``--config``) mirrors
:class:`~fiberent.scenarios.ScenarioConfig`; flags override its values
and are named after the configuration fields.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 spectrum verification failure.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import nullcontext
from pathlib import Path

from . import scenarios
from .errors import ConfigError, DegeneracyError, DomainError, NumericalError, VerificationError
from .hilbert import build_basis
from .model import AUTO_T4, RATE_FIELDS
from .spectra import dressed_couplings, verify_spectrum

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFICATION = 4


def _delta(text):
    if text == AUTO_T4:
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"delta must be a number or {AUTO_T4}") from None


def _add_param_flags(p):
    grp = p.add_argument_group("system parameters (units of g)")
    for name in RATE_FIELDS:
        flags = [f"--{name}"]
        if "_" in name:
            flags.append(f"--{name.replace('_', '-')}")
        grp.add_argument(*flags, dest=name, type=float, default=None)
    grp.add_argument("--delta", type=_delta, default=None, help=f"detuning w_e - w, or {AUTO_T4}")


def _add_run_flags(p, *, sweep=False):
    p.add_argument("--config", type=Path, help="JSON scenario configuration")
    _add_param_flags(p)
    p.add_argument("--initial_state", "--initial-state", dest="initial_state")
    p.add_argument("--t_max", "--t-max", dest="t_max", type=float)
    p.add_argument("--n_records", "--n-records", dest="n_records", type=int)
    p.add_argument("--record_time", "--record-time", dest="record_time", type=float)
    p.add_argument("--output", "-o", help="CSV path (stdout when omitted)")
    if sweep:
        p.add_argument("--axis", action="append", default=None, metavar="FIELDS:LO:HI:POINTS[:rel]",
                       help="sweep axis; repeat for a second axis; join fields with '+'")
        p.add_argument("--workers", type=int, default=None,
                       help=f"worker processes (default ${scenarios.WORKERS_ENV} or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fiberent", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectra", help="verify dressed states and write the coupling table")
    p.add_argument("--config", type=Path)
    _add_param_flags(p)
    p.add_argument("--output", "-o")

    _add_run_flags(sub.add_parser("evolve", help="time series of populations and fidelity"))
    _add_run_flags(sub.add_parser("sweep", help="fidelity over a parameter grid"), sweep=True)
    _add_run_flags(sub.add_parser("steady", help="steady-state observables"))

    p = sub.add_parser("preset", help="run a named scenario")
    p.add_argument("name")
    _add_run_flags(p, sweep=True)
    p.add_argument("--show", action="store_true", help="print the resolved configuration and exit")

    sub.add_parser("list-presets", help="list preset names")
    return parser


def _config_from_args(args, base: scenarios.ScenarioConfig | None) -> scenarios.ScenarioConfig:
    if getattr(args, "config", None) is not None:
        config = scenarios.load_config(args.config)
    elif base is not None:
        config = base
    else:
        config = scenarios.ScenarioConfig(scenarios.SystemParams())

    overrides = {n: getattr(args, n) for n in RATE_FIELDS + ("delta",) if getattr(args, n, None) is not None}
    if overrides:
        config = config.replace(params=scenarios.params_from_dict({**config.params.as_dict(), **overrides}))
    changes = {}
    for name in ("initial_state", "t_max", "n_records", "record_time", "output"):
        value = getattr(args, name, None)
        if value is not None:
            changes[name] = value
    if getattr(args, "axis", None):
        changes["sweep"] = tuple(scenarios.axis_from_string(a) for a in args.axis)
    return config.replace(**changes) if changes else config


def _open_output(path):
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="")
    return nullcontext(sys.stdout)


def _report(summary: dict, stream):
    for key, value in summary.items():
        print(f"{key}={value:.12g}", file=stream)


def _cmd_spectra(args) -> int:
    base = scenarios.ScenarioConfig(scenarios.SystemParams(omega=0.008, omega_mw=0.002))
    config = _config_from_args(args, base)
    basis = build_basis(1)
    report = verify_spectrum(basis, config.params, strict=False)
    if not report.ok:
        for line in report.failures:
            print(f"verification failure: {line}", file=sys.stderr)
        return EXIT_VERIFICATION
    print(f"spectrum verified: max residual {report.max_residual:.3g}, "
          f"max energy error {report.max_energy_error:.3g}", file=sys.stderr)
    with _open_output(args.output or config.output) as fh:
        dressed_couplings(basis, config.params).write_csv(fh)
    return EXIT_OK


def _run(config, args) -> int:
    output = config.output
    if output is None and config.evaluate_steady:
        raise ConfigError("scenarios with a steady-state evaluation need --output")
    if output is None:
        result = scenarios.run_scenario(config, workers=getattr(args, "workers", None))
        if result.sweep is not None:
            result.sweep.write_csv(sys.stdout)
        else:
            result.series.write_csv(sys.stdout)
        _report(result.summary, sys.stderr)
    else:
        result = scenarios.run_scenario(config, output, workers=getattr(args, "workers", None))
        _report(result.summary, sys.stdout)
        for path in result.outputs:
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def _cmd_evolve(args) -> int:
    config = _config_from_args(args, None).replace(sweep=())
    return _run(config, args)


def _cmd_sweep(args) -> int:
    config = _config_from_args(args, None)
    if not config.sweep:
        raise ConfigError("sweep needs at least one --axis or a configuration with 'sweep'")
    return _run(config, args)


def _cmd_steady(args) -> int:
    config = _config_from_args(args, None)
    record, traced = scenarios.run_steady(config)
    with _open_output(config.output) as fh:
        scenarios.write_steady_csv(fh, record, traced)
    return EXIT_OK


def _cmd_preset(args) -> int:
    config = _config_from_args(args, scenarios.preset(args.name))
    if args.show:
        print(scenarios.dump_config(config))
        return EXIT_OK
    return _run(config, args)


def _cmd_list(args) -> int:
    for name, desc in scenarios.preset_descriptions().items():
        print(f"{name:<12} {desc}")
    return EXIT_OK


_COMMANDS = {
    "spectra": _cmd_spectra,
    "evolve": _cmd_evolve,
    "sweep": _cmd_sweep,
    "steady": _cmd_steady,
    "preset": _cmd_preset,
    "list-presets": _cmd_list,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, DegeneracyError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
