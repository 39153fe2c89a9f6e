"""Command-line front end.

Subcommands: simulate, find-orbit, scan, verify, zero-energy.
Configuration precedence: CLI flags > config file (flat key=value lines) >
built-in defaults.  Exit codes: 0 success, 1 verification failure, 2 input
validation, 3 bad bracket, 4 no convergence, 5 integration failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import analysis, dynamics, output, shooting
from .dynamics import ProblemSpec
from .errors import (
    BadBracket,
    DomainError,
    NoConvergence,
    NoRest,
    StepUnderflow,
)
from .integrator import EventKind, IntegratorSettings, integrate

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_BAD_BRACKET = 3
EXIT_NO_CONVERGENCE = 4
EXIT_INTEGRATION_FAILED = 5

_SETTINGS_KEYS = {
    "rel_tol": float,
    "abs_tol": float,
    "h_min": float,
    "h_max": float,
    "y_collision": float,
    "r_collision": float,
    "t_limit": float,
    "event_tol": float,
    "brake_speed2": float,
    "substeps": int,
}


def _read_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"malformed config line: {line!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _SETTINGS_KEYS:
                raise DomainError(f"unknown config key: {key!r}")
            values[key] = _SETTINGS_KEYS[key](val.strip())
    return values


def _settings(args, config: dict) -> IntegratorSettings:
    values = dict(config)
    if getattr(args, "tol", None) is not None:
        values["rel_tol"] = args.tol
        values["abs_tol"] = min(values.get("abs_tol", 1e-12), args.tol * 1e-2)
        values.setdefault("event_tol", min(1e-12, args.tol))
    if getattr(args, "t_limit", None) is not None:
        values["t_limit"] = args.t_limit
    return IntegratorSettings(**values)


def _config_comment(args) -> str:
    skip = {"func", "config"}
    items = {
        k: v for k, v in sorted(vars(args).items())
        if k not in skip and v is not None
    }
    return json.dumps(items, default=str)


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _check_height(E: float, h: float) -> None:
    if E < 0.0:
        h_max = -3.5 / E
        if not (0.0 < h < h_max):
            raise DomainError(
                f"height {h} is not admissible at E={E}; "
                f"admissible range is (0, {h_max})"
            )
    elif h <= 0.0:
        raise DomainError(f"height must be positive, got {h}")


def cmd_simulate(args) -> int:
    _check_height(args.energy, args.height)
    settings = _settings(args, _read_config(args.config))
    s0 = dynamics.initial_state(ProblemSpec(E=args.energy, h=args.height))
    traj = integrate(
        s0,
        settings,
        watch={
            EventKind.X_VELOCITY_ZERO,
            EventKind.MAGICAL_LINE_CROSS,
            EventKind.BRAKE_POINT,
        },
    )
    if args.format == "csv":
        text = output.trajectory_csv(traj)
    elif args.format == "json":
        text = output.trajectory_json(traj)
    else:
        text = output.trajectory_svg(traj, args.energy, _config_comment(args))
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_find_orbit(args) -> int:
    bracket = args.bracket
    if bracket is None:
        bracket = (
            shooting.DEFAULT_BRAKE_BRACKET
            if args.kind == "brake"
            else shooting.DEFAULT_BRACKET
        )
    settings = _settings(args, _read_config(args.config))
    if args.kind == "brake":
        rec = shooting.find_brake_orbit(
            args.energy, bracket, k=args.k, settings=settings
        )
    else:
        rec = shooting.find_langmuir_orbit(args.energy, bracket, settings)
    orbit = shooting.assemble_periodic_orbit(rec, settings)
    rec_json = output.orbit_record_json(rec)
    if args.out:
        _write(args.out + ".orbit.json", rec_json)
        _write(args.out + ".orbit.csv", output.trajectory_csv(orbit))
        _write(
            args.out + ".orbit.svg",
            output.trajectory_svg(orbit, args.energy, _config_comment(args)),
        )
    else:
        sys.stdout.write(rec_json)
    return EXIT_OK


def cmd_scan(args) -> int:
    lo, hi, n = args.grid
    if not (0.0 < lo < hi and n >= 1):
        raise DomainError(f"invalid grid {args.grid}")
    settings = _settings(args, _read_config(args.config))
    if n == 1:
        grid = [lo]
    else:
        grid = [lo + (hi - lo) * i / (n - 1) for i in range(int(n))]
    results = shooting.scan_alpha(args.energy, grid, settings)
    text = output.scan_csv(results)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    if not any(r.status == "ok" for r in results):
        raise NoRest(1, "every grid point")
    return EXIT_OK


def cmd_verify(args) -> int:
    settings = _settings(args, _read_config(args.config))
    reports = analysis.run_all_checks(settings)
    text = output.verdict_json(reports)
    if args.report:
        _write(args.report, text)
    else:
        sys.stdout.write(text)
    for r in reports:
        status = "pass" if r.passed else "FAIL"
        print(
            f"{status} {r.name}: worst={r.worst_violation:.3e} "
            f"tol={r.tolerance:.1e}",
            file=sys.stderr,
        )
    if all(r.passed for r in reports):
        return EXIT_OK
    return EXIT_VERIFY_FAILED


def cmd_zero_energy(args) -> int:
    settings = _settings(args, _read_config(args.config))
    reports = [
        analysis.check_zero_energy_monotone(args.t_end, settings),
        analysis.check_inverted_concavity(
            min(args.t_end, 0.3), settings
        ),
    ]
    text = output.verdict_json(reports)
    if args.report:
        _write(args.report, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY_FAILED


def _parse_bracket(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("bracket must be LO,HI")
    lo, hi = float(parts[0]), float(parts[1])
    return lo, hi


def _parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be LO,HI,N")
    return float(parts[0]), float(parts[1]), int(parts[2])


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="langmuir-lab",
        description="Planar two-electron (Langmuir) problem toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value settings file")
        p.add_argument("--tol", type=float, help="relative tolerance override")

    p = sub.add_parser("simulate", help="integrate one launch and export it")
    common(p)
    p.add_argument("--energy", type=float, required=True)
    p.add_argument("--height", type=float, required=True)
    p.add_argument("--t-limit", type=float, dest="t_limit")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("find-orbit", help="locate a periodic orbit")
    common(p)
    p.add_argument("--energy", type=float, required=True)
    p.add_argument("--bracket", type=_parse_bracket)
    p.add_argument("--kind", choices=("langmuir", "brake"), default="langmuir")
    p.add_argument("--k", type=int, help="rest count for brake orbits")
    p.add_argument("--out", help="output prefix for .orbit.{json,csv,svg}")
    p.set_defaults(func=cmd_find_orbit)

    p = sub.add_parser("scan", help="tabulate the shooting functional")
    common(p)
    p.add_argument("--energy", type=float, required=True)
    p.add_argument("--grid", type=_parse_grid, required=True,
                   help="LO,HI,N uniform height grid")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="run the full verification suite")
    common(p)
    p.add_argument("--report", help="verdict JSON path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zero-energy", help="zero-energy monotonicity checks")
    common(p)
    p.add_argument("--t-end", type=float, dest="t_end", default=50.0)
    p.add_argument("--report", help="verdict JSON path")
    p.set_defaults(func=cmd_zero_energy)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BadBracket as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_BRACKET
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (StepUnderflow, NoRest) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION_FAILED


if __name__ == "__main__":
    sys.exit(main())
