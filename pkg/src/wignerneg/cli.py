"""Command-line interface.

Quadratures are dimensionless with [x, p] = i (hbar = 1); every command
prints JSON (``"schema": 1``) unless ``--format csv`` is given. Exit codes:
0 success, 2 usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .fock import FockState
from .measurement import NoiseModel, SamplingError, TrajectoryConfig, recover_witness
from .regularized import QuadratureError, RegularizedStateParams, fb_moment, psi_norm_check, wigner_point
from .reproduce import reproduce_paper
from .statespec import as_density, parse_state, state_to_json
from .weyl import moment_table, wigner_grid
from .witness import (
    DEFAULT_C0_GRID,
    PolynomialWitness,
    WitnessReport,
    fb_search,
    general_order2_search,
    rotinv_fc_minimum,
    rotinv_fd_minimum,
    witness_value,
)

EXIT_USAGE = 2
EXIT_NUMERIC = 3

UNITS = "Quadratures x, p are dimensionless with [x, p] = i (hbar = 1)."


class UsageError(Exception):
    pass


def parse_witness(text: str) -> PolynomialWitness:
    """``fa:c0``, ``fb:c0``, ``fc:c30,c10`` or ``fd:c20,c0``."""
    family, _, args = text.partition(":")
    try:
        vals = [float(v) for v in args.split(",")] if args else []
    except ValueError:
        raise UsageError(f"bad witness coefficients in {text!r}") from None
    arity = {"fa": 1, "fb": 1, "fc": 2, "fd": 2}
    if family not in arity or len(vals) != arity[family]:
        raise UsageError(f"witness must be fa:c0, fb:c0, fc:c30,c10 or fd:c20,c0 (got {text!r})")
    return getattr(PolynomialWitness, family)(*vals)


def _pair(text: str, what: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{what} must be two comma-separated numbers") from None
    return a, b


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _cmd_moments(args):
    rho = as_density(parse_state(args.state))
    table = moment_table(rho, args.max_order)
    if args.format == "csv":
        return _csv(["n", "m", "value"], [[n, m, repr(v)] for (n, m), v in sorted(table.entries.items())])
    return {"state": args.state, **table.to_dict()}


def _cmd_wigner(args):
    rho = as_density(parse_state(args.state))
    grid = wigner_grid(rho, args.x0, args.x1, args.nx, args.p0, args.p1, args.np)
    if grid.bad is not None and grid.bad.any():
        raise ArithmeticError(f"{int(grid.bad.sum())} grid cells are not finite")
    if args.format == "csv":
        return grid.to_csv()
    return json.loads(grid.to_json())


def _report_rows(report: WitnessReport):
    return [["value", repr(report.value)], ["violated", report.violated]]


def _cmd_witness(args):
    if args.family == "fb":
        report = fb_search(args.c0, (args.offset, args.spacing), args.levels)
        if args.format == "csv":
            return _csv(["label", "amplitude"], [[n, repr(float(v))] for n, v in zip(report.basis, np.real(report.eigenvector))])
        return report.to_dict()
    if args.family == "scan":
        grid = np.round(np.arange(args.c0_min, args.c0_max + args.c0_step / 2, args.c0_step), 10).tolist()
        if not grid:
            raise UsageError("empty c0 grid")
        search = general_order2_search(tuple(grid), args.levels)
        if args.format == "csv":
            return _csv(["family", "offset", "spacing", "levels", "c0", "value"],
                        [[f, o, s, L, repr(c), repr(v)] for f, o, s, L, c, v in search.rows])
        return {"best": search.best.to_dict(), "minimum": {f: search.minimum(f) for f in ("fa", "fb")},
                "cases": len(search.rows)}
    if args.family == "rotinv":
        rho = as_density(parse_state(args.state))
        if args.kind == "fd":
            fit = rotinv_fd_minimum(rho)
            report = WitnessReport(PolynomialWitness.fd(fit.c20, fit.c0), fit.value, state=rho,
                                   params={"coefficients": list(fit.coefficients), "radial": list(fit.radial)})
        else:
            if not rho.is_diagonal():
                raise UsageError("rotationally invariant witnesses need a Fock-diagonal state")
            from .weyl import radial_moment

            r = [radial_moment(rho, j) for j in (1, 2, 3)]
            fit = rotinv_fc_minimum(*r)
            report = WitnessReport(PolynomialWitness.fc(fit.c30, fit.c10), fit.value, state=rho,
                                   params={"radial": r})
        if args.format == "csv":
            return _csv(["key", "value"], _report_rows(report))
        return report.to_dict()
    if args.family == "value":
        rho = as_density(parse_state(args.state))
        f = parse_witness(args.witness)
        report = WitnessReport(f, witness_value(rho, f), state=rho)
        if args.format == "csv":
            return _csv(["key", "value"], _report_rows(report))
        return report.to_dict()
    raise UsageError(f"unknown witness command {args.family!r}")


def _cmd_regularized(args):
    params = RegularizedStateParams(args.epsilon, c0=args.c0)
    out = {"epsilon": args.epsilon, "c0": args.c0, "fb_moment": fb_moment(params),
           "expected": args.c0**2 + 2 * args.epsilon - 1}
    if args.check_norm:
        out["norm"] = psi_norm_check(params)
    if args.wigner:
        x, p = _pair(args.wigner, "--wigner")
        out["wigner"] = {"x": x, "p": p, "value": wigner_point(params, x, p)}
    if args.format == "csv":
        return _csv(["key", "value"], [[k, repr(v)] for k, v in out.items() if not isinstance(v, dict)])
    return out


def _recovery_output(args, result, config):
    payload = {"config": config, **result.to_dict()}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
    if args.format == "csv":
        return _csv(["statistic", "value", "stderr"],
                    [[k, repr(v), repr(e)] for k, (v, e) in result.statistics.items()])
    return payload


def _cmd_simulate(args):
    rho = as_density(parse_state(args.state))
    sx, sp = _pair(args.noise, "--noise")
    noise = NoiseModel(sx, sp)
    result = recover_witness(rho, noise, parse_witness(args.witness), args.samples, args.seed,
                             bootstrap=args.bootstrap, threads=args.threads)
    config = {"state": args.state, "noise": noise.to_dict(), "samples": args.samples, "seed": args.seed}
    return _recovery_output(args, result, config)


def _cmd_simulate_record(args):
    rho = as_density(parse_state(args.state))
    sx, sp = _pair(args.noise, "--noise")
    cfg = TrajectoryConfig(args.omega, args.t0, args.dt, NoiseModel(sx, sp, args.s0), args.samples, args.seed)
    result = recover_witness(rho, cfg, parse_witness(args.witness), args.samples, args.seed,
                             bootstrap=args.bootstrap, threads=args.threads)
    return _recovery_output(args, result, {"state": args.state, **cfg.to_dict()})


def _cmd_reproduce(args):
    report = reproduce_paper(samples=args.samples, seed=args.seed)
    if args.format == "csv":
        return _csv(["claim_id", "location", "pass"], [[r.claim_id, r.location, r.passed] for r in report.rows])
    return report.to_dict()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--config", help="JSON file whose keys supply default option values")
    common.add_argument("--threads", type=int, default=1, help="parallel sampling chunks (default 1)")

    parser = argparse.ArgumentParser(prog="wignerneg", description=__doc__.split("\n\n")[0] + " " + UNITS)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", parents=[common], help="Wigner moments <x^n p^m>_W",
                       description="Wigner moments <x^n p^m>_W of a state. " + UNITS)
    p.add_argument("--state", required=True, help="fock:N | mix:fock:N@w,... | superpos:N:amp,...")
    p.add_argument("--max-order", type=int, default=4)
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("wigner", parents=[common], help="tabulate W(x, p)",
                       description="Tabulate W(x, p) on an inclusive grid. " + UNITS)
    p.add_argument("--state", required=True)
    for name, default in (("x0", -5.0), ("x1", 5.0), ("p0", -5.0), ("p1", 5.0)):
        p.add_argument(f"--{name}", type=float, default=default)
    p.add_argument("--nx", type=int, default=101)
    p.add_argument("--np", type=int, default=101)
    p.set_defaults(func=_cmd_wigner)

    p = sub.add_parser("witness", help="negativity witnesses <f^2>_W",
                       description="Negativity witnesses <f^2>_W. " + UNITS)
    wsub = p.add_subparsers(dest="family", required=True)
    q = wsub.add_parser("fb", parents=[common], help="minimize <(2xp + c0)^2>_W on a Fock lattice",
                        description="Minimize <(2xp + c0)^2>_W over states on the lattice offset + spacing*k. " + UNITS)
    q.add_argument("--levels", type=int, default=5)
    q.add_argument("--c0", type=float, default=0.0)
    q.add_argument("--offset", type=int, default=0)
    q.add_argument("--spacing", type=int, default=4)
    q = wsub.add_parser("scan", parents=[common], help="scan the order-2 families f_a, f_b",
                        description="Scan f_a and f_b over c0 on even/odd Fock lattices. " + UNITS)
    q.add_argument("--levels", type=int, default=9)
    q.add_argument("--c0-min", type=float, default=min(DEFAULT_C0_GRID))
    q.add_argument("--c0-max", type=float, default=max(DEFAULT_C0_GRID))
    q.add_argument("--c0-step", type=float, default=0.25)
    q = wsub.add_parser("rotinv", parents=[common], help="rotationally invariant witnesses f_c, f_d",
                        description="Optimal f_c (order 3) or f_d (order 4) witness for a Fock-diagonal state. " + UNITS)
    q.add_argument("--state", required=True)
    q.add_argument("--family", dest="kind", choices=("fc", "fd"), default="fd")
    q = wsub.add_parser("value", parents=[common], help="<f^2>_W for a given witness",
                        description="Evaluate <f^2>_W from Wigner moments. " + UNITS)
    q.add_argument("--state", required=True)
    q.add_argument("--witness", required=True, help="fa:c0 | fb:c0 | fc:c30,c10 | fd:c20,c0")
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("regularized", parents=[common], help="the regularized state approaching <f_b^2>_W = -1",
                       description="psi(x) ~ exp(-|x|/2)|x|^(eps-1/2); reports <(2xp+c0)^2>_W. " + UNITS)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--c0", type=float, default=0.0)
    p.add_argument("--wigner", help="x,p point at which to evaluate W")
    p.add_argument("--check-norm", action="store_true")
    p.set_defaults(func=_cmd_regularized)

    def sampling_options(q):
        q.add_argument("--state", required=True)
        q.add_argument("--noise", default="0.5,0.5", help="detector variances sigma_x^2,sigma_p^2 (each >= 0.5)")
        q.add_argument("--samples", type=int, required=True)
        q.add_argument("--seed", type=int, required=True)
        q.add_argument("--witness", default="fd:-12,26")
        q.add_argument("--bootstrap", type=int, default=200)
        q.add_argument("--out")

    p = sub.add_parser("simulate", parents=[common], help="noisy readout + deconvolution",
                       description="Sample W convolved with detector noise, deconvolve, evaluate a witness. " + UNITS)
    sampling_options(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("simulate-record", parents=[common], help="continuous position records + Fourier extraction",
                       description="Simulate x(t) records along harmonic trajectories with white noise of density "
                                   "S0 per unit time, extract (x0, p0) by Fourier projection, deconvolve. " + UNITS)
    sampling_options(p)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--t0", type=float, default=2 * math.pi)
    p.add_argument("--dt", type=float, default=2 * math.pi / 200)
    p.add_argument("--s0", type=float, default=0.0)
    p.set_defaults(func=_cmd_simulate_record)

    p = sub.add_parser("reproduce-paper", parents=[common], help="recompute every published value",
                       description="Recompute every published value and print pass/fail rows. " + UNITS)
    p.add_argument("--samples", type=int, default=10**7)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=_cmd_reproduce)
    return parser


def _config_argv(argv: list[str]) -> list[str]:
    """Expand ``--config file`` into flags placed before the user's own."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2 :]
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    flags = []
    for key, val in cfg.items():
        opt = "--" + key.replace("_", "-")
        if val is True:
            flags.append(opt)
        elif val is False or val is None:
            continue
        else:
            flags += [opt, ",".join(map(str, val)) if isinstance(val, list) else str(val)]
    split = 2 if rest and rest[0] == "witness" else 1
    return rest[:split] + flags + rest[split:]


def _has_nan(obj) -> bool:
    if isinstance(obj, float):
        return math.isnan(obj)
    if isinstance(obj, dict):
        return any(_has_nan(v) for v in obj.values())
    if isinstance(obj, (list, tuple)):
        return any(_has_nan(v) for v in obj)
    return False


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_config_argv(argv))
    except UsageError as exc:
        print(f"wignerneg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = args.func(args)
    except (UsageError, SamplingError, ValueError, KeyError) as exc:
        print(f"wignerneg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, QuadratureError, np.linalg.LinAlgError) as exc:
        print(f"wignerneg: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if isinstance(out, str):
        sys.stdout.write(out)
        return 0
    if _has_nan(out):
        print("wignerneg: numerical failure: result contains NaN", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(json.dumps({"schema": 1, **out}, indent=2, sort_keys=True, allow_nan=False) + "\n")
    if args.command == "reproduce-paper" and not out.get("passed", True):
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
