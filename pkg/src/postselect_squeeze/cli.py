"""Command-line front end.

    postselect-squeeze [--threads N] run CONFIG [--out CSV]
    postselect-squeeze [--threads N] figure NAME --out DIR
    postselect-squeeze [--threads N] single [flags]

Exit codes: 0 success, 2 invalid input, 3 capacity exceeded, 4 impossible
detection.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import analytic
from .errors import PostselectError
from .experiments import RunConfig, evaluate, fmt, run
from .figures import FIGURES, write_figure
from .witness import ENTANGLED, INDETERMINATE, NOT_DETECTED, to_db, xi2_fixed

ANALYTIC_CASES = (
    "fully-mixed",
    "fully-excited",
    "population",
    "population-threshold",
    "optimal-nu",
)


def _line(**items) -> str:
    return " ".join(f"{k}={fmt(v)}" for k, v in items.items())


def _verdict(xi2):
    if xi2 is None:
        return INDETERMINATE
    return ENTANGLED if xi2 < 1.0 else NOT_DETECTED


def _db(xi2):
    return None if xi2 is None else to_db(xi2)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise _UsageError("--analytic {} needs {}".format(
            args.analytic, ", ".join("--" + m for m in missing)))


class _UsageError(Exception):
    pass


def _single_analytic(args) -> str:
    case = args.analytic
    if case == "population-threshold":
        _need(args, "n", "theta-bar")
        return _line(nu_threshold=analytic.population_threshold(args.n, args.theta_bar))
    if case == "optimal-nu":
        _need(args, "n")
        nu_real, nu, xi2 = analytic.optimal_nu_fully_mixed(args.n)
        return _line(nu=nu, nu_real=nu_real, xi2=xi2, db=_db(xi2), verdict=_verdict(xi2))
    _need(args, "n", "nu")
    n, nu = args.n, args.nu
    weight = None
    if case == "fully-excited":
        xi2 = analytic.xi2_fully_excited(n, nu)
        weight = float(math.factorial(nu) ** 2 * math.comb(n, nu))
    elif case == "fully-mixed":
        f = n * (n - 1) if args.f is None else args.f
        xi2 = analytic.xi2_fully_mixed(n, nu, f)
        weight = analytic.population_weight(n, nu, math.pi / 2)
    else:
        _need(args, "theta-bar")
        if args.f is None:
            xi2 = analytic.xi2_population(n, nu, args.theta_bar)
            weight = analytic.population_weight(n, nu, args.theta_bar)
        else:
            rep = xi2_fixed(analytic.population_moments(n, nu, args.theta_bar, args.f))
            xi2, weight = rep.xi2, analytic.population_weight(n, nu, args.theta_bar)
    return _line(xi2=xi2, db=_db(xi2), verdict=_verdict(xi2), weight=weight)


def _single_config(args) -> RunConfig:
    if args.n is None:
        raise _UsageError("single needs --n (or --analytic CASE)")
    geometry = {"kind": args.geometry, "n": args.n}
    if args.geometry == "chain":
        geometry["step"] = args.step
        geometry["axis"] = [args.axis_polar, args.axis_azimuth]
    elif args.geometry == "ring":
        geometry.update(radius=args.radius, plane=args.plane)
    else:
        geometry.update(radius=args.radius, seed=args.seed)
    k_L = [args.k_l_polar, args.k_l_azimuth]
    state = {"kind": args.state, "k_L": k_L}
    if args.state == "css":
        state["theta"] = args.theta
    elif args.state == "steady":
        state["s"] = args.s
    else:
        state["theta_bar"] = args.theta_bar
    for key in ("theta", "s", "theta_bar"):
        if key in state and state[key] is None:
            raise _UsageError(f"--state {args.state} needs --{key.replace('_', '-')}")
    if args.nu is None:
        raise _UsageError("single needs --nu")
    d = "k_L" if args.theta_d is None else [args.theta_d, args.azimuth_d]
    measurement = {"k_w": "same-as-detection" if args.theta_w is None
                   else [args.theta_w, args.azimuth_w]}
    return RunConfig.from_dict({
        "geometry": geometry,
        "state": state,
        "detection": {"direction": d, "nu": args.nu},
        "measurement": measurement,
        "engine": args.engine,
        "witness": args.witness,
    })


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="postselect-squeeze",
        description="Squeezing and entanglement witnesses after photon postselection.",
    )
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes for sweeps (default: all CPUs)")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="evaluate a JSON sweep config and write CSV")
    r.add_argument("config")
    r.add_argument("--out", help="CSV path (overrides the config's output field)")

    f = sub.add_parser(
        "figure",
        help="write baked-in figure data",
        description="Figure data sets; grids and parameters are listed in "
                    "postselect_squeeze.figures.",
    )
    f.add_argument("name", choices=sorted(FIGURES))
    f.add_argument("--out", required=True, help="output directory")

    s = sub.add_parser("single", help="evaluate one point and print key=value pairs")
    s.add_argument("--analytic", choices=ANALYTIC_CASES)
    s.add_argument("--n", type=int)
    s.add_argument("--nu", type=int)
    s.add_argument("--theta-bar", type=float)
    s.add_argument("--f", type=float, help="structure factor (default n(n-1))")
    s.add_argument("--geometry", choices=("chain", "ring", "sphere"), default="chain")
    s.add_argument("--step", type=float, default=2 * math.pi)
    s.add_argument("--axis-polar", type=float, default=0.0)
    s.add_argument("--axis-azimuth", type=float, default=0.0)
    s.add_argument("--radius", type=float, default=2 * math.pi)
    s.add_argument("--plane", choices=("xy", "xz", "yz"), default="xz")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--state", choices=("css", "steady", "population"), default="css")
    s.add_argument("--theta", type=float)
    s.add_argument("--s", type=float)
    s.add_argument("--k-l-polar", type=float, default=math.pi / 2)
    s.add_argument("--k-l-azimuth", type=float, default=0.0)
    s.add_argument("--theta-d", type=float, help="detection polar angle (default: drive)")
    s.add_argument("--azimuth-d", type=float, default=0.0)
    s.add_argument("--theta-w", type=float, help="measurement polar angle (default: detection)")
    s.add_argument("--azimuth-w", type=float, default=0.0)
    s.add_argument("--engine", choices=("exact", "analytic", "auto"), default="auto")
    s.add_argument("--witness", choices=("fixed", "optimal"), default="fixed")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            cfg = RunConfig.load(args.config)
            if not (args.out or cfg.output):
                parser.error("run needs --out or an 'output' field in the config")
            _, rows = run(cfg, args.out, args.threads)
            print(f"rows={len(rows)} out={args.out or cfg.output}")
        elif args.command == "figure":
            print(f"out={write_figure(args.name, args.out, args.threads)}")
        else:
            if args.analytic:
                print(_single_analytic(args))
            else:
                row = evaluate(_single_config(args), {})
                print(_line(xi2=row["xi2"], db=row["db"], verdict=row["verdict"],
                            weight=row["weight"], minimizer=row["minimizer"],
                            purity=row["purity"]))
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PostselectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
