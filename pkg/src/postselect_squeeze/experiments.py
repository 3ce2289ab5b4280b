"""Config-driven sweeps, figure data and CSV output.

A run config is a JSON object::

    {
      "geometry":    {"kind": "chain", "n": 10, "step": 6.283185307179586, "axis": [0, 0]},
      "state":       {"kind": "css", "theta": 2.0, "k_L": [1.5707963267948966, 0]},
      "detection":   {"direction": "k_L", "nu": 3},
      "measurement": {"k_w": "same-as-detection"},
      "sweep":       {"theta": {"linspace": [0.1, 3.14159, 30]}},
      "engine":      "auto",
      "witness":     "fixed",
      "output":      "out.csv"
    }

Directions are ``[polar, azimuth]`` in radians (a bare number means azimuth
0) or the token ``"k_L"`` for the drive direction.  ``detection`` is either
``{"direction": d, "nu": k}`` or ``{"directions": [d1, d2, ...]}``.
``measurement.k_w`` is a direction or ``"same-as-detection"`` (valid when all
photons share one direction).  Sweep variables, expanded as a Cartesian
product in the order written: ``n``, ``theta``, ``s``, ``theta_bar``,
``nu``, ``theta_d``, ``theta_w``.  Values are a list, ``{"linspace": [a, b,
num]}``, ``{"logspace": [exp_a, exp_b, num]}`` (base 10) or ``{"range": [a,
b]}`` (integers, inclusive).
"""
from __future__ import annotations

import csv
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic, exact
from .errors import CapacityExceeded, InvalidConfig, PostselectError
from .model import (
    X_HAT,
    DetectionPlan,
    Geometry,
    WaveDirection,
    css_state,
    direction,
    make_chain,
    make_random_sphere,
    make_ring,
    population_state,
    read_geometry_csv,
    steady_state,
    structure_factor,
)
from .witness import xi2_fixed, xi2_optimal

SWEEP_VARIABLES = ("n", "theta", "s", "theta_bar", "nu", "theta_d", "theta_w")
RESULT_COLUMNS = ("xi2", "db", "verdict", "minimizer", "weight", "purity")
PLANES = {
    "xy": ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
    "xz": ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
    "yz": ((0.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
}


# -- formatting ---------------------------------------------------------------


def fmt(value) -> str:
    """CSV cell: shortest round-trip doubles, ``inf`` token, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(value)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(row.get(col)) for col in header])


# -- config -------------------------------------------------------------------


def _need(part, key, where):
    if not isinstance(part, dict) or key not in part:
        raise InvalidConfig(f"{where}: missing field {key!r}")
    return part[key]


def _number(value, where):
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidConfig(f"{where}: expected a number, got {value!r}")
    return float(value)


def _integer(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise InvalidConfig(f"{where}: expected an integer, got {value!r}")
    return int(value)


def _parse_direction(value, where, k_L=None) -> WaveDirection:
    if isinstance(value, str):
        if value == "k_L":
            if k_L is None:
                raise InvalidConfig(f"{where}: 'k_L' used but the state has no drive direction")
            return k_L
        raise InvalidConfig(f"{where}: unknown direction token {value!r}")
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return direction(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return direction(_number(value[0], where), _number(value[1], where))
    raise InvalidConfig(f"{where}: direction must be [polar, azimuth], got {value!r}")


def expand_values(part, where):
    if isinstance(part, (list, tuple)):
        return list(part)
    if isinstance(part, dict) and len(part) == 1:
        (kind, args), = part.items()
        try:
            if kind == "linspace":
                a, b, num = args
                return [float(x) for x in np.linspace(a, b, int(num))]
            if kind == "logspace":
                a, b, num = args
                return [float(x) for x in np.logspace(a, b, int(num))]
            if kind == "range":
                a, b = args
                return list(range(int(a), int(b) + 1))
        except (TypeError, ValueError) as exc:
            raise InvalidConfig(f"{where}: bad {kind} arguments {args!r}") from exc
    raise InvalidConfig(f"{where}: sweep values must be a list or linspace/logspace/range")


@dataclass
class RunConfig:
    geometry: dict
    state: dict
    detection: dict
    measurement: dict = field(default_factory=lambda: {"k_w": "same-as-detection"})
    sweep: dict = field(default_factory=dict)
    engine: str = "auto"
    witness: str = "fixed"
    output: str | None = None

    @classmethod
    def from_dict(cls, data) -> "RunConfig":
        if not isinstance(data, dict):
            raise InvalidConfig("config root must be an object")
        unknown = set(data) - {
            "geometry", "state", "detection", "measurement", "sweep", "engine", "witness", "output",
        }
        if unknown:
            raise InvalidConfig(f"unknown top-level fields: {sorted(unknown)}")
        cfg = cls(
            geometry=_need(data, "geometry", "config"),
            state=_need(data, "state", "config"),
            detection=_need(data, "detection", "config"),
            measurement=data.get("measurement", {"k_w": "same-as-detection"}),
            sweep=data.get("sweep", {}),
            engine=data.get("engine", "auto"),
            witness=data.get("witness", "fixed"),
            output=data.get("output"),
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(data)

    def points(self):
        names = list(self.sweep)
        grids = [expand_values(self.sweep[k], f"sweep.{k}") for k in names]
        return [dict(zip(names, combo)) for combo in itertools.product(*grids)]

    def validate(self) -> None:
        if self.engine not in ("exact", "analytic", "auto"):
            raise InvalidConfig(f"engine: expected exact|analytic|auto, got {self.engine!r}")
        if self.witness not in ("fixed", "optimal"):
            raise InvalidConfig(f"witness: expected fixed|optimal, got {self.witness!r}")
        if not isinstance(self.sweep, dict):
            raise InvalidConfig("sweep: expected an object")
        for name in self.sweep:
            if name not in SWEEP_VARIABLES:
                raise InvalidConfig(f"sweep.{name}: unknown variable (allowed: {SWEEP_VARIABLES})")
        points = self.points()
        if not points:
            raise InvalidConfig("sweep: produces no points")
        # every point must at least build and route
        for values in points:
            case = build_case(self, values)
            route(case, self.engine)


@dataclass
class Case:
    """One fully resolved sweep point."""

    values: dict
    geometry: Geometry
    state_kind: str
    state_param: float
    k_L: WaveDirection | None
    initial: object
    plan: DetectionPlan
    k_w: WaveDirection


def _merged(part, values, keys):
    part = dict(part)
    for k in keys:
        if k in values:
            part[k] = values[k]
    return part


def build_geometry(part, values=None) -> Geometry:
    values = values or {}
    part = _merged(part, values, ("n",))
    kind = _need(part, "kind", "geometry")
    if kind == "file":
        return read_geometry_csv(_need(part, "path", "geometry"))
    n = _integer(_need(part, "n", "geometry"), "geometry.n")
    if kind == "chain":
        axis = _parse_direction(part.get("axis", [0.0, 0.0]), "geometry.axis")
        return make_chain(n, _number(_need(part, "step", "geometry"), "geometry.step"), axis)
    if kind == "ring":
        plane = part.get("plane", "xz")
        if isinstance(plane, str):
            if plane not in PLANES:
                raise InvalidConfig(f"geometry.plane: expected one of {sorted(PLANES)}")
            plane = PLANES[plane]
        return make_ring(n, _number(_need(part, "radius", "geometry"), "geometry.radius"), plane)
    if kind == "sphere":
        return make_random_sphere(
            n,
            _number(_need(part, "radius", "geometry"), "geometry.radius"),
            _integer(_need(part, "seed", "geometry"), "geometry.seed"),
        )
    raise InvalidConfig(f"geometry.kind: expected chain|ring|sphere|file, got {kind!r}")


def build_case(cfg: RunConfig, values: dict) -> Case:
    try:
        geometry = build_geometry(cfg.geometry, values)
        st = _merged(cfg.state, values, ("theta", "s", "theta_bar"))
        kind = _need(st, "kind", "state")
        k_L = _parse_direction(st["k_L"], "state.k_L") if "k_L" in st else None
        if kind == "css":
            param = _number(_need(st, "theta", "state"), "state.theta")
            initial = css_state(param, k_L or X_HAT, geometry)
        elif kind == "steady":
            param = _number(_need(st, "s", "state"), "state.s")
            initial = steady_state(param, k_L or X_HAT, geometry)
        elif kind == "population":
            param = _number(_need(st, "theta_bar", "state"), "state.theta_bar")
            initial = population_state(param, geometry)
        else:
            raise InvalidConfig(f"state.kind: expected css|steady|population, got {kind!r}")

        det = cfg.detection
        if "directions" in det:
            dirs = [
                _parse_direction(d, f"detection.directions[{i}]", k_L)
                for i, d in enumerate(det["directions"])
            ]
            if "nu" in values or "theta_d" in values:
                raise InvalidConfig("sweeping nu/theta_d needs detection {direction, nu}")
        else:
            d = values.get("theta_d", _need(det, "direction", "detection"))
            kd = _parse_direction(d, "detection.direction", k_L)
            nu = _integer(values.get("nu", _need(det, "nu", "detection")), "detection.nu")
            if nu < 0:
                raise InvalidConfig("detection.nu must be >= 0")
            dirs = [kd] * nu
        plan = DetectionPlan(tuple(dirs))
        plan.check_against(geometry.n)

        meas = cfg.measurement if isinstance(cfg.measurement, dict) else {"k_w": cfg.measurement}
        if "theta_w" in values:
            k_w = direction(float(values["theta_w"]), float(meas.get("azimuth_w", 0.0)))
        else:
            kw_part = meas.get("k_w", "same-as-detection")
            if kw_part == "same-as-detection":
                if not dirs:
                    kw_part = "k_L" if k_L is not None else [math.pi / 2, 0.0]
                elif any(d != dirs[0] for d in dirs):
                    raise InvalidConfig(
                        "measurement: 'same-as-detection' needs a single detection direction"
                    )
                else:
                    kw_part = None
            k_w = dirs[0] if kw_part is None else _parse_direction(kw_part, "measurement.k_w", k_L)
    except InvalidConfig:
        raise
    except PostselectError as exc:
        raise InvalidConfig(f"point {values}: {exc}") from exc
    return Case(values, geometry, kind, param, k_L, initial, plan, k_w)


# -- routing ------------------------------------------------------------------


def _population_angle(case: Case):
    """``theta_bar`` if the initial state is coherence-free, else ``None``."""
    if case.state_kind == "population":
        return case.state_param
    if case.state_kind == "steady" and math.isinf(case.state_param):
        return math.pi / 2
    if case.state_kind == "css" and case.state_param == math.pi:
        return math.pi
    return None


def analytic_moments(case: Case):
    """Closed-form moments for ``case`` or ``None`` when no closed form applies."""
    plan = case.plan
    if plan.nu == 0:
        return None
    same_dir = all(d == plan.directions[0] for d in plan.directions)
    theta_bar = _population_angle(case)
    if same_dir and theta_bar is not None:
        kd = plan.directions[0]
        f = structure_factor(case.geometry, kd.unit - case.k_w.unit)
        return lambda: analytic.population_moments(case.geometry.n, plan.nu, theta_bar, f)
    if plan.nu == 1:
        return lambda: analytic.single_photon_moments(case.initial, plan.directions[0], case.k_w)
    return None


def route(case: Case, engine: str) -> str:
    closed = analytic_moments(case) is not None
    if engine == "analytic":
        if not closed:
            raise InvalidConfig(
                f"point {case.values}: no closed form for nu={case.plan.nu} "
                f"from a {case.state_kind} state; use engine exact or auto"
            )
        return "analytic"
    if engine == "auto" and closed:
        return "analytic"
    cap = exact.MAX_PURE if case.initial.is_pure() else exact.MAX_MIXED
    if case.geometry.n > cap:
        raise CapacityExceeded(
            f"point {case.values}: n={case.geometry.n} exceeds the exact-engine cap {cap}"
        )
    return "exact"


# -- evaluation ---------------------------------------------------------------


def evaluate(cfg: RunConfig, values: dict) -> dict:
    case = build_case(cfg, values)
    engine = route(case, cfg.engine)
    purity = None
    if engine == "analytic":
        m = analytic_moments(case)()
    else:
        dense = exact.realize(case.initial)
        out, weight = exact.postselect(dense, case.plan, case.geometry)
        m = exact.field_moments(out, case.k_w, case.geometry, weight)
        purity = exact.purity(out)
    rep = xi2_optimal(m) if cfg.witness == "optimal" else xi2_fixed(m)
    row = dict(values)
    row.update(
        xi2=rep.xi2,
        db=rep.db,
        verdict=rep.verdict,
        minimizer=rep.minimizer_label,
        weight=m.weight,
        purity=purity,
    )
    return row


def default_threads() -> int:
    return os.cpu_count() or 1


def parallel_map(func, items, threads=None):
    """Ordered map; ``threads > 1`` uses worker processes."""
    items = list(items)
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or len(items) <= 1:
        return [func(x) for x in items]
    chunk = max(1, len(items) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items, chunksize=chunk))


class _Evaluator:
    def __init__(self, cfg):
        self.cfg = cfg

    def __call__(self, values):
        return evaluate(self.cfg, values)


def run(cfg: RunConfig, output=None, threads=None):
    """Evaluate every sweep point and write the CSV; returns ``(header, rows)``."""
    rows = parallel_map(_Evaluator(cfg), cfg.points(), threads)
    header = list(cfg.sweep) + list(RESULT_COLUMNS)
    target = output or cfg.output
    if target:
        write_csv(target, header, rows)
    return header, rows

