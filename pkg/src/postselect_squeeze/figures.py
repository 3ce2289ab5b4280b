"""Baked-in figure data sets.

Each builder returns ``(header, rows)``; :func:`write_figure` writes
``<out>/<name>.csv``.  Grids are fixed constants so the output is
reproducible byte for byte:

fig2a  chain along z (step 2 pi), CSS driven along x, nu = 1 detected and
       measured along x, analytic engine.  N in FIG2A_N, theta in THETA_GRID.
fig2b  same chain with N = 10, nu = 1..8 detections, exact pure engine.
fig2c  same chain, steady state driven at polar pi/3, nu = 1 along the drive,
       analytic engine.  N in FIG2C_N, s in S_GRID.
fig2d  N = 10 steady state, nu in FIG2D_NU, exact mixed engine with purity.
fig3   sphere N = 100, radius 200 pi, population state, theta_bar in
       THETA_GRID, nu in FIG3_NU, closed form for k_d = k_w.
fig4a  same sphere, theta_bar = pi/3, nu = 50, theta_d in FIG4A_THETA_D,
       theta_w in THETA_W_HALF, closed form with the geometric structure factor.
fig4b  ring N = 10 (radius 2 pi, xz-plane), CSS theta = 3 pi/4 driven at
       polar pi/4, nu = 5 along the drive, theta_w in THETA_W_FULL.  Extra
       columns: xi2_codirectional (detection and measurement both at theta_w)
       and intensity (after one detection along the drive).
fig4c  same ring, nu in {1, 3, 5}; series "same" detects every photon along
       the drive, series "spread" detects photon j at FIG4C_ANGLES[j].
"""
from __future__ import annotations

import math
from functools import partial

import numpy as np

from . import analytic, exact
from .errors import InvalidConfig
from .experiments import RESULT_COLUMNS, parallel_map, write_csv
from .model import (
    X_HAT,
    DetectionPlan,
    css_state,
    direction,
    make_chain,
    make_random_sphere,
    make_ring,
    steady_state,
    structure_factor,
)
from .witness import xi2_fixed

PI = math.pi
STEP = 2 * PI
THETA_GRID = [float(x) for x in np.linspace(PI / 180, PI, 180)]
S_GRID = [float(x) for x in np.logspace(-3, 3, 61)]
THETA_W_HALF = [float(x) for x in np.linspace(0.0, PI, 181)]
THETA_W_FULL = [float(x) for x in np.linspace(0.0, 2 * PI, 361)]

FIG2A_N = (50, 100, 200, 400, 800)
FIG2B_NU = tuple(range(1, 9))
FIG2C_N = (10, 50, 100, 200, 400, 800)
FIG2C_THETA_L = PI / 3
FIG2D_NU = (0, 1, 3, 5, 8)
SPHERE_N = 100
SPHERE_RADIUS = 200 * PI
SPHERE_SEED = 2025
FIG3_NU = (10, 20, 30, 40, 50, 60, 70, 80, 90, 99)
FIG4A_THETA_D = (PI / 4, PI / 2, 3 * PI / 4)
RING_N = 10
RING_RADIUS = 2 * PI
RING_THETA = 3 * PI / 4
RING_THETA_L = PI / 4
FIG4B_NU = 5
FIG4C_NU = (1, 3, 5)
FIG4C_ANGLES = (0.0, PI / 3, PI / 2, 3 * PI / 2, PI)


def _row(report, weight, purity=None, **values):
    row = dict(values)
    row.update(
        xi2=report.xi2,
        db=report.db,
        verdict=report.verdict,
        minimizer=report.minimizer_label,
        weight=weight,
        purity=purity,
    )
    return row


def _incremental(initial, geometry, k_d, k_w, keep):
    """Detect one photon at a time; yield ``(nu, moments, purity)`` for ``nu in keep``."""
    state = exact.realize(initial)
    weight = 1.0
    top = max(keep)
    for nu in range(top + 1):
        if nu > 0:
            state, w = exact.postselect(state, DetectionPlan((k_d,)), geometry)
            weight *= w
        if nu in keep:
            m = exact.field_moments(state, k_w, geometry, weight)
            yield nu, m, exact.purity(state)


# -- fig2 ---------------------------------------------------------------------


def _fig2a_point(args):
    n, theta = args
    g = make_chain(n, STEP)
    m = analytic.single_photon_moments(css_state(theta, X_HAT, g), X_HAT)
    return _row(xi2_fixed(m), m.weight, n=n, theta=theta)


def fig2a(threads=None):
    pts = [(n, t) for n in FIG2A_N for t in THETA_GRID]
    return ["n", "theta"] + list(RESULT_COLUMNS), parallel_map(_fig2a_point, pts, threads)


def _fig2b_point(theta):
    g = make_chain(10, STEP)
    rows = []
    for nu, m, p in _incremental(css_state(theta, X_HAT, g), g, X_HAT, X_HAT, set(FIG2B_NU)):
        rows.append(_row(xi2_fixed(m), m.weight, p, theta=theta, nu=nu))
    return rows


def fig2b(threads=None):
    chunks = parallel_map(_fig2b_point, THETA_GRID, threads)
    return ["theta", "nu"] + list(RESULT_COLUMNS), [r for c in chunks for r in c]


def _fig2c_point(args):
    n, s = args
    g = make_chain(n, STEP)
    k = direction(FIG2C_THETA_L)
    m = analytic.single_photon_moments(steady_state(s, k, g), k)
    return _row(xi2_fixed(m), m.weight, n=n, s=s)


def fig2c(threads=None):
    pts = [(n, s) for n in FIG2C_N for s in S_GRID]
    return ["n", "s"] + list(RESULT_COLUMNS), parallel_map(_fig2c_point, pts, threads)


def _fig2d_point(s):
    g = make_chain(10, STEP)
    k = direction(FIG2C_THETA_L)
    rows = []
    for nu, m, p in _incremental(steady_state(s, k, g), g, k, k, set(FIG2D_NU)):
        rows.append(_row(xi2_fixed(m), m.weight, p, s=s, nu=nu))
    return rows


def fig2d(threads=None):
    chunks = parallel_map(_fig2d_point, S_GRID, threads)
    return ["s", "nu"] + list(RESULT_COLUMNS), [r for c in chunks for r in c]


# -- fig3 / fig4a ---------------------------------------------------------------


def sphere():
    return make_random_sphere(SPHERE_N, SPHERE_RADIUS, SPHERE_SEED)


def fig3(threads=None):
    n = SPHERE_N
    f = float(n * (n - 1))
    rows = []
    for nu in FIG3_NU:
        for tb in THETA_GRID:
            m = analytic.population_moments(n, nu, tb, f)
            rows.append(_row(xi2_fixed(m), m.weight, nu=nu, theta_bar=tb))
    return ["nu", "theta_bar"] + list(RESULT_COLUMNS), rows


def fig4a(threads=None):
    g = sphere()
    rows = []
    for td in FIG4A_THETA_D:
        kd = direction(td)
        for tw in THETA_W_HALF:
            f = structure_factor(g, kd.unit - direction(tw).unit)
            m = analytic.population_moments(g.n, 50, PI / 3, f)
            rows.append(_row(xi2_fixed(m), m.weight, theta_d=td, theta_w=tw))
    return ["theta_d", "theta_w"] + list(RESULT_COLUMNS), rows


# -- fig4b / fig4c ------------------------------------------------------------


def ring():
    return make_ring(RING_N, RING_RADIUS)


def ring_state():
    g = ring()
    return g, css_state(RING_THETA, direction(RING_THETA_L), g)


def _fig4b_point(theta_w, detected):
    g, initial = ring_state()
    k_L = direction(RING_THETA_L)
    k_w = direction(theta_w)
    state, weight = detected
    m = exact.field_moments(state, k_w, g, weight)
    dense = exact.realize(initial)
    co, co_w = exact.postselect(dense, DetectionPlan.repeated(k_w, FIG4B_NU), g)
    co_m = exact.field_moments(co, k_w, g, co_w)
    one, _ = exact.postselect(dense, DetectionPlan((k_L,)), g)
    row = _row(xi2_fixed(m), m.weight, 1.0, theta_w=theta_w)
    row["xi2_codirectional"] = xi2_fixed(co_m).xi2
    row["intensity"] = exact.intensity(one, k_w, g)
    return row


def fig4b(threads=None):
    g, initial = ring_state()
    k_L = direction(RING_THETA_L)
    detected = exact.postselect(exact.realize(initial), DetectionPlan.repeated(k_L, FIG4B_NU), g)
    rows = parallel_map(partial(_fig4b_point, detected=detected), THETA_W_FULL, threads)
    header = ["theta_w"] + list(RESULT_COLUMNS) + ["xi2_codirectional", "intensity"]
    return header, rows


def fig4c(threads=None):
    g, initial = ring_state()
    k_L = direction(RING_THETA_L)
    dense = exact.realize(initial)
    rows = []
    for series in ("same", "spread"):
        for nu in FIG4C_NU:
            if series == "same":
                plan = DetectionPlan.repeated(k_L, nu)
            else:
                plan = DetectionPlan(tuple(direction(a) for a in FIG4C_ANGLES[:nu]))
            state, weight = exact.postselect(dense, plan, g)
            for tw in THETA_W_FULL:
                m = exact.field_moments(state, direction(tw), g, weight)
                rows.append(_row(xi2_fixed(m), weight, 1.0, series=series, nu=nu, theta_w=tw))
    return ["series", "nu", "theta_w"] + list(RESULT_COLUMNS), rows


FIGURES = {
    "fig2a": fig2a,
    "fig2b": fig2b,
    "fig2c": fig2c,
    "fig2d": fig2d,
    "fig3": fig3,
    "fig4a": fig4a,
    "fig4b": fig4b,
    "fig4c": fig4c,
}


def build_figure(name, threads=None):
    if name not in FIGURES:
        raise InvalidConfig(f"unknown figure {name!r} (choose from {', '.join(FIGURES)})")
    return FIGURES[name](threads)


def write_figure(name, out_dir, threads=None):
    header, rows = build_figure(name, threads)
    path = f"{out_dir}/{name}.csv"
    write_csv(path, header, rows)
    return path
