import math

import numpy as np
import pytest

from postselect_squeeze import (
    DetectionPlan,
    ImpossibleDetection,
    InvalidParameter,
    css_state,
    direction,
    make_chain,
    make_random_sphere,
    population_state,
    steady_state,
    structure_factor,
)
from postselect_squeeze import analytic, exact
from postselect_squeeze.model import X_HAT
from postselect_squeeze.witness import xi2_fixed

PI = math.pi


@pytest.mark.parametrize("n, nu", [(2, 1), (6, 0), (6, 3), (9, 4), (10, 9)])
def test_fully_excited_moments_match_exact(n, nu):
    g = make_chain(n, 2 * PI)
    ref = exact.postselected_moments(css_state(PI, X_HAT, g), DetectionPlan.repeated(X_HAT, nu), X_HAT)
    got = analytic.fully_excited_moments(n, nu)
    assert np.allclose(got.first, ref.first, atol=1e-10)
    assert np.allclose(got.second, ref.second, atol=1e-9)
    assert got.weight == pytest.approx(ref.weight)
    assert xi2_fixed(got).xi2 == pytest.approx(analytic.xi2_fully_excited(n, nu), abs=1e-12)


def test_fully_mixed_examples():
    assert analytic.xi2_fully_mixed(11, 6, 110) == pytest.approx(91 / 101)
    assert analytic.xi2_fully_mixed(2, 1, 2) == pytest.approx(0.75)
    with pytest.raises(InvalidParameter):
        analytic.xi2_fully_mixed(5, 0, 20)
    with pytest.raises(InvalidParameter):
        analytic.xi2_fully_mixed(5, 5, 20)


def test_fully_mixed_with_geometry_factor():
    # k_d != k_w: the closed form with the geometric structure factor
    n = 6
    g = make_random_sphere(n, 1.5, 4)
    kd, kw = direction(0.4), direction(1.3, 0.6)
    f = structure_factor(g, kd.unit - kw.unit)
    ref = exact.postselected_moments(steady_state(math.inf, kd, g), DetectionPlan.repeated(kd, 2), kw)
    got = analytic.population_moments(n, 2, PI / 2, f)
    assert np.allclose(got.second, ref.second, atol=1e-9)
    assert xi2_fixed(ref).xi2 == pytest.approx(analytic.xi2_fully_mixed(n, 2, f))


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("tb", [PI / 5, PI / 2, PI])
def test_population_moments_edge_cases(n, tb):
    g = make_chain(n, 2 * PI)
    for nu in range(1, n):
        ref = exact.postselected_moments(population_state(tb, g), DetectionPlan.repeated(X_HAT, nu), X_HAT)
        got = analytic.population_moments(n, nu, tb, n * (n - 1))
        assert np.allclose(got.first, ref.first, atol=1e-10)
        assert np.allclose(got.second, ref.second, atol=1e-9)
        assert got.weight == pytest.approx(ref.weight)


def test_population_weight_large_counts():
    assert analytic.population_weight(4, 2, PI) == 24.0
    assert analytic.population_weight(100, 99, PI) == math.inf
    w = analytic.population_weight(100, 99, 0.3)
    ref = math.exp(math.lgamma(100) + math.lgamma(101) + 198 * math.log(math.sin(0.15)))
    assert w == pytest.approx(ref, rel=1e-9)


def test_population_threshold():
    assert analytic.population_threshold(101, PI / 2) == 51
    # a hair above pi/2 moves the boundary just below 50
    assert analytic.population_threshold(101, 1.5708) == 50
    assert analytic.population_threshold(10, PI) == 1
    assert analytic.population_threshold(10, 0.05) == 9
    # boundary snaps onto n - 1, which is then out of reach
    assert analytic.population_threshold(10, 1e-6) is None
    with pytest.raises(ImpossibleDetection):
        analytic.population_threshold(10, 0.0)
    with pytest.raises(InvalidParameter):
        analytic.population_threshold(2, 1.0)


@pytest.mark.parametrize("n", [5, 11, 40])
def test_optimal_nu_is_best_integer(n):
    _, nu, xi2 = analytic.optimal_nu_fully_mixed(n)
    vals = [analytic.xi2_fully_mixed(n, k, n * (n - 1)) for k in range(1, n)]
    assert xi2 == pytest.approx(min(vals))
    assert vals[nu - 1] == pytest.approx(min(vals))


@pytest.mark.parametrize("theta", [0.3, 1.2, 2.0, 2.9, PI])
def test_homogeneous_css_matches_generic(theta):
    n = 7
    g = make_chain(n, 2 * PI)
    generic = analytic.single_photon_moments(css_state(theta, X_HAT, g), X_HAT)
    closed = analytic.homogeneous_css_moments(n, theta)
    assert np.allclose(closed.first, generic.first, atol=1e-10)
    assert np.allclose(closed.second, generic.second, atol=1e-9)


@pytest.mark.parametrize("s", [0.01, 0.5, 3.0, math.inf])
def test_single_photon_steady_matches_exact(s):
    g = make_random_sphere(6, 2.0, 9)
    k, kw = direction(PI / 3), direction(2.0, 0.5)
    st = steady_state(s, k, g)
    dense, w = exact.postselect(exact.realize(st), DetectionPlan((k,)), g)
    ref = exact.field_moments(dense, kw, g, w)
    got = analytic.single_photon_moments(st, k, kw)
    assert np.allclose(got.second, ref.second, atol=1e-9)
    assert got.weight == pytest.approx(w)
    assert analytic.single_photon_intensity(st, k, kw) == pytest.approx(exact.intensity(dense, kw, g))


def test_single_photon_ground_state_is_impossible():
    g = make_chain(4, 1.0)
    with pytest.raises(ImpossibleDetection):
        analytic.single_photon_moments(population_state(0.0, g), X_HAT)
    with pytest.raises(ImpossibleDetection):
        analytic.homogeneous_css_moments(4, 0.0)
