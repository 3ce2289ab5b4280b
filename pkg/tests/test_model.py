import math

import numpy as np
import pytest

from postselect_squeeze import (
    DetectionPlan,
    EmitterState,
    Geometry,
    InvalidGeometry,
    InvalidParameter,
    WaveDirection,
    css_state,
    direction,
    make_chain,
    make_random_sphere,
    make_ring,
    population_state,
    steady_state,
    structure_factor,
)
from postselect_squeeze.model import X_HAT, Z_HAT, XorShift64Star, read_geometry_csv, write_geometry_csv


def test_direction_angles():
    assert np.allclose(direction(math.pi / 2).unit, [1, 0, 0])
    assert np.allclose(direction(0.0).unit, [0, 0, 1])
    assert np.allclose(direction(math.pi / 2, math.pi / 2).unit, [0, 1, 0])
    # in-plane angles past pi keep going round the xz circle
    assert np.allclose(direction(3 * math.pi / 2).unit, [-1, 0, 0])


def test_direction_must_be_unit():
    with pytest.raises(InvalidParameter):
        WaveDirection((1.0, 1.0, 0.0))
    assert np.allclose(WaveDirection.along((3, 0, 4)).unit, [0.6, 0, 0.8])
    with pytest.raises(InvalidParameter):
        WaveDirection.along((0, 0, 0))


@pytest.mark.parametrize("bad", [np.zeros((1, 3)), np.zeros((3, 2)), [[0, 0, np.nan], [1, 1, 1]]])
def test_geometry_validation(bad):
    with pytest.raises(InvalidGeometry):
        Geometry(bad)


def test_chain_and_ring_layout():
    g = make_chain(4, 2.0, X_HAT)
    assert np.allclose(g.positions[:, 0], [0, 2, 4, 6])
    r = make_ring(6, 3.0)
    assert np.allclose(np.linalg.norm(r.positions, axis=1), 3.0)
    assert np.allclose(r.positions[:, 1], 0.0)  # xz-plane
    with pytest.raises(InvalidGeometry):
        make_ring(4, 1.0, plane=((1, 0, 0), (1, 0, 0)))
    with pytest.raises(InvalidGeometry):
        make_chain(1, 1.0)


def test_sphere_is_reproducible_and_inside():
    a = make_random_sphere(50, 5.0, 7)
    b = make_random_sphere(50, 5.0, 7)
    c = make_random_sphere(50, 5.0, 8)
    assert a == b and a != c
    assert np.all(np.linalg.norm(a.positions, axis=1) <= 5.0)


def test_xorshift_known_stream():
    rng = XorShift64Star(0)
    vals = [rng.random() for _ in range(1000)]
    assert all(0.0 <= v < 1.0 for v in vals)
    assert abs(np.mean(vals) - 0.5) < 0.05
    rng2 = XorShift64Star(0)
    assert rng2.next_u64() == XorShift64Star(0).next_u64()


def test_structure_factor_limits():
    g = make_chain(8, 2 * math.pi)
    # same direction: full constructive interference
    assert structure_factor(g, np.zeros(3)) == pytest.approx(8 * 7)
    assert structure_factor(g, Z_HAT.unit - X_HAT.unit) == pytest.approx(8 * 7)
    # half-wavelength phase steps cancel pairwise
    h = make_chain(8, math.pi)
    assert structure_factor(h, Z_HAT.unit) == pytest.approx(-8, abs=1e-9)


def test_emitter_positivity():
    with pytest.raises(InvalidParameter):
        EmitterState(0.5, 0.6)
    with pytest.raises(InvalidParameter):
        EmitterState(1.2)
    e = EmitterState(0.5, 0.5)
    assert e.is_pure() and e.purity() == pytest.approx(1.0)


def test_state_builders():
    g = make_chain(5, 1.3, X_HAT)
    css = css_state(1.1, X_HAT, g)
    assert css.is_pure()
    assert np.allclose(css.ee, math.sin(0.55) ** 2)
    assert np.allclose(np.angle(css.eg), np.angle(np.exp(1j * g.phases(X_HAT))))
    st = steady_state(2.0, X_HAT, g)
    assert not st.is_pure()
    assert np.allclose(st.ee, 2.0 / 6.0)
    mixed = steady_state(math.inf, X_HAT, g)
    assert np.allclose(mixed.ee, 0.5) and np.allclose(mixed.eg, 0)
    pop = population_state(math.pi, g)
    assert np.allclose(pop.ee, 1.0)
    with pytest.raises(InvalidParameter):
        css_state(-0.1, X_HAT, g)
    with pytest.raises(InvalidParameter):
        steady_state(-1.0, X_HAT, g)


def test_steady_state_is_pure_only_at_zero_drive():
    g = make_chain(3, 1.0)
    assert steady_state(0.0, X_HAT, g).is_pure()
    for s in (0.01, 1.0, 100.0):
        e = steady_state(s, X_HAT, g).emitters[0]
        assert e.purity() < 1.0


def test_detection_plan():
    plan = DetectionPlan.repeated(X_HAT, 3)
    assert plan.nu == 3
    plan.check_against(4)
    with pytest.raises(InvalidParameter):
        plan.check_against(3)
    with pytest.raises(InvalidParameter):
        DetectionPlan.repeated(X_HAT, -1)
    with pytest.raises(InvalidParameter):
        DetectionPlan(("x",))


def test_geometry_csv_round_trip(tmp_path):
    g = make_random_sphere(12, 3.0, 11)
    path = tmp_path / "g.csv"
    write_geometry_csv(g, path)
    assert read_geometry_csv(path) == g
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(InvalidGeometry):
        read_geometry_csv(path)
