import json
import math

import pytest

from postselect_squeeze import CapacityExceeded, InvalidConfig
from postselect_squeeze import figures
from postselect_squeeze.cli import main
from postselect_squeeze.experiments import RunConfig, expand_values, fmt, run

PI = math.pi


def base_config(**over):
    cfg = {
        "geometry": {"kind": "chain", "n": 6, "step": 2 * PI},
        "state": {"kind": "css", "theta": 2.0, "k_L": [PI / 2, 0]},
        "detection": {"direction": "k_L", "nu": 1},
        "measurement": {"k_w": "same-as-detection"},
        "sweep": {"theta": {"linspace": [0.5, 3.0, 6]}},
        "engine": "auto",
    }
    cfg.update(over)
    return cfg


def test_expand_values():
    assert expand_values([1, 2], "x") == [1, 2]
    assert expand_values({"range": [2, 4]}, "x") == [2, 3, 4]
    assert expand_values({"linspace": [0, 1, 3]}, "x") == [0.0, 0.5, 1.0]
    assert expand_values({"logspace": [0, 2, 3]}, "x") == pytest.approx([1, 10, 100])
    with pytest.raises(InvalidConfig):
        expand_values({"grid": 3}, "x")


def test_fmt():
    assert fmt(None) == ""
    assert fmt(math.inf) == "inf"
    assert fmt(0.1) == "0.1"
    assert fmt(3) == "3"


def test_run_writes_csv(tmp_path):
    out = tmp_path / "a.csv"
    header, rows = run(RunConfig.from_dict(base_config()), out, threads=1)
    lines = out.read_text().splitlines()
    assert lines[0] == "theta,xi2,db,verdict,minimizer,weight,purity"
    assert len(lines) == 7
    # analytic route: purity is left empty
    assert lines[1].endswith(",")


def test_threads_do_not_change_output(tmp_path):
    cfg = RunConfig.from_dict(base_config(engine="exact", sweep={"theta": {"linspace": [0.5, 3.0, 5]}, "nu": [1, 2]}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(cfg, a, threads=1)
    run(cfg, b, threads=2)
    assert a.read_bytes() == b.read_bytes()


def test_auto_route_agrees_with_exact(tmp_path):
    for state in (
        {"kind": "css", "theta": 2.0, "k_L": [PI / 2, 0]},
        {"kind": "steady", "s": 0.7, "k_L": [PI / 3, 0]},
        {"kind": "population", "theta_bar": 1.9},
    ):
        sweep = {"nu": [1, 2, 3]} if state["kind"] == "population" else {"theta_w": [0.4, 1.5]}
        cfg = base_config(state=state, sweep=sweep,
                          geometry={"kind": "sphere", "n": 6, "radius": 2.0, "seed": 3})
        cfg["detection"] = {"direction": [0.8, 0.2], "nu": 1}
        _, fast = run(RunConfig.from_dict(cfg), None, threads=1)
        _, slow = run(RunConfig.from_dict(dict(cfg, engine="exact")), None, threads=1)
        for a, b in zip(fast, slow):
            assert a["purity"] is None and b["purity"] is not None
            assert a["xi2"] == pytest.approx(b["xi2"], abs=1e-9)


def test_analytic_rejected_without_closed_form():
    cfg = base_config(state={"kind": "steady", "s": 1.0, "k_L": [PI / 3, 0]}, engine="analytic", sweep={})
    cfg["detection"]["nu"] = 3
    with pytest.raises(InvalidConfig, match="no closed form"):
        RunConfig.from_dict(cfg)


def test_capacity_is_checked_up_front():
    cfg = base_config(geometry={"kind": "chain", "n": 14, "step": 1.0},
                      state={"kind": "steady", "s": 1.0, "k_L": [PI / 3, 0]}, sweep={})
    cfg["detection"]["nu"] = 2
    with pytest.raises(CapacityExceeded):
        RunConfig.from_dict(cfg)


@pytest.mark.parametrize("patch", [
    {"engine": "fast"},
    {"witness": "best"},
    {"sweep": {"phi": [1]}},
    {"geometry": {"kind": "cube", "n": 4}},
    {"state": {"kind": "css", "k_L": [0, 0]}, "sweep": {"nu": [1]}},
    {"measurement": {"k_w": "sideways"}},
    {"extra": 1},
])
def test_invalid_configs(patch):
    with pytest.raises(InvalidConfig):
        RunConfig.from_dict(base_config(**patch))


def test_same_as_detection_needs_one_direction():
    cfg = base_config(sweep={})
    cfg["detection"] = {"directions": [[0.1, 0], [0.2, 0]]}
    with pytest.raises(InvalidConfig):
        RunConfig.from_dict(cfg)
    cfg["measurement"] = {"k_w": [0.3, 0]}
    RunConfig.from_dict(cfg)


def test_load_reports_json_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"geometry": {"kind": "chain",}')
    with pytest.raises(InvalidConfig, match="line 1"):
        RunConfig.load(path)


def test_file_geometry(tmp_path):
    from postselect_squeeze.model import make_ring, write_geometry_csv

    gpath = tmp_path / "g.csv"
    write_geometry_csv(make_ring(5, 2.0), gpath)
    cfg = base_config(geometry={"kind": "file", "path": str(gpath)}, sweep={})
    _, rows = run(RunConfig.from_dict(cfg), None, threads=1)
    assert len(rows) == 1


# -- CLI ------------------------------------------------------------------------


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err


def parse(line):
    return dict(item.split("=", 1) for item in line.split())


def test_cli_single_examples(capsys):
    code, out, _ = run_cli(capsys, "single", "--analytic", "fully-mixed", "--n", "11", "--nu", "6")
    assert code == 0 and float(parse(out)["xi2"]) == pytest.approx(0.900990, abs=1e-6)
    code, out, _ = run_cli(capsys, "single", "--analytic", "fully-excited", "--n", "10", "--nu", "5")
    assert parse(out)["xi2"] == "0.0" and parse(out)["db"] == "inf"
    code, out, _ = run_cli(capsys, "single", "--analytic", "population-threshold", "--n", "101",
                           "--theta-bar", repr(PI / 2))
    assert out == "nu_threshold=51"


def test_cli_single_general(capsys):
    code, out, _ = run_cli(capsys, "single", "--n", "6", "--theta", "2.0", "--nu", "2")
    fields = parse(out)
    assert code == 0 and set(fields) >= {"xi2", "db", "verdict", "weight"}


@pytest.mark.parametrize("argv, code", [
    (["single", "--n", "6", "--state", "steady", "--s", "1", "--nu", "3", "--engine", "analytic"], 2),
    (["single", "--n", "30", "--state", "steady", "--s", "1", "--nu", "3"], 3),
    (["single", "--n", "6", "--state", "population", "--theta-bar", "0", "--nu", "2"], 4),
    (["single", "--n", "6", "--nu", "2"], 2),
    (["single", "--analytic", "fully-mixed", "--n", "6"], 2),
])
def test_cli_exit_codes(capsys, argv, code):
    assert run_cli(capsys, *argv)[0] == code


def test_cli_run_and_figure(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(base_config()))
    out = tmp_path / "o.csv"
    assert run_cli(capsys, "--threads", "1", "run", str(cfg), "--out", str(out))[0] == 0
    assert out.exists()
    assert run_cli(capsys, "figure", "fig3", "--out", str(tmp_path))[0] == 0
    assert (tmp_path / "fig3.csv").exists()


def test_cli_unknown_figure(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["figure", "fig9", "--out", "."])
    assert exc.value.code == 2


# -- figures --------------------------------------------------------------------


def test_fig2b_dicke_row():
    header, rows = figures.fig2b(threads=1)
    row = next(r for r in rows if r["theta"] == PI and r["nu"] == 5)
    assert row["xi2"] == 0.0


def test_fig3_small_angle_needs_more_photons():
    _, rows = figures.fig3()
    first = min((r for r in rows if r["nu"] == 10), key=lambda r: r["theta_bar"])
    assert first["verdict"] == "not-detected"
    # every angle is squeezed for some photon number
    by_angle = {}
    for r in rows:
        by_angle.setdefault(r["theta_bar"], []).append(r["xi2"])
    assert all(min(v) < 1 for v in by_angle.values())


def test_fig4_ring_columns():
    header, rows = figures.fig4b(threads=1)
    assert header[-2:] == ["xi2_codirectional", "intensity"]
    assert len(rows) == len(figures.THETA_W_FULL)
    header, rows = figures.fig4c(threads=1)
    assert {r["series"] for r in rows} == {"same", "spread"}
