import csv
import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from ablowitz_ladik.cli import (
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_OK,
    build_config,
    initial_state,
    main,
    parse_complex,
)
from ablowitz_ladik.dynamics import branch_of, integrate, make_rhs
from ablowitz_ladik.errors import ConfigError

CONFIGS = Path(__file__).parent.parent / "configs"
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


SMALL_SOLITON = {
    "model": {"reduction": "dnls"},
    "boundary": {"a": 1, "b": -1.7, "d": 1.1},
    "soliton": {"zetas": [[0.6, 1.9]], "Ds": [0.1], "j_min": -5, "j_max": 12,
                "t_min": -2, "t_max": 2, "n_times": 9},
}

ROBIN_SIM = {
    "model": {"reduction": "dnls"},
    "boundary": {"a": 1.2, "b": -0.4},
    "lattice": {"N": 5, "initial": {"kind": "random", "amplitude": 0.2}},
    "time": {"t_end": 1.0, "dt": 1e-3, "sample_stride": 100},
    "seed": 3,
}


# ---------------------------------------------------------------- config parsing


def test_parse_complex_forms():
    assert parse_complex(2, "x") == 2
    assert parse_complex([1, -2], "x") == 1 - 2j
    assert parse_complex({"re": 0.5, "im": 3}, "x") == 0.5 + 3j
    assert parse_complex({"im": 1}, "x") == 1j


@pytest.mark.parametrize("bad", [True, "1", [1, 2, 3], {"real": 1}, None])
def test_parse_complex_rejects(bad):
    with pytest.raises(ConfigError, match="where"):
        parse_complex(bad, "where")


@pytest.mark.parametrize("raw, field", [
    ({"time": {"dt": 0}}, "time.dt"),
    ({"time": {"dt": -1e-3}}, "time.dt"),
    ({"time": {"t_start": 1, "t_end": 1}}, "time.t_end"),
    ({"time": {"sample_stride": 0}}, "time.sample_stride"),
    ({"time": {"dt": "small"}}, "time.dt"),
    ({"lattice": {"N": 0}}, "lattice.N"),
    ({"lattice": {"N": 2.5}}, "lattice.N"),
    ({"lattice": {"topology": "ring"}}, "lattice.topology"),
    ({"lattice": {"picture": "both"}}, "lattice.picture"),
    ({"output": {"format": "xml"}}, "output.format"),
    ({"boundary": {"a": "one"}}, "boundary.a"),
    ({"mode": "soliton"}, "mode"),
    ({"model": []}, "model"),
])
def test_build_config_names_field(raw, field):
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        build_config(raw, "simulate")


def test_build_config_rejects_unreduced_boundary():
    raw = {"model": {"reduction": "dnls"}, "boundary": {"a": 1, "c": -0.3, "d": 0.3}}
    with pytest.raises(ConfigError, match="boundary"):
        build_config(raw, "simulate")


@pytest.mark.parametrize("patch, field", [
    ({"zetas": [[0.6, 1.9]], "Ds": []}, "soliton.Ds"),
    ({"f1inf_index": 9}, "soliton.f1inf_index"),
    ({"j_min": 0}, "soliton.j_min"),
    ({"zetas": ["x"], "Ds": [0.1]}, r"soliton.zetas\[0\]"),
])
def test_soliton_section_errors(patch, field):
    raw = json.loads(json.dumps(SMALL_SOLITON))
    raw["soliton"].update(patch)
    with pytest.raises(ConfigError, match=field):
        build_config(raw, "soliton")


def test_soliton_needs_focusing_dnls():
    with pytest.raises(ConfigError, match="model"):
        build_config({"model": {"reduction": "dnls", "nu": 1}}, "soliton")


def test_overrides_win():
    cfg = build_config({"seed": 4, "output": {"format": "csv"}}, "simulate",
                       {"seed": 9, "format": "json", "out": "x.json"})
    assert (cfg.seed, cfg.output_format, cfg.output_path) == (9, "json", "x.json")


def test_explicit_initial_length(tmp_path):
    cfg = build_config({"lattice": {"N": 2, "initial": {"kind": "explicit", "q": [0.1, 0.2]}}}, "simulate")
    with pytest.raises(ConfigError, match="lattice.initial.q"):
        initial_state(cfg)


# ---------------------------------------------------------------- simulate


def test_vacuum_simulation(tmp_path):
    raw = {"model": {"reduction": "dnls"}, "boundary": {"a": 1, "b": 0.3},
           "lattice": {"N": 4, "initial": {"kind": "zeros"}}, "time": {"t_end": 0.5, "sample_stride": 50}}
    out = tmp_path / "vac.csv"
    assert main(["simulate", "--config", _write(tmp_path, raw), "--out", str(out)]) == EXIT_OK
    header, data = _read_csv(out)
    assert header[:6] == ["t"] + [f"absq_{j}" for j in range(5)]
    assert not np.any(data[:, 1:6])
    for col in ("H_re", "I0_re", "I1_re"):
        v = data[:, header.index(col)]
        assert np.all(v == v[0])
    assert np.all(data[:, header.index("completed")] == 1)


def test_robin_simulation_matches_library(tmp_path):
    out = tmp_path / "robin.json"
    assert main(["simulate", "--config", _write(tmp_path, ROBIN_SIM), "--out", str(out)]) == EXIT_OK
    res = json.loads(out.read_text())["results"]
    q = np.array([[complex(*v) for v in row] for row in res["q"]])
    cfg = build_config(ROBIN_SIM, "simulate")
    s = initial_state(cfg)
    bp = cfg.boundary.with_branch(branch_of(s, cfg.boundary))
    tr = integrate(s.q, s.r, make_rhs("intrinsic", cfg.model, bp), 1.0, 1e-3, stride=100)
    assert np.allclose(q, tr.q, rtol=0, atol=1e-14)
    assert max(res["max_drift"].values()) < 1e-6


def test_extrinsic_simulation_runs(tmp_path):
    raw = dict(ROBIN_SIM, lattice={"N": 5, "picture": "extrinsic", "initial": {"kind": "random", "amplitude": 0.1}},
               boundary={"a": 1, "b": -1.7, "d": 1.1})
    out = tmp_path / "ext.json"
    assert main(["simulate", "--config", _write(tmp_path, raw), "--out", str(out)]) == EXIT_OK
    assert max(json.loads(out.read_text())["results"]["max_drift"].values()) < 1e-6


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_simulation_byte_reproducible(tmp_path, fmt):
    cfg = _write(tmp_path, ROBIN_SIM)
    out = tmp_path / f"run.{fmt}"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == EXIT_OK
    first = out.read_bytes()
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == EXIT_OK
    assert out.read_bytes() == first


def test_simulation_needs_output(tmp_path, capsys):
    assert main(["simulate", "--config", _write(tmp_path, ROBIN_SIM)]) == EXIT_CONFIG
    assert "output.path" in capsys.readouterr().err


def test_missing_and_invalid_config(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "nope.json"), "--out", "x"]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", "--config", str(bad), "--out", "x"]) == EXIT_CONFIG
    assert "invalid JSON" in capsys.readouterr().err


# ---------------------------------------------------------------- soliton


def test_soliton_run(tmp_path):
    out = tmp_path / "sol.json"
    assert main(["soliton", "--config", _write(tmp_path, SMALL_SOLITON), "--out", str(out)]) == EXIT_OK
    res = json.loads(out.read_text())["results"]
    assert res["sites"][0] == -5 and res["sites"][-1] == 12 and len(res["times"]) == 9
    assert max(res["closure_residual"]) < 1e-8
    assert res["branch"] in ("plus", "minus")
    Q = np.array([[complex(*v) for v in row] for row in res["Q"]])
    assert np.max(np.abs(Q)) > 0.1


def test_soliton_dirichlet(tmp_path):
    raw = dict(SMALL_SOLITON, boundary={"a": 1, "b": 0, "d": 0})
    out = tmp_path / "dir.csv"
    assert main(["soliton", "--config", _write(tmp_path, raw), "--out", str(out)]) == EXIT_OK
    header, data = _read_csv(out)
    assert np.max(data[:, header.index("absQ_-1")]) < 1e-12
    assert np.max(data[:, header.index("closure_residual")]) < 1e-8


def test_soliton_no_eigenvalues(tmp_path):
    raw = json.loads(json.dumps(SMALL_SOLITON))
    raw["soliton"].update(zetas=[], Ds=[])
    out = tmp_path / "zero.csv"
    assert main(["soliton", "--config", _write(tmp_path, raw), "--out", str(out)]) == EXIT_OK
    header, data = _read_csv(out)
    assert not np.any(data[:, 1:-1])


def test_soliton_uncertified_root(tmp_path, capsys):
    out = tmp_path / "x.csv"
    code = main(["soliton", "--config", _write(tmp_path, SMALL_SOLITON), "--out", str(out), "--f1inf-index", "4"])
    assert code == EXIT_NUMERIC
    assert "certifies no closure branch" in capsys.readouterr().err


def test_soliton_plot(tmp_path):
    out = tmp_path / "sol.csv"
    assert main(["soliton", "--config", _write(tmp_path, SMALL_SOLITON), "--out", str(out), "--plot"]) == EXIT_OK
    assert (tmp_path / "sol.png").read_bytes().startswith(PNG_MAGIC)


def test_simulate_plot(tmp_path):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--config", _write(tmp_path, ROBIN_SIM), "--out", str(out), "--plot"]) == EXIT_OK
    for name in ("sim.png", "sim_monitors.png"):
        assert (tmp_path / name).read_bytes().startswith(PNG_MAGIC)


# ---------------------------------------------------------------- verify


def test_verify_subset_json(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--suites", "algebra,scattering", "--out", str(out), "--format", "json"]) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["failed"] == [] and all(r["passed"] for r in rep["results"])
    assert {r["suite"] for r in rep["results"]} == {"algebra", "scattering"}


def test_verify_corrupted_k_minus(tmp_path, capsys):
    out = tmp_path / "v.csv"
    code = main(["verify", "--suites", "algebra", "--corrupt-k-minus", "1e-3", "--out", str(out), "--plot"])
    assert code == EXIT_NUMERIC
    err = capsys.readouterr().err
    assert "algebra/reflection_k_minus" in err and "yang_baxter" not in err
    assert (tmp_path / "v.png").read_bytes().startswith(PNG_MAGIC)


def test_verify_unknown_suite(capsys):
    assert main(["verify", "--suites", "algebra,bogus"]) == EXIT_CONFIG
    assert "bogus" in capsys.readouterr().err


# ---------------------------------------------------------------- sweep


def test_sweep(tmp_path):
    raw = dict(SMALL_SOLITON, sweep={"mode": "soliton", "parameter": "soliton.Ds", "values": [[0.1], [1.0]]})
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", _write(tmp_path, raw), "--out", str(out)]) == EXIT_OK
    with open(out / "summary.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["run", "soliton.Ds", "exit_code", "message"]
    assert [r[2] for r in rows[1:]] == ["0", "0"]
    assert (out / "run_000.csv").exists() and (out / "run_001.csv").exists()


def test_sweep_bad_value_reported(tmp_path):
    raw = dict(SMALL_SOLITON, sweep={"mode": "soliton", "parameter": "soliton.Ds", "values": [[0.1], ["x"]]})
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", _write(tmp_path, raw), "--out", str(out)]) == EXIT_CONFIG
    assert "soliton.Ds[0]" in (out / "summary.csv").read_text()


def test_sweep_needs_out(tmp_path):
    assert main(["sweep", "--config", _write(tmp_path, SMALL_SOLITON)]) == EXIT_CONFIG


# ---------------------------------------------------------------- shipped configs


@pytest.mark.parametrize("name, mode, suffix", [
    ("soliton_reflected.json", "soliton", ".csv"),
    ("soliton_dirichlet.json", "soliton", ".csv"),
    ("simulate_open.json", "simulate", ".csv"),
])
def test_shipped_configs(tmp_path, name, mode, suffix):
    out = tmp_path / ("out" + suffix)
    assert main([mode, "--config", str(CONFIGS / name), "--out", str(out)]) == EXIT_OK
    header, data = _read_csv(out)
    resid = [c for c in header if c == "closure_residual" or c.endswith("_drift")]
    assert resid
    for c in resid:
        tol = 1e-8 if c == "closure_residual" else 1e-6
        assert np.max(data[:, header.index(c)]) <= tol


def test_shipped_sweep(tmp_path):
    assert main(["sweep", "--config", str(CONFIGS / "sweep_norming.json"), "--out", str(tmp_path / "s")]) == EXIT_OK


def test_console_script_installed():
    assert shutil.which("ablowitz-ladik") is not None
