import json

import numpy as np
import pytest

from bayesel import SQUARE_DATA
from bayesel.cli import RunConfig, derive_seed, main, run
from bayesel.io import load_csv, write_csv
from bayesel.models import DataError


@pytest.fixture
def square_csv(tmp_path):
    path = tmp_path / "square.csv"
    write_csv(path, SQUARE_DATA, ["v1", "v2"])
    return path


def test_load_square_with_header(square_csv):
    data = load_csv(square_csv)
    assert data.shape == (8, 2)
    assert np.array_equal(data, SQUARE_DATA)


def test_load_single_row(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("0.5,0.5\n")
    assert load_csv(p).shape == (1, 2)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("1,2\n3,4\n5\n", "line 3"),
        ("1,2\n3,abc\n", "line 2"),
        ("1,2\nnan,1\n", "line 2"),
        ("", "no data"),
        ("x,y\n", "no data"),
    ],
)
def test_load_errors(tmp_path, text, fragment):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(DataError, match=fragment):
        load_csv(p)


def test_write_csv_round_trip(tmp_path, rng):
    a = rng.normal(size=(20, 3)) * 10.0 ** rng.integers(-8, 8, size=(20, 3))
    write_csv(tmp_path / "a.csv", a, ["a", "b", "c"])
    assert np.array_equal(load_csv(tmp_path / "a.csv"), a)


def _base(square_csv, out, **kw):
    cfg = dict(data_path=str(square_csv), initial=[0.9, 0.95], n_samples=60, lf_steps=15,
               epsilon=0.06, seed=7, output_dir=str(out))
    cfg.update(kw)
    return RunConfig(**cfg)


def test_run_writes_outputs(square_csv, tmp_path):
    out = tmp_path / "out"
    assert run(_base(square_csv, out, burn_in=10, detailed=True)) == 0
    samples = load_csv(out / "samples.csv")
    assert samples.shape == (50, 2)
    assert (out / "samples.csv").read_text().splitlines()[0] == "theta_1,theta_2"
    report = json.loads((out / "summary.json").read_text())
    cfg = report["call"]["config"]
    for key, val in dict(n_samples=60, lf_steps=15, epsilon=0.06, seed=7, burn_in=10, detailed=True,
                         prior="normal:0,1", model="mean", initial=[0.9, 0.95], tol=1e-8).items():
        assert cfg[key] == val
    summ = report["summary"]
    assert summ["n_retained"] == 50 and 0 <= summ["acceptance_rate"] <= 1
    assert set(summ["quantiles"]) == {"2.5%", "25%", "50%", "75%", "97.5%"}
    proposed = load_csv(out / "proposed.csv")
    acc = load_csv(out / "acceptance.csv")
    assert proposed.shape == (59, 2) and acc.shape == (59, 1)
    assert acc.mean() == pytest.approx(summ["acceptance_rate"])
    # aborted trajectories end with a NaN momentum row
    traj_q = np.loadtxt(out / "trajectory_q.csv", delimiter=",", skiprows=1)
    traj_p = np.loadtxt(out / "trajectory_p.csv", delimiter=",", skiprows=1)
    assert traj_q.shape == traj_p.shape and traj_q.shape[1] == 4
    assert set(traj_q[:, 0].astype(int)) == set(range(1, 60))
    # last trajectory point of each update is the proposal
    for k in range(1, 60):
        rows = traj_q[traj_q[:, 0] == k]
        assert np.array_equal(rows[-1, 2:], proposed[k - 1])


def test_run_without_detailed_skips_trajectories(square_csv, tmp_path):
    out = tmp_path / "o"
    assert run(_base(square_csv, out)) == 0
    assert not (out / "trajectory_q.csv").exists()
    assert (out / "acf.csv").exists()


def test_seed_determinism_bytes(square_csv, tmp_path):
    for name in ("a", "b"):
        assert main(["run", "--data", str(square_csv), "--initial", "0.9,0.95", "--n-samples", "40",
                     "--lf-steps", "15", "--epsilon", "0.06", "--seed", "7", "--output", str(tmp_path / name)]) == 0
    assert (tmp_path / "a" / "samples.csv").read_bytes() == (tmp_path / "b" / "samples.csv").read_bytes()


def test_exit_codes(square_csv, tmp_path):
    out = str(tmp_path / "x")
    assert main(["run", "--data", str(square_csv), "--initial", "1.5,0", "--output", out]) == 3
    assert main(["run", "--data", str(tmp_path / "missing.csv"), "--initial", "0,0", "--output", out]) == 4
    assert main(["run", "--data", str(square_csv), "--initial", "0,0", "--prior", "cauchy", "--output", out]) == 2
    assert main(["run", "--data", str(square_csv), "--initial", "0,0", "--n-samples", "1", "--output", out]) == 2
    assert main(["run", "--data", str(square_csv), "--initial", "0,0,0", "--output", out]) == 2
    assert main(["run", "--data", str(square_csv), "--output", out]) == 2
    assert main(["run", "--data", str(square_csv), "--initial", "0,0", "--burn-in", "5",
                 "--n-samples", "5", "--output", out]) == 2


def test_stages_chain_warm_start(square_csv, tmp_path):
    out = tmp_path / "st"
    rc = main(["run", "--data", str(square_csv), "--initial", "0.9,0.95", "--seed", "3", "--output", str(out),
               "--stage", "n_samples=20,lf_steps=10,epsilon=0.02",
               "--stage", "n_samples=30,lf_steps=15,epsilon=0.06,burn_in=5"])
    assert rc == 0
    s1 = load_csv(out / "stage_1" / "samples.csv")
    s2 = load_csv(out / "stage_2" / "samples.csv")
    assert s1.shape == (20, 2) and s2.shape == (25, 2)
    rep2 = json.loads((out / "stage_2" / "summary.json").read_text())
    assert rep2["call"]["initial"] == s1[-1].tolist()
    assert rep2["call"]["lf_steps"] == 15


def test_config_file_and_env_output(square_csv, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"data_path": str(square_csv), "initial": [0.0, 0.0], "n_samples": 12,
                               "lf_steps": 5, "epsilon": [0.05, 0.04], "prior": "flat"}))
    monkeypatch.setenv("BAYESEL_OUTPUT_DIR", str(tmp_path / "envout"))
    assert main(["run", "--config", str(cfg)]) == 0
    rep = json.loads((tmp_path / "envout" / "summary.json").read_text())
    assert rep["call"]["epsilon"] == [0.05, 0.04] and rep["call"]["prior"] == "flat"


def test_multiple_chains(square_csv, tmp_path):
    out = tmp_path / "mc"
    assert run(_base(square_csv, out, n_samples=15, chains=2)) == 0
    a = (out / "chain_1" / "samples.csv").read_bytes()
    b = (out / "chain_2" / "samples.csv").read_bytes()
    assert a != b
    assert derive_seed(7, 0, 1) != derive_seed(7, 1, 1)


def test_synth_fertility_command(tmp_path):
    path = tmp_path / "fert.csv"
    assert main(["synth-fertility", "--n", "500", "--seed", "4", "--output", str(path)]) == 0
    data = load_csv(path)
    assert data.shape == (500, 2)
    assert main(["synth-fertility", "--n", "5", "--output", str(path)]) == 2


def test_logistic_model_via_cli(tmp_path):
    path = tmp_path / "fert.csv"
    main(["synth-fertility", "--n", "300", "--seed", "1", "--output", str(path)])
    out = tmp_path / "lg"
    rc = main(["run", "--data", str(path), "--model", "logistic-constrained", "--rate", "0.06179",
               "--prior", "normal:0,10000", "--initial=-3.2,0.55", "--n-samples", "5", "--lf-steps", "5",
               "--epsilon", "0.001", "--p-variance", "0.2", "--output", str(out)])
    assert rc == 0
    rep = json.loads((out / "summary.json").read_text())
    assert rep["call"]["model_options"] == {"rate": 0.06179}
