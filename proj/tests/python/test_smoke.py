import json
import os
import pathlib
import subprocess

import jsonschema
import numpy as np
import pytest

import pauc

SCHEMAS = pathlib.Path(os.environ.get("PAUC_SCHEMAS", pathlib.Path(__file__).parents[2] / "schemas"))


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


@pytest.fixture
def trial(tmp_path):
    rng = np.random.default_rng(3)
    path = tmp_path / "trial.csv"
    lines = ["id,status,a,b,c"]
    for i in range(40):
        s = i % 2
        row = rng.normal(size=3) + s * np.array([0.8, 0.3, 0.0])
        lines.append(f"s{i},{s}," + ",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def test_estimators_agree():
    rng = np.random.default_rng(1)
    for _ in range(50):
        k = int(rng.integers(1, 4))
        xi = rng.normal(size=(int(rng.integers(2, 30)), k))
        eta = rng.normal(size=(int(rng.integers(2, 30)), k)) + 0.4
        p, q = rng.uniform(0.05, 1.0), rng.uniform(0.0, 0.95)
        a = pauc.estimate_pauc(xi, eta, p, q)
        b = pauc.estimate_pauc_trimmed_mw(xi, eta, p, q)
        np.testing.assert_allclose(a["theta"], b["theta"], rtol=0, atol=1e-12)


def test_total_trim_is_pair_count():
    xi = np.array([0.1, 0.5, 0.9])
    eta = np.array([0.4, 1.0])
    assert pauc.estimate_pauc(xi, eta)["theta"][0] == pytest.approx(4 / 6)


def test_run_mct_shape():
    rng = np.random.default_rng(2)
    xi = rng.normal(size=(30, 3))
    eta = rng.normal(size=(30, 3)) + [0.0, 0.0, 1.5]
    res = pauc.run_mct(xi, eta, p=0.8, q=0.6, bootstrap_reps=300, seed=4)
    assert [h["label"] for h in res["hypotheses"]] == ["1-2", "1-3", "2-3"]
    assert res == pauc.run_mct(xi, eta, p=0.8, q=0.6, bootstrap_reps=300, seed=4)
    jsonschema.validate(res, schema("test_report")["$defs"]["mct"] | {"$defs": schema("test_report")["$defs"]})


def test_holm():
    adj = pauc.holm_adjust([0.382, 0.259, 0.069, 0.015, 0.051])
    np.testing.assert_allclose(adj, [0.518, 0.518, 0.207, 0.075, 0.204], atol=1e-12)


def test_presets_and_simulate():
    assert pauc.preset("table3")["scenario"]["contrast"]
    out = pauc.simulate("table1", n_grid=[15], sim_runs=3, bootstrap_reps=100, rows=[{"trim": [1, 0]}])
    experiment = schema("simulate_report")
    for report in out:
        jsonschema.validate(report, experiment["$defs"]["experiment"] | {"$defs": experiment["$defs"]})
    assert out[0]["runs"] == 3


def test_cli_json_validates(trial):
    code, out, err = pauc.run_cli("test", trial, "--grid", "1,0;0.8,0.6", "--bootstrap-reps", 200,
                                  "--out", "json")
    assert code == 0, err
    jsonschema.validate(json.loads(out), schema("test_report"))

    code, out, _ = pauc.run_cli("roc", trial, "--trim", "0.4,0.6")
    assert code == 0
    jsonschema.validate(json.loads(out), schema("roc_report"))

    code, out, _ = pauc.run_cli("simulate", "--preset", "table2", "--n", "20", "--runs", 2,
                                "--bootstrap-reps", 100, "--lambda", "0.107", "--grid", "1,0", "--out", "json")
    assert code == 0
    jsonschema.validate(json.loads(out), schema("simulate_report"))


def test_cli_exit_codes(trial, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("id,status,m\na,0,1\nb,2,3\n")
    code, _, err = pauc.run_cli("test", bad)
    assert code == 2 and "status '2'" in err
    assert pauc.run_cli("simulate", "--preset", "table1", "--runs", 0)[0] == 1


@pytest.mark.skipif("PAUC_CLI" not in os.environ, reason="standalone binary not built")
def test_standalone_binary(trial):
    proc = subprocess.run([os.environ["PAUC_CLI"], "test", str(trial), "--bootstrap-reps", "200"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.isascii()
