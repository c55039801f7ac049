import csv
import io
import json

import pytest

from besovlab import cli
from besovlab.suites import CaseResult, SuiteResult

FN = "f_power_log:mu=0.5,delta=0"
SPACE = "n=1,p=2,q=2,alpha=0,s={}"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_norm_finite(capsys):
    code, out, _ = run(capsys, "norm", "--fn", FN, "--space", SPACE.format(0.7), "--method", "diff")
    assert code == 0
    assert "GeometricConvergent finite=true" in out and "agree         true" in out


def test_norm_divergent_json(capsys):
    code, out, _ = run(capsys, "norm", "--fn", FN, "--space", SPACE.format(1.3), "--method", "diff", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"]["class"] == "Divergent" and doc["verdict"]["finite"] is False
    assert list(doc) == ["function", "params", "method", "numerics", "summands", "base_norm",
                         "verdict", "predicted", "agree"]


def test_norm_zero(capsys):
    code, out, _ = run(capsys, "norm", "--fn", "zero", "--space", SPACE.format(0.7), "--method", "fourier",
                       "--format", "csv", "--j-max", "12")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["method", "index", "value"]
    assert all(float(r[2]) == 0 for r in rows[1:]) and len(rows) == 14


@pytest.mark.parametrize("space", ["n=1,p=2,q=2,alpha=-1,s=0.5", "n=1,p=0,q=2,alpha=0,s=0.5", "garbage"])
def test_norm_invalid_exit_2(capsys, space):
    code, out, err = run(capsys, "norm", "--fn", FN, "--space", space)
    assert code == 2 and out == "" and "invalid parameters" in err


def test_norm_bad_function_exit_2(capsys):
    code, _, err = run(capsys, "norm", "--fn", "nope", "--space", SPACE.format(0.5))
    assert code == 2 and "nope" in err


def test_norm_numerical_failure_exit_1(capsys):
    code, _, err = run(capsys, "norm", "--fn", "f_log_log:lam=0.5,sigma=0.9", "--space", SPACE.format(0.5),
                       "--method", "fourier", "--j-max", "4")
    assert code == 1 and "numerical failure" in err


def _predict(capsys, *extra):
    code, out, _ = run(capsys, "predict", "--format", "json", *extra)
    assert code == 0
    return json.loads(out)


def test_predict_uq_q1(capsys):
    rec = _predict(capsys, "--fn", "f_log_log:lam=0,sigma=1", "--space", "n=1,p=2,q=1,alpha=0,s=0.5")
    assert rec["member"] is True


def test_predict_boundary_q_inf(capsys):
    rec = _predict(capsys, "--fn", FN, "--space", "n=1,p=2,q=inf,alpha=0,s=1")
    assert rec["member"] is True and rec["critical"] == pytest.approx(1.0)


def test_predict_embedding(capsys):
    rec = _predict(capsys, "--space", "n=1,p=2,q=2,alpha=0,s=1", "--target", "n=1,p=4,q=2,alpha=0,s=0.5")
    emb = rec["embedding"]
    assert emb["holds"] is True and emb["p_ok"] is True
    assert emb["smoothness_gap"] == pytest.approx(0.25) and emb["weight_gap"] == pytest.approx(0)
    rec = _predict(capsys, "--space", "n=1,p=2,q=2,alpha=0,s=0.5", "--target", "n=1,p=4,q=2,alpha=0,s=0.5")
    assert rec["embedding"]["holds"] is False


def test_predict_table_and_usage(capsys):
    code, out, _ = run(capsys, "predict", "--fn", FN, "--space", SPACE.format(0.7))
    assert code == 0 and "member" in out and "true" in out
    code, _, err = run(capsys, "predict", "--space", SPACE.format(0.7))
    assert code == 2


def _sweep_rows(out):
    return list(csv.reader(io.StringIO(out)))


def test_sweep_two_steps(capsys):
    code, out, _ = run(capsys, "sweep", "--fn", FN, "--space", SPACE.format(0.7), "--axis", "s",
                       "--range", "0.6", "1.4", "--steps", "2")
    rows = _sweep_rows(out)
    assert code == 0 and rows[0] == ["axis", "value", "slope", "verdict", "predicted", "agree"]
    assert len(rows) == 3 and [r[1] for r in rows[1:]] == ["0.6", "1.4"]


def test_sweep_s_flips_at_boundary(capsys):
    code, out, _ = run(capsys, "sweep", "--fn", FN, "--space", SPACE.format(0.7), "--axis", "s",
                       "--range", "0.6", "1.4", "--steps", "5")
    rows = _sweep_rows(out)[1:]
    assert [r[3] for r in rows] == ["GeometricConvergent", "GeometricConvergent", "PowerLaw", "Divergent", "Divergent"]
    assert [r[4] for r in rows] == ["true", "true", "false", "false", "false"]


def test_sweep_mu_signature(capsys):
    # |x theta|^mu at s = 1.25, alpha = 0.5: divergent once mu <= s - (1 + alpha)/p = 0.5
    code, out, _ = run(capsys, "sweep", "--fn", "f_linear_cutoff:power={mu}", "--space",
                       "n=1,p=2,q=2,alpha=0.5,s=1.25", "--axis", "mu", "--range", "0.3", "0.9", "--steps", "4")
    rows = _sweep_rows(out)[1:]
    assert code == 0 and [r[4] for r in rows] == ["false", "false", "true", "true"]
    assert all(r[5] == "true" for r in rows)


def test_sweep_unknown_axis(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep", "--fn", FN, "--space", SPACE.format(0.7), "--axis", "beta", "--range", "0", "1",
                  "--steps", "2"])
    assert exc.value.code == 2
    code, _, _ = run(capsys, "sweep", "--fn", FN, "--space", SPACE.format(0.7), "--axis", "s",
                     "--range", "0.6", "1.4", "--steps", "1")
    assert code == 2


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"fn": FN, "space": SPACE.format(0.7), "axis": "s", "range": [0.6, 1.4],
                               "steps": 2, "numerics": {"l_max": 30}}))
    code, out, _ = run(capsys, "sweep", "--config", str(cfg))
    assert code == 0 and len(_sweep_rows(out)) == 3
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = run(capsys, "sweep", "--config", str(cfg))
    assert code == 2 and "bogus" in err


def test_output_file(capsys, tmp_path):
    path = tmp_path / "out.csv"
    code, out, _ = run(capsys, "sweep", "--fn", FN, "--space", SPACE.format(0.7), "--axis", "s",
                       "--range", "0.6", "1.4", "--steps", "2", "-o", str(path))
    assert code == 0 and out == "" and path.read_text().startswith("axis,value")


def test_logs_stay_on_stderr(capsys):
    code, out, err = run(capsys, "predict", "-v", "--format", "json", "--fn", FN, "--space", SPACE.format(0.7))
    json.loads(out)
    assert "running predict" in err


def test_verify_pass(capsys):
    code, out, _ = run(capsys, "verify", "embeddings")
    assert code == 0 and out.strip().endswith("suite embeddings: PASS (5/5 agree, 0 borderline)")


def test_verify_failure_exit_3(capsys, monkeypatch):
    bad = SuiteResult("thm1", (CaseResult("thm1", "x", True, False, False),))
    monkeypatch.setattr(cli, "run_suite", lambda *a, **k: bad)
    code, out, _ = run(capsys, "verify", "thm1")
    assert code == 3 and "FAIL" in out


def test_jobs_env(monkeypatch):
    monkeypatch.setenv("BESOVLAB_JOBS", "3")
    assert cli._default_jobs() == 3
    monkeypatch.setenv("BESOVLAB_JOBS", "x")
    assert cli._default_jobs() == 1
