import json
import subprocess
import sys

import numpy as np
import pytest

from statedisc.bounds import problem_overlap_angles, theorem1
from statedisc.cli import main
from statedisc.dp import build_risk_tables, evaluate
from statedisc.problem import load_problem


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


PURE = {"prior_q": 0.3, "subsystems": [{"type": "pure_qubit", "theta_plus": 0.4, "theta_minus": 2.0}, {"type": "pure_qubit", "theta_plus": 1.0, "theta_minus": -0.2}]}
COPIES = {"subsystems": [{"type": "depolarized_qubit", "gamma": 0.3, "theta_plus": 0.4, "theta_minus": 1.3}] * 4}
MIXED = {"subsystems": [{"type": "depolarized_qubit", "gamma_plus": 0.1, "gamma_minus": 0.4, "theta_plus": 0.4, "theta_minus": 1.3}, {"type": "depolarized_qubit", "gamma": 0.2, "theta_plus": 0.0, "theta_minus": 2.3}]}


def run_json(capsys, argv):
    code = main(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


class TestDiscriminate:
    def test_lg_matches_theorem1(self, tmp_path, capsys):
        path = write(tmp_path, "p.json", PURE)
        code, out = run_json(capsys, ["discriminate", path, "--strategy", "lg"])
        assert code == 0
        prob = load_problem(path)
        assert out["success_probability"] == pytest.approx(theorem1(0.3, problem_overlap_angles(prob)), abs=1e-9)
        assert len(out["per_round_error"]) == 2 and out["config"]["prior_q"] == 0.3

    def test_mlg_dominates(self, tmp_path, capsys):
        path = write(tmp_path, "c.json", COPIES)
        _, lg = run_json(capsys, ["discriminate", path, "--strategy", "lg"])
        _, mlg = run_json(capsys, ["discriminate", path, "--strategy", "mlg"])
        assert mlg["success_probability"] >= lg["success_probability"]

    @pytest.mark.parametrize("strategy", ["order-mlg", "moody"])
    def test_dp_strategies_report_first_action(self, tmp_path, capsys, strategy):
        code, out = run_json(capsys, ["discriminate", write(tmp_path, "m.json", MIXED), "--strategy", strategy, "--q-p", "201", "--q-phi", "16"])
        assert code == 0 and out["first_action"]["subsystem"] in (0, 1)
        assert 0.5 <= out["success_probability"] <= 1

    def test_human_output(self, tmp_path, capsys):
        assert main(["discriminate", write(tmp_path, "p.json", PURE)]) == 0
        assert "success probability" in capsys.readouterr().out

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{oops")
        assert main(["discriminate", str(path)]) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["discriminate", str(tmp_path / "none.json")]) == 2

    def test_resource_cap(self, tmp_path):
        doc = {"subsystems": [{"type": "depolarized_qubit", "gamma_plus": 0.1 + 0.01 * i, "gamma_minus": 0.2, "theta_plus": 0.1, "theta_minus": 1.0} for i in range(13)]}
        assert main(["discriminate", write(tmp_path, "big.json", doc), "--strategy", "order-mlg"]) == 3


class TestPolicy:
    def test_build_eval_inspect(self, tmp_path, capsys):
        prob_path = write(tmp_path, "m.json", MIXED)
        pol = str(tmp_path / "pol.json")
        assert main(["policy", "build", prob_path, "--out", pol, "--q-p", "101", "--q-phi", "16"]) == 0
        capsys.readouterr()
        _, out = run_json(capsys, ["policy", "eval", pol, prob_path, "--q", "0.5"])
        from statedisc.measurements import qubit_action_space

        ref = evaluate(build_risk_tables(load_problem(prob_path), "moody_best", qubit_action_space(16), 101), 0.5)
        assert out["success_probability"] == pytest.approx(ref, abs=1e-15)
        _, out = run_json(capsys, ["policy", "inspect", pol])
        assert len(out["map"]) == 101

    def test_wrong_problem_is_stale(self, tmp_path, capsys):
        pol = str(tmp_path / "pol.json")
        main(["policy", "build", write(tmp_path, "m.json", MIXED), "--out", pol, "--q-p", "51", "--q-phi", "8"])
        assert main(["policy", "eval", pol, write(tmp_path, "p.json", PURE)]) == 4

    def test_inspect_single_subsystem(self, tmp_path, capsys):
        pol = str(tmp_path / "pol.json")
        one = {"subsystems": MIXED["subsystems"][:1]}
        main(["policy", "build", write(tmp_path, "one.json", one), "--out", pol, "--mode", "order_opt_mlg", "--q-p", "11"])
        capsys.readouterr()
        _, out = run_json(capsys, ["policy", "inspect", pol])
        assert {row[1] for row in out["map"]} == {0}

    def test_malformed_policy(self, tmp_path):
        bad = tmp_path / "pol.json"
        bad.write_text("[]")
        assert main(["policy", "inspect", str(bad)]) == 2


class TestBounds:
    def test_pure(self, tmp_path, capsys):
        _, out = run_json(capsys, ["bounds", write(tmp_path, "p.json", PURE)])
        rows = {b["kind"]: b for b in out["bounds"]}
        assert rows["theorem1"]["applicable"]
        assert rows["theorem1"]["value"] == pytest.approx(rows["joint_helstrom"]["value"], abs=1e-9)

    def test_mixed_uses_gamma_min(self, tmp_path, capsys):
        _, out = run_json(capsys, ["bounds", write(tmp_path, "m.json", MIXED)])
        rows = [b for b in out["bounds"] if b["kind"] == "corollary1"]
        assert rows[0]["value"] == pytest.approx(0.95)
        assert not next(b for b in out["bounds"] if b["kind"] == "theorem1")["applicable"]
        assert not next(b for b in out["bounds"] if b["kind"] == "plateau")["applicable"]

    def test_joint_omitted_over_cap(self, tmp_path, capsys):
        code, out = run_json(capsys, ["bounds", write(tmp_path, "c.json", COPIES), "--dim-cap", "8"])
        assert code == 0
        joint = next(b for b in out["bounds"] if b["kind"] == "joint_helstrom")
        assert not joint["applicable"] and "omitted" in joint["reason"]
        plateau = next(b for b in out["bounds"] if b["kind"] == "plateau")
        assert plateau["value"] == pytest.approx(0.9698, abs=5e-5)


class TestFigure:
    def test_deterministic_csv(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["figure", "fig1", "--seed", "7", "--n-trial", "50", "--out", str(a)]) == 0
        assert main(["figure", "fig1", "--seed", "7", "--n-trial", "50", "--out", str(b), "--threads", "2"]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().splitlines()[1] == "figure_id,series,x,mean,stderr,n_trial,seed"

    def test_scaled_default_noted(self, tmp_path, capsys):
        out = tmp_path / "f6.csv"
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"gamma_set": [0.3], "Q_p": 21, "qutrit_quantization": [[1], 1]}))
        assert main(["figure", "fig6", "--n-trial", "2", "--config", str(cfg), "--out", str(out)]) == 0
        head = out.read_text().splitlines()[:2]
        assert "default scale" in head[0] and "n_trial=2" in head[0]
        assert "scaled-down" in head[1]

    def test_unknown_figure(self, capsys):
        assert main(["figure", "fig42"]) == 2


def test_module_entry_point(tmp_path):
    path = write(tmp_path, "p.json", PURE)
    res = subprocess.run([sys.executable, "-m", "statedisc", "discriminate", path, "--json"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["config"]["strategy"] == "lg"
