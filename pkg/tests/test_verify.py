import io
import json

import numpy as np
import pytest

from l0convex import ConfigError, HRep
from l0convex.verify import SUITES, Scenario, generate, replay, run_suite
from l0convex.verify.cli import main
from l0convex.verify.generate import RandomObjects, trial_rng
from l0convex.verify.suites import build_instance, check_instance, encode_instance


def first_instance(sc):
    return next(generate(sc))


def test_generate_is_deterministic():
    sc = Scenario("fenchel-moreau", seed=42, trials=3)
    a = json.dumps(encode_instance(first_instance(sc)), sort_keys=True)
    b = json.dumps(encode_instance(first_instance(sc)), sort_keys=True)
    assert a == b
    c = json.dumps(encode_instance(first_instance(sc.replace(seed=43))), sort_keys=True)
    assert a != c


def test_trial_streams_are_independent_of_order():
    sc = Scenario("op-order", seed=9, trials=5)
    streamed = [json.dumps(encode_instance(i), sort_keys=True) for i in generate(sc)]
    direct = [json.dumps(encode_instance(build_instance(sc, t)), sort_keys=True) for t in reversed(range(5))]
    assert streamed == direct[::-1]


def test_single_piece_knob_gives_affine():
    sc = Scenario("fenchel-moreau", min_pieces=1, max_pieces=1, domain_prob=0.0)
    for t in range(50):
        f = RandomObjects(sc, trial_rng(0, t)).hrep()
        assert isinstance(f, HRep) and f.n_pieces == 1 and f.is_domain_free


def test_positive_scalars_are_positive():
    sc = Scenario("op-order", param_scale=3.0)
    g = RandomObjects(sc, trial_rng(1, 0))
    taus = np.concatenate([g.positive().values for _ in range(2500)])
    assert taus.size == 10_000 and np.all(taus > 0)


@pytest.mark.parametrize("bad", [dict(suite="nope"), dict(suite="op-order", trials=0),
                                 dict(suite="op-order", atoms=(0.5, 0.6)), dict(suite="op-order", dim=0)])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        run_suite(Scenario(**bad))


def test_counterexample_needs_half_shift():
    with pytest.raises(ConfigError):
        run_suite(Scenario("counterexample", atoms=(0.2, 0.3, 0.5), trials=2))


def test_counterexample_witness():
    rep = run_suite(Scenario("counterexample", atoms=(0.5, 0.5), trials=5))
    assert rep.passed and rep.failures == 0
    detail = rep.records[0].witness["detail"]
    assert detail["kind"] == "non-stability"
    assert detail["x"] == [1.0, 1.0]
    assert detail["T(I_A f0)(x)"] == [0.0, 1.0]  # I_B
    assert detail["I_A T(f0)(x)"] == [1.0, 0.0]  # I_A


def test_identity_params_are_exact():
    rep = run_suite(Scenario("op-order", identity_params=True, trials=20))
    assert rep.passed and rep.max_deviation == 0.0


def test_reports_are_reproducible_and_job_independent():
    sc = Scenario("conjugate-oracle", seed=5, trials=12)
    a, b = run_suite(sc).lines(), run_suite(sc).lines()
    assert a == b
    assert run_suite(sc.replace(jobs=3)).lines() == a


def test_replay_reproduces_failure():
    # an impossible tolerance turns rounding noise into failures with witnesses
    sc = Scenario("t-to-s", seed=1, trials=6, functions=3, dual_points=10, tolerance=1e-300)
    rep = run_suite(sc)
    failed = [r for r in rep.records if r.status == "fail"]
    assert failed, "expected at least one rounding-level deviation"
    for r in failed:
        out = replay(sc, json.loads(json.dumps(r.witness)))
        assert not out.passed and out.deviation == r.max_deviation


def test_tampered_instance_fails():
    sc = Scenario("subdiff-mu", seed=2, trials=1)
    inst = build_instance(sc, 0)
    assert check_instance(sc, inst).passed
    enc = json.loads(json.dumps(encode_instance(inst)))
    # move the stored ground truth off its value on every atom
    enc["mu"]["values"] = [v + 0.5 if v < 0.5 else v - 0.5 for v in enc["mu"]["values"]]
    out = replay(sc, {"instance": enc})
    assert not out.passed and out.detail["truth"] != inst["mu"].values.tolist()


def test_every_suite_runs_small():
    for name in SUITES:
        atoms = (0.25, 0.25, 0.25, 0.25)
        rep = run_suite(Scenario(name, seed=3, trials=3, atoms=atoms, points=10, dual_points=5, functions=2))
        assert rep.passed, (name, [r.witness for r in rep.records if r.status != "pass"])


class TestCLI:
    def test_jsonl_and_summary(self, capsys):
        code = main(["lattice-laws", "--seed", "1", "--trials", "4", "--atoms", "0.1,0.2,0.3,0.4"])
        assert code == 0
        rows = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
        assert len(rows) == 5
        assert {"suite", "trial", "status", "max_deviation"} <= set(rows[0])
        assert rows[-1]["suite"] == "lattice-laws" and rows[-1]["trials"] == 4 and rows[-1]["failures"] == 0
        assert set(rows[-1]) == {"suite", "trials", "failures", "max_deviation"}

    def test_scenario_file_and_out(self, tmp_path):
        scen = tmp_path / "s.json"
        scen.write_text(json.dumps({"seed": 4, "trials": 3, "atoms": [0.5, 0.5], "dim": 1}))
        out = tmp_path / "r.jsonl"
        assert main(["op-stability", "--scenario", str(scen), "--trials", "2", "--out", str(out)]) == 0
        rows = [json.loads(line) for line in out.read_text().splitlines()]
        assert rows[-1]["trials"] == 2

    def test_failure_exit_code(self, tmp_path, capsys):
        scen = tmp_path / "s.json"
        scen.write_text(json.dumps({"trials": 4, "functions": 2, "dual_points": 5, "tolerance": 1e-300}))
        code = main(["t-to-s", "--scenario", str(scen)])
        summary = json.loads(capsys.readouterr().out.splitlines()[-1])
        assert summary["failures"] > 0 and code == 1

    def test_config_error_exit_code(self, capsys):
        assert main(["no-such-suite"]) == 2
        assert "config error" in capsys.readouterr().err
        assert main(["op-order", "--trials", "0"]) == 2

    def test_report_write(self):
        rep = run_suite(Scenario("involution", trials=2))
        buf = io.StringIO()
        rep.write(buf)
        assert len(buf.getvalue().splitlines()) == 3
