"""Acceptance criteria at full size, one PASS/FAIL line per criterion.

Every suite must also finish within the desk-scale budget of 10 s.
"""
import time

import pytest

from l0convex.verify import Scenario, run_suite

BUDGET = 10.0
ATOMS = (0.1, 0.2, 0.3, 0.4)


def run(name, **kw):
    sc = Scenario(name, seed=kw.pop("seed", 20240601), atoms=kw.pop("atoms", ATOMS), **kw)
    t0 = time.perf_counter()
    rep = run_suite(sc)
    return rep, time.perf_counter() - t0


def report(capsys, label, runs, extra=True):
    ok = extra and all(r.passed and secs <= BUDGET for r, secs in runs)
    parts = []
    for r, secs in runs:
        s = r.summary()
        parts.append(f"{s['suite']} {s['trials'] - s['failures']}/{s['trials']} dev={s['max_deviation']} {secs:.1f}s")
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: " + "; ".join(parts))
    for r, secs in runs:
        bad = [rec.to_dict() for rec in r.records if rec.status != "pass"][:3]
        assert r.passed, (r.scenario.suite, bad)
        assert secs <= BUDGET, (r.scenario.suite, secs)
    assert extra


def test_1_fenchel_moreau(capsys):
    report(capsys, "1 fenchel-moreau", [run("fenchel-moreau", trials=200, points=100, tolerance=1e-8)])


def test_2_conjugate_oracle(capsys):
    report(capsys, "2 conjugate-oracle", [run("conjugate-oracle", trials=200, dual_points=50, tolerance=1e-8)])


def test_3_comparison(capsys):
    rep, secs = run("comparison", trials=200)
    # each trial holds one ordered pair and one perturbed-slope pair
    report(capsys, "3 comparison", [(rep, secs)], extra=rep.max_deviation <= 1e-10)


def test_4_subdiff_mu(capsys):
    report(capsys, "4 subdiff-mu", [run("subdiff-mu", trials=200, tolerance=1e-8)])


def test_5_op_order_and_stability(capsys):
    report(capsys, "5 op-order + op-stability",
           [run("op-order", trials=200), run("op-stability", trials=200, points=100)])


def test_6_op_recovery(capsys):
    # a half-shift space so the sigma oracle can be offered and must be rejected
    report(capsys, "6 op-recovery", [run("op-recovery", trials=200, atoms=(0.2, 0.3, 0.2, 0.3), tolerance=1e-9)])


def test_7_involution(capsys):
    report(capsys, "7 involution", [run("involution", trials=100, tolerance=1e-8)])


def test_8_t_to_s_and_order_reversing(capsys):
    report(capsys, "8 t-to-s + order-reversing",
           [run("t-to-s", trials=100, functions=20, dual_points=50, tolerance=1e-8),
            run("order-reversing", trials=200)])


@pytest.mark.parametrize("n", [2, 8])
def test_9_counterexample(capsys, n):
    rep, secs = run("counterexample", trials=50, atoms=(1.0 / n,) * n)
    A = [i < n // 2 for i in range(n)]
    want_glued = [0.0 if a else 1.0 for a in A]
    want_separate = [1.0 if a else 0.0 for a in A]
    exact = all(r.witness["detail"]["T(I_A f0)(x)"] == want_glued
                and r.witness["detail"]["I_A T(f0)(x)"] == want_separate for r in rep.records)
    report(capsys, f"9 counterexample n={n}", [(rep, secs)], extra=exact)


def test_10_rn_axioms_and_lattice_laws(capsys):
    report(capsys, "10 rn-axioms + lattice-laws",
           [run("rn-axioms", trials=500, dim=3, tolerance=1e-8), run("lattice-laws", trials=1000)])
