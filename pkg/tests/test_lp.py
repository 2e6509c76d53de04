import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l0convex import StructuralError
from l0convex.lp import LPConfig, LPProblem, LPStatus, solve, solve_batch

from .oracles import lp_max

INF = np.inf


def test_bounded_max():
    r = solve(LPProblem([1.0], [([1.0], "<=", 3.0)]))
    assert r.status == LPStatus.OPTIMAL and r.value == pytest.approx(3.0)
    assert r.x == pytest.approx([3.0])


def test_unbounded_has_ray():
    r = solve(LPProblem([1.0]))
    assert r.status == LPStatus.UNBOUNDED and r.value == INF
    assert r.ray[0] > 0


def test_infeasible():
    r = solve(LPProblem([0.0], [([1.0], "<=", -1.0)]))
    assert r.status == LPStatus.INFEASIBLE and r.value == -INF


def test_equality_and_free_variables():
    # maximize x - y, x + y == 1, x <= 2, y free
    r = solve(LPProblem([1.0, -1.0], [([1.0, 1.0], "==", 1.0), ([1.0, 0.0], "<=", 2.0)],
                        lower=[-INF, -INF], upper=[INF, INF]))
    assert r.optimal and r.value == pytest.approx(3.0)
    assert r.x == pytest.approx([2.0, -1.0])


def test_two_sided_bounds_and_geq():
    r = solve(LPProblem([-1.0, -2.0], [([1.0, 1.0], ">=", 1.5)], lower=[0.0, 0.0], upper=[1.0, 1.0]))
    assert r.optimal and r.value == pytest.approx(-2.0)
    assert r.x == pytest.approx([1.0, 0.5])


def test_unicode_relations():
    a = solve(LPProblem([1.0], [([1.0], "≤", 2.0)]))
    b = solve(LPProblem([-1.0], [([1.0], "≥", 2.0)]))
    assert a.value == pytest.approx(2.0) and b.value == pytest.approx(-2.0)


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook largest-coefficient rule
    c = [0.75, -150.0, 0.02, -6.0]
    rows = [([0.25, -60.0, -0.04, 9.0], "<=", 0.0), ([0.5, -90.0, -0.02, 3.0], "<=", 0.0),
            ([0.0, 0.0, 1.0, 0.0], "<=", 1.0)]
    r = solve(LPProblem(c, rows))
    assert r.optimal and r.value == pytest.approx(0.05)


def test_redundant_equalities():
    r = solve(LPProblem([1.0, 1.0], [([1.0, 1.0], "==", 1.0), ([2.0, 2.0], "==", 2.0)]))
    assert r.optimal and r.value == pytest.approx(1.0)


def test_bad_input():
    with pytest.raises(StructuralError):
        solve(LPProblem([1.0], [([1.0, 2.0], "<=", 1.0)]))
    with pytest.raises(StructuralError):
        solve(LPProblem([1.0], [([1.0], "<>", 1.0)]))
    with pytest.raises(StructuralError):
        solve(LPProblem([]))


def test_iteration_cap_reports_numerical_failure():
    cfg = LPConfig(iter_factor=0)
    r = solve(LPProblem([1.0, 1.0], [([1.0, 2.0], "<=", 4.0), ([3.0, 1.0], "<=", 6.0)]), cfg)
    assert r.status == LPStatus.NUMERICAL_FAILURE


def test_batch_matches_single():
    rng = np.random.default_rng(1)
    B, m, nv = 30, 4, 3
    c = rng.standard_normal((B, nv))
    A = rng.standard_normal((B, m, nv))
    b = rng.random((B, m))
    batch = solve_batch(c, A, b, ["<="] * m, -5.0, 5.0)
    for k in range(B):
        single = solve_batch(c[k:k + 1], A[k:k + 1], b[k:k + 1], ["<="] * m, -5.0, 5.0)
        assert batch.status[k] == single.status[0]
        assert batch.value[k] == single.value[0]


def _oracle(c, A, b, rels, lo, hi):
    ub = [i for i, r in enumerate(rels) if r == "<="]
    eq = [i for i, r in enumerate(rels) if r == "=="]
    ge = [i for i, r in enumerate(rels) if r == ">="]
    A_ub = np.vstack([A[ub], -A[ge]]) if ub or ge else None
    b_ub = np.concatenate([b[ub], -b[ge]]) if ub or ge else None
    A_eq = A[eq] if eq else None
    b_eq = b[eq] if eq else None
    bounds = [(None if np.isinf(l) else l, None if np.isinf(h) else h) for l, h in zip(lo, hi)]
    return lp_max(c, A_ub, b_ub, A_eq, b_eq, bounds)


@st.composite
def lps(draw):
    nv = draw(st.integers(1, 4))
    m = draw(st.integers(0, 4))
    small = st.integers(-3, 3).map(float)
    c = np.array(draw(st.lists(small, min_size=nv, max_size=nv)))
    A = np.array(draw(st.lists(st.lists(small, min_size=nv, max_size=nv), min_size=m, max_size=m))).reshape(m, nv)
    b = np.array(draw(st.lists(small, min_size=m, max_size=m)))
    rels = draw(st.lists(st.sampled_from(["<=", "==", ">="]), min_size=m, max_size=m))
    bound = st.sampled_from([-INF, -2.0, 0.0, 1.0, INF])
    lo, hi = [], []
    for _ in range(nv):
        a, z = sorted([draw(bound), draw(bound)])
        if a == z == INF:
            a = 0.0
        if a == z == -INF:
            z = 0.0
        lo.append(a)
        hi.append(z)
    return c, A, b, rels, np.array(lo), np.array(hi)


@settings(max_examples=400, deadline=None)
@given(lps())
def test_against_highs(prob):
    c, A, b, rels, lo, hi = prob
    rows = [(A[i], rels[i], b[i]) for i in range(len(rels))]
    mine = solve(LPProblem(c, rows, lower=lo, upper=hi))
    status, value, _ = _oracle(c, A, b, rels, lo, hi)
    assert status in ("optimal", "infeasible", "unbounded")
    assert mine.status.name.lower() == status
    if status == "optimal":
        assert mine.value == pytest.approx(value, abs=1e-8)
        x = mine.x
        assert np.all(x >= lo - 1e-9) and np.all(x <= hi + 1e-9)
        for i, r in enumerate(rels):
            lhs = A[i] @ x
            ok = {"<=": lhs <= b[i] + 1e-8, ">=": lhs >= b[i] - 1e-8, "==": abs(lhs - b[i]) <= 1e-8}[r]
            assert ok
    if status == "unbounded":
        # the certificate ray keeps feasibility and improves the objective
        ray = mine.ray
        assert c @ ray > 0
        for i, r in enumerate(rels):
            lhs = A[i] @ ray
            assert {"<=": lhs <= 1e-9, ">=": lhs >= -1e-9, "==": abs(lhs) <= 1e-9}[r]
        assert np.all(ray[np.isfinite(lo)] >= -1e-9) and np.all(ray[np.isfinite(hi)] <= 1e-9)


def test_random_dense_batch_against_highs():
    rng = np.random.default_rng(11)
    B, m, nv = 200, 6, 5
    c = rng.standard_normal((B, nv))
    A = rng.standard_normal((B, m, nv))
    b = rng.standard_normal((B, m))
    rels = ["<=", "<=", ">=", "<=", "==", "<="]
    res = solve_batch(c, A, b, rels, -3.0, INF)
    for k in range(B):
        status, value, _ = _oracle(c[k], A[k], b[k], rels, np.full(nv, -3.0), np.full(nv, INF))
        assert LPStatus(int(res.status[k])).name.lower() == status
        if status == "optimal":
            assert res.value[k] == pytest.approx(value, abs=1e-8, rel=1e-9)
