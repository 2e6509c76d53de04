"""Property suites: each one builds a random instance per trial and checks it.

A suite is a pair of functions.  ``build`` draws an instance (a dict of
package objects and arrays) from a trial generator; ``check`` is
deterministic given the instance and returns an :class:`Outcome`.  Keeping
the two apart lets a failing instance be serialized into the report and
replayed later through :func:`replay`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple

import numpy as np

from .. import module as M
from ..convex import (
    AffineFn,
    HRep,
    comparison_decompose,
    conjugate_rep,
    conjugate_values,
    conjugate_values_family,
    hull_membership,
    leq_fn,
    stable_combine_fn,
    subdiff_mu,
    values_family,
)
from ..errors import CharacterizationViolation, ConfigError, StructuralError
from ..lattice import (
    AtomSpace,
    Event,
    ExtL0Scalar,
    L0Scalar,
    inf_family,
    leq,
    stable_combine_scalar,
    sup_family,
    support_event,
    zero_event,
)
from ..module import DualElem, ModuleElem, ModuleMap, dot, matvec
from ..operators import (
    SwapInvolution,
    apply_hat_t,
    apply_s,
    apply_t,
    make_involution,
    recover_hat_t,
    sigma_affine_oracle,
    sigma_operator,
    t_to_s,
)
from ..serialize import from_json, to_json
from .generate import RandomObjects, trial_rng
from .scenario import Scenario

__all__ = ["Outcome", "Suite", "SUITES", "generate", "get_suite", "check_instance", "replay"]


class Outcome(NamedTuple):
    passed: bool
    deviation: float
    detail: dict | None = None


@dataclass(frozen=True)
class Suite:
    name: str
    build: Callable[[RandomObjects], dict]
    check: Callable[[dict, Scenario], Outcome]
    requires: Callable[[Scenario], str | None] | None = None
    dim: int | None = None  # fixed module dimension, overriding the scenario


def compare(a: np.ndarray, b: np.ndarray) -> float:
    """Max absolute difference of two extended-real arrays; ``inf`` if their infinity patterns differ."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    inf_a, inf_b = np.isinf(a), np.isinf(b)
    if not np.array_equal(inf_a, inf_b) or not np.array_equal(a[inf_a], b[inf_b]):
        return float("inf")
    fin = ~inf_a
    if not fin.any():
        return 0.0
    return float(np.max(np.abs(a[fin] - b[fin])))


def _mismatch(x: Event, y: Event) -> int:
    return int(np.sum(x.mask != y.mask))


# -- fenchel-moreau ------------------------------------------------------------

def _random_fn(g: RandomObjects) -> tuple:
    kind = ("hrep", "vrep", "indicator")[int(g.rng.integers(3))]
    P = g.scenario.points
    if kind == "hrep":
        f = g.hrep(domain=False)
        X = g.points(P)
    elif kind == "vrep":
        f = g.vrep()
        X = np.concatenate([g.hull_points(f.points, P // 2), g.points(P - P // 2)])
    else:
        f = g.indicator()
        X = g.points(P)
        X[: P // 4] = f.point
        # equal to the point off a random event
        for p in range(P // 4, P // 2):
            X[p] = np.where(g.event().mask[:, None], X[p], f.point)
    return f, X


def build_fenchel_moreau(g: RandomObjects) -> dict:
    f, X = _random_fn(g)
    return {"f": f, "X": X}


def check_fenchel_moreau(inst: dict, sc: Scenario) -> Outcome:
    f, X = inst["f"], inst["X"]
    direct = f.values(X)
    fstar = conjugate_rep(f)
    double = conjugate_rep(fstar).values(X)
    via_sup = conjugate_values(fstar, X)
    dev = max(compare(direct, double), compare(direct, via_sup))
    detail = None
    if dev > sc.tolerance:
        p, atom = np.unravel_index(int(np.argmax(np.abs(np.nan_to_num(direct - via_sup, nan=np.inf)))), direct.shape)
        detail = {"point_index": int(p), "atom": int(atom), "f": float(direct[p, atom]),
                  "f**_rep": float(double[p, atom]), "f**_sup": float(via_sup[p, atom])}
    return Outcome(dev <= sc.tolerance, dev, detail)


# -- conjugate-oracle ----------------------------------------------------------

def build_conjugate_oracle(g: RandomObjects) -> dict:
    kind = ("hrep", "vrep", "indicator")[int(g.rng.integers(3))]
    Q = g.scenario.dual_points
    if kind == "hrep":
        f = g.hrep(domain=False)
        V = np.concatenate([g.hull_points(f.slopes, Q // 2), g.points(Q - Q // 2)])
    elif kind == "vrep":
        f = g.vrep()
        V = g.points(Q)
    else:
        f = g.indicator()
        V = g.points(Q)
    return {"f": f, "V": V}


def check_conjugate_oracle(inst: dict, sc: Scenario) -> Outcome:
    f, V = inst["f"], inst["V"]
    rep = conjugate_rep(f).values(V)
    sup = conjugate_values(f, V)
    dev = compare(rep, sup)
    detail = None if dev <= sc.tolerance else {"rep": rep.tolist(), "sup": sup.tolist()}
    return Outcome(dev <= sc.tolerance, dev, detail)


# -- comparison ----------------------------------------------------------------

def build_comparison(g: RandomObjects) -> dict:
    u = g.dual()
    alpha = g.scalar()
    gap = np.where(g.rng.random(g.n) < 0.25, 0.0, np.abs(g.rng.standard_normal(g.n)))
    beta = L0Scalar(g.space, alpha.values - gap)
    moved = g.event()
    if moved.is_empty:
        moved = Event.of_atoms(g.space, [int(g.rng.integers(g.n))])
    delta = np.where(g.rng.random((g.n, g.dim)) < 0.5, -1.0, 1.0) * (0.1 + g.rng.random((g.n, g.dim)))
    v = DualElem(g.space, u.values + moved.mask[:, None] * delta)
    return {"u": u, "alpha": alpha, "beta": beta, "v": v, "moved": moved}


def check_comparison(inst: dict, sc: Scenario) -> Outcome:
    u, alpha, beta, v, moved = inst["u"], inst["alpha"], inst["beta"], inst["v"], inst["moved"]
    lower, upper = AffineFn(u, beta), AffineFn(u, alpha)
    facts = comparison_decompose(lower, upper)
    perturbed = leq_fn(AffineFn(v, beta).to_hrep(), upper.to_hrep())
    rejected = (not perturbed.holds) and perturbed.holds_event == ~moved
    slope_dev = float(np.max(np.abs(lower.u.values - upper.u.values)))
    passed = facts.equal_slopes and facts.intercepts_ordered and rejected
    detail = None
    if not passed:
        detail = {"facts": list(facts), "perturbed_event": perturbed.holds_event.mask.tolist(),
                  "moved": moved.mask.tolist(),
                  "witness": None if perturbed.witness is None else perturbed.witness.to_dict()}
    return Outcome(passed, slope_dev, detail)


# -- subdiff-mu ------------------------------------------------------------------

def build_subdiff_mu(g: RandomObjects) -> dict:
    u1, u2 = g.dual(), g.dual()
    tie = g.rng.random(g.n) < 0.15
    u2 = DualElem(g.space, np.where(tie[:, None], u1.values, u2.values))
    a1, a2 = g.scalar(), g.scalar()
    mu = g.unit_interval()
    slack = np.where(g.rng.random(g.n) < 0.3, 0.0, g.rng.random(g.n))
    u = DualElem(g.space, mu.values[:, None] * u1.values + (1.0 - mu.values[:, None]) * u2.values)
    alpha = L0Scalar(g.space, mu.values * a1.values + (1.0 - mu.values) * a2.values - slack)
    return {"h": AffineFn(u, alpha), "h1": AffineFn(u1, a1), "h2": AffineFn(u2, a2), "mu": mu}


def check_subdiff_mu(inst: dict, sc: Scenario) -> Outcome:
    h, h1, h2, truth = inst["h"], inst["h1"], inst["h2"], inst["mu"]
    mu = subdiff_mu(h, h1, h2).values
    combo = mu[:, None] * h1.u.values + (1.0 - mu[:, None]) * h2.u.values
    resid = float(np.max(np.linalg.norm(h.u.values - combo, axis=1)))
    in_range = bool(np.all((mu >= 0.0) & (mu <= 1.0)))
    spread = np.linalg.norm(h1.u.values - h2.u.values, axis=1) > 1e-10
    truth_dev = float(np.max(np.abs(mu - truth.values)[spread], initial=0.0))
    passed = resid <= 1e-8 and in_range and truth_dev <= max(sc.tolerance, 1e-6)
    detail = None if passed else {"mu": mu.tolist(), "truth": truth.values.tolist(), "residual": resid}
    return Outcome(passed, resid, detail)


# -- hull-membership -------------------------------------------------------------

def build_hull_membership(g: RandomObjects) -> dict:
    K = g.n_pieces() + 1
    gens = g.points(K, scale=1.0)
    inside = g.hull_points(gens, 1)[0]
    away = g.event()
    e = g.rng.standard_normal((g.n, g.dim))
    e /= np.linalg.norm(e, axis=1, keepdims=True)
    reach = np.max(np.einsum("knd,nd->kn", gens, e), axis=0)
    far = e * (reach + 0.5 + g.rng.random(g.n))[:, None]
    outside = np.where(away.mask[:, None], far, inside)
    return {"xs": [ModuleElem(g.space, x) for x in gens], "inside": ModuleElem(g.space, inside),
            "outside": ModuleElem(g.space, outside), "away": away}


def check_hull_membership(inst: dict, sc: Scenario) -> Outcome:
    xs = inst["xs"]
    ins = hull_membership(inst["inside"], xs)
    out = hull_membership(inst["outside"], xs)
    member_self = hull_membership(xs[0], xs).holds
    bad = _mismatch(out.holds_event, ~inst["away"]) + (0 if ins.holds else 1) + (0 if member_self else 1)
    detail = None if bad == 0 else {"inside": ins.holds_event.mask.tolist(),
                                    "outside": out.holds_event.mask.tolist()}
    return Outcome(bad == 0, float(bad), detail)


# -- op-order / op-stability -----------------------------------------------------

def build_op_order(g: RandomObjects) -> dict:
    p = g.params_t()
    gfn = g.hrep()
    A = g.event()
    f = g.ordered_pair(gfn, A)
    return {"params": p, "f": f, "g": gfn, "A": A}


def check_op_order(inst: dict, sc: Scenario) -> Outcome:
    p, f, gfn, A = inst["params"], inst["f"], inst["g"], inst["A"]
    before = leq_fn(f, gfn)
    after = leq_fn(apply_t(p, f), apply_t(p, gfn))
    bad = _mismatch(before.holds_event, after.holds_event) + _mismatch(before.holds_event, A)
    bad += int(before.holds != after.holds)
    detail = None
    if bad:
        detail = {"before": before.holds_event.mask.tolist(), "after": after.holds_event.mask.tolist(),
                  "expected": A.mask.tolist()}
    return Outcome(bad == 0, float(bad), detail)


def build_op_stability(g: RandomObjects) -> dict:
    return {"params": g.params_t(), "f": g.hrep(), "g": g.hrep(), "A": g.event(), "X": g.points(g.scenario.points)}


def check_op_stability(inst: dict, sc: Scenario) -> Outcome:
    p, f, gfn, A, X = inst["params"], inst["f"], inst["g"], inst["A"], inst["X"]
    glued = apply_t(p, stable_combine_fn(A, f, gfn)).values(X)
    Tf, Tg = apply_t(p, f), apply_t(p, gfn)
    separate = np.where(A.mask, Tf.values(X), Tg.values(X))
    exact = bool(np.array_equal(glued, separate))
    # pointwise formula T f(x) = tau f(Hx + c) + <w, x> + beta
    moved = matvec(p.H.matrices, X) + p.c.values
    fx = f.values(moved)
    with np.errstate(invalid="ignore"):
        formula = np.where(np.isinf(fx), np.inf, p.tau.values * fx + dot(p.w.values, X) + p.beta.values)
    dev = compare(Tf.values(X), formula)
    glue_dev = compare(glued, separate)
    passed = exact and dev <= sc.tolerance
    detail = None if passed else {"glue_deviation": glue_dev, "formula_deviation": dev}
    return Outcome(passed, max(glue_dev, dev), detail)


# -- op-recovery ---------------------------------------------------------------------

def _swap_for(space: AtomSpace) -> SwapInvolution | None:
    try:
        return SwapInvolution.half_shift(space)
    except StructuralError:
        return None


def build_op_recovery(g: RandomObjects) -> dict:
    return {"params": g.params_hat(), "probe_seed": int(g.rng.integers(2**31))}


def _hat_dev(a, b) -> float:
    return max(float(np.max(np.abs(a.D.matrices - b.D.matrices))), float(np.max(np.abs(a.w.values - b.w.values))),
               float(np.max(np.abs(a.d.values - b.d.values))), float(np.max(np.abs(a.tau.values - b.tau.values))),
               float(np.max(np.abs(a.beta.values - b.beta.values))))


def check_op_recovery(inst: dict, sc: Scenario) -> Outcome:
    params = inst["params"]
    space = params.space
    rec = recover_hat_t(lambda u, a: apply_hat_t(params, u, a), space, params.dim, seed=inst["probe_seed"])
    dev = _hat_dev(rec, params)
    detail = {}
    rejected = True
    sw = _swap_for(space)
    if sw is not None:
        try:
            recover_hat_t(sigma_affine_oracle(sw), space, 1, seed=inst["probe_seed"])
            rejected = False
        except CharacterizationViolation as exc:
            rejected = exc.witness.get("kind") == "stability"
            detail["sigma_rejection"] = exc.witness
    passed = dev <= sc.tolerance and rejected
    return Outcome(passed, dev, None if passed else {"deviation": dev, "sigma_rejected": rejected, **detail})


# -- involution ----------------------------------------------------------------------

def build_involution(g: RandomObjects) -> dict:
    H, c, w = g.involution_data()
    return {"H": H, "c": c, "w": w, "f": g.hrep(), "X": g.points(g.scenario.points)}


def check_involution(inst: dict, sc: Scenario) -> Outcome:
    p = make_involution(inst["H"], inst["c"], inst["w"])
    f, X = inst["f"], inst["X"]
    twice = apply_t(p, apply_t(p, f)).values(X)
    dev = compare(twice, f.values(X))
    return Outcome(dev <= sc.tolerance, dev, None if dev <= sc.tolerance else {"deviation": dev})


# -- order-reversing -------------------------------------------------------------------

def build_order_reversing(g: RandomObjects) -> dict:
    p = g.params_s()
    gfn = g.hrep(domain=False)
    A = g.event()
    f = g.ordered_pair(gfn, A)
    B = g.event()
    Sf, Sg = apply_s(p, f), apply_s(p, gfn)
    Q = g.scenario.dual_points
    U = np.concatenate([g.hull_points(Sf.points, Q // 2), g.hull_points(Sg.points, Q - Q // 2)])
    return {"params": p, "f": f, "g": gfn, "A": A, "B": B, "U": U}


def check_order_reversing(inst: dict, sc: Scenario) -> Outcome:
    p, f, gfn, A, B, U = inst["params"], inst["f"], inst["g"], inst["A"], inst["B"], inst["U"]
    before = leq_fn(f, gfn)
    Sf, Sg = apply_s(p, f), apply_s(p, gfn)
    # S g <= S f  iff  (S f)* <= (S g)*
    reversed_ = leq_fn(conjugate_rep(Sf), conjugate_rep(Sg))
    bad = _mismatch(before.holds_event, A) + _mismatch(reversed_.holds_event, A)
    glued = apply_s(p, stable_combine_fn(B, f, gfn)).values(U)
    separate = np.where(B.mask, Sf.values(U), Sg.values(U))
    dev = compare(glued, separate)
    passed = bad == 0 and dev <= sc.tolerance
    detail = None
    if not passed:
        detail = {"order": before.holds_event.mask.tolist(), "reversed": reversed_.holds_event.mask.tolist(),
                  "expected": A.mask.tolist(), "stability_deviation": dev}
    return Outcome(passed, max(dev, float(bad)), detail)


# -- t-to-s -----------------------------------------------------------------------------

def build_t_to_s(g: RandomObjects) -> dict:
    p = g.params_t()
    s = t_to_s(p)
    fs, Us = [], []
    Q = g.scenario.dual_points
    for _ in range(g.scenario.functions):
        f = g.hrep(domain=False)
        q = apply_s(s, f).points
        fs.append(f)
        Us.append(np.concatenate([g.hull_points(q, Q // 2), g.points(Q - Q // 2)]))
    return {"params": p, "fs": fs, "Us": Us}


def check_t_to_s(inst: dict, sc: Scenario) -> Outcome:
    p = inst["params"]
    s = t_to_s(p)
    fs, Us = inst["fs"], inst["Us"]
    lhs = values_family([apply_s(s, f) for f in fs], Us)
    rhs = conjugate_values_family([apply_t(p, f) for f in fs], Us)
    devs = [compare(a, b) for a, b in zip(lhs, rhs)]
    worst = int(np.argmax(devs))
    dev = devs[worst]
    passed = dev <= sc.tolerance
    return Outcome(passed, dev, None if passed else {"function_index": worst, "deviation": dev})


# -- counterexample -----------------------------------------------------------------------

def _require_swap(sc: Scenario) -> str | None:
    if _swap_for(sc.space) is None:
        return "counterexample needs an even number of atoms with p_i = p_(i + n/2)"
    return None


def build_counterexample(g: RandomObjects) -> dict:
    gfn = g.hrep()
    A = g.event()
    return {"f": g.ordered_pair(gfn, A), "g": gfn, "h": g.hrep()}


def check_counterexample(inst: dict, sc: Scenario) -> Outcome:
    f, gfn, h = inst["f"], inst["g"], inst["h"]
    space = f.space
    sw = SwapInvolution.half_shift(space)
    n = space.n
    ok = True
    # T(f0) = f0 for f0(x) = x
    f0 = HRep(space, np.ones((1, n, 1)), np.zeros((1, n)), check=False)
    Tf0 = sigma_operator(sw, f0)
    ok &= np.array_equal(Tf0.slopes, f0.slopes) and np.array_equal(Tf0.intercepts, f0.intercepts)
    # involution, representationwise
    for fn in (f, gfn, h):
        back = sigma_operator(sw, sigma_operator(sw, fn))
        ok &= np.array_equal(back.slopes, fn.slopes) and np.array_equal(back.intercepts, fn.intercepts)
        ok &= np.array_equal(back.dom_a, fn.dom_a) and np.array_equal(back.dom_b, fn.dom_b)
    # order preservation, with the order event carried along the permutation
    before = leq_fn(f, gfn)
    after = leq_fn(sigma_operator(sw, f), sigma_operator(sw, gfn))
    ok &= after.holds_event == sw.sigma_event(before.holds_event) and after.holds == before.holds
    # non-stability: T(I_A f0 + I_B 0) = I_B x  but  I_A T(f0) + I_B T(0) = I_A x
    A = sw.first_half()
    zero = HRep(space, np.zeros((1, n, 1)), np.zeros((1, n)), check=False)
    x = np.ones((n, 1))
    glued = sigma_operator(sw, stable_combine_fn(A, f0, zero)).values(x)
    separate = np.where(A.mask, Tf0.values(x), sigma_operator(sw, zero).values(x))
    ind_A, ind_B = A.indicator().values, (~A).indicator().values
    ok &= np.array_equal(glued, ind_B) and np.array_equal(separate, ind_A) and not np.array_equal(glued, separate)
    witness = {"kind": "non-stability", "x": x[:, 0].tolist(), "A": A.mask.tolist(),
               "T(I_A f0)(x)": glued.tolist(), "I_A T(f0)(x)": separate.tolist()}
    return Outcome(bool(ok), 0.0 if ok else 1.0, witness)


# -- rn-axioms -----------------------------------------------------------------------------

def build_rn_axioms(g: RandomObjects) -> dict:
    return {"xi": g.scalar(2.0), "x": g.elem(), "y": g.elem(), "u": g.dual(), "T": ModuleMap(g.space, g.matrices()),
            "R": ModuleMap(g.space, g.rng.standard_normal((g.n, g.dim, g.dim))), "A": g.event()}


def check_rn_axioms(inst: dict, sc: Scenario) -> Outcome:
    xi, x, y, u, T, R, A = (inst[k] for k in ("xi", "x", "y", "u", "T", "R", "A"))
    devs = {}
    nx, ny = M.l0_norm(x).values, M.l0_norm(y).values
    devs["homogeneity"] = float(np.max(np.abs(M.l0_norm(xi * x).values - np.abs(xi.values) * nx)
                                       / (1.0 + np.abs(xi.values) * nx)))
    devs["triangle"] = float(np.max(np.maximum(M.l0_norm(x + y).values - (nx + ny), 0.0)))
    devs["cauchy_schwarz"] = float(np.max(np.maximum(np.abs(M.pairing(u, x).values)
                                                     - M.l0_norm(u).values * nx, 0.0)))
    for name, mp in (("T", T), ("R", R)):
        nT = M.op_norm(mp).values
        devs[f"adjoint_norm_{name}"] = float(np.max(np.abs(M.op_norm(M.adjoint(mp)).values - nT)))
        devs[f"svd_{name}"] = float(np.max(np.abs(nT - np.linalg.norm(mp.matrices, 2, axis=(1, 2)))))
        devs[f"bound_{name}"] = float(np.max(np.maximum(M.l0_norm(M.apply(mp, x)).values - nT * nx, 0.0)))
        devs[f"adjoint_pairing_{name}"] = float(np.max(np.abs(M.pairing(M.apply(M.adjoint(mp), u), x).values
                                                              - M.pairing(u, M.apply(mp, x)).values)))
    devs["adjoint_involution"] = 0.0 if M.adjoint(M.adjoint(T)) == T else float("inf")
    devs["inverse_adjoint"] = float(np.max(np.abs(M.invert(M.adjoint(T)).matrices
                                                  - M.adjoint(M.invert(T)).matrices)))
    devs["inverse_roundtrip"] = float(np.max(np.abs(M.compose(T, M.invert(T)).matrices - np.eye(T.shape[0]))))
    glued = M.apply(T, M.combine(A, x, y))
    devs["apply_stable"] = float(np.max(np.abs(glued.values - M.combine(A, M.apply(T, x), M.apply(T, y)).values)))
    full = DualElem(u.space, np.where(np.abs(u.values) < 1e-3, 1.0, u.values))
    x0 = M.solve_pairing(full, xi)
    devs["solve_pairing"] = float(np.max(np.abs(M.pairing(full, x0).values - xi.values)))
    dev = max(devs.values())
    passed = dev <= sc.tolerance
    return Outcome(passed, dev, None if passed else devs)


# -- lattice-laws --------------------------------------------------------------------------

_GRID = np.array([-np.inf, -2.0, -1.0, 0.0, 0.5, 1.0, 3.0, np.inf])


def build_lattice_laws(g: RandomObjects) -> dict:
    def ext():
        grid = _GRID[g.rng.integers(len(_GRID), size=g.n)]
        cont = g.rng.standard_normal(g.n)
        return ExtL0Scalar(g.space, np.where(g.rng.random(g.n) < 0.5, grid, cont))

    return {"xi": ext(), "eta": ext(), "zeta": ext(), "A": g.event(),
            "r": L0Scalar(g.space, np.where(g.rng.random(g.n) < 0.3, 0.0, g.rng.standard_normal(g.n)))}


def check_lattice_laws(inst: dict, sc: Scenario) -> Outcome:
    xi, eta, zeta, A, r = (inst[k] for k in ("xi", "eta", "zeta", "A", "r"))
    sup, inf = sup_family, inf_family
    laws = {
        "sup_commutative": sup([xi, eta]) == sup([eta, xi]),
        "inf_commutative": inf([xi, eta]) == inf([eta, xi]),
        "sup_associative": sup([sup([xi, eta]), zeta]) == sup([xi, sup([eta, zeta])]),
        "inf_associative": inf([inf([xi, eta]), zeta]) == inf([xi, inf([eta, zeta])]),
        "sup_idempotent": sup([xi, xi]) == xi,
        "singleton": sup([xi]) == xi and inf([xi]) == xi,
        "absorption_sup": sup([xi, inf([xi, eta])]) == xi,
        "absorption_inf": inf([xi, sup([xi, eta])]) == xi,
        "reflexive": leq(xi, xi),
        "antisymmetric": (not (leq(xi, eta) and leq(eta, xi))) or xi == eta,
        "transitive": (not (leq(xi, eta) and leq(eta, zeta))) or leq(xi, zeta),
        "upper_bound": leq(xi, sup([xi, eta, zeta])) and leq(inf([xi, eta, zeta]), zeta),
        "least_upper_bound": leq(sup([xi, eta]), sup([xi, eta, zeta])),
        "combine_same": stable_combine_scalar(A, xi, xi) == xi,
        "combine_full": stable_combine_scalar(Event.full(A.space), xi, eta) == xi,
        "combine_empty": stable_combine_scalar(Event.empty(A.space), xi, eta) == eta,
    }
    pos, neg, zer = support_event(r), support_event(-r), zero_event(r)
    laws["support_partition"] = (pos & neg).is_empty and (pos | neg) == ~zer
    failed = [k for k, v in laws.items() if not v]
    return Outcome(not failed, float(len(failed)), {"failed": failed} if failed else None)


SUITES = {
    s.name: s
    for s in [
        Suite("fenchel-moreau", build_fenchel_moreau, check_fenchel_moreau),
        Suite("conjugate-oracle", build_conjugate_oracle, check_conjugate_oracle),
        Suite("comparison", build_comparison, check_comparison),
        Suite("subdiff-mu", build_subdiff_mu, check_subdiff_mu),
        Suite("hull-membership", build_hull_membership, check_hull_membership),
        Suite("op-order", build_op_order, check_op_order),
        Suite("op-stability", build_op_stability, check_op_stability),
        Suite("op-recovery", build_op_recovery, check_op_recovery),
        Suite("involution", build_involution, check_involution),
        Suite("order-reversing", build_order_reversing, check_order_reversing),
        Suite("t-to-s", build_t_to_s, check_t_to_s),
        Suite("counterexample", build_counterexample, check_counterexample, requires=_require_swap, dim=1),
        Suite("rn-axioms", build_rn_axioms, check_rn_axioms),
        Suite("lattice-laws", build_lattice_laws, check_lattice_laws),
    ]
}


def get_suite(name: str) -> Suite:
    try:
        return SUITES[name]
    except KeyError:
        raise ConfigError(f"unknown suite {name!r}; available: {', '.join(SUITES)}") from None


def _objects(sc: Scenario, suite: Suite, trial: int) -> RandomObjects:
    return RandomObjects(sc, trial_rng(sc.seed, trial), dim=suite.dim)


def generate(sc: Scenario) -> Iterator[dict]:
    """Instance stream of the scenario's suite, one dict per trial."""
    suite = get_suite(sc.suite)
    if suite.requires is not None:
        problem = suite.requires(sc)
        if problem:
            raise ConfigError(problem)
    for trial in range(sc.trials):
        yield suite.build(_objects(sc, suite, trial))


def build_instance(sc: Scenario, trial: int) -> dict:
    suite = get_suite(sc.suite)
    return suite.build(_objects(sc, suite, trial))


def check_instance(sc: Scenario, inst: dict) -> Outcome:
    return get_suite(sc.suite).check(inst, sc)


def encode_instance(inst: dict) -> dict:
    space = next(v.space for v in inst.values() if hasattr(v, "space"))
    return {"space": to_json(space), **{k: to_json(v) for k, v in inst.items()}}


def decode_instance(obj: dict) -> dict:
    space = from_json(obj["space"])
    return {k: from_json(v, space) for k, v in obj.items() if k != "space"}


def replay(sc: Scenario, witness: dict) -> Outcome:
    """Re-run a suite check on the instance stored in a report witness."""
    return check_instance(sc, decode_instance(witness["instance"]))
