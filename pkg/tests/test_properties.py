"""Cross-module invariants on seeded random instances."""
import numpy as np
import pytest

from l0convex import (
    AffineFn,
    AtomSpace,
    DualElem,
    Event,
    ExtL0Scalar,
    HRep,
    Indicator,
    L0Scalar,
    ModuleElem,
    ModuleMap,
    OpParamsT,
    VRep,
    apply,
    apply_hat_t,
    apply_s,
    apply_t,
    combine,
    conjugate_eval,
    leq,
    leq_fn,
    stable_combine_fn,
    sup_family,
    sup_fns,
    t_to_s,
    to_hat_t,
)
from l0convex.lp import LPProblem, LPStatus, solve

SP = AtomSpace((0.1, 0.2, 0.3, 0.4))
N, D = 4, 2


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def hrep(rng, K=3, box=None):
    slopes, alphas = rng.standard_normal((K, N, D)), rng.standard_normal((K, N))
    if box is None:
        return HRep(SP, slopes, alphas, check=False)
    eye = np.eye(D)
    a = np.concatenate([eye, -eye])[:, None, :].repeat(N, axis=1)
    return HRep(SP, slopes, alphas, a, np.full((2 * D, N), box))


def params(rng):
    G = rng.standard_normal((N, D, D)) + 3 * np.eye(D)
    return OpParamsT(ModuleMap(SP, G), ModuleElem(SP, rng.standard_normal((N, D))),
                     DualElem(SP, rng.standard_normal((N, D))), L0Scalar(SP, np.exp(rng.standard_normal(N))),
                     L0Scalar(SP, rng.standard_normal(N)))


def test_dedekind_surrogate(rng):
    for _ in range(100):
        fam = [L0Scalar(SP, rng.standard_normal(N)) for _ in range(5)]
        bound = L0Scalar(SP, np.max([f.values for f in fam], axis=0) + rng.random(N))
        assert leq(sup_family(fam), bound)


def test_apply_is_stable_in_both_arguments(rng):
    A = Event(SP, [True, False, False, True])
    T1, T2 = (ModuleMap(SP, rng.standard_normal((N, D, D))) for _ in range(2))
    x, y = (ModuleElem(SP, rng.standard_normal((N, D))) for _ in range(2))
    assert apply(T1, combine(A, x, y)) == combine(A, apply(T1, x), apply(T1, y))
    glued = ModuleMap(SP, np.where(A.mask[:, None, None], T1.matrices, T2.matrices))
    assert apply(glued, x) == combine(A, apply(T1, x), apply(T2, x))


class TestLP:
    def test_weak_duality_spot_check(self, rng):
        nv, m = 3, 4
        for _ in range(10):
            A = rng.standard_normal((m, nv))
            b = rng.random(m) + 0.1  # x = 0 is feasible
            c = rng.standard_normal(nv)
            r = solve(LPProblem(c, [(A[i], "<=", b[i]) for i in range(m)], upper=[2.0] * nv))
            assert r.status == LPStatus.OPTIMAL
            assert c @ r.x == pytest.approx(r.value, abs=1e-12)
            samples = 2.0 * rng.random((1000, nv))
            feasible = np.all(samples @ A.T <= b, axis=1)
            assert np.all(samples[feasible] @ c <= r.value + 1e-9)

    def test_deterministic(self, rng):
        A = rng.standard_normal((5, 4))
        p = LPProblem(rng.standard_normal(4), [(A[i], "<=", 1.0) for i in range(5)], upper=[3.0] * 4)
        first = solve(p)
        for _ in range(5):
            again = solve(p)
            assert again.status == first.status and again.value == first.value
            assert np.array_equal(again.x, first.x)


class TestConvexInvariants:
    def test_pieces_are_minorants(self, rng):
        for box in (None, 1.0):
            f = hrep(rng, K=4, box=box)
            X = rng.standard_normal((50, N, D))
            for k in range(f.n_pieces):
                assert leq_fn(f.pieces[k].to_hrep(), f).holds
            pieces = np.max(np.einsum("knd,pnd->pkn", f.slopes, X) + f.intercepts[None], axis=1)
            inside = np.isfinite(f.values(X))
            np.testing.assert_allclose(f.values(X)[inside], pieces[inside], atol=1e-12)

    def test_intercepts_bounded_by_conjugate(self, rng):
        for _ in range(10):
            f = hrep(rng, K=5)
            X = 3.0 * rng.standard_normal((400, N, D))
            active = np.argmax(np.einsum("knd,pnd->pkn", f.slopes, X) + f.intercepts[None], axis=1)
            for k in range(f.n_pieces):
                fs = conjugate_eval(f, DualElem(SP, f.slopes[k])).values
                assert np.all(f.intercepts[k] <= -fs + 1e-8)
                # where piece k wins at a sample it is not dominated, so the bound is tight
                tight = (active == k).any(axis=0)
                np.testing.assert_allclose(f.intercepts[k][tight], -fs[tight], atol=1e-8)

    def test_conjugation_reverses_order(self, rng):
        for _ in range(20):
            g = hrep(rng, K=3)
            f = HRep(SP, g.slopes[:2], g.intercepts[:2] - rng.random((2, N)), check=False)
            assert leq_fn(f, g).holds
            # g* <= f* checked pointwise at dual points where both are finite
            U = np.concatenate([g.slopes, f.slopes, rng.standard_normal((20, N, D))])
            gs = np.stack([conjugate_eval(g, DualElem(SP, u)).values for u in U])
            fs = np.stack([conjugate_eval(f, DualElem(SP, u)).values for u in U])
            both = np.isfinite(fs)
            assert np.all(gs[both] <= fs[both] + 1e-9)

    def test_below_affine_means_affine(self, rng):
        u = DualElem(SP, rng.standard_normal((N, D)))
        alpha = L0Scalar(SP, rng.standard_normal(N))
        f = HRep(SP, np.stack([u.values] * 3), alpha.values[None] - rng.random((3, N)), check=False)
        assert leq_fn(f, AffineFn(u, alpha).to_hrep()).holds
        assert np.max(np.abs(f.slopes - u.values[None])) <= 1e-10
        bent = HRep(SP, np.concatenate([f.slopes, u.values[None] + 1e-3]), np.concatenate([f.intercepts,
                    alpha.values[None] - 5.0]), check=False)
        assert not leq_fn(bent, AffineFn(u, alpha).to_hrep()).holds

    @pytest.mark.parametrize("kind", ["hrep", "hrep_box", "vrep", "indicator"])
    def test_l0_convexity(self, rng, kind):
        if kind == "hrep":
            f = hrep(rng)
        elif kind == "hrep_box":
            f = hrep(rng, box=1.0)
        elif kind == "vrep":
            f = VRep(SP, 2 * rng.standard_normal((4, N, D)), rng.standard_normal((4, N)))
        else:
            f = Indicator(SP, rng.integers(-3, 4, (N, D)).astype(float))
        for _ in range(50):
            if kind == "indicator":
                # integer points and dyadic weights keep the mixture exact
                x = np.where(rng.random((N, 1)) < 0.5, f.point, rng.integers(-3, 4, (N, D)))
                y = np.where(rng.random((N, 1)) < 0.5, f.point, rng.integers(-3, 4, (N, D)))
                lam = rng.integers(0, 5, N) / 4.0
            else:
                x, y = 1.2 * rng.standard_normal((2, N, D))
                lam = rng.random(N)
            z = lam[:, None] * x + (1 - lam[:, None]) * y
            fz = ExtL0Scalar(SP, f.values(z))
            rhs = L0Scalar(SP, lam) * ExtL0Scalar(SP, f.values(x)) + L0Scalar(SP, 1 - lam) * ExtL0Scalar(SP, f.values(y))
            assert np.all(fz.values <= rhs.values + 1e-9)


class TestOperatorInvariants:
    def test_domain_free_stays_finite(self, rng):
        p = params(rng)
        g = apply_t(p, hrep(rng))
        assert g.is_domain_free
        assert np.isfinite(g.values(10 * rng.standard_normal((50, N, D)))).all()

    def test_sup_exchange(self, rng):
        p = params(rng)
        fs = [hrep(rng, K=2), hrep(rng, K=3, box=1.5), hrep(rng, K=1)]
        X = rng.standard_normal((100, N, D))
        left = apply_t(p, sup_fns(fs)).values(X)
        right = np.max(np.stack([apply_t(p, f).values(X) for f in fs]), axis=0)
        np.testing.assert_allclose(left, right, atol=1e-12)

    def test_affine_to_affine(self, rng):
        f = AffineFn(DualElem(SP, rng.standard_normal((N, D))), L0Scalar(SP, rng.standard_normal(N))).to_hrep()
        g = apply_t(params(rng), f)
        assert g.n_pieces == 1 and g.is_domain_free

    def test_segment_preservation(self, rng):
        h = to_hat_t(params(rng))
        for _ in range(20):
            u1, u2 = rng.standard_normal((2, N, D))
            a1, a2 = rng.standard_normal((2, N))
            lam = rng.random(N)
            u = lam[:, None] * u1 + (1 - lam[:, None]) * u2
            a = lam * a1 + (1 - lam) * a2
            img = apply_hat_t(h, DualElem(SP, u), L0Scalar(SP, a))
            i1 = apply_hat_t(h, DualElem(SP, u1), L0Scalar(SP, a1))
            i2 = apply_hat_t(h, DualElem(SP, u2), L0Scalar(SP, a2))
            np.testing.assert_allclose(img[0].values, lam[:, None] * i1[0].values + (1 - lam[:, None]) * i2[0].values,
                                       atol=1e-12)
            np.testing.assert_allclose(img[1].values, lam * i1[1].values + (1 - lam) * i2[1].values, atol=1e-12)

    def test_full_support_propagation(self, rng):
        h = to_hat_t(params(rng))
        for _ in range(50):
            diff = DualElem(SP, rng.standard_normal((N, D)))
            assert np.all(np.linalg.norm(apply(h.D, diff).values, axis=1) > 0)

    def test_s_is_stable(self, rng):
        s = t_to_s(params(rng))
        f, g = hrep(rng, K=2), hrep(rng, K=4)
        V = rng.standard_normal((60, N, D))
        for _ in range(5):
            A = Event(SP, rng.random(N) < 0.5)
            left = apply_s(s, stable_combine_fn(A, f, g)).values(V)
            right = np.where(A.mask, apply_s(s, f).values(V), apply_s(s, g).values(V))
            assert np.array_equal(np.isinf(left), np.isinf(right))
            np.testing.assert_allclose(left[np.isfinite(left)], right[np.isfinite(right)], atol=1e-12)
