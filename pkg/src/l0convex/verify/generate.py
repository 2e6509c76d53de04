"""Seeded random objects for the property suites.

Each trial gets its own ``numpy`` generator derived from ``(seed, trial)``, so
trials can run in any order or in parallel without changing their data.
"""
from __future__ import annotations

import numpy as np

from ..convex import PRIMAL, HRep, Indicator, VRep, stable_combine_fn
from ..lattice import AtomSpace, Event, L0Scalar
from ..module import DualElem, ModuleElem, ModuleMap
from ..operators import HatTParams, OpParamsS, OpParamsT, identity_params_s, identity_params_t
from .scenario import Scenario

__all__ = ["trial_rng", "RandomObjects"]


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


class RandomObjects:
    """Random instances over one atom space and dimension."""

    def __init__(self, scenario: Scenario, rng: np.random.Generator, dim: int | None = None):
        self.scenario = scenario
        self.rng = rng
        self.space: AtomSpace = scenario.space
        self.n = self.space.n
        self.dim = scenario.dim if dim is None else dim

    # scalars and events ----------------------------------------------------
    def scalar(self, scale: float = 1.0) -> L0Scalar:
        return L0Scalar(self.space, scale * self.rng.standard_normal(self.n))

    def positive(self) -> L0Scalar:
        return L0Scalar(self.space, np.exp(0.5 * self.scenario.param_scale * self.rng.standard_normal(self.n)))

    def unit_interval(self) -> L0Scalar:
        return L0Scalar(self.space, self.rng.random(self.n))

    def event(self, p: float = 0.5) -> Event:
        return Event(self.space, self.rng.random(self.n) < p)

    def proper_event(self) -> Event:
        """Random event that is neither empty nor full (full when there is one atom)."""
        if self.n == 1:
            return Event.full(self.space)
        while True:
            A = self.event()
            if not (A.is_empty or A.is_full):
                return A

    # module data -------------------------------------------------------------
    def array(self, scale: float = 1.0) -> np.ndarray:
        return scale * self.rng.standard_normal((self.n, self.dim))

    def elem(self, scale: float = 1.0) -> ModuleElem:
        return ModuleElem(self.space, self.array(scale))

    def dual(self, scale: float = 1.0) -> DualElem:
        return DualElem(self.space, self.array(scale))

    def points(self, count: int, scale: float = 2.0) -> np.ndarray:
        return scale * self.rng.standard_normal((count, self.n, self.dim))

    def hull_points(self, gens: np.ndarray, count: int) -> np.ndarray:
        """Random per-atom convex combinations of generators ``gens`` of shape ``(K, n, d)``."""
        lam = self.rng.dirichlet(np.ones(gens.shape[0]), size=(count, self.n))
        return np.einsum("pnk,knd->pnd", lam, gens)

    def matrices(self, scale: float = 1.0) -> np.ndarray:
        """Per-atom matrices made nonsingular by a signed diagonal shift (strict diagonal dominance)."""
        d = self.dim
        G = scale * self.rng.standard_normal((self.n, d, d))
        off = np.abs(G).sum(axis=2) - np.abs(np.diagonal(G, axis1=1, axis2=2))
        shift = off + 0.5 + self.rng.random((self.n, d))
        sign = np.where(self.rng.random((self.n, d)) < 0.5, -1.0, 1.0)
        diag = sign * shift
        idx = np.arange(d)
        G[:, idx, idx] = diag
        return G

    def nonsingular_map(self) -> ModuleMap:
        return ModuleMap(self.space, self.matrices(self.scenario.param_scale))

    # functions ---------------------------------------------------------------
    def n_pieces(self) -> int:
        return int(self.rng.integers(self.scenario.min_pieces, self.scenario.max_pieces + 1))

    def box(self, radius: np.ndarray) -> tuple:
        """Rows of the per-atom box ``|x_i| <= radius``."""
        d = self.dim
        eye = np.eye(d)
        a = np.concatenate([eye, -eye])[:, None, :].repeat(self.n, axis=1)
        b = np.tile(radius, (2 * d, 1))
        return a, b

    def hrep(self, pieces: int | None = None, domain: bool | None = None, side: str = PRIMAL) -> HRep:
        K = self.n_pieces() if pieces is None else pieces
        s = self.scenario.slope_scale
        slopes = s * self.rng.standard_normal((K, self.n, self.dim))
        alphas = self.rng.standard_normal((K, self.n))
        if domain is None:
            domain = self.rng.random() < self.scenario.domain_prob
        if domain:
            a, b = self.box(1.0 + 2.0 * self.rng.random(self.n))
            return HRep(self.space, slopes, alphas, a, b, side=side)
        return HRep(self.space, slopes, alphas, side=side, check=False)

    def vrep(self, pieces: int | None = None, side: str = PRIMAL) -> VRep:
        K = self.n_pieces() if pieces is None else pieces
        pts = 2.0 * self.rng.standard_normal((K, self.n, self.dim))
        return VRep(self.space, pts, self.rng.standard_normal((K, self.n)), side=side)

    def indicator(self, side: str = PRIMAL) -> Indicator:
        return Indicator(self.space, self.array(), side=side)

    def box_radius(self, f: HRep) -> np.ndarray | None:
        """Radius of a generated box domain (rows ``e_i . x <= r``), ``None`` if domain-free."""
        if f.is_domain_free:
            return None
        return np.asarray(f.dom_b[0])

    def ordered_pair(self, g: HRep, A: Event) -> HRep:
        """A primal HRep ``f`` with ``f <= g`` exactly on the atoms of ``A``.

        ``g`` is either domain-free or carries a box domain from :meth:`hrep`.
        Violations off ``A`` have a margin of at least 1/2 or are unbounded.
        """
        rng = self.rng
        r = self.box_radius(g)
        K = g.n_pieces
        keep = rng.random(K) < 0.7
        keep[rng.integers(K)] = True
        drop = np.where(rng.random((K, self.n)) < 0.7, rng.random((K, self.n)), 0.0)
        le_slopes = g.slopes[keep]
        le_alphas = (g.intercepts - drop)[keep]
        if r is not None and rng.random() < 0.5:
            a, b = self.box(r + rng.random(self.n))
            f_le = HRep(self.space, le_slopes, le_alphas, a, b, side=g.side)
        else:
            f_le = HRep(self.space, le_slopes, le_alphas, side=g.side, check=False)

        kinds = ["shift", "shrink"] if r is not None else ["shift", "slope"]
        kind = kinds[int(rng.integers(2))]
        if kind == "shift":
            f_bad = HRep(self.space, g.slopes, g.intercepts + 0.5 + rng.random((K, self.n)), side=g.side,
                         check=False)
        elif kind == "shrink":
            a, b = self.box(0.5 * r)
            f_bad = HRep(self.space, le_slopes, le_alphas, a, b, side=g.side)
        else:
            # slope strictly outside the hull of g's slopes, so f - g is unbounded above
            e = rng.standard_normal((self.n, self.dim))
            e /= np.linalg.norm(e, axis=1, keepdims=True)
            reach = np.max(np.einsum("knd,nd->kn", g.slopes, e), axis=0)
            new = e * (reach + 0.5 + rng.random(self.n))[:, None]
            f_bad = HRep(self.space, np.concatenate([le_slopes, new[None]]),
                         np.concatenate([le_alphas, rng.standard_normal((1, self.n))]), side=g.side, check=False)
        return stable_combine_fn(A, f_le, f_bad)

    # operator parameters -----------------------------------------------------
    def params_t(self) -> OpParamsT:
        if self.scenario.identity_params:
            return identity_params_t(self.space, self.dim)
        s = self.scenario.param_scale
        return OpParamsT(self.nonsingular_map(), self.elem(s), self.dual(s), self.positive(), self.scalar(s))

    def params_s(self) -> OpParamsS:
        if self.scenario.identity_params:
            return identity_params_s(self.space, self.dim)
        s = self.scenario.param_scale
        return OpParamsS(self.nonsingular_map(), self.dual(s), self.elem(s), self.positive(), self.scalar(s))

    def params_hat(self) -> HatTParams:
        s = self.scenario.param_scale
        return HatTParams(self.nonsingular_map(), self.dual(s), self.elem(s), self.positive(), self.scalar(s))

    def involution_data(self) -> tuple:
        """``(H, c, w)`` with ``H^2 = I``, ``Hc = -c`` and ``H* w = -w``."""
        n, d, rng = self.n, self.dim, self.rng
        H = np.empty((n, d, d))
        c = np.zeros((n, d))
        w = np.zeros((n, d))
        for a in range(n):
            Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
            P = Q * (0.5 + 1.5 * rng.random(d))
            signs = np.where(rng.random(d) < 0.5, -1.0, 1.0)
            Pinv = np.linalg.inv(P)
            H[a] = (P * signs) @ Pinv
            neg = signs < 0
            c[a] = P[:, neg] @ rng.standard_normal(neg.sum())
            w[a] = Pinv.T[:, neg] @ rng.standard_normal(neg.sum())
        return ModuleMap(self.space, H), ModuleElem(self.space, c), DualElem(self.space, w)

