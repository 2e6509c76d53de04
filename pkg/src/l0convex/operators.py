"""Stable fully order preserving and order reversing operators on polyhedral functions.

An order preserving operator of the characterized class acts as

    T(f)(x) = tau f(H x + c) + <w, x> + beta

and the induced map on affine data ``(u, alpha)`` is

    (u, alpha) -> (D u + w, <d, u> + tau alpha + beta),  D = tau H*, d = tau c.

The order reversing counterpart is

    S(f)(u) = tau f*(H* u + v) + <u, y> + rho.

Both act here on representations in closed form; the pointwise identities are
what the test-suite checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .convex import DUAL, PRIMAL, HRep, VRep
from .errors import CharacterizationViolation, ParameterError, StructuralError, UnsupportedRepresentationError
from .lattice import AtomSpace, Event, L0Scalar, stable_combine_scalar
from .module import (
    DualElem,
    ModuleElem,
    ModuleMap,
    adjoint,
    apply,
    combine,
    dot,
    identity_map,
    invert,
    is_invertible,
    matvec,
    pairing,
)

__all__ = [
    "OpParamsT",
    "HatTParams",
    "OpParamsS",
    "SwapInvolution",
    "identity_params_t",
    "identity_params_s",
    "apply_t",
    "apply_hat_t",
    "to_hat_t",
    "from_hat_t",
    "recover_hat_t",
    "make_involution",
    "apply_s",
    "t_to_s",
    "sigma_operator",
    "sigma_affine_oracle",
]

RECOVERY_TOL = 1e-8
INVOLUTION_TOL = 1e-10


def _positive(tau: L0Scalar, name: str = "tau") -> None:
    if not (tau.values > 0.0).all():
        raise ParameterError(f"{name} must be strictly positive on every atom")


def _square(H: ModuleMap, dim: int, name: str) -> None:
    if H.shape != (dim, dim):
        raise ParameterError(f"{name} must be a {dim}x{dim} map per atom, got {H.shape}")
    if not is_invertible(H):
        raise ParameterError(f"{name} must be nonsingular on every atom")


@dataclass(frozen=True)
class OpParamsT:
    """Parameters of ``T(f)(x) = tau f(Hx + c) + <w, x> + beta``."""

    H: ModuleMap
    c: ModuleElem
    w: DualElem
    tau: L0Scalar
    beta: L0Scalar

    def __post_init__(self):
        for obj in (self.c, self.w, self.tau, self.beta):
            self.H.space.check(obj.space)
        _square(self.H, self.c.dim, "H")
        if self.w.dim != self.c.dim:
            raise StructuralError("w and c must have the same dimension")
        _positive(self.tau)

    @property
    def space(self) -> AtomSpace:
        return self.H.space

    @property
    def dim(self) -> int:
        return self.c.dim


@dataclass(frozen=True)
class HatTParams:
    """Parameters of the affine-data map ``(u, alpha) -> (Du + w, <d, u> + tau alpha + beta)``."""

    D: ModuleMap
    w: DualElem
    d: ModuleElem
    tau: L0Scalar
    beta: L0Scalar

    def __post_init__(self):
        for obj in (self.w, self.d, self.tau, self.beta):
            self.D.space.check(obj.space)
        _square(self.D, self.w.dim, "D")
        if self.d.dim != self.w.dim:
            raise StructuralError("d and w must have the same dimension")
        _positive(self.tau)

    @property
    def space(self) -> AtomSpace:
        return self.D.space

    @property
    def dim(self) -> int:
        return self.w.dim


@dataclass(frozen=True)
class OpParamsS:
    """Parameters of ``S(f)(u) = tau f*(H* u + v) + <u, y> + rho``."""

    H: ModuleMap
    v: DualElem
    y: ModuleElem
    tau: L0Scalar
    rho: L0Scalar

    def __post_init__(self):
        for obj in (self.v, self.y, self.tau, self.rho):
            self.H.space.check(obj.space)
        _square(self.H, self.v.dim, "H")
        if self.y.dim != self.v.dim:
            raise StructuralError("v and y must have the same dimension")
        _positive(self.tau)

    @property
    def space(self) -> AtomSpace:
        return self.H.space

    @property
    def dim(self) -> int:
        return self.v.dim


def identity_params_t(space: AtomSpace, dim: int) -> OpParamsT:
    zero = np.zeros((space.n, dim))
    return OpParamsT(identity_map(space, dim), ModuleElem(space, zero), DualElem(space, zero),
                     L0Scalar.constant(space, 1.0), L0Scalar.constant(space, 0.0))


def identity_params_s(space: AtomSpace, dim: int) -> OpParamsS:
    """Parameters for which ``S`` is the plain conjugate transform."""
    zero = np.zeros((space.n, dim))
    return OpParamsS(identity_map(space, dim), DualElem(space, zero), ModuleElem(space, zero),
                     L0Scalar.constant(space, 1.0), L0Scalar.constant(space, 0.0))


def _check_fn(params, f, side=PRIMAL):
    if not isinstance(f, HRep):
        raise UnsupportedRepresentationError(f"operator acts on H-representations, got {type(f).__name__}")
    if f.side != side:
        raise StructuralError(f"operator expects a {side}-side function")
    params.space.check(f.space)
    if f.dim != params.dim:
        raise StructuralError("function and parameters have different dimensions")


def apply_t(params: OpParamsT, f: HRep) -> HRep:
    """``T(f)`` in closed form: pieces ``(tau H* u + w, tau(<u, c> + alpha) + beta)``."""
    _check_fn(params, f)
    Ht = np.swapaxes(params.H.matrices, 1, 2)
    tau = params.tau.values
    c = params.c.values
    slopes = tau[:, None] * matvec(Ht, f.slopes) + params.w.values
    alphas = tau * (dot(f.slopes, c) + f.intercepts) + params.beta.values
    dom_a = matvec(Ht, f.dom_a)
    dom_b = f.dom_b - dot(f.dom_a, c)
    return HRep(f.space, slopes, alphas, dom_a, dom_b, side=PRIMAL, check=False)


def apply_hat_t(params: HatTParams, u: DualElem, alpha: L0Scalar) -> tuple:
    """Image of the affine datum ``(u, alpha)``."""
    params.space.check(u.space)
    slope = apply(params.D, u) + params.w
    value = pairing(u, params.d) + params.tau * alpha + params.beta
    return slope, L0Scalar(u.space, value.values)


def to_hat_t(p: OpParamsT) -> HatTParams:
    D = ModuleMap(p.space, p.tau.values[:, None, None] * np.swapaxes(p.H.matrices, 1, 2))
    d = ModuleElem(p.space, p.tau.values[:, None] * p.c.values)
    return HatTParams(D, p.w, d, p.tau, p.beta)


def from_hat_t(h: HatTParams) -> OpParamsT:
    inv_tau = 1.0 / h.tau.values
    H = adjoint(ModuleMap(h.space, inv_tau[:, None, None] * h.D.matrices))
    c = ModuleElem(h.space, inv_tau[:, None] * h.d.values)
    return OpParamsT(H, c, h.w, h.tau, h.beta)


Oracle = Callable[[DualElem, L0Scalar], tuple]


def _max_dev(a, b) -> float:
    return max(float(np.max(np.abs(a[0].values - b[0].values))), float(np.max(np.abs(a[1].values - b[1].values))))


def _probe_record(u, alpha, got, want) -> dict:
    return {
        "u": u.values.tolist(),
        "alpha": alpha.values.tolist(),
        "got": [got[0].values.tolist(), got[1].values.tolist()],
        "expected": [want[0].values.tolist(), want[1].values.tolist()],
    }


def recover_hat_t(oracle: Oracle, space: AtomSpace, dim: int, *, checks: int = 20, seed: int = 0,
                  tol: float = RECOVERY_TOL) -> HatTParams:
    """Identify ``(D, w, d, tau, beta)`` of a black-box affine-data map by probing.

    Stability is checked first (singleton events, then random ones), then the
    recovered parameters are required to reproduce the oracle on random data.
    Raises :class:`CharacterizationViolation` with the offending probe.
    """
    rng = np.random.default_rng(seed)
    n = space.n

    def rand_pair():
        return DualElem(space, rng.standard_normal((n, dim))), L0Scalar(space, rng.standard_normal(n))

    events = [Event.of_atoms(space, [i]) for i in range(n)]
    events += [Event(space, rng.random(n) < 0.5) for _ in range(checks)]
    for A in events:
        (u1, a1), (u2, a2) = rand_pair(), rand_pair()
        got = oracle(combine(A, u1, u2), stable_combine_scalar(A, a1, a2))
        o1, o2 = oracle(u1, a1), oracle(u2, a2)
        want = (combine(A, o1[0], o2[0]), stable_combine_scalar(A, o1[1], o2[1]))
        if _max_dev(got, want) > tol:
            witness = {"kind": "stability", "event": A.mask.tolist(),
                       "first": _probe_record(u1, a1, o1, o1), "second": _probe_record(u2, a2, o2, o2),
                       "glued": {"got": [got[0].values.tolist(), got[1].values.tolist()],
                                 "expected": [want[0].values.tolist(), want[1].values.tolist()]},
                       "deviation": _max_dev(got, want)}
            raise CharacterizationViolation("operator is not stable", witness=witness)

    zero_u = DualElem.zeros(space, dim)
    zero = L0Scalar.constant(space, 0.0)
    one = L0Scalar.constant(space, 1.0)
    w, beta = oracle(zero_u, zero)
    w1, gamma = oracle(zero_u, one)
    if float(np.max(np.abs(w1.values - w.values))) > tol:
        raise CharacterizationViolation("slope image depends on the intercept",
                                        witness={"kind": "slope-dependence", "w0": w.values.tolist(),
                                                 "w1": w1.values.tolist()})
    tau = gamma.values - beta.values
    D = np.zeros((n, dim, dim))
    d = np.zeros((n, dim))
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        v_i, delta_i = oracle(DualElem.constant(space, e), zero)
        D[:, :, i] = v_i.values - w.values
        d[:, i] = delta_i.values - beta.values
    if not (tau > 0.0).all():
        raise CharacterizationViolation("intercept scale is not strictly positive",
                                        witness={"kind": "tau", "tau": tau.tolist()})
    Dmap = ModuleMap(space, D)
    if not is_invertible(Dmap):
        raise CharacterizationViolation("slope map is singular", witness={"kind": "singular", "D": D.tolist()})
    params = HatTParams(Dmap, w, ModuleElem(space, d), L0Scalar(space, tau), L0Scalar(space, beta.values))

    for _ in range(checks):
        u, a = rand_pair()
        got = oracle(u, a)
        want = apply_hat_t(params, u, a)
        if _max_dev(got, want) > tol:
            witness = {"kind": "affineness", **_probe_record(u, a, got, want), "deviation": _max_dev(got, want)}
            raise CharacterizationViolation("operator is not L0-affine on affine data", witness=witness)
    return params


def make_involution(H: ModuleMap, c: ModuleElem, w: DualElem, tol: float = INVOLUTION_TOL) -> OpParamsT:
    """Parameters of the involution ``f -> f(Hx + c) + <w, x> - <w, c>/2``.

    Needs ``H^2 = I``, ``Hc = -c`` and ``H* w = -w``.
    """
    d = c.dim
    eye = np.eye(d)
    if H.shape != (d, d):
        raise ParameterError(f"H must be {d}x{d}")
    sq = H.matrices @ H.matrices
    if float(np.max(np.abs(sq - eye))) > tol:
        raise ParameterError("H is not an involution: H^2 != I")
    if float(np.max(np.abs(apply(H, c).values + c.values))) > tol:
        raise ParameterError("c is not in Ker(H + I)")
    if float(np.max(np.abs(apply(adjoint(H), w).values + w.values))) > tol:
        raise ParameterError("w is not in Ker(H* + I)")
    beta = L0Scalar(c.space, -0.5 * dot(w.values, c.values))
    return OpParamsT(H, c, w, L0Scalar.constant(c.space, 1.0), beta)


def apply_s(params: OpParamsS, f: HRep) -> VRep:
    """``S(f)`` as a dual-side V-representation.

    With ``f* = VRep{(u_k, -alpha_k)}`` the points are ``q_k = (H*)^-1 (u_k - v)``
    and the weights ``-tau alpha_k + <q_k, y> + rho``.
    """
    _check_fn(params, f)
    if not f.is_domain_free:
        raise UnsupportedRepresentationError("S needs a domain-free HRep so that f* has a closed V-form")
    inv_t = np.swapaxes(invert(params.H).matrices, 1, 2)
    q = matvec(inv_t, f.slopes - params.v.values)
    weights = -params.tau.values * f.intercepts + dot(q, params.y.values) + params.rho.values
    return VRep(f.space, q, weights, side=DUAL)


def t_to_s(p: OpParamsT) -> OpParamsS:
    """Order reversing parameters with ``S(f) = (T f)*``."""
    H1inv = invert(p.H)
    H = ModuleMap(p.space, H1inv.matrices / p.tau.values[:, None, None])
    v = -apply(adjoint(H), p.w)
    h1c = apply(H1inv, p.c)
    y = -h1c
    rho = L0Scalar(p.space, pairing(p.w, h1c).values - p.beta.values)
    return OpParamsS(H, v, y, p.tau, rho)


@dataclass(frozen=True)
class SwapInvolution:
    """Measure preserving involution of the atoms; ``perm[i]`` is the partner of atom ``i``."""

    space: AtomSpace
    perm: tuple

    def __post_init__(self):
        perm = tuple(int(i) for i in self.perm)
        n = self.space.n
        if sorted(perm) != list(range(n)):
            raise StructuralError("perm must be a permutation of the atoms")
        if any(perm[perm[i]] != i for i in range(n)):
            raise StructuralError("perm is not an involution")
        p = self.space.weights
        if np.max(np.abs(p - p[list(perm)])) > 1e-12:
            raise StructuralError("perm does not preserve the atom probabilities")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def half_shift(cls, space: AtomSpace) -> "SwapInvolution":
        """Pair atom ``i`` with ``i + n/2`` (mod n), the atomic analogue of ``w -> w + 1/2``."""
        n = space.n
        if n % 2:
            raise StructuralError("half_shift needs an even number of atoms")
        h = n // 2
        return cls(space, tuple((i + h) % n for i in range(n)))

    def first_half(self) -> Event:
        return Event.of_atoms(self.space, range(self.space.n // 2))

    def sigma(self, values: np.ndarray) -> np.ndarray:
        """Compose a random variable with the atom permutation (axis -1 holds atoms)."""
        return np.asarray(values)[..., list(self.perm)]

    def sigma_event(self, A: Event) -> Event:
        return Event(self.space, self.sigma(A.mask))


def sigma_operator(sw: SwapInvolution, f: HRep) -> HRep:
    """``T(f)(x) = sigma(f(sigma x))`` on a one-dimensional module.

    Fully order preserving and an involution, but not stable.
    """
    if not isinstance(f, HRep):
        raise UnsupportedRepresentationError("sigma_operator acts on H-representations")
    sw.space.check(f.space)
    if f.dim != 1:
        raise StructuralError("sigma_operator is defined for E = L0(F), dimension 1")
    perm = list(sw.perm)
    return HRep(f.space, f.slopes[:, perm, :], f.intercepts[:, perm], f.dom_a[:, perm, :], f.dom_b[:, perm],
                side=f.side, check=False)


def sigma_affine_oracle(sw: SwapInvolution) -> Oracle:
    """The sigma operator restricted to affine functions, as a map on ``(u, alpha)``."""

    def oracle(u: DualElem, alpha: L0Scalar) -> tuple:
        h = HRep(u.space, u.values[None], alpha.values[None], side=PRIMAL, check=False)
        out = sigma_operator(sw, h)
        return DualElem(u.space, out.slopes[0]), L0Scalar(u.space, out.intercepts[0])

    return oracle
