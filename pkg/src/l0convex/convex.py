"""Polyhedral proper lsc L0-convex functions with exact random conjugation.

Three representations are supported, all stored atomwise:

``HRep``
    ``f(x) = max_k <u_k, x> + alpha_k`` on the polyhedron ``<a_j, x> <= b_j``
    and ``+inf`` off it.  A constraint row may be ``(0, 0)`` on some atoms,
    which makes it vacuous there.
``VRep``
    Lower convex envelope of weighted points: ``f(z)`` is the least
    ``sum l_k beta_k`` over simplex weights with ``sum l_k p_k = z``.
``Indicator``
    ``0`` where ``x`` equals a fixed point, ``+inf`` elsewhere, atom by atom.

Conjugation swaps ``HRep`` (without domain) and ``VRep`` exactly; evaluation
of a conjugate through its definitional supremum is kept as a separate LP
path so the two can be checked against each other.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import lp
from .errors import (
    EvaluationError,
    ImproperFunctionError,
    PreconditionError,
    StructuralError,
    TheoremViolation,
    UnsupportedRepresentationError,
)
from .lattice import AtomSpace, Event, ExtL0Scalar, L0Scalar
from .module import DualElem, ModuleElem, dot

__all__ = [
    "PRIMAL",
    "DUAL",
    "ORDER_TOL",
    "AffineFn",
    "ConvexFn",
    "HRep",
    "VRep",
    "Indicator",
    "OrderWitness",
    "OrderVerdict",
    "evaluate",
    "sup_fns",
    "stable_combine_fn",
    "leq_fn",
    "comparison_decompose",
    "subdiff_mu",
    "hull_membership",
    "conjugate_rep",
    "conjugate_eval",
    "conjugate_values",
    "values_family",
    "conjugate_values_family",
]

PRIMAL = "primal"
DUAL = "dual"
ORDER_TOL = 1e-9
SLOPE_TOL = 1e-10
MU_RESIDUAL_TOL = 1e-8
MU_RANGE_TOL = 1e-9

_ARG_TYPE = {PRIMAL: ModuleElem, DUAL: DualElem}
_SLOPE_TYPE = {PRIMAL: DualElem, DUAL: ModuleElem}
_OTHER = {PRIMAL: DUAL, DUAL: PRIMAL}

_FREE = -np.inf, np.inf


def _frozen(arr, ndim) -> np.ndarray:
    out = np.array(arr, dtype=float)
    if out.ndim != ndim:
        raise StructuralError(f"expected a {ndim}-d array, got shape {out.shape}")
    if not np.isfinite(out).all():
        raise StructuralError("representation data must be finite")
    out.setflags(write=False)
    return out


def _check_side(side: str) -> str:
    if side not in _ARG_TYPE:
        raise StructuralError(f"side must be 'primal' or 'dual', got {side!r}")
    return side


def _batch_or_fail(res: lp.BatchResult, what: str) -> None:
    bad = res.status == lp.LPStatus.NUMERICAL_FAILURE
    if bad.any():
        raise EvaluationError(f"linear program failed numerically during {what} ({int(bad.sum())} problems)")


@dataclass(frozen=True)
class AffineFn:
    """``h_{u, alpha}(x) = <u, x> + alpha``."""

    u: ModuleElem | DualElem
    alpha: L0Scalar

    def __post_init__(self):
        self.u.space.check(self.alpha.space)
        if not isinstance(self.alpha, L0Scalar):
            object.__setattr__(self, "alpha", L0Scalar(self.alpha.space, self.alpha.values))

    @property
    def space(self) -> AtomSpace:
        return self.u.space

    @property
    def side(self) -> str:
        return PRIMAL if isinstance(self.u, DualElem) else DUAL

    def __call__(self, x) -> L0Scalar:
        return L0Scalar(self.space, dot(self.u.values, x.values) + self.alpha.values)

    def to_hrep(self) -> "HRep":
        return HRep(self.space, self.u.values[None], self.alpha.values[None], side=self.side)


class ConvexFn:
    """Common surface of the three representations."""

    variant = "abstract"
    space: AtomSpace
    side: str

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def values(self, X) -> np.ndarray:
        """Evaluate on stacked points ``X`` of shape ``(..., n, d)``; returns ``(..., n)``."""
        raise NotImplementedError

    def _check_arg(self, x):
        want = _ARG_TYPE[self.side]
        if not isinstance(x, want):
            raise StructuralError(f"a {self.side}-side function takes {want.__name__}, got {type(x).__name__}")
        self.space.check(x.space)
        if x.dim != self.dim:
            raise StructuralError(f"dimension mismatch: function has {self.dim}, point has {x.dim}")

    def __call__(self, x) -> ExtL0Scalar:
        return evaluate(self, x)

    def _points(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-2:] != (self.space.n, self.dim):
            raise StructuralError(f"points must have trailing shape ({self.space.n}, {self.dim}), got {X.shape}")
        return X


class HRep(ConvexFn):
    variant = "hrep"

    def __init__(self, space: AtomSpace, slopes, intercepts, dom_a=None, dom_b=None, side: str = PRIMAL,
                 check: bool = True):
        slopes = _frozen(slopes, 3)
        intercepts = _frozen(intercepts, 2)
        K, n, d = slopes.shape
        if K == 0:
            raise StructuralError("an HRep needs at least one affine piece")
        if n != space.n or intercepts.shape != (K, n):
            raise StructuralError("piece arrays do not match the atom space")
        if dom_a is None:
            dom_a, dom_b = np.zeros((0, n, d)), np.zeros((0, n))
        dom_a = _frozen(dom_a, 3)
        dom_b = _frozen(dom_b, 2)
        J = dom_a.shape[0]
        if dom_a.shape != (J, n, d) or dom_b.shape != (J, n):
            raise StructuralError("domain arrays do not match the pieces")
        self.space = space
        self.side = _check_side(side)
        self.slopes = slopes
        self.intercepts = intercepts
        self.dom_a = dom_a
        self.dom_b = dom_b
        if check:
            self._check_proper()

    @classmethod
    def from_pieces(cls, pieces: Sequence[AffineFn], domain: Sequence[tuple] = (), side: str | None = None,
                    check: bool = True) -> "HRep":
        if not pieces:
            raise StructuralError("an HRep needs at least one affine piece")
        space = pieces[0].space
        side = side or pieces[0].side
        slopes = np.stack([p.u.values for p in pieces])
        alphas = np.stack([p.alpha.values for p in pieces])
        if domain:
            dom_a = np.stack([a.values for a, _ in domain])
            dom_b = np.stack([b.values for _, b in domain])
        else:
            dom_a = dom_b = None
        return cls(space, slopes, alphas, dom_a, dom_b, side=side, check=check)

    @property
    def dim(self) -> int:
        return self.slopes.shape[2]

    @property
    def n_pieces(self) -> int:
        return self.slopes.shape[0]

    @property
    def pieces(self) -> list:
        cls = _SLOPE_TYPE[self.side]
        return [AffineFn(cls(self.space, s), L0Scalar(self.space, a)) for s, a in zip(self.slopes, self.intercepts)]

    @property
    def domain(self) -> list:
        cls = _SLOPE_TYPE[self.side]
        return [(cls(self.space, a), L0Scalar(self.space, b)) for a, b in zip(self.dom_a, self.dom_b)]

    @property
    def is_domain_free(self) -> bool:
        """True when every domain row is vacuous (zero normal, nonnegative bound) on every atom."""
        return bool(np.all(self.dom_a == 0.0) and np.all(self.dom_b >= 0.0))

    def _active_domain(self):
        if self.dom_a.shape[0] == 0 or self.is_domain_free:
            return None
        return self.dom_a, self.dom_b

    def _check_proper(self) -> None:
        dom = self._active_domain()
        if dom is None:
            return
        a, b = dom
        J, n, d = a.shape
        # feasibility of {x : a_j x <= b_j} on every atom
        A = np.transpose(a, (1, 0, 2))
        res = lp.solve_batch(np.zeros((n, d)), A, b.T, ["<="] * J, *_FREE)
        _batch_or_fail(res, "domain feasibility check")
        bad = np.flatnonzero(res.status == lp.LPStatus.INFEASIBLE)
        if bad.size:
            raise ImproperFunctionError(f"domain is empty on atoms {bad.tolist()}")

    def values(self, X) -> np.ndarray:
        X = self._points(X)
        Xk = X[..., None, :, :]
        vals = np.max(dot(self.slopes, Xk) + self.intercepts, axis=-2)
        if self.dom_a.shape[0]:
            outside = np.any(dot(self.dom_a, Xk) > self.dom_b, axis=-2)
            vals = np.where(outside, np.inf, vals)
        return vals

    def __repr__(self):
        return f"HRep(side={self.side}, pieces={self.n_pieces}, domain_rows={self.dom_a.shape[0]}, dim={self.dim})"


class VRep(ConvexFn):
    variant = "vrep"

    def __init__(self, space: AtomSpace, points, weights, side: str = PRIMAL):
        points = _frozen(points, 3)
        weights = _frozen(weights, 2)
        K, n, d = points.shape
        if K == 0:
            raise StructuralError("a VRep needs at least one point")
        if n != space.n or weights.shape != (K, n):
            raise StructuralError("point arrays do not match the atom space")
        self.space = space
        self.side = _check_side(side)
        self.points = points
        self.weights = weights

    @classmethod
    def from_points(cls, points: Sequence[tuple], side: str | None = None) -> "VRep":
        space = points[0][0].space
        if side is None:
            side = PRIMAL if isinstance(points[0][0], ModuleElem) else DUAL
        return cls(space, np.stack([p.values for p, _ in points]), np.stack([b.values for _, b in points]), side)

    @property
    def dim(self) -> int:
        return self.points.shape[2]

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def values(self, X) -> np.ndarray:
        X = self._points(X)
        lead = X.shape[:-2]
        n, d = self.space.n, self.dim
        vals = _vrep_values(self.points[None], self.weights[None], X.reshape(1, -1, n, d))
        return vals.reshape(lead + (n,))

    def __repr__(self):
        return f"VRep(side={self.side}, points={self.n_points}, dim={self.dim})"


class Indicator(ConvexFn):
    variant = "indicator"

    def __init__(self, space: AtomSpace, point, side: str = PRIMAL):
        point = _frozen(point, 2)
        if point.shape[0] != space.n:
            raise StructuralError("indicator point does not match the atom space")
        self.space = space
        self.side = _check_side(side)
        self.point = point

    @classmethod
    def of(cls, x0) -> "Indicator":
        return cls(x0.space, x0.values, PRIMAL if isinstance(x0, ModuleElem) else DUAL)

    @property
    def dim(self) -> int:
        return self.point.shape[1]

    def values(self, X) -> np.ndarray:
        X = self._points(X)
        same = np.all(X == self.point, axis=-1)
        return np.where(same, 0.0, np.inf)

    def __repr__(self):
        return f"Indicator(side={self.side}, dim={self.dim})"


def evaluate(f: ConvexFn, x) -> ExtL0Scalar:
    """Value ``f(x)`` atom by atom."""
    f._check_arg(x)
    vals = f.values(x.values)
    if np.isfinite(vals).all():
        return L0Scalar(f.space, vals)
    return ExtL0Scalar(f.space, vals)


def _same_kind(fs: Sequence[ConvexFn]):
    if not fs:
        raise StructuralError("empty family of functions")
    f0 = fs[0]
    for f in fs[1:]:
        f0.space.check(f.space)
        if f.variant != f0.variant:
            raise StructuralError(f"mixed representations: {f0.variant} and {f.variant}")
        if f.side != f0.side:
            raise StructuralError("mixed primal and dual functions")
        if f.dim != f0.dim:
            raise StructuralError("dimension mismatch between functions")


def sup_fns(fs: Sequence[HRep]) -> HRep:
    """Pointwise supremum of H-representations: union of pieces and of domain rows."""
    _same_kind(fs)
    if fs[0].variant != "hrep":
        raise StructuralError("sup_fns works on H-representations; conjugate first")
    f0 = fs[0]
    return HRep(
        f0.space,
        np.concatenate([f.slopes for f in fs]),
        np.concatenate([f.intercepts for f in fs]),
        np.concatenate([f.dom_a for f in fs]),
        np.concatenate([f.dom_b for f in fs]),
        side=f0.side,
        check=any(f.dom_a.shape[0] for f in fs),
    )


def _pair_product(mask, left, right):
    """All pairs ``(k, j)``: entries from ``left[k]`` on the event, ``right[j]`` off it."""
    extra = (None,) * (left.ndim - 2)
    sel = mask[(None, None, slice(None)) + extra]
    out = np.where(sel, left[:, None], right[None, :])
    return out.reshape((-1,) + out.shape[2:])


def stable_combine_fn(A: Event, f: ConvexFn, g: ConvexFn) -> ConvexFn:
    """Glue ``I_A f + I_{A^c} g`` within one representation."""
    _same_kind([f, g])
    A.space.check(f.space)
    mask = A.mask
    if isinstance(f, HRep):
        slopes = _pair_product(mask, f.slopes, g.slopes)
        alphas = _pair_product(mask, f.intercepts, g.intercepts)
        m3 = mask[None, :, None]
        dom_a = np.concatenate([np.where(m3, f.dom_a, 0.0), np.where(m3, 0.0, g.dom_a)])
        dom_b = np.concatenate([np.where(mask, f.dom_b, 0.0), np.where(mask, 0.0, g.dom_b)])
        return HRep(f.space, slopes, alphas, dom_a, dom_b, side=f.side, check=False)
    if isinstance(f, VRep):
        return VRep(f.space, _pair_product(mask, f.points, g.points), _pair_product(mask, f.weights, g.weights),
                    side=f.side)
    if isinstance(f, Indicator):
        return Indicator(f.space, np.where(mask[:, None], f.point, g.point), side=f.side)
    raise StructuralError(f"cannot combine {type(f).__name__}")


class OrderWitness(NamedTuple):
    """A point on one atom where ``f <= g`` fails, or the ray along which it fails."""

    atom: int
    point: np.ndarray
    reason: str
    gap: float
    ray: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "atom": self.atom,
            "point": self.point.tolist(),
            "reason": self.reason,
            "gap": self.gap if np.isfinite(self.gap) else str(self.gap),
            "ray": None if self.ray is None else self.ray.tolist(),
        }


class OrderVerdict(NamedTuple):
    holds: bool
    holds_event: Event
    witness: OrderWitness | None = None
    gaps: ExtL0Scalar | None = None  # per-atom worst excess of f over g

    def __bool__(self):
        return self.holds


def _witness_along(x, ray, c, base_gap):
    """Push ``x`` along ``ray`` until the linear excess ``base_gap + c.(s ray)`` is at least 1."""
    rate = float(c @ ray)
    s = (max(0.0, -base_gap) + 1.0) / rate if rate > 0 else 0.0
    return x + s * ray


def leq_fn(f: HRep, g: HRep, tol: float = ORDER_TOL) -> OrderVerdict:
    """Decide ``f <= g`` on every atom.

    On each atom the order holds iff the domain of ``g`` lies inside the domain
    of ``f`` and no piece of ``f`` exceeds ``g`` on ``dom g``; both facts are
    linear programs over ``dom g``.
    """
    if not (isinstance(f, HRep) and isinstance(g, HRep)):
        raise StructuralError("leq_fn decides H-representations; route V-representations through conjugation")
    _same_kind([f, g])
    n, d = f.space.n, f.dim
    Jg = g.dom_a.shape[0]
    Kg = g.n_pieces
    gaps = np.full(n, -np.inf)
    best = [None] * n  # (gap, reason, point, ray) per atom

    def note(atom, gap, reason, point, ray=None):
        if gap > gaps[atom]:
            gaps[atom] = gap
            best[atom] = (gap, reason, point, ray)

    # (i) every f-domain row must hold on dom g
    Jf = f.dom_a.shape[0]
    if Jf:
        B = Jf * n
        c = f.dom_a.reshape(B, d)
        A = np.broadcast_to(np.transpose(g.dom_a, (1, 0, 2))[None], (Jf, n, Jg, d)).reshape(B, Jg, d)
        b = np.broadcast_to(g.dom_b.T[None], (Jf, n, Jg)).reshape(B, Jg)
        res = lp.solve_batch(c, A, b, ["<="] * Jg, *_FREE)
        _batch_or_fail(res, "order decision")
        rhs = f.dom_b.reshape(B)
        for k in range(B):
            atom = k % n
            st = res.status[k]
            if st == lp.LPStatus.UNBOUNDED:
                pt = _witness_along(res.x[k], res.ray[k], c[k], float(c[k] @ res.x[k] - rhs[k]))
                note(atom, np.inf, "domain of g leaves domain of f at infinity", pt, res.ray[k])
            else:
                note(atom, float(res.value[k] - rhs[k]), "domain of g not inside domain of f", res.x[k])

    # (ii) sup over dom g of (h_k - g) must be <= 0; variables (x, t), t >= g pieces
    Kf = f.n_pieces
    B = Kf * n
    c = np.concatenate([f.slopes.reshape(B, d), -np.ones((B, 1))], axis=1)
    rows_pieces = np.concatenate([np.transpose(g.slopes, (1, 0, 2)), -np.ones((n, Kg, 1))], axis=2)
    rows_dom = np.concatenate([np.transpose(g.dom_a, (1, 0, 2)), np.zeros((n, Jg, 1))], axis=2)
    A_atom = np.concatenate([rows_pieces, rows_dom], axis=1)
    b_atom = np.concatenate([-g.intercepts.T, g.dom_b.T], axis=1)
    m = Kg + Jg
    A = np.broadcast_to(A_atom[None], (Kf, n, m, d + 1)).reshape(B, m, d + 1)
    b = np.broadcast_to(b_atom[None], (Kf, n, m)).reshape(B, m)
    res = lp.solve_batch(c, A, b, ["<="] * m, *_FREE)
    _batch_or_fail(res, "order decision")
    alpha = f.intercepts.reshape(B)
    for k in range(B):
        atom = k % n
        st = res.status[k]
        if st == lp.LPStatus.UNBOUNDED:
            base = float(c[k] @ res.x[k] + alpha[k])
            pt = _witness_along(res.x[k], res.ray[k], c[k], base)[:d]
            note(atom, np.inf, "a piece of f exceeds g at infinity", pt, res.ray[k][:d])
        else:
            note(atom, float(res.value[k] + alpha[k]), "a piece of f exceeds g", res.x[k][:d])

    ok = gaps <= tol
    event = Event(f.space, ok)
    witness = None
    if not ok.all():
        atom = int(np.flatnonzero(~ok)[0])
        gap, reason, point, ray = best[atom]
        witness = OrderWitness(atom, np.asarray(point, dtype=float), reason, float(gap), ray)
    return OrderVerdict(bool(ok.all()), event, witness, ExtL0Scalar(f.space, gaps))


class ComparisonFacts(NamedTuple):
    equal_slopes: bool
    intercepts_ordered: bool


def comparison_decompose(h1: AffineFn, h2: AffineFn, tol: float = SLOPE_TOL) -> ComparisonFacts:
    """For ``h_{v,beta} <= h_{u,alpha}``, confirm ``v = u`` and ``beta <= alpha``."""
    verdict = leq_fn(h1.to_hrep(), h2.to_hrep())
    if not verdict.holds:
        raise PreconditionError(f"h1 <= h2 fails on atoms {(~verdict.holds_event).atoms()}")
    dev = np.abs(h1.u.values - h2.u.values).max(axis=1)
    if (dev > tol).any():
        raise TheoremViolation("comparable affine functions with different slopes",
                               witness={"atoms": np.flatnonzero(dev > tol).tolist(), "deviation": float(dev.max())})
    if (h1.alpha.values > h2.alpha.values + ORDER_TOL).any():
        raise TheoremViolation("comparable affine functions with unordered intercepts")
    return ComparisonFacts(True, True)


def subdiff_mu(h: AffineFn, h1: AffineFn, h2: AffineFn) -> L0Scalar:
    """For ``h <= h1 v h2``, the random weight with ``u = mu u1 + (1 - mu) u2``.

    Where ``u1 = u2`` on an atom the weight is taken to be 1.
    """
    verdict = leq_fn(h.to_hrep(), sup_fns([h1.to_hrep(), h2.to_hrep()]))
    if not verdict.holds:
        raise PreconditionError(f"h <= h1 v h2 fails on atoms {(~verdict.holds_event).atoms()}")
    u, u1, u2 = h.u.values, h1.u.values, h2.u.values
    diff = u1 - u2
    sq = dot(diff, diff)
    spread = np.sqrt(sq) > SLOPE_TOL
    mu = np.where(spread, dot(u - u2, diff) / np.where(spread, sq, 1.0), 1.0)
    resid = np.sqrt(np.sum((u - (mu[:, None] * u1 + (1.0 - mu[:, None]) * u2)) ** 2, axis=1))
    if (resid > MU_RESIDUAL_TOL).any() or (mu < -MU_RANGE_TOL).any() or (mu > 1.0 + MU_RANGE_TOL).any():
        raise TheoremViolation("slope is not on the segment between the two slopes",
                               witness={"mu": mu.tolist(), "residual": resid.tolist()})
    return L0Scalar(h.space, np.clip(mu, 0.0, 1.0))


def hull_membership(x, xs: Sequence) -> OrderVerdict:
    """Is ``x`` an L0-convex combination of ``xs``?  Decided atom by atom."""
    if not xs:
        raise StructuralError("hull_membership needs at least one generator")
    for y in xs:
        x._check(y)
    n, d = x.space.n, x.dim
    K = len(xs)
    P = np.stack([y.values for y in xs], axis=2)  # (n, d, K)
    A = np.concatenate([P, np.ones((n, 1, K))], axis=1)
    b = np.concatenate([x.values, np.ones((n, 1))], axis=1)
    res = lp.solve_batch(np.zeros((n, K)), A, b, ["=="] * (d + 1))
    _batch_or_fail(res, "hull membership")
    member = res.status == lp.LPStatus.OPTIMAL
    witness = None
    if not member.all():
        atom = int(np.flatnonzero(~member)[0])
        witness = OrderWitness(atom, x.values[atom].copy(), "not in the convex hull on this atom", float("inf"))
    return OrderVerdict(bool(member.all()), Event(x.space, member), witness)


def conjugate_rep(f: ConvexFn) -> ConvexFn:
    """Exact representation of ``f*`` on the opposite side."""
    other = _OTHER[f.side]
    if isinstance(f, HRep):
        if not f.is_domain_free:
            raise UnsupportedRepresentationError(
                "conjugate of a domain-constrained HRep has no closed V-form here; use conjugate_eval")
        return VRep(f.space, f.slopes, -f.intercepts, side=other)
    if isinstance(f, VRep):
        return HRep(f.space, f.points, -f.weights, side=other, check=False)
    if isinstance(f, Indicator):
        return HRep(f.space, f.point[None], np.zeros((1, f.space.n)), side=other, check=False)
    raise StructuralError(f"cannot conjugate {type(f).__name__}")


def conjugate_values(f: ConvexFn, V) -> np.ndarray:
    """Definitional conjugate ``sup_x <v, x> - f(x)`` for stacked ``V`` of shape ``(..., n, d)``."""
    V = f._points(V)
    lead = V.shape[:-2]
    n, d = f.space.n, f.dim
    W = V.reshape(-1, n, d)
    if isinstance(f, Indicator):
        return dot(V, f.point)
    if isinstance(f, VRep):
        return _vrep_conjugate(f.points[None], f.weights[None], W[None]).reshape(lead + (n,))
    if isinstance(f, HRep):
        vals = _hrep_conjugate(f.slopes[None], f.intercepts[None], f.dom_a[None], f.dom_b[None], W[None])
        return vals.reshape(lead + (n,))
    raise StructuralError(f"cannot conjugate {type(f).__name__}")


def conjugate_eval(f: ConvexFn, v) -> ExtL0Scalar:
    """``f*(v)`` by its defining supremum; ``+inf`` where unbounded."""
    want = _ARG_TYPE[_OTHER[f.side]]
    if not isinstance(v, want):
        raise StructuralError(f"conjugate of a {f.side}-side function takes {want.__name__}")
    f.space.check(v.space)
    vals = conjugate_values(f, v.values)
    if np.isfinite(vals).all():
        return L0Scalar(f.space, vals)
    return ExtL0Scalar(f.space, vals)


# LP formulations over a family axis F: several functions of one kind share a solver batch.

def _vrep_values(points, weights, Z) -> np.ndarray:
    """Lower envelope values; ``points (F, K, n, d)``, ``weights (F, K, n)``, ``Z (F, P, n, d)`` -> ``(F, P, n)``."""
    F, K, n, d = points.shape
    P = Z.shape[1]
    # rows: sum_k l_k p_k = z (d rows), sum_k l_k = 1
    A = np.empty((F, P, n, d + 1, K))
    A[:, :, :, :d, :] = np.transpose(points, (0, 2, 3, 1))[:, None]
    A[:, :, :, d, :] = 1.0
    b = np.concatenate([Z, np.ones((F, P, n, 1))], axis=3)
    c = np.broadcast_to(-np.transpose(weights, (0, 2, 1))[:, None], (F, P, n, K))
    res = lp.solve_batch(c.reshape(-1, K), A.reshape(-1, d + 1, K), b.reshape(-1, d + 1), ["=="] * (d + 1))
    _batch_or_fail(res, "V-representation evaluation")
    vals = np.where(res.status == lp.LPStatus.INFEASIBLE, np.inf, 0.0 - res.value)
    return vals.reshape(F, P, n)


def _vrep_conjugate(points, weights, W) -> np.ndarray:
    # sup over simplex weights of sum_k l_k (<v, p_k> - beta_k)
    F, K, n, d = points.shape
    P = W.shape[1]
    gain = dot(W[:, :, None], points[:, None]) - weights[:, None]  # (F, P, K, n)
    c = np.transpose(gain, (0, 1, 3, 2)).reshape(-1, K)
    m = F * P * n
    res = lp.solve_batch(c, np.ones((m, 1, K)), np.ones((m, 1)), ["=="])
    _batch_or_fail(res, "conjugate evaluation")
    return res.value.reshape(F, P, n)


def _hrep_conjugate(slopes, intercepts, dom_a, dom_b, W) -> np.ndarray:
    # maximize <v, z> - t  s.t.  <u_k, z> - t <= -alpha_k,  <a_j, z> <= b_j
    F, K, n, d = slopes.shape
    J = dom_a.shape[1]
    P = W.shape[1]
    rows_p = np.concatenate([np.transpose(slopes, (0, 2, 1, 3)), -np.ones((F, n, K, 1))], axis=3)
    rows_d = np.concatenate([np.transpose(dom_a, (0, 2, 1, 3)), np.zeros((F, n, J, 1))], axis=3)
    A_atom = np.concatenate([rows_p, rows_d], axis=2)
    b_atom = np.concatenate([-np.transpose(intercepts, (0, 2, 1)), np.transpose(dom_b, (0, 2, 1))], axis=2)
    m = K + J
    A = np.broadcast_to(A_atom[:, None], (F, P, n, m, d + 1)).reshape(-1, m, d + 1)
    b = np.broadcast_to(b_atom[:, None], (F, P, n, m)).reshape(-1, m)
    c = np.concatenate([W.reshape(-1, d), -np.ones((F * P * n, 1))], axis=1)
    res = lp.solve_batch(c, A, b, ["<="] * m, *_FREE)
    _batch_or_fail(res, "conjugate evaluation")
    if (res.status == lp.LPStatus.INFEASIBLE).any():
        raise EvaluationError("epigraph is empty; the function is not proper")
    return res.value.reshape(F, P, n)


def _pad(arrays, size, fill=None):
    """Stack ``(K_i, ...)`` arrays along a new axis, padding to ``size`` rows by repeating row 0 (or ``fill``)."""
    out = []
    for a in arrays:
        extra = size - a.shape[0]
        if extra:
            tail = np.repeat(a[:1], extra, axis=0) if fill is None else np.full((extra,) + a.shape[1:], fill)
            a = np.concatenate([a, tail])
        out.append(a)
    return np.stack(out)


def _family(fs: Sequence[ConvexFn], Xs):
    _same_kind(fs)
    kind = type(fs[0])
    if kind not in (HRep, VRep):
        raise StructuralError("family evaluation takes HRep or VRep functions")
    space, d = fs[0].space, fs[0].dim
    Xs = [f._points(X).reshape(-1, space.n, d) for f, X in zip(fs, Xs)]
    if len({X.shape[0] for X in Xs}) != 1:
        raise StructuralError("family members need the same number of points")
    return kind, np.stack(Xs)


def values_family(fs: Sequence[ConvexFn], Xs) -> np.ndarray:
    """``[f.values(X) for f, X in zip(fs, Xs)]`` as one array ``(F, P, n)``, sharing LP batches."""
    kind, Z = _family(fs, Xs)
    if kind is HRep:
        return np.stack([f.values(X) for f, X in zip(fs, Z)])
    K = max(f.n_points for f in fs)
    return _vrep_values(_pad([f.points for f in fs], K), _pad([f.weights for f in fs], K), Z)


def conjugate_values_family(fs: Sequence[ConvexFn], Vs) -> np.ndarray:
    """``[conjugate_values(f, V) for f, V in zip(fs, Vs)]`` as one array ``(F, P, n)``, sharing LP batches."""
    kind, W = _family(fs, Vs)
    if kind is VRep:
        K = max(f.n_points for f in fs)
        return _vrep_conjugate(_pad([f.points for f in fs], K), _pad([f.weights for f in fs], K), W)
    K = max(f.n_pieces for f in fs)
    J = max(f.dom_a.shape[0] for f in fs)
    # padded domain rows 0 . z <= 0 are vacuous
    dom_a = _pad([f.dom_a for f in fs], J, fill=0.0)
    dom_b = _pad([f.dom_b for f in fs], J, fill=0.0)
    return _hrep_conjugate(_pad([f.slopes for f in fs], K), _pad([f.intercepts for f in fs], K), dom_a, dom_b, W)
