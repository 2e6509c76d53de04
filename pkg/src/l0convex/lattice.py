"""Finite-atom model of L0(F), its extended lattice, events and convergence in probability.

A probability space with finitely many atoms turns every equivalence class of
random variables into a vector indexed by atoms, and "almost surely" into
"on every atom".  All comparisons are exact floating comparisons.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import StructuralError

__all__ = [
    "AtomSpace",
    "ExtL0Scalar",
    "L0Scalar",
    "Event",
    "ConvergenceVerdict",
    "sup_family",
    "inf_family",
    "leq",
    "leq_event",
    "support_event",
    "zero_event",
    "geq_event",
    "stable_combine_scalar",
    "converges_in_prob",
]

PROB_SUM_TOL = 1e-12


def _operand(other) -> bool:
    return isinstance(other, ExtL0Scalar) or np.isscalar(other)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AtomSpace:
    """Finite probability space; atom ``i`` carries weight ``probs[i] > 0``."""

    probs: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if len(probs) == 0:
            raise StructuralError("an atom space needs at least one atom")
        if any(not np.isfinite(p) or p <= 0.0 for p in probs):
            raise StructuralError(f"atom probabilities must be strictly positive: {probs}")
        if abs(sum(probs) - 1.0) > PROB_SUM_TOL:
            raise StructuralError(f"atom probabilities sum to {sum(probs)!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, n: int) -> "AtomSpace":
        # 1/n rounded n times may miss 1 by more than the tolerance for large n
        probs = [1.0 / n] * n
        probs[-1] = 1.0 - sum(probs[:-1])
        return cls(tuple(probs))

    @property
    def n(self) -> int:
        return len(self.probs)

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self.probs)

    def prob(self, event: "Event") -> float:
        self.check(event.space)
        return float(np.sum(self.weights[event.mask]))

    def check(self, other: "AtomSpace") -> None:
        if other != self:
            raise StructuralError("operands live on different atom spaces")


def _common_space(items) -> AtomSpace:
    items = list(items)
    if not items:
        raise StructuralError("empty family")
    space = items[0].space
    for item in items[1:]:
        space.check(item.space)
    return space


class ExtL0Scalar:
    """Atom-indexed extended real: entries may be finite, ``+inf`` or ``-inf``."""

    __slots__ = ("space", "values")

    def __init__(self, space: AtomSpace, values):
        vals = _frozen(values)
        if vals.shape != (space.n,):
            raise StructuralError(f"expected {space.n} atom values, got shape {vals.shape}")
        if np.isnan(vals).any():
            raise StructuralError("NaN is not an extended real")
        self._validate(vals)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "values", vals)

    def _validate(self, vals: np.ndarray) -> None:
        pass

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def constant(cls, space: AtomSpace, value: float):
        return cls(space, np.full(space.n, float(value)))

    # -- arithmetic ---------------------------------------------------------
    def _other_values(self, other):
        if isinstance(other, ExtL0Scalar):
            self.space.check(other.space)
            return other.values, isinstance(other, L0Scalar)
        if np.isscalar(other):
            value = float(other)
            return np.full(self.space.n, value), bool(np.isfinite(value))
        raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")

    def _wrap(self, values, finite_operands: bool):
        cls = L0Scalar if finite_operands and np.isfinite(values).all() else ExtL0Scalar
        return cls(self.space, values)

    def __add__(self, other):
        if not _operand(other):
            return NotImplemented
        vals, fin = self._other_values(other)
        bad = (np.isinf(self.values) & np.isinf(vals)) & (np.sign(self.values) != np.sign(vals))
        if bad.any():
            raise StructuralError(f"(+inf) + (-inf) on atoms {np.flatnonzero(bad).tolist()}")
        return self._wrap(self.values + vals, fin and isinstance(self, L0Scalar))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.values, isinstance(self, L0Scalar))

    def __sub__(self, other):
        if not _operand(other):
            return NotImplemented
        vals, fin = self._other_values(other)
        return self + self._wrap(-vals, fin)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not _operand(other):
            return NotImplemented
        vals, fin = self._other_values(other)
        with np.errstate(invalid="ignore"):
            prod = self.values * vals
        # 0 * (+-inf) = 0
        prod = np.where((self.values == 0.0) | (vals == 0.0), 0.0, prod)
        return self._wrap(prod, fin and isinstance(self, L0Scalar))

    __rmul__ = __mul__

    def __abs__(self):
        return self._wrap(np.abs(self.values), isinstance(self, L0Scalar))

    # -- comparisons --------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, ExtL0Scalar):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.space, self.values.tobytes()))

    def __le__(self, other):
        return leq(self, other)

    def __ge__(self, other):
        return leq(other, self)

    def __repr__(self):
        return f"{type(self).__name__}({self.values.tolist()})"

    def tolist(self) -> list:
        return self.values.tolist()


class L0Scalar(ExtL0Scalar):
    """Atom-indexed finite real random variable."""

    __slots__ = ()

    def _validate(self, vals):
        if not np.isfinite(vals).all():
            raise StructuralError("L0Scalar entries must be finite")

    def inverse(self) -> "L0Scalar":
        if (self.values == 0.0).any():
            raise StructuralError("cannot invert a scalar with zeros")
        return L0Scalar(self.space, 1.0 / self.values)


class Event:
    """Set of atoms (an equivalence class of measurable sets)."""

    __slots__ = ("space", "mask")

    def __init__(self, space: AtomSpace, mask):
        arr = np.array(mask, dtype=bool)
        if arr.shape != (space.n,):
            raise StructuralError(f"expected {space.n} atom flags, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "mask", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Event is immutable")

    @classmethod
    def full(cls, space: AtomSpace) -> "Event":
        return cls(space, np.ones(space.n, dtype=bool))

    @classmethod
    def empty(cls, space: AtomSpace) -> "Event":
        return cls(space, np.zeros(space.n, dtype=bool))

    @classmethod
    def of_atoms(cls, space: AtomSpace, atoms: Iterable[int]) -> "Event":
        mask = np.zeros(space.n, dtype=bool)
        mask[list(atoms)] = True
        return cls(space, mask)

    def complement(self) -> "Event":
        return Event(self.space, ~self.mask)

    __invert__ = complement

    def __and__(self, other: "Event") -> "Event":
        self.space.check(other.space)
        return Event(self.space, self.mask & other.mask)

    def __or__(self, other: "Event") -> "Event":
        self.space.check(other.space)
        return Event(self.space, self.mask | other.mask)

    def indicator(self) -> L0Scalar:
        return L0Scalar(self.space, self.mask.astype(float))

    def prob(self) -> float:
        return self.space.prob(self)

    @property
    def is_full(self) -> bool:
        return bool(self.mask.all())

    @property
    def is_empty(self) -> bool:
        return not self.mask.any()

    def atoms(self) -> list:
        return np.flatnonzero(self.mask).tolist()

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((self.space, self.mask.tobytes()))

    def __repr__(self):
        return f"Event({self.mask.tolist()})"


def sup_family(fs: Sequence[ExtL0Scalar]) -> ExtL0Scalar:
    """Least upper bound of a finite family: the per-atom maximum."""
    space = _common_space(fs)
    vals = np.max(np.stack([f.values for f in fs]), axis=0)
    finite = all(isinstance(f, L0Scalar) for f in fs)
    return (L0Scalar if finite else ExtL0Scalar)(space, vals)


def inf_family(fs: Sequence[ExtL0Scalar]) -> ExtL0Scalar:
    """Greatest lower bound of a finite family: the per-atom minimum."""
    space = _common_space(fs)
    vals = np.min(np.stack([f.values for f in fs]), axis=0)
    finite = all(isinstance(f, L0Scalar) for f in fs)
    return (L0Scalar if finite else ExtL0Scalar)(space, vals)


def leq_event(xi: ExtL0Scalar, eta: ExtL0Scalar) -> Event:
    """The event [xi <= eta]."""
    xi.space.check(eta.space)
    return Event(xi.space, xi.values <= eta.values)


def leq(xi: ExtL0Scalar, eta: ExtL0Scalar) -> bool:
    """``xi <= eta`` almost surely, i.e. on every atom."""
    return leq_event(xi, eta).is_full


def geq_event(xi: ExtL0Scalar, eta: ExtL0Scalar) -> Event:
    """The event [xi >= eta]."""
    return leq_event(eta, xi)


def support_event(xi: ExtL0Scalar) -> Event:
    """The event [xi > 0], compared against exact zero."""
    return Event(xi.space, xi.values > 0.0)


def zero_event(xi: ExtL0Scalar) -> Event:
    """The event [xi = 0]."""
    return Event(xi.space, xi.values == 0.0)


def stable_combine_scalar(A: Event, xi: ExtL0Scalar, eta: ExtL0Scalar) -> ExtL0Scalar:
    """Glue ``I_A xi + I_{A^c} eta``: entries of ``xi`` on A, of ``eta`` off A."""
    A.space.check(xi.space)
    A.space.check(eta.space)
    vals = np.where(A.mask, xi.values, eta.values)
    finite = isinstance(xi, L0Scalar) and isinstance(eta, L0Scalar)
    return (L0Scalar if finite else ExtL0Scalar)(A.space, vals)


class ConvergenceVerdict(NamedTuple):
    converges: bool
    decided_at: int | None  # 1-based index from which the prefix stays inside the neighborhood
    inside: tuple  # per-index membership in the (eps, lam) neighborhood of the limit

    def __bool__(self):
        return self.converges


def converges_in_prob(seq: Sequence[L0Scalar], limit: L0Scalar, eps: float, lam: float) -> ConvergenceVerdict:
    """Decide convergence in probability on a finite prefix.

    Index ``k`` is inside the neighborhood when ``P{|x_k - limit| < eps} > 1 - lam``.
    The prefix is declared convergent when some tail of it stays inside; the
    verdict reports the first index of the longest such tail.
    """
    if len(seq) == 0:
        raise StructuralError("converges_in_prob needs a nonempty sequence")
    if not eps > 0.0:
        raise StructuralError("eps must be positive")
    if not 0.0 < lam < 1.0:
        raise StructuralError("lam must lie in (0, 1)")
    space = limit.space
    weights = space.weights
    inside = []
    for x in seq:
        space.check(x.space)
        mass = float(np.sum(weights[np.abs(x.values - limit.values) < eps]))
        inside.append(mass > 1.0 - lam)
    if not inside[-1]:
        return ConvergenceVerdict(False, None, tuple(inside))
    k = len(inside)
    while k > 1 and inside[k - 2]:
        k -= 1
    return ConvergenceVerdict(True, k, tuple(inside))
