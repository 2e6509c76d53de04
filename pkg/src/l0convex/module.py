"""The free random normed module E = L0(F, R^d), its conjugate E*, and module maps.

Every object stores one row per atom.  Contractions are written as explicit
sequential sums over coordinates so that the same atom data produces the same
bits regardless of how many atoms or pieces are stacked together; several exact
identities downstream rely on this.
"""
from __future__ import annotations

import numpy as np

from .errors import PreconditionError, SingularMapError, StructuralError
from .lattice import AtomSpace, Event, L0Scalar

__all__ = [
    "ModuleElem",
    "DualElem",
    "ModuleMap",
    "dot",
    "matvec",
    "l0_norm",
    "pairing",
    "solve_pairing",
    "unit_element",
    "apply",
    "compose",
    "invert",
    "is_invertible",
    "op_norm",
    "adjoint",
    "combine",
    "scale",
    "identity_map",
]

SINGULAR_TOL = 1e-10
OP_NORM_RTOL = 1e-10


def dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Contract the last axis of ``a`` and ``b`` (broadcasting), summing in coordinate order."""
    acc = a[..., 0] * b[..., 0]
    for i in range(1, a.shape[-1]):
        acc = acc + a[..., i] * b[..., i]
    return acc


def matvec(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Per-atom matrix-vector product ``m[..., r, :] . v[..., :]``."""
    return dot(m, v[..., None, :])


class _Vec:
    """Shared storage for elements of E and E*: an ``(n, d)`` array."""

    __slots__ = ("space", "values")

    def __init__(self, space: AtomSpace, values):
        arr = np.array(values, dtype=float)
        if arr.ndim == 1 and arr.shape[0] == space.n:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] != space.n or arr.shape[1] < 1:
            raise StructuralError(f"expected an array of shape ({space.n}, d), got {arr.shape}")
        if not np.isfinite(arr).all():
            raise StructuralError("module elements must have finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @classmethod
    def zeros(cls, space: AtomSpace, dim: int):
        return cls(space, np.zeros((space.n, dim)))

    @classmethod
    def constant(cls, space: AtomSpace, vector):
        vec = np.asarray(vector, dtype=float)
        return cls(space, np.tile(vec, (space.n, 1)))

    def _check(self, other) -> None:
        if type(other) is not type(self):
            raise StructuralError(f"cannot mix {type(self).__name__} and {type(other).__name__}")
        self.space.check(other.space)
        if other.dim != self.dim:
            raise StructuralError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._check(other)
        return type(self)(self.space, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return type(self)(self.space, self.values - other.values)

    def __neg__(self):
        return type(self)(self.space, -self.values)

    def __mul__(self, xi):
        return scale(xi, self)

    __rmul__ = __mul__

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((type(self).__name__, self.space, self.values.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}({self.values.tolist()})"

    def tolist(self) -> list:
        return self.values.tolist()


class ModuleElem(_Vec):
    """Element of E (and of E** under the identification E** = E)."""

    __slots__ = ()

    def as_dual(self) -> "DualElem":
        return DualElem(self.space, self.values)


class DualElem(_Vec):
    """Element of the random conjugate space E*, acting by the per-atom dot product."""

    __slots__ = ()

    def as_primal(self) -> ModuleElem:
        return ModuleElem(self.space, self.values)


class ModuleMap:
    """A.s. bounded module homomorphism, an ``(n, d_out, d_in)`` stack of matrices."""

    __slots__ = ("space", "matrices")

    def __init__(self, space: AtomSpace, matrices):
        arr = np.array(matrices, dtype=float)
        if arr.ndim == 2:
            arr = np.broadcast_to(arr, (space.n,) + arr.shape).copy()
        if arr.ndim != 3 or arr.shape[0] != space.n:
            raise StructuralError(f"expected matrices of shape ({space.n}, d_out, d_in), got {arr.shape}")
        if not np.isfinite(arr).all():
            raise StructuralError("map entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "matrices", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ModuleMap is immutable")

    @property
    def shape(self) -> tuple:
        return self.matrices.shape[1:]

    def __eq__(self, other):
        if not isinstance(other, ModuleMap):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.matrices, other.matrices)

    def __hash__(self):
        return hash((self.space, self.matrices.tobytes()))

    def __repr__(self):
        return f"ModuleMap({self.matrices.tolist()})"

    def __call__(self, x):
        return apply(self, x)


def identity_map(space: AtomSpace, dim: int) -> ModuleMap:
    return ModuleMap(space, np.broadcast_to(np.eye(dim), (space.n, dim, dim)).copy())


def _scalar_values(space: AtomSpace, xi) -> np.ndarray:
    if isinstance(xi, L0Scalar):
        space.check(xi.space)
        return xi.values
    if np.isscalar(xi):
        return np.full(space.n, float(xi))
    raise TypeError(f"expected an L0Scalar or a real, got {type(xi).__name__}")


def scale(xi, x: _Vec) -> _Vec:
    """L0 scalar multiplication ``xi * x``."""
    return type(x)(x.space, _scalar_values(x.space, xi)[:, None] * x.values)


def combine(A: Event, x: _Vec, y: _Vec) -> _Vec:
    """Glue ``I_A x + I_{A^c} y``."""
    x._check(y)
    A.space.check(x.space)
    return type(x)(x.space, np.where(A.mask[:, None], x.values, y.values))


def l0_norm(x: _Vec) -> L0Scalar:
    """Per-atom Euclidean norm."""
    # scale by the largest entry so tiny or huge vectors neither underflow nor overflow
    top = np.abs(x.values).max(axis=1)
    safe = np.where(top > 0.0, top, 1.0)
    y = x.values / safe[:, None]
    return L0Scalar(x.space, top * np.sqrt(dot(y, y)))


def pairing(u: _Vec, x: _Vec) -> L0Scalar:
    """``<u, x>``, the per-atom dot product."""
    u.space.check(x.space)
    if u.dim != x.dim:
        raise StructuralError(f"dimension mismatch: {u.dim} vs {x.dim}")
    return L0Scalar(u.space, dot(u.values, x.values))


def solve_pairing(u: DualElem, xi: L0Scalar) -> ModuleElem:
    """Return ``x0 = xi |u|^-2 u`` so that ``<u, x0> = xi``; needs ``|u| > 0`` on every atom."""
    u.space.check(xi.space)
    sq = dot(u.values, u.values)
    bad = np.flatnonzero(sq == 0.0)
    if bad.size:
        raise PreconditionError(f"u vanishes on atoms {bad.tolist()}; full support required")
    return ModuleElem(u.space, (xi.values / sq)[:, None] * u.values)


def unit_element(space: AtomSpace, dim: int) -> ModuleElem:
    vals = np.zeros((space.n, dim))
    vals[:, 0] = 1.0
    return ModuleElem(space, vals)


def apply(T: ModuleMap, x: _Vec) -> _Vec:
    """Per-atom ``T x``; the result has the same kind (primal/dual) as ``x``."""
    T.space.check(x.space)
    if T.shape[1] != x.dim:
        raise StructuralError(f"map expects dimension {T.shape[1]}, got {x.dim}")
    return type(x)(x.space, matvec(T.matrices, x.values))


def compose(S: ModuleMap, T: ModuleMap) -> ModuleMap:
    """``S o T``."""
    S.space.check(T.space)
    if S.shape[1] != T.shape[0]:
        raise StructuralError(f"cannot compose shapes {S.shape} and {T.shape}")
    return ModuleMap(S.space, S.matrices @ T.matrices)


def _singular_atoms(mats: np.ndarray) -> np.ndarray:
    if mats.shape[1] != mats.shape[2]:
        return np.arange(mats.shape[0])
    top = np.abs(mats).max(axis=(1, 2))
    safe = np.where(top > 0.0, top, 1.0)
    # determinant of the rescaled matrix, so the test is scale free and cannot underflow
    det = np.abs(np.linalg.det(mats / safe[:, None, None]))
    return np.flatnonzero((top == 0.0) | (det < SINGULAR_TOL))


def invert(T: ModuleMap) -> ModuleMap:
    """Per-atom inverse; raises :class:`SingularMapError` naming singular atoms."""
    bad = _singular_atoms(T.matrices)
    if bad.size:
        raise SingularMapError(f"map is singular on atoms {bad.tolist()}", bad.tolist())
    return ModuleMap(T.space, np.linalg.inv(T.matrices))


def is_invertible(T: ModuleMap) -> bool:
    return _singular_atoms(T.matrices).size == 0


def adjoint(T: ModuleMap) -> ModuleMap:
    """Per-atom transpose, so that ``<T* u, x> = <u, T x>``."""
    return ModuleMap(T.space, np.swapaxes(T.matrices, 1, 2))


# fixed-seed start keeps op_norm deterministic and avoids structured null directions
_START_RNG_SEED = 20240607


def op_norm(T: ModuleMap, rtol: float = OP_NORM_RTOL, max_iter: int = 200) -> L0Scalar:
    """Per-atom spectral norm by power iteration on ``T^T T``.

    Each step squares the Gram matrix, so step ``k`` applies the ``2^k``-th
    power; the Rayleigh quotient of the original Gram matrix is tracked until
    its relative change drops below ``rtol``.
    """
    mats = T.matrices
    gram = np.swapaxes(mats, 1, 2) @ mats
    d = gram.shape[-1]
    start = np.random.default_rng(_START_RNG_SEED).standard_normal(d)
    start = start / np.linalg.norm(start)
    out = np.zeros(T.space.n)
    for a in range(T.space.n):
        g = gram[a]
        top = np.abs(g).max()
        if top == 0.0:
            continue
        power = g / top
        est = 0.0
        for _ in range(max_iter):
            v = power @ start
            nv = np.linalg.norm(v)
            if nv == 0.0:
                # start orthogonal to the dominant eigenspace; fall back to the column basis
                v = power[:, np.argmax(np.linalg.norm(power, axis=0))]
                nv = np.linalg.norm(v)
            v = v / nv
            new = float(v @ g @ v)
            if abs(new - est) <= rtol * abs(new):
                est = new
                break
            est = new
            sq = power @ power
            power = sq / np.abs(sq).max()
        out[a] = np.sqrt(max(est, 0.0))
    return L0Scalar(T.space, out)
