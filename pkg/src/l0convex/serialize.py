"""JSON forms of the package's objects.

Atom-indexed data is written in atom order: scalars and events as flat
arrays, module elements as ``[atom][coordinate]``, maps as
``[atom][row][col]``.  Infinite entries are written as the strings ``"inf"``
and ``"-inf"`` so the output stays valid JSON.  Convex functions use::

    {"variant": "hrep" | "vrep" | "indicator", "side": "primal" | "dual",
     "pieces": [{"u": [[...]], "alpha": [...]}], "domain": [{"a": [[...]], "b": [...]}],
     "points": [{"p": [[...]], "beta": [...]}], "point": [[...]]}

:func:`to_json` / :func:`from_json` add a ``"$type"`` tag so heterogeneous
records (report witnesses) can be decoded without outside knowledge.
"""
from __future__ import annotations

import math

import numpy as np

from .convex import PRIMAL, AffineFn, HRep, Indicator, VRep
from .errors import StructuralError
from .lattice import AtomSpace, Event, ExtL0Scalar, L0Scalar
from .module import DualElem, ModuleElem, ModuleMap
from .operators import HatTParams, OpParamsS, OpParamsT, SwapInvolution

__all__ = [
    "encode_array",
    "decode_array",
    "fn_to_json",
    "fn_from_json",
    "params_to_json",
    "params_from_json",
    "to_json",
    "from_json",
]


def _num(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def encode_array(arr) -> list:
    arr = np.asarray(arr)
    if arr.dtype == bool:
        return arr.tolist()
    if np.isfinite(arr).all() or arr.size == 0:
        return arr.astype(float).tolist()
    return np.vectorize(_num, otypes=[object])(arr).tolist()


def decode_array(obj) -> np.ndarray:
    def conv(v):
        if isinstance(v, list):
            return [conv(x) for x in v]
        return float(v)

    return np.array(conv(obj), dtype=float)


def fn_to_json(f) -> dict:
    if isinstance(f, HRep):
        return {
            "variant": "hrep",
            "side": f.side,
            "pieces": [{"u": encode_array(u), "alpha": encode_array(a)} for u, a in zip(f.slopes, f.intercepts)],
            "domain": [{"a": encode_array(a), "b": encode_array(b)} for a, b in zip(f.dom_a, f.dom_b)],
        }
    if isinstance(f, VRep):
        return {
            "variant": "vrep",
            "side": f.side,
            "points": [{"p": encode_array(p), "beta": encode_array(b)} for p, b in zip(f.points, f.weights)],
        }
    if isinstance(f, Indicator):
        return {"variant": "indicator", "side": f.side, "point": encode_array(f.point)}
    raise StructuralError(f"cannot serialize {type(f).__name__}")


def fn_from_json(obj: dict, space: AtomSpace):
    variant = obj.get("variant")
    side = obj.get("side", PRIMAL)
    if variant == "hrep":
        slopes = np.stack([decode_array(p["u"]) for p in obj["pieces"]])
        alphas = np.stack([decode_array(p["alpha"]) for p in obj["pieces"]])
        dom = obj.get("domain") or []
        if dom:
            dom_a = np.stack([decode_array(r["a"]) for r in dom])
            dom_b = np.stack([decode_array(r["b"]) for r in dom])
        else:
            dom_a = dom_b = None
        return HRep(space, slopes, alphas, dom_a, dom_b, side=side, check=bool(dom))
    if variant == "vrep":
        pts = np.stack([decode_array(p["p"]) for p in obj["points"]])
        wts = np.stack([decode_array(p["beta"]) for p in obj["points"]])
        return VRep(space, pts, wts, side=side)
    if variant == "indicator":
        return Indicator(space, decode_array(obj["point"]), side=side)
    raise StructuralError(f"unknown function variant {variant!r}")


_PARAM_FIELDS = {
    "T": (OpParamsT, [("H", ModuleMap), ("c", ModuleElem), ("w", DualElem), ("tau", L0Scalar), ("beta", L0Scalar)]),
    "hatT": (HatTParams, [("D", ModuleMap), ("w", DualElem), ("d", ModuleElem), ("tau", L0Scalar),
                          ("beta", L0Scalar)]),
    "S": (OpParamsS, [("H", ModuleMap), ("v", DualElem), ("y", ModuleElem), ("tau", L0Scalar), ("rho", L0Scalar)]),
}


def _raw(obj):
    if isinstance(obj, ModuleMap):
        return obj.matrices
    return obj.values


def params_to_json(p) -> dict:
    for _, (cls, fields) in _PARAM_FIELDS.items():
        if isinstance(p, cls):
            return {name: encode_array(_raw(getattr(p, name))) for name, _ in fields}
    raise StructuralError(f"cannot serialize {type(p).__name__}")


def params_from_json(obj: dict, space: AtomSpace, kind: str):
    cls, fields = _PARAM_FIELDS[kind]
    return cls(**{name: typ(space, decode_array(obj[name])) for name, typ in fields})


def to_json(obj):
    """Tagged encoding of package objects, arrays and containers."""
    if isinstance(obj, AtomSpace):
        return {"$type": "atoms", "probs": list(obj.probs)}
    if isinstance(obj, L0Scalar):
        return {"$type": "l0", "values": encode_array(obj.values)}
    if isinstance(obj, ExtL0Scalar):
        return {"$type": "ext_l0", "values": encode_array(obj.values)}
    if isinstance(obj, Event):
        return {"$type": "event", "mask": obj.mask.tolist()}
    if isinstance(obj, ModuleElem):
        return {"$type": "elem", "values": encode_array(obj.values)}
    if isinstance(obj, DualElem):
        return {"$type": "dual", "values": encode_array(obj.values)}
    if isinstance(obj, ModuleMap):
        return {"$type": "map", "matrices": encode_array(obj.matrices)}
    if isinstance(obj, AffineFn):
        return {"$type": "affine", "u": to_json(obj.u), "alpha": encode_array(obj.alpha.values)}
    if isinstance(obj, (HRep, VRep, Indicator)):
        return {"$type": "fn", **fn_to_json(obj)}
    if isinstance(obj, SwapInvolution):
        return {"$type": "swap", "perm": list(obj.perm)}
    for kind, (cls, _) in _PARAM_FIELDS.items():
        if isinstance(obj, cls):
            return {"$type": "params", "kind": kind, **params_to_json(obj)}
    if isinstance(obj, np.ndarray):
        return {"$type": "array", "dtype": "bool" if obj.dtype == bool else "float", "data": encode_array(obj)}
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise StructuralError(f"cannot serialize {type(obj).__name__}")


def from_json(obj, space: AtomSpace | None = None):
    """Inverse of :func:`to_json`; atom-indexed objects need ``space``."""
    if isinstance(obj, list):
        return [from_json(v, space) for v in obj]
    if not isinstance(obj, dict):
        return obj
    tag = obj.get("$type")
    if tag is None:
        return {k: from_json(v, space) for k, v in obj.items()}
    if tag == "atoms":
        return AtomSpace(tuple(obj["probs"]))
    if space is None:
        raise StructuralError(f"decoding {tag!r} needs an atom space")
    if tag == "l0":
        return L0Scalar(space, decode_array(obj["values"]))
    if tag == "ext_l0":
        return ExtL0Scalar(space, decode_array(obj["values"]))
    if tag == "event":
        return Event(space, obj["mask"])
    if tag == "elem":
        return ModuleElem(space, decode_array(obj["values"]))
    if tag == "dual":
        return DualElem(space, decode_array(obj["values"]))
    if tag == "map":
        return ModuleMap(space, decode_array(obj["matrices"]))
    if tag == "affine":
        return AffineFn(from_json(obj["u"], space), L0Scalar(space, decode_array(obj["alpha"])))
    if tag == "fn":
        return fn_from_json(obj, space)
    if tag == "swap":
        return SwapInvolution(space, tuple(obj["perm"]))
    if tag == "params":
        return params_from_json(obj, space, obj["kind"])
    if tag == "array":
        if obj.get("dtype") == "bool":
            return np.array(obj["data"], dtype=bool)
        return decode_array(obj["data"])
    raise StructuralError(f"unknown tag {tag!r}")
