import json

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
    StructuralError,
    SwapInvolution,
    VRep,
    from_json,
    to_hat_t,
    t_to_s,
    to_json,
)
from l0convex.serialize import fn_to_json

SP = AtomSpace((0.25, 0.25, 0.5))


def roundtrip(obj):
    text = json.dumps(to_json(obj), allow_nan=False)
    return from_json(json.loads(text), SP)


@pytest.fixture
def rng():
    return np.random.default_rng(3)


def params(rng):
    return OpParamsT(ModuleMap(SP, rng.standard_normal((3, 2, 2)) + 2 * np.eye(2)),
                     ModuleElem(SP, rng.standard_normal((3, 2))), DualElem(SP, rng.standard_normal((3, 2))),
                     L0Scalar(SP, [1.0, 2.0, 0.5]), L0Scalar(SP, [0.0, -1.0, 3.0]))


def test_space_roundtrip():
    assert from_json(json.loads(json.dumps(to_json(SP)))) == SP


def test_scalars_and_events():
    x = L0Scalar(SP, [1.5, -2.0, 0.0])
    e = ExtL0Scalar(SP, [np.inf, -np.inf, 1.0])
    A = Event(SP, [True, False, True])
    assert roundtrip(x) == x
    assert roundtrip(e) == e
    assert roundtrip(A) == A
    assert to_json(e)["values"] == ["inf", "-inf", 1.0]
    assert to_json(A)["mask"] == [True, False, True]


def test_elements_and_maps(rng):
    x = ModuleElem(SP, rng.standard_normal((3, 2)))
    u = DualElem(SP, rng.standard_normal((3, 2)))
    T = ModuleMap(SP, rng.standard_normal((3, 2, 2)))
    assert roundtrip(x) == x and isinstance(roundtrip(x), ModuleElem)
    assert roundtrip(u) == u and isinstance(roundtrip(u), DualElem)
    assert np.array_equal(roundtrip(T).matrices, T.matrices)
    assert np.array(to_json(T)["matrices"]).shape == (3, 2, 2)


def test_functions_roundtrip_bitwise(rng):
    box = np.concatenate([np.eye(2), -np.eye(2)])[:, None, :].repeat(3, axis=1)
    fs = [
        HRep(SP, rng.standard_normal((2, 3, 2)), rng.standard_normal((2, 3)), check=False),
        HRep(SP, rng.standard_normal((2, 3, 2)), rng.standard_normal((2, 3)), box, np.ones((4, 3))),
        VRep(SP, rng.standard_normal((3, 3, 2)), rng.standard_normal((3, 3))),
        Indicator(SP, rng.standard_normal((3, 2)), side="dual"),
        AffineFn(DualElem(SP, rng.standard_normal((3, 2))), L0Scalar(SP, rng.standard_normal(3))).to_hrep(),
    ]
    X = rng.standard_normal((20, 3, 2))
    for f in fs:
        g = roundtrip(f)
        assert type(g) is type(f) and g.side == f.side
        assert np.array_equal(g.values(X), f.values(X))


def test_function_schema_keys(rng):
    h = fn_to_json(HRep(SP, rng.standard_normal((2, 3, 2)), rng.standard_normal((2, 3)), check=False))
    assert h["variant"] == "hrep" and h["side"] == "primal"
    assert set(h["pieces"][0]) == {"u", "alpha"} and h["domain"] == []
    v = fn_to_json(VRep(SP, rng.standard_normal((2, 3, 2)), rng.standard_normal((2, 3))))
    assert v["variant"] == "vrep" and set(v["points"][0]) == {"p", "beta"}
    i = fn_to_json(Indicator(SP, np.zeros((3, 2))))
    assert i["variant"] == "indicator" and np.array(i["point"]).shape == (3, 2)


def test_params_roundtrip(rng):
    p = params(rng)
    for obj in (p, to_hat_t(p), t_to_s(p)):
        back = roundtrip(obj)
        assert type(back) is type(obj)
        for name in obj.__dataclass_fields__:
            a, b = getattr(obj, name), getattr(back, name)
            raw = (lambda z: z.matrices if isinstance(z, ModuleMap) else z.values)
            assert np.array_equal(raw(a), raw(b))


def test_affine_and_swap(rng):
    sp = AtomSpace.uniform(4)
    s = SwapInvolution(sp, (2, 3, 0, 1))
    back = from_json(json.loads(json.dumps(to_json(s))), sp)
    assert back.perm == s.perm
    a = AffineFn(DualElem(SP, rng.standard_normal((3, 2))), L0Scalar(SP, rng.standard_normal(3)))
    b = roundtrip(a)
    assert b.u == a.u and b.alpha == a.alpha


def test_containers_and_plain_values():
    obj = {"n": 3, "flag": True, "x": np.inf, "nested": [1.0, None, "s"], "arr": np.array([True, False])}
    back = roundtrip(obj)
    assert back["n"] == 3 and back["flag"] is True and back["x"] == "inf"
    assert back["nested"] == [1.0, None, "s"]
    assert back["arr"].dtype == bool


def test_errors():
    with pytest.raises(StructuralError):
        from_json({"$type": "l0", "values": [1.0]})
    with pytest.raises(StructuralError):
        from_json({"$type": "nope"}, SP)
    with pytest.raises(StructuralError):
        to_json(object())
