import json

import numpy as np
import pytest

from framekit import serialization as ser
from framekit.approxdual import ApproxDualParams
from framekit.frames import Frame
from framekit.gabor import GaborSystem
from framekit.linalg import InputError
from framekit.perturbation import make_audit

rng = np.random.default_rng(606)


def test_complex_round_trip():
    M = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    back = ser.pairs_to_matrix(ser.matrix_to_pairs(M))
    assert np.array_equal(back, M)


def test_vector_round_trip():
    v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    assert np.array_equal(ser.pairs_to_vector(ser.vector_to_pairs(v)), v)


def test_frame_round_trip():
    F = Frame(dim=3, matrix=rng.standard_normal((3, 5))
              + 1j * rng.standard_normal((3, 5)))
    back = ser.frame_from_dict(json.loads(ser.dumps(ser.frame_to_dict(F))))
    assert back.dim == F.dim
    assert np.array_equal(back.matrix, F.matrix)


def test_params_round_trip():
    P = ApproxDualParams(A=rng.standard_normal((2, 2)) + 0j,
                         Theta=rng.standard_normal((5, 2)) + 0j)
    back = ser.params_from_dict(json.loads(ser.dumps(ser.params_to_dict(P))))
    assert np.array_equal(back.A, P.A)
    assert np.array_equal(back.Theta, P.Theta)


def test_gabor_round_trip():
    sys = GaborSystem(L=8, a=2, b=2, window=rng.standard_normal(8) + 0j)
    back = ser.gabor_from_dict(json.loads(ser.dumps(ser.gabor_to_dict(sys))))
    assert (back.L, back.a, back.b) == (8, 2, 2)
    assert np.array_equal(back.window, sys.window)


def test_dumps_is_deterministic_and_sorted():
    obj = {"b": 1, "a": [1.5, 2.25]}
    s1 = ser.dumps(obj)
    s2 = ser.dumps({"a": [1.5, 2.25], "b": 1})
    assert s1 == s2
    assert s1 == '{"a":[1.5,2.25],"b":1}\n'


def test_frame_dict_validation():
    with pytest.raises(InputError):
        ser.frame_from_dict({"dim": 2})
    with pytest.raises(InputError):
        ser.frame_from_dict({"dim": 3, "vectors": [[[1.0, 0.0], [0.0, 0.0]]]})
    with pytest.raises(InputError):
        ser.pairs_to_matrix("nonsense")


def test_audit_csv():
    audits = [make_audit("x", 0.5, 1.0), make_audit("y", 2.0, 1.0)]
    text = ser.audits_to_csv(audits)
    lines = text.strip().split("\n")
    assert lines[0] == "name,lhs,rhs,holds"
    assert lines[1].startswith("x,") and lines[1].endswith(",true")
    assert lines[2].startswith("y,") and lines[2].endswith(",false")


def test_audit_dicts_serializable():
    out = ser.dumps(ser.audits_to_list([make_audit("x", 0.5, 1.0)]))
    parsed = json.loads(out)
    assert parsed[0]["name"] == "x" and parsed[0]["holds"] is True
