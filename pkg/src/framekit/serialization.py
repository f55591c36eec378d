"""JSON wire formats: frames, dual parameters, Gabor systems, audit batches.

Complex scalars travel as [re, im] pairs. Emission is deterministic:
sorted keys, fixed separators, shortest round-trip float representation
(Python's repr), so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json

import numpy as np

from .linalg import InputError
from .frames import Frame
from .gabor import GaborSystem
from .approxdual import ApproxDualParams
from .perturbation import BoundAudit


def complex_to_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def matrix_to_pairs(M: np.ndarray) -> list:
    return [[complex_to_pair(z) for z in row] for row in np.asarray(M)]


def pairs_to_matrix(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError
    except (TypeError, ValueError):
        raise InputError("expected a nested list of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def vector_to_pairs(v: np.ndarray) -> list:
    return [complex_to_pair(z) for z in np.asarray(v)]


def pairs_to_vector(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError
    except (TypeError, ValueError):
        raise InputError("expected a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def frame_to_dict(F: Frame) -> dict:
    return {"dim": F.dim, "vectors": matrix_to_pairs(F.vectors)}


def frame_from_dict(data: dict) -> Frame:
    if not isinstance(data, dict) or "dim" not in data or "vectors" not in data:
        raise InputError("frame JSON needs 'dim' and 'vectors'")
    F = Frame.from_vectors(pairs_to_matrix(data["vectors"]))
    if F.dim != int(data["dim"]):
        raise InputError(f"declared dim {data['dim']} != vector length {F.dim}")
    return F


def params_to_dict(P: ApproxDualParams) -> dict:
    return {"A": matrix_to_pairs(P.A), "Theta": matrix_to_pairs(P.Theta)}


def params_from_dict(data: dict) -> ApproxDualParams:
    if not isinstance(data, dict) or "A" not in data or "Theta" not in data:
        raise InputError("params JSON needs 'A' and 'Theta'")
    return ApproxDualParams(A=pairs_to_matrix(data["A"]),
                            Theta=pairs_to_matrix(data["Theta"]))


def gabor_to_dict(sys: GaborSystem) -> dict:
    return {"L": sys.L, "a": sys.a, "b": sys.b,
            "window": vector_to_pairs(sys.window)}


def gabor_from_dict(data: dict) -> GaborSystem:
    for key in ("L", "a", "b", "window"):
        if not isinstance(data, dict) or key not in data:
            raise InputError(f"gabor JSON needs '{key}'")
    return GaborSystem(L=int(data["L"]), a=int(data["a"]), b=int(data["b"]),
                       window=pairs_to_vector(data["window"]))


def audits_to_list(audits) -> list[dict]:
    return [a.to_dict() for a in audits]


def dump_json(obj, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=True) + "\n"


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def audits_to_csv(audits: list[BoundAudit]) -> str:
    lines = ["name,lhs,rhs,holds"]
    for a in audits:
        lines.append(f"{a.name},{a.lhs!r},{a.rhs!r},{str(a.holds).lower()}")
    return "\n".join(lines) + "\n"
