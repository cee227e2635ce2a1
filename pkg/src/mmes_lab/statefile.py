"""JSON state files.

Format::

    {"dims": [dA, dB], "kind": "density" | "pure", "data": ...}

``data`` holds ``[re, im]`` pairs: a flat list for ``pure`` and a list of
matrix rows for ``density``. Floats are written with ``repr`` precision,
so a write/read round trip is exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .qmat import DensityMatrix, PureState
from .validation import InvalidStateError, check_density_matrix, check_pure_state

__all__ = ["StateFileError", "state_to_dict", "state_from_dict", "read_state", "write_state"]


class StateFileError(ValueError):
    """Unparseable or structurally malformed state file."""


def _pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in values]


def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        return {"dims": list(state.dims), "kind": "pure", "data": _pairs(state.amplitudes)}
    if isinstance(state, DensityMatrix):
        return {"dims": list(state.dims), "kind": "density", "data": [_pairs(row) for row in state.matrix]}
    raise TypeError(f"cannot serialize {type(state).__name__}")


def _complex(entries, where: str) -> np.ndarray:
    try:
        arr = np.asarray(entries, dtype=float)
    except (TypeError, ValueError):
        raise StateFileError(f"{where}: entries must be [re, im] number pairs")
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise StateFileError(f"{where}: entries must be [re, im] number pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_from_dict(obj) -> PureState | DensityMatrix:
    """Parse and validate; raises :class:`StateFileError` or
    :class:`~mmes_lab.validation.InvalidStateError`."""
    if not isinstance(obj, dict):
        raise StateFileError("top level must be an object")
    missing = {"dims", "kind", "data"} - obj.keys()
    if missing:
        raise StateFileError(f"missing keys: {sorted(missing)}")
    dims = obj["dims"]
    if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(x, int) for x in dims)):
        raise StateFileError("dims must be a list of two integers")
    kind = obj["kind"]
    if kind == "pure":
        amps = _complex(obj["data"], "data")
        if amps.ndim != 1:
            raise StateFileError("data: pure state must be a flat list of pairs")
        if amps.shape[0] != dims[0] * dims[1]:
            raise InvalidStateError("shape", f"{amps.shape[0]} amplitudes for dims {dims}")
        return check_pure_state(PureState(amps, dims))
    if kind == "density":
        m = _complex(obj["data"], "data")
        n = dims[0] * dims[1]
        if m.shape != (n, n):
            raise InvalidStateError("shape", f"matrix of shape {m.shape} for dims {dims}")
        return check_density_matrix(DensityMatrix(m, dims))
    raise StateFileError(f"kind must be 'pure' or 'density', got {kind!r}")


def read_state(path) -> PureState | DensityMatrix:
    text = Path(path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return state_from_dict(obj)


def write_state(state, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state)) + "\n", encoding="utf-8")
