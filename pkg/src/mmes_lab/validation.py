"""Input validation helpers, in the spirit of ``sklearn.utils.validation``.

Every public entry point that takes a state runs it through one of the
``check_*`` functions below. They return the validated object (so calls
can be chained) and raise :class:`InvalidStateError` naming the violated
invariant.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-9
NORM_ATOL = 1e-10


class InvalidStateError(ValueError):
    """Raised when an operator or state violates a structural invariant.

    The ``invariant`` attribute carries a short machine-readable name
    (``"hermitian"``, ``"trace"``, ``"psd"``, ``"norm"``, ``"shape"``,
    ``"finite"``) so command-line tooling can report it.
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class DimensionMismatchError(ValueError):
    """Raised when operand dimensions are incompatible."""


def check_side(side) -> str:
    s = str(side).upper()
    if s not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return s


def check_dims(dims) -> tuple[int, int]:
    try:
        dA, dB = (int(x) for x in dims)
    except (TypeError, ValueError):
        raise InvalidStateError("shape", f"dims must be a pair of integers, got {dims!r}")
    if dA < 1 or dB < 1:
        raise InvalidStateError("shape", f"subsystem dimensions must be positive, got {dims!r}")
    return dA, dB


def check_matrix(m, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite complex 2-D array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise InvalidStateError("shape", f"{name} must be 2-D, got ndim={arr.ndim}")
    if square and arr.shape[0] != arr.shape[1]:
        raise InvalidStateError("shape", f"{name} must be square, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidStateError("finite", f"{name} has non-finite entries")
    return arr


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m, atol: float = HERMITIAN_ATOL, name: str = "matrix") -> np.ndarray:
    arr = check_matrix(m, square=True, name=name)
    err = hermiticity_error(arr)
    if err > atol:
        raise InvalidStateError("hermitian", f"{name} deviates from Hermitian by {err:.3e}")
    return arr


def check_pure_state(psi, *, atol: float = NORM_ATOL):
    """Validate a :class:`~mmes_lab.qmat.PureState`; returns it unchanged."""
    amps = np.asarray(psi.amplitudes)
    dA, dB = check_dims(psi.dims)
    if amps.ndim != 1 or amps.shape[0] != dA * dB:
        raise InvalidStateError(
            "shape", f"amplitude vector of length {amps.shape} does not match dims {psi.dims}"
        )
    if not np.all(np.isfinite(amps)):
        raise InvalidStateError("finite", "amplitudes have non-finite entries")
    norm = float(np.linalg.norm(amps))
    if abs(norm - 1.0) > atol:
        raise InvalidStateError("norm", f"state norm is {norm!r}, expected 1")
    return psi


def check_density_matrix(
    rho,
    *,
    hermitian_atol: float = HERMITIAN_ATOL,
    trace_atol: float = TRACE_ATOL,
    psd_atol: float = PSD_ATOL,
):
    """Validate a :class:`~mmes_lab.qmat.DensityMatrix`; returns it unchanged."""
    dA, dB = check_dims(rho.dims)
    m = check_matrix(rho.matrix, square=True, name="density matrix")
    if m.shape[0] != dA * dB:
        raise InvalidStateError("shape", f"matrix side {m.shape[0]} does not match dims {rho.dims}")
    err = hermiticity_error(m)
    if err > hermitian_atol:
        raise InvalidStateError("hermitian", f"density matrix deviates from Hermitian by {err:.3e}")
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > trace_atol:
        raise InvalidStateError("trace", f"trace is {tr.real!r}, expected 1")
    lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
    if lo < -psd_atol:
        raise InvalidStateError("psd", f"minimum eigenvalue {lo:.3e} below -{psd_atol:g}")
    return rho


def check_random_state(seed) -> np.random.Generator:
    """Turn ``None``, an int or a Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
