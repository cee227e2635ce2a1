"""Dense bipartite linear algebra.

Operators are plain ``numpy`` complex arrays. States carry their
bipartite dimensions alongside the data. The flat index of the pair
``(a, b)`` is always ``a * dB + b`` (``a`` major, ``b`` minor), which is
the ordering produced by ``np.kron``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .validation import (
    DimensionMismatchError,
    InvalidStateError,
    check_density_matrix,
    check_dims,
    check_hermitian,
    check_matrix,
    check_pure_state,
    check_random_state,
    check_side,
)

__all__ = [
    "BipartiteShape",
    "PureState",
    "DensityMatrix",
    "ket",
    "tensor_product",
    "partial_trace",
    "partial_transpose",
    "trace_norm",
    "hermitian_eig",
    "schmidt_decompose",
    "haar_random_unitary",
    "fidelity_pure",
    "random_pure_state",
    "random_density_matrix",
    "swap_subsystems",
    "maximally_entangled",
]


class BipartiteShape(NamedTuple):
    dA: int
    dB: int

    @property
    def dim(self) -> int:
        return self.dA * self.dB


@dataclass(frozen=True, eq=False)
class PureState:
    """A normalized ket on ``C^dA (x) C^dB``."""

    amplitudes: np.ndarray
    dims: BipartiteShape

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=complex).reshape(-1))
        object.__setattr__(self, "dims", BipartiteShape(*check_dims(self.dims)))

    @classmethod
    def from_vector(cls, vec, dims=None, normalize: bool = False) -> "PureState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if dims is None:
            dims = (vec.shape[0], 1)
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return check_pure_state(cls(vec, dims))

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``dA x dB`` (row ``a``, column ``b``)."""
        return self.amplitudes.reshape(self.dims)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A bipartite density operator tagged with its subsystem dimensions."""

    matrix: np.ndarray
    dims: BipartiteShape

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))
        object.__setattr__(self, "dims", BipartiteShape(*check_dims(self.dims)))

    @classmethod
    def from_matrix(cls, matrix, dims) -> "DensityMatrix":
        """Build and validate (Hermitian, unit trace, PSD)."""
        return check_density_matrix(cls(matrix, dims))

    @classmethod
    def mixture(cls, weights, states) -> "DensityMatrix":
        """Convex combination of pure states or density matrices."""
        states = list(states)
        dims = states[0].dims
        out = np.zeros((dims.dim, dims.dim), dtype=complex)
        for w, s in zip(weights, states):
            if s.dims != dims:
                raise DimensionMismatchError(f"mixed dims {s.dims} and {dims}")
            out += w * (s.density().matrix if isinstance(s, PureState) else s.matrix)
        return cls(out, dims)

    @property
    def dim(self) -> int:
        return self.dims.dim


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product; ``a``'s index is major."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _operator_and_dims(rho, dims):
    if isinstance(rho, DensityMatrix):
        return rho.matrix, rho.dims
    m = check_matrix(rho, square=True)
    if dims is None:
        raise DimensionMismatchError("dims are required when passing a bare matrix")
    dA, dB = check_dims(dims)
    if m.shape[0] != dA * dB:
        raise DimensionMismatchError(f"matrix side {m.shape[0]} does not match dims {dims}")
    return m, BipartiteShape(dA, dB)


def partial_trace(rho, keep="A", dims=None) -> np.ndarray:
    """Reduced operator on the kept subsystem.

    ``rho`` may be a :class:`DensityMatrix` or any square operator on the
    bipartite space (e.g. a cross term ``|u><v|``) together with ``dims``.
    """
    m, (dA, dB) = _operator_and_dims(rho, dims)
    t = m.reshape(dA, dB, dA, dB)
    if check_side(keep) == "A":
        return np.einsum("ajbj->ab", t)
    return np.einsum("iaib->ab", t)


def partial_transpose(rho, side="A", dims=None) -> np.ndarray:
    """Transpose the chosen subsystem's index pair."""
    m, (dA, dB) = _operator_and_dims(rho, dims)
    t = m.reshape(dA, dB, dA, dB)
    if check_side(side) == "A":
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(dA * dB, dA * dB)


def trace_norm(m) -> float:
    """Sum of singular values (sum of |eigenvalues| for Hermitian input)."""
    arr = check_matrix(m, square=True)
    return float(np.sum(np.linalg.svd(arr, compute_uv=False)))


def hermitian_eig(m, atol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and orthonormal eigenvector columns."""
    arr = check_hermitian(m, atol=atol)
    vals, vecs = np.linalg.eigh((arr + arr.conj().T) / 2)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def schmidt_decompose(psi: PureState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Schmidt coefficients (descending) and the matching local bases.

    Returns ``(coeffs, a_basis, b_basis)`` where the columns of
    ``a_basis`` (``dA x r``) and ``b_basis`` (``dB x r``) are orthonormal,
    ``r = min(dA, dB)``, and ``sum_i coeffs[i] * kron(a_i, b_i)`` is
    ``psi``.
    """
    check_pure_state(psi)
    u, s, vh = np.linalg.svd(psi.as_matrix(), full_matrices=False)
    return s, u, vh.T


def haar_random_unitary(dim: int, rng=None) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = check_random_state(rng)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def fidelity_pure(psi: PureState, phi: PureState) -> float:
    if psi.amplitudes.shape != phi.amplitudes.shape:
        raise DimensionMismatchError(
            f"cannot compare states of size {psi.amplitudes.shape[0]} and {phi.amplitudes.shape[0]}"
        )
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2)


def random_pure_state(dims, rng=None) -> PureState:
    rng = check_random_state(rng)
    dA, dB = check_dims(dims)
    v = rng.standard_normal(dA * dB) + 1j * rng.standard_normal(dA * dB)
    return PureState(v / np.linalg.norm(v), (dA, dB))


def random_density_matrix(dims, rng=None, rank: int | None = None) -> DensityMatrix:
    """Random state from the induced (Ginibre) measure."""
    rng = check_random_state(rng)
    dA, dB = check_dims(dims)
    n = dA * dB
    k = n if rank is None else rank
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, (dA, dB))


def swap_subsystems(rho):
    """Reorder ``A (x) B`` to ``B (x) A``. Accepts pure or mixed states."""
    if isinstance(rho, PureState):
        dA, dB = rho.dims
        return PureState(rho.as_matrix().T.reshape(-1), (dB, dA))
    if not isinstance(rho, DensityMatrix):
        raise InvalidStateError("shape", "expected a PureState or DensityMatrix")
    dA, dB = rho.dims
    t = rho.matrix.reshape(dA, dB, dA, dB).transpose(1, 0, 3, 2)
    return DensityMatrix(t.reshape(dA * dB, dA * dB), (dB, dA))


def maximally_entangled(d: int) -> PureState:
    """``sum_i |i, i> / sqrt d`` on ``d (x) d``."""
    m = np.eye(d, dtype=complex) / np.sqrt(d)
    return PureState(m.reshape(-1), (d, d))
