"""Construction and certification of mixed maximally entangled states.

A state on ``d (x) d'`` is a mixed maximally entangled state (MMES) when
every vector in its range is maximally entangled. Equivalently, it is a
mixture of states ``(1/sqrt d) sum_i |i> (x) |i_m>`` whose large-side
families ``{|i_m>}`` are mutually orthogonal across ``m``. So rank ``k``
requires ``d' >= k d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .measures import eof_pure
from .qmat import DensityMatrix, PureState, haar_random_unitary, hermitian_eig, swap_subsystems
from .validation import check_density_matrix, check_random_state, check_side

__all__ = [
    "MmesSpecError",
    "MmesSpec",
    "MmesCertificate",
    "AuditReport",
    "construct_mmes",
    "random_mmes_spec",
    "example_2x4_state",
    "two_block_mixture",
    "is_mmes",
    "decomposition_from_unitary",
    "decomposition_audit",
    "MmesCertifier",
]

RANK_CUTOFF = 1e-10


class MmesSpecError(ValueError):
    """Raised for weights or large-side families that cannot form an MMES."""


@dataclass(frozen=True, eq=False)
class MmesSpec:
    """Weights ``p_m`` and large-side families ``{|i_m>}``.

    ``b_blocks[m]`` is a ``d_prime x d`` matrix whose column ``i`` is the
    vector ``|i_m>``.
    """

    d: int
    weights: tuple[float, ...]
    b_blocks: tuple[np.ndarray, ...]

    @property
    def d_prime(self) -> int:
        return self.b_blocks[0].shape[0]

    @property
    def k(self) -> int:
        return len(self.b_blocks)


def _validate_spec(spec: MmesSpec, overlap_tol: float = 1e-10) -> None:
    d, k = spec.d, spec.k
    if k == 0 or len(spec.weights) != k:
        raise MmesSpecError("need one weight per block and at least one block")
    w = np.asarray(spec.weights, dtype=float)
    if np.any(w <= 0):
        raise MmesSpecError("weights must be strictly positive")
    if abs(w.sum() - 1.0) > 1e-12:
        raise MmesSpecError(f"weights sum to {w.sum()!r}, expected 1")
    shapes = {b.shape for b in spec.b_blocks}
    if len(shapes) != 1 or shapes.pop()[1] != d:
        raise MmesSpecError(f"every block must be d' x {d}")
    if spec.d_prime < k * d:
        raise MmesSpecError(f"large side has dimension {spec.d_prime} < k*d = {k * d}")
    stacked = np.hstack(spec.b_blocks)
    gram = stacked.conj().T @ stacked
    err = float(np.max(np.abs(gram - np.eye(k * d))))
    if err > overlap_tol:
        raise MmesSpecError(f"large-side families are not orthonormal across blocks (error {err:.3e})")


def construct_mmes(spec: MmesSpec) -> DensityMatrix:
    """``sum_m p_m |psi_m><psi_m|`` on ``d (x) d'``."""
    _validate_spec(spec)
    d = spec.d
    rho = np.zeros((d * spec.d_prime,) * 2, dtype=complex)
    for p, block in zip(spec.weights, spec.b_blocks):
        psi = (np.asarray(block, dtype=complex).T / np.sqrt(d)).reshape(-1)
        rho += p * np.outer(psi, psi.conj())
    return DensityMatrix(rho, (d, spec.d_prime))


def random_mmes_spec(d: int, k: int, d_prime: int | None = None, rng=None) -> MmesSpec:
    """Random families from a Haar unitary and Dirichlet weights."""
    rng = check_random_state(rng)
    d_prime = k * d if d_prime is None else d_prime
    U = haar_random_unitary(d_prime, rng)
    blocks = tuple(U[:, m * d:(m + 1) * d] for m in range(k))
    weights = rng.dirichlet(np.ones(k))
    weights = weights / weights.sum()
    return MmesSpec(d, tuple(float(x) for x in weights), blocks)


def example_2x4_state() -> DensityMatrix:
    """Equal mixture of ``(|00>+|11>)/sqrt2`` and ``(|02>+|13>)/sqrt2``."""
    eye4 = np.eye(4)
    return construct_mmes(MmesSpec(2, (0.5, 0.5), (eye4[:, :2], eye4[:, 2:])))


def two_block_mixture(p: float) -> DensityMatrix:
    """``(1-p)|psi1><psi1| + p|psi2><psi2|`` with the two ``2 (x) 4`` blocks of
    :func:`example_2x4_state`. Rank 1 at ``p`` in ``{0, 1}``."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    eye4 = np.eye(4)
    blocks = [(w, b) for w, b in ((1 - p, eye4[:, :2]), (p, eye4[:, 2:])) if w > 0]
    return construct_mmes(MmesSpec(2, tuple(w for w, _ in blocks), tuple(b for _, b in blocks)))


@dataclass
class MmesCertificate:
    """Evidence for or against MMES membership.

    ``verdict`` is true iff the three worst-case deviations are all at or
    below ``tol``.
    """

    verdict: bool
    rank: int
    eigenvalues: list[float]
    worst_schmidt_deviation: float
    worst_cross_trace_norm: float
    reduced_small_side_deviation: float
    small_side: str
    tol: float
    rank_cutoff: float = RANK_CUTOFF
    dims: tuple[int, int] = (0, 0)

    @property
    def capacity_ok(self) -> bool:
        """Large side has room for ``rank`` orthogonal families."""
        d, D = (self.dims if self.small_side == "A" else self.dims[::-1])
        return D >= self.rank * d

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "rank": self.rank,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "worst_schmidt_deviation": self.worst_schmidt_deviation,
            "worst_cross_trace_norm": self.worst_cross_trace_norm,
            "reduced_small_side_deviation": self.reduced_small_side_deviation,
            "small_side": self.small_side,
            "tol": self.tol,
            "rank_cutoff": self.rank_cutoff,
            "dims": list(self.dims),
        }


def _oriented(rho: DensityMatrix, small_side: str) -> DensityMatrix:
    return rho if small_side == "A" else swap_subsystems(rho)


def _range_vectors(rho: DensityMatrix, rank_cutoff: float):
    vals, vecs = hermitian_eig(rho.matrix)
    keep = vals > rank_cutoff
    return vals[keep], vecs[:, keep]


def is_mmes(
    rho: DensityMatrix,
    small_side="A",
    tol: float = 1e-8,
    rank_cutoff: float = RANK_CUTOFF,
) -> MmesCertificate:
    """Certify whether ``rho`` is a mixed (or pure) maximally entangled state.

    Works on the eigenvectors ``v_m`` of ``rho`` with eigenvalue above
    ``rank_cutoff``. It checks three things: every ``v_m`` has all ``d``
    Schmidt coefficients equal to ``1/sqrt d``; for every ``m != n`` the
    cross operator ``Tr_large |v_m><v_n|`` vanishes (Hilbert-Schmidt
    norm); the small-side reduced state is ``I/d``.

    The two eigenvector conditions hold for every unit vector in the range
    iff they hold for one orthonormal basis of it (polarization), so the
    verdict does not depend on how degenerate eigenspaces are resolved.
    """
    check_density_matrix(rho)
    side = check_side(small_side)
    oriented = _oriented(rho, side)
    d, D = oriented.dims
    vals, vecs = _range_vectors(oriented, rank_cutoff)
    mats = [vecs[:, m].reshape(d, D) for m in range(vecs.shape[1])]

    target = 1 / np.sqrt(d)
    schmidt_dev = 0.0
    for V in mats:
        s = np.linalg.svd(V, compute_uv=False)
        s = np.pad(s, (0, d - s.shape[0]))
        schmidt_dev = max(schmidt_dev, float(np.max(np.abs(s - target))))

    cross = 0.0
    for m in range(len(mats)):
        for n in range(m + 1, len(mats)):
            cross = max(cross, float(np.linalg.norm(mats[m] @ mats[n].conj().T)))

    reduced = np.einsum("ajbj->ab", oriented.matrix.reshape(d, D, d, D))
    red_dev = float(np.max(np.abs(reduced - np.eye(d) / d)))

    verdict = schmidt_dev <= tol and cross <= tol and red_dev <= tol
    return MmesCertificate(
        verdict=bool(verdict),
        rank=len(mats),
        eigenvalues=[float(v) for v in vals],
        worst_schmidt_deviation=schmidt_dev,
        worst_cross_trace_norm=cross,
        reduced_small_side_deviation=red_dev,
        small_side=side,
        tol=tol,
        rank_cutoff=rank_cutoff,
        dims=tuple(rho.dims),
    )


def decomposition_from_unitary(
    rho: DensityMatrix, U: np.ndarray, rank_cutoff: float = RANK_CUTOFF
) -> tuple[np.ndarray, list[PureState]]:
    """Pure-state decomposition induced by an ``l x l`` unitary, ``l >= rank``.

    Element ``n`` is ``sum_m U[n, m] sqrt(p_m) |v_m>`` with weight equal to
    its squared norm; elements of weight below 1e-14 are dropped.
    """
    vals, vecs = _range_vectors(rho, rank_cutoff)
    k = vals.shape[0]
    if U.shape[0] < k:
        raise ValueError(f"unitary of size {U.shape[0]} is smaller than the rank {k}")
    raw = (vecs * np.sqrt(vals)) @ U[:, :k].T
    weights, states = [], []
    for n in range(raw.shape[1]):
        q = float(np.vdot(raw[:, n], raw[:, n]).real)
        if q < 1e-14:
            continue
        weights.append(q)
        states.append(PureState(raw[:, n] / np.sqrt(q), rho.dims))
    return np.array(weights), states


@dataclass
class AuditReport:
    trials: int
    n_elements: int
    min_eof: float
    max_eof: float
    target: float
    eofs: list[float] = field(default_factory=list, repr=False)

    def all_maximal(self, atol: float = 1e-8) -> bool:
        return abs(self.min_eof - self.target) <= atol and abs(self.max_eof - self.target) <= atol


def decomposition_audit(
    rho: DensityMatrix,
    small_side="A",
    trials: int = 100,
    rng=None,
    size: int | None = None,
) -> AuditReport:
    """Entanglement of every element of random pure-state decompositions.

    Each trial draws a Haar unitary of size ``size`` (default: the rank)
    and evaluates the pure-state entanglement of every induced element.
    """
    check_density_matrix(rho)
    side = check_side(small_side)
    rng = check_random_state(rng)
    rank = _range_vectors(rho, RANK_CUTOFF)[0].shape[0]
    l = rank if size is None else size
    d = rho.dims.dA if side == "A" else rho.dims.dB
    eofs = []
    for _ in range(trials):
        _, states = decomposition_from_unitary(rho, haar_random_unitary(l, rng))
        eofs.extend(eof_pure(psi) for psi in states)
    return AuditReport(trials, len(eofs), min(eofs), max(eofs), math.log2(d), eofs)


class MmesCertifier(ClassifierMixin, BaseEstimator):
    """Classifier view of :func:`is_mmes`.

    ``fit`` certifies one state; ``predict`` returns a boolean verdict per
    state in a sequence, so ``score(states, labels)`` gives accuracy.
    """

    def __init__(self, small_side="A", tol=1e-8, rank_cutoff=RANK_CUTOFF):
        self.small_side = small_side
        self.tol = tol
        self.rank_cutoff = rank_cutoff

    def _certify(self, rho):
        return is_mmes(rho, self.small_side, self.tol, self.rank_cutoff)

    def fit(self, X, y=None):
        self.certificate_ = self._certify(X)
        self.verdict_ = self.certificate_.verdict
        self.classes_ = np.array([False, True])
        return self

    def predict(self, X):
        states = [X] if isinstance(X, DensityMatrix) else list(X)
        return np.array([self._certify(r).verdict for r in states])
