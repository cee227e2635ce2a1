"""Entanglement quantities.

Entropies are in bits. The mixed-state entanglement of formation is not
computed by convex-roof minimization; :mod:`mmes_lab.mmes` certifies the
states for which it equals ``log2 d`` and :func:`negativity` covers the
rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .qmat import DensityMatrix, PureState, haar_random_unitary, partial_trace, partial_transpose, trace_norm
from .validation import (
    DimensionMismatchError,
    InvalidStateError,
    check_density_matrix,
    check_hermitian,
    check_pure_state,
    check_random_state,
    check_side,
)

__all__ = [
    "FefResult",
    "FullyEntangledFraction",
    "von_neumann_entropy",
    "eof_pure",
    "negativity",
    "fef_objective",
    "fully_entangled_fraction",
    "optimal_teleport_fidelity",
]

NEGATIVE_EIG_ATOL = 1e-8


def von_neumann_entropy(m) -> float:
    """``-sum(l * log2(l))`` over the spectrum of ``m``, with ``0 log 0 = 0``."""
    arr = check_hermitian(m, atol=1e-8)
    vals = np.linalg.eigvalsh((arr + arr.conj().T) / 2)
    if vals[0] < -NEGATIVE_EIG_ATOL:
        raise InvalidStateError("psd", f"eigenvalue {vals[0]:.3e} below -{NEGATIVE_EIG_ATOL:g}")
    vals = vals[vals > 0]
    return float(-np.sum(vals * np.log2(vals)))


def eof_pure(psi: PureState, traced="B") -> float:
    """Entanglement of a pure state: entropy of one reduced state.

    ``traced`` names the subsystem that is traced out; the value is the
    same either way up to round-off.
    """
    check_pure_state(psi)
    keep = "A" if check_side(traced) == "B" else "B"
    return von_neumann_entropy(partial_trace(psi.density(), keep=keep))


def negativity(rho: DensityMatrix, side="A") -> float:
    """``(||rho^T_side||_1 - 1) / 2``."""
    check_density_matrix(rho)
    return (trace_norm(partial_transpose(rho, side)) - 1.0) / 2.0


def optimal_teleport_fidelity(fef, d: int):
    """Best average teleportation fidelity ``(d F + 1) / (d + 1)``.

    Works on floats or :class:`fractions.Fraction` (exact arithmetic).
    """
    if not 0 <= fef <= 1:
        raise ValueError(f"fully entangled fraction must lie in [0, 1], got {fef!r}")
    if d < 1:
        raise ValueError("d must be positive")
    return (d * fef + 1) / (d + 1)


@dataclass(frozen=True, eq=False)
class FefResult:
    value: float
    optimizer: np.ndarray = field(repr=False)
    restarts_used: int
    converged: bool


def _unitary_vector(U: np.ndarray) -> np.ndarray:
    # (I (x) U)|Phi> * sqrt(d): entry U[b, a] at flat index a*d + b
    return U.T.reshape(-1)


def fef_objective(rho_matrix: np.ndarray, U: np.ndarray) -> float:
    """``<Phi|(I (x) U^dag) rho (I (x) U)|Phi>`` for a ``d x d`` unitary ``U``."""
    d = U.shape[0]
    v = _unitary_vector(U)
    return float(np.real(np.vdot(v, rho_matrix @ v))) / d


def _polar_unitary(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def _ascend(rho_matrix, U, max_iter, tol):
    # Maximizes a convex quadratic over U(d): each step maximizes its
    # linearization, so the objective never decreases.
    d = U.shape[0]
    value = fef_objective(rho_matrix, U)
    converged = False
    for _ in range(max_iter):
        w = rho_matrix @ _unitary_vector(U)
        U = _polar_unitary(w.reshape(d, d).T)
        new_value = fef_objective(rho_matrix, U)
        step = abs(new_value - value)
        value = new_value
        if step < tol:
            converged = True
            break
    return U, value, converged


def fully_entangled_fraction(
    rho: DensityMatrix,
    restarts: int = 32,
    max_iter: int = 1000,
    tol: float = 1e-12,
    rng=None,
) -> FefResult:
    """Fully entangled fraction of a ``d x d`` state by projected power ascent.

    The objective ``F(U)`` is maximized from the identity and from
    ``restarts`` Haar-random starts drawn in order from ``rng``. Each
    iteration applies ``rho`` to the vector of ``(I (x) U)|Phi>``,
    reshapes it to a ``d x d`` matrix and replaces ``U`` by its unitary
    polar factor, stopping once the objective moves by less than ``tol``.
    The best run wins; ties go to the earliest start.
    """
    check_density_matrix(rho)
    dA, dB = rho.dims
    if dA != dB:
        raise DimensionMismatchError(f"fully entangled fraction needs a square system, got {rho.dims}")
    if restarts < 0:
        raise ValueError("restarts must be non-negative")
    rng = check_random_state(rng)
    m = rho.matrix
    starts = [np.eye(dA, dtype=complex)]
    starts += [haar_random_unitary(dA, rng) for _ in range(restarts)]

    best = None
    for U0 in starts:
        U, value, converged = _ascend(m, U0, max_iter, tol)
        if best is None or value > best[1]:
            best = (U, value, converged)
    U, _, converged = best
    return FefResult(
        value=fef_objective(m, U),
        optimizer=U,
        restarts_used=restarts,
        converged=converged,
    )


class FullyEntangledFraction(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :func:`fully_entangled_fraction`.

    ``fit`` takes one state and stores the result; ``transform`` maps a
    sequence of states to a column of fully-entangled-fraction values.

    Parameters
    ----------
    restarts : int, default=32
        Number of Haar-random starting unitaries (the identity start is
        always added).
    max_iter : int, default=1000
        Iteration cap for each ascent.
    tol : float, default=1e-12
        Stagnation threshold on the objective.
    random_state : int, Generator or None
        Seed for the starting unitaries.

    Attributes
    ----------
    result_ : FefResult
    value_ : float
    optimizer_ : ndarray of shape (d, d)
    teleport_fidelity_ : float
        ``(d F + 1) / (d + 1)`` for the fitted state.
    """

    def __init__(self, restarts=32, max_iter=1000, tol=1e-12, random_state=None):
        self.restarts = restarts
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def _compute(self, rho, rng):
        return fully_entangled_fraction(rho, self.restarts, self.max_iter, self.tol, rng)

    def fit(self, X, y=None):
        self.result_ = self._compute(X, check_random_state(self.random_state))
        self.value_ = self.result_.value
        self.optimizer_ = self.result_.optimizer
        self.teleport_fidelity_ = optimal_teleport_fidelity(min(self.value_, 1.0), X.dims.dA)
        return self

    def transform(self, X):
        rng = check_random_state(self.random_state)
        states = [X] if isinstance(X, DensityMatrix) else list(X)
        return np.array([[self._compute(r, rng).value] for r in states])
