"""Exhaustive teleportation simulation.

Particles are ordered ``A1 (x) A2 (x) B``: the unknown ``d``-level input on
``A1``, the sender's half of the resource on ``A2`` (dimension ``d`` or
``2d``), and the receiver's ``d``-level particle ``B``. Every outcome of the
generalized Bell measurement on ``A1 A2`` is enumerated; the receiver's
conditional state follows from the Born rule and is corrected with
``U_st``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qmat import DensityMatrix, PureState
from .validation import DimensionMismatchError, check_density_matrix, check_pure_state
from .weyl import generalized_bell, weyl_indices, weyl_unitary

__all__ = [
    "TeleportOutcome",
    "mmes_resource_state",
    "simulate_teleport",
    "simulate_mmes_teleport",
    "simulate_standard_teleport",
    "average_fidelity",
    "mixed_output",
    "bell_expansion",
]

ZERO_PROBABILITY = 1e-14


@dataclass(frozen=True, eq=False)
class TeleportOutcome:
    s: int
    t: int
    family: int
    probability: float
    fidelity_after_correction: float
    fidelity_before_correction: float
    corrected_state: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "t": self.t,
            "family": self.family,
            "probability": self.probability,
            "fidelity_after_correction": self.fidelity_after_correction,
            "fidelity_before_correction": self.fidelity_before_correction,
        }


def mmes_resource_state(d: int) -> DensityMatrix:
    """``(|e1><e1| + |e2><e2|) / 2`` on ``2d (x) d``.

    ``e1 = sum_i |i, i> / sqrt d`` and ``e2 = sum_i |d+i, i> / sqrt d``; the
    ``d``-level particle is subsystem B.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    e1 = np.zeros((2 * d, d), dtype=complex)
    e2 = np.zeros((2 * d, d), dtype=complex)
    e1[np.arange(d), np.arange(d)] = 1 / np.sqrt(d)
    e2[d + np.arange(d), np.arange(d)] = 1 / np.sqrt(d)
    e1, e2 = e1.reshape(-1), e2.reshape(-1)
    rho = 0.5 * (np.outer(e1, e1.conj()) + np.outer(e2, e2.conj()))
    return DensityMatrix(rho, (2 * d, d))


def _input_vector(psi, d=None) -> np.ndarray:
    if isinstance(psi, PureState):
        check_pure_state(psi)
        vec = psi.amplitudes
    else:
        vec = np.asarray(psi, dtype=complex).reshape(-1)
        if abs(np.linalg.norm(vec) - 1) > 1e-10:
            raise ValueError("input state must be normalized")
    if d is not None and vec.shape[0] != d:
        raise DimensionMismatchError(f"input has dimension {vec.shape[0]}, resource expects {d}")
    return vec


def _measurement_basis(d: int, D: int):
    if D == d:
        for idx in weyl_indices(d):
            vec = (weyl_unitary(idx) / np.sqrt(d)).reshape(-1)
            yield idx, 1, vec
    elif D == 2 * d:
        for family in (1, 2):
            for idx in weyl_indices(d):
                yield idx, family, generalized_bell(idx, family).state.amplitudes
    else:
        raise DimensionMismatchError(f"sender's resource dimension must be d or 2d, got {D} for d={d}")


def simulate_teleport(resource: DensityMatrix, psi) -> list[TeleportOutcome]:
    """Enumerate all measurement outcomes for a resource on ``A2 (x) B``.

    ``resource.dims`` is ``(D, d)`` with ``D`` equal to ``d`` (standard
    Bell measurement, ``d^2`` outcomes) or ``2d`` (generalized Bell
    measurement, ``2 d^2`` outcomes).
    """
    check_density_matrix(resource)
    D, d = resource.dims
    vec = _input_vector(psi, d)
    target = np.outer(vec, vec.conj())
    # total state A1 A2 B, grouped as (A1 A2) x B
    total = np.kron(target, resource.matrix).reshape(d * D, d, d * D, d)
    outcomes = []
    for idx, family, phi in _measurement_basis(d, D):
        bob = np.einsum("x,xbyc,y->bc", phi.conj(), total, phi)
        p = float(np.trace(bob).real)
        if p <= ZERO_PROBABILITY:
            outcomes.append(TeleportOutcome(idx.s, idx.t, family, max(p, 0.0), 1.0, 1.0))
            continue
        bob = bob / p
        U = weyl_unitary(idx)
        fixed = U @ bob @ U.conj().T
        outcomes.append(
            TeleportOutcome(
                idx.s,
                idx.t,
                family,
                p,
                float(np.real(np.vdot(vec, fixed @ vec))),
                float(np.real(np.vdot(vec, bob @ vec))),
                fixed,
            )
        )
    return outcomes


def simulate_mmes_teleport(psi) -> list[TeleportOutcome]:
    """Teleport ``psi`` with the rank-2 resource from :func:`mmes_resource_state`."""
    d = _input_vector(psi).shape[0]
    return simulate_teleport(mmes_resource_state(d), psi)


def average_fidelity(outcomes) -> float:
    """Probability-weighted corrected fidelity; zero-probability outcomes excluded."""
    live = [o for o in outcomes if o.probability > ZERO_PROBABILITY]
    total = sum(o.probability for o in live)
    return sum(o.probability * o.fidelity_after_correction for o in live) / total


def simulate_standard_teleport(resource: DensityMatrix, psi) -> float:
    """Average fidelity of the usual ``d (x) d`` protocol with a given resource."""
    dA, dB = resource.dims
    if dA != dB:
        raise DimensionMismatchError(f"standard protocol needs a square resource, got {resource.dims}")
    return average_fidelity(simulate_teleport(resource, psi))


def mixed_output(outcomes) -> np.ndarray:
    """Receiver's corrected state with the measurement record discarded."""
    live = [o for o in outcomes if o.probability > ZERO_PROBABILITY]
    return sum(o.probability * o.corrected_state for o in live)


def bell_expansion(psi) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the Bell-basis rewrite of ``|psi><psi| (x) chi``.

    Returns ``(tripartite, expansion)`` where ``expansion`` is
    ``sum_f sum_{st, s't'} |Phi^f_st><Phi^f_s't'| (x) U_st^dag |psi><psi| U_s't'``
    without any prefactor. The two agree once ``expansion`` is scaled by
    ``1 / (2 d^2)``.
    """
    vec = _input_vector(psi)
    d = vec.shape[0]
    target = np.outer(vec, vec.conj())
    tripartite = np.kron(target, mmes_resource_state(d).matrix)
    idxs = weyl_indices(d)
    bob = [weyl_unitary(i).conj().T @ vec for i in idxs]
    expansion = np.zeros_like(tripartite)
    for family in (1, 2):
        phis = [generalized_bell(i, family).state.amplitudes for i in idxs]
        # sum over (st) of |Phi_st> (x) U_st^dag |psi>, then outer product
        joint = sum(np.kron(phi, b) for phi, b in zip(phis, bob))
        expansion += np.outer(joint, joint.conj())
    return tripartite, expansion
