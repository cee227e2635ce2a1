"""Shift/clock operators and the generalized Bell basis of ``d (x) 2d``.

Labels are 0-based throughout. ``omega = exp(-2 pi i / d)`` (note the
negative sign), ``h|j> = |j+1 mod d>``, ``g|j> = omega^j |j>`` and
``U_st = h^t g^s``. Family 1 pairs ``|i>`` with ``|i>`` on the large side,
family 2 pairs ``|i>`` with ``|d+i>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .qmat import PureState
from .validation import check_random_state

__all__ = [
    "WeylIndex",
    "GeneralizedBellState",
    "omega",
    "shift",
    "clock",
    "weyl_unitary",
    "weyl_indices",
    "bell_seed",
    "generalized_bell",
    "bell_basis",
    "UnitaryBasisReport",
    "verify_unitary_basis",
]


class WeylIndex(NamedTuple):
    s: int
    t: int
    d: int

    def validate(self) -> "WeylIndex":
        if self.d < 1 or not (0 <= self.s < self.d and 0 <= self.t < self.d):
            raise ValueError(f"invalid Weyl index {tuple(self)}")
        return self


def omega(d: int) -> complex:
    return np.exp(-2j * np.pi / d)


def shift(d: int) -> np.ndarray:
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock(d: int) -> np.ndarray:
    return np.diag(np.exp(-2j * np.pi * np.arange(d) / d))


def weyl_unitary(idx: WeylIndex) -> np.ndarray:
    s, t, d = idx.validate()
    # h^t g^s |j> = omega^(s j) |j + t>
    j = np.arange(d)
    U = np.zeros((d, d), dtype=complex)
    U[(j + t) % d, j] = np.exp(-2j * np.pi * ((s * j) % d) / d)
    return U


def weyl_indices(d: int) -> list[WeylIndex]:
    return [WeylIndex(s, t, d) for s in range(d) for t in range(d)]


@dataclass(frozen=True, eq=False)
class GeneralizedBellState:
    index: WeylIndex
    family: int
    state: PureState = field(repr=False)


def bell_seed(d: int, family: int) -> np.ndarray:
    """``d x 2d`` matrix of ``(1/sqrt d) sum_i |i, i + (family-1) d>``."""
    if family not in (1, 2):
        raise ValueError(f"family must be 1 or 2, got {family!r}")
    m = np.zeros((d, 2 * d), dtype=complex)
    offset = 0 if family == 1 else d
    m[np.arange(d), offset + np.arange(d)] = 1 / np.sqrt(d)
    return m


def generalized_bell(idx: WeylIndex, family: int) -> GeneralizedBellState:
    """``(U_st (x) I) (1/sqrt d) sum_i |i, i + (family-1) d>`` on ``d (x) 2d``."""
    idx = WeylIndex(*idx).validate()
    amps = (weyl_unitary(idx) @ bell_seed(idx.d, family)).reshape(-1)
    return GeneralizedBellState(idx, family, PureState(amps, (idx.d, 2 * idx.d)))


def bell_basis(d: int) -> list[GeneralizedBellState]:
    """All ``2 d^2`` generalized Bell states, family-major then ``(s, t)``."""
    return [generalized_bell(idx, f) for f in (1, 2) for idx in weyl_indices(d)]


@dataclass
class UnitaryBasisReport:
    d: int
    max_orthogonality_error: float
    max_unitarity_error: float
    max_expansion_error: float
    tol: float
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def verify_unitary_basis(
    d: int,
    tol: float = 1e-10,
    n_random: int = 5,
    rng=None,
    operator: Callable[[WeylIndex], np.ndarray] = weyl_unitary,
) -> UnitaryBasisReport:
    """Check that ``{U_st}`` is a trace-orthogonal unitary operator basis.

    Three checks: ``Tr(U_st U_s't'^dag) = d delta delta``; each ``U_st`` is
    unitary; ``W = (1/d) sum Tr(U_st^dag W) U_st`` for random ``W``.
    ``operator`` can be swapped out to run negative controls.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    rng = check_random_state(rng)
    idxs = weyl_indices(d)
    ops = np.array([operator(i) for i in idxs])
    gram = np.einsum("aij,bij->ab", ops, ops.conj())
    orth = float(np.max(np.abs(gram - d * np.eye(len(idxs)))))
    eye = np.eye(d)
    unit = max(float(np.max(np.abs(U @ U.conj().T - eye))) for U in ops)
    exp_err = 0.0
    for _ in range(n_random):
        W = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        coeffs = np.einsum("aji,jk->aik", ops.conj(), W).trace(axis1=1, axis2=2)
        recon = np.einsum("a,aij->ij", coeffs, ops) / d
        exp_err = max(exp_err, float(np.max(np.abs(recon - W))))
    report = UnitaryBasisReport(d, orth, unit, exp_err, tol)
    if orth > tol:
        report.violations.append(f"orthogonality: {orth:.3e}")
    if unit > tol:
        report.violations.append(f"unitarity: {unit:.3e}")
    if exp_err > tol:
        report.violations.append(f"expansion: {exp_err:.3e}")
    return report
