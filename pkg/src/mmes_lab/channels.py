"""Kraus channels acting on one half of a bipartite state, plus the XXZ
two-spin Hamiltonian used to prepare a ``2 (x) 4`` resource.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .measures import eof_pure, negativity
from .mmes import MmesCertificate, is_mmes
from .qmat import DensityMatrix, PureState, random_pure_state, swap_subsystems
from .teleport import simulate_teleport
from .validation import DimensionMismatchError, check_density_matrix, check_matrix, check_random_state, check_side

__all__ = [
    "KrausChannel",
    "NonTracePreservingError",
    "make_channel",
    "block_swap_permutation",
    "block_swap_channel",
    "apply_one_sided",
    "OneSidedChannel",
    "EvolutionReport",
    "evolution_report",
    "teleport_usability",
    "XxzParams",
    "XxzGroundState",
    "spin_matrices",
    "xxz_hamiltonian",
    "xxz_ground_state",
]


class NonTracePreservingError(ValueError):
    """Applying a channel whose Kraus operators do not sum to the identity."""


@dataclass(frozen=True, eq=False)
class KrausChannel:
    operators: tuple[np.ndarray, ...]
    trace_preserving: bool
    completeness_error: float

    @property
    def dim(self) -> int:
        return self.operators[0].shape[1]


def make_channel(ops, tol: float = 1e-10) -> KrausChannel:
    """Wrap Kraus operators and record whether ``sum M^dag M = I`` holds."""
    ops = tuple(check_matrix(m, name="Kraus operator") for m in ops)
    if not ops:
        raise ValueError("a channel needs at least one Kraus operator")
    if len({m.shape for m in ops}) != 1:
        raise DimensionMismatchError(f"Kraus operators have differing shapes {[m.shape for m in ops]}")
    n = ops[0].shape[1]
    completeness = sum(m.conj().T @ m for m in ops)
    err = float(np.max(np.abs(completeness - np.eye(n))))
    return KrausChannel(ops, err <= tol, err)


def block_swap_permutation() -> np.ndarray:
    """``|0><2| + |1><3| + |3><1| + |2><0|`` on a 4-level system."""
    P = np.zeros((4, 4), dtype=complex)
    P[0, 2] = P[1, 3] = P[3, 1] = P[2, 0] = 1
    return P


def block_swap_channel(coefficient: float = 1 / np.sqrt(2)) -> KrausChannel:
    """Channel with Kraus operators ``c I`` and ``c P`` on 4 levels.

    Only ``c = 1/sqrt(2)`` is trace preserving; ``c = 1/2`` gives
    ``sum M^dag M = I/2`` and is kept for comparison.
    """
    return make_channel([coefficient * np.eye(4), coefficient * block_swap_permutation()])


def apply_one_sided(
    ch: KrausChannel,
    rho: DensityMatrix,
    side="B",
    allow_non_trace_preserving: bool = False,
) -> DensityMatrix:
    """``sum_k (I (x) M_k) rho (I (x) M_k)^dag`` (or mirrored for ``side='A'``)."""
    side = check_side(side)
    if not ch.trace_preserving and not allow_non_trace_preserving:
        raise NonTracePreservingError(
            f"channel is not trace preserving (completeness error {ch.completeness_error:.3e}); "
            "pass allow_non_trace_preserving=True to apply it anyway"
        )
    dA, dB = rho.dims
    target = dA if side == "A" else dB
    if ch.dim != target:
        raise DimensionMismatchError(f"channel acts on {ch.dim} levels, side {side} has {target}")
    out_rows = ch.operators[0].shape[0]
    t = rho.matrix.reshape(dA, dB, dA, dB)
    acc = 0
    for M in ch.operators:
        if side == "B":
            acc = acc + np.einsum("ij,ajbk,lk->aibl", M, t, M.conj())
        else:
            acc = acc + np.einsum("ij,jakb,lk->ialb", M, t, M.conj())
    new_dims = (dA, out_rows) if side == "B" else (out_rows, dB)
    n = new_dims[0] * new_dims[1]
    return DensityMatrix(acc.reshape(n, n), new_dims)


class OneSidedChannel(TransformerMixin, BaseEstimator):
    """Transformer applying a Kraus channel to one subsystem.

    ``fit`` validates the operators (``channel_``); ``transform`` maps a
    state or a sequence of states through the channel.
    """

    def __init__(self, operators=None, side="B", allow_non_trace_preserving=False):
        self.operators = operators
        self.side = side
        self.allow_non_trace_preserving = allow_non_trace_preserving

    def fit(self, X=None, y=None):
        ops = self.operators if self.operators is not None else block_swap_channel().operators
        self.channel_ = make_channel(ops)
        return self

    def transform(self, X):
        if isinstance(X, DensityMatrix):
            return apply_one_sided(self.channel_, X, self.side, self.allow_non_trace_preserving)
        return [apply_one_sided(self.channel_, r, self.side, self.allow_non_trace_preserving) for r in X]


def teleport_usability(rho: DensityMatrix, n_inputs: int = 5, rng=0) -> float | None:
    """Worst corrected teleportation fidelity with ``rho`` as the resource.

    The smaller subsystem goes to the receiver. Returns ``None`` unless
    the sender's dimension is ``d`` or ``2d`` for receiver dimension ``d``.
    """
    dA, dB = rho.dims
    resource = rho if dA >= dB else swap_subsystems(rho)
    D, d = resource.dims
    if D not in (d, 2 * d) or d < 2:
        return None
    rng = check_random_state(rng)
    worst = 1.0
    for _ in range(n_inputs):
        psi = random_pure_state((d, 1), rng)
        for o in simulate_teleport(resource, psi):
            if o.probability > 1e-12:
                worst = min(worst, o.fidelity_after_correction)
    return worst


@dataclass
class EvolutionReport:
    negativity_before: float
    negativity_after: float
    mmes_before: MmesCertificate
    mmes_after: MmesCertificate
    teleport_fidelity_before: float | None
    teleport_fidelity_after: float | None
    output: DensityMatrix = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "negativity_before": self.negativity_before,
            "negativity_after": self.negativity_after,
            "mmes_before": self.mmes_before.to_dict(),
            "mmes_after": self.mmes_after.to_dict(),
            "teleport_fidelity_before": self.teleport_fidelity_before,
            "teleport_fidelity_after": self.teleport_fidelity_after,
        }


def evolution_report(
    ch: KrausChannel,
    rho: DensityMatrix,
    side="B",
    small_side="A",
    tol: float = 1e-8,
    n_inputs: int = 5,
    rng=0,
) -> EvolutionReport:
    """Entanglement before and after sending one half through ``ch``."""
    check_density_matrix(rho)
    out = apply_one_sided(ch, rho, side)
    return EvolutionReport(
        negativity(rho),
        negativity(out),
        is_mmes(rho, small_side, tol),
        is_mmes(out, small_side, tol),
        teleport_usability(rho, n_inputs, rng),
        teleport_usability(out, n_inputs, rng),
        out,
    )


@dataclass(frozen=True)
class XxzParams:
    J: float
    Delta: float
    s1: float = 0.5
    s2: float = 1.5

    @property
    def antiferromagnetic_regime(self) -> bool:
        """``Delta >= J > 0``."""
        return self.Delta >= self.J > 0


def spin_matrices(s: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(Sx, Sy, Sz)`` in the basis ``m = s, s-1, ..., -s`` (hbar = 1)."""
    n = int(round(2 * s)) + 1
    if n < 1 or abs((n - 1) / 2 - s) > 1e-12:
        raise ValueError(f"spin must be a non-negative half-integer, got {s!r}")
    m = s - np.arange(n)
    Sz = np.diag(m).astype(complex)
    Sp = np.zeros((n, n), dtype=complex)
    # S+|m> = sqrt(s(s+1) - m(m+1)) |m+1>; |m+1> sits one row above |m>
    for k in range(1, n):
        Sp[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    Sm = Sp.conj().T
    return (Sp + Sm) / 2, (Sp - Sm) / 2j, Sz


def xxz_hamiltonian(params: XxzParams) -> np.ndarray:
    x1, y1, z1 = spin_matrices(params.s1)
    x2, y2, z2 = spin_matrices(params.s2)
    return params.J * (np.kron(x1, x2) + np.kron(y1, y2)) + params.Delta * np.kron(z1, z2)


@dataclass
class XxzGroundState:
    energy: float
    degeneracy: int
    states: list[PureState] = field(repr=False)
    magnetizations: list[float]
    eof_of_first: float
    spectrum: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "degeneracy": self.degeneracy,
            "magnetizations": self.magnetizations,
            "eof_of_first": self.eof_of_first,
            "spectrum": [float(x) for x in self.spectrum],
        }


def xxz_ground_state(params: XxzParams, degeneracy_tol: float = 1e-9) -> XxzGroundState:
    """Exact diagonalization of the two-spin XXZ Hamiltonian.

    The Hamiltonian conserves total ``S^z``, so each magnetization sector
    is diagonalized separately and every returned ground state has a
    definite magnetization. Ground states are ordered by energy, then by
    magnetization.
    """
    H = xxz_hamiltonian(params)
    n1, n2 = int(round(2 * params.s1)) + 1, int(round(2 * params.s2)) + 1
    mz = np.add.outer(params.s1 - np.arange(n1), params.s2 - np.arange(n2)).reshape(-1)
    levels = []
    for M in np.unique(np.round(mz * 2) / 2):
        sector = np.flatnonzero(np.abs(mz - M) < 1e-9)
        vals, vecs = np.linalg.eigh(H[np.ix_(sector, sector)])
        for e, v in zip(vals, vecs.T):
            full = np.zeros(n1 * n2, dtype=complex)
            full[sector] = v
            levels.append((float(e), float(M), full))
    levels.sort(key=lambda lv: (lv[0], lv[1]))
    e0 = levels[0][0]
    ground = [lv for lv in levels if lv[0] - e0 <= degeneracy_tol]
    states = [PureState(v, (n1, n2)) for _, _, v in ground]
    return XxzGroundState(
        energy=e0,
        degeneracy=len(ground),
        states=states,
        magnetizations=[m for _, m, _ in ground],
        eof_of_first=eof_pure(states[0]),
        spectrum=np.array([lv[0] for lv in levels]),
    )
