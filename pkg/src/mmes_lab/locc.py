"""Single-setting LOCC discrimination of the states ``chi_st``.

``chi_st`` is the equal mixture of the two generalized Bell states with
Weyl label ``(s, t)``. Alice holds the ``d``-level half and Bob the
``2d``-level half. A measurement setting is a pair of local unitaries
applied before both parties measure in the computational basis. A set of
candidates is perfectly distinguishable by a setting when their outcome
supports are pairwise disjoint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .qmat import DensityMatrix
from .validation import check_random_state
from .weyl import WeylIndex, bell_seed, generalized_bell, weyl_unitary

__all__ = [
    "MeasurementSetting",
    "DiscriminationProtocol",
    "NoPerfectSettingError",
    "NonPrimeDimensionError",
    "CONVENTIONS",
    "DEFAULT_CONVENTION",
    "is_prime",
    "gen_hadamard",
    "hadamard_prime",
    "chi_state",
    "ricochet_check",
    "measurement_settings",
    "outcome_distribution",
    "discriminate",
    "sample_run",
    "ScanReport",
    "scan_subsets",
    "LoccDiscriminator",
]

SUPPORT_ATOL = 1e-12

CONVENTIONS = {
    "plain": lambda m: m,
    "conj": np.conj,
    "transpose": lambda m: m.T,
    "adjoint": lambda m: m.conj().T,
}
# Alice applies H_a, Bob applies (H_a (+) H_a)^*.
DEFAULT_CONVENTION = ("plain", "conj")


class NonPrimeDimensionError(ValueError):
    pass


class NoPerfectSettingError(ValueError):
    """No single setting separates every pair of candidates.

    ``witness`` holds the setting label with the smallest worst-pair
    overlap and that overlap.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n**0.5) + 1))


def gen_hadamard(alpha: int, d: int) -> np.ndarray:
    """``(H_alpha)_jk = omega^(-j k - alpha T(k)) / sqrt d``.

    ``T(k) = sum_{i=k}^{d} i = (d + k)(d - k + 1) / 2`` with 0-based ``k``
    and ``omega = exp(-2 pi i / d)``.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    j = np.arange(d)[:, None]
    k = np.arange(d)[None, :]
    T = (d + k) * (d - k + 1) // 2
    exponent = (-j * k - alpha * T) % d
    return np.exp(-2j * np.pi * exponent / d) / np.sqrt(d)


def hadamard_prime(alpha: int, d: int) -> np.ndarray:
    """``H_alpha (+) H_alpha`` acting on ``2d`` levels."""
    return np.kron(np.eye(2), gen_hadamard(alpha, d))


def chi_state(idx: WeylIndex) -> DensityMatrix:
    idx = WeylIndex(*idx).validate()
    return DensityMatrix.mixture([0.5, 0.5], [generalized_bell(idx, f).state for f in (1, 2)])


def ricochet_check(
    j: int, s: int, t: int, family: int, d: int, form: str = "seed", transpose: bool = True
) -> float:
    """Norm of ``(I (x) H'_j)|Phi^f_st>`` minus its Alice-side counterpart.

    ``form="seed"`` moves ``H_j^T`` through the unrotated seed state:
    ``(U_st H_j^T (x) I)|Phi^f_00>``. This holds for every index.
    ``form="literal"`` uses ``(H_j^T (x) I)|Phi^f_st>``. That only agrees
    when ``H_j^T`` commutes with ``U_st``. ``transpose=False`` drops the
    transposition, as a negative control.
    """
    idx = WeylIndex(s, t, d).validate()
    H = gen_hadamard(j, d)
    A_op = H.T if transpose else H
    state = generalized_bell(idx, family).state.amplitudes
    lhs = np.kron(np.eye(d), hadamard_prime(j, d)) @ state
    if form == "seed":
        seed = bell_seed(d, family).reshape(-1)
        rhs = np.kron(weyl_unitary(idx) @ A_op, np.eye(2 * d)) @ seed
    elif form == "literal":
        rhs = np.kron(A_op, np.eye(2 * d)) @ state
    else:
        raise ValueError(f"unknown form {form!r}")
    return float(np.linalg.norm(lhs - rhs))


@dataclass(frozen=True, eq=False)
class MeasurementSetting:
    label: str
    alice_transform: np.ndarray = field(repr=False)
    bob_transform: np.ndarray = field(repr=False)


def measurement_settings(d: int, convention=DEFAULT_CONVENTION) -> list[MeasurementSetting]:
    """Computational setting followed by ``hadamard(alpha)`` for ``alpha < d``."""
    fa, fb = (CONVENTIONS[c] for c in convention)
    out = [MeasurementSetting("computational", np.eye(d, dtype=complex), np.eye(2 * d, dtype=complex))]
    for a in range(d):
        out.append(MeasurementSetting(f"hadamard({a})", fa(gen_hadamard(a, d)), fb(hadamard_prime(a, d))))
    return out


def outcome_distribution(setting: MeasurementSetting, idx: WeylIndex) -> np.ndarray:
    """``P(a, b)`` for ``chi_st`` under ``setting``, shape ``(d, 2d)``."""
    s, t, d = WeylIndex(*idx).validate()
    U = weyl_unitary(WeylIndex(s, t, d))
    p = np.zeros((d, 2 * d))
    for family in (1, 2):
        amp = setting.alice_transform @ U @ bell_seed(d, family) @ setting.bob_transform.T
        p += 0.5 * np.abs(amp) ** 2
    return p


@lru_cache(maxsize=64)
def _distribution_table(d: int, convention: tuple[str, str]):
    settings = measurement_settings(d, convention)
    table = np.array(
        [[outcome_distribution(st, WeylIndex(s, t, d)) for s in range(d) for t in range(d)] for st in settings]
    )
    table.setflags(write=False)
    return settings, table


@dataclass(frozen=True, eq=False)
class DiscriminationProtocol:
    setting: MeasurementSetting
    candidates: tuple[WeylIndex, ...]
    lookup: dict = field(repr=False)
    success_probability: float
    distributions: np.ndarray = field(repr=False)

    def guess(self, a: int, b: int) -> int:
        """Candidate index for the joint outcome, or -1 if unassigned."""
        return self.lookup.get((int(a), int(b)), -1)

    def guess_table(self) -> np.ndarray:
        """``lookup`` as a dense ``(n_alice, n_bob)`` array, -1 where unassigned."""
        table = np.full(self.distributions.shape[1:], -1, dtype=int)
        for (a, b), ci in self.lookup.items():
            table[a, b] = ci
        return table


def _as_index(c, d: int) -> WeylIndex:
    idx = WeylIndex(*c) if len(c) == 3 else WeylIndex(int(c[0]), int(c[1]), d)
    if idx.d != d:
        raise ValueError(f"candidate {tuple(idx)} does not live in dimension {d}")
    return idx.validate()


def _pair_overlap(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.minimum(p, q).sum())


def discriminate(candidates, d: int, convention=DEFAULT_CONVENTION) -> DiscriminationProtocol:
    """First setting whose candidate outcome supports are pairwise disjoint.

    Raises :class:`NoPerfectSettingError` (with the least-overlapping
    setting as witness) if none exists.
    """
    if not is_prime(d):
        raise NonPrimeDimensionError(f"d={d} is not prime")
    cands = tuple(_as_index(c, d) for c in candidates)
    if len(set(cands)) != len(cands):
        raise ValueError("candidates must be distinct")
    settings, table = _distribution_table(d, tuple(convention))
    rows = [c.s * d + c.t for c in cands]
    best = None
    for setting, dist in zip(settings, table):
        dists = dist[rows]
        supports = dists > SUPPORT_ATOL
        clash = supports.sum(axis=0) > 1
        if not clash.any():
            lookup = {}
            for ci, sup in enumerate(supports):
                for a, b in zip(*np.nonzero(sup)):
                    lookup[(int(a), int(b))] = ci
            return DiscriminationProtocol(setting, cands, lookup, 1.0, dists)
        worst = max(
            (_pair_overlap(dists[x], dists[y]) for x, y in itertools.combinations(range(len(cands)), 2)),
            default=0.0,
        )
        if best is None or worst < best[1]:
            best = (setting.label, worst)
    raise NoPerfectSettingError(
        f"no single setting separates {[tuple(c[:2]) for c in cands]} (best {best[0]}, overlap {best[1]:.3g})",
        witness=best,
    )


def sample_run(
    protocol: DiscriminationProtocol, secret, trials: int = 1000, rng=None, return_outcomes: bool = False
):
    """Monte-Carlo success rate of ``protocol`` when the shared state is ``secret``."""
    secret = _as_index(secret, protocol.candidates[0].d)
    if secret not in protocol.candidates:
        raise ValueError(f"secret {tuple(secret)} is not among the candidates")
    rng = check_random_state(rng)
    k = protocol.candidates.index(secret)
    p = protocol.distributions[k].reshape(-1)
    nb = protocol.distributions.shape[2]
    flat = rng.choice(p.size, size=trials, p=p / p.sum())
    outcomes = np.stack(np.divmod(flat, nb), axis=1)
    guesses = protocol.guess_table()[outcomes[:, 0], outcomes[:, 1]]
    rate = float(np.mean(guesses == k))
    return (rate, outcomes) if return_outcomes else rate


@dataclass
class ScanReport:
    d: int
    max_size: int
    n_subsets: int
    failures: list = field(default_factory=list)
    settings_used: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures


def scan_subsets(d: int, max_size: int | None = None, convention=DEFAULT_CONVENTION) -> ScanReport:
    """Run :func:`discriminate` on every candidate subset of size ``2..max_size``.

    By default ``max_size`` is the largest ``l`` with ``l (l - 1) / 2 <= d``.
    """
    if max_size is None:
        max_size = max(l for l in range(1, d * d + 1) if l * (l - 1) // 2 <= d)
    labels = [WeylIndex(s, t, d) for s in range(d) for t in range(d)]
    report = ScanReport(d, max_size, 0)
    for l in range(2, max_size + 1):
        for subset in itertools.combinations(labels, l):
            report.n_subsets += 1
            try:
                proto = discriminate(subset, d, convention)
            except NoPerfectSettingError:
                report.failures.append(tuple(tuple(c[:2]) for c in subset))
                continue
            label = proto.setting.label
            report.settings_used[label] = report.settings_used.get(label, 0) + 1
    return report


class LoccDiscriminator(ClassifierMixin, BaseEstimator):
    """Classifier that maps joint outcomes ``(a, b)`` to candidate labels.

    ``fit(candidates)`` finds a perfect single-setting protocol;
    ``predict`` takes an ``(n, 2)`` array of outcomes and returns candidate
    indices (``-1`` for outcomes no candidate produces).
    """

    def __init__(self, d=2, convention=DEFAULT_CONVENTION):
        self.d = d
        self.convention = convention

    def fit(self, X, y=None):
        self.protocol_ = discriminate(X, self.d, self.convention)
        self.classes_ = np.arange(len(self.protocol_.candidates))
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=int).reshape(-1, 2)
        return self.protocol_.guess_table()[X[:, 0], X[:, 1]]

    def sample(self, secret, n: int, rng=None) -> np.ndarray:
        _, outcomes = sample_run(self.protocol_, secret, n, rng, return_outcomes=True)
        return outcomes
