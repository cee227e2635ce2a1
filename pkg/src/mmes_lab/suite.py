"""Invariant suite behind ``mmes-lab verify``.

Each check returns a :class:`Verdict` carrying the worst numeric
deviation it saw, so a failing run can be diagnosed from the report alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import XxzParams, apply_one_sided, block_swap_channel, xxz_ground_state
from .locc import is_prime, ricochet_check, scan_subsets
from .measures import fully_entangled_fraction, negativity
from .mmes import decomposition_audit, example_2x4_state, is_mmes, two_block_mixture
from .qmat import DensityMatrix, maximally_entangled, random_pure_state
from .teleport import mixed_output, simulate_mmes_teleport
from .validation import check_random_state
from .weyl import bell_basis, verify_unitary_basis

__all__ = ["Verdict", "run_suite"]


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    witness: float

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "witness": self.witness}


def _max_dev(passed_if_below: float, value: float, name: str) -> Verdict:
    return Verdict(name, bool(value <= passed_if_below), float(value))


def _per_dimension(d: int, tol: float, rng) -> list[Verdict]:
    out = []
    report = verify_unitary_basis(d, rng=rng)
    out.append(_max_dev(1e-10, max(report.max_orthogonality_error, report.max_unitarity_error,
                                   report.max_expansion_error), f"d={d}:unitary_basis"))

    vecs = np.array([b.state.amplitudes for b in bell_basis(d)])
    completeness = np.abs(vecs.T @ vecs.conj() - np.eye(2 * d * d)).max()
    out.append(_max_dev(1e-10, completeness, f"d={d}:bell_completeness"))

    worst_fid, worst_prob, worst_mix = 0.0, 0.0, 0.0
    for _ in range(5):
        psi = random_pure_state((d, 1), rng)
        outcomes = simulate_mmes_teleport(psi)
        worst_fid = max(worst_fid, max(1 - o.fidelity_after_correction for o in outcomes))
        worst_prob = max(worst_prob, max(abs(o.probability - 1 / (2 * d * d)) for o in outcomes))
        target = np.outer(psi.amplitudes, psi.amplitudes.conj())
        worst_mix = max(worst_mix, float(np.abs(mixed_output(outcomes) - target).max()))
    out.append(_max_dev(1e-9, worst_fid, f"d={d}:teleport_fidelity"))
    out.append(_max_dev(1e-10, worst_prob, f"d={d}:teleport_uniform_probabilities"))
    out.append(_max_dev(1e-10, worst_mix, f"d={d}:teleport_record_discarded"))

    worst_rico = max(
        ricochet_check(j, s, t, f, d) for j in range(d) for s in range(d) for t in range(d) for f in (1, 2)
    )
    out.append(_max_dev(1e-10, worst_rico, f"d={d}:ricochet"))

    if is_prime(d):
        scan = scan_subsets(d)
        out.append(Verdict(f"d={d}:locc_scan", scan.passed, float(len(scan.failures))))

    phi = maximally_entangled(d).density()
    fef = fully_entangled_fraction(phi, restarts=4, rng=rng).value
    out.append(_max_dev(1e-6, abs(fef - 1), f"d={d}:fef_pure"))
    mixed = DensityMatrix(np.eye(d * d) / d**2, (d, d))
    fef = fully_entangled_fraction(mixed, restarts=4, rng=rng).value
    out.append(_max_dev(1e-10, abs(fef - 1 / d**2), f"d={d}:fef_maximally_mixed"))
    return out


def _global(tol: float, rng, kraus_coefficient: float) -> list[Verdict]:
    out = []
    ex = example_2x4_state()
    cert = is_mmes(ex, "A", tol)
    out.append(Verdict("example_2x4:is_mmes", cert.verdict and cert.rank == 2,
                       max(cert.worst_schmidt_deviation, cert.worst_cross_trace_norm,
                           cert.reduced_small_side_deviation)))
    audit = decomposition_audit(ex, "A", trials=100, rng=rng)
    out.append(_max_dev(1e-8, max(abs(audit.min_eof - 1), abs(audit.max_eof - 1)), "example_2x4:audit"))

    ch = block_swap_channel(kraus_coefficient)
    out.append(_max_dev(1e-10, ch.completeness_error, "channel:trace_preserving"))
    if ch.trace_preserving:
        worst = 0.0
        for p in (0, 0.25, 0.5, 0.75, 1):
            after = apply_one_sided(ch, two_block_mixture(p), "B")
            c = is_mmes(after, "A", tol)
            dev = 0.0 if c.verdict else 1.0
            worst = max(worst, dev, abs(negativity(after) - 0.5))
        out.append(_max_dev(1e-8, worst, "channel:mmes_preserved"))
        phi4 = maximally_entangled(4).density()
        drop = negativity(phi4) - negativity(apply_one_sided(ch, phi4, "B"))
        out.append(Verdict("channel:negativity_drop", bool(drop >= 0.1), float(drop)))

    gs = xxz_ground_state(XxzParams(1.0, 1.0))
    ok = abs(gs.energy + 1.25) <= 1e-9 and gs.degeneracy == 3
    out.append(Verdict("xxz:heisenberg_ground", ok, abs(gs.energy + 1.25)))
    return out


def run_suite(ds=(2, 3, 5), tol: float = 1e-8, seed=0, kraus_coefficient: float = 1 / math.sqrt(2)) -> list[Verdict]:
    rng = check_random_state(seed)
    verdicts = []
    for d in ds:
        verdicts.extend(_per_dimension(int(d), tol, rng))
    verdicts.extend(_global(tol, rng, kraus_coefficient))
    return verdicts
