import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mmes_lab.channels import (
    NonTracePreservingError,
    OneSidedChannel,
    XxzParams,
    apply_one_sided,
    block_swap_channel,
    block_swap_permutation,
    evolution_report,
    make_channel,
    spin_matrices,
    teleport_usability,
    xxz_ground_state,
    xxz_hamiltonian,
)
from mmes_lab.measures import negativity
from mmes_lab.mmes import is_mmes, two_block_mixture
from mmes_lab.qmat import DensityMatrix, maximally_entangled, random_density_matrix
from mmes_lab.validation import DimensionMismatchError

seed_st = st.integers(0, 2**32 - 1)


def kron_apply(ops, rho, side):
    dA, dB = rho.dims
    out = 0
    for M in ops:
        L = np.kron(np.eye(dA), M) if side == "B" else np.kron(M, np.eye(dB))
        out = out + L @ rho.matrix @ L.conj().T
    return out


def test_permutation():
    P = block_swap_permutation()
    e = np.eye(4)
    for src, dst in ((2, 0), (3, 1), (1, 3), (0, 2)):
        np.testing.assert_array_equal(P @ e[:, src], e[:, dst])
    np.testing.assert_array_equal(P @ P, e)


def test_corrected_channel_trace_preserving():
    ch = block_swap_channel()
    assert ch.trace_preserving
    assert ch.completeness_error < 1e-10


def test_literal_channel_is_not_trace_preserving():
    ch = block_swap_channel(0.5)
    assert not ch.trace_preserving
    assert ch.completeness_error == pytest.approx(0.5)
    with pytest.raises(NonTracePreservingError):
        apply_one_sided(ch, two_block_mixture(0.3))
    out = apply_one_sided(ch, two_block_mixture(0.3), allow_non_trace_preserving=True)
    assert np.trace(out.matrix).real == pytest.approx(0.5)


@given(seed_st, st.sampled_from("AB"))
def test_apply_matches_kron_oracle(seed, side):
    rng = np.random.default_rng(seed)
    dims = (4, 3) if side == "A" else (3, 4)
    rho = random_density_matrix(dims, rng)
    ch = block_swap_channel()
    out = apply_one_sided(ch, rho, side)
    np.testing.assert_allclose(out.matrix, kron_apply(ch.operators, rho, side), atol=1e-12)
    assert np.trace(out.matrix).real == pytest.approx(1)
    assert np.linalg.eigvalsh(out.matrix).min() > -1e-12


def test_completely_positive_via_choi():
    ch = block_swap_channel()
    phi = maximally_entangled(4).density()
    choi = apply_one_sided(ch, phi, "B").matrix
    assert np.linalg.eigvalsh(choi).min() > -1e-12


@pytest.mark.parametrize("p", [0, 0.25, 0.5, 0.75, 1])
def test_mixture_stays_mmes(p):
    out = apply_one_sided(block_swap_channel(), two_block_mixture(p), "B")
    assert is_mmes(out, "A", 1e-8).verdict
    assert negativity(out) == pytest.approx(0.5, abs=1e-8)


def test_negativity_drop_on_4x4():
    phi = maximally_entangled(4).density()
    out = apply_one_sided(block_swap_channel(), phi, "B")
    assert negativity(phi) == pytest.approx(1.5)
    assert negativity(out) == pytest.approx(0.5, abs=1e-12)
    # output is an equal mixture of two orthogonal maximally entangled
    # 4 x 4 states, not maximally entangled itself
    assert not is_mmes(out).verdict


def test_dimension_checks():
    with pytest.raises(DimensionMismatchError):
        apply_one_sided(block_swap_channel(), random_density_matrix((4, 2), 0), "B")
    with pytest.raises(DimensionMismatchError):
        make_channel([np.eye(2), np.eye(3)])
    with pytest.raises(ValueError):
        make_channel([])


def test_evolution_report():
    rep = evolution_report(block_swap_channel(), two_block_mixture(0.3))
    assert rep.mmes_before.verdict and rep.mmes_after.verdict
    assert rep.teleport_fidelity_before == pytest.approx(1)
    assert rep.teleport_fidelity_after == pytest.approx(1)
    assert teleport_usability(random_density_matrix((3, 5), 0)) is None


def test_one_sided_estimator():
    est = OneSidedChannel(side="B").fit()
    out = est.transform(two_block_mixture(0.2))
    assert isinstance(out, DensityMatrix)
    assert len(est.transform([two_block_mixture(0.2), two_block_mixture(0.9)])) == 2
    assert est.get_params()["side"] == "B"
    literal = OneSidedChannel(operators=block_swap_channel(0.5).operators).fit()
    with pytest.raises(NonTracePreservingError):
        literal.transform(two_block_mixture(0.2))


@pytest.mark.parametrize("s", [0.5, 1.0, 1.5])
def test_spin_algebra(s):
    x, y, z = spin_matrices(s)
    np.testing.assert_allclose(x @ y - y @ x, 1j * z, atol=1e-12)
    n = x.shape[0]
    np.testing.assert_allclose(x @ x + y @ y + z @ z, s * (s + 1) * np.eye(n), atol=1e-12)


def test_spin_rejects_non_half_integer():
    with pytest.raises(ValueError):
        spin_matrices(0.3)


def test_heisenberg_point():
    # S1.S2 = (S^2 - S1^2 - S2^2)/2; the S=1 triplet has energy -5/4.
    gs = xxz_ground_state(XxzParams(1.0, 1.0))
    assert gs.energy == pytest.approx(-1.25, abs=1e-9)
    assert gs.degeneracy == 3
    assert gs.magnetizations == [-1.0, 0.0, 1.0]
    spec = np.sort(gs.spectrum)
    np.testing.assert_allclose(spec, [-1.25] * 3 + [0.75] * 5, atol=1e-12)


@given(st.floats(0.1, 3), st.floats(0.1, 6))
def test_xxz_matches_closed_form(J, Delta):
    # In the M = +-1 sectors the 2x2 block has eigenvalues
    # -Delta/4 +- sqrt(Delta^2/4 + 3 J^2/4).
    params = XxzParams(J, Delta)
    gs = xxz_ground_state(params)
    low = -Delta / 4 - np.sqrt(Delta**2 / 4 + 3 * J**2 / 4)
    full = np.linalg.eigvalsh(xxz_hamiltonian(params))
    assert gs.energy == pytest.approx(full.min(), abs=1e-9)
    assert gs.energy <= low + 1e-9
    np.testing.assert_allclose(np.sort(gs.spectrum), full, atol=1e-9)
    for psi in gs.states:
        np.testing.assert_allclose(
            xxz_hamiltonian(params) @ psi.amplitudes, gs.energy * psi.amplitudes, atol=1e-9
        )


def test_xxz_anisotropic_ground_doublet():
    gs = xxz_ground_state(XxzParams(1.0, 4.0))
    assert gs.energy == pytest.approx(-1 - np.sqrt(4.75))
    assert gs.degeneracy == 2
    assert gs.magnetizations == [-1.0, 1.0]


def test_xxz_ising_limit_is_product():
    gs = xxz_ground_state(XxzParams(1e-9, 1.0))
    assert gs.energy == pytest.approx(-0.75, abs=1e-8)
    assert gs.eof_of_first < 1e-6
    assert XxzParams(1e-9, 1.0).antiferromagnetic_regime
    assert not XxzParams(1.0, 0.5).antiferromagnetic_regime
