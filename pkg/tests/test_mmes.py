import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mmes_lab.measures import eof_pure
from mmes_lab.mmes import (
    MmesCertifier,
    MmesSpec,
    MmesSpecError,
    construct_mmes,
    decomposition_audit,
    decomposition_from_unitary,
    example_2x4_state,
    is_mmes,
    random_mmes_spec,
    two_block_mixture,
)
from mmes_lab.qmat import DensityMatrix, PureState, haar_random_unitary, maximally_entangled, swap_subsystems

seed_st = st.integers(0, 2**32 - 1)


def random_me_mixture(d, k, rng):
    """Mixture of ``k`` maximally entangled states on ``d (x) d``."""
    phi = maximally_entangled(d).amplitudes
    states = [PureState(np.kron(np.eye(d), haar_random_unitary(d, rng)) @ phi, (d, d)) for _ in range(k)]
    return DensityMatrix.mixture(rng.dirichlet(np.ones(k)), states)


def test_example_2x4():
    rho = example_2x4_state()
    assert rho.dims == (2, 4)
    expected = np.zeros((8, 8))
    for u in ([0, 5], [2, 7]):  # |00>+|11> and |02>+|13>
        v = np.zeros(8)
        v[u] = 1 / np.sqrt(2)
        expected += 0.5 * np.outer(v, v)
    np.testing.assert_allclose(rho.matrix, expected, atol=1e-15)
    cert = is_mmes(rho, "A", 1e-8)
    assert cert.verdict and cert.rank == 2 and cert.capacity_ok
    assert cert.eigenvalues == pytest.approx([0.5, 0.5])


@given(st.sampled_from([2, 3]), st.sampled_from([1, 2]), seed_st)
def test_random_constructions_certify(d, k, seed):
    spec = random_mmes_spec(d, k, rng=seed)
    rho = construct_mmes(spec)
    cert = is_mmes(rho, "A")
    assert cert.verdict
    assert cert.rank == k
    swapped = is_mmes(swap_subsystems(rho), "B")
    assert swapped.verdict and swapped.rank == k


@given(st.sampled_from([2, 3]), st.integers(2, 4), seed_st)
def test_square_mixtures_fail(d, k, seed):
    cert = is_mmes(random_me_mixture(d, k, np.random.default_rng(seed)), "A")
    assert not cert.verdict
    assert not cert.capacity_ok or cert.rank < k


@given(st.sampled_from([2, 3]), seed_st)
def test_every_range_vector_is_maximally_entangled(d, seed):
    rng = np.random.default_rng(seed)
    rho = construct_mmes(random_mmes_spec(d, 2, d_prime=2 * d + 1, rng=rng))
    vals, vecs = np.linalg.eigh(rho.matrix)
    basis = vecs[:, vals > 1e-10]
    c = rng.standard_normal(basis.shape[1]) + 1j * rng.standard_normal(basis.shape[1])
    psi = PureState(basis @ c / np.linalg.norm(c), rho.dims)
    assert eof_pure(psi) == pytest.approx(np.log2(d), abs=1e-9)


def test_verdict_independent_of_degenerate_basis(rng):
    # Equal weights make the range fully degenerate; a rotated
    # eigenbasis gives the same matrix and therefore the same verdict.
    rho = example_2x4_state()
    vals, vecs = np.linalg.eigh(rho.matrix)
    basis = vecs[:, vals > 1e-10] @ haar_random_unitary(2, rng)
    rebuilt = DensityMatrix(0.5 * basis @ basis.conj().T, (2, 4))
    assert is_mmes(rebuilt).verdict


def test_overlapping_families_fail():
    # Two Bell states sharing the large-side support: not an MMES.
    a = PureState(np.array([1, 0, 0, 0, 0, 1, 0, 0]) / np.sqrt(2), (2, 4))
    b = PureState(np.array([1, 0, 0, 0, 0, -1, 0, 0]) / np.sqrt(2), (2, 4))
    cert = is_mmes(DensityMatrix.mixture([0.5, 0.5], [a, b]))
    assert not cert.verdict
    assert cert.worst_schmidt_deviation > 0.1


def test_product_state_fails():
    rho = PureState(np.eye(8)[0], (2, 4)).density()
    cert = is_mmes(rho)
    assert not cert.verdict
    # coefficients (1, 0): the zero one is furthest from 1/sqrt 2
    assert cert.worst_schmidt_deviation == pytest.approx(1 / np.sqrt(2))


def test_wrong_small_side_fails():
    assert not is_mmes(example_2x4_state(), "B").verdict


@pytest.mark.parametrize("p", [0, 0.25, 0.5, 0.75, 1])
def test_two_block_mixture(p):
    rho = two_block_mixture(p)
    cert = is_mmes(rho)
    assert cert.verdict
    assert cert.rank == (1 if p in (0, 1) else 2)


def test_mmes_spec_rejects_bad_input():
    eye4 = np.eye(4)
    with pytest.raises(MmesSpecError):
        construct_mmes(MmesSpec(2, (0.25, 0.25), (eye4[:, :2], eye4[:, 2:])))
    with pytest.raises(MmesSpecError):
        construct_mmes(MmesSpec(2, (0.5, 0.5), (eye4[:, :2], eye4[:, 1:3])))
    with pytest.raises(MmesSpecError):
        construct_mmes(MmesSpec(2, (0.5, 0.5), (np.eye(3)[:, :2], np.eye(3)[:, 1:])))
    with pytest.raises(MmesSpecError):
        construct_mmes(MmesSpec(2, (1.0, 0.0), (eye4[:, :2], eye4[:, 2:])))
    with pytest.raises(ValueError):
        two_block_mixture(1.5)


def test_decomposition_reproduces_state(rng):
    rho = construct_mmes(random_mmes_spec(3, 2, rng=rng))
    weights, states = decomposition_from_unitary(rho, haar_random_unitary(4, rng))
    rebuilt = sum(w * s.density().matrix for w, s in zip(weights, states))
    np.testing.assert_allclose(rebuilt, rho.matrix, atol=1e-12)
    assert weights.sum() == pytest.approx(1)
    with pytest.raises(ValueError):
        decomposition_from_unitary(rho, np.eye(1))


def test_audit_2x4():
    report = decomposition_audit(example_2x4_state(), "A", trials=100, rng=0)
    assert report.n_elements == 200
    assert report.all_maximal(1e-8)
    wide = decomposition_audit(example_2x4_state(), "A", trials=20, rng=1, size=5)
    assert wide.all_maximal(1e-8)


def test_audit_detects_non_mmes(rng):
    report = decomposition_audit(random_me_mixture(2, 3, rng), "A", trials=20, rng=rng)
    assert report.min_eof < 0.99


def test_certifier_estimator():
    clf = MmesCertifier(tol=1e-8)
    assert clf.get_params() == {"small_side": "A", "tol": 1e-8, "rank_cutoff": 1e-10}
    clf.fit(example_2x4_state())
    assert clf.verdict_
    states = [example_2x4_state(), random_me_mixture(2, 2, np.random.default_rng(0))]
    np.testing.assert_array_equal(clf.predict(states), [True, False])
    assert clf.score(states, [True, False]) == 1.0
