import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from witnesskit.bell import DirectionSet, chsh_witness
from witnesskit.sampling import random_local_unitary, random_pure, random_separable, substreams
from witnesskit.states import (
    isotropic,
    maximally_entangled,
    product_state,
    shifts_state,
    shifts_vectors,
    singlet,
    two_qubit_theta,
)
from witnesskit.tensor import Bipartition, DensityMatrix, PureState, kron, schmidt
from witnesskit.witness import (
    INDECOMPOSABLE,
    MeasurementPlan,
    Witness,
    WitnessError,
    evaluate,
    indecomposable_witness,
    kernel_seed_witness,
    low_dim_optimal_witness,
    pauli_decompose,
    product_infimum,
    pure_state_witness,
    robustness_radius,
    sampled_product_minimum,
    seesaw_run,
)


def test_witness_validation():
    with pytest.raises(WitnessError):
        Witness(np.eye(4), (2, 2), None, "decomposable")  # trace 4
    with pytest.raises(WitnessError):
        Witness(np.array([[0, 1], [0, 1]]), (2,), None, "decomposable")
    w = Witness(np.eye(4) / 4, (2, 2), None, "decomposable")
    assert evaluate(w, DensityMatrix(np.eye(4) / 4, (2, 2))) == pytest.approx(0.25)
    with pytest.raises(WitnessError):
        evaluate(w, DensityMatrix(np.eye(3) / 3, (3,)))


def test_pure_witness_for_product_state_fails():
    with pytest.raises(WitnessError, match="no witness exists"):
        pure_state_witness(product_state((2, 2)))


def test_maximally_entangled_three():
    w, mu = pure_state_witness(maximally_entangled(3))
    assert mu == pytest.approx(-1 / 3, abs=1e-12)
    assert evaluate(w, maximally_entangled(3)) == pytest.approx(-1 / 3, abs=1e-12)


def test_tied_pairs_give_equal_values():
    psi = maximally_entangled(3)
    dec = schmidt(psi)
    values = []
    for i, j in [(0, 1), (0, 2), (1, 2)]:
        a, b = dec.left, dec.right
        ij, ji = np.kron(a[:, i], b[:, j]), np.kron(a[:, j], b[:, i])
        ii, jj = np.kron(a[:, i], b[:, i]), np.kron(a[:, j], b[:, j])
        h = 0.5 * (np.outer(ij, ij.conj()) + np.outer(ji, ji.conj()) - np.outer(ii, jj.conj()) - np.outer(jj, ii.conj()))
        values.append(np.vdot(psi.vector, h @ psi.vector).real)
    assert np.allclose(values, -1 / 3, atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2), (2, 3), (3, 3), (2, 4)]))
@settings(max_examples=40, deadline=None)
def test_pure_witness_optimal_value(seed, dims):
    psi = random_pure(dims, seed)
    w, mu = pure_state_witness(psi)
    s = schmidt(psi).coefficients
    assert mu == pytest.approx(-s[0] * s[1], abs=1e-12)
    assert evaluate(w, psi) == pytest.approx(mu, abs=1e-12)
    assert np.trace(w.observable).real == pytest.approx(1.0, abs=1e-12)
    assert w.hilbert_schmidt_norm() == pytest.approx(1.0, abs=1e-12)


def test_pure_witness_nonnegative_on_products():
    for r in substreams(3, 5):
        psi = random_pure((2, 3), r)
        w, _ = pure_state_witness(psi)
        assert sampled_product_minimum(w.observable, (2, 3), 1000, r) >= -1e-9


def test_local_unitary_covariance():
    for r in substreams(4, 5):
        psi = random_pure((3, 3), r)
        u = random_local_unitary((3, 3), r)
        moved = PureState(u @ psi.vector, (3, 3))
        _, mu1 = pure_state_witness(psi)
        w2, mu2 = pure_state_witness(moved)
        assert mu1 == pytest.approx(mu2, abs=1e-12)
        assert evaluate(w2, moved) == pytest.approx(mu1, abs=1e-12)


def test_pure_witness_multiparty_cut():
    from witnesskit.states import ghz

    cut = Bipartition.of({1}, 3)
    w, mu = pure_state_witness(ghz(3), cut)
    assert mu == pytest.approx(-0.5)
    assert evaluate(w, ghz(3)) == pytest.approx(-0.5, abs=1e-12)


def test_low_dim_singlet_and_isotropic():
    w, mu = low_dim_optimal_witness(singlet())
    assert evaluate(w, singlet()) == pytest.approx(-0.5, abs=1e-12)
    assert w.provenance["eigenvector_schmidt_rank"] == 2
    w2, mu2 = low_dim_optimal_witness(isotropic(2, 0.5))
    assert mu2 < 0 and evaluate(w2, isotropic(2, 0.5)) == pytest.approx(mu2, abs=1e-12)
    with pytest.raises(WitnessError, match="indecomposable"):
        low_dim_optimal_witness(isotropic(2, 0.2))
    with pytest.raises(WitnessError):
        low_dim_optimal_witness(isotropic(3, 0.5))


def test_low_dim_two_by_three():
    for r in substreams(6, 10):
        rho = random_pure((2, 3), r).density()
        w, mu = low_dim_optimal_witness(rho)
        assert evaluate(w, rho) == pytest.approx(mu, abs=1e-12)
        assert w.provenance["eigenvector_schmidt_rank"] == 2


def test_product_infimum_examples():
    assert product_infimum(np.eye(4), (2, 2), restarts=3).value == pytest.approx(1.0)
    w, _ = pure_state_witness(two_qubit_theta(np.pi / 4))
    res = product_infimum(w.observable, (2, 2), restarts=10, seed=1)
    assert res.value == pytest.approx(0.0, abs=1e-12)
    assert res.is_upper_bound
    assert np.vdot(res.product, w.observable @ res.product).real == pytest.approx(res.value, abs=1e-12)


def test_product_infimum_shifts_positive():
    proj = sum(np.outer(kron(*v), kron(*v).conj()) for v in shifts_vectors())
    res = product_infimum(proj, (2, 2, 2), restarts=200, seed=0)
    assert res.value > 1e-6
    again = product_infimum(proj, (2, 2, 2), restarts=200, seed=0)
    assert again.value == res.value


def test_seesaw_history_is_monotone():
    rng = np.random.default_rng(2)
    h = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    h = h + h.conj().T
    start = [np.array([1, 0], complex), np.array([0.6, 0.8], complex), np.array([1, 1j]) / np.sqrt(2)]
    _, _, history = seesaw_run(h, [2, 2, 2], start)
    assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))


def test_product_infimum_with_cut():
    rho = random_pure((2, 2, 2), 3)
    cut = Bipartition.of({0}, 3)
    w, _ = pure_state_witness(rho, cut)
    res = product_infimum(w.observable, (2, 2, 2), cut, restarts=10, seed=0)
    assert res.value >= -1e-10
    assert res.groups == ((0,), (1, 2))


def test_indecomposable_shifts():
    rho = shifts_state()
    seed_w = kernel_seed_witness(rho)
    assert evaluate(seed_w, rho) == pytest.approx(0.0, abs=1e-12)
    w = indecomposable_witness(rho, seed_w, restarts=50, seed=0)
    eps = w.provenance["epsilon"]
    assert eps > 0
    assert w.kind == INDECOMPOSABLE and w.provenance["construction"] == "greedy-optimized"
    value = evaluate(w, rho)
    assert value <= -eps + 1e-9
    assert w.provenance["start_value"] == pytest.approx(-eps / (1 - 8 * eps), abs=1e-12)
    assert w.provenance["sampled_product_minimum"] >= -1e-9
    worst = min(evaluate(w, random_separable((2, 2, 2), r)) for r in substreams(8, 1000))
    assert worst >= -1e-9


def test_indecomposable_rejects_bad_seeds():
    rho = shifts_state()
    with pytest.raises(WitnessError, match="Tr"):
        indecomposable_witness(rho, Witness(np.eye(8) / 8, (2, 2, 2), None, "decomposable"))
    # projector onto a product vector in the kernel: zero on that product state
    v = kron(*shifts_vectors()[0])
    zero_seed = Witness(np.outer(v, v.conj()), (2, 2, 2), None, "decomposable")
    with pytest.raises(WitnessError, match="choose another seed"):
        indecomposable_witness(rho, zero_seed, restarts=10)


def test_denominator_guard():
    # eps * d >= 1: seed close to identity / d has eps near 1/d
    rho = DensityMatrix(np.diag([1.0, 0, 0, 0]), (2, 2))
    h = np.diag([0.0, 1.0, 1.0, 1.0]) / 3
    seed_w = Witness(h, (2, 2), None, "decomposable")
    with pytest.raises(WitnessError):
        indecomposable_witness(rho, seed_w, restarts=5)


def test_robustness_radius():
    w, _ = pure_state_witness(two_qubit_theta(np.pi / 4))
    assert robustness_radius(w, two_qubit_theta(np.pi / 4)) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(WitnessError):
        robustness_radius(w, DensityMatrix(np.eye(4) / 4, (2, 2)))


def test_chsh_witness_on_separable_states():
    for r in substreams(9, 200):
        w = chsh_witness(DirectionSet.random(2, r))
        assert evaluate(w, random_separable((2, 2), r)) >= -1e-9


def test_pauli_round_trip():
    for r in substreams(10, 5):
        h = random_pure((2, 2, 2), r).density().matrix
        plan = pauli_decompose(h, (2, 2, 2))
        assert np.abs(plan.reconstruct() - h).max() <= 1e-12
        again = MeasurementPlan.from_json(plan.to_json())
        assert again == plan
    ident = pauli_decompose(np.eye(4) / 4, (2, 2))
    assert ident.terms == (("II", 0.25),) and ident.settings_count == 0
    with pytest.raises(WitnessError):
        pauli_decompose(np.eye(9) / 9, (3, 3))
