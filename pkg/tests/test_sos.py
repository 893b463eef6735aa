import numpy as np
import pytest

from witnesskit.sampling import substreams
from witnesskit.sos import (
    BiquadraticForm,
    NoCertificate,
    SosCertificate,
    SosError,
    biquadratic_from_witness,
    random_cp_choi,
    sos_certificate,
    verify_sos,
)
from witnesskit.states import two_qubit_theta
from witnesskit.witness import pure_state_witness


def _example1():
    w, _ = pure_state_witness(two_qubit_theta(np.pi / 4))
    return w.observable.real


def test_identity_form(rng):
    f = biquadratic_from_witness(np.eye(6), (2, 3))
    x, y = rng.normal(size=3), rng.normal(size=2)
    assert f.evaluate(x, y) == pytest.approx(x @ x * (y @ y))
    cert = sos_certificate(np.eye(6), (2, 3))
    assert len(cert.bilinear_forms) == 6
    assert verify_sos(f, cert, 100, 0) <= 1e-12


def test_example1_form_by_hand(rng):
    f = biquadratic_from_witness(_example1(), (2, 2))
    for _ in range(100):
        x, y = rng.normal(size=2), rng.normal(size=2)
        hand = 0.5 * (x[0] * y[1] - x[1] * y[0]) ** 2
        assert f.evaluate(x, y) == pytest.approx(hand, abs=1e-10)


def test_form_matches_witness_expectation(rng):
    h = _example1()
    f = biquadratic_from_witness(h, (2, 2))
    for _ in range(100):
        x, y = rng.normal(size=2), rng.normal(size=2)
        assert f.evaluate(x, y) == pytest.approx(np.kron(y, x) @ h @ np.kron(y, x), abs=1e-10)


def test_gram_ambiguity():
    assert isinstance(sos_certificate(_example1()), NoCertificate)
    v = np.array([0.0, -1.0, 1.0, 0.0])
    h_psd = 0.5 * np.outer(v, v)
    f, f_psd = biquadratic_from_witness(_example1()), biquadratic_from_witness(h_psd)
    assert np.allclose(f.coefficients, f_psd.coefficients, atol=1e-15)
    cert = sos_certificate(h_psd)
    assert len(cert.bilinear_forms) == 1
    assert verify_sos(f, cert, 100, 1) <= 1e-12


def test_reshape_convention_round_trip():
    for r in substreams(2, 10):
        h, ops = random_cp_choi(3, 2, 2, r)
        cert = sos_certificate(h, (3, 2))
        assert cert.dims == (2, 3)
        recon = sum(np.outer(a.reshape(-1), a.reshape(-1)) for a in cert.operation_elements())
        assert np.allclose(recon, h, atol=1e-10)


def test_perturbed_certificate_detected():
    h, _ = random_cp_choi(2, 2, 2, 3)
    f = biquadratic_from_witness(h)
    cert = sos_certificate(h)
    forms = [g.copy() for g in cert.bilinear_forms]
    forms[0][0, 0] += 0.1
    assert verify_sos(f, SosCertificate(tuple(forms), cert.dims), 100, 0) > 1e-3


def test_zero_form():
    f = BiquadraticForm(np.zeros((2, 2, 2, 2)), (2, 2))
    assert verify_sos(f, SosCertificate((), (2, 2)), 20, 0) == 0.0


def test_linearity(rng):
    a, _ = random_cp_choi(2, 3, 2, rng)
    b = rng.normal(size=(6, 6))
    b = b + b.T
    fa, fb = biquadratic_from_witness(a, (2, 3)), biquadratic_from_witness(b, (2, 3))
    fab = biquadratic_from_witness(2 * a - 3 * b, (2, 3))
    assert np.allclose(fab.coefficients, 2 * fa.coefficients - 3 * fb.coefficients)


def test_negative_product_eigenvector_gives_negative_value():
    # eigenvector |y=1, x=0> carries eigenvalue -1
    h = np.diag([1.0, 1.0, -1.0, 1.0])
    f = biquadratic_from_witness(h)
    assert f.evaluate(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(-1.0)
    assert sos_certificate(h).min_eigenvalue == pytest.approx(-1.0)


def test_input_errors():
    with pytest.raises(SosError, match="real coefficients required"):
        biquadratic_from_witness(np.eye(4) * 1j)
    with pytest.raises(SosError, match="symmetric"):
        sos_certificate(np.triu(np.ones((4, 4))))
    f = biquadratic_from_witness(np.eye(4))
    with pytest.raises(SosError):
        verify_sos(f, sos_certificate(np.eye(6), (2, 3)), 10, 0)
