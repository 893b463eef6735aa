"""The compiled kernels and the numpy fallback must agree."""

import numpy as np
import pytest

from witnesskit import _pykernels, kernels
from witnesskit.bell import klyshko_coefficients
from witnesskit.sampling import random_density, random_product_batch

try:
    from witnesskit import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def _herm(d, rng):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return a + a.conj().T


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (2, 2, 2), (3, 2, 4)])
def test_seesaw_contract_against_dense(dims, rng):
    h = _herm(int(np.prod(dims)), rng)
    vecs = random_product_batch(dims, 1, rng)[0]
    bounds = np.cumsum([0] + list(dims))
    for skip in range(len(dims)):
        got = kernels.seesaw_contract(h, dims, vecs, skip, impl=_pykernels)
        # dense oracle: <v_rest| h |v_rest> via explicit basis products
        factors = [vecs[bounds[j]:bounds[j + 1]] for j in range(len(dims))]
        expected = np.zeros((dims[skip], dims[skip]), dtype=complex)
        for a in range(dims[skip]):
            for b in range(dims[skip]):
                fa = list(factors)
                fb = list(factors)
                fa[skip] = np.eye(dims[skip])[a]
                fb[skip] = np.eye(dims[skip])[b]
                va, vb = fa[0], fb[0]
                for f in fa[1:]:
                    va = np.kron(va, f)
                for f in fb[1:]:
                    vb = np.kron(vb, f)
                expected[a, b] = np.vdot(va, h @ vb)
        assert np.allclose(got, expected, atol=1e-12)


@needs_ext
@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (2, 2, 2), (3, 2, 4)])
def test_seesaw_backends_agree(dims, rng):
    h = _herm(int(np.prod(dims)), rng)
    vecs = random_product_batch(dims, 1, rng)[0]
    for skip in range(len(dims)):
        a = kernels.seesaw_contract(h, dims, vecs, skip, impl=_pykernels)
        b = kernels.seesaw_contract(h, dims, vecs, skip, impl=_ckernels)
        assert np.allclose(a, b, atol=1e-12)


@needs_ext
@pytest.mark.parametrize("dims", [(2, 2), (3, 3), (2, 2, 2)])
def test_product_expectations_backends_agree(dims, rng):
    h = _herm(int(np.prod(dims)), rng)
    batch = random_product_batch(dims, 50, rng)
    a = kernels.product_expectations(h, dims, batch, impl=_pykernels)
    b = kernels.product_expectations(h, dims, batch, impl=_ckernels)
    assert np.allclose(a, b, atol=1e-12)


def test_product_expectations_against_dense(rng):
    dims = (2, 3)
    h = _herm(6, rng)
    batch = random_product_batch(dims, 5, rng)
    got = kernels.product_expectations(h, dims, batch)
    for row, value in zip(batch, got):
        v = np.kron(row[:2], row[2:])
        assert value == pytest.approx(np.vdot(v, h @ v).real, abs=1e-12)


@needs_ext
@pytest.mark.parametrize("n", [2, 3, 4])
def test_klyshko_fields_backends_agree(n, rng):
    corr = rng.normal(size=(3,) * n)
    dirs = rng.normal(size=(n, 2, 3))
    coeffs = klyshko_coefficients(n)
    for k in range(n):
        a = kernels.klyshko_fields(corr, coeffs, dirs, k, impl=_pykernels)
        b = kernels.klyshko_fields(corr, coeffs, dirs, k, impl=_ckernels)
        assert np.allclose(a, b, atol=1e-12)


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
    if _ckernels is not None:
        assert random_density((2,), 0) is not None
