"""Backend selection for the hot loops.

The compiled ``_ckernels`` extension is used when it was built; otherwise
the numpy fallback in ``_pykernels`` is imported. Setting
``WITNESSKIT_BACKEND=python`` forces the fallback.
"""

import os

import numpy as np

from witnesskit import _pykernels

if os.environ.get("WITNESSKIT_BACKEND", "").lower() == "python":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from witnesskit import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

__all__ = ["BACKEND", "seesaw_contract", "product_expectations", "klyshko_fields"]


def _dims(dims):
    return np.ascontiguousarray(dims, dtype=np.int64)


def seesaw_contract(h, dims, vecs, skip, impl=None):
    impl = impl or _impl
    return impl.seesaw_contract(
        np.ascontiguousarray(h, dtype=np.complex128),
        _dims(dims),
        np.ascontiguousarray(vecs, dtype=np.complex128),
        int(skip),
    )


def product_expectations(h, dims, batch, impl=None):
    impl = impl or _impl
    return impl.product_expectations(
        np.ascontiguousarray(h, dtype=np.complex128),
        _dims(dims),
        np.ascontiguousarray(batch, dtype=np.complex128),
    )


def klyshko_fields(corr, coeffs, dirs, k, impl=None):
    impl = impl or _impl
    return impl.klyshko_fields(
        np.ascontiguousarray(corr, dtype=np.float64).ravel(),
        np.ascontiguousarray(coeffs, dtype=np.float64).ravel(),
        np.ascontiguousarray(dirs, dtype=np.float64),
        int(k),
    )
