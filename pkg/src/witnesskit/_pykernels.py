"""Numpy implementations of the inner loops.

Each function has the same signature and return convention as its
counterpart in ``_ckernels.pyx``; the test suite checks they agree.
"""

import numpy as np


def seesaw_contract(h, dims, vecs, skip):
    """Contract ``h`` with local vectors on every party except ``skip``.

    ``vecs`` is the concatenation of one local vector per party (the entry
    for ``skip`` is ignored). Returns the ``dims[skip]``-square operator
    ``<v_rest| h |v_rest>``.
    """
    dims = [int(d) for d in dims]
    n = len(dims)
    tensor = np.asarray(h).reshape(dims + dims)
    bounds = np.cumsum([0] + dims)
    operands = [tensor, list(range(2 * n))]
    for j in range(n):
        if j == skip:
            continue
        v = vecs[bounds[j]:bounds[j + 1]]
        operands += [v.conj(), [j], v, [n + j]]
    operands.append([skip, n + skip])
    return np.einsum(*operands, optimize=True)


def product_expectations(h, dims, batch):
    """Real expectation values of ``h`` on a batch of product states.

    ``batch`` has one row per sample holding the concatenated local vectors.
    """
    dims = [int(d) for d in dims]
    bounds = np.cumsum([0] + dims)
    nsamp = batch.shape[0]
    prod = batch[:, bounds[0]:bounds[1]]
    for j in range(1, len(dims)):
        local = batch[:, bounds[j]:bounds[j + 1]]
        prod = (prod[:, :, None] * local[:, None, :]).reshape(nsamp, -1)
    return np.einsum("ni,ij,nj->n", prod.conj(), h, prod, optimize=True).real


def klyshko_fields(corr, coeffs, dirs, k):
    """Local fields ``g[b, i]`` so that the Bell value is ``g[0]·a_k + g[1]·a'_k``.

    ``corr`` is the flattened 3^n correlation tensor, ``coeffs`` the flattened
    2^n multilinear coefficients and ``dirs`` the (n, 2, 3) direction array.
    """
    n = dirs.shape[0]
    tensor = np.asarray(corr).reshape((3,) * n)
    ctensor = np.asarray(coeffs).reshape((2,) * n)
    # corr axes 0..n-1 (components), coefficient axes n..2n-1 (primed bits)
    operands = [tensor, list(range(n)), ctensor, list(range(n, 2 * n))]
    for j in range(n):
        if j != k:
            operands += [dirs[j], [n + j, j]]
    operands.append([n + k, k])
    return np.einsum(*operands, optimize=True)
