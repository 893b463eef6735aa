"""Seeded random states, unitaries and product vectors."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from witnesskit.tensor import DensityMatrix, PureState, kron


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def substreams(seed, count: int) -> list[np.random.Generator]:
    """Independent generators derived deterministically from ``seed``."""
    ss = np.random.SeedSequence(seed)
    return [np.random.default_rng(child) for child in ss.spawn(count)]


def random_unit_vector(d: int, rng) -> np.ndarray:
    """Uniform on the complex unit sphere of C^d."""
    rng = rng_from(rng)
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_unitary(d: int, rng) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    rng = rng_from(rng)
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure(dims: Sequence[int], rng) -> PureState:
    return PureState(random_unit_vector(int(np.prod(dims)), rng), tuple(dims))


def random_density(dims: Sequence[int], rng, rank: int | None = None) -> DensityMatrix:
    """Induced-measure random state: ``G G^dag / Tr`` with ``G`` Ginibre of given rank."""
    rng = rng_from(rng)
    d = int(np.prod(dims))
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, tuple(dims))


def random_product_vectors(dims: Sequence[int], rng) -> list[np.ndarray]:
    rng = rng_from(rng)
    return [random_unit_vector(d, rng) for d in dims]


def random_product_batch(dims: Sequence[int], count: int, rng) -> np.ndarray:
    """``count`` rows of concatenated local unit vectors."""
    rng = rng_from(rng)
    blocks = []
    for d in dims:
        v = rng.normal(size=(count, d)) + 1j * rng.normal(size=(count, d))
        blocks.append(v / np.linalg.norm(v, axis=1, keepdims=True))
    return np.concatenate(blocks, axis=1)


def random_separable(dims: Sequence[int], rng, terms: int | None = None) -> DensityMatrix:
    """Convex mixture of at most 20 random pure product states."""
    rng = rng_from(rng)
    terms = int(rng.integers(1, 21)) if terms is None else terms
    weights = rng.dirichlet(np.ones(terms))
    d = int(np.prod(dims))
    m = np.zeros((d, d), dtype=np.complex128)
    for w in weights:
        v = kron(*random_product_vectors(dims, rng))
        m += w * np.outer(v, v.conj())
    return DensityMatrix(m, tuple(dims))


def random_local_unitary(dims: Sequence[int], rng) -> np.ndarray:
    rng = rng_from(rng)
    return kron(*[random_unitary(d, rng) for d in dims])
