"""Dense linear algebra over tensor-product Hilbert spaces.

Matrices are plain ``numpy`` arrays; the state types below attach a party
layout (the ordered list of subsystem dimensions) and check the physical
invariants once, at construction.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TAU_HERM = 1e-10
TAU_TR = 1e-10
TAU_PSD = 1e-9
TAU_EIG = 1e-10
TAU_PD = 1e-12
TAU_NORM = 1e-10

# magnitude below which a component does not fix the canonical phase
PHASE_CUTOFF = 1e-6

PARTY_LABELS = string.ascii_uppercase


class LayoutError(ValueError):
    """Dimensions, party indices or cuts are inconsistent."""


class StateError(ValueError):
    """A matrix or vector violates the density-matrix/pure-state invariants."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


def as_dims(dims: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    if not out or any(d < 1 for d in out):
        raise LayoutError(f"invalid dimensions {dims!r}")
    return out


def _scale(m: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(m, 2))) if m.size else 1.0


def is_hermitian(m: np.ndarray, tol: float = TAU_HERM) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.abs(m - m.conj().T).max(initial=0.0)) <= tol * _scale(m)


# ---------------------------------------------------------------------------
# cuts


@dataclass(frozen=True)
class Bipartition:
    """A cut of ``n_parties`` parties into ``side_a`` and its complement."""

    side_a: frozenset
    n_parties: int

    def __post_init__(self):
        side = frozenset(int(i) for i in self.side_a)
        object.__setattr__(self, "side_a", side)
        if not side or len(side) >= self.n_parties:
            raise LayoutError("side_a must be a nonempty proper subset of the parties")
        if min(side) < 0 or max(side) >= self.n_parties:
            raise LayoutError(f"party index out of range for {self.n_parties} parties")

    @classmethod
    def of(cls, side_a: Iterable[int], n_parties: int) -> "Bipartition":
        return cls(frozenset(side_a), n_parties)

    @classmethod
    def from_label(cls, label: str, n_parties: int) -> "Bipartition":
        """Parse ``"A|BC"`` style labels (letters name parties 0, 1, ...)."""
        try:
            left, right = label.replace(" ", "").split("|")
        except ValueError:
            raise LayoutError(f"cut label must look like 'A|BC', got {label!r}") from None
        a = {PARTY_LABELS.index(ch) for ch in left.upper()}
        b = {PARTY_LABELS.index(ch) for ch in right.upper()}
        if a & b or a | b != set(range(n_parties)):
            raise LayoutError(f"cut {label!r} does not partition {n_parties} parties")
        return cls(frozenset(a), n_parties)

    @property
    def side_b(self) -> frozenset:
        return frozenset(range(self.n_parties)) - self.side_a

    @property
    def order(self) -> tuple[int, ...]:
        """Party order that puts side A first, each side ascending."""
        return tuple(sorted(self.side_a)) + tuple(sorted(self.side_b))

    def separates(self, i: int, j: int) -> bool:
        return (i in self.side_a) != (j in self.side_a)

    def split_dims(self, dims: Sequence[int]) -> tuple[int, int]:
        if len(dims) != self.n_parties:
            raise LayoutError(f"cut for {self.n_parties} parties applied to layout {tuple(dims)}")
        da = int(np.prod([dims[i] for i in sorted(self.side_a)]))
        db = int(np.prod([dims[i] for i in sorted(self.side_b)]))
        return da, db

    def label(self) -> str:
        a = "".join(PARTY_LABELS[i] for i in sorted(self.side_a))
        b = "".join(PARTY_LABELS[i] for i in sorted(self.side_b))
        return f"{a}|{b}"

    def __str__(self):
        return self.label()


def default_cut(n_parties: int) -> Bipartition:
    """First party against the rest."""
    return Bipartition(frozenset({0}), n_parties)


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator with a layout."""

    matrix: np.ndarray
    dims: tuple[int, ...]
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        dims = as_dims(self.dims)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != int(np.prod(dims)):
            raise LayoutError(f"matrix of shape {m.shape} does not match layout {dims}")
        if self.validate:
            if not is_hermitian(m):
                raise StateError("density matrix is not Hermitian")
            tr = np.trace(m).real
            if abs(tr - 1.0) > TAU_TR:
                raise StateError(f"density matrix has trace {tr!r}, expected 1")
            lam = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
            if lam < -TAU_PSD:
                raise StateError(
                    f"density matrix has negative eigenvalue {lam:.3e}", min_eigenvalue=lam
                )
            m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> np.ndarray:
        """Eigenvalues, descending."""
        return np.linalg.eigvalsh(self.matrix)[::-1]

    def __repr__(self):
        return f"DensityMatrix(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector with a layout."""

    vector: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        v = np.array(self.vector, dtype=np.complex128).ravel()
        dims = as_dims(self.dims)
        if v.shape[0] != int(np.prod(dims)):
            raise LayoutError(f"vector of length {v.shape[0]} does not match layout {dims}")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > TAU_NORM:
            raise StateError(f"state vector has norm {norm!r}, expected 1")
        v.flags.writeable = False
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "dims", dims)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.vector, self.vector.conj()), self.dims)

    def __repr__(self):
        return f"PureState(dims={self.dims})"


def as_density(state) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.density()
    raise TypeError(f"expected DensityMatrix or PureState, got {type(state).__name__}")


# ---------------------------------------------------------------------------
# tensor products and subsystem operations


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices or vectors."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op))
    return out


def permute_parties(m: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so that new party ``i`` is old party ``order[i]``.

    Works for square operators and for vectors.
    """
    dims = as_dims(dims)
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(len(dims))):
        raise LayoutError(f"{order} is not a permutation of {len(dims)} parties")
    n = len(dims)
    new_dims = [dims[i] for i in order]
    m = np.asarray(m)
    if m.ndim == 1:
        return m.reshape(dims).transpose(order).reshape(-1)
    t = m.reshape(dims + dims).transpose(list(order) + [n + i for i in order])
    total = int(np.prod(new_dims))
    return t.reshape(total, total)


def inverse_order(order: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(order)
    for new, old in enumerate(order):
        inv[old] = new
    return tuple(inv)


def partial_trace_matrix(m: np.ndarray, dims: Sequence[int], traced: Iterable[int]):
    """Trace out the parties in ``traced``; returns ``(matrix, remaining_dims)``."""
    dims = as_dims(dims)
    n = len(dims)
    traced = sorted({int(i) for i in traced})
    if any(i < 0 or i >= n for i in traced):
        raise LayoutError(f"party index out of range in {traced}")
    keep = [i for i in range(n) if i not in traced]
    t = np.asarray(m).reshape(dims + dims)
    letters = string.ascii_letters
    rows = [letters[i] for i in range(n)]
    cols = [letters[n + i] if i in keep else letters[i] for i in range(n)]
    out_idx = [letters[i] for i in keep] + [letters[n + i] for i in keep]
    res = np.einsum("".join(rows) + "".join(cols) + "->" + "".join(out_idx), t)
    kept = tuple(dims[i] for i in keep)
    size = int(np.prod(kept)) if kept else 1
    return res.reshape(size, size), kept


def partial_trace(rho: DensityMatrix, traced: Iterable[int]) -> DensityMatrix:
    """Reduced state on the parties not in ``traced`` (original order kept)."""
    traced = set(traced)
    if traced >= set(range(rho.n_parties)):
        raise LayoutError("cannot trace out every party: the result is a scalar")
    m, kept = partial_trace_matrix(rho.matrix, rho.dims, traced)
    return DensityMatrix(m, kept)


def partial_transpose(m: np.ndarray, dims: Sequence[int], subset: Iterable[int]) -> np.ndarray:
    """Transpose the tensor factors in ``subset`` in the computational basis."""
    dims = as_dims(dims)
    n = len(dims)
    subset = {int(i) for i in subset}
    if any(i < 0 or i >= n for i in subset):
        raise LayoutError(f"party index out of range in {sorted(subset)}")
    m = np.asarray(m)
    perm = list(range(2 * n))
    for i in subset:
        perm[i], perm[n + i] = n + i, i
    return m.reshape(dims + dims).transpose(perm).reshape(m.shape)


def to_bipartite(m: np.ndarray, dims: Sequence[int], cut: Bipartition):
    """Reorder ``m`` so side A comes first; returns ``(matrix, dA, dB)``."""
    da, db = cut.split_dims(dims)
    return permute_parties(m, dims, cut.order), da, db


# ---------------------------------------------------------------------------
# spectral tools


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its first non-negligible component is real positive."""
    v = np.asarray(v, dtype=np.complex128)
    mags = np.abs(v)
    big = np.nonzero(mags > PHASE_CUTOFF * max(mags.max(initial=0.0), 1e-300))[0]
    if big.size == 0:
        return v.copy()
    c = v[big[0]]
    return v * (abs(c) / c)


def canonical_subspace_basis(basis: np.ndarray, rank: int | None = None) -> np.ndarray:
    """Basis-independent orthonormal frame for the column span of ``basis``.

    Projects the computational basis vectors e_0, e_1, ... onto the subspace
    and Gram-Schmidts the first ones that survive. Two different bases of the
    same subspace give the same frame, which makes degenerate eigenvectors and
    Schmidt vectors deterministic.
    """
    basis = np.asarray(basis, dtype=np.complex128)
    q, _ = np.linalg.qr(basis)
    rank = basis.shape[1] if rank is None else rank
    proj = q @ q.conj().T
    frame = []
    for k in range(proj.shape[0]):
        v = proj[:, k].copy()
        for u in frame:
            v -= u * np.vdot(u, v)
        nv = np.linalg.norm(v)
        if nv > PHASE_CUTOFF:
            frame.append(v / nv)
            if len(frame) == rank:
                break
    return np.column_stack(frame)


def hermitian_eig(m: np.ndarray, tol: float = TAU_HERM):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Every eigenvector is phase-fixed with :func:`canonical_phase`; columns of
    the returned matrix are the eigenvectors.
    """
    m = np.asarray(m, dtype=np.complex128)
    if not is_hermitian(m, tol):
        raise ValueError("hermitian_eig requires a Hermitian matrix")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    v = np.column_stack([canonical_phase(v[:, i]) for i in range(v.shape[1])])
    return w, v


def eigen_cluster(m: np.ndarray, which: str = "min", tol: float = TAU_PSD):
    """Extreme eigenvalue of Hermitian ``m`` and a canonical basis of its eigenspace.

    Eigenvalues within ``tol * max(1, ||m||)`` of the extreme value count as
    degenerate with it.
    """
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    scale = tol * _scale(m)
    if which == "min":
        sel = np.nonzero(w <= w[0] + scale)[0]
        value = float(w[0])
    else:
        sel = np.nonzero(w >= w[-1] - scale)[0]
        value = float(w[-1])
    return value, canonical_subspace_basis(v[:, sel])


def min_eigvec(m: np.ndarray, tol: float = TAU_PSD):
    """Smallest eigenvalue and its canonical eigenvector (ties broken by frame order)."""
    value, frame = eigen_cluster(m, "min", tol)
    return value, frame[:, 0]


def herm_fn(m: np.ndarray, fn) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * fn(w)) @ v.conj().T


def herm_log(m: np.ndarray) -> np.ndarray:
    """Natural matrix logarithm of a positive definite matrix."""
    m = np.asarray(m, dtype=np.complex128)
    if not is_hermitian(m):
        raise ValueError("herm_log requires a Hermitian matrix")
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    if w[0] <= TAU_PD * _scale(m):
        raise ValueError(f"herm_log requires full rank (min eigenvalue {w[0]:.3e})")
    return herm_fn(m, np.log)


def herm_exp(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if not is_hermitian(m):
        raise ValueError("herm_exp requires a Hermitian matrix")
    return herm_fn(m, np.exp)


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    return float(np.linalg.svd(np.asarray(m), compute_uv=False).sum())


def rank(m: np.ndarray, rel_tol: float = 1e-9) -> int:
    """Number of eigenvalues above ``rel_tol`` times the spectral norm."""
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    top = max(abs(w[0]), abs(w[-1]))
    if top == 0:
        return 0
    return int(np.count_nonzero(w > rel_tol * top))


# ---------------------------------------------------------------------------
# Schmidt decomposition


@dataclass(frozen=True, eq=False)
class Schmidt:
    """``psi = sum_i coefficients[i] * left[:, i] (x) right[:, i]`` across ``cut``."""

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray
    cut: Bipartition

    @property
    def schmidt_rank(self) -> int:
        return int(np.count_nonzero(self.coefficients > 1e-12))

    def reconstruct(self) -> np.ndarray:
        """State vector in the cut order (side A parties first)."""
        m = (self.left * self.coefficients) @ self.right.T
        return m.reshape(-1)


def schmidt(psi: PureState, cut: Bipartition | None = None, tie_tol: float = 1e-10) -> Schmidt:
    """Schmidt decomposition of ``psi`` across ``cut``.

    Coefficients are sorted descending. Within a group of equal coefficients
    the left vectors are replaced by the canonical frame of their span and the
    right vectors recomputed, so the result does not depend on the SVD's
    arbitrary choice of basis inside degenerate blocks.
    """
    cut = cut or default_cut(psi.n_parties)
    vec = permute_parties(psi.vector, psi.dims, cut.order)
    da, db = cut.split_dims(psi.dims)
    mat = vec.reshape(da, db)
    u, s, vh = np.linalg.svd(mat)
    r = min(da, db)
    left = u[:, :r].copy()
    right = vh[:r, :].T.copy()
    i = 0
    while i < r and s[i] > 1e-12:
        j = i + 1
        while j < r and s[i] - s[j] <= tie_tol:
            j += 1
        frame = canonical_subspace_basis(left[:, i:j], j - i)
        for k in range(i, j):
            a = frame[:, k - i]
            left[:, k] = a
            right[:, k] = (mat.T @ a.conj()) / s[k]
        i = j
    return Schmidt(s[:r].copy(), left, right, cut)
