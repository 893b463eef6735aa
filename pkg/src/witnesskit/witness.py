"""Entanglement witnesses: construction, evaluation, optimization, measurement.

A witness ``H`` is a Hermitian observable with ``<prod|H|prod> >= 0`` on
product states; ``Tr H rho < 0`` certifies entanglement of ``rho``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from witnesskit import kernels
from witnesskit.operators import PAULI_ORDER, PAULIS
from witnesskit.sampling import random_product_batch, random_unit_vector, substreams
from witnesskit.tensor import (
    TAU_PSD,
    TAU_TR,
    Bipartition,
    DensityMatrix,
    PureState,
    as_density,
    as_dims,
    default_cut,
    inverse_order,
    is_hermitian,
    kron,
    min_eigvec,
    partial_transpose,
    permute_parties,
    schmidt,
    to_bipartite,
)

DECOMPOSABLE = "decomposable"
INDECOMPOSABLE = "indecomposable"
BOUND_FORM = "bound-form"


class WitnessError(ValueError):
    """A witness cannot be built for the given input."""


@dataclass(frozen=True, eq=False)
class Witness:
    """Hermitian observable with layout, cut and a record of how it was built.

    ``cut`` is ``None`` for witnesses of full (multipartite) separability.
    ``normalized=False`` marks bound-form witnesses such as ``2 - B`` whose
    trace is not rescaled to one.
    """

    observable: np.ndarray
    dims: tuple[int, ...]
    cut: Bipartition | None
    kind: str
    provenance: dict = field(default_factory=dict)
    normalized: bool = True

    def __post_init__(self):
        h = np.array(self.observable, dtype=np.complex128)
        dims = as_dims(self.dims)
        if h.shape != (int(np.prod(dims)),) * 2:
            raise WitnessError(f"observable of shape {h.shape} does not match layout {dims}")
        if not is_hermitian(h):
            raise WitnessError("witness observable must be Hermitian")
        if self.normalized and abs(np.trace(h).real - 1.0) > TAU_TR * max(1.0, np.abs(h).max()):
            raise WitnessError(f"normalized witness must have trace 1, got {np.trace(h).real!r}")
        h = 0.5 * (h + h.conj().T)
        h.flags.writeable = False
        object.__setattr__(self, "observable", h)
        object.__setattr__(self, "dims", dims)

    def hilbert_schmidt_norm(self) -> float:
        return float(np.sqrt(np.trace(self.observable @ self.observable).real))


@dataclass(frozen=True)
class MeasurementPlan:
    """Pauli-string expansion ``H = sum_s c_s sigma_s``."""

    terms: tuple[tuple[str, float], ...]
    settings_count: int

    def as_dict(self) -> dict[str, float]:
        return dict(self.terms)

    def reconstruct(self) -> np.ndarray:
        if not self.terms:
            raise ValueError("empty plan has no layout")
        n = len(self.terms[0][0])
        out = np.zeros((2**n, 2**n), dtype=np.complex128)
        for label, coeff in self.terms:
            out += coeff * kron(*[PAULIS[ch] for ch in label])
        return out

    def to_json(self) -> list[dict]:
        return [{"pauli": label, "coeff": coeff} for label, coeff in self.terms]

    @classmethod
    def from_json(cls, data) -> "MeasurementPlan":
        if isinstance(data, str):
            data = json.loads(data)
        terms = tuple((item["pauli"], float(item["coeff"])) for item in data)
        return cls(terms, sum(1 for label, _ in terms if set(label) != {"I"}))


def evaluate(w: Witness, rho) -> float:
    """Tr(H rho); negative values certify entanglement."""
    rho = as_density(rho)
    if tuple(rho.dims) != tuple(w.dims):
        raise WitnessError(f"witness layout {w.dims} does not match state layout {rho.dims}")
    return float(np.einsum("ij,ji->", w.observable, rho.matrix).real)


def _from_cut_order(m: np.ndarray, dims: Sequence[int], cut: Bipartition) -> np.ndarray:
    cut_dims = [dims[i] for i in cut.order]
    return permute_parties(m, cut_dims, inverse_order(cut.order))


def pure_state_witness(psi: PureState, cut: Bipartition | None = None):
    """Optimal decomposable witness for a pure state.

    Uses the two largest Schmidt coefficients (smallest index pair on ties).
    Returns ``(witness, mu_min)`` with ``mu_min = -s_0 s_1``.
    """
    cut = cut or default_cut(psi.n_parties)
    dec = schmidt(psi, cut)
    if dec.schmidt_rank < 2:
        raise WitnessError("no witness exists: the state is a product across the cut")
    i, j = 0, 1
    a, b = dec.left, dec.right
    ai_bj = np.kron(a[:, i], b[:, j])
    aj_bi = np.kron(a[:, j], b[:, i])
    ai_bi = np.kron(a[:, i], b[:, i])
    aj_bj = np.kron(a[:, j], b[:, j])
    h = 0.5 * (
        np.outer(ai_bj, ai_bj.conj())
        + np.outer(aj_bi, aj_bi.conj())
        - np.outer(ai_bi, aj_bj.conj())
        - np.outer(aj_bj, ai_bi.conj())
    )
    mu_min = -float(dec.coefficients[i] * dec.coefficients[j])
    w = Witness(
        _from_cut_order(h, psi.dims, cut),
        psi.dims,
        cut,
        DECOMPOSABLE,
        {
            "construction": "pure-state optimal (a=0, rank-1 Q)",
            "schmidt_pair": [i, j],
            "schmidt_coefficients": [float(c) for c in dec.coefficients],
            "mu_min": mu_min,
        },
    )
    return w, mu_min


def low_dim_optimal_witness(rho, cut: Bipartition | None = None):
    """``(1 (x) T)(|v><v|)`` for the minimal eigenvector ``v`` of the partial transpose.

    Only for 2x2 and 2x3 cuts, where every witness is decomposable. Returns
    ``(witness, mu_min)``.
    """
    rho = as_density(rho)
    cut = cut or default_cut(rho.n_parties)
    m, da, db = to_bipartite(rho.matrix, rho.dims, cut)
    if sorted((da, db)) not in ([2, 2], [2, 3]):
        raise WitnessError(f"low-dimensional witness needs a 2x2 or 2x3 cut, got {da}x{db}")
    pt = partial_transpose(m, (da, db), {1})
    mu, v = min_eigvec(pt)
    if mu >= -TAU_PSD:
        raise WitnessError("state is PPT across this cut; use the indecomposable procedure")
    h = partial_transpose(np.outer(v, v.conj()), (da, db), {1})
    srank = schmidt(PureState(v, (da, db))).schmidt_rank
    w = Witness(
        _from_cut_order(h, rho.dims, cut),
        rho.dims,
        cut,
        DECOMPOSABLE,
        {
            "construction": "low-dimensional optimal (partial transpose of minimal eigenvector)",
            "mu_min": float(mu),
            "eigenvector_schmidt_rank": srank,
        },
    )
    return w, float(mu)


# ---------------------------------------------------------------------------
# product-state minimization


@dataclass(frozen=True, eq=False)
class InfimumResult:
    """Best value of ``<prod|h|prod>`` found by the see-saw.

    ``value`` is an upper bound on the true infimum: the search is nonconvex.
    """

    value: float
    vectors: tuple[np.ndarray, ...]
    product: np.ndarray
    groups: tuple[tuple[int, ...], ...]
    restarts: int
    seed: object
    is_upper_bound: bool = True
    history: tuple[float, ...] = ()
    candidates: tuple = ()

    def record(self) -> dict:
        return {
            "value": self.value,
            "bound": "upper bound on the infimum (nonconvex see-saw)",
            "restarts": self.restarts,
            "seed": self.seed,
        }


def _grouped_operator(h, dims, cut):
    """Operator and local dimensions for the product structure in use."""
    dims = as_dims(dims)
    if cut is None:
        groups = tuple((i,) for i in range(len(dims)))
        return np.asarray(h, dtype=np.complex128), list(dims), groups, None
    m, da, db = to_bipartite(np.asarray(h, dtype=np.complex128), dims, cut)
    groups = (tuple(sorted(cut.side_a)), tuple(sorted(cut.side_b)))
    return m, [da, db], groups, cut


def seesaw_run(h: np.ndarray, local_dims: Sequence[int], vectors: list[np.ndarray],
               tol: float = 1e-12, max_iter: int = 500):
    """One see-saw descent from ``vectors``; returns ``(value, vectors, history)``.

    Each sweep replaces every local vector by the minimal eigenvector of the
    operator obtained by contracting ``h`` with the other parties, so the
    recorded values never increase.
    """
    n = len(local_dims)
    vecs = [np.asarray(v, dtype=np.complex128) for v in vectors]
    value = float(np.vdot(kron(*vecs), h @ kron(*vecs)).real)
    history = [value]
    for _ in range(max_iter):
        for k in range(n):
            local = kernels.seesaw_contract(h, local_dims, np.concatenate(vecs), k)
            w, v = np.linalg.eigh(0.5 * (local + local.conj().T))
            vecs[k] = v[:, 0]
            new = float(w[0])
        history.append(new)
        if value - new < tol:
            value = min(value, new)
            break
        value = new
    return value, vecs, history


def product_infimum(h: np.ndarray, dims: Sequence[int], cut: Bipartition | None = None,
                    restarts: int = 20, seed=0, zero_tol: float = 1e-8) -> InfimumResult:
    """Minimize ``<prod|h|prod>`` over product states by alternating eigenvector descent.

    With ``cut`` the product is taken across the two sides of the cut;
    without it, over every party. ``candidates`` holds the distinct end points
    whose value lies within ``zero_tol`` of the best one (used as the zero set
    when optimizing witnesses).
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    m, local_dims, groups, cut = _grouped_operator(h, dims, cut)
    best = None
    ends = []
    for rng in substreams(seed, restarts):
        start = [random_unit_vector(d, rng) for d in local_dims]
        value, vecs, history = seesaw_run(m, local_dims, start)
        ends.append((value, vecs))
        if best is None or value < best[0]:
            best = (value, vecs, history)
    value, vecs, history = best
    candidates = []
    for val, v in sorted(ends, key=lambda t: t[0]):
        if val - value > zero_tol * max(1.0, abs(value)):
            break
        prod = kron(*v)
        if all(abs(np.vdot(prod, kron(*c))) ** 2 < 1 - 1e-6 for c in candidates):
            candidates.append(tuple(v))
    product = kron(*vecs)
    if cut is not None:
        product = _from_cut_order_vec(product, dims, cut)
    return InfimumResult(
        float(value), tuple(vecs), product, groups, restarts, seed,
        history=tuple(history), candidates=tuple(candidates),
    )


def _from_cut_order_vec(v, dims, cut):
    cut_dims = [dims[i] for i in cut.order]
    return permute_parties(v, cut_dims, inverse_order(cut.order))


def sampled_product_minimum(h: np.ndarray, dims: Sequence[int], samples: int = 1000, seed=0) -> float:
    """Smallest ``<prod|h|prod>`` over random full product states (smoke test only)."""
    batch = random_product_batch(dims, samples, seed)
    return float(kernels.product_expectations(h, dims, batch).min())


# ---------------------------------------------------------------------------
# indecomposable witnesses


def kernel_seed_witness(rho, cut: Bipartition | None = None) -> Witness:
    """Normalized projector onto the kernel of ``rho``: a PSD seed with Tr(seed rho) = 0."""
    rho = as_density(rho)
    w, v = np.linalg.eigh(rho.matrix)
    ker = v[:, w <= TAU_PSD]
    if ker.shape[1] == 0:
        raise WitnessError("state has full rank; no kernel projector seed available")
    proj = ker @ ker.conj().T
    return Witness(
        proj / ker.shape[1], rho.dims, cut, DECOMPOSABLE,
        {"construction": "kernel projector", "kernel_dimension": int(ker.shape[1])},
    )


def _conjugate_parties(vectors, parties):
    return [v.conj() if k in parties else v for k, v in enumerate(vectors)]


def _product_positive_max_lambda(h1, d_op, local_dims, restarts, seed, tol, steps=24):
    """Largest lambda in [0, 1) with h1 - lambda d_op nonnegative on products (bisection)."""
    lo, hi = 0.0, 1.0 - 1e-9
    streams = _child_seeds(seed, steps)
    for step in range(steps):
        mid = 0.5 * (lo + hi)
        res = _infimum_raw(h1 - mid * d_op, local_dims, restarts, int(streams[step]))
        if res >= -tol:
            lo = mid
        else:
            hi = mid
    return lo


def _child_seeds(seed, count):
    """Deterministic integer seeds derived from ``seed``."""
    return np.random.SeedSequence(seed).generate_state(count)


def _infimum_raw(h, local_dims, restarts, seed):
    best = np.inf
    for rng in substreams(seed, restarts):
        start = [random_unit_vector(d, rng) for d in local_dims]
        value, _, _ = seesaw_run(h, local_dims, start, tol=1e-12, max_iter=200)
        best = min(best, value)
    return best


def indecomposable_witness(rho, seed_witness: Witness, restarts: int = 50, seed=0,
                           max_rounds: int = 3, search_restarts: int = 8) -> Witness:
    """Indecomposable witness for a PPT entangled state, from a decomposable seed.

    1. ``seed_witness`` must satisfy ``Tr(seed rho) = 0`` and ``Tr seed = 1``.
    2. ``eps`` is the see-saw minimum of the seed over product states and
       ``H' = (H - eps 1)/(1 - eps d)``; then ``Tr H' rho = -eps/(1 - eps d)``.
    3. Greedy improvement: build decomposable operators ``D`` that vanish on
       the product states where ``H'`` vanishes, subtract the largest multiple
       that keeps ``H' - lambda D`` nonnegative on products, renormalize, keep
       the candidate that lowers ``Tr H rho`` most, and repeat.

    The product structure is the seed's cut, or full separability when the
    seed has no cut. The result is only as reliable as the see-saw minima it
    rests on; provenance records restarts, seeds and a sampled positivity
    check.
    """
    rho = as_density(rho)
    h = np.asarray(seed_witness.observable)
    if tuple(seed_witness.dims) != tuple(rho.dims):
        raise WitnessError("seed witness layout does not match the state")
    overlap = float(np.einsum("ij,ji->", h, rho.matrix).real)
    if abs(overlap) > 1e-8:
        raise WitnessError(f"seed witness must satisfy Tr(H rho) = 0, got {overlap:.3e}")
    if abs(np.trace(h).real - 1.0) > 1e-9:
        raise WitnessError("seed witness must have trace 1")
    cut = seed_witness.cut
    d = rho.dim
    inf = product_infimum(h, rho.dims, cut, restarts, seed)
    eps = inf.value
    if eps <= TAU_PSD:
        raise WitnessError(
            f"seed not strictly positive on products (eps={eps:.3e}); choose another seed"
        )
    denom = 1.0 - eps * d
    if denom <= TAU_PSD:
        raise WitnessError(f"eps * d = {eps * d:.6g} >= 1: normalization undefined")
    h1 = (h - eps * np.eye(d)) / denom
    start_value = -eps / denom

    m_cut, local_dims, groups, _ = _grouped_operator(h1, rho.dims, cut)
    rho_g, *_ = _grouped_operator(rho.matrix, rho.dims, cut)
    n_local = len(local_dims)
    if n_local == 2:
        transpose_sets = [(), (1,)]
    else:
        transpose_sets = [()] + [(k,) for k in range(n_local)]

    current = m_cut
    value = float(np.einsum("ij,ji->", current, rho_g).real)
    zero_set = [tuple(c) for c in inf.candidates]
    rounds = []
    streams = _child_seeds(seed, max_rounds * (len(transpose_sets) + 1))
    for rnd in range(max_rounds):
        best = None
        for ci, parties in enumerate(transpose_sets):
            conj = [kron(*_conjugate_parties(list(z), parties)) for z in zero_set]
            q = np.eye(current.shape[0], dtype=np.complex128)
            if conj:
                u, sv, _ = np.linalg.svd(np.column_stack(conj), full_matrices=False)
                span = u[:, sv > 1e-8 * sv[0]]
                q = q - span @ span.conj().T
            tq = np.trace(q).real
            if tq < 0.5:
                continue
            d_op = partial_transpose(q, local_dims, parties) / tq
            lam = _product_positive_max_lambda(
                current, d_op, local_dims, search_restarts, int(streams[rnd * (len(transpose_sets) + 1) + ci]), TAU_PSD
            )
            lam *= 1.0 - 1e-6
            if lam <= 1e-9:
                continue
            cand = (current - lam * d_op) / (1.0 - lam)
            cand_value = float(np.einsum("ij,ji->", cand, rho_g).real)
            if best is None or cand_value < best[0]:
                best = (cand_value, cand, lam, parties)
        if best is None or best[0] > value - 1e-9:
            break
        value, current, lam, parties = best
        rounds.append({"lambda": lam, "transposed_parties": list(parties), "value": value})
        found = product_infimum(
            current, local_dims, None, restarts,
            seed=int(streams[rnd * (len(transpose_sets) + 1) + len(transpose_sets)]),
        )
        zero_set = [tuple(c) for c in found.candidates]

    if cut is None:
        h_final = current
    else:
        h_final = _from_cut_order(current, rho.dims, cut)
    h_final = h_final / np.trace(h_final).real
    sampled = sampled_product_minimum(h_final, rho.dims, 1000, seed=seed)
    return Witness(
        h_final, rho.dims, cut, INDECOMPOSABLE,
        {
            "construction": "greedy-optimized",
            "epsilon": eps,
            "epsilon_bound": "upper bound on the product infimum (nonconvex see-saw)",
            "start_value": start_value,
            "final_value": float(np.einsum("ij,ji->", h_final, rho.matrix).real),
            "rounds": rounds,
            "restarts": restarts,
            "seed": seed,
            "sampled_product_minimum": sampled,
        },
    )


def robustness_radius(w: Witness, rho) -> float:
    """Trace-norm radius around ``rho`` inside which ``w`` still detects entanglement."""
    value = evaluate(w, rho)
    if value >= 0:
        raise WitnessError(f"witness does not detect the state (value {value:.3e} >= 0)")
    return -value / w.hilbert_schmidt_norm()


# ---------------------------------------------------------------------------
# Pauli measurement plans


def pauli_coefficients(h: np.ndarray, n: int) -> np.ndarray:
    """Array ``c[s_1, ..., s_n] = Tr(h sigma_s)/2^n`` over I, X, Y, Z."""
    basis = np.stack([PAULIS[ch] for ch in PAULI_ORDER])  # (4, 2, 2)
    t = np.asarray(h).reshape((2,) * (2 * n))
    operands = [t, list(range(2 * n))]
    for k in range(n):
        # Tr(h sigma) = sum h[r, c] sigma[c, r]
        operands += [basis, [2 * n + k, n + k, k]]
    operands.append([2 * n + k for k in range(n)])
    return np.einsum(*operands, optimize=True) / 2**n


def pauli_decompose(w, dims: Sequence[int] | None = None, cutoff: float = 1e-12) -> MeasurementPlan:
    """Pauli-string expansion of a qubit observable.

    Accepts a :class:`Witness` or a raw matrix with ``dims``.
    """
    if isinstance(w, Witness):
        h, dims = w.observable, w.dims
    else:
        h = np.asarray(w)
        dims = dims or (2,) * int(round(np.log2(h.shape[0])))
    if any(d != 2 for d in dims):
        raise WitnessError(f"Pauli decomposition needs qubits, got layout {tuple(dims)}")
    n = len(dims)
    coeffs = pauli_coefficients(h, n)
    if np.abs(coeffs.imag).max() > 1e-10:
        raise WitnessError("observable is not Hermitian: complex Pauli coefficients")
    terms = []
    for idx in itertools.product(range(4), repeat=n):
        c = float(coeffs[idx].real)
        if abs(c) > cutoff:
            terms.append(("".join(PAULI_ORDER[i] for i in idx), c))
    settings = sum(1 for label, _ in terms if set(label) != {"I"})
    return MeasurementPlan(tuple(terms), settings)
