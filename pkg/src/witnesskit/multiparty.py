"""Cuts of k-party systems, per-cut criteria reports, unextendible product
bases and nondistillability certificates.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from witnesskit.criteria import CRITERIA, Status, Verdict, run_criteria
from witnesskit.tensor import Bipartition, PureState, as_density, as_dims, kron, partial_trace_matrix, rank
from witnesskit.witness import product_infimum

DELTA_UPB = 1e-6
EXTENSION_TOL = 1e-10
MAX_PARTIES = 10


def enumerate_cuts(k: int) -> list[Bipartition]:
    """All ``2^(k-1) - 1`` cuts; side A holds party 0, ordered by its bitmask."""
    if not 2 <= k <= MAX_PARTIES:
        raise ValueError(f"number of parties must be between 2 and {MAX_PARTIES}, got {k}")
    cuts = []
    for mask in range(1, 2**k - 1, 2):
        side = {i for i in range(k) if mask >> i & 1}
        cuts.append(Bipartition(frozenset(side), k))
    return cuts


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("WITNESSKIT_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class CutReport:
    """Criteria verdicts for every cut, in canonical cut order."""

    cuts: tuple[Bipartition, ...]
    verdicts: dict
    n_parties: int

    def verdict(self, cut: Bipartition, criterion: str) -> Verdict:
        for v in self.verdicts[cut]:
            if v.criterion == criterion:
                return v
        raise KeyError(criterion)

    def ppt_cuts(self) -> list[Bipartition]:
        return [c for c in self.cuts if not self.verdict(c, "ppt").entangled]

    def npt_cuts(self) -> list[Bipartition]:
        return [c for c in self.cuts if self.verdict(c, "ppt").entangled]

    def summary(self) -> dict:
        entangled = [c.label() for c in self.cuts if any(v.entangled for v in self.verdicts[c])]
        separable = [c.label() for c in self.cuts if any(v.separable for v in self.verdicts[c])]
        return {
            "cuts": len(self.cuts),
            "ppt_on_all_cuts": not self.npt_cuts(),
            "npt_cuts": [c.label() for c in self.npt_cuts()],
            "entangled_cuts": entangled,
            "separable_certified_cuts": separable,
        }

    def to_dict(self) -> dict:
        return {
            "cuts": {c.label(): [v.to_dict() for v in self.verdicts[c]] for c in self.cuts},
            "summary": self.summary(),
        }


def cut_report(rho, criteria: Sequence[str] | None = None, threads: int | None = None) -> CutReport:
    """Run the criteria battery on every cut of ``rho``.

    Cuts are evaluated independently, on up to ``threads`` worker threads
    (default from ``WITNESSKIT_THREADS``); the report does not depend on it.
    """
    rho = as_density(rho)
    k = rho.n_parties
    cuts = enumerate_cuts(k)
    names = list(CRITERIA) if criteria is None else list(criteria)
    if "ppt" not in names:
        names.insert(0, "ppt")
    threads = _thread_cap() if threads is None else max(1, threads)

    def work(cut):
        return run_criteria(rho, cut, names)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, cuts))
    else:
        results = [work(c) for c in cuts]
    return CutReport(tuple(cuts), dict(zip(cuts, results)), k)


# ---------------------------------------------------------------------------
# unextendible product bases


@dataclass(frozen=True, eq=False)
class UpbResult:
    """Outcome of the product-state search in the complement of a set of product vectors.

    ``status`` is ``"upb"`` (minimum above ``DELTA_UPB``), ``"extension"``
    (a product vector with overlap below ``EXTENSION_TOL`` was found) or
    ``"inconclusive"``. ``min_overlap`` is an upper bound on the true minimum.
    """

    status: str
    min_overlap: float
    extension: PureState | None
    restarts: int
    seed: object
    history: tuple = ()

    @property
    def is_upb(self) -> bool:
        return self.status == "upb"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "min_overlap": self.min_overlap,
            "bound": "upper bound on the minimum (nonconvex see-saw)",
            "delta_upb": DELTA_UPB,
            "restarts": self.restarts,
            "seed": self.seed,
        }


def _local_factors(v, dims) -> list[np.ndarray]:
    """Local factors of a full product vector; raises if ``v`` is not a product."""
    if isinstance(v, PureState):
        vec = v.vector
    elif isinstance(v, (tuple, list)):
        factors = [np.asarray(f, dtype=np.complex128) for f in v]
        if [f.size for f in factors] != list(dims):
            raise ValueError("local factors do not match the layout")
        return [f / np.linalg.norm(f) for f in factors]
    else:
        vec = np.asarray(v, dtype=np.complex128)
    if vec.size != int(np.prod(dims)):
        raise ValueError("vector does not match the layout")
    rho = np.outer(vec, vec.conj())
    factors = []
    for j in range(len(dims)):
        red, _ = partial_trace_matrix(rho, dims, set(range(len(dims))) - {j})
        w, u = np.linalg.eigh(red)
        if rank(red, 1e-9) != 1:
            raise ValueError("input vectors must be product vectors")
        factors.append(u[:, -1])
    prod = kron(*factors)
    if abs(abs(np.vdot(prod, vec)) - np.linalg.norm(vec)) > 1e-9:
        raise ValueError("input vectors must be product vectors")
    return factors


def upb_check(vectors, dims: Sequence[int], restarts: int = 200, seed=0) -> UpbResult:
    """Look for a product vector orthogonal to all ``vectors``.

    ``vectors`` may be :class:`PureState` objects, flat arrays or tuples of
    local factors. They must be pairwise orthogonal products.
    """
    dims = as_dims(dims)
    prods = [kron(*_local_factors(v, dims)) for v in vectors]
    for (i, a), (j, b) in itertools.combinations(enumerate(prods), 2):
        if abs(np.vdot(a, b)) > 1e-10:
            raise ValueError(f"vectors {i} and {j} are not orthogonal")
    d = int(np.prod(dims))
    proj = np.zeros((d, d), dtype=np.complex128)
    for p in prods:
        proj += np.outer(p, p.conj())
    found = product_infimum(proj, dims, None, restarts, seed)
    value = found.value
    if value < EXTENSION_TOL:
        return UpbResult("extension", value, PureState(found.product, dims), restarts, seed, found.history)
    status = "upb" if value > DELTA_UPB else "inconclusive"
    return UpbResult(status, value, None, restarts, seed, found.history)


def range_criterion(rho, restarts: int = 200, seed=0) -> Verdict:
    """Entangled if no full product vector lies in the range of ``rho``.

    The search minimizes the weight of product vectors on the kernel of
    ``rho``; a minimum above ``DELTA_UPB`` certifies entanglement.
    """
    rho = as_density(rho)
    w, v = np.linalg.eigh(rho.matrix)
    ker = v[:, w <= 1e-9 * max(1.0, w[-1])]
    evidence = {"kernel_dimension": ker.shape[1]}
    if ker.shape[1] == 0:
        evidence["min_kernel_weight"] = 0.0
        return Verdict(Status.INCONCLUSIVE, "range", evidence, DELTA_UPB, None)
    found = product_infimum(ker @ ker.conj().T, rho.dims, None, restarts, seed)
    evidence["min_kernel_weight"] = found.value
    status = Status.ENTANGLED if found.value > DELTA_UPB else Status.INCONCLUSIVE
    return Verdict(status, "range", evidence, DELTA_UPB, None, ("see-saw upper bound",))


@dataclass(frozen=True, eq=False)
class NondistillabilityCertificate:
    """Pair cover by PPT cuts plus the entanglement evidence found."""

    pair_cover: dict
    uncovered: tuple
    entanglement_evidence: tuple
    basis: str = "PPT-based"
    flags: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return not self.uncovered

    @property
    def bound_entangled(self) -> bool:
        return self.certified and bool(self.entanglement_evidence)

    def to_dict(self) -> dict:
        return {
            "status": "certified" if self.certified else "uncovered pairs",
            "basis": self.basis,
            "pair_cover": {f"{a}{b}": c.label() for (a, b), c in self.pair_cover.items()},
            "uncovered": ["".join(p) for p in self.uncovered],
            "entanglement_evidence": list(self.entanglement_evidence),
            "bound_entangled": self.bound_entangled,
        }


def certify_nondistillable(rho, report: CutReport | None = None, restarts: int = 200, seed=0) -> NondistillabilityCertificate:
    """Nondistillability from PPT cuts covering every pair of parties.

    Each unordered pair gets the first cut (canonical order) that separates
    it and is PPT. Entanglement evidence comes from NPT cuts in the report or,
    for states PPT on all cuts, the range criterion.
    """
    rho = as_density(rho)
    k = rho.n_parties
    if k < 3:
        raise ValueError("nondistillability certificates need at least three parties")
    report = report or cut_report(rho, ["ppt"])
    labels = [chr(ord("A") + i) for i in range(k)]
    cover, uncovered = {}, []
    ppt = report.ppt_cuts()
    for i, j in itertools.combinations(range(k), 2):
        cut = next((c for c in ppt if c.separates(i, j)), None)
        if cut is None:
            uncovered.append((labels[i], labels[j]))
        else:
            cover[labels[i], labels[j]] = cut
    evidence = []
    npt = report.npt_cuts()
    if npt:
        evidence.append("NPT cuts: " + ",".join(c.label() for c in npt))
    elif not uncovered:
        verdict = range_criterion(rho, restarts, seed)
        if verdict.entangled:
            evidence.append(f"range criterion (UPB): min kernel weight {verdict.evidence['min_kernel_weight']:.6g}")
    return NondistillabilityCertificate(cover, tuple(uncovered), tuple(evidence))
