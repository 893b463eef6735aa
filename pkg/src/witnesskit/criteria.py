"""Bipartite separability criteria.

Each check maps a state and a cut to a :class:`Verdict`. Only a violation
that clears the tolerance in the certifying direction produces
``entangled-certified``; ``separable-certified`` comes only from criteria
that are sufficient for separability (PPT in 2x2 / 2x3, and the low-rank
PPT result).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from witnesskit.tensor import (
    TAU_PSD,
    Bipartition,
    DensityMatrix,
    PureState,
    as_density,
    default_cut,
    herm_exp,
    herm_log,
    partial_trace_matrix,
    partial_transpose,
    rank,
    to_bipartite,
)

TAU_ENT = 1e-9
RANK_TOL = 1e-9
# eigensolver noise (~1e-16) is amplified by x -> x**alpha for alpha < 1
SPECTRUM_FLOOR = 1e-13
DEFAULT_ALPHAS = (0.0, 0.5, 1.0, 2.0, math.inf)


class Status(str, Enum):
    ENTANGLED = "entangled-certified"
    SEPARABLE = "separable-certified"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    status: Status
    criterion: str
    evidence: dict = field(default_factory=dict)
    tolerance_used: float = TAU_PSD
    cut: str | None = None
    flags: tuple = ()

    @property
    def entangled(self) -> bool:
        return self.status is Status.ENTANGLED

    @property
    def separable(self) -> bool:
        return self.status is Status.SEPARABLE

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "criterion": self.criterion,
            "evidence": {k: float(v) for k, v in self.evidence.items()},
            "tolerance_used": self.tolerance_used,
            "cut": self.cut,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class SpectrumPair:
    """Descending global and local spectra, zero-padded to equal length."""

    global_spectrum: np.ndarray
    local_spectrum: np.ndarray

    def partial_sum_margins(self) -> np.ndarray:
        """Local minus global partial sums; majorization holds iff all >= 0."""
        return np.cumsum(self.local_spectrum) - np.cumsum(self.global_spectrum)


def _prepare(rho, cut: Bipartition | None):
    rho = as_density(rho)
    cut = cut or default_cut(rho.n_parties)
    m, da, db = to_bipartite(rho.matrix, rho.dims, cut)
    return rho, cut, m, da, db


def _reduced(m: np.ndarray, da: int, db: int):
    rho_a, _ = partial_trace_matrix(m, (da, db), {1})
    rho_b, _ = partial_trace_matrix(m, (da, db), {0})
    return rho_a, rho_b


def _spectrum(m: np.ndarray) -> np.ndarray:
    """Descending eigenvalues; (-TAU_PSD, 0) and the relative noise floor clamp to zero."""
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[::-1]
    floor = SPECTRUM_FLOOR * max(float(np.abs(w).max(initial=0.0)), 1e-300)
    return np.where(((w < 0) & (w > -TAU_PSD)) | (np.abs(w) < floor), 0.0, w)


def ppt_check(rho, cut: Bipartition | None = None) -> Verdict:
    """Peres-Horodecki test across ``cut`` (transpose applied to side B)."""
    rho, cut, m, da, db = _prepare(rho, cut)
    pt = partial_transpose(m, (da, db), {1})
    lam = float(np.linalg.eigvalsh(pt)[0])
    evidence = {"min_eigenvalue": lam}
    if lam < -TAU_PSD:
        status = Status.ENTANGLED
    elif sorted((da, db)) in ([2, 2], [2, 3]):
        status = Status.SEPARABLE
    else:
        status = Status.INCONCLUSIVE
    return Verdict(status, "ppt", evidence, TAU_PSD, cut.label())


def reduction_check(rho, cut: Bipartition | None = None) -> Verdict:
    """Checks ``1 (x) rho_B - rho >= 0`` and ``rho_A (x) 1 - rho >= 0``.

    A violation certifies entanglement and also distillability.
    """
    rho, cut, m, da, db = _prepare(rho, cut)
    rho_a, rho_b = _reduced(m, da, db)
    op_b = np.kron(np.eye(da), rho_b) - m
    op_a = np.kron(rho_a, np.eye(db)) - m
    lam_b = float(np.linalg.eigvalsh(op_b)[0])
    lam_a = float(np.linalg.eigvalsh(op_a)[0])
    evidence = {"min_eigenvalue_1_x_rhoB": lam_b, "min_eigenvalue_rhoA_x_1": lam_a}
    if min(lam_a, lam_b) < -TAU_PSD:
        return Verdict(Status.ENTANGLED, "reduction", evidence, TAU_PSD, cut.label(), ("distillable",))
    return Verdict(Status.INCONCLUSIVE, "reduction", evidence, TAU_PSD, cut.label())


def renyi_from_spectrum(w: np.ndarray, alpha: float) -> float:
    """Renyi entropy in bits of a probability vector (clamped, zeros ignored)."""
    if alpha < 0:
        raise ValueError("Renyi order must be >= 0")
    w = np.asarray(w, dtype=float)
    w = np.clip(w, 0.0, None)
    top = w.max(initial=0.0)
    if alpha == 0:
        return math.log2(max(1, int(np.count_nonzero(w > RANK_TOL * top))))
    if math.isinf(alpha):
        return -math.log2(top)
    nz = w[w > 0]
    if alpha == 1:
        return float(-(nz * np.log2(nz)).sum())
    return float(math.log2((nz**alpha).sum()) / (1.0 - alpha))


def renyi_entropy(rho, alpha: float) -> float:
    """S_alpha in bits; alpha = 0 gives log rank, 1 von Neumann, inf min-entropy."""
    if isinstance(rho, (DensityMatrix, PureState)):
        m = as_density(rho).matrix
    else:
        m = np.asarray(rho)
    return renyi_from_spectrum(_spectrum(m), alpha)


def _alpha_key(alpha: float) -> str:
    if math.isinf(alpha):
        return "inf"
    return f"{alpha:g}"


def entropic_check(rho, cut: Bipartition | None = None, alphas: Sequence[float] = DEFAULT_ALPHAS) -> Verdict:
    """Checks ``S_alpha(rho_X) <= S_alpha(rho)`` for both sides and each alpha."""
    rho, cut, m, da, db = _prepare(rho, cut)
    rho_a, rho_b = _reduced(m, da, db)
    sg, sa, sb = _spectrum(m), _spectrum(rho_a), _spectrum(rho_b)
    evidence = {}
    worst = -math.inf
    for alpha in alphas:
        s_global = renyi_from_spectrum(sg, alpha)
        gap_a = renyi_from_spectrum(sa, alpha) - s_global
        gap_b = renyi_from_spectrum(sb, alpha) - s_global
        key = _alpha_key(alpha)
        evidence[f"gap_A_alpha_{key}"] = gap_a
        evidence[f"gap_B_alpha_{key}"] = gap_b
        worst = max(worst, gap_a, gap_b)
    evidence["max_gap"] = worst
    status = Status.ENTANGLED if worst > TAU_ENT else Status.INCONCLUSIVE
    return Verdict(status, "entropy", evidence, TAU_ENT, cut.label())


def spectrum_pairs(rho, cut: Bipartition | None = None) -> tuple[SpectrumPair, SpectrumPair]:
    rho, cut, m, da, db = _prepare(rho, cut)
    rho_a, rho_b = _reduced(m, da, db)
    sg = _spectrum(m)

    def pad(local):
        out = np.zeros_like(sg)
        out[: local.size] = local
        return SpectrumPair(sg, out)

    return pad(_spectrum(rho_a)), pad(_spectrum(rho_b))


def majorization_check(rho, cut: Bipartition | None = None) -> Verdict:
    """Checks that both local spectra majorize the global spectrum."""
    rho, cut, *_ = _prepare(rho, cut)
    pair_a, pair_b = spectrum_pairs(rho, cut)
    margins_a = pair_a.partial_sum_margins()
    margins_b = pair_b.partial_sum_margins()
    ka, kb = int(np.argmin(margins_a)), int(np.argmin(margins_b))
    evidence = {
        "min_margin_A": float(margins_a[ka]),
        "min_margin_B": float(margins_b[kb]),
        "worst_k_A": ka + 1,
        "worst_k_B": kb + 1,
    }
    if min(margins_a[ka], margins_b[kb]) < -TAU_PSD:
        return Verdict(Status.ENTANGLED, "majorization", evidence, TAU_PSD, cut.label())
    return Verdict(Status.INCONCLUSIVE, "majorization", evidence, TAU_PSD, cut.label())


def rank_separability(rho, cut: Bipartition | None = None) -> Verdict:
    """PPT together with rank <= max(dA, dB) certifies separability."""
    rho, cut, m, da, db = _prepare(rho, cut)
    ppt = ppt_check(rho, cut)
    r = rank(m, RANK_TOL)
    evidence = {"rank": r, "max_local_dim": max(da, db), "ppt_min_eigenvalue": ppt.evidence["min_eigenvalue"]}
    if not ppt.entangled and r <= max(da, db):
        return Verdict(Status.SEPARABLE, "rank", evidence, TAU_PSD, cut.label())
    return Verdict(Status.INCONCLUSIVE, "rank", evidence, TAU_PSD, cut.label())


@dataclass(frozen=True, eq=False)
class ConditionalEntropy:
    value: float
    operator: np.ndarray | None
    operator_value: float | None


def conditional_entropy(rho, cut: Bipartition | None = None) -> ConditionalEntropy:
    """S(A|B) = S(rho) - S(rho_B) in bits.

    For full-rank states the conditional operator
    ``exp(log rho - log 1_A (x) rho_B)`` is also returned, together with
    ``-Tr rho log(operator)`` computed from it as an independent route.
    """
    rho, cut, m, da, db = _prepare(rho, cut)
    _, rho_b = _reduced(m, da, db)
    value = renyi_from_spectrum(_spectrum(m), 1.0) - renyi_from_spectrum(_spectrum(rho_b), 1.0)
    try:
        log_rho = herm_log(m)
    except ValueError:
        return ConditionalEntropy(value, None, None)
    op = herm_exp(log_rho - np.kron(np.eye(da), herm_log(rho_b)))
    op_value = float(-np.trace(m @ herm_log(op)).real / math.log(2))
    return ConditionalEntropy(value, op, op_value)


CRITERIA = {
    "ppt": ppt_check,
    "reduction": reduction_check,
    "entropy": entropic_check,
    "majorization": majorization_check,
    "rank": rank_separability,
}


def run_criteria(rho, cut: Bipartition | None = None, names: Sequence[str] | None = None) -> list[Verdict]:
    names = list(CRITERIA) if names is None else list(names)
    unknown = [n for n in names if n not in CRITERIA]
    if unknown:
        raise ValueError(f"unknown criteria {unknown}; choose from {sorted(CRITERIA)}")
    return [CRITERIA[n](rho, cut) for n in names]
