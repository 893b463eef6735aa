"""Named states used throughout the toolkit.

Every constructor returns a normalized object (unit trace or unit norm),
including states that are conventionally written unnormalized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from witnesskit.tensor import (
    TAU_PSD,
    DensityMatrix,
    PureState,
    StateError,
    kron,
    partial_transpose,
    permute_parties,
)

SQ2 = np.sqrt(2.0)
KET0 = np.array([1.0, 0.0], dtype=np.complex128)
KET1 = np.array([0.0, 1.0], dtype=np.complex128)
PLUS = np.array([1.0, 1.0], dtype=np.complex128) / SQ2
MINUS = np.array([1.0, -1.0], dtype=np.complex128) / SQ2


@dataclass(frozen=True, eq=False)
class NamedState:
    name: str
    state: DensityMatrix | PureState
    parameters: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)


def basis_vector(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=np.complex128)
    v[i] = 1.0
    return v


def singlet() -> PureState:
    """(|01> - |10>)/sqrt 2."""
    v = (kron(KET0, KET1) - kron(KET1, KET0)) / SQ2
    return PureState(v, (2, 2))


def maximally_entangled(n: int) -> PureState:
    """sum_i |i,i> / sqrt n on C^n (x) C^n."""
    if n < 2:
        raise ValueError("maximally_entangled needs n >= 2")
    v = np.zeros(n * n, dtype=np.complex128)
    v[:: n + 1] = 1.0 / np.sqrt(n)
    return PureState(v, (n, n))


def two_qubit_theta(theta: float) -> PureState:
    """cos(theta)|00> + sin(theta)|11>."""
    v = np.cos(theta) * kron(KET0, KET0) + np.sin(theta) * kron(KET1, KET1)
    return PureState(v, (2, 2))


def ghz(n: int, sign: int = 1) -> PureState:
    """(|0...0> + sign |1...1>)/sqrt 2 on n qubits."""
    if n < 2:
        raise ValueError("ghz needs n >= 2")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    v = np.zeros(2**n, dtype=np.complex128)
    v[0] = 1.0 / SQ2
    v[-1] = sign / SQ2
    return PureState(v, (2,) * n)


def w_state() -> PureState:
    """(|001> + |010> + |100>)/sqrt 3."""
    v = np.zeros(8, dtype=np.complex128)
    v[[1, 2, 4]] = 1.0 / np.sqrt(3)
    return PureState(v, (2, 2, 2))


def product_state(dims=(2, 2)) -> PureState:
    """|0...0>."""
    v = np.zeros(int(np.prod(dims)), dtype=np.complex128)
    v[0] = 1.0
    return PureState(v, tuple(dims))


def werner(n: int, lam: float) -> DensityMatrix:
    """(lam 1 - (lam+1) (1 (x) T)(|Psi+><Psi+|)) / (lam (n^2 - 1) - 1).

    The spectrum of the result is computed and checked, instead of trusting an
    analytic validity range; an out-of-range ``lam`` raises :class:`StateError`
    carrying the offending eigenvalue.
    """
    if n < 2:
        raise ValueError("werner needs n >= 2")
    lam = float(lam)
    denom = lam * (n * n - 1) - 1.0
    if abs(denom) < 1e-14:
        raise StateError(f"werner prefactor diverges at lambda={lam}")
    p = maximally_entangled(n).density().matrix
    num = lam * np.eye(n * n) - (lam + 1.0) * partial_transpose(p, (n, n), {1})
    m = num / denom
    w = np.linalg.eigvalsh(m)
    tr = np.trace(m).real
    if w[0] < -TAU_PSD or abs(tr - 1.0) > 1e-10:
        raise StateError(
            f"werner(n={n}, lambda={lam}) is not a state: min eigenvalue {w[0]:.6g}",
            min_eigenvalue=float(w[0]),
        )
    return DensityMatrix(m, (n, n))


def werner_conjectured_nondistillable(n: int, lam: float) -> bool:
    """Whether ``lam`` lies in the conjectured nondistillable range [2/(n-2), inf)."""
    if n <= 2:
        return False
    return lam >= 2.0 / (n - 2)


def isotropic(n: int, p: float) -> DensityMatrix:
    """p |Psi+><Psi+| + (1 - p) 1/n^2."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("isotropic needs 0 <= p <= 1")
    d = n * n
    m = p * maximally_entangled(n).density().matrix + (1.0 - p) * np.eye(d) / d
    return DensityMatrix(m, (n, n))


def shifts_vectors() -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Local factors of the Shifts unextendible product basis."""
    return [
        (KET0, KET0, KET0),
        (MINUS, PLUS, KET1),
        (PLUS, KET1, MINUS),
        (KET1, MINUS, PLUS),
    ]


def shifts_state() -> DensityMatrix:
    """(1 - sum_i |v_i><v_i|)/4 for the Shifts UPB on three qubits."""
    proj = np.zeros((8, 8), dtype=np.complex128)
    for factors in shifts_vectors():
        v = kron(*factors)
        proj += np.outer(v, v.conj())
    return DensityMatrix((np.eye(8) - proj) / 4.0, (2, 2, 2))


def bell_basis() -> list[np.ndarray]:
    """Phi+, Phi-, Psi+, Psi- on two qubits."""
    return [
        (kron(KET0, KET0) + kron(KET1, KET1)) / SQ2,
        (kron(KET0, KET0) - kron(KET1, KET1)) / SQ2,
        (kron(KET0, KET1) + kron(KET1, KET0)) / SQ2,
        (kron(KET0, KET1) - kron(KET1, KET0)) / SQ2,
    ]


def bell_mixture_acbd() -> DensityMatrix:
    """Equal mixture over Bell states shared identically by pairs (A,C) and (B,D).

    Layout order is A, B, C, D.
    """
    m = np.zeros((16, 16), dtype=np.complex128)
    for b in bell_basis():
        pb = np.outer(b, b.conj())
        m += kron(pb, pb) / 4.0  # layout A, C, B, D
    # new party i = old party order[i]; old layout is (A, C, B, D)
    m = permute_parties(m, (2, 2, 2, 2), (0, 2, 1, 3))
    return DensityMatrix(m, (2, 2, 2, 2))


def padded_counterexample(n: int, d: int) -> DensityMatrix:
    """1_A'/d (x) |Psi+><Psi+| (x) 1_B'/d with layout (d, n, n, d).

    The bipartite cut of interest is {A', A} | {B, B'} (parties {0, 1} | {2, 3}).
    """
    if d <= n:
        raise ValueError(f"padded_counterexample needs d > n (got n={n}, d={d})")
    p = maximally_entangled(n).density().matrix
    m = kron(np.eye(d) / d, p, np.eye(d) / d)
    return DensityMatrix(m, (d, n, n, d))


def _catalog() -> dict[str, tuple[Callable[..., NamedState], dict]]:
    def named(name, builder, **defaults):
        def make(**params):
            values = {**defaults, **params}
            unknown = set(values) - set(defaults)
            if unknown:
                raise ValueError(f"unknown parameters for {name}: {sorted(unknown)}")
            state = builder(**values)
            flags = {}
            if name == "werner":
                flags["conjectured_nondistillable"] = werner_conjectured_nondistillable(
                    values["n"], values["lambda"]
                )
            return NamedState(name, state, values, flags)

        return make, defaults

    return {
        "singlet": named("singlet", lambda: singlet()),
        "max-entangled": named("max-entangled", lambda n: maximally_entangled(int(n)), n=2),
        "bell-theta": named(
            "bell-theta", lambda theta: two_qubit_theta(float(theta)), theta=float(np.pi / 4)
        ),
        "ghz": named("ghz", lambda n, sign: ghz(int(n), int(sign)), n=3, sign=1),
        "w": named("w", lambda: w_state()),
        "product": named("product", lambda n: product_state((2,) * int(n)), n=2),
        "werner": named(
            "werner", lambda n, **kw: werner(int(n), float(kw["lambda"])), n=3, **{"lambda": 2.0}
        ),
        "isotropic": named("isotropic", lambda n, p: isotropic(int(n), float(p)), n=2, p=0.5),
        "shifts": named("shifts", lambda: shifts_state()),
        "bell-mixture-acbd": named("bell-mixture-acbd", lambda: bell_mixture_acbd()),
        "padded": named("padded", lambda n, d: padded_counterexample(int(n), int(d)), n=2, d=3),
    }


CATALOG = _catalog()


def catalog_names() -> list[str]:
    return sorted(CATALOG)


def catalog(name: str, **params) -> NamedState:
    """Build a named catalog state; raises ``KeyError`` for unknown names."""
    if name not in CATALOG:
        raise KeyError(f"unknown catalog state {name!r}; available: {', '.join(catalog_names())}")
    make, _ = CATALOG[name]
    return make(**params)


def catalog_defaults(name: str) -> dict:
    return dict(CATALOG[name][1])
