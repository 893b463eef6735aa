"""Bell-type operators, the commutator witness for GHZ states, and the
local-realism homomorphism search for stabilizer specifications.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from witnesskit import kernels
from witnesskit.operators import I2, bloch_operator, multiply_strings, strings_commute
from witnesskit.sampling import substreams
from witnesskit.tensor import as_density, kron
from witnesskit.witness import BOUND_FORM, Witness, WitnessError, pauli_coefficients

SEPARABLE_BOUND = 2.0
SYMBOL_BUDGET = 16


class BellError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Per-party pairs ``(a, a')`` of real unit 3-vectors, stored as an (n, 2, 3) array."""

    directions: np.ndarray

    def __post_init__(self):
        d = np.array(self.directions, dtype=np.float64)
        if d.ndim != 3 or d.shape[1:] != (2, 3):
            raise BellError(f"directions must have shape (n, 2, 3), got {d.shape}")
        norms = np.linalg.norm(d, axis=2)
        if np.abs(norms - 1.0).max() > 1e-12:
            raise BellError(f"directions must be unit vectors (norms {norms.ravel().tolist()})")
        d.flags.writeable = False
        object.__setattr__(self, "directions", d)

    @property
    def n_parties(self) -> int:
        return self.directions.shape[0]

    @classmethod
    def from_pairs(cls, pairs) -> "DirectionSet":
        return cls(np.asarray(pairs, dtype=np.float64))

    @classmethod
    def random(cls, n: int, rng) -> "DirectionSet":
        d = np.empty((n, 2, 3))
        for j in range(n):
            for b in range(2):
                v = np.asarray(rng.normal(size=3))
                d[j, b] = v / np.linalg.norm(v)
        return cls(d)

    def to_json(self) -> list:
        """``[[a_1, a'_1], [a_2, a'_2], ...]`` with each vector an [x, y, z] triple."""
        return [[list(map(float, v)) for v in pair] for pair in self.directions]

    @classmethod
    def from_json(cls, data) -> "DirectionSet":
        return cls(np.asarray(data, dtype=np.float64))


def chsh_operator(d: DirectionSet) -> np.ndarray:
    """a.s (x) (b + b').s + a'.s (x) (b - b').s."""
    if d.n_parties != 2:
        raise BellError("CHSH operator needs exactly two parties")
    (a, ap), (b, bp) = d.directions
    return kron(bloch_operator(a), bloch_operator(b + bp)) + kron(
        bloch_operator(ap), bloch_operator(b - bp)
    )


def _swap_primes(d: np.ndarray) -> np.ndarray:
    return d[:, ::-1, :]


def klyshko_operator(n: int, d: DirectionSet) -> np.ndarray:
    """Bell-Klyshko operator by the recursion on the last party.

    ``B_n = B_{n-1} (x) (a_n + a'_n).s/2 + B'_{n-1} (x) (a_n - a'_n).s/2`` where
    the primed operator swaps ``a`` and ``a'`` on parties ``1..n-1``.
    """
    if n < 2:
        raise BellError("Klyshko operator needs n >= 2")
    if d.n_parties != n:
        raise BellError(f"direction set has {d.n_parties} parties, expected {n}")
    dirs = d.directions
    if n == 2:
        return chsh_operator(d)
    prev = klyshko_operator(n - 1, DirectionSet(dirs[:-1]))
    prev_primed = klyshko_operator(n - 1, DirectionSet(_swap_primes(dirs[:-1])))
    a, ap = dirs[-1]
    return kron(prev, bloch_operator(a + ap) / 2) + kron(prev_primed, bloch_operator(a - ap) / 2)


def klyshko_coefficients(n: int) -> np.ndarray:
    """Coefficients ``c[s]`` with ``B_n = sum_s c_s (x)_j v_{j, s_j}.s``; ``s_j = 1`` means primed."""
    if n < 2:
        raise BellError("Klyshko operator needs n >= 2")
    c = np.array([[1.0, 1.0], [1.0, -1.0]])
    for _ in range(n - 2):
        flipped = c[(slice(None, None, -1),) * c.ndim]
        c = np.stack([(c + flipped) / 2, (c - flipped) / 2], axis=-1)
    return c


def correlation_tensor(rho) -> np.ndarray:
    """``T[i_1, ..., i_n] = Tr(rho s_i1 (x) ... (x) s_in)`` for i in x, y, z."""
    rho = as_density(rho)
    if any(dim != 2 for dim in rho.dims):
        raise BellError(f"Bell analysis needs qubits, got layout {rho.dims}")
    n = rho.n_parties
    full = pauli_coefficients(rho.matrix, n).real * 2**n
    return full[(slice(1, None),) * n]


def bell_value(rho, d: DirectionSet) -> float:
    """Tr(B_n rho) from the correlation tensor."""
    t = correlation_tensor(rho)
    n = t.ndim
    g = kernels.klyshko_fields(t, klyshko_coefficients(n), d.directions, 0)
    return float(np.sum(g * d.directions[0]))


@dataclass(frozen=True, eq=False)
class BellResult:
    """Best Bell value found; a lower bound on the maximum over directions."""

    value: float
    directions: DirectionSet
    restarts: int
    seed: object
    is_lower_bound: bool = True
    separable_bound: float = SEPARABLE_BOUND
    history: tuple = ()

    def record(self) -> dict:
        return {
            "value": self.value,
            "bound": "lower bound on the maximum over directions",
            "separable_bound": self.separable_bound,
            "exceeds_separable_bound": bool(self.value > self.separable_bound + 1e-9),
            "directions": self.directions.to_json(),
            "restarts": self.restarts,
            "seed": self.seed,
        }


def bell_optimize(rho, restarts: int = 20, seed=0, max_sweeps: int = 500, tol: float = 1e-13) -> BellResult:
    """Maximize Tr(B_n rho) over measurement directions by block coordinate ascent.

    The Bell value is linear in each party's pair ``(a_k, a'_k)``: it equals
    ``g_0 . a_k + g_1 . a'_k`` for local fields ``g`` computed from the
    correlation tensor. Each block update sets ``a_k = g_0/|g_0|`` and
    ``a'_k = g_1/|g_1|``, the exact maximizer, so values never decrease.
    """
    t = correlation_tensor(rho)
    n = t.ndim
    if n < 2:
        raise BellError("Bell analysis needs at least two qubits")
    coeffs = klyshko_coefficients(n)
    best = None
    for rng in substreams(seed, restarts):
        dirs = np.empty((n, 2, 3))
        for j in range(n):
            for b in range(2):
                dirs[j, b] = _unit3(rng)
        value = -np.inf
        history = []
        for _ in range(max_sweeps):
            for k in range(n):
                g = kernels.klyshko_fields(t, coeffs, dirs, k)
                for b in range(2):
                    norm = np.linalg.norm(g[b])
                    if norm > 1e-15:
                        dirs[k, b] = g[b] / norm
                new = float(np.sum(g * dirs[k]))
            history.append(new)
            if new - value < tol:
                value = max(value, new)
                break
            value = new
        if best is None or value > best[0]:
            best = (value, dirs.copy(), history)
    value, dirs, history = best
    return BellResult(float(value), DirectionSet(dirs), restarts, seed, history=tuple(history))


def _unit3(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def chsh_witness(d: DirectionSet) -> Witness:
    """Unnormalized witness ``2 - B`` from a CHSH operator."""
    h = SEPARABLE_BOUND * np.eye(4) - chsh_operator(d)
    return Witness(
        h, (2, 2), None, BOUND_FORM,
        {"construction": "CHSH bound form 2 - B", "normalization": "unnormalized bound-form witness"},
        normalized=False,
    )


# ---------------------------------------------------------------------------
# commutator witness


def _op_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


def janzing_witness(n: int, a_ops: Sequence[np.ndarray], c: np.ndarray) -> Witness:
    """``H = (2/sqrt n) 1 - i[abar, c]`` with ``abar = (1/n) sum_i a_i``.

    ``a_i`` acts on qubit ``i``; ``c`` acts on all ``n`` qubits. Separable
    states satisfy ``|Tr rho [abar, c]| <= 2/sqrt n``, so ``H`` is
    nonnegative on them. The trace is ``2^n 2/sqrt n``, not one.
    """
    if n < 2 or len(a_ops) != n:
        raise WitnessError(f"need n >= 2 and one local operator per party (n={n}, got {len(a_ops)})")
    dim = 2**n
    c = np.asarray(c, dtype=np.complex128)
    if c.shape != (dim, dim):
        raise WitnessError(f"c must be {dim}x{dim}")
    for m in list(a_ops) + [c]:
        m = np.asarray(m)
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise WitnessError("operators must be Hermitian")
        if _op_norm(m) > 1 + 1e-12:
            raise WitnessError(f"operator norm {_op_norm(m):.6g} exceeds 1")
    abar = np.zeros((dim, dim), dtype=np.complex128)
    for i, a in enumerate(a_ops):
        factors = [I2] * n
        factors[i] = np.asarray(a, dtype=np.complex128)
        abar += kron(*factors)
    abar /= n
    comm = abar @ c - c @ abar
    h = (2.0 / np.sqrt(n)) * np.eye(dim) - 1j * comm
    return Witness(
        h, (2,) * n, None, BOUND_FORM,
        {
            "construction": "commutator bound (2/sqrt n) 1 - i[abar, c]",
            "normalization": "unnormalized bound-form witness",
            "bound": 2.0 / np.sqrt(n),
        },
        normalized=False,
    )


def janzing_ghz_operators(n: int):
    """``a_i = |1><1|`` and ``c = i(|0..0><1..1| - |1..1><0..0|)``."""
    dim = 2**n
    a = [np.diag([0.0, 1.0]).astype(np.complex128) for _ in range(n)]
    c = np.zeros((dim, dim), dtype=np.complex128)
    c[0, -1] = 1j
    c[-1, 0] = -1j
    return a, c


def commutator_expectation(n: int, a_ops, c, rho) -> float:
    """Tr(rho i[abar, c]), real for Hermitian inputs; its modulus is the bounded quantity."""
    w = janzing_witness(n, a_ops, c)
    rho = as_density(rho)
    value = np.trace((2.0 / np.sqrt(n)) * rho.matrix - w.observable @ rho.matrix)
    return float(value.real)


# ---------------------------------------------------------------------------
# stabilizer specifications and local hidden variables


@dataclass(frozen=True)
class StabilizerSpec:
    """Pauli-string generators and derived elements, each with a target eigenvalue +-1."""

    generators: tuple[tuple[str, int], ...]
    derived_elements: tuple[tuple[str, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        gens = tuple((s.upper(), int(t)) for s, t in self.generators)
        derived = tuple((s.upper(), int(t)) for s, t in self.derived_elements)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "derived_elements", derived)
        lengths = {len(s) for s, _ in gens + derived}
        if len(lengths) != 1:
            raise BellError("all Pauli strings must have the same length")
        for _, t in gens + derived:
            if t not in (1, -1):
                raise BellError("target eigenvalues must be +1 or -1")
        for (a, _), (b, _) in itertools.combinations(gens, 2):
            if not strings_commute(a, b):
                raise BellError(f"generators {a} and {b} do not commute")

    @classmethod
    def from_products(cls, generators, products: Sequence[Sequence[int]]) -> "StabilizerSpec":
        """Spec whose derived elements are the listed products of generators.

        Signs follow from Pauli algebra; non-real phases are rejected.
        """
        gens = [(s.upper(), int(t)) for s, t in generators]
        derived = []
        for idx in products:
            phase, label = 1 + 0j, "I" * len(gens[0][0])
            target = 1
            for i in idx:
                ph, label = multiply_strings(label, gens[i][0])
                phase *= ph
                target *= gens[i][1]
            if abs(phase.imag) > 1e-12:
                raise BellError(f"product {tuple(idx)} has non-real phase {phase}")
            derived.append((label, int(round(phase.real)) * target))
        return cls(tuple(gens), tuple(derived))

    def elements(self) -> tuple[tuple[str, int], ...]:
        return self.generators + self.derived_elements

    def symbols(self) -> list[tuple[int, str]]:
        """Sorted local symbols ``(party, letter)`` appearing in the spec."""
        out = {(j, ch) for s, _ in self.elements() for j, ch in enumerate(s) if ch != "I"}
        return sorted(out)


def ghz_spec() -> StabilizerSpec:
    """Generators XYY, YXY, YYX at +1 and their product, which is -XXX."""
    return StabilizerSpec.from_products(
        [("XYY", 1), ("YXY", 1), ("YYX", 1)], [(0, 1, 2)]
    )


@dataclass(frozen=True)
class LhvResult:
    assignment: dict | None
    checked: int
    symbols: tuple

    @property
    def found(self) -> bool:
        return self.assignment is not None


def lhv_assignment_search(spec: StabilizerSpec, symbol_order: Sequence | None = None) -> LhvResult:
    """Exhaustive search for local values ``f(party, letter) = +-1`` reproducing every target.

    The induced value of a string is the product of ``f`` over its non-identity
    letters. Returns the first matching assignment or ``None`` after checking
    all ``2^k`` assignments.
    """
    symbols = spec.symbols() if symbol_order is None else [tuple(s) for s in symbol_order]
    if set(symbols) != set(spec.symbols()):
        raise BellError("symbol_order must list exactly the spec's symbols")
    if len(symbols) > SYMBOL_BUDGET:
        raise BellError(f"{len(symbols)} local symbols exceed the brute-force budget of {SYMBOL_BUDGET}")
    index = {s: i for i, s in enumerate(symbols)}
    rows = []
    for label, target in spec.elements():
        rows.append(([index[(j, ch)] for j, ch in enumerate(label) if ch != "I"], target))
    checked = 0
    for values in itertools.product((1, -1), repeat=len(symbols)):
        checked += 1
        if all(np.prod([values[i] for i in idx]) == target for idx, target in rows):
            assignment = {f"{ch}{j + 1}": values[index[(j, ch)]] for j, ch in sorted(index)}
            return LhvResult(assignment, checked, tuple(symbols))
    return LhvResult(None, checked, tuple(symbols))
