"""Pauli matrices, Pauli strings and a few fixed gates."""

from __future__ import annotations

import numpy as np

from witnesskit.tensor import kron

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}
PAULI_ORDER = "IXYZ"

# single-qubit products: (a, b) -> (phase, c) with a b = phase * c
_PRODUCT = {}
for _a in PAULI_ORDER:
    for _b in PAULI_ORDER:
        _m = PAULIS[_a] @ PAULIS[_b]
        for _c in PAULI_ORDER:
            _ov = np.trace(PAULIS[_c].conj().T @ _m) / 2
            if abs(_ov) > 0.5:
                _PRODUCT[_a, _b] = (complex(np.round(_ov.real) + 1j * np.round(_ov.imag)), _c)


def pauli_string(label: str) -> np.ndarray:
    """Matrix of a Pauli string such as ``"XYZ"``; leftmost letter is party 0."""
    label = label.upper()
    if not label or any(ch not in PAULIS for ch in label):
        raise ValueError(f"invalid Pauli string {label!r}")
    return kron(*[PAULIS[ch] for ch in label])


def multiply_strings(a: str, b: str) -> tuple[complex, str]:
    """Product of two Pauli strings as ``(phase, string)``."""
    if len(a) != len(b):
        raise ValueError("Pauli strings must have equal length")
    phase = 1 + 0j
    out = []
    for x, y in zip(a.upper(), b.upper()):
        ph, c = _PRODUCT[x, y]
        phase *= ph
        out.append(c)
    return phase, "".join(out)


def strings_commute(a: str, b: str) -> bool:
    anti = sum(1 for x, y in zip(a.upper(), b.upper()) if x != "I" and y != "I" and x != y)
    return anti % 2 == 0


def bloch_operator(direction) -> np.ndarray:
    """n . sigma for a real 3-vector n."""
    nx, ny, nz = (float(c) for c in direction)
    return nx * X + ny * Y + nz * Z


def cnot(n: int = 2, control: int = 0, target: int = 1) -> np.ndarray:
    """CNOT on ``n`` qubits; qubit 0 is the leftmost tensor factor."""
    p0 = np.diag([1, 0]).astype(np.complex128)
    p1 = np.diag([0, 1]).astype(np.complex128)
    a = [I2] * n
    b = [I2] * n
    a[control] = p0
    b[control] = p1
    b[target] = X
    return kron(*a) + kron(*b)
