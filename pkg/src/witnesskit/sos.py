"""Biquadratic forms from real witnesses and sum-of-squares certificates.

For a real symmetric ``h`` on ``C^m (x) C^n`` the form is
``F(x, y) = <y, x| h |y, x>`` with ``y`` in the first factor (dimension m)
and ``x`` in the second (dimension n). A PSD ``h`` gives
``F = sum_t G_t(x, y)^2`` with bilinear ``G_t = sum_ij g^t_ij x_i y_j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from witnesskit.sampling import rng_from
from witnesskit.tensor import TAU_PSD

REAL_TOL = 1e-12


class SosError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BiquadraticForm:
    """``F(x, y) = sum L[i, j, k, l] x_i x_j y_k y_l``, symmetrized in (i, j) and (k, l)."""

    coefficients: np.ndarray
    dims: tuple[int, int]

    def evaluate(self, x, y) -> float:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return float(np.einsum("ijkl,i,j,k,l->", self.coefficients, x, x, y, y))

    def evaluate_batch(self, xs, ys) -> np.ndarray:
        return np.einsum("ijkl,si,sj,sk,sl->s", self.coefficients, xs, xs, ys, ys)


@dataclass(frozen=True, eq=False)
class SosCertificate:
    """Bilinear forms ``g^t`` (each n x m) with ``F = sum_t (x^T g^t y)^2``."""

    bilinear_forms: tuple[np.ndarray, ...]
    dims: tuple[int, int]

    def evaluate(self, x, y) -> float:
        return float(sum((np.asarray(x) @ g @ np.asarray(y)) ** 2 for g in self.bilinear_forms))

    def evaluate_batch(self, xs, ys) -> np.ndarray:
        out = np.zeros(xs.shape[0])
        for g in self.bilinear_forms:
            out += np.einsum("si,ij,sj->s", xs, g, ys) ** 2
        return out

    def operation_elements(self) -> list[np.ndarray]:
        """``A_t`` with ``<j|A_t|i> = g^t_ij``, mapping the x space to the y space."""
        return [g.T.copy() for g in self.bilinear_forms]

    def to_json(self) -> list:
        return [g.tolist() for g in self.bilinear_forms]


@dataclass(frozen=True)
class NoCertificate:
    min_eigenvalue: float
    reason: str = "no certificate from canonical representative"

    def to_json(self) -> dict:
        return {"min_eigenvalue": self.min_eigenvalue, "reason": self.reason}


def _real_symmetric(h) -> np.ndarray:
    h = np.asarray(h)
    if np.iscomplexobj(h):
        if np.abs(h.imag).max(initial=0.0) > REAL_TOL:
            raise SosError("real coefficients required")
        h = h.real
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise SosError("square matrix required")
    if np.abs(h - h.T).max(initial=0.0) > REAL_TOL * max(1.0, np.abs(h).max(initial=0.0)):
        raise SosError("input must be symmetric")
    return 0.5 * (h + h.T)


def _split_dims(h: np.ndarray, dims):
    if dims is None:
        side = int(round(np.sqrt(h.shape[0])))
        if side * side != h.shape[0]:
            raise SosError("pass dims for non-square layouts")
        dims = (side, side)
    m, n = (int(d) for d in dims)
    if m * n != h.shape[0]:
        raise SosError(f"layout {dims} does not match a {h.shape[0]}-dimensional matrix")
    return m, n


def biquadratic_from_witness(h, dims=None) -> BiquadraticForm:
    """Form ``F(x, y) = <y, x|h|y, x>`` of a real witness with layout ``dims = (m, n)``.

    The returned ``BiquadraticForm.dims`` is ``(n, m)``: the sizes of ``x`` and ``y``.
    """
    h = _real_symmetric(h)
    m, n = _split_dims(h, dims)
    h4 = h.reshape(m, n, m, n)  # [k, i, l, j]
    coeff = np.transpose(h4, (1, 3, 0, 2))  # [i, j, k, l]
    coeff = 0.25 * (
        coeff + coeff.transpose(1, 0, 2, 3) + coeff.transpose(0, 1, 3, 2) + coeff.transpose(1, 0, 3, 2)
    )
    return BiquadraticForm(coeff, (n, m))


def sos_certificate(h, dims=None):
    """SOS certificate from the eigendecomposition of a PSD ``h``.

    Returns :class:`SosCertificate`, or :class:`NoCertificate` with the most
    negative eigenvalue when ``h`` is not PSD. Only this representative is
    tried; another Gram representative of the same form may still be PSD.
    """
    h = _real_symmetric(h)
    m, n = _split_dims(h, dims)
    w, v = np.linalg.eigh(h)
    scale = max(1.0, float(np.abs(w).max(initial=0.0)))
    if w[0] < -TAU_PSD * scale:
        return NoCertificate(float(w[0]))
    forms = []
    for t in range(w.size):
        if w[t] <= TAU_PSD * scale:
            continue
        a_t = np.sqrt(w[t]) * v[:, t].reshape(m, n)
        forms.append(a_t.T.copy())  # g_ij = <j|A_t|i>
    return SosCertificate(tuple(forms), (n, m))


def verify_sos(form: BiquadraticForm, cert: SosCertificate, samples: int = 100, seed=0) -> float:
    """Largest ``|F - sum_t G_t^2|`` over standard normal sample points."""
    if tuple(form.dims) != tuple(cert.dims):
        raise SosError(f"form dims {form.dims} and certificate dims {cert.dims} differ")
    rng = rng_from(seed)
    n, m = form.dims
    xs = rng.normal(size=(samples, n))
    ys = rng.normal(size=(samples, m))
    return float(np.abs(form.evaluate_batch(xs, ys) - cert.evaluate_batch(xs, ys)).max(initial=0.0))


def choi_from_operation_elements(ops) -> np.ndarray:
    """``sum_t vec(A_t) vec(A_t)^T`` for real ``A_t`` of shape (m, n)."""
    ops = [np.asarray(a, dtype=float) for a in ops]
    vecs = [a.reshape(-1) for a in ops]
    return sum(np.outer(v, v) for v in vecs)


def random_cp_choi(m: int, n: int, terms: int, rng) -> tuple[np.ndarray, list[np.ndarray]]:
    """Real Choi-type matrix of a random CP map and the operation elements used."""
    rng = rng_from(rng)
    ops = [rng.normal(size=(m, n)) for _ in range(terms)]
    return choi_from_operation_elements(ops), ops
