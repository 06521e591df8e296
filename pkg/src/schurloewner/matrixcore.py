"""Dense complex matrix helpers.

Everything here works on plain ``numpy`` arrays of shape ``(n, n)``.  Hermitian
inputs are symmetrized on entry, so callers may pass matrices that are only
Hermitian up to rounding.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

ENSEMBLES = ("gue", "ginibre", "density", "normal_matrix", "hermitian_contraction")


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class ConvergenceError(np.linalg.LinAlgError):
    """An eigendecomposition did not reproduce its input."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a square complex array, rejecting non-finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermitian(h) -> np.ndarray:
    """Symmetrize: ``(H + H*) / 2``."""
    m = as_matrix(h)
    return (m + m.conj().T) / 2


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")


def schur_product(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _same_shape(a, b)
    return a * b


def commutator(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _same_shape(a, b)
    return a @ b - b @ a


def _check_q(q: float) -> float:
    q = float(q)
    if math.isnan(q) or q < 1:
        raise ValueError(f"Schatten index must satisfy q >= 1, got {q}")
    return q


def schatten_from_singular_values(s: np.ndarray, q: float) -> float:
    q = _check_q(q)
    s = np.abs(np.asarray(s, dtype=float))
    if s.size == 0:
        return 0.0
    top = float(s.max())
    if top == 0.0:
        return 0.0
    if math.isinf(q):
        return top
    if q == 1.0:
        return float(s.sum())
    # scale by the largest value so large q cannot overflow
    return top * float(np.sum((s / top) ** q)) ** (1.0 / q)


def schatten_norm(a, q: float) -> float:
    """Schatten q-norm: the l_q norm of the singular values (q may be ``math.inf``)."""
    _check_q(q)
    return schatten_from_singular_values(np.linalg.svd(as_matrix(a), compute_uv=False), q)


def _max_hermitian_part(a: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    phase = np.exp(1j * np.asarray(thetas))[:, None, None]
    rot = phase * a[None]
    return np.linalg.eigvalsh((rot + np.conj(np.swapaxes(rot, 1, 2))) / 2)[:, -1]


def _golden_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - inv_phi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (hi - lo)
            fd = f(d)
    return (c, fc) if fc > fd else (d, fd)


def numerical_radius(a, tol: float = 1e-9, grid: int = 1024) -> float:
    """Numerical radius ``max_theta lambda_max(Re(e^{i theta} A))``.

    A coarse grid over ``[0, 2 pi)`` locates candidate maxima, and a
    golden-section search refines the three best grid points.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = as_matrix(a)
    if not np.any(a):
        return 0.0
    thetas = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
    values = _max_hermitian_part(a, thetas)
    step = thetas[1] - thetas[0]

    def objective(t: float) -> float:
        return float(_max_hermitian_part(a, np.array([t]))[0])

    best = float(values.max())
    for idx in np.argsort(values)[-3:]:
        t0 = thetas[idx]
        _, val = _golden_max(objective, t0 - step, t0 + step, tol)
        best = max(best, val)
    # w(A) >= 0 always; the grid maximum is already a valid lower estimate
    return max(best, 0.0)


def hermitian_eig(h, tol: float = 1e-9) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix with ascending eigenvalues.

    Raises :class:`ConvergenceError` when ``U diag(w) U*`` fails to reproduce
    the input to ``tol * max(1, ||H||)``.
    """
    m = hermitian(h)
    try:
        w, u = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigh failed: {exc}", math.inf) from exc
    scale = max(1.0, float(np.abs(m).max()))
    residual = float(np.abs((u * w) @ u.conj().T - m).max())
    if residual > tol * scale:
        raise ConvergenceError("eigendecomposition does not reconstruct input", residual)
    return SpectralDecomposition(w, u)


def matrix_function(h, f) -> np.ndarray:
    """``U f(diag(lambda)) U*`` for a scalar function ``f`` from the catalog.

    ``f`` may also be any object with an ``evaluate(x)`` method; eigenvalues
    outside its domain raise from there.
    """
    w, u = hermitian_eig(h)
    fw = np.array([f.evaluate(float(x)) for x in w])
    return hermitian((u * fw) @ u.conj().T)


def _ginibre(n: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(n, rng))
    d = np.diagonal(r)
    return q * np.where(d == 0, 1.0, d / np.abs(d))


def gue(n: int, rng: np.random.Generator) -> np.ndarray:
    g = _ginibre(n, rng)
    return hermitian((g + g.conj().T) / math.sqrt(2.0))


def random_ensemble(kind: str, n: int, seed: int | np.random.Generator) -> np.ndarray:
    """Seeded draw from one of the supported random matrix ensembles.

    Conventions, for reproducibility of reported numbers:

    * ``ginibre``: i.i.d. standard complex Gaussians, ``E|a_ij|^2 = 1``.
    * ``gue``: ``(G + G*)/sqrt(2)``; off-diagonal and diagonal variance 1.
    * ``density``: Wishart ``G G*`` normalized to unit trace.
    * ``normal_matrix``: ``U diag(z) U*`` with ``U`` from QR of a Ginibre
      draw and ``z`` standard complex Gaussians.
    * ``hermitian_contraction``: a GUE draw divided by its spectral norm
      when that norm exceeds 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if kind == "ginibre":
        return _ginibre(n, rng)
    if kind == "gue":
        return gue(n, rng)
    if kind == "density":
        g = _ginibre(n, rng)
        w = hermitian(g @ g.conj().T)
        return w / np.trace(w).real
    if kind == "normal_matrix":
        u = haar_unitary(n, rng)
        z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
        return (u * z) @ u.conj().T
    if kind == "hermitian_contraction":
        h = gue(n, rng)
        norm = float(np.linalg.norm(h, 2))
        return h / norm if norm > 1.0 else h
    raise ValueError(f"unknown ensemble {kind!r}; expected one of {ENSEMBLES}")


def matrix_to_json(a) -> dict:
    """Encode a matrix (or vector) as ``{"n", "re", "im"}``."""
    m = np.asarray(a, dtype=complex)
    return {"n": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape:
        raise DimensionError("re and im parts differ in shape")
    m = re + 1j * im
    if m.shape[0] != int(obj["n"]):
        raise DimensionError(f"declared n={obj['n']} but got {m.shape[0]} rows")
    return as_matrix(m) if m.ndim == 2 else m
