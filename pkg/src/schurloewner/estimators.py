"""Numerical lower estimates of Schur multiplier norms and commutator ratios.

Every estimator returns a value attained at an explicit witness, so each
result is a genuine lower bound (up to floating point) on the quantity it
targets.  None of them certify the supremum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .loewner import LoewnerMatrix
from .matrixcore import (
    as_matrix,
    hermitian,
    matrix_function,
    matrix_to_json,
    random_ensemble,
    schatten_from_singular_values,
    schatten_norm,
)

IMPROVEMENT_TOL = 1e-10


@dataclass
class EstimateResult:
    value: float
    witness: np.ndarray
    restarts: int
    iterations: int
    seed: int

    def to_json(self, witness: bool = True) -> dict:
        out = {"lower_estimate": self.value, "restarts": self.restarts,
               "iterations": self.iterations, "seed": self.seed}
        if witness:
            out["witness"] = matrix_to_json(self.witness)
        return out


def _mask(L) -> np.ndarray:
    return L.entries if isinstance(L, LoewnerMatrix) else np.asarray(L)


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), *stream])


def exact_schur_norm_q2(L) -> float:
    """``max |L_ij|``: the exact Frobenius-induced Schur multiplier norm."""
    return float(np.abs(_mask(L)).max())


def _batched_trace_norm_hermitian(m: np.ndarray) -> np.ndarray:
    return np.abs(np.linalg.eigvalsh(m)).sum(axis=-1)


def hermitian_objective(L, x) -> float:
    """``||L o x x*||_1`` for a vector ``x``."""
    a = _mask(L)
    x = np.asarray(x, dtype=complex)
    return schatten_norm(a * np.outer(x, x.conj()), 1.0)


def estimate_schur_norm_hermitian(L, restarts: int = 64, max_iters: int = 500, seed: int = 0,
                                  initial: Optional[Sequence[np.ndarray]] = None) -> EstimateResult:
    """Maximize ``x -> ||L o x x*||_1`` over unit vectors, for real symmetric ``L``.

    For Hermitian masks this maximum equals ``||S_L||`` (= q=1 and q=inf norms).
    Each start alternates ``S <- sign(L o x x*)`` and ``x <- top eigenvector of
    L o S``; since ``||M||_1 = max_{||S||<=1} Re tr(S M)`` every step is
    non-decreasing.  Starts are ``restarts`` complex Gaussian vectors (restart
    ``i`` drawn from the stream ``(seed, i)``), every standard basis vector,
    the uniform vector, and any ``initial`` vectors.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    a = np.asarray(_mask(L))
    if np.iscomplexobj(a):
        a = hermitian(a)
    elif not np.array_equal(a, a.T):
        raise ValueError("mask must be symmetric")
    n = a.shape[0]
    starts = []
    for i in range(restarts):
        g = _rng(seed, i)
        starts.append(g.standard_normal(n) + 1j * g.standard_normal(n))
    starts.extend(np.eye(n, dtype=complex))
    starts.append(np.ones(n, dtype=complex))
    for x0 in initial or ():
        starts.append(np.asarray(x0, dtype=complex))
    x = np.array(starts)
    x /= np.linalg.norm(x, axis=1, keepdims=True)

    def objective(xs: np.ndarray) -> np.ndarray:
        return _batched_trace_norm_hermitian(a * xs[:, :, None] * xs.conj()[:, None, :])

    val = objective(x)
    active = np.ones(len(x), dtype=bool)
    iters = 0
    for iters in range(1, max_iters + 1):
        xa = x[active]
        m = a * xa[:, :, None] * xa.conj()[:, None, :]
        w, u = np.linalg.eigh(m)
        sign = (u * np.sign(w)[:, None, :]) @ np.conj(np.swapaxes(u, 1, 2))
        _, vecs = np.linalg.eigh(a * sign)
        cand = vecs[:, :, -1]
        cval = objective(cand)
        gain = cval - val[active]
        idx = np.flatnonzero(active)
        better = gain > 0
        x[idx[better]] = cand[better]
        val[idx[better]] = cval[better]
        active[idx[gain <= IMPROVEMENT_TOL]] = False
        if not active.any():
            break
    best = x[int(np.argmax(val))]
    return EstimateResult(hermitian_objective(a, best), best, len(starts), iters, int(seed))


def estimate_schur_norm_sampling(L, q: float, samples: int = 200, seed: int = 0,
                                 initial: Optional[Sequence[np.ndarray]] = None) -> EstimateResult:
    """Largest ``||L o A||_q / ||A||_q`` over Ginibre samples ``A`` (plus ``initial``)."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    mask = np.asarray(_mask(L))
    n = mask.shape[0]
    rng = _rng(seed)
    a = (rng.standard_normal((samples, n, n)) + 1j * rng.standard_normal((samples, n, n))) / math.sqrt(2.0)
    if initial:
        a = np.concatenate([a, np.array(initial, dtype=complex)])
    num = np.linalg.svd(mask * a, compute_uv=False)
    den = np.linalg.svd(a, compute_uv=False)
    ratios = np.array([schatten_from_singular_values(p, q) / schatten_from_singular_values(r, q)
                       for p, r in zip(num, den)])
    i = int(np.argmax(ratios))
    value = schatten_norm(mask * a[i], q) / schatten_norm(a[i], q)
    return EstimateResult(value, a[i], len(a), len(a), int(seed))


def commutator_ratio(a: np.ndarray, fb: np.ndarray, b: np.ndarray, q: float) -> tuple[float, float]:
    """``(||[A, f(B)]||_q, ||[A, B]||_q)``."""
    return (schatten_norm(a @ fb - fb @ a, q), schatten_norm(a @ b - b @ a, q))


def estimate_commutator_ratio(f, B, q: float, samples: int = 200, seed: int = 0,
                              degenerate_tol: float = 1e-12) -> EstimateResult:
    """Largest ``||[A, f(B)]||_q / ||[A, B]||_q`` over Ginibre ``A``.

    Samples with ``||[A, B]||_q < degenerate_tol`` are skipped; if all are,
    ``ValueError`` is raised (``B`` is then a multiple of the identity).
    """
    b = hermitian(B)
    fb = matrix_function(b, f)
    n = b.shape[0]
    rng = _rng(seed)
    a = (rng.standard_normal((samples, n, n)) + 1j * rng.standard_normal((samples, n, n))) / math.sqrt(2.0)
    top = np.linalg.svd(a @ fb - fb @ a, compute_uv=False)
    bot = np.linalg.svd(a @ b - b @ a, compute_uv=False)
    best, best_i = -math.inf, -1
    for i in range(samples):
        d = schatten_from_singular_values(bot[i], q)
        if d < degenerate_tol:
            continue
        r = schatten_from_singular_values(top[i], q) / d
        if r > best:
            best, best_i = r, i
    if best_i < 0:
        raise ValueError("every sample gave a vanishing commutator [A, B]")
    num, den = commutator_ratio(a[best_i], fb, b, q)
    return EstimateResult(num / den, a[best_i], samples, samples, int(seed))


def _psd_sqrt(h: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(h)
    return (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T


def ando_wstar_witness(Y, Z, tol: float = 1e-12) -> float:
    """``||(I - Z)^{1/2} Y* (I + Z)^{1/2}||_1`` for a Hermitian contraction ``Z``."""
    y = as_matrix(Y)
    z = hermitian(Z)
    if y.shape != z.shape:
        raise ValueError(f"shape mismatch: {y.shape} vs {z.shape}")
    if np.linalg.norm(z, 2) > 1.0 + tol:
        raise ValueError("Z is not a contraction")
    eye = np.eye(z.shape[0])
    return schatten_norm(_psd_sqrt(eye - z) @ y.conj().T @ _psd_sqrt(eye + z), 1.0)


def estimate_wstar_norm(Y, samples: int = 1000, seed: int = 0) -> EstimateResult:
    """Largest Ando witness over ``Z = 0`` and sampled Hermitian contractions.

    ``Z = 0`` gives ``||Y||_1``, so the result never falls below the trace norm.
    """
    y = as_matrix(Y)
    n = y.shape[0]
    best_z = np.zeros((n, n), dtype=complex)
    best = ando_wstar_witness(y, best_z)
    for i in range(samples):
        z = random_ensemble("hermitian_contraction", n, _rng(seed, i))
        val = ando_wstar_witness(y, z)
        if val > best:
            best, best_z = val, z
    return EstimateResult(best, best_z, samples + 1, samples + 1, int(seed))
