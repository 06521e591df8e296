"""Upper bounds on Schur multiplier norms of Loewner matrices.

Notation used throughout: ``d_j = f'(b_j)`` at the ascending spectrum,
``alpha = d_1`` and ``beta = d_n``.  For a concave ``f`` the derivative
values decrease, so ``alpha >= beta``.

Validity by Schatten index:

* operator-monotone bound: every q;
* Frobenius bound: q = 2;
* concave/convex, spectrum-free and ``abs`` bounds: q = 1 and q = inf, which
  coincide by self-duality of Schur multiplier norms.

Other q are reached by interpolating between the q = 1 and q = 2 values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .functions import ScalarFunction
from .loewner import Spectrum

PHI = (1.0 + math.sqrt(5.0)) / 2.0
INV_PHI = 1.0 / PHI

AFFINE_TOL = 1e-12
DEGENERATE_TOL = 1e-12
STANDARD_TOL = 1e-9

ENDPOINT_IDS = ("opmono", "concave_recursive", "concave_closed", "convex_recursive",
                "convex_closed", "spectrum_free", "abs_sign_count")


class NotApplicable(Exception):
    """The function lacks the shape property a bound needs on this spectrum."""


def _spectrum(s) -> Spectrum:
    return s if isinstance(s, Spectrum) else Spectrum(s)


def _derivatives(f: ScalarFunction, s: Spectrum) -> np.ndarray:
    return np.array([f.derivative(b) for b in s.values])


def v(a: float) -> float:
    """Maximum of ``a sin^2(t) + sin(2t)`` over ``t``; increasing in ``a``."""
    h = a / 2.0
    return h + math.sqrt(1.0 + h * h)


def _check_standardized(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if k.ndim != 1 or k.size < 2:
        raise ValueError("standardized diagonal needs at least two entries")
    if abs(k[0] - 1.0) > STANDARD_TOL or abs(k[-1]) > STANDARD_TOL:
        raise ValueError(f"standardized diagonal must start at 1 and end at 0, got {k[0]}, {k[-1]}")
    if np.any(np.diff(k) > STANDARD_TOL):
        raise ValueError("standardized diagonal must be non-increasing")
    return k


def bound_standardized_closed(k: Sequence[float]) -> float:
    """``1 + (1/phi) * sum(1 - k_j)`` for diagonals running from 1 down to 0."""
    k = _check_standardized(k)
    return 1.0 + INV_PHI * float(np.sum(1.0 - k))


def bound_standardized_recursive(k: Sequence[float]) -> float:
    """Block-peeling recursion for the same class of matrices.

    The last row and column are split off repeatedly.  With
    ``a_m = (k_{n-m-1} - k_{n-m}) / (1 - k_{n-m})`` (1-based ``k``), the norm of
    the remaining leading block obeys ``s_m <= v(a_m + (1 - a_m) s_{m+1})``,
    starting from the 1x1 block ``(k_1) = (1)`` whose norm is 1.  Never
    larger than :func:`bound_standardized_closed`.
    """
    k = np.clip(_check_standardized(k), 0.0, 1.0)
    n = k.size
    s = 1.0
    for m in range(n - 2, -1, -1):
        denom = 1.0 - k[n - m - 1]
        if denom <= DEGENERATE_TOL:
            # leading block is all ones
            s = 1.0
            continue
        a = min(1.0, max(0.0, (k[n - m - 2] - k[n - m - 1]) / denom))
        s = v(a + (1.0 - a) * s)
    return s


def concave_bound_from_derivatives(d: Sequence[float], method: str = "closed") -> float:
    """Bound on ``||S_L||`` from derivative values of a concave function.

    ``d`` are the derivative values at the ascending spectrum and must be
    non-increasing.  ``method`` is ``"closed"`` or ``"recursive"``.
    """
    d = np.asarray(d, dtype=float)
    alpha, beta = float(d[0]), float(d[-1])
    scale = max(1.0, abs(alpha), abs(beta))
    if np.any(np.diff(d) > 1e-9 * scale):
        raise ValueError("derivative values are not non-increasing; function is not concave here")
    width = alpha - beta
    if width <= AFFINE_TOL:
        return abs(alpha)
    if method == "closed":
        return width + min(abs(beta) + INV_PHI * float(np.sum(alpha - d)),
                           abs(alpha) + INV_PHI * float(np.sum(d - beta)))
    if method == "recursive":
        kg = np.minimum.accumulate(np.clip((d - beta) / width, 0.0, 1.0))
        kh = np.minimum.accumulate(np.clip((alpha - d[::-1]) / width, 0.0, 1.0))
        kg[0], kg[-1], kh[0], kh[-1] = 1.0, 0.0, 1.0, 0.0
        return min(abs(beta) + width * bound_standardized_recursive(kg),
                   abs(alpha) + width * bound_standardized_recursive(kh))
    raise ValueError(f"unknown method {method!r}; expected 'closed' or 'recursive'")


def bound_opmono(f: ScalarFunction, s) -> float:
    s = _spectrum(s)
    if not f.is_operator_monotone_on(s.lo, s.hi):
        raise NotApplicable(f"{f.label} is not flagged operator monotone on [{s.lo}, {s.hi}]")
    return f.derivative(s.lo)


def bound_frobenius(f: ScalarFunction, s) -> float:
    s = _spectrum(s)
    if not (f.is_concave_on(s.lo, s.hi) or f.is_convex_on(s.lo, s.hi)):
        raise NotApplicable(f"{f.label} is neither concave nor convex on [{s.lo}, {s.hi}]")
    return max(abs(f.derivative(s.lo)), abs(f.derivative(s.hi)))


def bound_concave(f: ScalarFunction, s, method: str = "recursive") -> float:
    s = _spectrum(s)
    if not f.is_concave_on(s.lo, s.hi):
        raise NotApplicable(f"{f.label} is not flagged concave on [{s.lo}, {s.hi}]")
    return concave_bound_from_derivatives(_derivatives(f, s), method)


def convex_bound_from_derivatives(d: Sequence[float], method: str = "closed") -> float:
    d = np.asarray(d, dtype=float)
    mirrored = concave_bound_from_derivatives(-d, method)
    if method != "closed":
        return mirrored
    alpha, beta = float(d[0]), float(d[-1])
    if beta - alpha <= AFFINE_TOL:
        direct = abs(alpha)
    else:
        direct = (beta - alpha) + min(abs(beta) + INV_PHI * float(np.sum(d - alpha)),
                                      abs(alpha) + INV_PHI * float(np.sum(beta - d)))
    if abs(direct - mirrored) > 1e-12 * max(1.0, abs(direct)):
        raise AssertionError(f"convex bound mismatch: {direct} vs {mirrored}")
    return direct


def bound_convex(f: ScalarFunction, s, method: str = "recursive") -> float:
    s = _spectrum(s)
    if not f.is_convex_on(s.lo, s.hi):
        raise NotApplicable(f"{f.label} is not flagged convex on [{s.lo}, {s.hi}]")
    return convex_bound_from_derivatives(_derivatives(f, s), method)


def bound_spectrum_free(f: ScalarFunction, b1: float, bn: float, n: int) -> float:
    """Bound using only the spectral interval ``[b1, bn]`` and the size ``n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (f.is_concave_on(b1, bn) or f.is_convex_on(b1, bn)):
        raise NotApplicable(f"{f.label} is neither concave nor convex on [{b1}, {bn}]")
    alpha, beta = f.derivative(b1), f.derivative(bn)
    return abs(alpha - beta) * (1.0 + (n - 1) * INV_PHI) + min(abs(alpha), abs(beta))


def bound_abs(n: int, r: int) -> float:
    """Bound for ``|x|`` at a spectrum with ``r`` positive and ``n - r`` negative values."""
    if not 0 <= r <= n:
        raise ValueError(f"need 0 <= r <= n, got r={r}, n={n}")
    if r in (0, n):
        return 1.0
    return 3.0 + 2.0 * INV_PHI * min(r, n - r)


def _interp_exponent(q: float) -> Optional[float]:
    """Weight on the q = 2 value, or None when q sits at the 1/inf endpoint."""
    if q <= 1.0 or math.isinf(q):
        return None
    if q > 2.0:
        q = q / (q - 1.0)
    return q


def interpolate_q(bound_1: float, bound_2: float, q: float) -> float:
    """``bound_1**(2-q) * bound_2**(q-1)`` for ``1 <= q <= 2``; larger q use the dual index."""
    q = float(q)
    qq = _interp_exponent(q)
    if qq is None:
        return float(bound_1)
    return float(bound_1) ** (2.0 - qq) * float(bound_2) ** (qq - 1.0)


def interpolate_q_riesz_thorin(bound_1: float, bound_2: float, q: float) -> float:
    """Same interpolation with exponents ``2/q - 1`` and ``2 - 2/q``; reported for comparison."""
    qq = _interp_exponent(float(q))
    if qq is None:
        return float(bound_1)
    return float(bound_1) ** (2.0 / qq - 1.0) * float(bound_2) ** (2.0 - 2.0 / qq)


def q_key(q: float) -> str:
    q = float(q)
    if math.isinf(q):
        return "inf"
    return repr(int(q)) if q.is_integer() else repr(q)


def parse_q(text) -> float:
    if isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    q = float(text)
    if q < 1:
        raise ValueError(f"Schatten index must be >= 1, got {q}")
    return q


@dataclass
class BoundRecord:
    id: str
    applicable: bool
    value: Optional[float] = None
    valid_q: str = ""
    reason: Optional[str] = None

    def to_json(self) -> dict:
        out = {"id": self.id, "applicable": self.applicable, "value": self.value, "valid_q": self.valid_q}
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass
class BoundReport:
    function: str
    spectrum: tuple[float, ...]
    bounds: list[BoundRecord]
    best_per_q: dict[str, float]
    inputs: dict
    method: str
    interpolation_alternative: dict[str, float] = field(default_factory=dict)
    diagnostic: Optional[str] = None
    phi: float = PHI

    def record(self, bound_id: str) -> BoundRecord:
        for r in self.bounds:
            if r.id == bound_id:
                return r
        raise KeyError(bound_id)

    def best(self, q: float) -> Optional[float]:
        return self.best_per_q.get(q_key(q))

    def to_json(self) -> dict:
        out = {
            "function": self.function,
            "spectrum": list(self.spectrum),
            "bounds": [r.to_json() for r in self.bounds],
            "best_per_q": dict(self.best_per_q),
            "inputs": self.inputs,
            "method": self.method,
            "interpolation_alternative": dict(self.interpolation_alternative),
            "phi": self.phi,
        }
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        return out


def best_bound(f: ScalarFunction, s, q: float | Iterable[float] = (1.0, 2.0, math.inf),
               method: str = "recursive") -> BoundReport:
    """Evaluate every bound and take the smallest valid one per Schatten index.

    ``best_per_q`` always has entries for 1, 2 and inf when anything applies,
    plus one entry per requested ``q``.
    """
    s = _spectrum(s)
    qs = [float(q)] if np.isscalar(q) else [float(x) for x in q]
    lo, hi, n = s.lo, s.hi, len(s)
    records: list[BoundRecord] = []

    def attempt(bound_id: str, valid_q: str, fn) -> None:
        try:
            records.append(BoundRecord(bound_id, True, float(fn()), valid_q))
        except NotApplicable as exc:
            records.append(BoundRecord(bound_id, False, None, valid_q, str(exc)))

    attempt("opmono", "all", lambda: bound_opmono(f, s))
    attempt("frobenius", "2", lambda: bound_frobenius(f, s))
    for m in ("closed", "recursive"):
        attempt(f"concave_{m}", "1,inf", lambda m=m: bound_concave(f, s, m))
        attempt(f"convex_{m}", "1,inf", lambda m=m: bound_convex(f, s, m))
    attempt("spectrum_free", "1,inf", lambda: bound_spectrum_free(f, lo, hi, n))
    if f.name == "abs":
        r = sum(1 for b in s.values if b > 0)
        records.append(BoundRecord("abs_sign_count", True, bound_abs(n, r), "1,inf"))

    inputs: dict = {"n": n}
    try:
        inputs["alpha"] = f.derivative(lo)
        inputs["beta"] = f.derivative(hi)
        inputs["k_diagonal"] = [f.derivative(b) for b in s.values]
    except ValueError as exc:
        inputs["derivative_error"] = str(exc)

    skip = {"concave_closed", "convex_closed"} if method == "recursive" else {"concave_recursive", "convex_recursive"}
    values = {r.id: r.value for r in records if r.applicable}
    endpoint = [v for k, v in values.items() if k in ENDPOINT_IDS and k not in skip]
    frob = [v for k, v in values.items() if k in ("frobenius", "opmono")]
    b_end = min(endpoint) if endpoint else None
    b_2 = min(frob) if frob else None

    best: dict[str, float] = {}
    alt: dict[str, float] = {}
    diagnostic = None
    if b_end is not None:
        # ||S_L||_2 <= ||S_L||_1, so the q=1 value also caps the q=2 value
        b_2 = b_end if b_2 is None else min(b_2, b_end)
        for qq in sorted({1.0, 2.0, math.inf, *qs}):
            best[q_key(qq)] = interpolate_q(b_end, b_2, qq)
            alt[q_key(qq)] = interpolate_q_riesz_thorin(b_end, b_2, qq)
            if "opmono" in values:
                best[q_key(qq)] = min(best[q_key(qq)], values["opmono"])
    elif b_2 is not None:
        best["2"] = b_2
    else:
        diagnostic = f"no bound applies to {f.label} on [{lo}, {hi}]"

    return BoundReport(f.label, s.values, records, best, inputs, method, alt, diagnostic)


def bound_composed_ratio(h: ScalarFunction, g: ScalarFunction, c, method: str = "closed",
                         grid_size: int = 256) -> float:
    """Bound on ``||[A, h(C)]||_1 / ||[A, g(C)]||_1`` for Hermitian ``C`` with spectrum ``c``.

    With ``f = h o g^{-1}`` the chain rule gives ``f'(g(c)) = h'(c) / g'(c)``,
    so only derivatives of ``h`` and ``g`` are needed.  ``g`` must be
    increasing on ``[c_1, c_n]`` (checked on a grid) and ``f`` concave, i.e.
    ``h'/g'`` non-increasing along the spectrum.
    """
    c = _spectrum(c)
    grid = np.linspace(c.lo, c.hi, grid_size)
    gv = np.array([g.evaluate(x) for x in grid])
    if np.any(np.diff(gv) < 0):
        raise ValueError(f"{g.label} is not increasing on [{c.lo}, {c.hi}]")
    d = np.array([h.derivative(x) / g.derivative(x) for x in c.values])
    return concave_bound_from_derivatives(d, method)
