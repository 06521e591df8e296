"""Verification campaigns and worked demonstrations.

A campaign pairs every bound with the numerical lower estimates over a grid
of (function, dimension, Schatten index) cases and records the margins.
Reports are plain JSON-ready dicts; ``dumps_report`` gives the canonical
byte representation.
"""

from __future__ import annotations

import json
import logging
import math
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .bounds import PHI, best_bound, bound_abs, bound_composed_ratio, bound_convex, parse_q, q_key
from .estimators import (
    commutator_ratio,
    estimate_commutator_ratio,
    estimate_schur_norm_hermitian,
    estimate_schur_norm_sampling,
)
from .functions import ScalarFunction, log, logit, parse_function
from .loewner import Spectrum, build_loewner
from .matrixcore import haar_unitary, hermitian, matrix_function, random_ensemble

logger = logging.getLogger(__name__)

THREADS_ENV = "SCHURLOEWNER_THREADS"
HERMITIAN_ENSEMBLES = ("gue", "density", "hermitian_contraction")

DEFAULT_FUNCTIONS = ["identity", "sqrt", "log", "abs", "square", "power:0.5", "power:2", "softplus_conjugate"]
DEFAULT_DIMS = [2, 3, 4, 6, 8]
DEFAULT_Q = [1.0, 1.5, 2.0, 3.0, math.inf]


@dataclass
class CampaignConfig:
    functions: list[str] = field(default_factory=lambda: list(DEFAULT_FUNCTIONS))
    dims: list[int] = field(default_factory=lambda: list(DEFAULT_DIMS))
    q_values: list[float] = field(default_factory=lambda: list(DEFAULT_Q))
    spectra_source: str = "auto"
    samples: int = 200
    restarts: int = 64
    max_iters: int = 500
    master_seed: int = 42
    tolerance: float = 1e-8

    def __post_init__(self):
        self.q_values = [parse_q(q) for q in self.q_values]
        self.dims = [int(n) for n in self.dims]
        if not self.functions or not self.dims or not self.q_values:
            raise ValueError("functions, dims and q_values must be non-empty")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if any(n < 1 for n in self.dims):
            raise ValueError("dims must be positive")
        src = self.spectra_source
        if src != "auto" and src not in HERMITIAN_ENSEMBLES and not src.startswith("file:"):
            raise ValueError(f"spectra_source must be 'auto', one of {HERMITIAN_ENSEMBLES} or 'file:PATH'")

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "CampaignConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_json(self) -> dict:
        out = asdict(self)
        out["q_values"] = [q_key(q) for q in self.q_values]
        return out


def case_seed(master_seed: int, *parts) -> int:
    """Stable per-case seed; independent of execution order."""
    key = "|".join(str(p) for p in parts).encode()
    return int(np.random.SeedSequence([int(master_seed), zlib.crc32(key)]).generate_state(1, np.uint64)[0])


def draw_spectrum(f: ScalarFunction, n: int, rng: np.random.Generator, source: str = "auto") -> np.ndarray:
    """Random spectrum inside the region where ``f`` has its declared shape.

    ``auto``: log-uniform on [0.1, 10] for functions defined on a half line,
    uniform on [-2, 2] minus (-1e-6, 1e-6) for functions on the whole line,
    and the middle 90% of a bounded domain otherwise.
    """
    if source in HERMITIAN_ENSEMBLES:
        return np.linalg.eigvalsh(random_ensemble(source, n, rng))
    if source.startswith("file:"):
        return Spectrum.load(source[5:]).array
    dom = f.domain
    if math.isinf(dom.lo) and math.isinf(dom.hi):
        mag = rng.uniform(1e-6, 2.0, n)
        return np.where(rng.random(n) < 0.5, -mag, mag)
    if math.isinf(dom.hi):
        return np.exp(rng.uniform(math.log(0.1), math.log(10.0), n))
    width = dom.hi - dom.lo
    return rng.uniform(dom.lo + 0.05 * width, dom.hi - 0.05 * width, n)


def _run_case(cfg: CampaignConfig, fspec: str, n: int, q: float) -> dict:
    key = f"{fspec}|n={n}|q={q_key(q)}"
    rec: dict = {"key": key, "function": fspec, "n": n, "q": q_key(q), "error": None}
    try:
        f = parse_function(fspec)
        srng = np.random.default_rng(case_seed(cfg.master_seed, fspec, n, "spectrum"))
        s = Spectrum(draw_spectrum(f, n, srng, cfg.spectra_source))
        u = haar_unitary(len(s), srng)
        b = hermitian((u * s.array) @ u.conj().T)
        L = build_loewner(f, s)
        report = best_bound(f, s, q)
        bound = report.best(q)
        rec["spectrum"] = list(s.values)
        rec["bound"] = bound
        rec["bound_report"] = report.to_json()
        seed = case_seed(cfg.master_seed, fspec, n, q_key(q), "estimates")
        estimates = {
            "sampling": estimate_schur_norm_sampling(L, q, cfg.samples, seed),
            "commutator": estimate_commutator_ratio(f, b, q, cfg.samples, seed),
        }
        if q == 1.0 or math.isinf(q):
            estimates["hermitian"] = estimate_schur_norm_hermitian(
                L, cfg.restarts, cfg.max_iters, case_seed(cfg.master_seed, fspec, n, "hermitian"))
        rec["estimates"] = {k: e.to_json(witness=False) for k, e in estimates.items()}
        if bound is None:
            rec["margins"] = {}
            rec["min_margin"] = None
            rec["violation"] = False
            rec["error"] = report.diagnostic
        else:
            margins = {k: bound - e.value for k, e in estimates.items()}
            rec["margins"] = margins
            rec["min_margin"] = min(margins.values())
            rec["violation"] = bool(rec["min_margin"] < -cfg.tolerance * max(1.0, abs(bound)))
    except Exception as exc:  # noqa: BLE001 - case errors are data, not crashes
        logger.warning("case %s failed: %s", key, exc)
        rec["error"] = f"{type(exc).__name__}: {exc}"
        rec.setdefault("violation", False)
    return rec


def thread_count() -> int:
    cap = os.environ.get(THREADS_ENV)
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def _sort_key(rec: dict) -> tuple:
    q = math.inf if rec["q"] == "inf" else float(rec["q"])
    return (rec["function"], rec["n"], q)


def run_campaign(cfg: CampaignConfig, threads: Optional[int] = None) -> dict:
    """Run every (function, n, q) case and summarize margins and violations."""
    cases = [(fs, n, q) for fs in cfg.functions for n in cfg.dims for q in cfg.q_values]
    threads = threads or thread_count()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            records = list(pool.map(lambda c: _run_case(cfg, *c), cases))
    else:
        records = [_run_case(cfg, *c) for c in cases]
    records.sort(key=_sort_key)
    margins = [r["min_margin"] for r in records if r.get("min_margin") is not None]
    summary = {
        "cases": len(records),
        "violations": sum(1 for r in records if r["violation"]),
        "errors": sum(1 for r in records if r["error"]),
        "min_margin": min(margins) if margins else None,
    }
    return {
        "header": {
            "ensembles": "A ~ Ginibre (E|a_ij|^2 = 1); B = U diag(s) U* with U Haar via QR; "
                         "GUE = (G + G*)/sqrt(2), unit off-diagonal and diagonal variance",
            "phi": PHI,
        },
        "records": records,
        "summary": summary,
        "provenance": {"config": cfg.to_json(), "seed": cfg.master_seed, "version": __version__},
    }


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def report_schema() -> dict:
    """The JSON schema that campaign reports conform to."""
    text = resources.files("schurloewner").joinpath("schemas/verification_report.schema.json").read_text()
    return json.loads(text)


# ---------------------------------------------------------------------------
# demonstrations
# ---------------------------------------------------------------------------


def demo_abs(n: int, r: int, seed: int = 0, spectra: int = 5, samples: int = 200,
             restarts: int = 64, tolerance: float = 1e-8) -> dict:
    """Estimates for ``|x|`` at spectra with ``r`` positive eigenvalues against the sign-count bound."""
    if not 0 <= r <= n:
        raise ValueError(f"need 0 <= r <= n, got r={r}, n={n}")
    f = parse_function("abs")
    bound = bound_abs(n, r)
    draws = []
    violations = 0
    herm_values = []
    for i in range(spectra):
        rng = np.random.default_rng([int(seed), i])
        mag = rng.uniform(0.1, 2.0, n)
        s = Spectrum(np.concatenate([mag[:r], -mag[r:]]))
        u = haar_unitary(n, rng)
        b = (u * s.array) @ u.conj().T
        L = build_loewner(f, s)
        herm = estimate_schur_norm_hermitian(L, restarts, seed=case_seed(seed, "abs", n, r, i))
        ratios = {q_key(q): estimate_commutator_ratio(f, b, q, samples, case_seed(seed, "abs", n, r, i, q_key(q))).value
                  for q in (1.0, 2.0, math.inf)}
        herm_values.append(herm.value)
        est = [herm.value, *ratios.values()]
        bad = sum(1 for e in est if e > bound * (1 + tolerance))
        violations += bad
        draws.append({"spectrum": list(s.values), "convex_bound": bound_convex(f, s),
                      "hermitian_estimate": herm.value, "commutator_ratios": ratios, "violations": bad})
    out = {"demo": "abs", "n": n, "r": r, "seed": seed, "bound": bound, "draws": draws, "violations": violations}
    if n == 2:
        lo, hi = 1.0, math.sqrt(2.0)
        out["band"] = {"lower": lo, "upper": hi, "min_estimate": min(herm_values), "max_estimate": max(herm_values),
                       "in_band": all(lo - 1e-9 <= x <= hi + 1e-6 for x in herm_values)}
    return out


def entropy_logit_case(c, a, tolerance: float = 1e-8) -> dict:
    """Compare ``||[A, log C]||_1`` with ``phi ||[A, log C - log(I - C)]||_1`` for one pair."""
    c = hermitian(c)
    a = np.asarray(a, dtype=complex)
    eig = np.linalg.eigvalsh(c)
    log_c = matrix_function(c, log())
    logit_c = matrix_function(c, logit())
    lhs, base = commutator_ratio(a, log_c, logit_c, 1.0)
    rec = {"eigenvalues": eig.tolist(), "lhs": lhs, "rhs": PHI * base}
    if base < 1e-12 * max(1.0, float(np.abs(a).max())):
        rec.update(degenerate=True, ok=True)
        return rec
    composed = bound_composed_ratio(log(), logit(), eig)
    ratio = lhs / base
    rec.update(degenerate=False, ratio=ratio, composed_bound=composed,
               ok=bool(lhs <= PHI * base * (1 + tolerance)),
               composed_ok=bool(ratio <= composed * (1 + tolerance)))
    return rec


def demo_entropy_logit(n: int, samples: int = 100, seed: int = 0, tolerance: float = 1e-8) -> dict:
    """Random density matrices ``C`` and Ginibre ``A``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    cases = []
    for i in range(samples):
        rng = np.random.default_rng([int(seed), i])
        while True:
            c = random_ensemble("density", n, rng)
            eig = np.linalg.eigvalsh(c)
            if eig[0] > 1e-10 and eig[-1] < 1 - 1e-10:
                break
        a = random_ensemble("ginibre", n, rng)
        cases.append(entropy_logit_case(c, a, tolerance))
    live = [c for c in cases if not c["degenerate"]]
    return {
        "demo": "entropy-logit", "n": n, "seed": seed, "samples": samples, "phi": PHI,
        "failures": sum(1 for c in cases if not c["ok"]),
        "composed_failures": sum(1 for c in live if not c["composed_ok"]),
        "degenerate": len(cases) - len(live),
        "max_ratio": max((c["ratio"] for c in live), default=None),
        "cases": cases,
    }


def strict_upper_mask(n: int) -> np.ndarray:
    return np.triu(np.ones((n, n)), 1)


def hermitian_dilation(t: np.ndarray) -> np.ndarray:
    """``[[0, T], [T^T, 0]]``, whose Schur multiplier norm equals that of ``T``."""
    z = np.zeros_like(t)
    return np.block([[z, t], [t.T, z]])


def demo_triangular(dims, samples: int = 200, seed: int = 0, restarts: int = 64) -> dict:
    """Strictly upper-triangular all-ones masks of growing size.

    The masks nest, so each estimate is warm-started with the previous
    witness padded by zeros; both estimate sequences are therefore
    non-decreasing in ``n``.
    """
    dims = [int(n) for n in dims]
    if dims != sorted(dims):
        raise ValueError("dims must be ascending")
    rows = []
    prev_a = prev_x = None
    prev_n = 0
    for n in dims:
        t = strict_upper_mask(n)
        init_a = init_x = None
        if prev_a is not None:
            pa = np.zeros((n, n), dtype=complex)
            pa[:prev_n, :prev_n] = prev_a
            init_a = [pa]
            # dilation coordinates: first block rows 0..n-1, second n..2n-1
            px = np.zeros(2 * n, dtype=complex)
            px[:prev_n] = prev_x[:prev_n]
            px[n:n + prev_n] = prev_x[prev_n:]
            init_x = [px]
        samp = estimate_schur_norm_sampling(t, math.inf, samples, case_seed(seed, "tri", n), init_a)
        herm = estimate_schur_norm_hermitian(hermitian_dilation(t), restarts, seed=case_seed(seed, "tri-dil", n),
                                             initial=init_x)
        rows.append({"n": n, "sampling": samp.value, "dilation": herm.value})
        prev_a, prev_x, prev_n = samp.witness, herm.witness, n
    mono = all(b["dilation"] >= a["dilation"] - 1e-9 and b["sampling"] >= a["sampling"] - 1e-9
               for a, b in zip(rows, rows[1:]))
    return {"demo": "triangular", "seed": seed, "rows": rows, "monotone": mono}
