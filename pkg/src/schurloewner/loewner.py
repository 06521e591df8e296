"""Loewner (divided-difference) matrices of scalar functions at spectra."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .functions import ScalarFunction

DEFAULT_DEG_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Real eigenvalues, stored in non-decreasing order."""

    values: tuple[float, ...]

    def __init__(self, values: Iterable[float]):
        vals = tuple(sorted(float(v) for v in values))
        if not vals:
            raise ValueError("spectrum must be non-empty")
        if not all(np.isfinite(vals)):
            raise ValueError("spectrum has non-finite values")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values)

    @property
    def lo(self) -> float:
        return self.values[0]

    @property
    def hi(self) -> float:
        return self.values[-1]

    @classmethod
    def load(cls, path: str | Path) -> "Spectrum":
        """Read a JSON array (``.json``) or a CSV file with one value per line."""
        path = Path(path)
        if path.suffix.lower() == ".json":
            return cls(json.loads(path.read_text()))
        with path.open(newline="") as fh:
            return cls(float(row[0]) for row in csv.reader(fh) if row and row[0].strip())


@dataclass(frozen=True, eq=False)
class LoewnerMatrix:
    entries: np.ndarray
    spectrum: Spectrum
    function: str

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def to_json(self) -> dict:
        return {"function": self.function, "spectrum": list(self.spectrum.values),
                "n": self.n, "entries": self.entries.tolist()}


def build_loewner(f: ScalarFunction, s: Spectrum | Iterable[float],
                  deg_tol: float = DEFAULT_DEG_TOL) -> LoewnerMatrix:
    """Divided differences of ``f`` at ``s``.

    Pairs closer than ``deg_tol * max(1, |b_i|, |b_j|)`` get the derivative
    at their midpoint instead, which is the limit of the divided difference.
    """
    if not isinstance(s, Spectrum):
        s = Spectrum(s)
    b = s.values
    n = len(b)
    for x in b:
        f.evaluate(x)
    out = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            bi, bj = b[i], b[j]
            if abs(bi - bj) > deg_tol * max(1.0, abs(bi), abs(bj)):
                v = f.divided_difference(bi, bj)
            else:
                v = f.derivative((bi + bj) / 2)
            out[i, j] = out[j, i] = v
    out.setflags(write=False)
    return LoewnerMatrix(out, s, f.label)


def _entries(L) -> np.ndarray:
    return L.entries if isinstance(L, LoewnerMatrix) else np.asarray(L, dtype=float)


@dataclass
class RelationsReport:
    passed: bool
    worst_violation: float
    relation: Optional[str] = None
    indices: Optional[tuple[int, ...]] = None

    def to_json(self) -> dict:
        return {"passed": self.passed, "worst_violation": self.worst_violation,
                "relation": self.relation,
                "indices": None if self.indices is None else list(self.indices)}


def check_relations_R(L, tol: float = 1e-10) -> RelationsReport:
    """Test the ordering relations obeyed by Loewner matrices of concave functions.

    With indices 0-based: symmetry; ``L[i,j] >= L[i,k]`` for ``i <= j < k``;
    ``L[j,i] >= L[k,i]`` for ``j < k <= i``; and ``L[0,0] >= L[i,j] >= L[-1,-1]``.
    """
    a = _entries(L)
    n = a.shape[0]
    worst = 0.0
    where: tuple = (None, None)

    def note(gap: float, relation: str, idx: tuple[int, ...]) -> None:
        nonlocal worst, where
        if gap > worst:
            worst, where = gap, (relation, idx)

    asym = np.abs(a - a.T)
    if asym.max() > 0:
        i, j = np.unravel_index(np.argmax(asym), asym.shape)
        note(float(asym[i, j]), "symmetry", (int(i), int(j)))
    for i in range(n):
        for j in range(i, n):
            for k in range(j + 1, n):
                note(a[i, k] - a[i, j], "row", (i, j, k))
        for k in range(i + 1):
            for j in range(k):
                note(a[k, i] - a[j, i], "column", (j, k, i))
    hi = a - a[0, 0]
    i, j = np.unravel_index(np.argmax(hi), hi.shape)
    note(float(hi[i, j]), "upper_corner", (int(i), int(j)))
    lo = a[-1, -1] - a
    i, j = np.unravel_index(np.argmax(lo), lo.shape)
    note(float(lo[i, j]), "lower_corner", (int(i), int(j)))

    passed = worst <= tol
    relation, idx = where
    return RelationsReport(passed, float(worst), relation, idx)


def psd_check(L, tol: float = 1e-9) -> tuple[bool, float]:
    a = _entries(L)
    lam = float(np.linalg.eigvalsh((a + a.T) / 2)[0])
    return lam >= -tol, lam
