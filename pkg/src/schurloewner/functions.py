"""Scalar functions with closed-form derivatives and shape flags.

Each :class:`ScalarFunction` carries the intervals on which it is known to be
concave, convex, operator monotone or increasing.  The bounds module reads
these flags to decide which estimates apply to a given spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.special import expit, log_expit

INF = math.inf


class DomainError(ValueError):
    """A point lies outside the domain, or the function is not differentiable there."""


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    closed_lo: bool = False
    closed_hi: bool = False

    def contains(self, x: float) -> bool:
        if math.isnan(x):
            return False
        above = x > self.lo or (self.closed_lo and x == self.lo)
        below = x < self.hi or (self.closed_hi and x == self.hi)
        return above and below

    def interior_contains(self, x: float) -> bool:
        return self.lo < x < self.hi

    def covers(self, a: float, b: float) -> bool:
        return self.contains(a) and self.contains(b)

    def __str__(self) -> str:
        left = "[" if self.closed_lo else "("
        right = "]" if self.closed_hi else ")"
        return f"{left}{self.lo}, {self.hi}{right}"


REALS = Interval(-INF, INF)
NONNEGATIVE = Interval(0.0, INF, closed_lo=True)
POSITIVE = Interval(0.0, INF)


@dataclass(frozen=True)
class ScalarFunction:
    """A named real function of one variable.

    ``derivative`` must be a closed form; there is no finite-difference
    fallback.  ``divided_difference``, when given, computes
    ``(f(x) - f(y)) / (x - y)`` for ``x != y`` without cancellation.
    """

    name: str
    func: Callable[[float], float]
    deriv: Callable[[float], float]
    domain: Interval
    params: tuple = ()
    concave_on: Optional[Interval] = None
    convex_on: Optional[Interval] = None
    operator_monotone_on: Optional[Interval] = None
    increasing_on: Optional[Interval] = None
    affine: bool = False
    divdiff: Optional[Callable[[float, float], float]] = field(default=None, compare=False)

    def __post_init__(self):
        cc, cv = self.concave_on, self.convex_on
        if cc is not None and cv is not None and not self.affine:
            overlap = min(cc.hi, cv.hi) - max(cc.lo, cv.lo)
            if overlap > 0:
                raise ValueError(f"{self.name}: concave and convex on overlapping intervals but not affine")

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return f"{self.name}:{','.join(_fmt_param(p) for p in self.params)}"

    def evaluate(self, x: float) -> float:
        x = float(x)
        if not self.domain.contains(x):
            raise DomainError(f"{self.label}: {x!r} is outside the domain {self.domain}")
        return float(self.func(x))

    def derivative(self, x: float) -> float:
        x = float(x)
        if not self.domain.interior_contains(x):
            raise DomainError(f"{self.label}: derivative requested at {x!r}, outside the interior of {self.domain}")
        return float(self.deriv(x))

    def divided_difference(self, x: float, y: float) -> float:
        fx, fy = self.evaluate(x), self.evaluate(y)
        if self.divdiff is not None:
            return float(self.divdiff(float(x), float(y)))
        return (fx - fy) / (x - y)

    def is_concave_on(self, a: float, b: float) -> bool:
        return self.concave_on is not None and self.concave_on.covers(a, b)

    def is_convex_on(self, a: float, b: float) -> bool:
        return self.convex_on is not None and self.convex_on.covers(a, b)

    def is_operator_monotone_on(self, a: float, b: float) -> bool:
        return self.operator_monotone_on is not None and self.operator_monotone_on.covers(a, b)

    def is_increasing_on(self, a: float, b: float) -> bool:
        return self.increasing_on is not None and self.increasing_on.covers(a, b)

    def scaled(self, c: float) -> "ScalarFunction":
        """``x -> c f(x)`` for ``c > 0``; shape flags carry over."""
        if c <= 0:
            raise ValueError("scale factor must be positive")
        f, df, dd = self.func, self.deriv, self.divdiff
        return replace(
            self,
            name=f"{c}*{self.name}",
            func=lambda x: c * f(x),
            deriv=lambda x: c * df(x),
            divdiff=None if dd is None else (lambda x, y: c * dd(x, y)),
        )

    def shifted(self, d: float) -> "ScalarFunction":
        """``x -> f(x) + d``."""
        f = self.func
        return replace(self, name=f"{self.name}+{d}", func=lambda x: f(x) + d)


def _fmt_param(p: float) -> str:
    return repr(int(p)) if float(p).is_integer() else repr(float(p))


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def identity() -> ScalarFunction:
    return ScalarFunction(
        "identity", lambda x: x, lambda x: 1.0, REALS,
        concave_on=REALS, convex_on=REALS, operator_monotone_on=REALS,
        increasing_on=REALS, affine=True, divdiff=lambda x, y: 1.0,
    )


def affine(c: float, d: float = 0.0) -> ScalarFunction:
    c, d = float(c), float(d)
    return ScalarFunction(
        "affine", lambda x: c * x + d, lambda x: c, REALS, params=(c, d),
        concave_on=REALS, convex_on=REALS,
        operator_monotone_on=REALS if c >= 0 else None,
        increasing_on=REALS if c > 0 else None,
        affine=True, divdiff=lambda x, y: c,
    )


def _abs_deriv(x: float) -> float:
    if x == 0.0:
        raise DomainError("abs: not differentiable at 0")
    return 1.0 if x > 0 else -1.0


def _abs_divdiff(x: float, y: float) -> float:
    if x > 0 and y > 0:
        return 1.0
    if x < 0 and y < 0:
        return -1.0
    return (abs(x) - abs(y)) / (x - y)


def absolute() -> ScalarFunction:
    return ScalarFunction("abs", abs, _abs_deriv, REALS, convex_on=REALS, divdiff=_abs_divdiff)


def square() -> ScalarFunction:
    return ScalarFunction(
        "square", lambda x: x * x, lambda x: 2.0 * x, REALS,
        convex_on=REALS, increasing_on=NONNEGATIVE, divdiff=lambda x, y: x + y,
    )


def sqrt() -> ScalarFunction:
    return ScalarFunction(
        "sqrt", math.sqrt, lambda x: 0.5 / math.sqrt(x), NONNEGATIVE,
        concave_on=NONNEGATIVE, operator_monotone_on=NONNEGATIVE, increasing_on=NONNEGATIVE,
        divdiff=lambda x, y: 1.0 / (math.sqrt(x) + math.sqrt(y)),
    )


def _log_divdiff(x: float, y: float) -> float:
    return math.log1p((x - y) / y) / (x - y)


def log() -> ScalarFunction:
    return ScalarFunction(
        "log", math.log, lambda x: 1.0 / x, POSITIVE,
        concave_on=POSITIVE, operator_monotone_on=POSITIVE, increasing_on=POSITIVE,
        divdiff=_log_divdiff,
    )


def power(p: float) -> ScalarFunction:
    """``x -> x**p`` on ``[0, inf)`` for ``p > 0``."""
    p = float(p)
    if p <= 0:
        raise ValueError("power: exponent must be positive")

    def dd(x: float, y: float) -> float:
        if x == 0.0 or y == 0.0:
            z = x or y
            return z ** (p - 1.0)
        t = (x - y) / y
        return y ** p * math.expm1(p * math.log1p(t)) / (x - y)

    concave = p <= 1.0
    convex = p >= 1.0
    return ScalarFunction(
        "power", lambda x: x ** p, lambda x: p * x ** (p - 1.0), NONNEGATIVE, params=(p,),
        concave_on=NONNEGATIVE if concave else None,
        convex_on=NONNEGATIVE if convex else None,
        operator_monotone_on=NONNEGATIVE if concave else None,
        increasing_on=NONNEGATIVE, affine=(p == 1.0), divdiff=dd,
    )


def x_over_1_plus_x() -> ScalarFunction:
    dom = Interval(-1.0, INF)
    return ScalarFunction(
        "x_over_1_plus_x", lambda x: x / (1.0 + x), lambda x: 1.0 / (1.0 + x) ** 2, dom,
        concave_on=dom, operator_monotone_on=dom, increasing_on=dom,
        divdiff=lambda x, y: 1.0 / ((1.0 + x) * (1.0 + y)),
    )


def _logit_divdiff(x: float, y: float) -> float:
    d = x - y
    return (math.log1p(d / y) + math.log1p(d / (1.0 - x))) / d


def logit() -> ScalarFunction:
    """``log x - log(1 - x)`` on ``(0, 1)``."""
    dom = Interval(0.0, 1.0)
    return ScalarFunction(
        "logit", lambda x: math.log(x) - math.log1p(-x), lambda x: 1.0 / (x * (1.0 - x)), dom,
        concave_on=Interval(0.0, 0.5, closed_hi=True), convex_on=Interval(0.5, 1.0, closed_lo=True),
        operator_monotone_on=dom, increasing_on=dom, divdiff=_logit_divdiff,
    )


def _softplus_conjugate_divdiff(x: float, y: float) -> float:
    if x > y:
        x, y = y, x
    # f(x) - f(y) = log1p(expm1(x - y) * sigmoid(-x)); x < y keeps expm1 bounded
    return math.log1p(math.expm1(x - y) * float(expit(-x))) / (x - y)


def softplus_conjugate() -> ScalarFunction:
    """``x - log(1 + e^x)``, increasing and concave on the whole line."""
    return ScalarFunction(
        "softplus_conjugate", lambda x: float(log_expit(x)), lambda x: float(expit(-x)), REALS,
        concave_on=REALS, increasing_on=REALS, divdiff=_softplus_conjugate_divdiff,
    )


def _xlogx(x: float) -> float:
    return 0.0 if x == 0.0 else x * math.log(x)


def _xlogx_divdiff(x: float, y: float) -> float:
    if y == 0.0:
        return math.log(x)
    if x == 0.0:
        return math.log(y)
    return x * math.log1p((x - y) / y) / (x - y) + math.log(y)


def xlogx() -> ScalarFunction:
    return ScalarFunction(
        "xlogx", _xlogx, lambda x: math.log(x) + 1.0, NONNEGATIVE,
        convex_on=NONNEGATIVE, divdiff=_xlogx_divdiff,
    )


CATALOG: dict[str, Callable[..., ScalarFunction]] = {
    "identity": identity,
    "affine": affine,
    "abs": absolute,
    "square": square,
    "sqrt": sqrt,
    "log": log,
    "power": power,
    "x_over_1_plus_x": x_over_1_plus_x,
    "logit": logit,
    "softplus_conjugate": softplus_conjugate,
    "xlogx": xlogx,
}


def parse_function(text: str) -> ScalarFunction:
    """Parse ``name[:param[,param]]``, e.g. ``"power:0.5"`` or ``"affine:2,1"``."""
    name, _, rest = text.strip().partition(":")
    try:
        factory = CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown function {name!r}; known: {', '.join(sorted(CATALOG))}") from None
    params = [float(p) for p in rest.split(",")] if rest else []
    return factory(*params)


# ---------------------------------------------------------------------------
# numerical corroboration of the flags
# ---------------------------------------------------------------------------


@dataclass
class ShapeCheck:
    property: str
    passed: bool
    worst_violation: float
    at: Optional[float] = None


@dataclass
class ShapeReport:
    function: str
    interval: tuple[float, float]
    checks: list[ShapeCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "function": self.function,
            "interval": list(self.interval),
            "passed": self.passed,
            "checks": [vars(c) for c in self.checks],
        }


def shape_check(f: ScalarFunction, interval: tuple[float, float], grid_size: int = 100,
                exclude: tuple[float, ...] = ()) -> ShapeReport:
    """Check declared flags on ``interval`` with first and second differences.

    Only flags whose declared interval covers ``interval`` are tested.
    Difference stencils touching a point in ``exclude`` are skipped.
    """
    a, b = interval
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    x = np.linspace(a, b, grid_size)
    y = np.array([f.evaluate(t) for t in x])
    tol = 1e-12 * max(1.0, float(np.abs(y).max()))
    bad = np.isin(x, np.asarray(exclude, dtype=float))

    first = np.diff(y)
    first_ok = ~(bad[:-1] | bad[1:])
    second = y[:-2] - 2 * y[1:-1] + y[2:]
    second_ok = ~(bad[:-2] | bad[1:-1] | bad[2:])

    def check(prop: str, values: np.ndarray, ok: np.ndarray, centers: np.ndarray, sign: float) -> ShapeCheck:
        v = sign * values[ok]
        if v.size == 0:
            return ShapeCheck(prop, True, 0.0)
        i = int(np.argmin(v))
        worst = float(max(0.0, -v[i]))
        return ShapeCheck(prop, worst <= tol, worst, float(centers[ok][i]))

    checks = []
    if f.is_concave_on(a, b):
        checks.append(check("concave", second, second_ok, x[1:-1], -1.0))
    if f.is_convex_on(a, b):
        checks.append(check("convex", second, second_ok, x[1:-1], 1.0))
    if f.is_increasing_on(a, b):
        checks.append(check("increasing", first, first_ok, x[:-1], 1.0))
    return ShapeReport(f.label, (float(a), float(b)), checks)
