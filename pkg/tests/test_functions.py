import math

import numpy as np
import pytest

from schurloewner import functions as fn
from schurloewner.functions import DomainError, parse_function, shape_check

CATALOG_SPECS = ["identity", "affine:2,1", "affine:-0.5,3", "abs", "square", "sqrt", "log", "power:0.5",
                 "power:0.3", "power:1", "power:2", "power:3.5", "x_over_1_plus_x", "logit",
                 "softplus_conjugate", "xlogx"]


def _interior_points(f, rng, count=100):
    lo, hi = f.domain.lo, f.domain.hi
    lo = -5.0 if math.isinf(lo) else lo
    hi = 5.0 if math.isinf(hi) else hi
    pad = 0.02 * (hi - lo)
    xs = rng.uniform(lo + pad, hi - pad, count)
    if f.name == "abs":
        xs = xs[np.abs(xs) > 1e-3]
    return xs


def test_evaluate_examples():
    assert fn.sqrt().evaluate(4) == 2.0
    assert fn.logit().evaluate(0.5) == 0.0
    assert fn.softplus_conjugate().evaluate(0.0) == pytest.approx(-math.log(2), abs=1e-15)
    with pytest.raises(DomainError):
        fn.log().evaluate(-1.0)
    with pytest.raises(DomainError):
        fn.logit().evaluate(1.0)


def test_derivative_examples():
    assert fn.absolute().derivative(-3) == -1.0
    assert fn.sqrt().derivative(1) == 0.5
    with pytest.raises(DomainError):
        fn.absolute().derivative(0.0)
    with pytest.raises(DomainError):
        fn.sqrt().derivative(0.0)


@pytest.mark.parametrize("c", [0.01, 0.1, 0.37, 0.5, 0.9, 0.999])
def test_softplus_conjugate_derivative_after_logit(c):
    f, g = fn.softplus_conjugate(), fn.logit()
    # f = log o logit^{-1}, so f(g(c)) = log c and f'(g(c)) = 1 - c
    assert f.evaluate(g.evaluate(c)) == pytest.approx(math.log(c), rel=1e-12)
    assert f.derivative(g.evaluate(c)) == pytest.approx(1 - c, rel=1e-12)


@pytest.mark.parametrize("spec", CATALOG_SPECS)
def test_derivative_matches_central_differences(spec, rng):
    f = parse_function(spec)
    for x in _interior_points(f, rng):
        h = 1e-6 * max(1.0, abs(x))
        fd = (f.evaluate(x + h) - f.evaluate(x - h)) / (2 * h)
        assert f.derivative(x) == pytest.approx(fd, rel=1e-6, abs=1e-8)


@pytest.mark.parametrize("spec", CATALOG_SPECS)
def test_divided_difference_matches_naive_formula(spec, rng):
    f = parse_function(spec)
    xs = _interior_points(f, rng, 40)
    for x, y in zip(xs[::2], xs[1::2]):
        naive = (f.evaluate(x) - f.evaluate(y)) / (x - y)
        assert f.divided_difference(x, y) == pytest.approx(naive, rel=1e-9, abs=1e-12)


def test_divided_difference_is_accurate_for_close_points():
    f = fn.log()
    x, y = 2.0, 2.0 + 1e-9
    # exact value of (log x - log y)/(x - y) to second order
    exact = 1 / x - (y - x) / (2 * x * x)
    assert f.divided_difference(x, y) == pytest.approx(exact, rel=1e-14)


def test_divided_difference_power_at_zero():
    assert fn.power(0.5).divided_difference(0.0, 4.0) == pytest.approx(0.5)
    assert fn.xlogx().divided_difference(0.0, math.e) == pytest.approx(1.0)


def test_flags_from_catalog():
    for f in (fn.sqrt(), fn.log(), fn.x_over_1_plus_x(), fn.power(0.5)):
        assert f.is_operator_monotone_on(0.1, 100)
        assert f.is_concave_on(0.1, 100)
    assert fn.absolute().is_convex_on(-5, 5)
    assert not fn.absolute().is_concave_on(-5, 5)
    sc = fn.softplus_conjugate()
    assert sc.is_increasing_on(-50, 50) and sc.is_concave_on(-50, 50)
    lg = fn.logit()
    assert lg.is_concave_on(0.1, 0.5) and not lg.is_concave_on(0.1, 0.6)
    assert lg.is_convex_on(0.5, 0.9)
    assert fn.power(2).is_convex_on(0, 3) and not fn.power(2).is_concave_on(0, 3)
    assert fn.affine(-1, 0).operator_monotone_on is None


def test_concave_and_convex_only_if_affine():
    f = fn.sqrt()
    with pytest.raises(ValueError):
        type(f)("bad", f.func, f.deriv, f.domain, concave_on=fn.REALS, convex_on=fn.REALS)


def test_parse_function():
    f = parse_function("power:0.5")
    assert f.label == "power:0.5"
    assert f.evaluate(9) == 3
    assert parse_function("affine:2,1").evaluate(3) == 7
    with pytest.raises(ValueError):
        parse_function("cosh")


def test_scaled_and_shifted():
    f = fn.sqrt().scaled(3.0)
    assert f.evaluate(4) == 6 and f.derivative(4) == 0.75
    assert f.divided_difference(1, 4) == pytest.approx(1.0)
    g = fn.sqrt().shifted(2.0)
    assert g.evaluate(4) == 4 and g.derivative(4) == 0.25
    with pytest.raises(ValueError):
        fn.sqrt().scaled(-1.0)


def test_shape_check_examples():
    assert shape_check(fn.log(), (0.1, 10), 100).passed
    rep = shape_check(fn.square(), (-1, 1), 100)
    assert rep.passed and [c.property for c in rep.checks] == ["convex"]
    rep = shape_check(fn.absolute(), (-1, 1), 101, exclude=(0.0,))
    assert rep.passed


def test_shape_check_detects_wrong_flag():
    f = fn.sqrt()
    liar = type(f)("liar", f.func, f.deriv, f.domain, convex_on=fn.NONNEGATIVE)
    rep = shape_check(liar, (0.1, 4), 50)
    assert not rep.passed and rep.checks[0].worst_violation > 0


@pytest.mark.parametrize("spec", CATALOG_SPECS)
def test_catalog_flags_corroborated(spec):
    f = parse_function(spec)
    lo = max(-2.0, f.domain.lo + 0.01)
    hi = min(f.domain.hi - 0.01, 10.0)
    if spec == "logit":
        for interval in ((0.01, 0.5), (0.5, 0.99)):
            assert shape_check(f, interval, 200).passed
        return
    rep = shape_check(f, (lo, hi), 201, exclude=(0.0,))
    assert rep.passed, rep.to_json()
