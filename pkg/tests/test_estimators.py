import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurloewner import functions as fn
from schurloewner.bounds import best_bound
from schurloewner.estimators import (
    ando_wstar_witness,
    estimate_commutator_ratio,
    estimate_schur_norm_hermitian,
    estimate_schur_norm_sampling,
    estimate_wstar_norm,
    exact_schur_norm_q2,
    hermitian_objective,
)
from schurloewner.functions import parse_function
from schurloewner.harness import draw_spectrum
from schurloewner.loewner import Spectrum, build_loewner
from schurloewner.matrixcore import haar_unitary, random_ensemble, schatten_norm

CATALOG = ["identity", "sqrt", "log", "abs", "square", "power:0.5", "power:2", "softplus_conjugate",
           "x_over_1_plus_x", "xlogx"]


def brute_force_2d(L, points=100):
    """Scan x = (cos t, e^{i p} sin t) on a points x points grid."""
    best = 0.0
    for t in np.linspace(0, np.pi / 2, points):
        for p in np.linspace(0, 2 * np.pi, points, endpoint=False):
            x = np.array([np.cos(t), np.exp(1j * p) * np.sin(t)])
            best = max(best, hermitian_objective(L, x))
    return best


def test_exact_q2_examples():
    assert exact_schur_norm_q2(build_loewner(fn.sqrt(), [1, 4])) == 0.5
    assert exact_schur_norm_q2(np.ones((3, 3))) == 1.0
    assert exact_schur_norm_q2(build_loewner(fn.absolute(), [-1, 1])) == 1.0


def test_hermitian_all_ones():
    res = estimate_schur_norm_hermitian(np.ones((4, 4)), restarts=8, seed=1)
    assert res.value == pytest.approx(1.0, abs=1e-12)
    # every unit vector attains it: ||x x*||_1 = 1
    assert hermitian_objective(np.ones((4, 4)), res.witness) == pytest.approx(1.0)


def test_hermitian_psd_reaches_max_diagonal():
    res = estimate_schur_norm_hermitian(build_loewner(fn.sqrt(), [1, 4, 9]), seed=3)
    assert res.value == pytest.approx(0.5, abs=1e-6)


def test_hermitian_abs_against_brute_force():
    L = build_loewner(fn.absolute(), [-1, 1])
    oracle = brute_force_2d(L)
    assert oracle == pytest.approx(1.0, abs=1e-12)
    assert estimate_schur_norm_hermitian(L, seed=0).value == pytest.approx(oracle, abs=1e-9)


def test_hermitian_abs_2x2_against_brute_force():
    L = build_loewner(fn.absolute(), [-0.4, 1.3])
    oracle = brute_force_2d(L, 200)
    est = estimate_schur_norm_hermitian(L, seed=0).value
    assert est >= oracle - 1e-4
    assert 1 - 1e-9 <= est <= math.sqrt(2) + 1e-9


def test_hermitian_result_contract(rng):
    L = build_loewner(fn.absolute(), rng.uniform(-2, 2, 5))
    res = estimate_schur_norm_hermitian(L, restarts=16, seed=9)
    assert res.value == pytest.approx(hermitian_objective(L, res.witness), rel=1e-10)
    assert res.value >= np.abs(np.diag(L.entries)).max() - 1e-8
    assert np.linalg.norm(res.witness) == pytest.approx(1.0)
    assert res.restarts == 16 + 5 + 1
    with pytest.raises(ValueError):
        estimate_schur_norm_hermitian(L, restarts=0)
    with pytest.raises(ValueError):
        estimate_schur_norm_hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_hermitian_deterministic():
    L = build_loewner(fn.square(), [-1.0, 0.2, 0.5, 1.7])
    a = estimate_schur_norm_hermitian(L, restarts=12, seed=77)
    b = estimate_schur_norm_hermitian(L, restarts=12, seed=77)
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["sqrt", "log", "power:0.5", "x_over_1_plus_x"]), st.integers(0, 2**32), st.integers(1, 8))
def test_hermitian_psd_converges(spec, seed, n):
    f = parse_function(spec)
    s = Spectrum(draw_spectrum(f, n, np.random.default_rng(seed)))
    res = estimate_schur_norm_hermitian(build_loewner(f, s), restarts=64, seed=seed)
    assert res.value == pytest.approx(f.derivative(s.lo), abs=1e-6)


def test_sampling_examples(rng):
    for q in (1, 1.5, 2, math.inf):
        res = estimate_schur_norm_sampling(np.ones((3, 3)), q, samples=20, seed=4)
        assert res.value == 1.0
    res = estimate_schur_norm_sampling(np.eye(2), math.inf, samples=200, seed=5)
    assert res.value <= 1.0 + 1e-12
    assert res.value == pytest.approx(
        schatten_norm(np.eye(2) * res.witness, math.inf) / schatten_norm(res.witness, math.inf), rel=1e-12)
    with pytest.raises(ValueError):
        estimate_schur_norm_sampling(np.eye(2), 1, samples=0)


def test_sampling_initial_candidates_are_used():
    t = np.triu(np.ones((2, 2)), 1)
    e12 = np.array([[0, 1], [0, 0]], dtype=complex)
    res = estimate_schur_norm_sampling(t, math.inf, samples=5, seed=0, initial=[e12])
    assert res.value == 1.0


def test_commutator_ratio_examples(rng):
    b = random_ensemble("gue", 4, rng)
    for q in (1, 2, math.inf):
        assert estimate_commutator_ratio(fn.identity(), b, q, 20, 1).value == pytest.approx(1.0, rel=1e-12)
        assert estimate_commutator_ratio(fn.affine(-3, 2), b, q, 20, 1).value == pytest.approx(3.0, rel=1e-12)
    with pytest.raises(ValueError):
        estimate_commutator_ratio(fn.identity(), np.eye(3), 2, 10, 0)


def test_commutator_abs_pm_one_is_zero():
    # |B| = I for B = diag(-1, 1), so [A, |B|] vanishes for every A
    res = estimate_commutator_ratio(fn.absolute(), np.diag([-1.0, 1.0]), 2, 50, 0)
    assert res.value == pytest.approx(0.0, abs=1e-15)


def test_commutator_abs_2x2_frobenius_ratio_is_offdiagonal_entry(rng):
    for _ in range(50):
        b1, b2 = -rng.uniform(0.1, 2), rng.uniform(0.1, 2)
        u = haar_unitary(2, rng)
        B = (u * np.array([b1, b2])) @ u.conj().T
        r = estimate_commutator_ratio(fn.absolute(), B, 2, 5, int(rng.integers(1 << 30))).value
        assert r == pytest.approx(abs(b1 + b2) / (b2 - b1), rel=1e-9)
        assert r <= 1 + 1e-12


def test_ando_witness_examples(rng):
    y = random_ensemble("ginibre", 3, rng)
    assert ando_wstar_witness(y, np.zeros((3, 3))) == pytest.approx(schatten_norm(y, 1), rel=1e-12)
    assert ando_wstar_witness(y, np.eye(3)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        ando_wstar_witness(y, 2 * np.eye(3))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 6))
def test_ando_witness_bounded_by_trace_norm_for_normal(seed, n):
    g = np.random.default_rng(seed)
    y = random_ensemble("normal_matrix", n, g)
    z = random_ensemble("hermitian_contraction", n, g)
    assert ando_wstar_witness(y, z) <= schatten_norm(y, 1) + 1e-8


def test_wstar_examples(rng):
    y = random_ensemble("normal_matrix", 3, rng)
    res = estimate_wstar_norm(y, samples=300, seed=2)
    assert res.value == pytest.approx(schatten_norm(y, 1), abs=1e-8)
    assert estimate_wstar_norm(np.zeros((2, 2)), samples=10, seed=0).value == 0.0


def test_wstar_nilpotent_exceeds_trace_norm():
    y = np.array([[0, 1], [0, 0]], dtype=complex)
    res = estimate_wstar_norm(y, samples=10_000, seed=0)
    assert res.value >= 1.0
    # the dual of the numerical radius at E12 is 2 (X = E12 has w(X) = 1/2)
    assert 1.0 < res.value <= 2.0 + 1e-9
    assert ando_wstar_witness(y, res.witness) == res.value


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(CATALOG), st.integers(0, 2**32), st.integers(1, 8),
       st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]))
def test_estimates_never_exceed_best_bound(spec, seed, n, q):
    f = parse_function(spec)
    g = np.random.default_rng(seed)
    s = Spectrum(draw_spectrum(f, n, g))
    L = build_loewner(f, s)
    bound = best_bound(f, s, q).best(q)
    u = haar_unitary(n, g)
    B = (u * s.array) @ u.conj().T
    ests = [estimate_schur_norm_sampling(L, q, 50, seed).value]
    if len(set(s.values)) > 1:
        ests.append(estimate_commutator_ratio(f, B, q, 50, seed).value)
    if q in (1.0, math.inf):
        ests.append(estimate_schur_norm_hermitian(L, 16, seed=seed).value)
    for e in ests:
        assert e <= bound * (1 + 1e-8)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(CATALOG), st.integers(0, 2**32), st.integers(2, 6), st.floats(1.1, 1.9))
def test_dual_indices_share_the_bound(spec, seed, n, q):
    f = parse_function(spec)
    s = Spectrum(draw_spectrum(f, n, np.random.default_rng(seed)))
    L = build_loewner(f, s)
    qd = q / (q - 1)
    rep = best_bound(f, s, [q, qd])
    assert rep.best(q) == pytest.approx(rep.best(qd), rel=1e-12)
    for qq in (q, qd):
        assert estimate_schur_norm_sampling(L, qq, 40, seed).value <= rep.best(q) * (1 + 1e-8)


def test_estimate_json_shape():
    res = estimate_schur_norm_sampling(np.ones((2, 2)), 2, 3, 11)
    js = res.to_json()
    assert set(js) == {"lower_estimate", "witness", "restarts", "iterations", "seed"}
    assert js["witness"]["n"] == 2 and js["seed"] == 11
