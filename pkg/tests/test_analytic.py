"""Blaschke traces, outer functions, Fourier coefficients and analyticity checks."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from extremum.analytic import (BlaschkePoint, blaschke_argument, blaschke_boundary,
                               blaschke_factor, blaschke_product, check_analytic,
                               conjugate_function, fourier_coefficients, lipschitz_constants,
                               negative_residual, outer_from_modulus, sine_half_gap,
                               sine_half_gap_values, trace_product, winding)
from extremum.errors import PreconditionError
from extremum.grid import GridSpec, Role, SampledFunction, sample

G = GridSpec(256)
G4096 = GridSpec(4096)

disc_points = st.builds(
    lambda r, t: r * complex(math.cos(t), math.sin(t)),
    st.floats(0.0, 0.95), st.floats(0.0, 2 * math.pi))


def test_blaschke_point_bounds():
    BlaschkePoint(0.999)
    with pytest.raises(PreconditionError):
        BlaschkePoint(1.0)
    with pytest.raises(PreconditionError):
        BlaschkePoint(complex("nan"))


def test_zero_factor_is_identity():
    tr = blaschke_boundary(0, G)
    assert np.allclose(tr.values, np.exp(1j * G.nodes), atol=1e-15)
    assert np.allclose(tr.arg_branch, G.nodes, atol=1e-15)


def test_half_factor_at_one():
    assert blaschke_factor(0.5, 1.0) == pytest.approx(-1.0)
    assert math.cos(float(blaschke_argument(0.5, 0.0))) == pytest.approx(-1.0)


@settings(max_examples=40, deadline=None)
@given(disc_points)
def test_trace_invariants(a):
    tr = blaschke_boundary(a, G)
    assert np.max(np.abs(np.abs(tr.values) - 1)) < 1e-9
    assert np.max(np.abs(np.diff(tr.arg_branch))) < math.pi
    assert np.max(np.abs(np.exp(1j * tr.arg_branch) - tr.values)) < 1e-9
    assert -math.pi < tr.arg_branch[0] <= math.pi
    assert winding(tr) == pytest.approx(2 * math.pi, abs=1e-9)
    assert blaschke_argument(a, 2 * math.pi) - blaschke_argument(a, 0.0) == pytest.approx(2 * math.pi)


def test_lipschitz_constants_examples():
    assert lipschitz_constants(0) == pytest.approx((0.5, 1 / math.pi))
    assert lipschitz_constants(0.5) == pytest.approx((1.5, 1 / (3 * math.pi)))


@settings(max_examples=40, deadline=None)
@given(disc_points)
def test_lipschitz_order(a):
    C, c = lipschitz_constants(a)
    assert 0 < c <= C


def test_sine_half_gap_examples():
    tr = blaschke_boundary(0, G)
    assert sine_half_gap(5, 5, tr) == 0.0
    assert sine_half_gap(10, 10 + 128, tr) == pytest.approx(1.0, abs=1e-15)


def test_sine_half_gap_chord_identity():
    tr = blaschke_boundary(0.3 - 0.6j, G)
    rng = np.random.default_rng(4)
    u, v = rng.integers(0, 256, 500), rng.integers(0, 256, 500)
    chord = 0.5 * np.abs(tr.values[v] - tr.values[u])
    assert np.max(np.abs(sine_half_gap(u, v, tr) - chord)) < 1e-12
    vals = sine_half_gap_values(0.3 - 0.6j, G.nodes[u], G.nodes[v])
    assert np.max(np.abs(vals - chord)) < 1e-12


def test_branch_offset_keeps_gaps():
    tr = blaschke_boundary(0.4j, G)
    shifted = tr.with_branch_offset(3)
    assert np.allclose(sine_half_gap(np.arange(256), 0, tr), sine_half_gap(np.arange(256), 0, shifted),
                       atol=1e-13)


def test_trace_product():
    f = blaschke_boundary(0, G)
    p = trace_product([f, f, f])
    c = fourier_coefficients(p, 10)
    expected = np.zeros(21)
    expected[13] = 1.0
    assert np.max(np.abs(c - expected)) < 1e-12
    assert np.allclose(p.arg_branch, 3 * G.nodes)
    prod = blaschke_product([0.2, -0.5j], G)
    assert np.max(np.abs(np.abs(prod.values) - 1)) < 1e-12
    assert winding(prod) == pytest.approx(4 * math.pi, abs=1e-9)
    assert np.all(blaschke_product([], G).values == 1)
    with pytest.raises(PreconditionError):
        trace_product([f, blaschke_boundary(0, GridSpec(16))])


def test_fourier_examples():
    g3 = sample(G, lambda t: np.exp(3j * t), Role.TRACE)
    c = fourier_coefficients(g3, 8)
    expected = np.zeros(17)
    expected[8 + 3] = 1.0
    assert np.max(np.abs(c - expected)) < 1e-12
    const = sample(G, lambda t: 5 + 0 * t, Role.TRACE)
    assert fourier_coefficients(const, 0)[0] == pytest.approx(5.0)
    with pytest.raises(PreconditionError):
        fourier_coefficients(g3, 128)


def test_fourier_exact_for_trig_polynomials():
    rng = np.random.default_rng(8)
    coef = rng.normal(size=255) + 1j * rng.normal(size=255)
    ks = np.arange(-127, 128)
    vals = np.exp(1j * np.outer(G.nodes, ks)) @ coef
    assert np.max(np.abs(fourier_coefficients(vals, 127) - coef)) < 1e-12


def test_exp_z_coefficients():
    tr = sample(G4096, lambda t: np.exp(np.exp(1j * t)), Role.TRACE)
    c = fourier_coefficients(tr, 8)
    assert np.max(np.abs(c[8:] - [1 / math.factorial(k) for k in range(9)])) < 1e-12
    assert np.max(np.abs(c[:8])) < 1e-10


def test_conjugate_of_cosine():
    assert np.max(np.abs(conjugate_function(np.cos(G.nodes)) - np.sin(G.nodes))) < 1e-13
    assert np.max(np.abs(conjugate_function(np.ones(256)))) < 1e-15


def test_outer_examples():
    one = outer_from_modulus(SampledFunction(G, np.ones(256)))
    assert np.all(np.abs(one.values - 1) < 1e-15)
    mu = sample(G4096, lambda t: np.exp(np.cos(t)))
    F = outer_from_modulus(mu)
    assert np.max(np.abs(F.modulus - mu.values)) < 1e-9
    assert check_analytic(F, 1e-6).ok
    c = fourier_coefficients(F, 8)
    assert np.max(np.abs(c[8:] - [1 / math.factorial(k) for k in range(9)])) < 1e-8
    with pytest.raises(PreconditionError):
        outer_from_modulus(SampledFunction(G, np.r_[1e-8, np.ones(255)]))


def test_outer_lambda_rotates():
    mu = sample(G, lambda t: 2 + np.sin(t))
    F0, F1 = outer_from_modulus(mu), outer_from_modulus(mu, 0.7)
    assert np.allclose(F1.values, F0.values * np.exp(0.7j), atol=1e-14)


def test_check_analytic_examples():
    assert check_analytic(blaschke_boundary(0.3 + 0.2j, G4096), 1e-8).ok
    bad = check_analytic(sample(G, lambda t: np.exp(-1j * t), Role.TRACE), 1e-8)
    assert not bad.ok and bad.residual == pytest.approx(1.0)


def test_quotient_residual_removes_outer_aliasing():
    mu = sample(G4096, lambda t: np.exp(-t))
    F = outer_from_modulus(mu)
    raw = negative_residual(F)
    assert raw > 1e-8
    assert negative_residual(F, outer=F) < 1e-14
