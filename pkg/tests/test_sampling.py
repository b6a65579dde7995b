import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from regp.ecf import ECFConfig, sample_displacements
from regp.errors import DivergenceError
from regp.filters import INF, FilterSpec
from regp.process import ProcessConfig, apply_process_uhd, simulate_bhd
from regp.sampling import (
    QuasiprobEstimate,
    XiTable,
    axis_grid,
    estimate_Pw_balanced,
    estimate_Pw_unbalanced,
    lambda_arg,
    pattern_filtered,
    pattern_post,
    pattern_post_quad,
    xi_filtered,
    xi_post,
)
from regp.states import Coherent, QuadratureData, Thermal, Vacuum, reference_Pw, sample_quadratures


def test_lambda_arg_examples():
    assert lambda_arg(0.7, 1.1, 0) == pytest.approx(0.7)
    assert lambda_arg(0.0, 0.0, 1.0) == pytest.approx(-2.0)
    assert lambda_arg(1.5, math.pi / 2, 1.0) == pytest.approx(1.5)


@settings(max_examples=50, deadline=None)
@given(x=st.floats(-10, 10), phi=st.floats(0, 2 * math.pi), a=st.complex_numbers(max_magnitude=4))
def test_lambda_arg_is_shifted_quadrature(x, phi, a):
    assert lambda_arg(x, phi, a) == pytest.approx(x - 2 * (a * np.exp(1j * phi)).real, abs=1e-12)


def test_pattern_post_values():
    assert pattern_post(0.0, 2.0) == pytest.approx(2 / math.pi * (math.e**2 - 1), rel=1e-14)
    assert pattern_post(0.0, 2.0) == pytest.approx(4.0673, abs=1e-4)
    np.testing.assert_array_equal(pattern_post(np.array([0.0, 3.0]), 0.0), 0.0)
    lam = np.linspace(0, 8, 33)
    np.testing.assert_array_equal(pattern_post(lam, 2.6), pattern_post(-lam, 2.6))


@pytest.mark.parametrize("b_c", [1.0, 2.0, 2.6, 4.0])
def test_pattern_post_closed_form_vs_quadrature(b_c):
    lam = np.linspace(-8, 8, 161)
    quad = np.array([pattern_post_quad(v, b_c) for v in lam])
    assert np.max(np.abs(pattern_post(lam, b_c) - quad)) <= 1e-6


def test_pattern_post_far_tail_stable():
    lam = np.array([15.0, 60.0, 400.0, 1000.0])
    quad = np.array([pattern_post_quad(v, 2.6) for v in lam])
    np.testing.assert_allclose(pattern_post(lam, 2.6), quad, atol=1e-10)


def test_pattern_filtered_even_and_refusals():
    spec = FilterSpec(4.0, 1.0)
    lam = np.linspace(0, 6, 13)
    np.testing.assert_allclose(pattern_filtered(lam, spec), pattern_filtered(-lam, spec), atol=1e-12)
    with pytest.raises(DivergenceError):
        pattern_filtered(0.0, FilterSpec(2.0, 1.0))


def test_pattern_filtered_spline_matches_direct():
    spec = FilterSpec(4.0, 1.0)
    lam = np.random.default_rng(0).normal(0, 2, 5000)
    np.testing.assert_allclose(pattern_filtered(lam, spec), pattern_filtered(lam, spec, direct_limit=10**6),
                               rtol=0, atol=1e-8)


def test_pattern_filtered_small_width():
    vals = pattern_filtered(np.linspace(-5, 5, 21), FilterSpec(4.0, 0.05))
    assert np.max(np.abs(vals)) < 2e-3
    smaller = pattern_filtered(np.linspace(-5, 5, 21), FilterSpec(4.0, 0.02))
    assert np.max(np.abs(smaller)) < 0.2 * np.max(np.abs(vals))


def test_pattern_filtered_vacuum_matches_reference():
    spec = FilterSpec(4.0, 1.0)
    data = sample_quadratures(Vacuum(), 10**6, 31)
    est = estimate_Pw_balanced(data, [0j], 0.0, pattern=lambda lam: pattern_filtered(lam, spec))
    ref = reference_Pw(Vacuum(), 0j, spec)
    assert abs(est.value[0] - ref) < 3 * est.stderr[0]


def test_vacuum_unfiltered_post_estimate():
    # no ECF: vacuum regularized by the rectangular post filter alone
    b_c = 2.0
    data = sample_quadratures(Vacuum(), 400000, 5)
    est = estimate_Pw_balanced(data, [0j], b_c)
    ref = reference_Pw(Vacuum(), 0j, FilterSpec(INF, 1.0), post_bc=b_c,
                       filter_fn=lambda b: 1.0, b_max=b_c)
    assert ref == pytest.approx(b_c**2 / math.pi, rel=1e-10)
    assert est.value[0] > 0
    assert abs(est.value[0] - ref) < 3 * est.stderr[0]


def test_constant_data_is_exact():
    data = QuadratureData(np.full(100, 0.8), np.zeros(100))
    est = estimate_Pw_balanced(data, [0j], 2.6)
    assert est.value[0] == pattern_post(0.8, 2.6)
    assert est.stderr[0] == 0
    assert np.isnan(est.significance[0])


def test_needs_two_events():
    with pytest.raises(ValueError):
        estimate_Pw_balanced(QuadratureData([0.1], [0.0]), [0j], 2.0)


def test_estimator_linearity():
    a = sample_quadratures(Thermal(0.4), 30000, 1)
    b = sample_quadratures(Thermal(0.4), 50000, 2)
    grid = [0j, 0.5 + 0.2j, -1j]
    ea = estimate_Pw_balanced(a, grid, 2.6)
    eb = estimate_Pw_balanced(b, grid, 2.6)
    ec = estimate_Pw_balanced(QuadratureData.concat([a, b]), grid, 2.6)
    np.testing.assert_allclose(ec.value, (3 * ea.value + 5 * eb.value) / 8, rtol=1e-12, atol=1e-13)


def test_stderr_scales_with_sqrt_n():
    grid = axis_grid("squeezed", 1.0, 0.25)
    ratios = []
    for seed in range(6):
        d = sample_quadratures(Thermal(0.3), 40000, seed)
        half = estimate_Pw_balanced(d[:20000], grid, 2.6).stderr
        full = estimate_Pw_balanced(d, grid, 2.6).stderr
        ratios.extend(full / half)
    assert abs(np.median(ratios) - 1 / math.sqrt(2)) < 0.03


def test_threads_do_not_change_results():
    d = sample_quadratures(Thermal(0.3), 100000, 3)
    grid = axis_grid("antisqueezed", 1.0, 0.1)
    one = estimate_Pw_balanced(d, grid, 2.6, threads=1)
    many = estimate_Pw_balanced(d, grid, 2.6, threads=4)
    np.testing.assert_array_equal(one.value, many.value)
    np.testing.assert_array_equal(one.stderr, many.stderr)


def test_quasiprob_estimate_shapes():
    with pytest.raises(ValueError):
        QuasiprobEstimate([0j, 1j], [0.1], [0.1, 0.1])
    e = QuasiprobEstimate([0j, 1j], [-0.2, 0.3], [0.05, 0.1])
    np.testing.assert_allclose(e.significance, [4.0, -3.0])
    assert e.most_negative() == (0j, -0.2, pytest.approx(4.0))


def test_axis_grid():
    g = axis_grid("squeezed")
    assert g.size == 121 and g[0] == -3 and g[-1] == 3 and np.all(g.imag == 0)
    assert np.all(axis_grid("antisqueezed").real == 0)
    with pytest.raises(ValueError):
        axis_grid("diagonal")


def test_xi_post_values():
    assert xi_post(0, 2.6) == pytest.approx(2.6**2 / math.pi, abs=1e-12)
    x = 6.76
    assert xi_post(1, 2.6) == pytest.approx((x - x * x / 2) / math.pi, rel=1e-13)
    assert round(xi_post(1, 2.6), 3) == -5.121
    np.testing.assert_array_equal(xi_post(np.arange(10), 0.0), 0.0)


@pytest.mark.parametrize("b_c", [0.5, 2.0, 2.6, 4.0])
def test_xi_post_vs_defining_integral(b_c):
    # with x = b^2 the integral is (1/pi) int_0^{b_c^2} L_n(x) dx; a 64-node Gauss-Legendre
    # rule is exact for these polynomials of degree <= 50
    n = np.arange(51)
    closed = xi_post(n, b_c)
    t, wt = np.polynomial.legendre.leggauss(64)
    x = 0.5 * b_c * b_c * (t + 1)
    for k in n:
        val = 0.5 * b_c * b_c * np.sum(wt * special.eval_laguerre(k, x)) / math.pi
        assert abs(closed[k] - val) <= 1e-8 * max(1.0, abs(val))


def test_xi_table():
    t = XiTable.build(2.6, 12)
    assert t.coeffs[0] == pytest.approx(2.6**2 / math.pi, abs=1e-12)
    assert t(5) == xi_post(5, 2.6)


def test_xi_filtered_vs_independent_quadrature():
    w = 1.3
    spec = FilterSpec(INF, w)

    def omega(b):
        x = b / (2 * w)
        return 2 / math.pi * (math.acos(x) - x * math.sqrt(1 - x * x))

    for n in (0, 3, 10):
        oracle = 2 / math.pi * integrate.quad(lambda b: b * omega(b) * special.eval_laguerre(n, b * b),
                                              0, 2 * w, epsabs=1e-13, epsrel=1e-13, limit=400)[0]
        assert xi_filtered(n, spec) == pytest.approx(oracle, abs=1e-8)


@pytest.mark.parametrize("spec", [FilterSpec(INF, 1.3), FilterSpec(4.0, 1.0)])
def test_xi_filtered_vacuum_identity(spec):
    assert xi_filtered(0, spec) == pytest.approx(reference_Pw(Vacuum(), 0j, spec), abs=1e-6)


def test_xi_filtered_small_width():
    assert np.max(np.abs(xi_filtered(np.arange(11), FilterSpec(INF, 0.01)))) < 1e-4


def test_unbalanced_zero_counts():
    est = estimate_Pw_unbalanced([np.zeros(50, int)], [0j], 2.0)
    assert est.value[0] == pytest.approx(4 / math.pi, abs=1e-14)
    assert est.stderr[0] == 0


def test_unbalanced_input_checks():
    with pytest.raises(ValueError):
        estimate_Pw_unbalanced([np.array([1])], [0j], 2.0)
    with pytest.raises(ValueError):
        estimate_Pw_unbalanced([np.zeros(3, int)], [0j, 1j], 2.0)


def test_unbalanced_thermal_matches_reference():
    w, b_c = 1.0, 2.0
    cfg = ECFConfig.from_product(FilterSpec(INF, w), 100.0)
    n = 400000
    gamma = sample_displacements(cfg, n, 12)
    counts = apply_process_uhd(Thermal(1.0), gamma, 0.0, 13)
    est = estimate_Pw_unbalanced([counts], [0j], b_c)
    ref = reference_Pw(Thermal(1.0), 0j, FilterSpec(INF, w), post_bc=b_c)
    assert abs(est.value[0] - ref) < 3 * est.stderr[0]


def test_unbalanced_coherent_peak():
    w, b_c = 1.0, 2.0
    a0 = 0.6 - 0.4j
    cfg = ECFConfig.from_product(FilterSpec(INF, w), 100.0)
    gamma = sample_displacements(cfg, 300000, 21)
    counts = apply_process_uhd(Coherent(a0), gamma, a0, 22)
    est = estimate_Pw_unbalanced([counts], [a0], b_c)
    ref = reference_Pw(Coherent(a0), a0, FilterSpec(INF, w), post_bc=b_c)
    assert abs(est.value[0] - ref) < 3 * est.stderr[0]


def test_balanced_coherent_profile():
    w = 1.3
    a0 = 0.5 + 0.3j
    cfg = ProcessConfig(ECFConfig.from_product(FilterSpec(INF, w), 100.0))
    data = simulate_bhd(Coherent(a0), cfg, 300000, 40)
    grid = a0 + np.array([0, 0.4, 0.8j, -1.2])
    est = estimate_Pw_balanced(data, grid, 2 * w)
    ref = reference_Pw(Coherent(a0), grid, FilterSpec(INF, w), post_bc=2 * w)
    assert np.all(np.abs(est.value - ref) < 3 * est.stderr)
