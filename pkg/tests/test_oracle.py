import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from vgproduct import oracle
from vgproduct.product import ProductSpec, prob_nonpositive, product_pdf
from vgproduct.vg import VgParams, vg_cdf

LAPLACE2 = ProductSpec.of((0.5, 1.0, 0.0), (0.5, 1.0, 0.0))
SKEWED = ProductSpec.of((0.3, 1.0, 0.4), (1.0, 2.0, -0.5))


# convolution

def test_convolution_laplace_pair():
    for z in (0.5, -2.0, 7.0):
        ref = special.k0(2 * math.sqrt(abs(z)))
        assert abs(oracle.convolution_pdf(LAPLACE2, z, 1e-12) - ref) <= 1e-7


def test_convolution_symmetry():
    spec = ProductSpec.of((0.0, 1.0, 0.0), (1.2, 0.7, 0.0))
    z = np.array([0.3, 2.0])
    assert np.max(np.abs(oracle.convolution_pdf(spec, z) - oracle.convolution_pdf(spec, -z))) <= 1e-14


def test_convolution_mirror():
    z = np.array([-1.5, 0.4, 3.0])
    a = oracle.convolution_pdf(SKEWED, z, 1e-12)
    b = oracle.convolution_pdf(SKEWED.mirrored(), -z, 1e-12)
    assert np.max(np.abs(a - b)) <= 1e-12


def test_convolution_mass():
    # trapezoid in log|z| over the grid of one spec
    u = np.linspace(math.log(1e-12), math.log(200.0), 1201)
    v = np.exp(u)
    total = 0.0
    for s in (1, -1):
        f = oracle.convolution_pdf(SKEWED, s * v, 1e-10) * v
        total += float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(u)))
    assert abs(total - 1) <= 1e-6


def test_convolution_matches_closed_form_route():
    z = np.array([-2.0, -0.1, 0.5, 4.0])
    assert np.max(np.abs(oracle.convolution_pdf(SKEWED, z, 1e-12) - product_pdf(SKEWED, z).value)) <= 1e-9


# Monte Carlo

def test_mc_sign_probability():
    n = 200_000
    b = oracle.mc_product_sample(SKEWED, n, 11)
    p = prob_nonpositive(SKEWED)
    se = math.sqrt(p * (1 - p) / n)
    assert abs(np.mean(b.values <= 0) - p) <= 3 * se


def test_mc_reproducible():
    a = oracle.mc_product_sample(SKEWED, 5000, 3)
    b = oracle.mc_product_sample(SKEWED, 5000, 3)
    assert np.array_equal(a.values, b.values)
    assert a.seed == 3 and a.n == 5000 and a.spec_digest == b.spec_digest
    assert not np.array_equal(a.values, oracle.mc_product_sample(SKEWED, 5000, 4).values)


def test_mc_single_factor_law():
    f = VgParams(0.8, 1.5, 0.4)
    b = oracle.mc_product_sample(ProductSpec((f,)), 100_000, 5)
    kb = oracle.ks_statistic_bound(b, lambda x: np.array([vg_cdf(f, v) for v in x]), cells=300)
    assert kb.bound <= 1.63 / math.sqrt(b.n) + kb.max_cell_mass


def test_mc_rejects_empty():
    with pytest.raises(ValueError):
        oracle.mc_product_sample(SKEWED, 0, 1)


# KS

def test_ks_matches_scipy():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(500)
    assert abs(oracle.ks_statistic(x, stats.norm.cdf) - stats.kstest(x, "norm").statistic) <= 1e-15


def test_ks_of_constant_batch():
    d = oracle.ks_statistic(np.zeros(100), stats.norm.cdf)
    assert 0.5 <= d <= 1.0


def test_ks_bound_dominates_statistic():
    rng = np.random.default_rng(9)
    x = rng.laplace(size=20_000)
    cdf = stats.laplace.cdf
    exact = oracle.ks_statistic(x, cdf)
    kb = oracle.ks_statistic_bound(x, cdf, cells=200)
    assert exact <= kb.bound <= exact + kb.max_cell_mass
    assert 0 <= kb.bound <= 1


def test_ks_needs_samples():
    with pytest.raises(ValueError):
        oracle.ks_statistic(np.zeros(3), stats.norm.cdf)


# characteristic functions

def test_cf_fourier_at_zero():
    assert oracle.cf_fourier(SKEWED, 0.0) == 1.0


def test_cf_fourier_single_laplace():
    spec = ProductSpec.of((0.5, 2.0, 0.0))
    assert abs(oracle.cf_fourier(spec, 1.0, pdf="product") - 0.8) <= 1e-8


def test_cf_fourier_conjugate_symmetry():
    a = oracle.cf_fourier(SKEWED, 0.9, pdf="product")
    b = oracle.cf_fourier(SKEWED, -0.9, pdf="product")
    assert abs(a - np.conj(b)) <= 1e-9


def test_cf_routes_agree():
    for t in (0.4, 2.5):
        a = oracle.cf_fourier(SKEWED, t, pdf="product")
        b = oracle.cf_conditional(SKEWED, t)
        assert abs(a - b) <= 1e-7


def test_cf_conditional_normal_pair():
    spec = ProductSpec.of((0.0, 1.0, 0.0), (0.5, 1.0, 0.0))  # normal pair times Laplace
    for t in (0.3, 2.0):
        # E over the Laplace factor L of 1/sqrt(1 + t^2 L^2)
        ref, _ = integrate.quad(lambda x: math.exp(-x) / math.sqrt(1 + (t * x) ** 2), 0, math.inf, epsabs=1e-13)
        assert abs(oracle.cf_conditional(spec, t) - ref) <= 1e-10
