import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from vgproduct.oracle import ks_statistic_bound
from vgproduct.vg import (
    SingularityError,
    VgParams,
    vg_cdf,
    vg_cf,
    vg_log_pdf,
    vg_mellin_neg,
    vg_mellin_pos,
    vg_pdf,
    vg_prob_nonpositive,
    vg_sample,
)

GRID = [VgParams(m, a, r * a) for m, a, r in itertools.product((-0.25, 0.5, 2.0), (0.5, 1.0, 3.0), (0.0, 0.4, 0.9))]


def quad_mass(p, lo, hi, weight=lambda x: 1.0):
    f = lambda x: weight(x) * vg_pdf(p, x)
    pts = [v for v in (lo, -1.0, 0.0, 1.0, hi) if lo <= v <= hi]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if a == b:
            continue
        v, _ = integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=400)
        total += v
    return total


def mp_pdf(p, x):
    mpmath.mp.dps = 30
    try:
        m, a, b = (mpmath.mpf(v) for v in (p.m, p.alpha, p.beta))
        g = mpmath.sqrt(a * a - b * b)
        ax = abs(mpmath.mpf(x))
        c = g ** (2 * m + 1) / (mpmath.sqrt(mpmath.pi) * (2 * a) ** m * mpmath.gamma(m + 0.5))
        return float(c * mpmath.exp(b * x) * ax ** m * mpmath.besselk(m, a * ax))
    finally:
        mpmath.mp.dps = 15


# density

def test_asymmetric_laplace_at_origin():
    assert abs(vg_pdf(VgParams(0.5, 3.0, 1.0), 0.0) - 4.0 / 3.0) <= 1e-15


@given(st.floats(-0.45, 4), st.floats(0.1, 5), st.floats(-20, 20).filter(lambda x: x != 0))
def test_symmetric_density_is_even(m, a, x):
    p = VgParams(m, a, 0.0)
    assert vg_pdf(p, x) == vg_pdf(p, -x)


def test_unit_mass_example():
    assert abs(quad_mass(VgParams(1.0, 2.0, 0.5), -np.inf, np.inf) - 1) <= 1e-8


@pytest.mark.parametrize("p", GRID, ids=lambda p: f"m{p.m}-a{p.alpha}-b{p.beta:.2f}")
def test_unit_mass_grid(p):
    assert abs(quad_mass(p, -np.inf, np.inf) - 1) <= 1e-8


@given(st.floats(-0.45, 4), st.floats(0.1, 5), st.floats(-0.95, 0.95), st.floats(1e-3, 30), st.booleans())
def test_density_against_mpmath(m, a, r, x, neg):
    p = VgParams(m, a, r * a)
    x = -x if neg else x
    ref = mp_pdf(p, x)
    if ref < 1e-290:
        return
    assert abs(vg_pdf(p, x) / ref - 1) <= 1e-12


def test_log_density_extreme_arguments():
    p = VgParams(1.5, 2.0, 0.5)
    for x in (1e-300, 1e12, -1e15):
        v = vg_log_pdf(p, x)
        assert math.isfinite(v)
    mpmath.mp.dps = 30
    ref = float(mpmath.log(mpmath.besselk(1.5, 2e12)) + 1.5 * mpmath.log(1e12) + 0.5 * 1e12)
    mpmath.mp.dps = 15
    assert abs(vg_log_pdf(p, 1e12) - p.log_norm - ref) <= 1e-12 * abs(ref)


def test_singular_origin_raises():
    with pytest.raises(SingularityError):
        vg_pdf(VgParams(0.0, 1.0, 0.0), 0.0)
    with pytest.raises(SingularityError):
        vg_pdf(VgParams(-0.25, 1.0, 0.0), np.array([1.0, 0.0]))


@pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (0.0, 1.0, -1.5), (-0.5, 1.0, 0.0), (0.0, 0.0, 0.0),
                                  (float("nan"), 1.0, 0.0)])
def test_parameter_validation(args):
    with pytest.raises(ValueError):
        VgParams(*args)


def test_skew_message_names_the_constraint():
    with pytest.raises(ValueError, match="0 ≤ \\|β\\| < α"):
        VgParams(0.0, 1.0, 1.0)


# sign probability

def test_symmetric_sign_probability():
    assert vg_prob_nonpositive(VgParams(1.3, 2.0, 0.0)) == 0.5


def test_sign_probability_quadrature():
    p = VgParams(0.5, 2.0, 1.0)
    assert abs(vg_prob_nonpositive(p) - (1 - quad_mass(p, 0.0, np.inf))) <= 1e-8


@pytest.mark.parametrize("m", [-0.25, 0.5, 2.0])
def test_sign_probability_decreases_in_skew(m):
    betas = np.linspace(-0.9, 0.9, 9)
    vals = [vg_prob_nonpositive(VgParams(m, 1.0, b)) for b in betas]
    quads = [quad_mass(VgParams(m, 1.0, b), -np.inf, 0.0) for b in betas]
    assert np.all(np.diff(vals) < 0)
    assert np.max(np.abs(np.array(vals) - quads)) <= 1e-8


# CDF and CF

def test_cdf_limits_and_midpoint():
    p = VgParams(0.7, 1.5, 0.4)
    assert abs(vg_cdf(p, 0.0) - vg_prob_nonpositive(p)) <= 1e-15
    assert vg_cdf(p, -60.0) < 1e-12
    assert abs(vg_cdf(p, 60.0) - 1) < 1e-12


def test_cf_against_quadrature():
    p = VgParams(0.3, 1.2, -0.5)
    for t in (0.4, 2.0):
        re = quad_mass(p, -np.inf, np.inf, lambda x: math.cos(t * x))
        im = quad_mass(p, -np.inf, np.inf, lambda x: math.sin(t * x))
        assert abs(vg_cf(p, t) - complex(re, im)) <= 1e-9


# Mellin transforms

def test_mellin_symmetric_half_mass():
    assert abs(vg_mellin_pos(VgParams(1.0, 2.0, 0.0), 0.0) - 0.5) <= 1e-15


@given(st.floats(-0.45, 3), st.floats(0.2, 4), st.floats(-0.9, 0.9))
def test_mellin_total_mass(m, a, r):
    p = VgParams(m, a, r * a)
    assert abs(vg_mellin_pos(p, 0.0) + vg_mellin_neg(p, 0.0) - 1) <= 1e-12


def test_mellin_against_quadrature():
    p = VgParams(0.5, 2.0, 0.7)
    ref = quad_mass(p, 0.0, np.inf, lambda x: x ** 1.3)
    assert abs(vg_mellin_pos(p, 1.3) - ref) <= 1e-8


@pytest.mark.parametrize("p", GRID[::4], ids=lambda p: f"m{p.m}-a{p.alpha}-b{p.beta:.2f}")
@pytest.mark.parametrize("s", [0.5, 2.0])
def test_mellin_pos_plus_neg_quadrature(p, s):
    ref = quad_mass(p, -np.inf, np.inf, lambda x: abs(x) ** s)
    val = vg_mellin_pos(p, s) + vg_mellin_neg(p, s)
    assert abs(val - ref) <= 1e-8 * max(1.0, ref)


# sampling

def test_sample_mean():
    p = VgParams(1.0, 2.0, 0.5)
    b = vg_sample(p, 1_000_000, 17)
    se = b.values.std() / math.sqrt(b.n)
    assert abs(b.values.mean() - 0.4) <= 3 * se
    ref = quad_mass(p, -np.inf, np.inf, lambda x: x)
    assert abs(ref - 0.4) <= 1e-9


def test_symmetric_sample_skewness():
    b = vg_sample(VgParams(0.8, 1.0, 0.0), 1_000_000, 5).values
    z = (b - b.mean()) / b.std()
    skew = np.mean(z ** 3)
    se = np.sqrt(np.var(z ** 3) / b.size)
    assert abs(skew) <= 3 * se


def test_sampling_is_deterministic():
    p = VgParams(0.2, 1.5, -0.3)
    a, b = vg_sample(p, 1000, 99), vg_sample(p, 1000, 99)
    assert np.array_equal(a.values, b.values) and a.spec_digest == b.spec_digest
    assert not np.array_equal(a.values, vg_sample(p, 1000, 100).values)


def _chained_cdf(p):
    def cdf(g):
        out = np.empty(g.size)
        out[0] = vg_cdf(p, g[0])
        for i in range(1, g.size):
            out[i] = out[i - 1] + quad_mass(p, g[i - 1], g[i])
        return out
    return cdf


@pytest.mark.parametrize("p", GRID, ids=lambda p: f"m{p.m}-a{p.alpha}-b{p.beta:.2f}")
def test_sampler_ks(p):
    b = vg_sample(p, 100_000, 2024)
    assert ks_statistic_bound(b, _chained_cdf(p)).bound <= 0.006
