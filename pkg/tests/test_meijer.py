import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from vgproduct.meijer import (
    ContourError,
    MeijerGSpec,
    asymptotic_theta,
    eval_g_cdf_class,
    eval_g_cf_class,
    eval_g_q0,
    evaluate,
    g_asymptotic,
    invert_argument,
    residue_series_q0,
    shift_argument,
)


def mp_meijer(spec: MeijerGSpec, x):
    a = [list(spec.a[: spec.n]), list(spec.a[spec.n:])]
    b = [list(spec.b[: spec.m]), list(spec.b[spec.m:])]
    return complex(mpmath.meijerg(a, b, x))


# G^{q,0}_{0,q}

def test_single_gamma_is_exponential():
    r = eval_g_q0(MeijerGSpec.q0((0.0,)), 1.3)
    assert r.converged and abs(r.value - math.exp(-1.3)) <= 1e-14


def test_two_gamma_reduces_to_k0():
    r = eval_g_q0(MeijerGSpec.q0((0.0, 0.0)), 0.49)
    assert abs(r.value - 2 * special.k0(1.4)) <= 1e-13


def test_two_gamma_reduces_to_k_nu():
    x, m = 1.1, 0.8
    r = eval_g_q0(MeijerGSpec.q0((0.0, m)), x * x)
    assert abs(r.value / (2 * x ** m * special.kv(m, 2 * x)) - 1) <= 1e-13


@pytest.mark.parametrize("b", [(0.0, 0.5, 1.0), (0.0, 0.0, 0.0), (-0.25, 0.3, 2.0, 2.0), (0.5, 1.5, 0.0, 1.0, 2.5)])
@pytest.mark.parametrize("x", [1e-6, 0.02, 0.7, 5.0, 60.0])
def test_q0_against_mpmath(b, x):
    spec = MeijerGSpec.q0(b)
    r = eval_g_q0(spec, x, 1e-13)
    ref = mp_meijer(spec, x).real
    assert r.converged
    assert abs(r.value - ref) <= 1e-11 * abs(ref)


def _grid(cases=100, seed=11):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(cases):
        q = (2, 4, 6)[k % 3]
        out.append(tuple(float(v) for v in rng.uniform(-0.4, 3.0, q)))
    return out


GRID = _grid()
XS = np.array([0.01, 0.5, 2.0, 10.0])


def test_quadrature_and_residue_routes_agree():
    worst = 0.0
    for b in GRID:
        spec = MeijerGSpec.q0(b)
        quad = eval_g_q0(spec, XS, method="quad")
        for i, x in enumerate(XS):
            v, e, ok = residue_series_q0(b, x)
            assert ok
            bound = max(1e-8, 10 * quad.abs_err[i], 10 * e) * max(1.0, abs(v))
            worst = max(worst, abs(quad.value[i] - v) / bound)
    assert worst <= 1.0


def test_residue_series_handles_coinciding_parameters():
    b = (0.5, 0.5, 1.5, 0.0)
    v, _, ok = residue_series_q0(b, 0.03)
    ref = mp_meijer(MeijerGSpec.q0(b), 0.03).real
    assert ok and abs(v / ref - 1) <= 1e-12


def test_density_kernels_are_positive():
    for b in GRID:
        v = eval_g_q0(MeijerGSpec.q0(b), np.geomspace(1e-4, 50, 12)).value
        assert np.all(v > 0)


@given(st.lists(st.floats(-0.45, 3.0), min_size=1, max_size=5), st.floats(1e-3, 30.0))
def test_q0_positive_and_finite(b, x):
    v = eval_g_q0(MeijerGSpec.q0(b), x).value
    assert math.isfinite(v) and v > 0


def test_rejects_unsupported_shape():
    with pytest.raises(ValueError):
        eval_g_q0(MeijerGSpec(1, 1, 1, 2, (1.0,), (0.0, 0.0)), 1.0)
    with pytest.raises(ValueError):
        MeijerGSpec(3, 0, 0, 2, (), (0.0, 0.0))


# CDF class

def test_cdf_kernel_vanishes_at_zero():
    spec = MeijerGSpec.cdf_kernel(1.0, (1.0, 1.0))
    assert eval_g_cdf_class(spec, 0.0).value == 0.0


def test_cdf_kernel_laplace():
    spec = MeijerGSpec.cdf_kernel(1.0, (1.0,))
    assert abs(eval_g_cdf_class(spec, 2.0).value - (1 - math.exp(-2))) <= 1e-14


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_cdf_kernel_limit_is_one(n):
    spec = MeijerGSpec.cdf_kernel(1.0, (1.0,) * n)
    x = 10.0 ** (2 * n + 3)
    assert abs(eval_g_cdf_class(spec, x).value - 1) <= 1e-10


def test_cdf_kernel_complement_keeps_relative_accuracy():
    spec = MeijerGSpec.cdf_kernel(1.0, (1.0, 1.0))
    x = 900.0
    c = eval_g_cdf_class(spec, x, complement=True).value
    ref = 1 - mp_meijer(spec, x).real
    mpmath.mp.dps = 40
    try:
        ref = float(1 - mpmath.meijerg([[1], []], [[1, 1], [0]], x))
    finally:
        mpmath.mp.dps = 15
    assert abs(c / ref - 1) <= 1e-10


@pytest.mark.parametrize("x", [0.05, 0.9, 7.0])
def test_cdf_kernel_against_mpmath(x):
    spec = MeijerGSpec.cdf_kernel(1.0, (1.0, 0.5, 1.5))
    ref = mp_meijer(spec, x).real
    assert abs(eval_g_cdf_class(spec, x).value - ref) <= 1e-12


# CF class

def test_cf_kernel_geometric_pair():
    spec = MeijerGSpec.cf_kernel(0.0, (0.0,))
    r = eval_g_cf_class(spec, 3j)
    assert abs(r.value - (1 - 3j) / 10) <= 1e-13


def test_cf_kernel_real_argument_laplace():
    # 1/(1+w) at w = t²/α² reproduces α²/(α²+t²) = 0.8 for α = 2, t = 1
    spec = MeijerGSpec.cf_kernel(0.0, (0.0,))
    assert abs(eval_g_cf_class(spec, 0.25).value - 0.8) <= 1e-14


def test_cf_kernel_decays():
    spec = MeijerGSpec.cf_kernel(0.0, (0.0, 0.5))
    vals = [abs(eval_g_cf_class(spec, 1j * w).value) for w in (1e2, 1e4, 1e6)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-2


@pytest.mark.parametrize("z", [0.4j, 2.5j, 1 + 1j, 3.0])
def test_cf_kernel_against_mpmath(z):
    spec = MeijerGSpec.cf_kernel(0.0, (0.0, 0.5, 1.0))
    ref = mp_meijer(spec, z)
    assert abs(eval_g_cf_class(spec, z).value - ref) <= 1e-12


# identities

def test_shift_by_zero_is_identity():
    spec = MeijerGSpec.q0((0.0, 0.3))
    assert shift_argument(spec, 0.0) == spec


def test_shift_identity_example():
    spec = MeijerGSpec.q0((0.0, 0.0))
    x = 0.5
    lhs = x * eval_g_q0(spec, x).value
    rhs = eval_g_q0(shift_argument(spec, 1.0), x).value
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


@given(st.lists(st.floats(-0.4, 3.0), min_size=1, max_size=6), st.floats(-2, 2))
def test_shift_composition_is_inverse(b, a):
    spec = MeijerGSpec.q0(b)
    back = shift_argument(shift_argument(spec, a), -a)
    assert np.allclose(back.b, spec.b, rtol=0, atol=1e-12)


def test_inversion_is_involution():
    spec = MeijerGSpec.cdf_kernel(1.0, (1.0, 0.5))
    assert invert_argument(invert_argument(spec)) == spec


def test_inversion_example():
    spec = MeijerGSpec.q0((0.0,))
    a = eval_g_q0(spec, 2.0).value
    b = evaluate(invert_argument(spec), 0.5).value
    assert abs(a - math.exp(-2)) <= 1e-15 and abs(b - math.exp(-2)) <= 1e-13


@pytest.mark.parametrize("n", [1, 2, 3])
def test_inverted_cdf_kernel_limit(n):
    inv = invert_argument(MeijerGSpec.cdf_kernel(1.0, (1.0,) * n))
    assert abs(evaluate(inv, 10.0 ** -(2 * n + 3)).value - 1) <= 1e-10


def test_shift_and_inversion_identities_on_grid():
    rng = np.random.default_rng(3)
    worst = 0.0
    for b in GRID:
        spec = MeijerGSpec.q0(b)
        base = eval_g_q0(spec, XS, 1e-13).value
        a = float(rng.uniform(-0.3, 1.0))
        shifted = evaluate(shift_argument(spec, a), XS, 1e-13).value
        inv = evaluate(invert_argument(spec), 1 / XS, 1e-13).value
        worst = max(worst, np.max(np.abs(XS ** a * base / shifted - 1)), np.max(np.abs(inv / base - 1)))
    assert worst <= 1e-10


def test_general_evaluator_against_mpmath():
    spec = MeijerGSpec(2, 1, 1, 3, (0.3,), (0.0, 0.5, -0.2))
    for x in (0.1, 1.0, 4.0):
        assert abs(evaluate(spec, x).value - mp_meijer(spec, x).real) <= 1e-12


def test_overlapping_pole_families_raise():
    spec = MeijerGSpec(1, 1, 1, 1, (2.0,), (0.0,))
    with pytest.raises(ContourError):
        eval_g_cf_class(spec, 1.0)


# asymptotics

def test_asymptotic_exact_for_single_gamma():
    spec = MeijerGSpec.q0((0.0,))
    for x in (0.1, 1.0, 30.0):
        assert abs(g_asymptotic(spec, x) / math.exp(-x) - 1) <= 1e-14


def test_asymptotic_ratio_two_gammas():
    spec = MeijerGSpec.q0((0.0, 0.0))
    r = g_asymptotic(spec, 400.0) / eval_g_q0(spec, 400.0).value
    assert 0.98 <= r <= 1.02


def test_theta_for_zero_and_half():
    # ((1-σ)/2 + Σb)/σ = (-1/2 + 1/2)/2
    spec = MeijerGSpec.q0((0.0, 0.5))
    assert asymptotic_theta(spec) == 0.0


def test_theta_zero_is_exact_for_half_order_kernel():
    # G(x|0,1/2) = √π e^{-2√x}: the limiting form with θ = 0 is exact
    spec = MeijerGSpec.q0((0.0, 0.5))
    for x in (0.3, 4.0, 100.0):
        exact = math.sqrt(math.pi) * math.exp(-2 * math.sqrt(x))
        assert abs(eval_g_q0(spec, x).value / exact - 1) <= 1e-12
        assert abs(g_asymptotic(spec, x) / exact - 1) <= 1e-14


def test_asymptotic_ratio_converges_q4():
    spec = MeijerGSpec.q0((0.0, 0.0, 0.5, 0.5))
    r = [g_asymptotic(spec, x) / eval_g_q0(spec, x).value for x in (1e3, 1e4)]
    assert abs(r[1] - 1) < abs(r[0] - 1)
    assert abs(r[1] - 1) <= 0.02


def test_underflow_region_returns_zero():
    r = eval_g_q0(MeijerGSpec.q0((0.0, 0.0)), 1e6)
    assert r.converged and r.value == 0.0
