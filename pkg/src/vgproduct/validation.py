"""Numerical acceptance checks shared by the test-suite and the CLI.

Each ``check_*`` function runs one criterion and returns a
:class:`CriterionResult` with the worst measured discrepancy, so failures
report how far off they are rather than just a flag.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from . import meijer, oracle, product, special_cases
from .meijer import MeijerGSpec
from .product import ProductSpec
from .vg import VgParams, vg_prob_nonpositive

__all__ = [
    "CriterionResult",
    "GRID_SPECS",
    "CRITERIA",
    "SUITES",
    "run_criterion",
    "run_suite",
]

DEFAULT_SEED = 20240917


@dataclass
class CriterionResult:
    key: str
    title: str
    passed: bool
    measured: float
    threshold: float
    seconds: float = 0.0
    details: list[str] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.key} {self.title}: worst={self.measured:.3g} "
                f"(threshold {self.threshold:.3g}, {self.seconds:.1f}s)")


# N ∈ {2, 3}, m ∈ {-1/4, 0, 1/2, 2}, β/α ∈ {0, ±1/2}
GRID_SPECS: tuple[ProductSpec, ...] = tuple(ProductSpec.of(*f) for f in [
    ((-0.25, 1.0, 0.0), (0.5, 1.0, 0.0)),
    ((0.0, 1.0, 0.5), (2.0, 2.0, -1.0)),
    ((0.5, 1.0, 0.5), (0.5, 2.0, 0.0)),
    ((2.0, 0.5, 0.0), (0.0, 1.0, 0.0)),
    ((-0.25, 1.0, -0.5), (2.0, 1.0, 0.5)),
    ((0.0, 2.0, 0.0), (0.0, 1.0, 0.0)),
    ((0.0, 1.0, 0.5), (-0.25, 0.5, 0.25), (2.0, 1.0, -0.5)),
    ((0.5, 1.0, 0.5), (0.0, 2.0, 0.0), (-0.25, 1.0, -0.5)),
    ((0.0, 1.0, 0.0), (0.5, 2.0, 0.0), (2.0, 0.5, 0.0)),
    ((0.5, 1.0, 0.5), (0.5, 1.0, -0.5), (0.5, 2.0, 1.0)),
    ((-0.25, 1.0, 0.0), (-0.25, 2.0, 0.0), (0.5, 1.0, 0.0)),
    ((2.0, 1.0, 0.5), (0.0, 1.0, -0.5), (0.5, 0.5, -0.25)),
])

GRID_Z = (-5.0, -1.0, -0.2, 0.2, 1.0, 5.0)


def _timed(fn: Callable[[], CriterionResult]) -> CriterionResult:
    t0 = time.perf_counter()
    res = fn()
    res.seconds = time.perf_counter() - t0
    return res


def _label(spec: ProductSpec) -> str:
    return "[" + ", ".join(f"({f.m:g},{f.alpha:g},{f.beta:g})" for f in spec.factors) + "]"


# ---------------------------------------------------------------------------
# 1: density against numeric convolution
# ---------------------------------------------------------------------------

def check_oracle_equivalence() -> CriterionResult:
    worst = 0.0
    details = []
    z = np.array(GRID_Z)
    for spec in GRID_SPECS:
        f = product.product_pdf(spec, z)
        ref = oracle.convolution_pdf(spec, z, 1e-12)
        excess = np.abs(f.value - ref) / np.maximum(1e-6, 1e-5 * np.abs(ref))
        worst = max(worst, float(np.max(excess)))
        details.append(f"{_label(spec)} max|Δ|={np.max(np.abs(f.value - ref)):.2e}")
    return CriterionResult("C1", "density vs numeric convolution", worst <= 1.0, worst, 1.0,
                           details=details)


# ---------------------------------------------------------------------------
# 2: normalisation
# ---------------------------------------------------------------------------

def check_normalization() -> CriterionResult:
    worst = 0.0
    details = []
    for spec in GRID_SPECS:
        r = product.product_total_mass(spec)
        d = abs(r.value - 1.0)
        worst = max(worst, d)
        details.append(f"{_label(spec)} mass-1={r.value - 1:.2e}")
    return CriterionResult("C2", "total mass equals one", worst <= 1e-6, worst, 1e-6,
                           details=details)


# ---------------------------------------------------------------------------
# 3: Laplace closed form
# ---------------------------------------------------------------------------

def check_laplace_pin() -> CriterionResult:
    spec = ProductSpec.of((0.5, 1.0, 0.0), (0.5, 1.0, 0.0))
    z = np.array([0.1, 0.5, 2.0])
    f = product.product_pdf(spec, z).value
    ref = special.k0(2 * np.sqrt(z))
    worst = float(np.max(np.abs(f - ref) / ref))
    return CriterionResult("C3", "N=2 Laplace density equals K0(2√|z|)", worst <= 1e-8, worst, 1e-8,
                           details=[f"rel. errors {np.abs(f - ref) / ref}"])


# ---------------------------------------------------------------------------
# 4: CDF derivative against density
# ---------------------------------------------------------------------------

FD_SPECS = (
    ProductSpec.of((0.5, 1.0, 0.0), (1.0, 1.0, 0.0)),
    ProductSpec.of((0.0, 1.0, 0.0), (0.5, 2.0, 0.0), (2.0, 0.5, 0.0)),
)


def check_cdf_derivative() -> CriterionResult:
    h = 1e-4
    worst = 0.0
    details = []
    for spec in FD_SPECS:
        for zv in (-1.5, -0.3, 0.3, 1.5):
            up = product.product_cdf_symmetric(spec, zv + h, 1e-13).value
            dn = product.product_cdf_symmetric(spec, zv - h, 1e-13).value
            fd = (up - dn) / (2 * h)
            f = product.product_pdf_symmetric(spec, zv).value
            rel = abs(fd / f - 1)
            worst = max(worst, rel)
            details.append(f"{_label(spec)} z={zv:+g} rel={rel:.2e}")
    return CriterionResult("C4", "finite-difference CDF matches density", worst <= 1e-5, worst, 1e-5,
                           details=details)


# ---------------------------------------------------------------------------
# 5: sign probability
# ---------------------------------------------------------------------------

def check_sign_probability() -> CriterionResult:
    worst_cdf = 0.0
    details = []
    for spec in GRID_SPECS:
        p = product.prob_nonpositive(spec)
        c = product.product_cdf_numeric(spec, 0.0).value
        worst_cdf = max(worst_cdf, abs(p - c))
        details.append(f"{_label(spec)} P(Z<=0)={p:.12f} Δ={p - c:.2e}")
    worst_eq = 0.0
    for f in (VgParams(1.0, 2.0, 0.8), VgParams(0.5, 1.0, -0.3), VgParams(-0.25, 1.5, 1.0)):
        pf = vg_prob_nonpositive(f)
        for n in (2, 3, 4):
            general = product.prob_nonpositive_general([pf] * n)
            equal = product.prob_nonpositive_equal(pf, n)
            worst_eq = max(worst_eq, abs(general - equal))
    details.append(f"identical factors: max|general-equal|={worst_eq:.2e}")
    measured = max(worst_cdf / 1e-7, worst_eq / 1e-12)
    return CriterionResult("C5", "sign probability vs numeric CDF at 0", measured <= 1.0, measured, 1.0,
                           details=details)


# ---------------------------------------------------------------------------
# 6: characteristic functions
# ---------------------------------------------------------------------------

CF_TS = (0.1, 0.7, 2.0, 10.0)
CF_SYMMETRIC = ProductSpec.of((0.0, 1.0, 0.0), (1.0, 1.0, 0.0))
CF_HALFINT = ProductSpec.of((0.5, 1.0, 0.3), (0.5, 2.0, -0.4))
CF_HALFINT_SYM = ProductSpec.of((0.5, 1.0, 0.0), (1.5, 2.0, 0.0))


def check_characteristic_functions() -> CriterionResult:
    worst = 0.0
    details = []
    for name, spec, fn in (("symmetric", CF_SYMMETRIC, product.product_cf_symmetric),
                           ("half-integer", CF_HALFINT, product.product_cf_halfint)):
        vals = fn(spec, np.array(CF_TS)).value
        for t, v in zip(CF_TS, vals):
            ref = oracle.cf_fourier(spec, t, pdf="product")
            d = abs(v - ref)
            worst = max(worst, d / 1e-5)
            if abs(v) > 1 + 1e-12:
                worst = max(worst, 2.0)
            details.append(f"{name} t={t:g} |Δ|={d:.2e}")
        at0 = complex(fn(spec, 0.0).value)
        worst = max(worst, abs(at0 - 1) / 1e-12)
    im = np.abs(np.imag(product.product_cf_halfint(CF_HALFINT_SYM, np.array(CF_TS)).value))
    worst = max(worst, float(np.max(im)) / 1e-10)
    details.append(f"symmetric half-integer max|Im|={np.max(im):.2e}")
    return CriterionResult("C6", "characteristic functions vs Fourier quadrature", worst <= 1.0,
                           worst, 1.0, details=details)


# ---------------------------------------------------------------------------
# 7: Monte Carlo
# ---------------------------------------------------------------------------

def mc_cases():
    lap = special_cases.LaplaceProductSpec(((1.0, 0.4), (2.0, -0.5)))
    mix = special_cases.MixedNormalLaplaceSpec((1.0, 2.0), (1.5,))
    cor = special_cases.CorrelatedNormalSpec(((1.0, 1.0, 0.3), (1.0, 2.0, -0.6)))
    gen = ProductSpec.of((1.0, 1.0, 0.4), (0.3, 1.5, -0.6))
    return (("asymmetric Laplace", lap, lap.to_product_spec(), lap.sample),
            ("normal-Laplace", mix, mix.to_product_spec(), mix.sample),
            ("correlated normal", cor, cor.to_product_spec(), cor.sample),
            ("generic skewed", gen, gen, lambda n, seed: oracle.mc_product_sample(gen, n, seed)))


def check_monte_carlo(n: int = 1_000_000, seed: int = DEFAULT_SEED) -> CriterionResult:
    worst = 0.0
    details = []
    for k, (name, _, ps, sampler) in enumerate(mc_cases()):
        batch = sampler(n, seed + k)
        b = oracle.ks_statistic_bound(batch, lambda x: product.product_cdf_numeric(ps, x).value)
        worst = max(worst, b.bound)
        details.append(f"{name}: KS <= {b.bound:.5f} (grid {b.grid_size}, cell {b.max_cell_mass:.1e})")
    return CriterionResult("C7", "Monte Carlo KS distance", worst <= 0.005, worst, 0.005, details=details)


# ---------------------------------------------------------------------------
# 8: asymptotics
# ---------------------------------------------------------------------------

ORIGIN_CASE_I = ProductSpec.of((0.5, 1.0, 0.0), (1.0, 1.0, 0.0))
ORIGIN_CASE_II = ProductSpec.of((1.0, 2.0, -0.5), (-0.25, 1.0, 0.3))
TAIL_SPEC = ProductSpec.of((0.5, 1.0, 0.0), (0.5, 1.0, 0.0))


def check_asymptotics() -> CriterionResult:
    details = []
    fails = []
    for name, spec in (("case (i)", ORIGIN_CASE_I), ("case (ii)", ORIGIN_CASE_II)):
        for z in (1e-8, -1e-8):
            r = product.product_pdf(spec, z).value / product.pdf_origin_asymptotic(spec, z)
            details.append(f"origin {name} z={z:g} ratio={r:.5f}")
            if not 0.95 <= r <= 1.05:
                fails.append(abs(r - 1) / 0.05)
    z = 25.0 ** 2 / TAIL_SPEC.xi
    ratio = product.product_sf_numeric(TAIL_SPEC, z).value / product.tail_asymptotic_cdf(TAIL_SPEC, z)
    details.append(f"tail ratio at (ξz)^(1/2)=25: {ratio:.5f}")
    if not 0.98 <= ratio <= 1.02:
        fails.append(abs(ratio - 1) / 0.02)
    lap_worst = 0.0
    for alpha in (0.5, 1.0, 2.0):
        lap = ProductSpec.of((0.5, alpha, 0.0))
        for zz in (0.5, 3.0, 20.0):
            a = product.tail_asymptotic_cdf(lap, zz)
            lap_worst = max(lap_worst, abs(a / (0.5 * math.exp(-alpha * zz)) - 1))
    details.append(f"N=1 Laplace tail max rel. deviation {lap_worst:.2e}")
    if lap_worst > 1e-12:
        fails.append(lap_worst / 1e-12)
    qs = [product.quantile_numeric(TAIL_SPEC, 1 - 10.0 ** -k) / product.quantile_asymptotic(TAIL_SPEC, 1 - 10.0 ** -k)
          for k in (4, 5, 6)]
    details.append("quantile ratios " + ", ".join(f"{q:.5f}" for q in qs))
    dist = [abs(q - 1) for q in qs]
    if not (dist[0] > dist[1] > dist[2]):
        fails.append(2.0)
    measured = max(fails) if fails else 0.0
    return CriterionResult("C8", "origin, tail and quantile asymptotics", not fails, measured, 1.0,
                           details=details)


# ---------------------------------------------------------------------------
# 9: Meijer-G identities
# ---------------------------------------------------------------------------

def identity_grid(cases: int = 100, seed: int = 7):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(cases):
        q = (2, 4, 6)[k % 3]
        b = tuple(float(v) for v in rng.uniform(-0.4, 3.0, q))
        shift = float(rng.uniform(-0.5, 1.0))
        out.append((MeijerGSpec.q0(b), shift))
    return out


IDENTITY_X = (0.01, 0.5, 2.0, 10.0)


def check_identities(cases: int = 100) -> CriterionResult:
    worst = 0.0
    details = []
    x = np.array(IDENTITY_X)
    for spec, alpha in identity_grid(cases):
        base = meijer.eval_g_q0(spec, x, 1e-13).value
        lo = min(spec.b) + alpha
        if lo > -1:
            shifted = meijer.eval_g_q0(meijer.shift_argument(spec, alpha), x, 1e-13).value
        else:
            shifted = meijer.evaluate(meijer.shift_argument(spec, alpha), x, 1e-13).value
        rel_s = np.abs(x ** alpha * base - shifted) / np.abs(shifted)
        inv = meijer.evaluate(meijer.invert_argument(spec), 1.0 / x, 1e-13).value
        rel_i = np.abs(inv - base) / np.abs(base)
        worst = max(worst, float(np.max(rel_s)), float(np.max(rel_i)))
    details.append(f"{cases} specs x {len(IDENTITY_X)} arguments: worst rel. {worst:.2e}")
    # CDF kernels: value 0 at 0, limit 1 at infinity
    lim_worst = 0.0
    for n in (1, 2, 3, 4):
        g = MeijerGSpec.cdf_kernel(1.0, (1.0,) * n)
        at0 = meijer.eval_g_cdf_class(g, 0.0).value
        far = meijer.eval_g_cdf_class(g, 10.0 ** (2 * n + 2)).value
        inv = meijer.invert_argument(g)
        near0 = meijer.evaluate(inv, 10.0 ** -(2 * n + 2)).value
        lim_worst = max(lim_worst, abs(at0), abs(far - 1), abs(near0 - 1))
        details.append(f"N={n}: G(0)={at0:g}, G(large)-1={far - 1:.1e}, inverted G(small)-1={near0 - 1:.1e}")
    measured = max(worst / 1e-10, lim_worst / 1e-10)
    return CriterionResult("C9", "shift and inversion identities, CDF-kernel limits", measured <= 1.0,
                           measured, 1.0, details=details)


# ---------------------------------------------------------------------------
# 10: subset coefficient
# ---------------------------------------------------------------------------

def check_subset_coefficient(max_n: int = 6, max_j: int = 3) -> CriterionResult:
    mismatches = 0
    count = 0
    for n in range(1, max_n + 1):
        for j in itertools.product(range(max_j + 1), repeat=n):
            for sign in (1, -1):
                count += 1
                if product.subset_coefficient(j, sign) != product.subset_coefficient_enumerated(j, sign):
                    mismatches += 1
    return CriterionResult("C10", "parity rule equals subset enumeration", mismatches == 0,
                           float(mismatches), 0.0, details=[f"{count} patterns compared"])


# ---------------------------------------------------------------------------
# 11: special cases against the generic evaluators
# ---------------------------------------------------------------------------

def check_special_cases() -> CriterionResult:
    z = np.array([-2.0, -0.8, -0.1, 0.3, 0.8, 4.0])
    t = np.array(CF_TS)
    diffs: dict[str, float] = {}

    def record(name, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        d = float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))
        diffs[name] = max(diffs.get(name, 0.0), d)

    lap = special_cases.LaplaceProductSpec(((1.0, 0.3), (2.0, -0.5), (1.5, 0.2)))
    ps = lap.to_product_spec()
    record("al pdf", special_cases.al_product_pdf(lap, z).value, product.product_pdf_mellin(ps, z).value)
    record("al cdf", special_cases.al_product_cdf(lap, z).value, product.product_cdf_numeric(ps, z).value)
    record("al cf", special_cases.al_product_cf(lap, t).value, product.product_cf_halfint(ps, t).value)
    sym = special_cases.LaplaceProductSpec.symmetric(1.0, 2.0)
    pss = sym.to_product_spec()
    record("laplace pdf", special_cases.laplace_product_pdf(sym, z).value, product.product_pdf_symmetric(pss, z).value)
    record("laplace cdf", special_cases.laplace_product_cdf(sym, z).value,
           product.product_cdf_symmetric(pss, z, form="general").value)
    record("laplace cf", special_cases.laplace_product_cf(sym, t).value, product.product_cf_symmetric(pss, t).value)
    mix = special_cases.MixedNormalLaplaceSpec((1.0, 2.0, 0.5, 1.5), (1.2,))
    pm = mix.to_product_spec()
    record("mixed pdf", special_cases.mixed_product_pdf(mix, z).value, product.product_pdf(pm, z).value)
    record("mixed cdf", special_cases.mixed_product_cdf(mix, z).value, product.product_cdf_numeric(pm, z).value)
    record("mixed cf", special_cases.mixed_product_cf(mix, t).value, product.product_cf_symmetric(pm, t).value)
    cor = special_cases.CorrelatedNormalSpec(((1.0, 2.0, 0.3), (0.5, 1.0, -0.6)))
    record("correlated pdf", special_cases.correlated_normal_product_pdf(cor, z, 1e-12).value,
           product.product_pdf(cor.to_product_spec(), z).value)
    cor0 = special_cases.CorrelatedNormalSpec(((1.0, 2.0, 0.0), (0.5, 1.0, 0.0)))
    record("correlated rho=0", special_cases.correlated_normal_product_pdf(cor0, z).value,
           special_cases.independent_normal_product_pdf((1.0, 2.0, 0.5, 1.0), z).value)
    worst = max(diffs.values())
    details = [f"{k}: {v:.2e}" for k, v in diffs.items()]
    return CriterionResult("C11", "special cases agree with generic evaluators", worst <= 1e-9, worst, 1e-9,
                           details=details)


CRITERIA: dict[str, Callable[[], CriterionResult]] = {
    "C1": check_oracle_equivalence,
    "C2": check_normalization,
    "C3": check_laplace_pin,
    "C4": check_cdf_derivative,
    "C5": check_sign_probability,
    "C6": check_characteristic_functions,
    "C7": check_monte_carlo,
    "C8": check_asymptotics,
    "C9": check_identities,
    "C10": check_subset_coefficient,
    "C11": check_special_cases,
}

SUITES: dict[str, tuple[str, ...]] = {
    "identities": ("C9", "C10", "C3", "C11"),
    "oracle-equivalence": ("C1", "C6"),
    "normalization": ("C2", "C4", "C5"),
    "asymptotics": ("C8",),
    "montecarlo": ("C7",),
}


def run_criterion(key: str) -> CriterionResult:
    return _timed(CRITERIA[key])


def run_suite(name: str) -> list[CriterionResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return [run_criterion(k) for k in SUITES[name]]
