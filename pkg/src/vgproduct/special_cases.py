"""Closed forms for the named sub-families of VG products.

* asymmetric-Laplace products (every ``m_i = 1/2``), with the symmetric
  Laplace product as the ``β = 0`` sub-case;
* products of zero-mean normals and Laplace variables;
* products of ``2N`` zero-mean normals with a block-diagonal covariance,
  where each correlated pair multiplies to a VG variable.

Each spec type maps to a :class:`~vgproduct.product.ProductSpec` via
``to_product_spec``; the evaluators here use the reduced, lower-order
G-function expressions and are cross-checked against the generic ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .meijer import (
    DEFAULT_TOL,
    EvalResult,
    MeijerGSpec,
    eval_g_cdf_class,
    eval_g_cf_class,
    eval_g_q0,
)
from .product import ProductSpec, _power_over_factorial, _shell, product_pdf, subset_coefficient
from .vg import SampleBatch, SingularityError, VgParams, digest, spawn_generators

__all__ = [
    "LaplaceProductSpec",
    "MixedNormalLaplaceSpec",
    "CorrelatedNormalSpec",
    "al_product_pdf",
    "al_product_cdf",
    "al_product_cf",
    "laplace_product_pdf",
    "laplace_product_cdf",
    "laplace_product_cf",
    "mixed_product_pdf",
    "mixed_product_cdf",
    "mixed_product_cf",
    "correlated_normal_product_pdf",
    "independent_normal_product_pdf",
]


def _as_array(x):
    xa = np.asarray(x, dtype=float)
    return np.atleast_1d(xa), xa.ndim == 0


def _pack(vals, errs, ok, tol, scalar):
    ok = ok & (errs <= tol * np.maximum(1.0, np.abs(vals)))
    if scalar:
        v = vals[0]
        v = complex(v) if np.iscomplexobj(vals) else float(v)
        return EvalResult(v, float(errs[0]), bool(ok[0]))
    return EvalResult(vals, errs, ok)


SERIES_MAX_RHO = 0.8  # beyond this the correlated series is slow and overflows

# ---------------------------------------------------------------------------
# asymmetric Laplace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaplaceProductSpec:
    """Factors ``AL(α_i, β_i)``, the VG law with ``m = 1/2``.

    The asymmetric-Laplace density is ``(α²-β²) e^{βx-α|x|} / (2α)``.
    """

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((float(a), float(b)) for a, b in self.pairs)
        if not pairs:
            raise ValueError("at least one Laplace factor is required")
        for a, b in pairs:
            VgParams(0.5, a, b)  # validation
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def symmetric(cls, *alphas) -> "LaplaceProductSpec":
        return cls(tuple((a, 0.0) for a in alphas))

    @property
    def n(self) -> int:
        return len(self.pairs)

    def to_product_spec(self) -> ProductSpec:
        return ProductSpec(tuple(VgParams(0.5, a, b) for a, b in self.pairs))

    @property
    def log_const(self) -> float:
        """``log(Π γ_i² / (2^N ξ))``."""
        return sum(math.log((a - b) * (a + b)) - math.log(2 * a) for a, b in self.pairs)

    def sample(self, n: int, seed: int) -> SampleBatch:
        """Products of differences of independent exponentials.

        ``AL(α, β)`` is ``E₁ - E₂`` with rates ``α-β`` and ``α+β``.
        """
        gens = spawn_generators(seed, self.n)
        out = np.ones(n)
        for (a, b), g in zip(self.pairs, gens):
            out *= g.exponential(1.0 / (a - b), n) - g.exponential(1.0 / (a + b), n)
        return SampleBatch(out, int(seed), int(n), digest(self))


def al_product_pdf(spec: LaplaceProductSpec, z, tol: float = DEFAULT_TOL) -> EvalResult:
    """``Π γ_i² / (2^N ξ) Σ_{σ∈A(z)} G^{N,0}_{0,N}(ω_σ|z| | 0,…,0)``."""
    za, scalar = _as_array(z)
    if np.any(za == 0):
        raise SingularityError("asymmetric-Laplace product density evaluated at z = 0")
    ps = spec.to_product_spec()
    c = math.exp(spec.log_const)
    g = MeijerGSpec.q0((0.0,) * spec.n)
    vals = np.zeros(za.size)
    errs = np.zeros(za.size)
    ok = np.ones(za.size, dtype=bool)
    for sign, parity in ((1, 0), (-1, 1)):
        idx = np.flatnonzero(np.sign(za) == sign)
        if idx.size == 0:
            continue
        for w in ps.weights(parity):
            r = eval_g_q0(g, w.omega * np.abs(za[idx]), tol / max(1.0, c))
            vals[idx] += c * np.atleast_1d(r.value)
            errs[idx] += c * np.atleast_1d(r.abs_err)
            ok[idx] &= np.atleast_1d(r.converged)
    return _pack(vals, errs, ok, tol, scalar)


def al_product_cdf(spec: LaplaceProductSpec, z, tol: float = DEFAULT_TOL, *, upper: bool = False) -> EvalResult:
    """CDF of an asymmetric-Laplace product.

    ``z > 0``: ``1 - C Σ_{S^+} ω_σ^{-1} {1 - G^{N,1}_{1,N+1}(ω_σ z | 1; 1,…,1,0)}``;
    ``z < 0``: ``C Σ_{S^-} ω_σ^{-1} {1 - G^{N,1}_{1,N+1}(ω_σ|z| | 1; 1,…,1,0)}``,
    with ``C = Π γ_i² / (2^N ξ)``.  The braces are evaluated as the
    complementary kernel so that tail values keep relative accuracy.
    ``z = 0`` gives ``C Σ_{S^-} 1/ω_σ``.
    """
    za, scalar = _as_array(z)
    ps = spec.to_product_spec()
    c = math.exp(spec.log_const)
    g = MeijerGSpec.cdf_kernel(1.0, (1.0,) * spec.n)
    tail = {0: np.zeros(za.size), 1: np.zeros(za.size)}
    errs = np.zeros(za.size)
    ok = np.ones(za.size, dtype=bool)
    nz = np.flatnonzero(za != 0)
    for parity in (0, 1):
        for w in ps.weights(parity):
            v = np.ones(za.size)
            if nz.size:
                r = eval_g_cdf_class(g, w.omega * np.abs(za[nz]), tol, complement=True)
                v[nz] = np.atleast_1d(r.value)
                errs[nz] += c / w.omega * np.atleast_1d(r.abs_err)
                ok[nz] &= np.atleast_1d(r.converged)
            tail[parity] += c / w.omega * v
    # tail[0](|z|) = P(Z > |z|); tail[1](|z|) = P(Z < -|z|)
    mass_neg = c * sum(1.0 / w.omega for w in ps.weights(1))
    lower = np.where(za < 0, tail[1], 1.0 - tail[0])
    lower = np.where(za == 0, mass_neg, lower)
    upper_v = np.where(za < 0, 1.0 - tail[1], tail[0])
    upper_v = np.where(za == 0, 1.0 - mass_neg, upper_v)
    return _pack(upper_v if upper else lower, errs, ok, tol, scalar)


def al_product_cf(spec: LaplaceProductSpec, t, tol: float = DEFAULT_TOL) -> EvalResult:
    """``(i/(2^N ξ t)) Π γ_j² {Σ_{S^+} G^{N,1}_{1,N}(iω_σ/t | 0; 0,…,0)
    - Σ_{S^-} G^{N,1}_{1,N}(-iω_σ/t | 0; 0,…,0)}``; ``φ(0) = 1``."""
    ta, scalar = _as_array(t)
    ps = spec.to_product_spec()
    c = math.exp(spec.log_const)
    g = MeijerGSpec.cf_kernel(0.0, (0.0,) * spec.n)
    vals = np.ones(ta.size, dtype=complex)
    errs = np.zeros(ta.size)
    ok = np.ones(ta.size, dtype=bool)
    nz = np.flatnonzero(ta != 0)
    if nz.size:
        tt = ta[nz]
        acc = np.zeros(nz.size, dtype=complex)
        err = np.zeros(nz.size)
        for parity, sgn in ((0, 1.0), (1, -1.0)):
            for w in ps.weights(parity):
                r = eval_g_cf_class(g, sgn * 1j * w.omega / tt, tol)
                acc += sgn * np.atleast_1d(r.value)
                err += np.atleast_1d(r.abs_err)
                ok[nz] &= np.atleast_1d(r.converged)
        vals[nz] = 1j * c / tt * acc
        errs[nz] = c * err / np.abs(tt)
    return _pack(vals, errs, ok, tol, scalar)


def _require_symmetric(spec: LaplaceProductSpec):
    if any(b != 0 for _, b in spec.pairs):
        raise ValueError("symmetric Laplace forms require every β_i = 0")


def laplace_product_pdf(spec: LaplaceProductSpec, z, tol: float = DEFAULT_TOL) -> EvalResult:
    """Symmetric Laplace product: ``(ξ/2) G^{N,0}_{0,N}(ξ|z| | 0,…,0)``."""
    _require_symmetric(spec)
    za, scalar = _as_array(z)
    if np.any(za == 0):
        raise SingularityError("Laplace product density evaluated at z = 0")
    xi = float(np.prod([a for a, _ in spec.pairs]))
    r = eval_g_q0(MeijerGSpec.q0((0.0,) * spec.n), xi * np.abs(za), tol / max(1.0, xi / 2))
    return _pack(0.5 * xi * np.atleast_1d(r.value), 0.5 * xi * np.atleast_1d(r.abs_err),
                 np.atleast_1d(r.converged), tol, scalar)


def laplace_product_cdf(spec: LaplaceProductSpec, z, tol: float = DEFAULT_TOL) -> EvalResult:
    """Symmetric Laplace product: ``1/2 + sgn(z)/2 · G^{N,1}_{1,N+1}(ξ|z| | 1; 1,…,1,0)``."""
    _require_symmetric(spec)
    za, scalar = _as_array(z)
    xi = float(np.prod([a for a, _ in spec.pairs]))
    r = eval_g_cdf_class(MeijerGSpec.cdf_kernel(1.0, (1.0,) * spec.n), xi * np.abs(za), tol)
    vals = 0.5 + 0.5 * np.sign(za) * np.atleast_1d(r.value)
    return _pack(vals, 0.5 * np.atleast_1d(r.abs_err), np.atleast_1d(r.converged), tol, scalar)


def laplace_product_cf(spec: LaplaceProductSpec, t, tol: float = DEFAULT_TOL) -> EvalResult:
    """Symmetric Laplace product:
    ``ξ/(2^{N-1}π^{(N-1)/2}) |t|^{-1} G^{2N-1,1}_{1,2N-1}(ξ²/(4^{N-1}t²) | 1/2; 0,…,0, 1/2,…,1/2)``.
    """
    _require_symmetric(spec)
    ta, scalar = _as_array(t)
    n = spec.n
    xi = float(np.prod([a for a, _ in spec.pairs]))
    vals = np.ones(ta.size)
    errs = np.zeros(ta.size)
    ok = np.ones(ta.size, dtype=bool)
    nz = np.flatnonzero(ta != 0)
    if nz.size:
        at = np.abs(ta[nz])
        g = MeijerGSpec.cf_kernel(0.5, (0.0,) * (n - 1) + (0.5,) * n)
        r = eval_g_cf_class(g, xi ** 2 / (4 ** (n - 1) * at ** 2), tol)
        pref = xi / (2 ** (n - 1) * math.pi ** ((n - 1) / 2) * at)
        vals[nz] = pref * np.atleast_1d(r.value)
        errs[nz] = pref * np.atleast_1d(r.abs_err)
        ok[nz] = np.atleast_1d(r.converged)
    return _pack(vals, errs, ok, tol, scalar)


# ---------------------------------------------------------------------------
# normals and Laplace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixedNormalLaplaceSpec:
    """``2M`` centred normals ``N(0, σ_i²)`` times ``N`` Laplace(``α_j``) variables.

    Normals are paired in order; ``X_{2i-1} X_{2i}`` is ``VG(0, 1/(σ_{2i-1}σ_{2i}), 0)``.
    """

    sigmas: tuple = ()
    alphas: tuple = ()

    def __post_init__(self):
        sig = tuple(float(s) for s in self.sigmas)
        alp = tuple(float(a) for a in self.alphas)
        if len(sig) % 2:
            raise ValueError("the number of normal factors must be even (2M)")
        if any(not s > 0 for s in sig):
            raise ValueError("normal scales must satisfy σ > 0")
        if any(not a > 0 for a in alp):
            raise ValueError("Laplace scales must satisfy α > 0")
        if not sig and not alp:
            raise ValueError("at least one factor is required")
        object.__setattr__(self, "sigmas", sig)
        object.__setattr__(self, "alphas", alp)

    @property
    def m_pairs(self) -> int:
        return len(self.sigmas) // 2

    @property
    def n_laplace(self) -> int:
        return len(self.alphas)

    @property
    def nu(self) -> float:
        """``ν = Π σ_i^{-1} Π α_j``."""
        return float(np.prod([1.0 / s for s in self.sigmas]) * np.prod(self.alphas))

    def to_product_spec(self) -> ProductSpec:
        fs = [VgParams(0.0, 1.0 / (self.sigmas[2 * i] * self.sigmas[2 * i + 1]), 0.0)
              for i in range(self.m_pairs)]
        fs += [VgParams(0.5, a, 0.0) for a in self.alphas]
        return ProductSpec(tuple(fs))

    def _b(self, zeros_less: int = 0):
        k = self.m_pairs + self.n_laplace
        return (0.0,) * (k + self.m_pairs - zeros_less) + (0.5,) * self.n_laplace

    def sample(self, n: int, seed: int) -> SampleBatch:
        gens = spawn_generators(seed, len(self.sigmas) + len(self.alphas))
        out = np.ones(n)
        for s, g in zip(self.sigmas, gens):
            out *= s * g.standard_normal(n)
        for a, g in zip(self.alphas, gens[len(self.sigmas):]):
            out *= g.laplace(0.0, 1.0 / a, n)
        return SampleBatch(out, int(seed), int(n), digest(self))


def mixed_product_pdf(spec: MixedNormalLaplaceSpec, z, tol: float = DEFAULT_TOL) -> EvalResult:
    """``ν/(2^{M+N}π^{M+N/2}) G^{2(M+N),0}_{0,2(M+N)}(ν²z²/4^{M+N} | 0, 1/2)``.

    The zero vector has ``2M+N`` entries and the half vector ``N``.
    """
    za, scalar = _as_array(z)
    if np.any(za == 0):
        raise SingularityError("density evaluated at z = 0")
    k = spec.m_pairs + spec.n_laplace
    nu = spec.nu
    pref = nu / (2 ** k * math.pi ** (spec.m_pairs + spec.n_laplace / 2))
    r = eval_g_q0(MeijerGSpec.q0(spec._b()), nu ** 2 * za ** 2 / 4 ** k, tol / max(1.0, pref))
    return _pack(pref * np.atleast_1d(r.value), pref * np.atleast_1d(r.abs_err),
                 np.atleast_1d(r.converged), tol, scalar)


def mixed_product_cdf(spec: MixedNormalLaplaceSpec, z, tol: float = DEFAULT_TOL) -> EvalResult:
    """``1/2 + νz/(2^{M+N+1}π^{M+N/2}) G^{2(M+N),1}_{1,2(M+N)+1}(ν²z²/4^{M+N} | 1/2; 0, 1/2, -1/2)``.

    Beyond ``|F - 1/2| > 1/4`` the complementary kernel is used instead.
    """
    za, scalar = _as_array(z)
    k = spec.m_pairs + spec.n_laplace
    nu = spec.nu
    g = MeijerGSpec.cdf_kernel(0.5, spec._b())
    az = np.abs(za)
    pref = nu * az / (2 ** (k + 1) * math.pi ** (spec.m_pairs + spec.n_laplace / 2))
    arg = nu ** 2 * az ** 2 / 4 ** k
    r = eval_g_cdf_class(g, arg, tol)
    half = pref * np.atleast_1d(r.value)
    err = pref * np.atleast_1d(r.abs_err)
    ok = np.atleast_1d(r.converged).copy()
    far = np.flatnonzero(half > 0.25)
    if far.size:
        rc = eval_g_cdf_class(g, arg[far], tol, complement=True)
        half[far] = 0.5 - pref[far] * np.atleast_1d(rc.value)
        err[far] = pref[far] * np.atleast_1d(rc.abs_err)
        ok[far] = np.atleast_1d(rc.converged)
    vals = 0.5 + np.sign(za) * half
    return _pack(vals, err, ok, tol, scalar)


def mixed_product_cf(spec: MixedNormalLaplaceSpec, t, tol: float = DEFAULT_TOL) -> EvalResult:
    """``ν|t|^{-1}/(2^{M+N-1}π^{M+(N-1)/2}) G^{2(M+N)-1,1}_{1,2(M+N)-1}(ν²/(4^{M+N-1}t²) | 1/2; 0', 1/2)``."""
    ta, scalar = _as_array(t)
    k = spec.m_pairs + spec.n_laplace
    nu = spec.nu
    vals = np.ones(ta.size)
    errs = np.zeros(ta.size)
    ok = np.ones(ta.size, dtype=bool)
    nz = np.flatnonzero(ta != 0)
    if nz.size:
        at = np.abs(ta[nz])
        g = MeijerGSpec.cf_kernel(0.5, spec._b(zeros_less=1))
        r = eval_g_cf_class(g, nu ** 2 / (4 ** (k - 1) * at ** 2), tol)
        pref = nu / (2 ** (k - 1) * math.pi ** (spec.m_pairs + (spec.n_laplace - 1) / 2) * at)
        vals[nz] = pref * np.atleast_1d(r.value)
        errs[nz] = pref * np.atleast_1d(r.abs_err)
        ok[nz] = np.atleast_1d(r.converged)
    return _pack(vals, errs, ok, tol, scalar)


# ---------------------------------------------------------------------------
# correlated normal pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelatedNormalSpec:
    """Blocks ``(σ_{2i-1}, σ_{2i}, ρ_i)`` of a block-diagonal normal vector.

    Each block product is ``VG(0, α_i, ρ_i α_i)`` with
    ``α_i = 1/(σ_{2i-1}σ_{2i}(1-ρ_i²))``.
    """

    blocks: tuple

    def __post_init__(self):
        blocks = tuple((float(a), float(b), float(r)) for a, b, r in self.blocks)
        if not blocks:
            raise ValueError("at least one correlated block is required")
        for s1, s2, rho in blocks:
            if not (s1 > 0 and s2 > 0):
                raise ValueError("normal scales must satisfy σ > 0")
            if not -1 < rho < 1:
                raise ValueError("correlations must satisfy -1 < ρ < 1")
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def s(self) -> float:
        return float(np.prod([a * b for a, b, _ in self.blocks]))

    @property
    def tau(self) -> float:
        return float(np.prod([1 - r * r for _, _, r in self.blocks]))

    def to_product_spec(self) -> ProductSpec:
        fs = []
        for s1, s2, rho in self.blocks:
            a = 1.0 / (s1 * s2 * (1 - rho * rho))
            fs.append(VgParams(0.0, a, rho * a))
        return ProductSpec(tuple(fs))

    def sample(self, n: int, seed: int) -> SampleBatch:
        """Per-block 2x2 Cholesky factor applied to standard normals."""
        gens = spawn_generators(seed, self.n)
        out = np.ones(n)
        for (s1, s2, rho), g in zip(self.blocks, gens):
            chol = np.linalg.cholesky(np.array([[s1 * s1, rho * s1 * s2], [rho * s1 * s2, s2 * s2]]))
            x = chol @ g.standard_normal((2, n))
            out *= x[0] * x[1]
        return SampleBatch(out, int(seed), int(n), digest(self))


def correlated_normal_product_pdf(spec: CorrelatedNormalSpec, z, tol: float = DEFAULT_TOL,
                                  *, series: bool = True, max_degree: int = 400) -> EvalResult:
    """Density of the product of the ``2N`` correlated normals.

    ``1/(2^{2N-1}π^N s√τ) Σ_j Π (2ρ_i)^{j_i}/j_i! a_j(z)
    G^{2N,0}_{0,2N}(z²/(4^N s²τ²) | j/2, j/2)``, summed in shells of total
    degree until two consecutive shells fall below ``tol/10``.

    The shells decay roughly like ``max|ρ_i|^degree`` while the G-function
    values grow, so when some ``|ρ_i| > 0.8`` (or ``series=False``) the
    generic Mellin-Barnes evaluator of the equivalent VG product is used.
    """
    za, scalar = _as_array(z)
    if np.any(za == 0):
        raise SingularityError("density evaluated at z = 0")
    if not series or max(abs(r) for _, _, r in spec.blocks) > SERIES_MAX_RHO:
        return product_pdf(spec.to_product_spec(), z, tol, method="mellin")
    n = spec.n
    s, tau = spec.s, spec.tau
    pref = 1.0 / (2 ** (2 * n - 1) * math.pi ** n * s * math.sqrt(tau))
    rho = [r for _, _, r in spec.blocks]
    arg = za ** 2 / (4 ** n * s * s * tau * tau)
    sgn = np.where(za > 0, 1, -1)
    vals = np.zeros(za.size)
    errs = np.zeros(za.size)
    ok = np.ones(za.size, dtype=bool)
    quiet = 0
    for degree in range(max_degree + 1):
        shell = np.zeros(za.size)
        for j in _shell(n, degree):
            w = 1.0
            for r, jj in zip(rho, j):
                w *= _power_over_factorial(2 * r, jj)
            if w == 0.0:
                continue
            a_pos, a_neg = subset_coefficient(j, 1), subset_coefficient(j, -1)
            coef = np.where(sgn > 0, a_pos, a_neg) * w
            if not np.any(coef):
                continue
            b = tuple(v / 2 for v in j) * 2
            r_ = eval_g_q0(MeijerGSpec.q0(b), arg, tol / 10)
            shell += coef * np.atleast_1d(r_.value)
            errs += np.abs(coef) * np.atleast_1d(r_.abs_err)
            ok &= np.atleast_1d(r_.converged)
        vals += shell
        if degree >= 2 and np.all(np.abs(pref * shell) <= tol / 10 * np.maximum(1.0, np.abs(pref * vals))):
            quiet += 1
            if quiet >= 2:
                return _pack(pref * vals, pref * errs, ok, tol, scalar)
        elif degree >= 2:
            quiet = 0
    return _pack(pref * vals, pref * errs + np.inf, ok & False, tol, scalar)


def independent_normal_product_pdf(sigmas, z, tol: float = DEFAULT_TOL) -> EvalResult:
    """Density of a product of ``2N`` independent ``N(0, σ_i²)`` variables.

    ``1/((2π)^N s) G^{2N,0}_{0,2N}(z²/(4^N s²) | 0,…,0)``.
    """
    sig = [float(v) for v in sigmas]
    if len(sig) % 2 or not sig:
        raise ValueError("an even, nonzero number of normal factors is required")
    za, scalar = _as_array(z)
    if np.any(za == 0):
        raise SingularityError("density evaluated at z = 0")
    n = len(sig) // 2
    s = float(np.prod(sig))
    pref = 1.0 / ((2 * math.pi) ** n * s)
    r = eval_g_q0(MeijerGSpec.q0((0.0,) * (2 * n)), za ** 2 / (4 ** n * s * s), tol / max(1.0, pref))
    return _pack(pref * np.atleast_1d(r.value), pref * np.atleast_1d(r.abs_err),
                 np.atleast_1d(r.converged), tol, scalar)
