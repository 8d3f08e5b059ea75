"""Distribution of the product ``Z = X_1 ⋯ X_N`` of independent VG factors.

Notation used throughout:

* ``ξ = Π α_i``, ``η = 1/Π Γ(m_i+1/2)``, ``μ_N = Σ m_i / N``;
* a subset ``σ ⊆ {1..N}`` marks the factors taken negative; ``S_N^+`` holds
  the subsets of even size (``Z > 0``) and ``S_N^-`` those of odd size;
* ``ω_σ = Π_{k∈σ}(α_k+β_k) Π_{l∉σ}(α_l-β_l)`` governs the tail of each sign
  pattern, ``ω_± = min`` over ``S_N^±``.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize, special

from .meijer import (
    DEFAULT_TOL,
    EvalResult,
    MeijerGSpec,
    eval_g_cdf_class,
    eval_g_cf_class,
    eval_g_q0,
    mellin_barnes,
)
from .specfun import log_gamma
from .vg import SingularityError, VgParams, vg_prob_nonpositive

__all__ = [
    "ProductSpec",
    "SignedSubset",
    "SubsetWeight",
    "MAX_FACTORS",
    "subsets",
    "subset_coefficient",
    "subset_coefficient_enumerated",
    "product_pdf",
    "product_pdf_symmetric",
    "product_pdf_halfint",
    "product_pdf_mellin",
    "product_pdf_series",
    "product_cdf_symmetric",
    "product_cdf_numeric",
    "product_sf_numeric",
    "product_total_mass",
    "prob_nonpositive",
    "prob_nonpositive_equal",
    "prob_nonpositive_general",
    "product_cf_symmetric",
    "product_cf_halfint",
    "pdf_origin_asymptotic",
    "origin_mass_asymptotic",
    "tail_asymptotic_cdf",
    "tail_asymptotic_pdf",
    "tail_single_term",
    "TailForm",
    "compose_tails",
    "factor_tail_form",
    "quantile_asymptotic",
    "quantile_numeric",
]

MAX_FACTORS = 12
ORIGIN_DELTA = 1e-16


# ---------------------------------------------------------------------------
# specification types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SignedSubset:
    """Subset of factor indices taken negative, stored as a bit mask."""

    members: int
    n: int

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.members >> i & 1)

    @property
    def size(self) -> int:
        return bin(self.members).count("1")

    @property
    def parity(self) -> int:
        """0 for even size (``S_N^+``), 1 for odd size (``S_N^-``)."""
        return self.size % 2

    def __contains__(self, i: int) -> bool:
        return bool(self.members >> i & 1)


@dataclass(frozen=True)
class SubsetWeight:
    subset: SignedSubset
    omega: float


def subsets(n: int, parity: int | None = None) -> list[SignedSubset]:
    """All subsets of ``{0..n-1}``; restricted to even (0) or odd (1) size."""
    out = [SignedSubset(mask, n) for mask in range(1 << n)]
    if parity is None:
        return out
    return [s for s in out if s.parity == parity]


@dataclass(frozen=True)
class ProductSpec:
    """An ordered list of VG factors.

    Examples
    --------
    >>> spec = ProductSpec.of((0.5, 1.0, 0.0), (0.5, 1.0, 0.0))
    >>> spec.xi
    1.0
    """

    factors: tuple

    def __post_init__(self):
        fs = tuple(f if isinstance(f, VgParams) else VgParams(*f) for f in self.factors)
        if len(fs) < 1:
            raise ValueError("a product needs at least one factor (N >= 1)")
        if len(fs) > MAX_FACTORS:
            raise ValueError(f"at most {MAX_FACTORS} factors are supported (2^N sign patterns)")
        object.__setattr__(self, "factors", fs)

    @classmethod
    def of(cls, *triples) -> "ProductSpec":
        return cls(tuple(VgParams(*t) for t in triples))

    @classmethod
    def identical(cls, factor: VgParams, n: int) -> "ProductSpec":
        return cls((factor,) * n)

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def m(self) -> np.ndarray:
        return np.array([f.m for f in self.factors])

    @property
    def alpha(self) -> np.ndarray:
        return np.array([f.alpha for f in self.factors])

    @property
    def beta(self) -> np.ndarray:
        return np.array([f.beta for f in self.factors])

    @property
    def xi(self) -> float:
        return float(np.prod(self.alpha))

    @property
    def log_eta(self) -> float:
        return -sum(math.lgamma(f.m + 0.5) for f in self.factors)

    @property
    def eta(self) -> float:
        return math.exp(self.log_eta)

    @property
    def mu(self) -> float:
        return float(np.mean(self.m))

    @property
    def is_symmetric(self) -> bool:
        return all(f.beta == 0 for f in self.factors)

    @property
    def is_halfint(self) -> bool:
        return all(abs((f.m - 0.5) - round(f.m - 0.5)) <= 1e-12 and f.m >= 0.5 - 1e-12
                   for f in self.factors)

    def halfint_orders(self) -> tuple[int, ...]:
        if not self.is_halfint:
            raise ValueError("every shape must satisfy m - 1/2 ∈ {0, 1, 2, ...}")
        return tuple(int(round(f.m - 0.5)) for f in self.factors)

    def omega(self, sub: SignedSubset) -> float:
        return float(np.prod([f.lambda_plus if i in sub else f.lambda_minus
                              for i, f in enumerate(self.factors)]))

    def weights(self, parity: int) -> list[SubsetWeight]:
        return [SubsetWeight(s, self.omega(s)) for s in subsets(self.n, parity)]

    @property
    def omega_plus(self) -> float:
        return min(w.omega for w in self.weights(0))

    @property
    def omega_minus(self) -> float:
        return min(w.omega for w in self.weights(1))

    def mirrored(self) -> "ProductSpec":
        """Law of ``-Z`` obtained by flipping the sign of the first factor."""
        fs = list(self.factors)
        fs[0] = fs[0].mirrored()
        return ProductSpec(tuple(fs))

    def sorted_by_shape(self) -> "ProductSpec":
        return ProductSpec(tuple(sorted(self.factors, key=lambda f: f.m)))


# ---------------------------------------------------------------------------
# subset coefficient
# ---------------------------------------------------------------------------

def subset_coefficient(j: Sequence[int], sign_of_z: int) -> int:
    """Coefficient ``a_j(z) = Σ_{σ∈A(z)} Π_{k∈σ} (-1)^{j_k}`` in closed form.

    ``A(z)`` is ``S_N^+`` for ``z > 0`` and ``S_N^-`` for ``z < 0``.  Splitting
    ``Π(1 + x_k)`` by the parity of ``|σ|`` gives ``2^{N-1}`` times
    ``[all j even] ± [all j odd]``; mixed parities give 0.
    """
    n = len(j)
    if n == 0:
        raise ValueError("empty index")
    if sign_of_z not in (1, -1):
        raise ValueError("sign_of_z must be +1 or -1")
    even = all(v % 2 == 0 for v in j)
    odd = all(v % 2 == 1 for v in j)
    return (1 << (n - 1)) * (int(even) + sign_of_z * int(odd))


def subset_coefficient_enumerated(j: Sequence[int], sign_of_z: int) -> int:
    """Reference value of :func:`subset_coefficient` by explicit enumeration."""
    n = len(j)
    parity = 0 if sign_of_z > 0 else 1
    total = 0
    for s in subsets(n, parity):
        total += (-1) ** sum(j[k] for k in s.indices)
    return total


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _z_array(z):
    za = np.asarray(z, dtype=float)
    scalar = za.ndim == 0
    za = np.atleast_1d(za)
    if np.any(za == 0):
        raise SingularityError("density evaluated at z = 0; use pdf_origin_asymptotic")
    return za, scalar


def _finish(vals, errs, ok, tol, scalar):
    ok = ok & (errs <= tol * np.maximum(1.0, np.abs(vals)))
    if scalar:
        v = vals[0]
        return EvalResult(complex(v) if np.iscomplexobj(vals) else float(v), float(errs[0]), bool(ok[0]))
    return EvalResult(vals, errs, ok)


def _logsumexp(parts: Sequence[np.ndarray]) -> np.ndarray:
    arr = np.stack(parts)
    mx = np.max(arr.real, axis=0)
    mx = np.where(np.isfinite(mx), mx, 0.0)
    return mx + np.log(np.sum(np.exp(arr - mx), axis=0))


# ---------------------------------------------------------------------------
# density: symmetric and half-integer closed forms
# ---------------------------------------------------------------------------

def product_pdf_symmetric(spec: ProductSpec, z, tol: float = DEFAULT_TOL) -> EvalResult:
    """Density when every ``β_i = 0``: a single ``G^{2N,0}_{0,2N}``.

    ``ξη/(2^N π^{N/2}) · G^{2N,0}_{0,2N}(ξ²z²/4^N | -; 0,…,0, m_1,…,m_N)``.
    """
    if not spec.is_symmetric:
        raise ValueError("product_pdf_symmetric requires every β_i = 0")
    za, scalar = _z_array(z)
    n = spec.n
    g = MeijerGSpec.q0((0.0,) * n + tuple(spec.m))
    pref = spec.xi * spec.eta / (2 ** n * math.pi ** (n / 2))
    arg = spec.xi ** 2 * za ** 2 / 4 ** n
    r = eval_g_q0(g, arg, tol / pref if pref > 1 else tol)
    vals = pref * np.atleast_1d(r.value)
    errs = pref * np.atleast_1d(r.abs_err)
    return _finish(vals, errs, np.atleast_1d(r.converged), tol, scalar)


def _halfint_terms(spec: ProductSpec):
    """Log-constant and (j, coefficient) list shared by the half-integer forms."""
    orders = spec.halfint_orders()
    logc = 0.0
    for f, n in zip(spec.factors, orders):
        logc += ((2 * f.m + 1) * 0.5 * math.log(f.gamma2) - (f.m + 0.5) * math.log(2 * f.alpha)
                 - math.lgamma(n + 1))
    terms = []
    for j in itertools.product(*[range(n + 1) for n in orders]):
        c = 1.0
        for n, jj in zip(orders, j):
            c *= math.factorial(n + jj) / (math.factorial(n - jj) * math.factorial(jj))
        terms.append((j, c))
    return orders, logc, terms


def _halfint_sigma_weight(spec: ProductSpec, j, sub: SignedSubset) -> float:
    w = 1.0
    for i, f in enumerate(spec.factors):
        lam = f.lambda_plus if i in sub else f.lambda_minus
        w *= lam ** (j[i] + 0.5 - f.m) / (2 * f.alpha) ** j[i]
    return w


def product_pdf_halfint(spec: ProductSpec, z, tol: float = DEFAULT_TOL) -> EvalResult:
    """Density for shapes ``m_i = n_i + 1/2`` with integer ``n_i >= 0``.

    A finite sum over ``j_i ≤ n_i`` and ``σ ∈ A(z)`` of
    ``G^{N,0}_{0,N}(ω_σ|z| | n - j)`` terms.
    """
    za, scalar = _z_array(z)
    orders, logc, terms = _halfint_terms(spec)
    pref = math.exp(logc)
    vals = np.zeros(za.size)
    errs = np.zeros(za.size)
    ok = np.ones(za.size, dtype=bool)
    for sign, parity in ((1, 0), (-1, 1)):
        idx = np.flatnonzero(np.sign(za) == sign)
        if idx.size == 0:
            continue
        az = np.abs(za[idx])
        for sw in spec.weights(parity):
            for j, c in terms:
                b = tuple(n - jj for n, jj in zip(orders, j))
                coef = pref * c * _halfint_sigma_weight(spec, j, sw.subset)
                r = eval_g_q0(MeijerGSpec.q0(b), sw.omega * az, tol / max(1.0, coef))
                vals[idx] += coef * np.atleast_1d(r.value)
                errs[idx] += coef * np.atleast_1d(r.abs_err)
                ok[idx] &= np.atleast_1d(r.converged)
    return _finish(vals, errs, ok, tol, scalar)


# ---------------------------------------------------------------------------
# density: general skew via the factorised Mellin kernel
# ---------------------------------------------------------------------------

def _log_hyp2f1(a, b, c, w: float, chunk: int = 64, kmax: int = 20000):
    """``log ₂F₁(a, b; c; w)`` for complex parameter arrays and ``0 <= w < 1``.

    Terms are accumulated in log form so that very large partial sums (large
    ``|s|`` in the Mellin variable) neither overflow nor lose precision.
    """
    a = np.asarray(a, dtype=complex)
    shape = a.shape
    if w == 0:
        return np.zeros(shape, dtype=complex)
    lw = math.log(w)
    logt = np.zeros(shape, dtype=complex)
    blocks = [np.zeros((1,) + shape, dtype=complex)]
    peak = np.zeros(shape)
    k = 0
    while True:
        ks = np.arange(k, k + chunk).reshape((-1,) + (1,) * len(shape))
        lr = np.log(a + ks) + np.log(b + ks) - np.log(c + ks) - np.log(ks + 1.0) + lw
        cl = logt + np.cumsum(lr, axis=0)
        blocks.append(cl)
        logt = cl[-1]
        k += chunk
        # stop once the ratio is contracting and the last term is e^{-42} below the peak
        peak = np.maximum(peak, np.max(cl.real, axis=0))
        if np.all(lr[-1].real < -0.01) and np.all(logt.real < peak - 42):
            break
        if k >= kmax:
            raise RuntimeError("hypergeometric series did not converge")
    allt = np.concatenate(blocks, axis=0)
    mx = np.max(allt.real, axis=0)
    return mx + np.log(np.sum(np.exp(allt - mx), axis=0))


def _factor_log_mellin(f: VgParams, s):
    """``(log T⁺(s), log T⁻(s))`` for one factor.

    ``T^±(s) = Σ_j (±2β/α)^j/j! Γ(s+j/2) Γ(s+m+j/2)`` is, up to elementary
    factors, the Mellin transform of the positive (negative) part of the
    factor.  The side whose series has terms of one sign is summed as two
    hypergeometric series in ``β²/α²``; the other side uses the equivalent
    non-alternating form ``2^{2-4s-2m} √π Γ(2s+2m)Γ(2s)/Γ(2s+m+1/2)
    ₂F₁(2s+2m, 2s; 2s+m+1/2; (α-|β|)/(2α))``.
    """
    s = np.asarray(s, dtype=complex)
    m = f.m
    l0 = log_gamma(s) + log_gamma(s + m)
    if f.beta == 0:
        return l0, l0
    r = (f.beta / f.alpha) ** 2
    u = 2 * abs(f.beta) / f.alpha
    l1 = log_gamma(s + 0.5) + log_gamma(s + m + 0.5)
    e = _log_hyp2f1(s, s + m, np.full_like(s, 0.5), r)
    o = _log_hyp2f1(s + 0.5, s + m + 0.5, np.full_like(s, 1.5), r)
    same = _logsumexp([l0 + e, math.log(u) + l1 + o])
    w = (f.alpha - abs(f.beta)) / (2 * f.alpha)
    other = ((2 - 4 * s - 2 * m) * math.log(2) + 0.5 * math.log(math.pi)
             + log_gamma(2 * s + 2 * m) + log_gamma(2 * s) - log_gamma(2 * s + m + 0.5)
             + _log_hyp2f1(2 * s + 2 * m, 2 * s, 2 * s + m + 0.5, w))
    return (same, other) if f.beta > 0 else (other, same)


def _mellin_log_kernel(spec: ProductSpec, parity: int):
    subs = subsets(spec.n, parity)

    def logk(s):
        s = np.asarray(s, dtype=complex)
        parts = [_factor_log_mellin(f, s) for f in spec.factors]
        terms = [sum(parts[i][1 if i in sub else 0] for i in range(spec.n)) for sub in subs]
        return _logsumexp(terms)

    return logk


def _general_log_prefactor(spec: ProductSpec) -> float:
    n = spec.n
    out = spec.log_eta - (2 * n - 1) * math.log(2) - 0.5 * n * math.log(math.pi)
    for f in spec.factors:
        out += (2 * f.m + 1) * 0.5 * math.log(f.gamma2) - 2 * f.m * math.log(f.alpha)
    return out


def product_pdf_mellin(spec: ProductSpec, z, tol: float = DEFAULT_TOL) -> EvalResult:
    """General density from one Mellin-Barnes integral per sign.

    The N-fold series over ``j`` is summed inside the integrand: the sum over
    ``j`` with the subset coefficient factorises as
    ``Σ_{σ∈A(z)} Π_i T_i^{σ_i}(s)``, so
    ``f(z) = C (1/2πi)∫ Σ_σ Π_i T_i^{σ_i}(s) (ξ²z²/4^N)^{-s} ds``.
    """
    za, scalar = _z_array(z)
    n = spec.n
    pref = math.exp(_general_log_prefactor(spec))
    lo = max(0.0, -float(np.min(spec.m)))
    vals = np.zeros(za.size)
    errs = np.zeros(za.size)
    ok = np.ones(za.size, dtype=bool)
    for sign, parity in ((1, 0), (-1, 1)):
        idx = np.flatnonzero(np.sign(za) == sign)
        if idx.size == 0:
            continue
        arg = spec.xi ** 2 * za[idx] ** 2 / 4 ** n
        v, e, c = mellin_barnes(_mellin_log_kernel(spec, parity), lo, math.inf, arg)
        vals[idx] = pref * v.real
        errs[idx] = pref * e
        ok[idx] = c
    return _finish(vals, errs, ok, tol, scalar)


def _power_over_factorial(u: float, j: int) -> float:
    """``u^j / j!`` without overflowing the factorial."""
    if j == 0:
        return 1.0
    if u == 0:
        return 0.0
    mag = math.exp(j * math.log(abs(u)) - math.lgamma(j + 1))
    return -mag if (u < 0 and j % 2) else mag


def _shell(n: int, total: int):
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _shell(n - 1, total - first):
            yield (first,) + rest


def product_pdf_series(spec: ProductSpec, z, tol: float = DEFAULT_TOL, *, max_degree: int = 400) -> EvalResult:
    """The N-fold ``j``-series, summed shell by shell in total degree.

    Each term is ``Π_i (2β_i/α_i)^{j_i}/j_i! · a_j(z) ·
    G^{2N,0}_{0,2N}(ξ²z²/4^N | j/2, m + j/2)``.  Only all-even and all-odd
    ``j`` contribute.  Summation stops when two consecutive shells are below
    ``tol/10`` relative to the running total.  The number of terms grows like
    ``degree^{N-1}`` and the degree needed grows with ``|β_i|/α_i``, so this
    route serves as an independent check; :func:`product_pdf` uses the
    Mellin-Barnes form instead.
    """
    za, scalar = _z_array(z)
    n = spec.n
    pref = math.exp(_general_log_prefactor(spec))
    u = 2 * spec.beta / spec.alpha
    arg = spec.xi ** 2 * za ** 2 / 4 ** n
    sgn = np.where(za > 0, 1, -1)
    vals = np.zeros(za.size)
    errs = np.zeros(za.size)
    ok = np.ones(za.size, dtype=bool)
    quiet = 0
    for degree in range(max_degree + 1):
        shell = np.zeros(za.size)
        for j in _shell(n, degree):
            even = all(v % 2 == 0 for v in j)
            odd = all(v % 2 == 1 for v in j)
            if not (even or odd):
                continue
            w = 1.0
            for uu, jj in zip(u, j):
                w *= _power_over_factorial(uu, jj)
            if w == 0.0:
                continue
            a = np.array([subset_coefficient(j, int(s)) for s in (1, -1)], dtype=float)
            coef = np.where(sgn > 0, a[0], a[1]) * w
            if not np.any(coef):
                continue
            b = tuple(v / 2 for v in j) + tuple(mm + v / 2 for mm, v in zip(spec.m, j))
            r = eval_g_q0(MeijerGSpec.q0(b), arg, tol / 10)
            term = coef * np.atleast_1d(r.value)
            shell += term
            errs += np.abs(coef) * np.atleast_1d(r.abs_err)
            ok &= np.atleast_1d(r.converged)
        vals += shell
        if degree >= 2 and np.all(np.abs(pref * shell) <= tol / 10 * np.maximum(1.0, np.abs(pref * vals))):
            quiet += 1
            if quiet >= 2:
                return _finish(pref * vals, pref * errs, ok, tol, scalar)
        else:
            quiet = 0
    return _finish(pref * vals, pref * errs + np.inf, ok & False, tol, scalar)


def product_pdf(spec: ProductSpec, z, tol: float = DEFAULT_TOL, *, method: str = "auto") -> EvalResult:
    """Density of ``Z = Π X_i`` at ``z ≠ 0``.

    Parameters
    ----------
    method : {"auto", "symmetric", "halfint", "mellin", "series"}
        ``auto`` picks the symmetric single-G form when every ``β = 0``, the
        finite half-integer sum when every ``m_i - 1/2`` is a nonnegative
        integer, and the Mellin-Barnes form of the N-fold series otherwise.
    """
    if method == "auto":
        if spec.is_symmetric:
            method = "symmetric"
        elif spec.is_halfint:
            method = "halfint"
        else:
            method = "mellin"
    fn = {
        "symmetric": product_pdf_symmetric,
        "halfint": product_pdf_halfint,
        "mellin": product_pdf_mellin,
        "series": product_pdf_series,
    }[method]
    return fn(spec, z, tol)


# ---------------------------------------------------------------------------
# CDF: symmetric closed forms
# ---------------------------------------------------------------------------

def _cdf_symmetric_halfint(spec, az, tol, upper):
    orders = spec.halfint_orders()
    logc = sum((0.5 - f.m) * math.log(2) - math.lgamma(n + 1) for f, n in zip(spec.factors, orders))
    pref = 0.5 * math.exp(logc)
    direct = np.zeros(az.size)
    comp = np.zeros(az.size)
    err = np.zeros(az.size)
    ok = np.ones(az.size, dtype=bool)
    arg = spec.xi * az
    for j in itertools.product(*[range(n + 1) for n in orders]):
        c = 1.0
        for n, jj in zip(orders, j):
            c *= math.factorial(n + jj) / (math.factorial(n - jj) * math.factorial(jj) * 2 ** jj)
        b = tuple(f.m + 0.5 - jj for f, jj in zip(spec.factors, j))
        g = MeijerGSpec.cdf_kernel(1.0, b)
        if upper:
            r = eval_g_cdf_class(g, arg, tol, complement=True)
            comp += pref * c * np.atleast_1d(r.value)
        else:
            r = eval_g_cdf_class(g, arg, tol)
            direct += pref * c * np.atleast_1d(r.value)
        err += pref * c * np.atleast_1d(r.abs_err)
        ok &= np.atleast_1d(r.converged)
    # direct: F(|z|) - 1/2 ; complement: P(Z > |z|)
    return (comp if upper else direct), err, ok


def _cdf_symmetric_general(spec, az, tol, upper):
    n = spec.n
    g = MeijerGSpec.cdf_kernel(0.5, (0.0,) * n + tuple(spec.m))
    pref = spec.xi * spec.eta * az / (2 ** (n + 1) * math.pi ** (n / 2))
    arg = spec.xi ** 2 * az ** 2 / 4 ** n
    r = eval_g_cdf_class(g, arg, tol, complement=upper)
    return pref * np.atleast_1d(r.value), pref * np.atleast_1d(r.abs_err), np.atleast_1d(r.converged)


def _symmetric_tail_split(spec, za, tol, form):
    """Return (F - 1/2 for |z|, P(Z > |z|), err, ok) choosing the stable route."""
    az = np.abs(za)
    fn = _cdf_symmetric_halfint if form == "halfint" else _cdf_symmetric_general
    half = np.zeros(az.size)
    tail = np.zeros(az.size)
    err = np.zeros(az.size)
    ok = np.ones(az.size, dtype=bool)
    pos = np.flatnonzero(az > 0)
    tail[az == 0] = 0.5
    if pos.size:
        d, e, c = fn(spec, az[pos], tol, False)
        half[pos], err[pos], ok[pos] = d, e, c
        tail[pos] = 0.5 - d
        far = pos[d > 0.25]
        if far.size:
            t, e2, c2 = fn(spec, az[far], tol, True)
            tail[far] = t
            half[far] = 0.5 - t
            err[far] = e2
            ok[far] = c2
    return half, tail, err, ok


def product_cdf_symmetric(spec: ProductSpec, z, tol: float = DEFAULT_TOL, *,
                          form: str = "auto", upper: bool = False) -> EvalResult:
    """CDF for an all-symmetric product.

    ``F(z) = 1/2 + ξηz/(2^{N+1}π^{N/2}) G^{2N,1}_{1,2N+1}(ξ²z²/4^N | 1/2; 0,…,0, m, -1/2)``;
    for half-integer shapes the finite sum of ``G^{N,1}_{1,N+1}(ξ|z| | 1; m+1/2-j, 0)``
    terms is used (``form="auto"``).  In the tails the complementary kernel is
    evaluated directly so that small tail probabilities keep relative accuracy.

    Parameters
    ----------
    upper : bool
        Return ``P(Z > z)`` instead of ``P(Z <= z)``.
    """
    if not spec.is_symmetric:
        raise ValueError("product_cdf_symmetric requires every β_i = 0")
    if form == "auto":
        form = "halfint" if spec.is_halfint else "general"
    za = np.asarray(z, dtype=float)
    scalar = za.ndim == 0
    za = np.atleast_1d(za)
    half, tail, err, ok = _symmetric_tail_split(spec, za, tol, form)
    pos = za > 0
    cdf = np.where(pos, 0.5 + half, tail)
    sf = np.where(pos, tail, 0.5 + half)
    cdf[za == 0] = 0.5
    sf[za == 0] = 0.5
    out = sf if upper else cdf
    return _finish(out, err, ok, tol, scalar)


# ---------------------------------------------------------------------------
# CDF: numeric quadrature of the density
# ---------------------------------------------------------------------------

_GT, _GW = leggauss(20)
_LT, _LW = leggauss(12)
_STEP = math.log(10.0) / 4


def _side_pdf(spec, side, w, tol):
    r = product_pdf(spec, side * np.asarray(w, dtype=float), tol)
    return np.atleast_1d(r.value), np.atleast_1d(r.abs_err), np.atleast_1d(r.converged)


def _tail_cutoff(spec: ProductSpec, side: int) -> float:
    w = 1.0
    fn = "upper" if side > 0 else "lower"
    while True:
        t = tail_asymptotic_cdf(spec, side * w, fn)
        if t < 1e-22 and w > 1.0:
            return w
        w *= 2.0
        if w > 1e12:
            return w


def _origin_cutoff(spec: ProductSpec) -> float:
    # the origin asymptotic can converge like 1/ln|z|; keep the mass it covers tiny
    delta = ORIGIN_DELTA
    while origin_mass_asymptotic(spec, delta) > 1e-14 and delta > 1e-80:
        delta *= 1e-4
    return delta


@dataclass(frozen=True)
class _HalfLineTable:
    edges: np.ndarray          # log-coordinates of panel edges
    tail_from: np.ndarray      # mass beyond each edge (len = len(edges))
    err_from: np.ndarray
    origin: float              # asymptotic mass on (0, delta)
    origin_err: float
    ok: bool

    @property
    def mass(self) -> float:
        return float(self.tail_from[0] + self.origin)


@functools.lru_cache(maxsize=128)
def _half_line_table(spec: ProductSpec, side: int, tol: float) -> _HalfLineTable:
    delta = _origin_cutoff(spec)
    wmax = _tail_cutoff(spec, side)
    lo, hi = math.log(delta), math.log(wmax)
    k = int(math.ceil((hi - lo) / _STEP))
    edges = lo + _STEP * np.arange(k + 1)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    u_hi = mid[:, None] + half[:, None] * _GT[None, :]
    u_lo = mid[:, None] + half[:, None] * _LT[None, :]
    w_all = np.exp(np.concatenate([u_hi.ravel(), u_lo.ravel()]))
    f, fe, fok = _side_pdf(spec, side, w_all, tol * 1e-2)
    nh = u_hi.size
    g_hi = (f[:nh] * w_all[:nh]).reshape(u_hi.shape)
    g_lo = (f[nh:] * w_all[nh:]).reshape(u_lo.shape)
    e_hi = (fe[:nh] * w_all[:nh]).reshape(u_hi.shape)
    i_hi = half * (g_hi @ _GW)
    i_lo = half * (g_lo @ _LW)
    pm = half * (np.abs(g_hi) @ _GW)
    diff = np.abs(i_hi - i_lo)
    with np.errstate(divide="ignore", invalid="ignore"):
        est = np.where(pm > 0, pm * np.minimum(1.0, (200 * diff / pm) ** 1.5), 0.0)
    est += half * (e_hi @ _GW) + 50 * np.finfo(float).eps * pm
    far, far_err, far_ok = _deep_tail(spec, side, np.array([math.exp(edges[-1])]), tol)
    tail_from = np.concatenate([np.cumsum(i_hi[::-1])[::-1], [0.0]]) + far[0]
    err_from = np.concatenate([np.cumsum(est[::-1])[::-1], [0.0]]) + far_err[0]
    fok = np.append(fok, far_ok)
    origin = origin_mass_asymptotic(spec, delta)
    return _HalfLineTable(edges, tail_from, err_from, origin, 0.1 * origin, bool(np.all(fok)))


def _deep_tail(spec, side, w, tol):
    """``∫_w^∞`` beyond the table, marching log-panels until negligible."""
    u = np.log(w)
    acc = np.zeros(w.size)
    err = np.zeros(w.size)
    ok = np.ones(w.size, dtype=bool)
    active = np.ones(w.size, dtype=bool)
    for _ in range(400):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        a = u[idx]
        nodes = (a[:, None] + 0.5 * _STEP * (_GT[None, :] + 1.0)).ravel()
        ww = np.exp(nodes)
        f, fe, fok = _side_pdf(spec, side, ww, tol * 1e-2)
        g = (f * ww).reshape(idx.size, -1)
        ge = (fe * ww).reshape(idx.size, -1)
        piece = 0.5 * _STEP * (g @ _GW)
        acc[idx] += piece
        err[idx] += 0.5 * _STEP * (ge @ _GW)
        ok[idx] &= fok.reshape(idx.size, -1).all(axis=1)
        u[idx] += _STEP
        done = piece <= 1e-17 * acc[idx]
        active[idx[done]] = False
    ok &= ~active
    return acc, err + 1e-16 * acc, ok


def _half_line_sf(spec: ProductSpec, side: int, w, tol: float):
    """``∫_w^∞ f(side·v) dv`` for ``w > 0`` (vectorised)."""
    tab = _half_line_table(spec, side, tol)
    w = np.asarray(w, dtype=float)
    out = np.zeros(w.size)
    err = np.zeros(w.size)
    ok = np.full(w.size, tab.ok)
    u = np.log(w)
    lo, hi = tab.edges[0], tab.edges[-1]
    tiny = u <= lo
    if np.any(tiny):
        extra = tab.origin - np.array([origin_mass_asymptotic(spec, float(v)) for v in w[tiny]])
        out[tiny] = tab.tail_from[0] + extra
        err[tiny] = tab.err_from[0] + tab.origin_err
    mid = np.flatnonzero((u > lo) & (u < hi))
    if mid.size:
        k = np.minimum(((u[mid] - lo) / _STEP).astype(int), tab.edges.size - 2)
        a = u[mid]
        b = tab.edges[k + 1]
        half = 0.5 * (b - a)
        nodes = ((a + b)[:, None] * 0.5 + half[:, None] * _GT[None, :]).ravel()
        ww = np.exp(nodes)
        f, fe, fok = _side_pdf(spec, side, ww, tol * 1e-2)
        g = (f * ww).reshape(mid.size, -1)
        ge = (fe * ww).reshape(mid.size, -1)
        out[mid] = half * (g @ _GW) + tab.tail_from[k + 1]
        err[mid] = half * (ge @ _GW) + tab.err_from[k + 1]
        ok[mid] &= fok.reshape(mid.size, -1).all(axis=1)
    deep = np.flatnonzero(u >= hi)
    if deep.size:
        d, de, dok = _deep_tail(spec, side, w[deep], tol)
        out[deep], err[deep], ok[deep] = d, de, dok
    return out, err, ok


def _numeric_parts(spec, za, tol):
    neg = _half_line_table(spec, -1, tol)
    pos = _half_line_table(spec, 1, tol)
    m_neg, m_pos = neg.mass, pos.mass
    e_neg = neg.err_from[0] + neg.origin_err
    e_pos = pos.err_from[0] + pos.origin_err
    lower = np.zeros(za.size)   # P(Z <= z)
    upper = np.zeros(za.size)   # P(Z > z)
    err = np.zeros(za.size)
    ok = np.full(za.size, neg.ok and pos.ok)
    i_neg = np.flatnonzero(za < 0)
    i_pos = np.flatnonzero(za > 0)
    i_zero = np.flatnonzero(za == 0)
    if i_neg.size:
        s, e, c = _half_line_sf(spec, -1, -za[i_neg], tol)
        lower[i_neg] = s
        upper[i_neg] = (m_neg - s) + m_pos
        err[i_neg] = e
        ok[i_neg] &= c
    if i_pos.size:
        s, e, c = _half_line_sf(spec, 1, za[i_pos], tol)
        upper[i_pos] = s
        lower[i_pos] = m_neg + (m_pos - s)
        err[i_pos] = e
        ok[i_pos] &= c
    lower[i_zero] = m_neg
    upper[i_zero] = m_pos
    err[i_zero] = e_neg
    return lower, upper, err, ok


def product_cdf_numeric(spec: ProductSpec, z, tol: float = 1e-10) -> EvalResult:
    """``P(Z <= z)`` by quadrature of the density.

    Each half line is integrated in logarithmic coordinates on panels of a
    quarter decade, from ``δ = 10^{-16}`` (smaller when the origin mass below
    it exceeds ``10^{-14}``) up to the point where the tail asymptotics put
    the remaining mass is below ``10^{-22}``; beyond that, panels continue
    until they no longer change the tail integral.  The mass on ``(0, δ)``
    comes from the origin asymptotics.  Lower-tail values are integrated
    directly, so they keep relative accuracy.
    """
    za = np.asarray(z, dtype=float)
    scalar = za.ndim == 0
    za = np.atleast_1d(za)
    lower, _, err, ok = _numeric_parts(spec, za, tol)
    return _finish(lower, err, ok, tol, scalar)


def product_sf_numeric(spec: ProductSpec, z, tol: float = 1e-10) -> EvalResult:
    """``P(Z > z)`` by quadrature; upper-tail values keep relative accuracy."""
    za = np.asarray(z, dtype=float)
    scalar = za.ndim == 0
    za = np.atleast_1d(za)
    _, upper, err, ok = _numeric_parts(spec, za, tol)
    return _finish(upper, err, ok, tol, scalar)


def product_total_mass(spec: ProductSpec, tol: float = 1e-10) -> EvalResult:
    """``∫ f_Z`` over the real line from the same half-line tables as the CDF.

    A normalisation check: the value should be 1.
    """
    neg = _half_line_table(spec, -1, tol)
    pos = _half_line_table(spec, 1, tol)
    err = neg.err_from[0] + neg.origin_err + pos.err_from[0] + pos.origin_err
    return EvalResult(neg.mass + pos.mass, float(err), bool(neg.ok and pos.ok))


# ---------------------------------------------------------------------------
# sign probability
# ---------------------------------------------------------------------------

def prob_nonpositive(spec: ProductSpec) -> float:
    """``P(Z <= 0) = Σ_i P_i + Σ_{|σ|≥2} (-2)^{|σ|-1} Π_{k∈σ} P_k``.

    ``P_i = P(X_i <= 0)``.  When all factors are identical the shortcut
    ``1/2 - (1-2P)^N/2`` is used.
    """
    if all(f == spec.factors[0] for f in spec.factors):
        return prob_nonpositive_equal(vg_prob_nonpositive(spec.factors[0]), spec.n)
    probs = [vg_prob_nonpositive(f) for f in spec.factors]
    return prob_nonpositive_general(probs)


def prob_nonpositive_general(probs: Sequence[float]) -> float:
    """Subset-sum form over all nonempty subsets of factor probabilities."""
    n = len(probs)
    total = 0.0
    for sub in subsets(n):
        k = sub.size
        if k == 0:
            continue
        total += (-2.0) ** (k - 1) * float(np.prod([probs[i] for i in sub.indices]))
    return total


def prob_nonpositive_equal(p: float, n: int) -> float:
    """``1/2 - (1 - 2p)^n / 2`` for ``n`` identical factors."""
    return 0.5 - 0.5 * (1.0 - 2.0 * p) ** n


# ---------------------------------------------------------------------------
# characteristic functions
# ---------------------------------------------------------------------------

def product_cf_symmetric(spec: ProductSpec, t, tol: float = DEFAULT_TOL) -> EvalResult:
    """Characteristic function of an all-symmetric product (real, even in t).

    ``ξη/(2^{N-1}π^{(N-1)/2}) |t|^{-1} G^{2N-1,1}_{1,2N-1}(ξ²/(4^{N-1}t²) | 1/2; 0,…,0, m)``
    with ``N-1`` zeros; ``φ(0) = 1``.
    """
    if not spec.is_symmetric:
        raise ValueError("product_cf_symmetric requires every β_i = 0")
    ta = np.asarray(t, dtype=float)
    scalar = ta.ndim == 0
    ta = np.atleast_1d(ta)
    n = spec.n
    vals = np.ones(ta.size)
    errs = np.zeros(ta.size)
    ok = np.ones(ta.size, dtype=bool)
    nz = np.flatnonzero(ta != 0)
    if nz.size:
        g = MeijerGSpec.cf_kernel(0.5, (0.0,) * (n - 1) + tuple(spec.m))
        at = np.abs(ta[nz])
        arg = spec.xi ** 2 / (4 ** (n - 1) * at ** 2)
        pref = spec.xi * spec.eta / (2 ** (n - 1) * math.pi ** ((n - 1) / 2) * at)
        r = eval_g_cf_class(g, arg, tol)
        vals[nz] = pref * np.atleast_1d(r.value)
        errs[nz] = pref * np.atleast_1d(r.abs_err)
        ok[nz] = np.atleast_1d(r.converged)
    return _finish(vals, errs, ok, tol, scalar)


def product_cf_halfint(spec: ProductSpec, t, tol: float = DEFAULT_TOL) -> EvalResult:
    """Characteristic function for half-integer shapes and arbitrary skew.

    ``(i/t) C Σ_j c_j {Σ_{S^+} w_{σ,j} G^{N,1}_{1,N}(iω_σ/t | 0; n-j)
    - Σ_{S^-} w_{σ,j} G^{N,1}_{1,N}(-iω_σ/t | 0; n-j)}`` where ``C``, ``c_j``
    and ``w_{σ,j}`` are the constants of the half-integer density.
    """
    ta = np.asarray(t, dtype=float)
    scalar = ta.ndim == 0
    ta = np.atleast_1d(ta)
    orders, logc, terms = _halfint_terms(spec)
    pref = math.exp(logc)
    vals = np.ones(ta.size, dtype=complex)
    errs = np.zeros(ta.size)
    ok = np.ones(ta.size, dtype=bool)
    nz = np.flatnonzero(ta != 0)
    if nz.size:
        tt = ta[nz]
        acc = np.zeros(nz.size, dtype=complex)
        err = np.zeros(nz.size)
        for parity, sgn in ((0, 1.0), (1, -1.0)):
            for sw in spec.weights(parity):
                arg = sgn * 1j * sw.omega / tt
                for j, c in terms:
                    b = tuple(n - jj for n, jj in zip(orders, j))
                    coef = pref * c * _halfint_sigma_weight(spec, j, sw.subset)
                    r = eval_g_cf_class(MeijerGSpec.cf_kernel(0.0, b), arg, tol)
                    acc += sgn * coef * np.atleast_1d(r.value)
                    err += coef * np.atleast_1d(r.abs_err)
                    ok[nz] &= np.atleast_1d(r.converged)
        vals[nz] = 1j / tt * acc
        errs[nz] = err / np.abs(tt)
    return _finish(vals, errs, ok, tol, scalar)


# ---------------------------------------------------------------------------
# origin asymptotics
# ---------------------------------------------------------------------------

def _origin_form(spec: ProductSpec):
    """Return (case, log-constant, log-power k, z-exponent a, log-base factor).

    The density behaves like ``exp(logc) |z|^a (L·(-ln|z|))^k`` with ``L`` the
    log-base factor (1 or 2).
    """
    s = spec.sorted_by_shape()
    n = s.n
    ms = [f.m for f in s.factors]
    lg = sum((2 * f.m + 1) * 0.5 * math.log(f.gamma2) for f in s.factors) + s.log_eta
    if ms[0] >= 0:
        t = sum(1 for v in ms if abs(v) <= 1e-12)
        logc = ((t - 1) * math.log(2) + lg - math.lgamma(n + t) - 0.5 * n * math.log(math.pi)
                - sum(2 * f.m * math.log(f.alpha) for f in s.factors)
                + sum(math.lgamma(v) for v in ms[t:]))
        return "i", logc, n + t - 1, 0.0, 1.0
    m1 = ms[0]
    t = sum(1 for v in ms if abs(v - m1) <= 1e-12)
    logc = (lg + n * math.lgamma(-m1) - n * (1 + 2 * m1) * math.log(2) - 0.5 * n * math.log(math.pi)
            + sum((2 * m1 - 2 * f.m) * math.log(f.alpha) + math.lgamma(f.m - m1)
                  for f in s.factors[t:])
            - math.lgamma(t))
    return "ii", logc, t - 1, 2 * m1, 2.0


def pdf_origin_asymptotic(spec: ProductSpec, z) -> float:
    """Leading behaviour of the density as ``z → 0``.

    All ``m_i >= 0`` with ``t`` of them zero: a constant times
    ``(-ln|z|)^{N+t-1}``.  Smallest shape ``m_1 < 0`` of multiplicity ``t``: a
    constant times ``|z|^{2m_1} (-2 ln|z|)^{t-1}``.  Factors are sorted by
    shape internally.
    """
    za = np.asarray(z, dtype=float)
    if np.any((np.abs(za) >= 1) | (za == 0)):
        raise ValueError("origin asymptotics require 0 < |z| < 1")
    _, logc, k, a, base = _origin_form(spec)
    lz = np.log(np.abs(za))
    out = np.exp(logc + a * lz) * (-base * lz) ** k
    return float(out) if out.ndim == 0 else out


def origin_mass_asymptotic(spec: ProductSpec, delta: float) -> float:
    """``∫_0^δ`` of :func:`pdf_origin_asymptotic` (one side of the origin)."""
    _, logc, k, a, base = _origin_form(spec)
    big_l = -math.log(delta)
    # ∫_0^δ z^a (-base ln z)^k dz = base^k Γ(k+1, (a+1)L) / (a+1)^{k+1}
    p = a + 1.0
    val = special.gammaincc(k + 1, p * big_l) * math.gamma(k + 1) / p ** (k + 1)
    return math.exp(logc) * base ** k * val


# ---------------------------------------------------------------------------
# tail asymptotics
# ---------------------------------------------------------------------------

def _tail_common(spec: ProductSpec):
    n = spec.n
    logc = 0.5 * (n - 1) * math.log(2 * math.pi) + spec.log_eta - 0.5 * math.log(n)
    for f in spec.factors:
        logc += (2 * f.m + 1) * 0.5 * math.log(f.gamma2) - (f.m + 0.5) * math.log(2 * f.alpha)
    return logc


def _tail_terms(spec: ProductSpec, parity: int, lam_shift: float):
    mu = spec.mu
    out = []
    for sw in spec.weights(parity):
        lw = 0.0
        for i, f in enumerate(spec.factors):
            lam = f.lambda_plus if i in sw.subset else f.lambda_minus
            lw += (mu - f.m + lam_shift) * math.log(lam)
        out.append((sw.omega, lw))
    return out


def _side_parity(side: str) -> int:
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    return 0 if side == "upper" else 1


def tail_asymptotic_cdf(spec: ProductSpec, z, side: str = "upper"):
    """Tail probability ``P(Z > z)`` (upper) or ``P(Z <= z)`` (lower) for large ``|z|``.

    ``(2π)^{(N-1)/2} η/√N Π γ^{2m+1}/(2α)^{m+1/2} |z|^{μ-1/(2N)}
    Σ_σ Π λ^{μ-m-(N+1)/(2N)} exp(-N ω_σ^{1/N} |z|^{1/N})`` over ``S_N^+`` or
    ``S_N^-``.  A reasonable regime is ``(ω|z|)^{1/N} > 10``.
    """
    return _tail_eval(spec, z, side, pdf=False)


def tail_asymptotic_pdf(spec: ProductSpec, z, side: str = "upper"):
    """Density counterpart of :func:`tail_asymptotic_cdf` (exponent ``μ+1/(2N)-1``)."""
    return _tail_eval(spec, z, side, pdf=True)


def _tail_eval(spec, z, side, pdf):
    parity = _side_parity(side)
    n = spec.n
    az = np.abs(np.asarray(z, dtype=float))
    if spec.is_symmetric:
        return _tail_symmetric(spec, az, pdf)
    shift = (1 - n) / (2 * n) if pdf else -(n + 1) / (2 * n)
    zpow = spec.mu + 1 / (2 * n) - 1 if pdf else spec.mu - 1 / (2 * n)
    logc = _tail_common(spec)
    lz = np.log(az)
    total = np.zeros_like(az)
    for omega, lw in _tail_terms(spec, parity, shift):
        total = total + np.exp(logc + lw + zpow * lz - n * omega ** (1 / n) * az ** (1 / n))
    return float(total) if total.ndim == 0 else total


def _tail_symmetric(spec, az, pdf):
    # all ω_σ equal ξ: a single exponential term
    n, mu, xi = spec.n, spec.mu, spec.xi
    lc = 0.5 * (n - 1) * math.log(math.pi) + spec.log_eta - (n * (mu - 1) + 1.5) * math.log(2) - 0.5 * math.log(n)
    y = xi * az
    if pdf:
        out = np.exp(lc + math.log(xi) + (mu + 1 / (2 * n) - 1) * np.log(y) - n * y ** (1 / n))
    else:
        out = np.exp(lc + (mu - 1 / (2 * n)) * np.log(y) - n * y ** (1 / n))
    return float(out) if np.ndim(out) == 0 else out


def tail_single_term(spec: ProductSpec, z, side: str = "upper", *, pdf: bool = False):
    """Tail form keeping only the sign pattern with the smallest ``ω_σ``.

    Raises
    ------
    ValueError
        If several patterns attain the minimum (the full sum must be used).
    """
    parity = _side_parity(side)
    n = spec.n
    terms = _tail_terms(spec, parity, (1 - n) / (2 * n) if pdf else -(n + 1) / (2 * n))
    omegas = np.array([t[0] for t in terms])
    best = omegas.min()
    if np.sum(np.abs(omegas - best) <= 1e-12 * best) > 1:
        raise ValueError("several sign patterns attain the minimal ω; the single-term form does not apply")
    omega, lw = terms[int(np.argmin(omegas))]
    az = np.abs(np.asarray(z, dtype=float))
    zpow = spec.mu + 1 / (2 * n) - 1 if pdf else spec.mu - 1 / (2 * n)
    out = np.exp(_tail_common(spec) + lw + zpow * np.log(az) - n * omega ** (1 / n) * az ** (1 / n))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TailForm:
    """Tail ``P(X > x) ~ A x^r exp(-b x^a)`` of a positive variable."""

    A: float
    r: float
    b: float
    a: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.A * x ** self.r * np.exp(-self.b * x ** self.a)


def compose_tails(t1: TailForm, t2: TailForm) -> TailForm:
    """Tail of the product of two independent positive variables.

    If ``P(X_i > x) ~ A_i x^{r_i} exp(-b_i x^{a_i})`` then ``P(X_1 X_2 > x)``
    has the same form with ``a = a_1 a_2/(a_1+a_2)`` and the constants below.
    """
    a1, a2 = t1.a, t2.a
    b1, b2 = t1.b, t2.b
    r1, r2 = t1.r, t2.r
    c = a1 + a2
    a = a1 * a2 / c
    b = b1 ** (a2 / c) * b2 ** (a1 / c) * ((a1 / a2) ** (a2 / c) + (a2 / a1) ** (a1 / c))
    r = (a1 * a2 + 2 * a1 * r2 + 2 * a2 * r1) / (2 * c)
    big_a = (math.sqrt(2 * math.pi) * t1.A * t2.A / math.sqrt(c)
             * (a1 * b1) ** ((a2 - 2 * r1 + 2 * r2) / (2 * c))
             * (a2 * b2) ** ((a1 - 2 * r2 + 2 * r1) / (2 * c)))
    return TailForm(big_a, r, b, a)


def factor_tail_form(f: VgParams, side: str = "upper") -> TailForm:
    """Tail of ``X⁺`` (upper) or ``X⁻`` (lower) for a single VG factor."""
    lam = f.lambda_minus if side == "upper" else f.lambda_plus
    big_a = math.exp((2 * f.m + 1) * 0.5 * math.log(f.gamma2) - (f.m + 0.5) * math.log(2 * f.alpha)
                     - math.lgamma(f.m + 0.5)) / lam
    return TailForm(big_a, f.m - 0.5, lam, 1.0)


# ---------------------------------------------------------------------------
# quantiles
# ---------------------------------------------------------------------------

def quantile_asymptotic(spec: ProductSpec, p: float) -> float:
    """Extreme quantiles: ``(-ln(1-p))^N/(N^N ω_+)`` above the median side,
    ``-(-ln p)^N/(N^N ω_-)`` below.  Intended for ``p > 0.99`` or ``p < 0.01``.
    """
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    n = spec.n
    if p >= 0.5:
        return (-math.log1p(-p)) ** n / (n ** n * spec.omega_plus)
    return -((-math.log(p)) ** n) / (n ** n * spec.omega_minus)


def quantile_numeric(spec: ProductSpec, p: float, tol: float = 1e-10) -> float:
    """Root of ``P(Z <= z) = p`` by bracketing and Brent's method.

    The bracket starts from :func:`quantile_asymptotic` and expands by a
    factor of two until the sign changes.  Upper quantiles are solved on the
    survival function so that ``1 - p`` keeps relative accuracy.
    """
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    neg = _half_line_table(spec, -1, tol)
    pos = _half_line_table(spec, 1, tol)
    p0 = neg.mass
    if abs(p - p0) <= tol:
        return 0.0
    if p > p0:
        # the exact total mass is 1; table masses carry quadrature error that
        # would dominate 1 - p far out in the tail
        side, target = 1, 1.0 - p
    else:
        side, target = -1, p

    def g(logw):
        s, _, _ = _half_line_sf(spec, side, np.array([math.exp(logw)]), tol)
        return math.log(s[0]) - math.log(target)

    guess = abs(quantile_asymptotic(spec, min(max(p, 1e-300), 1 - 1e-16)))
    guess = guess if guess > 0 and math.isfinite(guess) else 1.0
    lo = hi = math.log(guess)
    glo = ghi = g(lo)
    step = math.log(2.0)
    for _ in range(200):
        if glo > 0:
            break
        lo -= step
        glo = g(lo)
    for _ in range(200):
        if ghi < 0:
            break
        hi += step
        ghi = g(hi)
    if not (glo > 0 > ghi):
        raise RuntimeError("quantile bracket could not be established")
    root = optimize.brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    return side * math.exp(root)
