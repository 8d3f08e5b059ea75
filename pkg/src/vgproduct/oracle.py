"""Brute-force reference computations that share no G-function code.

Everything here is built from :func:`vgproduct.vg.vg_pdf`,
:func:`vgproduct.vg.vg_cf` and the gamma-mixture sampler, so agreement with
the Meijer-G formulas is evidence of correctness rather than of a shared bug.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .vg import SampleBatch, VgParams, _draw, digest, spawn_generators, vg_cf, vg_pdf

__all__ = [
    "OracleError",
    "convolution_pdf",
    "mc_product_sample",
    "ks_statistic",
    "ks_statistic_bound",
    "cf_fourier",
    "cf_conditional",
    "KsBound",
]

_EXP_CUT = 745.0  # exp(-745) underflows in double precision


class OracleError(RuntimeError):
    """Raised when a brute-force quadrature does not reach its tolerance."""


def _factors(spec) -> tuple[VgParams, ...]:
    return tuple(spec.factors)


# ---------------------------------------------------------------------------
# numeric convolution
# ---------------------------------------------------------------------------

def _decay_radius(fs: tuple[VgParams, ...]) -> float:
    """A ``y`` beyond which the density of ``Π fs`` is below ``e^{-745}``."""
    k = len(fs)
    lam = min(min(f.lambda_plus, f.lambda_minus) for f in fs)
    omega = lam ** k
    # density ~ exp(-k (ω y)^{1/k}); add slack for the algebraic prefactor
    return ((_EXP_CUT + 60.0) / k) ** k / omega


def _tail_radius(fs: tuple[VgParams, ...], eps: float) -> float:
    """A ``y`` beyond which each tail of ``Π fs`` holds less than ``eps`` mass."""
    k = len(fs)
    omega = min(min(f.lambda_plus, f.lambda_minus) for f in fs) ** k
    # tail ~ exp(-k (ω y)^{1/k}) times an algebraic factor; 10 nats of slack
    return ((math.log(1.0 / eps) + 10.0) / k) ** k / omega


def _log_ranges(fs: tuple[VgParams, ...], az: float) -> list[tuple[float, float]]:
    """Box in ``u_i = ln|x_i|`` (i < N) outside which the integrand is negligible."""
    out = []
    for i, f in enumerate(fs[:-1]):
        others = fs[:i] + fs[i + 1:]
        hi = math.log((_EXP_CUT + 60.0) / min(f.lambda_plus, f.lambda_minus))
        lo = math.log(az / _decay_radius(others))
        out.append((lo, hi))
    return out


def _trapezoid_product(fs: tuple[VgParams, ...], z: float, h: float) -> float:
    """Trapezoid sum of ``Σ_signs ∫ Π_{i<N} f_i(±e^{u_i}) f_N(z/Π(±e^{u_i})) du``."""
    ranges = _log_ranges(fs, abs(z))
    axes = []
    for lo, hi in ranges:
        n = max(2, int(math.ceil((hi - lo) / h)))
        axes.append(np.linspace(lo, hi, n + 1))
    steps = [ax[1] - ax[0] for ax in axes]
    grids = np.meshgrid(*axes, indexing="ij")
    logx = sum(grids)
    total = 0.0
    for signs in np.ndindex(*(2,) * (len(fs) - 1)):
        sg = [1.0 - 2.0 * s for s in signs]
        w = np.ones_like(logx)
        for f, g, s in zip(fs[:-1], grids, sg):
            w = w * vg_pdf(f, s * np.exp(g))
        prod_sign = float(np.prod(sg))
        last = vg_pdf(fs[-1], (z * prod_sign) * np.exp(-logx).ravel()).reshape(logx.shape)
        total += float(np.sum(w * last))
    return total * float(np.prod(steps))


def convolution_pdf(spec, z, tol: float = 1e-10, *, max_halvings: int = 5):
    """Density of ``Π X_i`` by direct numerical convolution of ``vg_pdf``.

    ``f_Z(z) = ∫ f_1(x) f_rest(z/x) dx/|x|``, nested once more for three
    factors, is evaluated as a trapezoid sum over ``u_i = ln|x_i|`` for every
    sign pattern.  In these coordinates the integrand is smooth and decays
    double-exponentially in every direction, so the trapezoid rule converges
    geometrically; the step is halved until successive sums agree.

    Parameters
    ----------
    spec : ProductSpec
        Two or three factors (the cost grows geometrically with ``N``).
    z : float or array_like
        Nonzero points.
    tol : float
        Relative change between successive step halvings at which to stop.
    max_halvings : int
        Step halvings allowed after the initial step of 1/4.
    """
    fs = _factors(spec)
    if not 1 <= len(fs) <= 3:
        raise ValueError("convolution_pdf supports N in {1, 2, 3}")
    za = np.asarray(z, dtype=float)
    scalar = za.ndim == 0
    za = np.atleast_1d(za)
    if np.any(za == 0):
        raise ValueError("convolution_pdf requires z ≠ 0")
    if len(fs) == 1:
        out = np.asarray(vg_pdf(fs[0], za), dtype=float)
        return float(out[0]) if scalar else out
    out = np.empty(za.size)
    for k, zv in enumerate(za):
        h = 0.25
        prev = _trapezoid_product(fs, float(zv), h)
        for _ in range(max_halvings):
            h *= 0.5
            cur = _trapezoid_product(fs, float(zv), h)
            if abs(cur - prev) <= tol * abs(cur):
                break
            prev = cur
        else:
            raise OracleError(f"convolution quadrature did not converge at z={zv}")
        out[k] = cur
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def mc_product_sample(spec, n: int, seed: int) -> SampleBatch:
    """Draw ``n`` products of independent factor samples.

    Factor ``i`` uses stream ``SeedSequence(seed).spawn(N)[i]``, so the batch
    is a pure function of ``(seed, spec)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    fs = _factors(spec)
    gens = spawn_generators(seed, len(fs))
    out = np.ones(n)
    for f, g in zip(fs, gens):
        out *= _draw(f, n, g)
    return SampleBatch(out, int(seed), int(n), digest(spec))


def ks_statistic(batch, cdf: Callable) -> float:
    """Kolmogorov-Smirnov distance ``sup |F_n - F|``.

    ``cdf`` must accept an array of sorted sample values.
    """
    x = np.sort(np.asarray(batch.values if hasattr(batch, "values") else batch, dtype=float))
    n = x.size
    if n < 10:
        raise ValueError("ks_statistic requires at least 10 samples")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n), 0.0))


@dataclass(frozen=True)
class KsBound:
    """Rigorous upper bound on the KS distance from a CDF known on a grid."""

    bound: float
    grid_size: int
    max_cell_mass: float


def ks_statistic_bound(batch, cdf: Callable, cells: int = 1000) -> KsBound:
    """Upper bound on the KS distance using ``cdf`` at ``cells + 1`` points only.

    The grid is formed by order statistics of the sample.  On a cell
    ``[g_k, g_{k+1})`` both ``F_n`` and ``F`` are nondecreasing, so
    ``F_n - F ≤ F_n(g_{k+1}^-) - F(g_k)`` and ``F - F_n ≤ F(g_{k+1}) - F_n(g_k)``.
    The bound exceeds the true statistic by at most the largest cell increment
    of ``F_n`` or ``F``.
    """
    x = np.sort(np.asarray(batch.values if hasattr(batch, "values") else batch, dtype=float))
    n = x.size
    if n < 10:
        raise ValueError("ks_statistic_bound requires at least 10 samples")
    pos = np.unique(np.linspace(0, n - 1, cells + 1).round().astype(int))
    g = x[pos]
    f = np.asarray(cdf(g), dtype=float)
    # F_n at g (right-continuous) and just below g
    fn = np.searchsorted(x, g, side="right") / n
    fn_left = np.searchsorted(x, g, side="left") / n
    b = max(
        float(np.max(fn_left[1:] - f[:-1])),        # inside cells, F_n above F
        float(np.max(f[1:] - fn[:-1])),             # inside cells, F above F_n
        float(fn_left[0]), float(f[0]),             # left of the grid
        float(1.0 - fn[-1]), float(1.0 - f[-1]),    # right of the grid
        float(np.max(np.abs(fn - f))),
        0.0,
    )
    cell = float(max(np.max(np.diff(f)), np.max(np.diff(fn))))
    return KsBound(b, int(g.size), cell)


# ---------------------------------------------------------------------------
# characteristic functions
# ---------------------------------------------------------------------------

_GT, _GW = leggauss(20)


def cf_fourier(spec, t, tol: float = 1e-8, *, pdf: str | Callable = "convolution",
               delta: float = 1e-20) -> complex:
    """``E[e^{itZ}] = ∫ e^{itz} f_Z(z) dz`` by panel quadrature.

    Each half line is split into logarithmic panels from ``delta`` to 1
    (resolving the origin singularity) and uniform panels of width
    ``min(1, π/|t|)`` beyond, up to a radius where the remaining tail mass is
    below ``tol/1000``.  The density comes from :func:`convolution_pdf`
    (``pdf="convolution"``), from ``product_pdf`` (``pdf="product"``) or from a
    user callable.
    """
    t = float(t)
    if t == 0.0:
        return 1.0 + 0.0j
    if callable(pdf):
        dens = pdf
    elif pdf == "convolution":
        dens = lambda z: convolution_pdf(spec, z, tol * 1e-2)
    elif pdf == "product":
        from .product import product_pdf

        dens = lambda z: np.atleast_1d(product_pdf(spec, z, tol * 1e-2).value)
    else:
        raise ValueError("pdf must be 'convolution', 'product' or a callable")
    fs = _factors(spec)
    radius = _tail_radius(fs, tol * 1e-3)
    logs = np.linspace(math.log(delta), 0.0, int(math.ceil(-math.log10(delta) * 2)) + 1)
    edges_small = np.exp(logs)
    width = min(1.0, math.pi / abs(t))
    edges_big = np.arange(1.0, radius + width, width)
    edges = np.concatenate([edges_small, edges_big[1:]])
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * _GT[None, :]
    wts = half[:, None] * _GW[None, :]
    zs = nodes.ravel()
    total = 0.0 + 0.0j
    for sgn in (1.0, -1.0):
        f = np.asarray(dens(sgn * zs), dtype=float)
        total += np.sum(wts.ravel() * f * np.exp(1j * t * sgn * zs))
    return complex(total)


def cf_conditional(spec, t, tol: float = 1e-12) -> complex:
    """``E[φ_{X_N}(t Π_{i<N} X_i)]`` for two factors, by adaptive quadrature.

    Uses only ``vg_pdf`` of the first factor and the closed-form ``vg_cf``
    of the second.
    """
    from scipy import integrate

    fs = _factors(spec)
    if len(fs) == 1:
        return complex(vg_cf(fs[0], t))
    if len(fs) != 2:
        raise ValueError("cf_conditional supports N in {1, 2}")
    f1, f2 = fs
    out = 0.0 + 0.0j
    for part in ("real", "imag"):
        g = (lambda x: getattr(vg_cf(f2, t * x), part) * vg_pdf(f1, x))
        v = 0.0
        for lo, hi in ((-np.inf, 0.0), (0.0, np.inf)):
            r, _ = integrate.quad(g, lo, hi, epsabs=tol, epsrel=tol, limit=400)
            v += r
        out += v if part == "real" else 1j * v
    return out
