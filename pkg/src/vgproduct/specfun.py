"""Scalar special functions used throughout the package.

The complex log-gamma, digamma/polygamma and the Gauss hypergeometric series
are implemented here directly; the modified Bessel function of the second
kind is delegated to :mod:`scipy.special`.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

__all__ = [
    "PoleError",
    "log_gamma",
    "gamma_sign_log",
    "digamma",
    "polygamma",
    "bessel_k",
    "log_bessel_k",
    "gauss_2f1",
    "EULER_GAMMA",
]

EULER_GAMMA = 0.57721566490153286060651209008240243

# B_{2k} / (2k (2k-1)), k = 1..12
_STIRLING = np.array([
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
    77683.0 / 5796.0,
    -236364091.0 / 1506960.0,
])

# Bernoulli numbers B_{2k}, k = 1..10
_BERNOULLI = np.array([
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
])

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)
_SHIFT = 16.0


class PoleError(ValueError):
    """Raised when a gamma-type function is evaluated at one of its poles."""


def _check_poles(z: np.ndarray) -> None:
    near = (np.abs(z.imag) <= 1e-14) & (z.real <= 1e-14)
    if np.any(near):
        zr = z.real[near]
        if np.any(np.abs(zr - np.round(zr)) <= 1e-14):
            raise PoleError("gamma pole: argument is a nonpositive integer")


def _stirling(z: np.ndarray) -> np.ndarray:
    # valid for |z| >= _SHIFT away from the negative axis
    w = 1.0 / z
    w2 = w * w
    acc = np.zeros_like(z)
    for c in _STIRLING[::-1]:
        acc = acc * w2 + c
    return (z - 0.5) * np.log(z) - z + _HALF_LOG_2PI + acc * w


def _log_gamma_right(z: np.ndarray) -> np.ndarray:
    # Re z >= 0.5: shift upward until |z| is large, then Stirling
    need = np.abs(z) < _SHIFT
    n = np.where(need, np.ceil(_SHIFT - z.real), 0.0).astype(int)
    n = np.maximum(n, 0)
    corr = np.zeros_like(z)
    if n.size and n.max() > 0:
        for k in range(int(n.max())):
            active = k < n
            corr = corr + np.where(active, np.log(np.where(active, z + k, 1.0)), 0.0)
    return _stirling(z + n) - corr


def _log_sin_pi_upper(z: np.ndarray) -> np.ndarray:
    # analytic branch of log sin(pi z) on Im z >= 0 with value 0 at z = 1/2
    e = np.exp(2j * np.pi * z)
    return -1j * np.pi * z + 0.5j * np.pi - math.log(2.0) + np.log1p(-e)


def log_gamma(z):
    """Complex log-gamma, the analytic continuation of ``ln Γ`` off the negative axis.

    The value agrees with the principal branch convention used by
    ``scipy.special.loggamma``: it is continuous in the plane cut along the
    negative real axis, so ``log_gamma(z + 1) = log_gamma(z) + log(z)``.

    Parameters
    ----------
    z : complex or array_like
        Argument; must avoid the poles ``0, -1, -2, ...``.

    Returns
    -------
    complex or ndarray
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    zz = np.atleast_1d(arr).astype(complex)
    _check_poles(zz)
    out = np.empty_like(zz)
    right = zz.real >= 0.5
    if np.any(right):
        out[right] = _log_gamma_right(zz[right])
    left = ~right
    if np.any(left):
        zl = zz[left]
        upper = zl.imag >= 0
        # work in the upper half plane, conjugate back
        zu = np.where(upper, zl, np.conj(zl))
        val = _LOG_PI - _log_sin_pi_upper(zu) - _log_gamma_right(1.0 - zu)
        out[left] = np.where(upper, val, np.conj(val))
    return out[0] if scalar else out


def gamma_sign_log(x: float) -> tuple[float, float]:
    """Return ``(sign, log|Γ(x)|)`` for real ``x`` off the poles."""
    if x <= 0 and abs(x - round(x)) <= 1e-14:
        raise PoleError("gamma pole: argument is a nonpositive integer")
    if x > 0:
        return 1.0, math.lgamma(x)
    # reflection with sin(πx) = ±sin(πr), r = x - round(x) exact, so the
    # result keeps full relative accuracy next to the poles
    r = x - round(x)
    lg = math.log(math.pi) - math.log(abs(math.sin(math.pi * r))) - math.lgamma(1.0 - x)
    # Γ(x) < 0 on (-1,0), (-3,-2), ...
    return (-1.0 if math.floor(x) % 2 else 1.0), lg


def digamma(x: float) -> float:
    """Digamma function ψ(x) for real ``x``.

    Uses the recurrence to move ``x`` above 10, the asymptotic series there and
    the reflection formula for negative arguments.

    Raises
    ------
    PoleError
        If ``x`` is a nonpositive integer.
    """
    x = float(x)
    if x <= 0 and abs(x - round(x)) <= 1e-14:
        raise PoleError("digamma pole: argument is a nonpositive integer")
    if x < 0.5:
        # cot has period 1; reduce first so that πx carries no rounding
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * (x - round(x)))
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    w2 = 1.0 / (x * x)
    tail = 0.0
    p = w2
    for k, b in enumerate(_BERNOULLI[:8], start=1):
        tail += b / (2 * k) * p
        p *= w2
    return acc + math.log(x) - 0.5 / x - tail


def _hurwitz_zeta(s: int, a: float) -> float:
    # ζ(s, a) for integer s >= 2 and real a off the poles
    acc = 0.0
    while a < 20.0:
        acc += a ** (-s)
        a += 1.0
    tail = a ** (1 - s) / (s - 1) + 0.5 * a ** (-s)
    # (s)_{2k-1} a^{-s-2k+1} B_{2k} / (2k)!
    poch = float(s)
    p = a ** (-s - 1)
    fact = 2.0
    for k in range(1, 9):
        tail += _BERNOULLI[k - 1] / fact * poch * p
        poch *= (s + 2 * k - 1) * (s + 2 * k)
        p /= a * a
        fact *= (2 * k + 1) * (2 * k + 2)
    return acc + tail


def polygamma(n: int, x: float) -> float:
    """Polygamma ψ^{(n)}(x) for integer ``n >= 0`` and real ``x``."""
    if n == 0:
        return digamma(x)
    x = float(x)
    if x <= 0 and abs(x - round(x)) <= 1e-14:
        raise PoleError("polygamma pole: argument is a nonpositive integer")
    sign = 1.0 if n % 2 else -1.0
    return sign * math.factorial(n) * _hurwitz_zeta(n + 1, x)


def bessel_k(nu, x):
    """Modified Bessel function of the second kind ``K_ν(x)`` for ``x > 0``.

    Raises
    ------
    ValueError
        If any ``x <= 0``.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("bessel_k requires x > 0")
    out = _sp.kv(np.abs(np.asarray(nu, dtype=float)), xa)
    return float(out) if np.ndim(out) == 0 else out


def log_bessel_k(nu, x):
    """``ln K_ν(x)`` computed without overflow/underflow for large ``x``."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("log_bessel_k requires x > 0")
    out = np.log(_sp.kve(np.abs(np.asarray(nu, dtype=float)), xa)) - xa
    return float(out) if np.ndim(out) == 0 else out


def _2f1_series(a: float, b: float, c: float, x: float) -> float:
    term = 1.0
    total = 1.0
    k = 0
    while True:
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
        total += term
        k += 1
        if abs(term) <= 1e-17 * abs(total) and k > 2:
            return total
        if term == 0.0:
            return total
        if k > 100000:
            raise RuntimeError("gauss_2f1 series failed to converge")


def gauss_2f1(a: float, b: float, c: float, x: float) -> float:
    """Gauss hypergeometric function ₂F₁(a, b; c; x) for real ``|x| < 1``.

    A plain power series is used; for ``x > 0.75`` with ``a + b - c > 0`` the
    Euler transformation ``(1-x)^{c-a-b} ₂F₁(c-a, c-b; c; x)`` is applied
    first so that the series terms stay bounded.

    Raises
    ------
    ValueError
        If ``c`` is a nonpositive integer or ``|x| >= 1``.
    """
    if c <= 0 and abs(c - round(c)) <= 1e-14:
        raise ValueError("gauss_2f1: c must not be a nonpositive integer")
    if not abs(x) < 1.0:
        raise ValueError("gauss_2f1: requires |x| < 1")
    if x == 0.0:
        return 1.0
    if x > 0.75 and a + b - c > 0:
        return (1.0 - x) ** (c - a - b) * _2f1_series(c - a, c - b, c, x)
    return _2f1_series(a, b, c, x)
