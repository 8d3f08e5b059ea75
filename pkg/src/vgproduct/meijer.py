"""Numerical evaluation of Meijer G-functions.

The G-function is evaluated from its Mellin-Barnes representation

    G(x) = (1/2πi) ∫_{c-i∞}^{c+i∞} K(s) x^{-s} ds,
    K(s) = Π_{j<m} Γ(b_j+s) Π_{j<n} Γ(1-a_j-s)
           / (Π_{j≥n} Γ(a_j+s) Π_{j≥m} Γ(1-b_j-s)),

with the vertical line placed inside the strip that separates the two pole
families.  Within that strip the abscissa ``c`` is chosen to minimise
``|K(c)| x^{-c}`` (a saddle-point choice), which keeps the quadrature
accurate in a relative sense far into the tails.  Panels next to a nearby
pole are graded geometrically.

A residue series is provided for the ``G^{q,0}_{0,q}`` class; it is the
preferred route for small arguments and serves as an independent check.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .specfun import EULER_GAMMA, PoleError, _hurwitz_zeta, log_gamma, polygamma

__all__ = [
    "MeijerGSpec",
    "EvalResult",
    "ContourError",
    "eval_g_q0",
    "eval_g_cdf_class",
    "eval_g_cf_class",
    "evaluate",
    "residue_series_q0",
    "shift_argument",
    "invert_argument",
    "g_asymptotic",
    "asymptotic_theta",
    "mellin_barnes",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-10

_N_HI, _N_LO = 20, 12
_T_HI, _W_HI = leggauss(_N_HI)
_T_LO, _W_LO = leggauss(_N_LO)
_T_ALL = np.concatenate([_T_HI, _T_LO])

_TRUNC = 1e-18          # panel mass relative to accumulated mass that ends the march
_MAX_PANELS = 3000
_GROUP_LOSS = 1.5       # e-folds of amplification allowed when sharing a contour


class ContourError(ValueError):
    """Raised when no admissible integration line separates the pole families."""


@dataclass(frozen=True)
class MeijerGSpec:
    """Parameters ``(m, n, p, q, a, b)`` of a Meijer G-function ``G^{m,n}_{p,q}``."""

    m: int
    n: int
    p: int
    q: int
    a: tuple = ()
    b: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if len(self.a) != self.p or len(self.b) != self.q:
            raise ValueError("MeijerGSpec: len(a) must equal p and len(b) must equal q")
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise ValueError("MeijerGSpec: require 0 <= m <= q and 0 <= n <= p")

    @classmethod
    def q0(cls, b) -> "MeijerGSpec":
        """``G^{q,0}_{0,q}(x | -; b)``."""
        b = tuple(b)
        return cls(len(b), 0, 0, len(b), (), b)

    @classmethod
    def cdf_kernel(cls, a1: float, b) -> "MeijerGSpec":
        """``G^{q-1,1}_{1,q}(x | a1; b, a1-1)``, the CDF kernel class."""
        b = tuple(b) + (a1 - 1.0,)
        return cls(len(b) - 1, 1, 1, len(b), (a1,), b)

    @classmethod
    def cf_kernel(cls, a1: float, b) -> "MeijerGSpec":
        """``G^{q,1}_{1,q}(x | a1; b)``, the characteristic-function kernel class."""
        b = tuple(b)
        return cls(len(b), 1, 1, len(b), (a1,), b)

    @property
    def kind(self) -> str | None:
        if self.p == 0 and self.n == 0 and self.m == self.q and self.q >= 1:
            return "q0"
        if self.p == 1 and self.n == 1 and self.m == self.q - 1 and self.q >= 2:
            if abs(self.b[-1] - (self.a[0] - 1.0)) <= 1e-12:
                return "cdf"
            return None
        if self.p == 1 and self.n == 1 and self.m == self.q and self.q >= 1:
            return "cf"
        return None

    @property
    def delta(self) -> float:
        return self.m + self.n - 0.5 * (self.p + self.q)

    def strip(self) -> tuple[float, float]:
        lo = max((-bj for bj in self.b[: self.m]), default=-math.inf)
        hi = min((1.0 - aj for aj in self.a[: self.n]), default=math.inf)
        return lo, hi

    def log_kernel(self) -> Callable[[np.ndarray], np.ndarray]:
        num_b = np.array(self.b[: self.m])
        num_a = np.array(self.a[: self.n])
        den_a = np.array(self.a[self.n:])
        den_b = np.array(self.b[self.m:])

        def logk(s):
            s = np.asarray(s, dtype=complex)
            out = np.zeros_like(s)
            for v in num_b:
                out += log_gamma(v + s)
            for v in num_a:
                out += log_gamma(1.0 - v - s)
            for v in den_a:
                out -= log_gamma(v + s)
            for v in den_b:
                out -= log_gamma(1.0 - v - s)
            return out

        return logk


@dataclass(frozen=True)
class EvalResult:
    """A computed value with an a-posteriori absolute error estimate.

    For array input ``value`` and ``abs_err`` are arrays and ``converged`` is a
    boolean array.
    """

    value: object
    abs_err: object
    converged: object

    @property
    def ok(self) -> bool:
        return bool(np.all(self.converged))

    def __float__(self):
        return float(np.real(self.value))


def _threshold(value, tol):
    return tol * np.maximum(1.0, np.abs(value))


def _pack(value, err, ok, scalar):
    if scalar:
        v = value[0]
        v = complex(v) if np.iscomplexobj(value) else float(v)
        return EvalResult(v, float(err[0]), bool(ok[0]))
    return EvalResult(value, err, ok)


# ---------------------------------------------------------------------------
# contour selection
# ---------------------------------------------------------------------------

def _candidate_abscissae(lo: float, hi: float) -> np.ndarray:
    geo = 10.0 ** np.linspace(-5, 0, 31)
    if math.isfinite(lo) and math.isfinite(hi):
        w = hi - lo
        if w <= 1e-6:
            raise ContourError("pole families touch: no line separates them")
        d = geo[geo < 0.5 * w]
        mid = np.linspace(lo, hi, 41)[1:-1]
        pts = np.concatenate([lo + d, hi - d, mid])
    elif math.isfinite(lo):
        far = np.concatenate([np.arange(1.25, 50, 0.25), np.arange(50, 800, 2.0)])
        pts = lo + np.concatenate([geo, far])
    elif math.isfinite(hi):
        far = np.concatenate([np.arange(1.25, 50, 0.25), np.arange(50, 800, 2.0)])
        pts = hi - np.concatenate([geo, far])
    else:
        pts = np.concatenate([-np.arange(0, 400, 0.5)[::-1], np.arange(0.5, 400, 0.5)])
    return np.unique(pts)


def _group_contours(logk, lo, hi, lnx):
    """Assign each argument an abscissa; returns list of (c, indices)."""
    cs = _candidate_abscissae(lo, hi)
    with np.errstate(all="ignore"):
        lk = np.real(logk(cs + 1e-9j))
    lk = np.where(np.isfinite(lk), lk, np.inf)
    phi = lk[:, None] - cs[:, None] * lnx[None, :]
    best = np.min(phi, axis=0)
    loss = phi - best[None, :]
    order = np.argsort(np.argmin(phi, axis=0), kind="stable")
    groups = []
    current: list[int] = []
    feas = None
    for idx in order:
        ok = loss[:, idx] <= _GROUP_LOSS
        trial = ok if feas is None else (feas & ok)
        if feas is not None and not trial.any():
            groups.append((current, feas))
            current, trial = [], ok
        current.append(int(idx))
        feas = trial
    if current:
        groups.append((current, feas))
    out = []
    for members, fmask in groups:
        worst = np.max(loss[:, members], axis=1)
        worst = np.where(fmask, worst, np.inf)
        k = int(np.argmin(worst))
        out.append((float(cs[k]), np.array(members)))
    return out


# ---------------------------------------------------------------------------
# line quadrature
# ---------------------------------------------------------------------------

def _frequency(logk, s, lnx):
    h = 1e-6 * max(1.0, abs(s))
    with np.errstate(all="ignore"):
        dk = (logk(np.array([s + h, s - h])) @ np.array([1.0, -1.0])) / (2 * h)
    w = np.max(np.abs(np.real(dk) - lnx))
    return float(w) if np.isfinite(w) else 50.0


def _march(logk, logx, c, sign, d_pole):
    """Integrate F(y) = K(c+iy) x^{-(c+iy)} over y in [0, ∞) (sign=+1) or (-∞, 0]."""
    X = logx.size
    lnx = logx.real
    acc = np.zeros(X, dtype=complex)
    acc_lo = np.zeros(X, dtype=complex)
    mass = np.zeros(X)
    resid = np.zeros(X)
    y = 0.0
    quiet = 0
    last = np.zeros(X)
    for _ in range(_MAX_PANELS):
        h_geo = max(d_pole, y) if d_pole < 1.0 else math.inf
        if y < 2.0 or _ % 4 == 0:
            omega = _frequency(logk, c + 1j * sign * (y + 1e-3), lnx)
        h = min(1.0, 8.0 / max(omega, 1e-12), h_geo)
        ys = y + 0.5 * h * (_T_ALL + 1.0)
        s = c + 1j * sign * ys
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            ex = logk(s)[:, None] - s[:, None] * logx[None, :]
            f = np.exp(ex)
        f = np.where(np.isfinite(f), f, 0.0)
        q_hi = (0.5 * h * _W_HI) @ f[:_N_HI]
        q_lo = (0.5 * h * _W_LO) @ f[_N_HI:]
        pm = (0.5 * h * _W_HI) @ np.abs(f[:_N_HI])
        acc += q_hi
        acc_lo += q_lo
        mass += pm
        diff = np.abs(q_hi - q_lo)
        # quadpack-style sharpening of the raw Gauss/Gauss difference
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(pm > 0, np.minimum(1.0, (200.0 * diff / pm) ** 1.5), 0.0)
        resid += pm * ratio + 50 * np.finfo(float).eps * pm
        y += h
        small = pm <= _TRUNC * mass
        decreasing = pm <= last
        last = pm
        if y > 2.0 and np.all(small & decreasing):
            quiet += 1
            if quiet >= 2:
                return acc, resid + 2 * pm, True
        else:
            quiet = 0
    return acc, resid + mass, False


def mellin_barnes(logk, lo: float, hi: float, x, *, full_line: bool | None = None,
                  contour: float | None = None):
    """Evaluate ``(1/2πi)∫ K(s) x^{-s} ds`` on a vertical line inside ``(lo, hi)``.

    Parameters
    ----------
    logk : callable
        Vectorised ``log K(s)`` for complex ``s``.
    lo, hi : float
        Boundaries of the admissible strip (may be infinite).
    x : array_like
        Arguments; real positive, or complex with ``|arg x| <= π/2``.
    full_line : bool, optional
        Integrate both half-lines.  Defaults to ``True`` for complex ``x``;
        for real ``x`` and a kernel that is real on the real axis only the
        upper half-line is needed.
    contour : float, optional
        Force the abscissa instead of choosing it per argument.

    Returns
    -------
    value, abs_err, converged : ndarray
    """
    xa = np.atleast_1d(np.asarray(x))
    cplx = np.iscomplexobj(xa) and np.any(np.asarray(xa).imag != 0)
    if full_line is None:
        full_line = bool(cplx)
    logx = np.log(xa.astype(complex))
    if np.any(np.abs(logx.imag) > 0.5 * np.pi + 1e-12):
        raise ValueError("argument outside |arg x| <= pi/2")
    lnx = logx.real
    if contour is None:
        groups = _group_contours(logk, lo, hi, lnx)
    else:
        if not (lo < contour < hi):
            raise ContourError("requested abscissa is outside the strip")
        groups = [(float(contour), np.arange(xa.size))]
    vals = np.zeros(xa.size, dtype=complex)
    errs = np.zeros(xa.size)
    ok = np.ones(xa.size, dtype=bool)
    for c, idx in groups:
        d_pole = min(c - lo, hi - c)
        lx = logx[idx]
        if full_line:
            up, eu, cu = _march(logk, lx, c, +1, d_pole)
            dn, ed, cd = _march(logk, lx, c, -1, d_pole)
            vals[idx] = (up + dn) / (2 * np.pi)
            errs[idx] = (eu + ed) / (2 * np.pi)
            ok[idx] = cu and cd
        else:
            up, eu, cu = _march(logk, lx, c, +1, d_pole)
            vals[idx] = up.real / np.pi
            errs[idx] = eu / np.pi
            ok[idx] = cu
    return vals, errs, ok


# ---------------------------------------------------------------------------
# residue series for G^{q,0}_{0,q}
# ---------------------------------------------------------------------------

def _classes(b):
    """Group parameters whose differences are integers (within 1e-9)."""
    out: list[tuple[float, list[int]]] = []
    for v in sorted(b):
        for base, offs in out:
            d = v - base
            if abs(d - round(d)) <= 1e-9:
                offs.append(int(round(d)))
                break
        else:
            out.append((v, [0]))
    return out


def _exp_series(c, order):
    # coefficients of exp(sum_{k>=1} c[k] e^k) up to e^order
    e = [1.0] + [0.0] * order
    for k in range(1, order + 1):
        e[k] = sum(i * c[i] * e[k - i] for i in range(1, k + 1)) / k
    return e


def _gamma_at_offset(v: float, base: float, k: int):
    """``(arg, sign, log|Γ(arg)|)`` for ``arg = v - base - k``.

    Close to a pole the distance ``arg - round(arg)`` is rebuilt from the
    exact rounding error of ``v - base`` (TwoSum), so ``Γ`` keeps full
    relative accuracy even when ``arg`` itself cannot be stored that precisely.
    """
    d = v - base
    bv = d - v
    err = (v - (d - bv)) + (-base - bv)
    hi = d - k
    arg = hi + err
    if arg > 0.5:
        return arg, 1.0, math.lgamma(arg)
    n = round(hi)
    # d - (n + k) is exact: n + k is the integer nearest to d
    r = (d - (n + k)) + err
    if r == 0.0:
        raise PoleError("gamma pole: argument is a nonpositive integer")
    lg = math.log(math.pi) - math.log(abs(math.sin(math.pi * r))) - math.lgamma(1.0 - arg)
    sign = 1.0 if arg > 0 else (-1.0 if math.floor(arg) % 2 else 1.0)
    return arg, sign, lg


@functools.lru_cache(maxsize=256)
def _pole_data(b: tuple, kmax: int):
    """Per-pole data independent of x: (s*, order, log|pref|, sign, coeffs)."""
    classes = _classes(b)
    poles = []
    zeta = {k: _hurwitz_zeta(k, 1.0) for k in range(2, len(b) + 2)}
    for base, offs in classes:
        in_class = {}
        for n_off in offs:
            in_class[n_off] = in_class.get(n_off, 0) + 1
        others = list(b)
        for n_off in offs:
            # remove one matching entry per offset
            tgt = base + n_off
            j = min(range(len(others)), key=lambda i: abs(others[i] - tgt))
            others.pop(j)
        for k in range(kmax):
            r = sum(cnt for n_off, cnt in in_class.items() if n_off <= k)
            sstar = -base - k
            coeff = [0.0] * (r + 1)
            logp = 0.0
            sign = 1.0
            for n_off, cnt in in_class.items():
                arg = n_off - k
                for _ in range(cnt):
                    if arg <= 0:
                        n = -arg
                        logp -= math.lgamma(n + 1)
                        if n % 2:
                            sign = -sign
                        if r >= 2:
                            h = [0.0] * (r + 1)
                            for i in range(1, n + 1):
                                for kk in range(1, r):
                                    h[kk] += i ** (-kk)
                        for kk in range(1, r):
                            if kk == 1:
                                coeff[1] += -EULER_GAMMA + sum(1.0 / i for i in range(1, n + 1))
                            else:
                                coeff[kk] += ((-1) ** kk * zeta[kk] + h[kk]) / kk
                    else:
                        logp += math.lgamma(arg)
                        for kk in range(1, r):
                            coeff[kk] += polygamma(kk - 1, float(arg)) / math.factorial(kk)
            for v in others:
                # near a pole of Γ the argument must carry full relative accuracy
                arg, sg, lg = _gamma_at_offset(v, base, k)
                sign *= sg
                logp += lg
                for kk in range(1, r):
                    coeff[kk] += polygamma(kk - 1, arg) / math.factorial(kk)
            poles.append((sstar, r, logp, sign, tuple(coeff)))
    poles.sort(key=lambda t: -t[0])
    return tuple(poles)


def residue_series_q0(b, x, *, max_poles: int = 800):
    """Sum of residues of ``Π Γ(b_j+s) x^{-s}`` at the left poles.

    Multiple poles (parameters differing by integers) are handled through the
    Laurent expansion of the gamma factors, which brings in digamma and
    polygamma values.

    Returns
    -------
    value, abs_err, converged : float, float, bool
    """
    b = tuple(float(v) for v in b)
    x = float(x)
    if x <= 0:
        raise ValueError("residue series requires x > 0")
    lnx = math.log(x)
    nclass = len(_classes(b))
    kmax = 64
    while True:
        poles = _pole_data(b, kmax)
        total = 0.0
        biggest = 0.0
        quiet = 0
        prev = math.inf
        done = False
        for i, (sstar, r, logp, sign, coeff) in enumerate(poles):
            c = list(coeff)
            c[1] = c[1] - lnx if r >= 2 else 0.0
            e = _exp_series(c, r - 1)
            lmag = logp - sstar * lnx
            term = sign * e[r - 1] * math.exp(lmag) if lmag < 700 else math.inf
            if not math.isfinite(term):
                return math.nan, math.inf, False
            total += term
            biggest = max(biggest, abs(term))
            mag = abs(term)
            if i >= 2 * nclass and mag <= 1e-17 * max(abs(total), 1e-300) and mag <= prev:
                quiet += 1
                if quiet >= 2 * nclass:
                    done = True
                    break
            else:
                quiet = 0
            prev = mag if mag > 0 else prev
        if done:
            err = 4 * np.finfo(float).eps * biggest * (1 + nclass) + 1e-17 * abs(total)
            return total, err, True
        if kmax >= max_poles:
            return total, math.inf, False
        kmax = min(4 * kmax, max_poles)


# ---------------------------------------------------------------------------
# public evaluators
# ---------------------------------------------------------------------------

def g_asymptotic(spec: MeijerGSpec, x) -> float:
    """Large-argument limiting form of ``G^{q,0}_{p,q}``.

    ``(2π)^{(σ-1)/2} σ^{-1/2} x^θ exp(-σ x^{1/σ})`` with ``σ = q - p`` and
    ``θ = ((1-σ)/2 + Σb - Σa)/σ``.
    """
    if spec.n != 0 or spec.m != spec.q or spec.p >= spec.q:
        raise ValueError("g_asymptotic requires n = 0, m = q and p < q")
    sig = spec.q - spec.p
    theta = asymptotic_theta(spec)
    x = np.asarray(x, dtype=float)
    with np.errstate(under="ignore"):
        out = ((2 * np.pi) ** (0.5 * (sig - 1)) / math.sqrt(sig)
               * np.exp(theta * np.log(x) - sig * x ** (1.0 / sig)))
    return float(out) if out.ndim == 0 else out


def asymptotic_theta(spec: MeijerGSpec) -> float:
    sig = spec.q - spec.p
    return ((1 - sig) / 2 + sum(spec.b) - sum(spec.a)) / sig


def _as_array(x):
    xa = np.asarray(x)
    return np.atleast_1d(xa), xa.ndim == 0


def eval_g_q0(spec: MeijerGSpec, x, tol: float = DEFAULT_TOL, *, method: str = "auto") -> EvalResult:
    """Evaluate ``G^{q,0}_{0,q}(x | -; b)`` for ``x > 0``.

    Parameters
    ----------
    spec : MeijerGSpec
        Must have ``p = n = 0`` and ``m = q``; every ``b_j > -1``.
    x : float or array_like
    tol : float
        Absolute tolerance for ``|value| <= 1``, relative above.
    method : {"auto", "quad", "residue"}
        ``auto`` uses the residue series for ``x < 1e-3`` and contour
        quadrature elsewhere, falling back to the other route when the first
        does not converge.
    """
    if spec.kind != "q0":
        raise ValueError(f"eval_g_q0: unsupported shape (m,n,p,q)=({spec.m},{spec.n},{spec.p},{spec.q})")
    if any(v <= -1 for v in spec.b):
        raise ValueError("eval_g_q0 requires every b_j > -1")
    xs, scalar = _as_array(x)
    xs = xs.astype(float)
    if np.any(xs <= 0):
        raise ValueError("eval_g_q0 requires x > 0")
    vals = np.zeros(xs.size)
    errs = np.zeros(xs.size)
    ok = np.zeros(xs.size, dtype=bool)

    sig = spec.q
    theta = asymptotic_theta(spec)
    with np.errstate(divide="ignore"):
        lasym = theta * np.log(xs) - sig * xs ** (1.0 / sig)
    under = lasym < -745.0
    ok[under] = True

    def by_residue(idx):
        for i in idx:
            v, e, c = residue_series_q0(spec.b, xs[i])
            vals[i], errs[i], ok[i] = v, e, c and e <= _threshold(v, tol)

    def by_quad(idx):
        if idx.size == 0:
            return
        lo, hi = spec.strip()
        v, e, c = mellin_barnes(spec.log_kernel(), lo, hi, xs[idx])
        vals[idx] = v.real
        errs[idx] = e
        ok[idx] = c & (e <= _threshold(v.real, tol))

    rest = np.flatnonzero(~under)
    if method == "residue":
        by_residue(rest)
    elif method == "quad":
        by_quad(rest)
    else:
        small = rest[xs[rest] < 1e-3]
        big = rest[xs[rest] >= 1e-3]
        by_residue(small)
        by_quad(big)
        retry = np.flatnonzero(~ok & ~under)
        if retry.size:
            keep = (vals[retry].copy(), errs[retry].copy())
            small_r = retry[xs[retry] < 1e-3]
            big_r = retry[xs[retry] >= 1e-3]
            by_quad(small_r)
            by_residue(big_r)
            worse = errs[retry] > keep[1]
            vals[retry[worse]] = keep[0][worse]
            errs[retry[worse]] = keep[1][worse]
    return _pack(vals, errs, ok, scalar)


def _cdf_log_kernel(spec: MeijerGSpec):
    bs = np.array(spec.b[: spec.m])
    a1 = spec.a[0]

    def logk(s):
        s = np.asarray(s, dtype=complex)
        out = -np.log(1.0 - a1 - s)
        for v in bs:
            out = out + log_gamma(v + s)
        return out

    return logk


def _cdf_limit(spec: MeijerGSpec, x):
    """Residue of the right-hand pole: ``Π Γ(b_j + 1 - a) x^{a-1}``."""
    a1 = spec.a[0]
    lg = sum(math.lgamma(v + 1.0 - a1) for v in spec.b[: spec.m])
    return np.exp(lg + (a1 - 1.0) * np.log(x))


def eval_g_cdf_class(spec: MeijerGSpec, x, tol: float = DEFAULT_TOL, *,
                     complement: bool = False) -> EvalResult:
    """Evaluate the CDF kernel ``G^{q-1,1}_{1,q}(x | a; b_1..b_{q-1}, a-1)``.

    With ``a - 1 = b_q`` the kernel reduces to ``Π Γ(b_j+s) / (1-a-s)``; the
    value at ``x = 0`` is ``0``.  With ``complement=True`` the quantity
    ``Π Γ(b_j+1-a) x^{a-1} - G(x)`` is returned instead, computed on a line to
    the right of the pole at ``1 - a`` so that it stays accurate when it is
    exponentially small.
    """
    if spec.kind != "cdf":
        raise ValueError("eval_g_cdf_class: unsupported shape")
    xs, scalar = _as_array(x)
    xs = xs.astype(float)
    if np.any(xs < 0):
        raise ValueError("eval_g_cdf_class requires x >= 0")
    vals = np.zeros(xs.size)
    errs = np.zeros(xs.size)
    ok = np.ones(xs.size, dtype=bool)
    pos = np.flatnonzero(xs > 0)
    if complement and pos.size != xs.size:
        raise ValueError("complement form requires x > 0")
    if pos.size:
        logk = _cdf_log_kernel(spec)
        lo = max(-v for v in spec.b[: spec.m]) if spec.m else -math.inf
        pole = 1.0 - spec.a[0]
        if complement:
            v, e, c = mellin_barnes(logk, pole, math.inf, xs[pos])
            v = -v.real
        else:
            v, e, c = mellin_barnes(logk, lo, pole, xs[pos])
            v = v.real
        vals[pos] = v
        errs[pos] = e
        ok[pos] = c & (e <= _threshold(v, tol))
    return _pack(vals, errs, ok, scalar)


def eval_g_cf_class(spec: MeijerGSpec, z, tol: float = DEFAULT_TOL) -> EvalResult:
    """Evaluate ``G^{q,1}_{1,q}(z | a; b)`` for real ``z > 0`` or ``|arg z| <= π/2``.

    Real arguments return real values; other arguments return complex values
    (``x^{-s}`` uses the principal branch of ``log z``).
    """
    if spec.kind != "cf":
        raise ValueError("eval_g_cf_class: unsupported shape")
    zs, scalar = _as_array(z)
    if np.any(zs == 0):
        raise ValueError("eval_g_cf_class requires z != 0")
    lo, hi = spec.strip()
    if not lo < hi:
        raise ContourError("pole families overlap; no separating line")
    real_arg = not np.iscomplexobj(zs) or np.all(zs.imag == 0)
    if real_arg:
        zr = np.real(zs).astype(float)
        if np.any(zr < 0):
            raise ValueError("real argument must be positive")
        v, e, c = mellin_barnes(spec.log_kernel(), lo, hi, zr)
        v = v.real
    else:
        v, e, c = mellin_barnes(spec.log_kernel(), lo, hi, zs.astype(complex), full_line=True)
    ok = c & (e <= _threshold(v, tol))
    return _pack(v, e, ok, scalar)


def evaluate(spec: MeijerGSpec, x, tol: float = DEFAULT_TOL) -> EvalResult:
    """Evaluate any G-function whose Mellin-Barnes line integral converges.

    The supported classes are routed to their dedicated evaluators; other
    shapes (for example the inverted forms produced by
    :func:`invert_argument`) are integrated directly along a line in their
    own pole-separating strip, requiring ``m + n > (p + q)/2``.
    """
    kind = spec.kind
    if kind == "q0" and all(v > -1 for v in spec.b):
        return eval_g_q0(spec, x, tol)
    if kind == "cdf":
        return eval_g_cdf_class(spec, x, tol)
    if kind == "cf":
        return eval_g_cf_class(spec, x, tol)
    if spec.delta <= 0:
        raise ValueError("line integral does not converge for this shape")
    lo, hi = spec.strip()
    if not lo < hi:
        raise ContourError("pole families overlap; no separating line")
    xs, scalar = _as_array(x)
    cplx = np.iscomplexobj(xs) and np.any(xs.imag != 0)
    v, e, c = mellin_barnes(spec.log_kernel(), lo, hi, xs if cplx else xs.astype(float))
    if not cplx:
        v = v.real
    return _pack(v, e, c & (e <= _threshold(v, tol)), scalar)


def shift_argument(spec: MeijerGSpec, alpha: float) -> MeijerGSpec:
    """Spec of ``x^α G(x | a; b)``: every parameter shifted by ``α``."""
    return MeijerGSpec(spec.m, spec.n, spec.p, spec.q,
                       tuple(v + alpha for v in spec.a), tuple(v + alpha for v in spec.b))


def invert_argument(spec: MeijerGSpec) -> MeijerGSpec:
    """Spec ``G^{n,m}_{q,p}(· | 1-b; 1-a)`` satisfying ``G_old(x) = G_new(1/x)``."""
    return MeijerGSpec(spec.n, spec.m, spec.q, spec.p,
                       tuple(1.0 - v for v in spec.b), tuple(1.0 - v for v in spec.a))
