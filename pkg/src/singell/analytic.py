"""Closed-form 1-D machinery: Gamma function, the singular profile quadrature,
shooting profiles, the C^1 matching constant, and cos^2-type limit profiles.

The profile of the normalized shooting solution w (w(0)=1, w'(0)=0,
-w'' = 1/(c (n-1) w^n)) is recovered from the implicit relation

    B_n(1 - w^{n-1}(t)) = sqrt(2/c) * t,

where B_n(x) = integral_0^x  h^{-1/2} (1-h)^{-(n-3)/(2(n-1))} dh.  Both
endpoint singularities of the integrand are removed by substitution before
quadrature: h = s^2 on the left and 1 - h = tau^p, p = 2(n-1)/(n+1), on the
right (the right exponent is chosen so the transformed integrand is exactly
p * h^{-1/2}).  The right-hand coordinate also gives high-precision access to
the complement 1 - x, which keeps powers like w^{n+1} = (1-x)^{(n+1)/(n-1)}
accurate near the profile's zero even for n in the hundreds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal, Optional

import numpy as np

QUAD_TOL = 1e-12        # absolute tolerance per quadrature panel
INVERSE_TOL = 5e-14     # residual tolerance of the monotone inversion
ROOT_TOL = 1e-10        # |F(c)| at the matching constant
N_CAP = 400             # profile evaluation cap in double precision


class ConstructionError(RuntimeError):
    pass


# --- Gamma function (Lanczos, g = 7) -----------------------------------------

_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma function for real x > 0, Lanczos approximation (g = 7).

    Relative error is ~1e-13 on the working range [0.5, 10].
    """
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS[0]
    for i, coeff in enumerate(_LANCZOS[1:], start=1):
        acc += coeff / (z + i)
    t = z + 7.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


# --- adaptive Simpson quadrature ----------------------------------------------

def _simpson(f, a, fa, m, fm, b, fb):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(f, a, fa, m, fm, b, fb, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(f, a, fa, lm, flm, m, fm)
    right = _simpson(f, m, fm, rm, frm, b, fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return (_adaptive(f, a, fa, lm, flm, m, fm, left, tol / 2.0, depth - 1)
            + _adaptive(f, m, fm, rm, frm, b, fb, right, tol / 2.0, depth - 1))


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = QUAD_TOL) -> float:
    if b <= a:
        return 0.0
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = _simpson(f, a, fa, m, fm, b, fb)
    return _adaptive(f, a, fa, m, fm, b, fb, whole, tol, 52)


# --- the singular profile quadrature -----------------------------------------

def _check_n(n: float) -> float:
    n = float(n)
    if n < 3.0:
        raise ValueError(f"profile exponent n must be >= 3, got {n}")
    return n


def _singular_exponent(n: float) -> float:
    return (n - 3.0) / (2.0 * (n - 1.0))


def _right_power(n: float) -> float:
    return 2.0 * (n - 1.0) / (n + 1.0)


_S_HALF = math.sqrt(0.5)


class _ProfileQuadrature:
    """Cumulative tables for B_n and its monotone inverse, one instance per n."""

    PANELS = 160

    def __init__(self, n: float):
        self.n = n
        b = _singular_exponent(n)
        p = _right_power(n)
        self.b = b
        self.p = p
        self.left_integrand = lambda s: 2.0 * (1.0 - s * s) ** (-b)
        self.right_integrand = lambda tau: p * (1.0 - tau ** p) ** (-0.5)

        self.s_nodes = np.linspace(0.0, _S_HALF, self.PANELS + 1)
        left = np.zeros(self.PANELS + 1)
        for i in range(self.PANELS):
            left[i + 1] = left[i] + adaptive_simpson(
                self.left_integrand, self.s_nodes[i], self.s_nodes[i + 1],
                QUAD_TOL / self.PANELS)
        self.left_cum = left

        tau_half = 0.5 ** (1.0 / p)
        self.tau_nodes = np.linspace(0.0, tau_half, self.PANELS + 1)
        right = np.zeros(self.PANELS + 1)
        for i in range(self.PANELS):
            right[i + 1] = right[i] + adaptive_simpson(
                self.right_integrand, self.tau_nodes[i], self.tau_nodes[i + 1],
                QUAD_TOL / self.PANELS)
        self.right_cum = right

        self.left_total = float(left[-1])     # B_n(1/2)
        self.right_total = float(right[-1])   # B_n(1) - B_n(1/2)
        self.total = self.left_total + self.right_total

    # forward evaluation ------------------------------------------------------

    def value(self, x: float) -> float:
        if x < -1e-12 or x > 1.0 + 1e-12:
            raise ValueError(f"argument {x} outside [0, 1]")
        x = min(max(x, 0.0), 1.0)
        if x <= 0.5:
            s = math.sqrt(x)
            k = min(int(np.searchsorted(self.s_nodes, s)), self.PANELS) - 1
            k = max(k, 0)
            return float(self.left_cum[k]) + adaptive_simpson(
                self.left_integrand, float(self.s_nodes[k]), s, QUAD_TOL)
        tau = (1.0 - x) ** (1.0 / self.p)
        k = max(min(int(np.searchsorted(self.tau_nodes, tau)), self.PANELS) - 1, 0)
        partial = float(self.right_cum[k]) + adaptive_simpson(
            self.right_integrand, float(self.tau_nodes[k]), tau, QUAD_TOL)
        return self.total - partial

    # monotone inversion ------------------------------------------------------

    def _newton(self, nodes, cum, integrand, target, k):
        lo, hi = float(nodes[k]), float(nodes[k + 1])
        clo, chi = float(cum[k]), float(cum[k + 1])
        pos = lo + (hi - lo) * (target - clo) / (chi - clo)
        for _ in range(40):
            resid = clo + adaptive_simpson(integrand, lo, pos, QUAD_TOL) - target
            if abs(resid) <= INVERSE_TOL * (1.0 + abs(target)):
                break
            step = -resid / integrand(pos)
            pos = min(max(pos + step, lo), hi)
        return pos

    def inverse(self, y: float) -> tuple[float, float]:
        """Return (x, 1-x) with B_n(x) = y; the complement is exact near x = 1."""
        if y < -1e-12 or y > self.total + 1e-9:
            raise ValueError(f"value {y} outside [0, B_n(1) = {self.total}]")
        y = min(max(y, 0.0), self.total)
        if y >= self.total - 1e-12 * (1.0 + self.total):
            # inside the roundoff band of the endpoint; fractional-power
            # evaluations downstream would amplify the residual otherwise
            return 1.0, 0.0
        if y <= self.left_total:
            k = max(min(int(np.searchsorted(self.left_cum, y)), self.PANELS) - 1, 0)
            s = self._newton(self.s_nodes, self.left_cum, self.left_integrand, y, k)
            x = s * s
            return x, 1.0 - x
        target = self.total - y
        k = max(min(int(np.searchsorted(self.right_cum, target)), self.PANELS) - 1, 0)
        tau = self._newton(self.tau_nodes, self.right_cum, self.right_integrand,
                           target, k)
        xi = tau ** self.p
        return 1.0 - xi, xi


@lru_cache(maxsize=64)
def _quadrature_for(n: float) -> _ProfileQuadrature:
    return _ProfileQuadrature(n)


def beta_integral(x: float, n: float) -> float:
    """B_n(x) = integral_0^x h^{-1/2} (1-h)^{-(n-3)/(2(n-1))} dh, x in [0, 1]."""
    n = _check_n(n)
    return _quadrature_for(n).value(float(x))


def beta_integral_inverse(y: float, n: float) -> float:
    """Monotone inverse of B_n on [0, B_n(1)]."""
    n = _check_n(n)
    x, _ = _quadrature_for(n).inverse(float(y))
    return x


def beta_total_closed_form(n: float) -> float:
    """B_n(1) through the Gamma function: sqrt(pi) G(1/2 + 1/(n-1)) / G(n/(n-1)).

    Dual route to the quadrature value beta_integral(1, n).
    """
    n = _check_n(n)
    e = 1.0 / (n - 1.0)
    return math.sqrt(math.pi) * gamma_fn(0.5 + e) / gamma_fn(1.0 + e)


# --- profile parametrization ---------------------------------------------------

def lower_matching_bound(n: float) -> float:
    """Largest c with first zero at 1: 2 G^2(n/(n-1)) / (pi G^2(1/2 + 1/(n-1)))."""
    n = _check_n(n)
    e = 1.0 / (n - 1.0)
    r = gamma_fn(1.0 + e) / gamma_fn(0.5 + e)
    return 2.0 * r * r / math.pi


def upper_matching_bound(n: float) -> float:
    """Value of c at which the first zero reaches 2 (four times the lower bound)."""
    return 4.0 * lower_matching_bound(n)


def first_zero(c: float, n: float) -> float:
    """First zero T of the shooting profile at strength c (closed form)."""
    n = _check_n(n)
    if c <= 0:
        raise ValueError("profile strength c must be positive")
    e = 1.0 / (n - 1.0)
    return math.sqrt(math.pi * c / 2.0) * gamma_fn(0.5 + e) / gamma_fn(1.0 + e)


def profile_amplitude(radius: float, n: float) -> float:
    """Centre amplitude giving first zero exactly at the interval radius.

    Equals (2 R^2 (n-1) G^2(n/(n-1)) / (pi G^2(1/2+1/(n-1))))^(1/(n+1)),
    evaluated in the log domain.
    """
    n = _check_n(n)
    if radius <= 0:
        raise ValueError("radius must be positive")
    base = radius * radius * (n - 1.0) * lower_matching_bound(n)
    return math.exp(math.log(base) / (n + 1.0))


def _power(base: float, exponent: float) -> float:
    if base <= 0.0:
        return 0.0
    return math.exp(min(exponent * math.log(base), 700.0))


def _profile_complement(t: float, n: float, c: float) -> float:
    """1 - x(t) where B_n(x(t)) = sqrt(2/c) t; equals w^{n-1}(t)."""
    y = math.sqrt(2.0 / c) * t
    _, xi = _quadrature_for(n).inverse(y)
    return xi


def profile_value(t: float, n: float, c: float) -> float:
    """Normalized shooting profile w(t) on [0, T]; w(0)=1, w(T)=0."""
    n = _check_n(n)
    if n > N_CAP:
        raise ValueError(f"profile evaluation capped at n = {N_CAP}")
    if c <= 0:
        raise ValueError("profile strength c must be positive")
    T = first_zero(c, n)
    if t < -1e-12 or t > T * (1.0 + 1e-12):
        raise ValueError(f"t = {t} outside the profile domain [0, {T}]")
    t = min(max(t, 0.0), T)
    xi = _profile_complement(t, n, c)
    return _power(xi, 1.0 / (n - 1.0))


def profile_power(t: float, n: float, c: float) -> float:
    """w^{n+1}(t), evaluated as (1-x)^{(n+1)/(n-1)} for accuracy near the zero."""
    n = _check_n(n)
    if n > N_CAP:
        raise ValueError(f"profile evaluation capped at n = {N_CAP}")
    T = first_zero(c, n)
    t = min(max(t, 0.0), T)
    xi = _profile_complement(t, n, c)
    return _power(xi, (n + 1.0) / (n - 1.0))


def matching_slope_gap(n: float, c: float) -> float:
    """F(c) = w^{n+1}(1) - 2/(c (n-1)^2) * (1 - w^{n-1}(1)).

    Zero exactly when the inner profile glues C^1 to the line w(1)(2-t);
    strictly increasing in c on the matching bracket.
    """
    n = _check_n(n)
    y = math.sqrt(2.0 / c)
    quad = _quadrature_for(n)
    x1, xi1 = quad.inverse(y)
    return _power(xi1, (n + 1.0) / (n - 1.0)) - 2.0 / (c * (n - 1.0) ** 2) * x1


def matching_constant(n: float) -> float:
    """The unique c in (c_lower, c_upper] with matching_slope_gap(c) = 0.

    Bracketed bisection down to a 1e-6 relative bracket, then secant polish
    to |F| <= 1e-10.
    """
    n = _check_n(n)
    c_lo = lower_matching_bound(n) * (1.0 + 1e-6)
    c_hi = upper_matching_bound(n)
    f_lo = matching_slope_gap(n, c_lo)
    f_hi = matching_slope_gap(n, c_hi)
    if not (f_lo < 0.0 < f_hi):
        raise ConstructionError(
            f"no sign change on the matching bracket at n={n}: "
            f"F({c_lo:.6g}) = {f_lo:.3e}, F({c_hi:.6g}) = {f_hi:.3e}")
    a, b, fa = c_lo, c_hi, f_lo
    while (b - a) > 1e-6 * a:
        mid = 0.5 * (a + b)
        fm = matching_slope_gap(n, mid)
        if fm < 0.0:
            a, fa = mid, fm
        else:
            b = mid
    c, fc = a, fa
    c_other, f_other = b, matching_slope_gap(n, b)
    for _ in range(80):
        if abs(fc) <= ROOT_TOL:
            return c
        denom = fc - f_other
        if denom == 0.0:
            break
        c_next = c - fc * (c - c_other) / denom
        if not (a <= c_next <= b):
            c_next = 0.5 * (a + b)
        c_other, f_other = c, fc
        c, fc = c_next, matching_slope_gap(n, c_next)
        if fc < 0.0:
            a = c
        else:
            b = c
    if abs(fc) > ROOT_TOL:
        raise ConstructionError(
            f"matching constant refinement stalled at n={n}, |F| = {abs(fc):.3e}")
    return c


def glued_profile(t: float, n: float, c: float) -> float:
    """Profile w on [0,1] continued by the line w(1)(2 - t) on (1, 2]."""
    n = _check_n(n)
    if t < -1e-12 or t > 2.0 + 1e-12:
        raise ValueError(f"t = {t} outside [0, 2]")
    t = min(max(t, 0.0), 2.0)
    if t <= 1.0:
        return profile_value(t, n, c)
    return profile_value(1.0, n, c) * (2.0 - t)


def glued_profile_power(t: float, n: float, c: float) -> float:
    """y^{n+1}(t) for the glued profile, stable for large n."""
    n = _check_n(n)
    t = min(max(t, 0.0), 2.0)
    if t <= 1.0:
        return profile_power(t, n, c)
    xi1 = _profile_complement(1.0, n, c)
    lg = (n + 1.0) / (n - 1.0) * math.log(xi1) if xi1 > 0 else -math.inf
    if t >= 2.0:
        return 0.0
    lg += (n + 1.0) * math.log(2.0 - t)
    return math.exp(lg) if lg > -745.0 else 0.0


# --- profile objects -----------------------------------------------------------

def _vectorize(fn, t):
    arr = np.asarray(t, dtype=float)
    if arr.ndim == 0:
        return fn(float(arr))
    return np.array([fn(float(v)) for v in arr.ravel()]).reshape(arr.shape)


@dataclass(frozen=True)
class OneDProfile:
    """Shooting profile for one exponent n, in either parametrization.

    `for_interval` fixes the first zero at the interval radius (datum = 1 on
    (-R, R)); `for_matched` selects the strength c so the profile glues C^1
    to a straight line hitting zero at t = 2 (datum = indicator of (-1, 1)
    inside (-2, 2)).
    """

    n: float
    c: float
    t_zero: float
    kind: Literal["interval", "matched"]
    radius: Optional[float] = None

    def __post_init__(self):
        if not self.t_zero > 0:
            raise ValueError("first zero must be positive")

    @classmethod
    def for_interval(cls, radius: float, n: float) -> "OneDProfile":
        if radius <= 0:
            raise ValueError("radius must be positive")
        c = radius * radius * lower_matching_bound(n)
        return cls(n=float(n), c=c, t_zero=first_zero(c, n), kind="interval",
                   radius=float(radius))

    @classmethod
    def for_matched(cls, n: float) -> "OneDProfile":
        c = matching_constant(n)
        return cls(n=float(n), c=c, t_zero=first_zero(c, n), kind="matched")

    @property
    def amplitude(self) -> float:
        """alpha with alpha^{n+1} = c (n-1)."""
        return math.exp(math.log(self.c * (self.n - 1.0)) / (self.n + 1.0))

    def w(self, t):
        """Normalized profile, even in t, defined for |t| <= t_zero."""
        return _vectorize(lambda s: profile_value(abs(s), self.n, self.c), t)

    def y(self, t):
        """Glued profile on [-2, 2] (matched parametrization)."""
        return _vectorize(lambda s: glued_profile(abs(s), self.n, self.c), t)

    def u(self, t):
        """Solution profile alpha * w (interval) or alpha * y (matched)."""
        base = self.w if self.kind == "interval" else self.y
        return self.amplitude * base(t)

    def v(self, t):
        """Quasilinear transform c (n-1)/(n+1) * profile^{n+1}."""
        scale = self.c * (self.n - 1.0) / (self.n + 1.0)
        if self.kind == "interval":
            fn = lambda s: profile_power(abs(s), self.n, self.c)
        else:
            fn = lambda s: glued_profile_power(abs(s), self.n, self.c)
        return scale * _vectorize(fn, t)


@dataclass(frozen=True)
class LimitProfile:
    """Closed-form limit objects of the large-exponent construction."""

    radius: float
    geometry: Literal["interval", "matched"]

    def g(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(np.abs(t) <= self.radius,
                       np.cos(np.pi * t / (2.0 * self.radius)) ** 2, 0.0)
        return out if out.ndim else float(out)

    def v(self, t):
        scale = 2.0 * self.radius ** 2 / math.pi ** 2
        t = np.asarray(t, dtype=float)
        out = np.where(np.abs(t) < self.radius,
                       scale * np.cos(np.pi * t / (2.0 * self.radius)) ** 2, 0.0)
        return out if out.ndim else float(out)

    def u(self, t):
        t = np.asarray(t, dtype=float)
        if self.geometry == "matched":
            out = np.where(np.abs(t) <= 1.0, 1.0,
                           np.maximum(2.0 - np.abs(t), 0.0))
        else:
            out = np.where(np.abs(t) < self.radius, 1.0, 0.0)
        return out if out.ndim else float(out)


def limit_profiles(radius: float = 1.0,
                   geometry: Literal["interval", "matched"] = "interval"
                   ) -> LimitProfile:
    """Limit profile objects; the matched geometry fixes the radius at 1."""
    if geometry not in ("interval", "matched"):
        raise ValueError(f"unknown geometry {geometry!r}")
    if geometry == "matched":
        return LimitProfile(1.0, "matched")
    if radius <= 0:
        raise ValueError("radius must be positive")
    return LimitProfile(float(radius), "interval")
