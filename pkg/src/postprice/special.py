"""Numerical kernels used by pricing synthesis.

Lower incomplete gamma, the characteristic polynomial
``P_s(eta; alpha) = eta**s - alpha/(s-1) * eta**(s-1) + alpha/(s-1)`` with its
positive roots, adaptive Simpson quadrature of ``eta**(s-1) / P_s`` and a
plain bisection root finder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

DOUBLE_ROOT_TOL = 1e-9
SIMPSON_MAX_DEPTH = 60
SIMPSON_ABS_FLOOR = 1e-14


class NoSignChangeError(ValueError):
    """The bracket handed to a root finder does not straddle a root."""


class SingularBracketError(ValueError):
    """An integration interval contains a root of the characteristic polynomial."""


def lower_incomplete_gamma(s: float, x: float) -> float:
    """Unregularized lower incomplete gamma: integral of t**(s-1) e**-t over [0, x]."""
    if s <= 0:
        raise ValueError(f"shape must be positive, got {s}")
    if x < 0:
        raise ValueError(f"upper limit must be nonnegative, got {x}")
    if x == 0:
        return 0.0
    return float(_sp.gammainc(s, x) * _sp.gamma(s))


def gamma_integral(s: float, lo, hi):
    """Integral of t**(s-1) e**-t over [lo, hi] (signed, vectorized over the limits)."""
    lo_a, hi_a = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    sign = np.where(lo_a > hi_a, -1.0, 1.0)
    a, b = np.minimum(lo_a, hi_a), np.maximum(lo_a, hi_a)
    # the complementary form keeps precision when both limits sit in the tail
    upper = _sp.gammaincc(s, a) - _sp.gammaincc(s, b)
    lower = _sp.gammainc(s, b) - _sp.gammainc(s, a)
    val = sign * _sp.gamma(s) * np.where(a > s, upper, lower)
    return float(val) if val.ndim == 0 else val


def bisect(g, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 200) -> float:
    """Root of a scalar function with a sign change on [lo, hi]."""
    glo, ghi = g(lo), g(hi)
    if glo == 0:
        return lo
    if ghi == 0:
        return hi
    if glo * ghi > 0:
        raise NoSignChangeError(
            f"no sign change on [{lo}, {hi}]: g(lo)={glo}, g(hi)={ghi}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) <= tol or (hi - lo) <= tol * max(1.0, abs(mid)):
            return mid
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def adaptive_simpson(f, a: float, b: float, rtol: float = 1e-10,
                     max_depth: int = SIMPSON_MAX_DEPTH) -> float:
    """Adaptive Simpson quadrature with Richardson correction."""
    if a == b:
        return 0.0
    fa, fb, m = f(a), f(b), 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    tol = max(rtol * abs(whole), SIMPSON_ABS_FLOOR)
    # explicit stack instead of recursion (depth can reach 60)
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a_, b_, fa_, fm_, fb_, whole_, tol_, depth = stack.pop()
        m_ = 0.5 * (a_ + b_)
        lm, rm = 0.5 * (a_ + m_), 0.5 * (m_ + b_)
        flm, frm = f(lm), f(rm)
        left = (m_ - a_) / 6.0 * (fa_ + 4.0 * flm + fm_)
        right = (b_ - m_) / 6.0 * (fm_ + 4.0 * frm + fb_)
        delta = left + right - whole_
        if depth >= max_depth or abs(delta) <= 15.0 * tol_:
            total += left + right + delta / 15.0
        else:
            half = max(0.5 * tol_, SIMPSON_ABS_FLOOR)
            stack.append((a_, m_, fa_, flm, fm_, left, half, depth + 1))
            stack.append((m_, b_, fm_, frm, fb_, right, half, depth + 1))
    return total


@dataclass(frozen=True)
class CharPoly:
    """Characteristic polynomial P_s(eta; alpha) of the scaled pricing ODE."""

    s: float
    alpha: float

    def __post_init__(self):
        if not self.s > 1:
            raise ValueError(f"s must exceed 1, got {self.s}")
        if not self.alpha >= 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")

    @property
    def alpha_min(self) -> float:
        return self.s ** (self.s / (self.s - 1.0))

    def __call__(self, eta: float) -> float:
        k = self.alpha / (self.s - 1.0)
        return eta**self.s - k * eta ** (self.s - 1.0) + k

    def integrand(self, eta: float) -> float:
        return eta ** (self.s - 1.0) / self(eta)

    def below_root(self, root: float, delta):
        """P_s(root - delta) - P_s(root), accurate for small delta.

        Written with expm1/log1p so the result keeps its relative precision
        when the direct polynomial would cancel.
        """
        s, k = self.s, self.alpha / (self.s - 1.0)
        lg = np.log1p(-np.asarray(delta, dtype=float) / root)
        return root**s * np.expm1(s * lg) - k * root ** (s - 1.0) * np.expm1((s - 1.0) * lg)


def char_poly(cp: CharPoly, eta: float) -> float:
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    return cp(eta)


def char_poly_roots(cp: CharPoly):
    """Positive roots ``(R_minus, R_plus)`` of P_s, or None when there are none.

    P_s decreases on [0, alpha/s] and increases afterwards, so each root is
    bracketed on one side of the minimizer.
    """
    s, alpha = cp.s, cp.alpha
    a_min = cp.alpha_min
    if abs(alpha - a_min) < DOUBLE_ROOT_TOL * a_min:
        r = s ** (1.0 / (s - 1.0))
        return r, r
    if alpha < a_min:
        return None
    eta_star = alpha / s
    # P_s(eta) ~ eta**s for large eta; alpha/(s-1) + 1 is past the larger root
    hi = alpha / (s - 1.0) + 1.0
    lo_root = bisect(cp, 0.0, eta_star, tol=1e-15)
    hi_root = bisect(cp, eta_star, hi, tol=1e-15)
    return _polish_root(cp, lo_root), _polish_root(cp, hi_root)


def _polish_root(cp: CharPoly, r: float) -> float:
    # a few Newton steps to reach |P| ~ machine precision
    s, k = cp.s, cp.alpha / (cp.s - 1.0)
    for _ in range(4):
        d = s * r ** (s - 1.0) - k * (s - 1.0) * r ** (s - 2.0)
        if d == 0:
            break
        step = cp(r) / d
        r -= step
        if abs(step) < 1e-16 * r:
            break
    return r


def char_integral(cp: CharPoly, lo: float, hi: float, rtol: float = 1e-9) -> float:
    """Integral of eta**(s-1) / P_s(eta) over [lo, hi] (signed, lo may exceed hi)."""
    if lo == hi:
        return 0.0
    a, b = (lo, hi) if lo < hi else (hi, lo)
    roots = char_poly_roots(cp)
    if roots is not None and any(a <= r <= b for r in roots):
        raise SingularBracketError(f"[{a}, {b}] contains a root of P_s: {roots}")
    val = adaptive_simpson(cp.integrand, a, b, rtol=rtol * 1e-2)
    return val if lo < hi else -val

