"""Optimal posted-price functions for power supply costs.

The price curve depends on how the PUV upper bound ``p_bar`` compares with
the maximum marginal cost ``c_bar = f'(1)`` and with the critical price
``C_s``:

* LUC  (p_bar <= c_bar): a one-parameter family indexed by a knot
  ``m in [w, v]``, all ``alpha_min``-competitive.
* HUC1 (c_bar < p_bar <= C_s): a family indexed by the dividing threshold
  ``u in [u_s, u_cdt]``, also ``alpha_min``-competitive.
* HUC2 (p_bar > C_s): a single curve with dividing threshold ``u_cdt`` and
  ratio ``(s-1) / (u_cdt - u_cdt**s)``.

Below a dividing threshold the curve solves the separable ODE written in the
scaled variable ``phi_tilde = (phi / c_bar)**(1/(s-1))``; above it, the
linear ODE ``phi' = alpha (phi - f')`` whose solution is closed form in terms
of the lower incomplete gamma function.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from .cost_model import CostModel
from .special import (
    CharPoly,
    NoSignChangeError,
    adaptive_simpson,
    bisect,
    char_poly_roots,
    gamma_integral,
)

LUC, HUC1, HUC2 = "LUC", "HUC1", "HUC2"
INTERVAL_TOL = 1e-10
RESIDUAL_TOL = 1e-9
DEFAULT_GRID = 2**14
MAX_DOUBLINGS = 64
TABLE_FINE_NODES = 4000
GL_ORDER = 10


class SynthesisError(RuntimeError):
    """A root finder failed while building a pricing function."""


@dataclass(frozen=True)
class ResourceSetup:
    """Cost model of one resource plus the PUV upper bound for it."""

    cost: CostModel
    p_bar: float

    def __post_init__(self):
        if not self.p_bar > self.cost.c_low:
            raise ValueError(
                f"p_bar must exceed the minimum marginal cost, got {self.p_bar}"
            )

    @property
    def s(self) -> float:
        return self.cost.s

    @property
    def c_bar(self) -> float:
        return self.cost.c_high


@dataclass(frozen=True)
class Regime:
    tag: str
    C_s: float
    v: float | None = None
    w: float | None = None


class RegimeConstants(NamedTuple):
    alpha_min: float
    u_s: float


def regime_constants(s: float) -> RegimeConstants:
    if not s > 1:
        raise ValueError("s must exceed 1")
    return RegimeConstants(s ** (s / (s - 1.0)), (1.0 / s) ** (1.0 / (s - 1.0)))


def alpha_of_u(s: float, u: float) -> float:
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must lie in (0, 1), got {u}")
    return (s - 1.0) / (u - u**s)


def lower_bound_alpha1(s: float, u: float) -> float:
    alpha_min, u_s = regime_constants(s)
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must lie in (0, 1), got {u}")
    return alpha_of_u(s, u) if u < u_s else alpha_min


def ivp_price(rs: ResourceSetup, u: float, y, alpha: float):
    """Solution of phi' = alpha (phi - c_bar y**(s-1)) with phi(u) = c_bar."""
    s, c_bar = rs.s, rs.c_bar
    y = np.asarray(y, dtype=float)
    gam = gamma_integral(s, alpha * y, alpha * u)
    with np.errstate(over="ignore", invalid="ignore"):
        val = (c_bar * np.exp(alpha * y) / alpha ** (s - 1.0) * gam
               + c_bar * np.exp(alpha * (y - u)))
    return float(val) if val.ndim == 0 else val


def phi_ivp(rs: ResourceSetup, u: float, y, alpha: float | None = None):
    """Closed-form upper-branch price with ratio alpha (default: the u-dependent bound)."""
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < u - 1e-12):
        raise ValueError(f"phi_ivp is defined for y >= u = {u}")
    if alpha is None:
        alpha = lower_bound_alpha1(rs.s, u)
    return ivp_price(rs, u, y, alpha)


def _terminal_ratio(rs: ResourceSetup, u: float, alpha: float) -> float:
    # phi(1; alpha, u) / p_bar - 1; increasing in alpha, decreasing in u
    with np.errstate(over="ignore"):
        val = ivp_price(rs, u, 1.0, alpha)
    if not np.isfinite(val):
        return math.inf
    return val / rs.p_bar - 1.0


def lower_bound_alpha2(rs: ResourceSetup, u: float) -> float:
    """Smallest alpha for which the upper-branch IVP started at u reaches p_bar at y = 1."""
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must lie in (0, 1), got {u}")
    if not rs.p_bar > rs.c_bar:
        raise ValueError("the second lower bound needs p_bar > c_bar")
    g = lambda a: _terminal_ratio(rs, u, a)
    lo, hi = 1e-9, 1.0
    for _ in range(MAX_DOUBLINGS):
        if g(hi) > 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise SynthesisError("bracket expansion failed for the second lower bound")
    return bisect(g, lo, hi, tol=INTERVAL_TOL * 1e-3)


def capacity_price_Cs(rs: ResourceSetup) -> float:
    """Critical PUV bound separating HUC1 from HUC2."""
    s, c_bar = rs.s, rs.c_bar
    alpha_min, _ = regime_constants(s)
    integral = gamma_integral(s, s, alpha_min)
    return c_bar * (math.exp(-s) - integral / s**s) * math.exp(alpha_min)


def classify(rs: ResourceSetup) -> Regime:
    if not rs.p_bar > rs.cost.c_low:
        raise ValueError("p_bar must exceed the minimum marginal cost")
    C_s = capacity_price_Cs(rs)
    if rs.p_bar <= rs.c_bar:
        v = rs.cost.inverse_marginal(rs.p_bar)
        w = rs.cost.inverse_marginal(rs.p_bar / rs.s)
        return Regime(LUC, C_s, v=v, w=w)
    if rs.p_bar <= C_s:
        return Regime(HUC1, C_s)
    return Regime(HUC2, C_s)


def critical_dividing_threshold(rs: ResourceSetup) -> float:
    """Dividing threshold where the two lower bounds on alpha intersect."""
    if not rs.p_bar > rs.c_bar:
        raise ValueError("the critical dividing threshold needs p_bar > c_bar")
    s = rs.s
    alpha_min, u_s = regime_constants(s)
    C_s = capacity_price_Cs(rs)
    try:
        if rs.p_bar <= C_s:
            g = lambda u: _terminal_ratio(rs, u, alpha_min)
            return bisect(g, u_s, 1.0 - 1e-15, tol=INTERVAL_TOL * 1e-2)
        g = lambda u: _terminal_ratio(rs, u, alpha_of_u(s, u))
        lo = 0.5 * u_s
        while g(lo) <= 0:
            lo *= 0.5
            if lo < 1e-12:
                raise SynthesisError("could not bracket the critical threshold")
        return bisect(g, lo, u_s, tol=INTERVAL_TOL * 1e-2)
    except NoSignChangeError as exc:
        raise SynthesisError(f"critical threshold not bracketed: {exc}") from exc


def rho_s(rs: ResourceSetup) -> float:
    """Utilization where the upper branch started at u_s reaches p_bar (HUC1 only)."""
    s, c_bar, p_bar = rs.s, rs.c_bar, rs.p_bar
    if not p_bar > c_bar:
        raise ValueError("rho_s needs p_bar > c_bar")
    alpha_min, u_s = regime_constants(s)
    ss = s**s

    def g(rho):
        # both sides multiplied by e**s / s**s to keep the residual O(1)
        lhs = gamma_integral(s, s, alpha_min * rho)
        rhs = ss * math.exp(-s) - p_bar * ss / c_bar * math.exp(-alpha_min * rho)
        return (lhs - rhs) * math.exp(s) / ss

    try:
        return bisect(g, u_s, 1.0, tol=INTERVAL_TOL * 1e-2)
    except NoSignChangeError as exc:
        raise SynthesisError("rho_s has no root in (u_s, 1]; p_bar exceeds C_s") from exc


def scaled_price_root(cp: CharPoly, anchor: float, y: float, knot: float,
                      tol: float = 1e-13) -> float:
    """Scaled price ``chi * y`` where chi solves
    ``integral_{anchor}^{chi} eta**(s-1)/P_s(eta) d eta = ln(knot / y)``.
    """
    if not 0.0 < y <= knot * (1.0 + 1e-12):
        raise ValueError(f"y must lie in (0, knot], got y={y}, knot={knot}")
    target = math.log(knot / y)
    if target <= 0.0:
        return anchor * y
    roots = char_poly_roots(cp)
    if roots is not None and any(abs(r - anchor) <= 1e-12 * r for r in roots):
        # anchor is itself a root: the linear solution
        return anchor * y
    upper = _upper_bracket(cp, anchor, roots)
    eta_of, h, t_of = _singular_map(cp, anchor, roots)
    # bisection in the flattened variable t; the integral is accumulated
    # from the lower end so each step only integrates the newly added piece
    lo, t_end, acc = t_of(anchor), t_of(upper), 0.0
    # grow the bracket geometrically first: evaluating the flattened
    # integrand needlessly close to the root only adds rounding noise
    width = 1.0
    hi = min(lo + width, t_end)
    while hi < t_end:
        inc = adaptive_simpson(h, lo, hi, rtol=1e-12)
        if acc + inc >= target:
            break
        lo, acc = hi, acc + inc
        width *= 2.0
        hi = min(lo + width, t_end)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        inc = adaptive_simpson(h, lo, mid, rtol=1e-12)
        if acc + inc < target:
            lo, acc = mid, acc + inc
        else:
            hi = mid
        chi_lo, chi_hi = eta_of(lo), eta_of(hi)
        if chi_hi - chi_lo <= tol * chi_hi:
            break
    else:
        raise SynthesisError("scaled price bisection did not converge")
    if acc + adaptive_simpson(h, lo, hi, rtol=1e-12) < target:
        if roots is None or upper > max(roots):
            raise SynthesisError(
                f"target {target} not reachable inside the bracket [{anchor}, {upper}]")
        # the root lies within 1e-12 (relative) of the singular end
        return upper * y
    return 0.5 * (chi_lo + chi_hi) * y


def _upper_bracket(cp: CharPoly, anchor: float, roots) -> float:
    above = [r for r in (roots or ()) if r > anchor]
    if above:
        b = min(above)
        return b - 1e-12 * b
    return 1e3 * anchor


def _singular_map(cp: CharPoly, anchor: float, roots):
    """Change of variable that flattens the integrand near the bracket end.

    Returns (eta_of_t, flat_integrand_of_t, t_of_eta).  Near a double root B
    the integrand behaves like (B - eta)**-2 and t = 1/(B - eta); near a
    simple root like (B - eta)**-1 and t = -log(B - eta); without a root
    above the anchor like 1/eta and t = log(eta).
    """
    above = [r for r in (roots or ()) if r > anchor]
    s = cp.s
    if not above:
        return np.exp, (lambda t: cp.integrand(np.exp(t)) * np.exp(t)), math.log
    b = min(above)
    if abs(roots[1] - roots[0]) <= 1e-9 * roots[1]:
        def flat(t):
            d = 1.0 / t
            return (b - d) ** (s - 1.0) * d * d / cp.below_root(b, d)
        return (lambda t: b - 1.0 / t), flat, (lambda e: 1.0 / (b - e))

    def flat(t):
        d = np.exp(-t)
        return (b - d) ** (s - 1.0) * d / cp.below_root(b, d)
    return (lambda t: b - np.exp(-t)), flat, (lambda e: -math.log(b - e))


def _scaled_table(cp: CharPoly, anchor: float, knot: float, y_grid: np.ndarray,
                  n_steps: int = 20000) -> np.ndarray:
    """Scaled prices on ``y_grid`` (all in (0, knot]) from the inverse map.

    chi -> y is explicit, ``y = knot * exp(-G(chi))`` with G the cumulative
    integral from ``anchor``, so G is accumulated once along a transformed
    abscissa and the inverse is interpolated monotonically in log y.
    """
    if len(y_grid) == 0:
        return np.empty(0)
    roots = char_poly_roots(cp)
    if roots is not None and any(abs(r - anchor) <= 1e-12 * r for r in roots):
        return anchor * y_grid
    eta_of, h, t_of = _singular_map(cp, anchor, roots)
    t0 = t_of(anchor)
    target = math.log(knot / float(np.min(y_grid))) + 1.0
    # G grows roughly linearly in t; a probe step sets the step size
    probe = adaptive_simpson(h, t0, t0 + 1.0, rtol=1e-12)
    dt = max(target / max(probe, 1e-300), 1.0) / n_steps
    nodes, weights = np.polynomial.legendre.leggauss(GL_ORDER)
    ts, G = np.array([t0]), np.array([0.0])
    # fixed-order Gauss-Legendre per step, evaluated a block of steps at a time
    while G[-1] < target:
        if len(ts) > 50 * n_steps:
            raise SynthesisError("scaled price table did not reach the target")
        edges = ts[-1] + dt * np.arange(0, n_steps + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        pts = mids[:, None] + 0.5 * dt * nodes[None, :]
        pieces = 0.5 * dt * (h(pts) @ weights)
        ts = np.concatenate((ts, edges[1:]))
        G = np.concatenate((G, G[-1] + np.cumsum(pieces)))
    chi = eta_of(ts)
    chi[0] = anchor
    logy = math.log(knot) - np.asarray(G)
    interp = PchipInterpolator(logy[::-1], chi[::-1], extrapolate=False)
    ly = np.log(y_grid)
    chi_y = np.where(ly >= logy[0], anchor, interp(np.minimum(ly, logy[0])))
    return chi_y * y_grid


@dataclass(frozen=True)
class PricingFunction:
    """Monotone posted-price curve for one resource.

    ``knots`` carries the regime parameters (``m``, ``u``, ``rho``,
    ``u_cdt``...); ``domain_end`` is where the synthesized curve stops and
    the extension takes over.  Call it with a utilization (scalar or array).
    """

    name: str
    setup: ResourceSetup
    regime: Regime | None
    alpha: float | None
    knots: dict
    domain_end: float
    eval_mode: str = "on_the_fly"
    grid_size: int | None = None
    _scalar: Callable[[float], float] = field(default=None, repr=False, compare=False)
    _table: tuple | None = field(default=None, repr=False, compare=False)

    def __call__(self, y):
        y_arr = np.asarray(y, dtype=float)
        if np.any(y_arr < -1e-12) or np.any(y_arr > 1.0 + 1e-12):
            raise ValueError(f"utilization outside [0, 1]: {y}")
        y_arr = np.clip(y_arr, 0.0, 1.0)
        if self._table is not None:
            out = self._eval_table(y_arr)
        elif y_arr.ndim == 0:
            out = np.asarray(self._scalar(float(y_arr)))
        else:
            out = np.fromiter((self._scalar(float(v)) for v in y_arr.ravel()),
                              dtype=float, count=y_arr.size).reshape(y_arr.shape)
        return float(out) if out.ndim == 0 else out

    def _eval_table(self, y):
        # the table stores scaled prices, which are close to linear in y
        xs, vals = self._table
        scaled = np.interp(y, xs, vals)
        return self.setup.c_bar * scaled ** (self.setup.s - 1.0)

    def scaled(self, y):
        return (np.asarray(self(y)) / self.setup.c_bar) ** (1.0 / (self.setup.s - 1.0))

    def tabulated(self, grid_size: int = DEFAULT_GRID) -> "PricingFunction":
        """Copy of this curve backed by a lookup table on a uniform grid."""
        if self._table is not None and self.grid_size == grid_size:
            return self
        table = _build_table(self, grid_size)
        return PricingFunction(self.name, self.setup, self.regime, self.alpha,
                               self.knots, self.domain_end, "tabulated",
                               grid_size, self._scalar, table)

    def to_csv(self, path, grid=None, n: int = 201) -> None:
        grid = np.linspace(0.0, 1.0, n) if grid is None else np.asarray(grid)
        prices = self(grid)
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["y", "phi"])
            for y, p in zip(grid, np.atleast_1d(prices)):
                wr.writerow([repr(float(y)), repr(float(p))])

    def describe(self) -> dict:
        out = {"name": self.name, "regime": self.regime.tag if self.regime else None,
               "alpha": self.alpha, "domain_end": self.domain_end}
        out.update({k: v for k, v in self.knots.items() if not k.startswith("_")})
        return out


def table_abscissae(grid_size: int) -> np.ndarray:
    """Uniform grid on [0, 1] merged with a geometric grid.

    Near y = 0 the scaled price behaves like y / log(1/y); its curvature
    relative to its size grows like 1/y**2, so a uniform grid alone loses
    relative accuracy at small utilizations.
    """
    fine = np.geomspace(1e-14, 1.0, TABLE_FINE_NODES)
    return np.unique(np.concatenate(([0.0], fine, np.linspace(0.0, 1.0, grid_size + 1))))


def _build_table(pf: PricingFunction, grid_size: int) -> tuple:
    # branch knots are added so kinks are not smoothed over by a cell
    kinks = [v for k, v in pf.knots.items()
             if not k.startswith("_") and isinstance(v, float) and 0.0 < v < 1.0]
    y = np.unique(np.concatenate((table_abscissae(grid_size), kinks)))
    builder = pf.knots.get("_table_builder")
    if builder is not None:
        return y, builder(y)
    prices = np.array([pf._scalar(v) for v in y])
    return y, (prices / pf.setup.c_bar) ** (1.0 / (pf.setup.s - 1.0))


# --------------------------------------------------------------------------
# synthesis
# --------------------------------------------------------------------------

def _canonical_extension(rs: ResourceSetup):
    """Most conservative optimal curve: s f'(y) below u_s, the u_s upper branch above."""
    alpha_min, u_s = regime_constants(rs.s)

    def ext(y):
        y = np.asarray(y, dtype=float)
        low = rs.s * rs.cost.marginal(np.minimum(y, u_s))
        high = ivp_price(rs, u_s, np.maximum(y, u_s), alpha_min)
        out = np.where(y < u_s, low, high)
        return float(out) if out.ndim == 0 else out

    return ext


def synthesize_optimal(rs: ResourceSetup, choice: float = 0.0,
                       eval_mode: str = "on_the_fly",
                       grid_size: int = DEFAULT_GRID) -> PricingFunction:
    """Optimal pricing function for ``rs``.

    ``choice`` in [0, 1] selects a member of the optimal family in LUC/HUC1:
    0 is the most conservative curve (knot ``w`` / threshold ``u_s``) and 1
    the most aggressive (``v`` / ``u_cdt``).  It is ignored in HUC2, where the
    optimal curve is unique.
    """
    if not 0.0 <= choice <= 1.0:
        raise ValueError("choice must lie in [0, 1]")
    regime = classify(rs)
    cp = CharPoly(rs.s, regime_constants(rs.s).alpha_min)
    ext = _canonical_extension(rs)
    try:
        if regime.tag == LUC:
            return _synth_luc(rs, regime, choice, cp, ext, eval_mode, grid_size)
        if regime.tag == HUC1:
            return _synth_huc1(rs, regime, choice, cp, ext, eval_mode, grid_size)
        return _synth_huc2(rs, regime, eval_mode, grid_size)
    except NoSignChangeError as exc:
        raise SynthesisError(str(exc)) from exc


def _finish(pf: PricingFunction, eval_mode: str, grid_size: int) -> PricingFunction:
    if eval_mode == "tabulated":
        return pf.tabulated(grid_size)
    if eval_mode != "on_the_fly":
        raise ValueError(f"unknown eval mode {eval_mode!r}")
    return pf


def _synth_luc(rs, regime, choice, cp, ext, eval_mode, grid_size):
    s, c_bar, p_bar = rs.s, rs.c_bar, rs.p_bar
    v, w = regime.v, regime.w
    m = w + choice * (v - w)
    # the curve passes through (m, p_bar): scaled price v at y = m
    anchor = v / m

    def root_branch(y):
        return scaled_price_root(cp, anchor, y, m)

    def scalar(y):
        if y <= 0.0:
            return 0.0
        if y <= m:
            return c_bar * root_branch(y) ** (s - 1.0)
        return max(p_bar, ext(y))

    def table_builder(grid):
        out = np.empty_like(grid)
        inside = (grid > 0) & (grid <= m)
        out[grid <= 0] = 0.0
        out[inside] = _scaled_table(cp, anchor, m, grid[inside])
        outside = grid > m
        out[outside] = _to_scaled(rs, np.maximum(p_bar, ext(grid[outside])))
        return out

    knots = {"m": m, "v": v, "w": w, "_table_builder": table_builder}
    pf = PricingFunction("OP", rs, regime, regime_constants(s).alpha_min, knots,
                         m, _scalar=scalar)
    return _finish(pf, eval_mode, grid_size)


def _synth_huc1(rs, regime, choice, cp, ext, eval_mode, grid_size):
    s, c_bar, p_bar = rs.s, rs.c_bar, rs.p_bar
    alpha_min, u_s = regime_constants(s)
    u_cdt = critical_dividing_threshold(rs)
    u = u_s + choice * (u_cdt - u_s)
    if choice == 0.0:
        rho = rho_s(rs)
    elif choice == 1.0:
        rho = 1.0
    else:
        g = lambda y: ivp_price(rs, u, y, alpha_min) / p_bar - 1.0
        rho = 1.0 if g(1.0) <= 0 else bisect(g, u, 1.0, tol=INTERVAL_TOL * 1e-2)
    anchor = 1.0 / u

    def scalar(y):
        if y <= 0.0:
            return 0.0
        if y < u:
            return c_bar * scaled_price_root(cp, anchor, y, u) ** (s - 1.0)
        if y <= rho:
            return ivp_price(rs, u, y, alpha_min)
        return max(p_bar, ext(y))

    def table_builder(grid):
        out = np.empty_like(grid)
        low = (grid > 0) & (grid < u)
        out[grid <= 0] = 0.0
        out[low] = _scaled_table(cp, anchor, u, grid[low])
        rest = grid >= u
        mid = rest & (grid <= rho)
        out[mid] = _to_scaled(rs, ivp_price(rs, u, grid[mid], alpha_min))
        top = grid > rho
        out[top] = _to_scaled(rs, np.maximum(p_bar, ext(grid[top])))
        return out

    knots = {"u": u, "rho": rho, "u_cdt": u_cdt, "_table_builder": table_builder}
    pf = PricingFunction("OP", rs, regime, alpha_min, knots, rho, _scalar=scalar)
    return _finish(pf, eval_mode, grid_size)


def _synth_huc2(rs, regime, eval_mode, grid_size):
    s, c_bar = rs.s, rs.c_bar
    u_cdt = critical_dividing_threshold(rs)
    alpha = alpha_of_u(s, u_cdt)

    def scalar(y):
        if y <= u_cdt:
            return c_bar * (y / u_cdt) ** (s - 1.0)
        return ivp_price(rs, u_cdt, y, alpha)

    knots = {"u_cdt": u_cdt}
    pf = PricingFunction("OP", rs, regime, alpha, knots, 1.0, _scalar=scalar)
    return _finish(pf, eval_mode, grid_size)


def _to_scaled(rs: ResourceSetup, price: float) -> float:
    return (price / rs.c_bar) ** (1.0 / (rs.s - 1.0))


def optimal_ratio(rs: ResourceSetup) -> float:
    regime = classify(rs)
    if regime.tag in (LUC, HUC1):
        return regime_constants(rs.s).alpha_min
    return alpha_of_u(rs.s, critical_dividing_threshold(rs))


def benchmark_pricing(kind: str, rs: ResourceSetup, eval_mode: str = "on_the_fly",
                      grid_size: int = DEFAULT_GRID) -> PricingFunction:
    """Myopic (``MP``: f'(y)) or twice-the-index (``TP``) benchmark curves."""
    cost, c_bar, p_bar = rs.cost, rs.c_bar, rs.p_bar
    kind = kind.upper()
    if kind == "MP":
        scalar = lambda y: cost.marginal(y)
    elif kind == "TP":
        def scalar(y):
            if y <= 0.5:
                return cost.marginal(2.0 * y)
            if p_bar > c_bar:
                return c_bar * (p_bar / c_bar) ** (2.0 * y - 1.0)
            return c_bar
    else:
        raise ValueError(f"unknown benchmark {kind!r}")
    pf = PricingFunction(kind, rs, None, None, {}, 1.0, _scalar=scalar)
    return _finish(pf, eval_mode, grid_size)


def make_pricing(kind: str, rs: ResourceSetup, choice: float = 0.0,
                 eval_mode: str = "on_the_fly",
                 grid_size: int = DEFAULT_GRID) -> PricingFunction:
    """Build a pricing curve by mechanism name: ``OP``, ``TP`` or ``MP``."""
    if kind.upper() == "OP":
        return synthesize_optimal(rs, choice, eval_mode, grid_size)
    return benchmark_pricing(kind, rs, eval_mode, grid_size)
