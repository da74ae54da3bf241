"""Shared fixtures-by-function for the pricing and acceptance tests."""

import numpy as np

from postprice.cost_model import CostModel
from postprice.pricing import ResourceSetup

CPU = CostModel(0.223, 3.0)


def setup(mult, cost=CPU):
    return ResourceSetup(cost, mult * cost.c_high)


def ode_residual(pf, lo, hi, alpha, branch, n=200):
    """Largest relative residual of the pricing ODE on n interior points of (lo, hi).

    ``branch`` is "lower" for phi' = alpha (phi - f') / (phi / c_bar)**(1/(s-1))
    and "upper" for phi' = alpha (phi - f').
    """
    cost = pf.setup.cost
    s, c_bar = cost.s, cost.c_high
    y = np.linspace(lo, hi, n + 2)[1:-1]
    h = 1e-5 * (hi - lo)
    dphi = (pf(y + h) - pf(y - h)) / (2 * h)
    phi = pf(y)
    gap = phi - cost.marginal(y)
    if branch == "lower":
        rhs = alpha * gap / (phi / c_bar) ** (1.0 / (s - 1.0))
    else:
        rhs = alpha * gap
    return float(np.max(np.abs(dphi - rhs) / np.maximum(np.abs(rhs), np.abs(dphi))))


def rk4_upper_branch(cost, u, alpha, y_end, n=4000):
    """Integrate phi' = alpha (phi - f'(y)) from phi(u) = c_bar by classical RK4.

    Independent of the closed form; returns the grid and the values.
    """
    c_bar = cost.c_high
    f = lambda y, p: alpha * (p - cost.marginal(min(y, 1.0)))
    ys = np.linspace(u, y_end, n + 1)
    h = ys[1] - ys[0]
    out = np.empty(n + 1)
    p = c_bar
    out[0] = p
    for i in range(n):
        y = ys[i]
        k1 = f(y, p)
        k2 = f(y + h / 2, p + h / 2 * k1)
        k3 = f(y + h / 2, p + h / 2 * k2)
        k4 = f(y + h, p + h * k3)
        p += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = p
    return ys, out
