"""Offline welfare oracles and empirical ratios.

``brute_force_opt`` enumerates every assignment of at most one bundle per
customer (depth first, with an admissible valuation bound).  ``dual_upper_bound``
evaluates the Lagrangian dual of the welfare problem at a price table; any
nonnegative table gives an upper bound on the offline optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mechanism import total_cost

DEFAULT_BUDGET = 40.0


class BudgetExceeded(ValueError):
    pass


def enumeration_size(instance) -> float:
    return len(instance.customers) * math.log2(max(len(instance.catalog), 1))


def brute_force_opt(instance, costs, prune: bool = True,
                    budget: float = DEFAULT_BUDGET, return_assignment: bool = False):
    """Exact offline welfare by exhaustive search."""
    size = enumeration_size(instance)
    if size > budget:
        raise BudgetExceeded(f"N log2|B| = {size:.1f} exceeds the budget {budget}")
    customers = list(instance.customers)
    n = len(customers)
    if n == 0:
        return (0.0, []) if return_assignment else 0.0
    K = len(costs)
    units = np.array([b.units for b in instance.catalog])
    y = np.zeros((K, instance.horizon))
    # options per customer, most valuable first so good incumbents come early
    opts = [sorted(((v, b) for b, v in c.valuations.items() if b != 0), reverse=True)
            for c in customers]
    best_val = [0.0 if v <= 0 else v for v in (max((o[0] for o in op), default=0.0) for op in opts)]
    suffix = np.concatenate((np.cumsum(best_val[::-1])[::-1], [0.0]))
    best = [0.0, [None] * n]
    choice = [None] * n

    def cost_of(sl):
        return total_cost(costs, y[:, sl])

    def dfs(i, value, cost):
        if value - cost > best[0]:
            best[0], best[1] = value - cost, list(choice)
        if i == n:
            return
        if prune and value - cost + suffix[i] <= best[0]:
            return
        c = customers[i]
        sl = slice(c.arrival, c.arrival + c.duration)
        for v, b in opts[i]:
            new = y[:, sl] + units[b][:, None]
            if np.any(new > 1.0 + 1e-12):
                continue
            old_cost = cost_of(sl)
            saved = y[:, sl].copy()
            y[:, sl] = new
            choice[i] = b
            dfs(i + 1, value + v, cost + cost_of(sl) - old_cost)
            y[:, sl] = saved
            choice[i] = None
        dfs(i + 1, value, cost)

    dfs(0, 0.0, 0.0)
    if return_assignment:
        return best[0], best[1]
    return best[0]


def dual_upper_bound(instance, costs, prices) -> float:
    """Dual objective at the price table ``prices[k, t]``.

    ``sum_n max(0, max_b v_n^b - sum_{t, k} p_k(t) r_k^b) + sum_{k, t} f#_k(p_k(t))``.
    """
    prices = np.asarray(prices, dtype=float)
    if prices.shape != (len(costs), instance.horizon):
        raise ValueError(f"price table must have shape {(len(costs), instance.horizon)}")
    if np.any(prices < 0):
        raise ValueError("prices must be nonnegative")
    units = np.array([b.units for b in instance.catalog])
    # prefix sums give each job's per-resource slot total in O(1)
    csum = np.concatenate((np.zeros((len(costs), 1)), np.cumsum(prices, axis=1)), axis=1)
    total = 0.0
    for c in instance.customers:
        slot_sum = csum[:, c.arrival + c.duration] - csum[:, c.arrival]
        surplus = max((v - float(units[b] @ slot_sum) for b, v in c.valuations.items()
                       if b != 0), default=0.0)
        total += max(0.0, surplus)
    for k, f in enumerate(costs):
        total += float(np.sum(f.conjugate(prices[k])))
    return total


@dataclass(frozen=True)
class EvaluationReport:
    w_online: float
    w_dual_bound: float
    w_opt_exact: float | None = None
    er_exact: float | None = None
    er_bound: float | None = None
    both_zero: bool = False
    method: str = "dual_bound"

    @property
    def w_opt(self) -> float:
        return self.w_opt_exact if self.w_opt_exact is not None else self.w_dual_bound

    @property
    def er(self) -> float | None:
        return self.er_exact if self.er_exact is not None else self.er_bound


def empirical_ratio(w_online: float, w_dual_bound: float,
                    w_opt_exact: float | None = None) -> EvaluationReport:
    method = "exact" if w_opt_exact is not None else "dual_bound"
    if w_online <= 0:
        top = w_opt_exact if w_opt_exact is not None else w_dual_bound
        return EvaluationReport(w_online, w_dual_bound, w_opt_exact, None, None,
                                both_zero=(w_online == 0 and top == 0), method=method)
    er_exact = None if w_opt_exact is None else w_opt_exact / w_online
    return EvaluationReport(w_online, w_dual_bound, w_opt_exact, er_exact,
                            w_dual_bound / w_online, method=method)
