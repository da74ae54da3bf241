"""Posted-price mechanism over several resources and time slots.

Customers arrive one at a time.  Each sees, for every resource and every
slot of its job, the price ``phi_k(y_k(t))`` at current utilization, buys the
bundle that maximizes ``valuation - payment`` and is turned away when that
utility is negative or when the bundle would overflow capacity in any slot.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SMALL_DEMAND_CAP = 0.01
CAPACITY_TOL = 1e-12


@dataclass(frozen=True)
class Bundle:
    units: tuple

    def __post_init__(self):
        u = tuple(float(x) for x in self.units)
        if any(x < 0 for x in u):
            raise ValueError(f"negative demand in bundle {u}")
        object.__setattr__(self, "units", u)

    @property
    def is_empty(self) -> bool:
        return all(x == 0 for x in self.units)


def make_catalog(units: Sequence[Sequence[float]], cap: float = SMALL_DEMAND_CAP) -> list:
    """Bundle list with the empty bundle at index 0 (added if missing)."""
    bundles = [Bundle(tuple(u)) for u in units]
    if not bundles or not bundles[0].is_empty:
        k = len(bundles[0].units) if bundles else 1
        bundles.insert(0, Bundle((0.0,) * k))
    big = [b.units for b in bundles if max(b.units) > cap]
    if big:
        warnings.warn(f"bundles above the small-demand cap {cap}: {big}")
    return bundles


@dataclass(frozen=True)
class Customer:
    """Job with a contiguous run of slots and valuations for some bundles.

    ``valuations`` maps bundle index to value; bundles not listed are of no
    interest to the customer and are never offered.
    """

    id: int
    arrival: int
    duration: int
    valuations: dict

    def __post_init__(self):
        if self.duration < 1:
            raise ValueError(f"customer {self.id}: duration must be >= 1")
        if any(v < 0 for v in self.valuations.values()):
            raise ValueError(f"customer {self.id}: negative valuation")

    @property
    def slots(self) -> range:
        return range(self.arrival, self.arrival + self.duration)


@dataclass(frozen=True)
class Decision:
    accepted: bool
    bundle_index: int | None
    payment: float
    utility: float
    reason: str | None = None   # negative_utility | capacity


@dataclass
class LogEntry:
    customer_id: int
    arrival: int
    accepted: bool
    bundle_index: int | None
    payment: float
    utility: float
    valuation: float


@dataclass
class OutcomeLog:
    entries: list = field(default_factory=list)
    utilization: np.ndarray | None = None
    terminal_prices: np.ndarray | None = None
    w_online: float = 0.0

    @property
    def revenue(self) -> float:
        return sum(e.payment for e in self.entries if e.accepted)

    @property
    def accepted_value(self) -> float:
        return sum(e.valuation for e in self.entries if e.accepted)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["customer_id", "arrival", "accepted", "bundle_index", "payment", "utility"])
            for e in self.entries:
                wr.writerow([e.customer_id, e.arrival, int(e.accepted),
                             "" if e.bundle_index is None else e.bundle_index,
                             repr(e.payment), repr(e.utility)])
            wr.writerow(["# w_online", repr(self.w_online)])


def total_cost(costs, utilization: np.ndarray) -> float:
    return float(sum(np.sum(c.cost(utilization[k])) for k, c in enumerate(costs)))


class MechanismState:
    """Utilization matrix y[k, t] plus the pricing function of each resource."""

    def __init__(self, catalog, pricing, costs, horizon: int):
        if len(pricing) != len(costs):
            raise ValueError("need one pricing function per cost model")
        self.catalog = list(catalog)
        self.pricing = list(pricing)
        self.costs = list(costs)
        self.horizon = int(horizon)
        self.K = len(costs)
        if any(len(b.units) != self.K for b in self.catalog):
            raise ValueError("bundle dimension does not match the number of resources")
        self.units = np.array([b.units for b in self.catalog])   # (|B|, K)
        self.y = np.zeros((self.K, self.horizon))
        self.log = OutcomeLog()
        self._last = (-1, -1)
        self._welfare = 0.0

    def quote(self, customer: Customer) -> np.ndarray:
        """Prices p[k, j] for resource k at the j-th slot of the customer's job."""
        a, d = customer.arrival, customer.duration
        if a < 0 or a + d > self.horizon:
            raise ValueError(f"customer {customer.id} slots fall outside [0, {self.horizon})")
        ys = self.y[:, a:a + d]
        return np.vstack([np.atleast_1d(self.pricing[k](ys[k])) for k in range(self.K)])

    def best_bundle(self, customer: Customer, prices: np.ndarray):
        return best_bundle(customer, prices, self.units)

    def process(self, customer: Customer) -> Decision:
        key = (customer.arrival, customer.id)
        if key <= self._last:
            raise ValueError(f"customer {customer.id} processed out of order")
        self._last = key
        prices = self.quote(customer)
        b, pay, util = self.best_bundle(customer, prices)
        if b is None or util < 0:
            dec = Decision(False, None, 0.0, 0.0, "negative_utility")
        else:
            a, d = customer.arrival, customer.duration
            new = self.y[:, a:a + d] + self.units[b][:, None]
            if np.any(new > 1.0 + CAPACITY_TOL):
                dec = Decision(False, None, 0.0, 0.0, "capacity")
            else:
                old_cost = total_cost(self.costs, self.y[:, a:a + d])
                self.y[:, a:a + d] = np.minimum(new, 1.0)
                new_cost = total_cost(self.costs, self.y[:, a:a + d])
                self._welfare += customer.valuations[b] - (new_cost - old_cost)
                dec = Decision(True, b, pay, util)
        self.log.entries.append(LogEntry(
            customer.id, customer.arrival, dec.accepted, dec.bundle_index, dec.payment,
            dec.utility, customer.valuations[dec.bundle_index] if dec.accepted else 0.0))
        return dec

    @property
    def running_welfare(self) -> float:
        return self._welfare

    def finish(self) -> OutcomeLog:
        self.log.utilization = self.y.copy()
        self.log.terminal_prices = self.terminal_prices()
        self.log.w_online = self.log.accepted_value - total_cost(self.costs, self.y)
        return self.log

    def terminal_prices(self) -> np.ndarray:
        return np.vstack([np.atleast_1d(self.pricing[k](self.y[k])) for k in range(self.K)])


def best_bundle(customer: Customer, prices: np.ndarray, units: np.ndarray):
    """Utility-maximizing bundle among those the customer values.

    Returns ``(bundle_index, payment, utility)``, or ``(None, 0, 0)`` when the
    customer values no bundle.  Ties go to the lowest index.
    """
    slot_sums = prices.sum(axis=1)                 # sum over the job's slots, per resource
    best = (None, 0.0, -np.inf)
    for b in sorted(customer.valuations):
        if b == 0:
            continue
        pay = float(units[b] @ slot_sums)
        util = customer.valuations[b] - pay
        if util > best[2]:
            best = (b, pay, util)
    if best[0] is None:
        return None, 0.0, 0.0
    return best


def run(instance, pricing, costs) -> OutcomeLog:
    """Fold the mechanism over the instance in (arrival, id) order."""
    state = MechanismState(instance.catalog, pricing, costs, instance.horizon)
    for c in sorted(instance.customers, key=lambda c: (c.arrival, c.id)):
        state.process(c)
    return state.finish()
