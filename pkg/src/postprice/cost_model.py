"""Convex supply cost models.

Utilization is normalized so that capacity is 1.  Every cost model exposes
the cost itself, the marginal cost, its inverse and the convex conjugate of
the barrier-extended cost (infinite above capacity).  Only the power family
``f(y) = a * y**s`` is implemented concretely.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

DOMAIN_TOL = 1e-12


class CostDomainError(ValueError):
    """Raised when a cost function is evaluated outside its domain."""


def _check_utilization(y):
    y = np.asarray(y, dtype=float)
    if np.any(y < -DOMAIN_TOL) or np.any(y > 1.0 + DOMAIN_TOL):
        raise CostDomainError(f"utilization outside [0, 1]: {y}")
    return np.clip(y, 0.0, 1.0)


def _check_price(p):
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise CostDomainError(f"negative price: {p}")
    return p


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


class CostFunction(ABC):
    """Abstract strictly convex, differentiable cost with f(0) = 0."""

    @abstractmethod
    def cost(self, y): ...

    @abstractmethod
    def marginal(self, y): ...

    @abstractmethod
    def inverse_marginal(self, p, with_flag: bool = False): ...

    @property
    def c_low(self) -> float:
        """Minimum marginal cost f'(0)."""
        return float(self.marginal(0.0))

    @property
    def c_high(self) -> float:
        """Maximum marginal cost f'(1)."""
        return float(self.marginal(1.0))

    def conjugate(self, p):
        """f#(p) = max_{0 <= y <= 1} p*y - f(y)."""
        p = _check_price(p)
        y = self.inverse_marginal(np.clip(p, self.c_low, self.c_high))
        val = np.where(p <= self.c_low, 0.0, p * y - self.cost(y))
        val = np.where(p >= self.c_high, p - self.cost(1.0), val)
        return _out(val)

    def conjugate_derivative(self, p):
        p = _check_price(p)
        y = self.inverse_marginal(np.clip(p, self.c_low, self.c_high))
        val = np.where(p < self.c_low, 0.0, y)
        val = np.where(p >= self.c_high, 1.0, val)
        return _out(val)


@dataclass(frozen=True)
class CostModel(CostFunction):
    """Power supply cost f(y) = a * y**s with a > 0, s > 1."""

    a: float
    s: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"cost scale a must be positive, got {self.a}")
        if not self.s > 1:
            raise ValueError(f"cost exponent s must exceed 1, got {self.s}")

    @property
    def capacity(self) -> float:
        return 1.0

    @property
    def c_low(self) -> float:
        return 0.0

    @property
    def c_high(self) -> float:
        return self.a * self.s

    def cost(self, y):
        y = _check_utilization(y)
        return _out(self.a * y**self.s)

    def marginal(self, y):
        y = _check_utilization(y)
        return _out(self.a * self.s * y ** (self.s - 1.0))

    def inverse_marginal(self, p, with_flag: bool = False):
        """Utilization at which the marginal cost equals ``p``.

        Prices above f'(1) saturate at utilization 1; pass ``with_flag=True``
        to also get a boolean saturation flag.
        """
        p = _check_price(p)
        saturated = p > self.c_high
        y = np.minimum(p / self.c_high, 1.0) ** (1.0 / (self.s - 1.0))
        if with_flag:
            flag = bool(saturated) if np.ndim(p) == 0 else saturated
            return _out(y), flag
        return _out(y)

    def to_dict(self) -> dict:
        return {"a": self.a, "s": self.s}

    @classmethod
    def from_dict(cls, d: dict) -> "CostModel":
        return cls(a=float(d["a"]), s=float(d["s"]))
