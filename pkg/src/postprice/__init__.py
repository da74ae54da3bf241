"""Optimal posted-price mechanisms for online resource allocation with convex supply costs."""

from .cost_model import CostModel
from .mechanism import Bundle, Customer, MechanismState, make_catalog, run
from .oracle import brute_force_opt, dual_upper_bound, empirical_ratio
from .pricing import (PricingFunction, ResourceSetup, benchmark_pricing, classify, make_pricing,
                      optimal_ratio, synthesize_optimal)

__version__ = "0.1.0"

__all__ = ["CostModel", "Bundle", "Customer", "MechanismState", "make_catalog", "run",
           "brute_force_opt", "dual_upper_bound", "empirical_ratio", "PricingFunction",
           "ResourceSetup", "benchmark_pricing", "classify", "make_pricing", "optimal_ratio",
           "synthesize_optimal"]
