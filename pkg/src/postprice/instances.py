"""Arrival instances: data model, synthetic generators and trace files.

A synthetic customer draws one bundle uniformly from the catalog, a
per-unit-per-slot valuation ``p`` and a job duration; its valuation for the
bundle is ``p * duration * r_1`` (the first resource is the one whose PUV is
modeled).
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import stats

from .cost_model import CostModel
from .mechanism import SMALL_DEMAND_CAP, Customer, make_catalog

log = logging.getLogger(__name__)

CASES = ("UE", "EE", "UI", "EI")
DELTA_RANGE = (-0.8, 2.4)
PUV_TOL = 1e-9
TRACE_HEADER = ["customer_id", "arrival_slot", "duration_slots", "bundle_index", "valuation"]


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class Setup:
    """Per-resource cost models and PUV bounds, the bundle catalog and the horizon."""

    costs: tuple
    p_bars: tuple
    catalog: tuple
    horizon: int

    @property
    def K(self) -> int:
        return len(self.costs)

    def with_p_bar(self, p_bar: float) -> "Setup":
        """Rescale every PUV bound so the first resource's bound becomes ``p_bar``."""
        return replace(self, p_bars=derived_p_bars(p_bar, self.catalog))


def derived_p_bars(p_bar: float, catalog) -> tuple:
    """PUV bounds for all resources when valuations are ``p * |T| * r_1``.

    A customer's per-unit valuation for resource k is ``p * r_1 / r_k``, so
    the tightest bound is ``p_bar * max_b r_1^b / r_k^b``.
    """
    units = np.array([b.units for b in catalog if not b.is_empty])
    out = [float(p_bar)]
    for k in range(1, units.shape[1]):
        out.append(float(p_bar * np.max(units[:, 0] / units[:, k])))
    return tuple(out)


# desk-scale preset; the cost parameters and catalog follow the usual
# two-resource cloud setup (CPU, RAM)
GOOGLE_CLUSTER_LIKE = {
    "costs": ((0.223, 3.0), (8.38e-6, 1.2)),
    "levels": (0.001, 0.003, 0.005),
    "horizon": 600,
    "n_customers": 500,
    "n_instances": 100,
    "mean_duration": 1200.0,
}


def preset_setup(name: str = "google-cluster-like", p_bar_mult: float = 1.0,
                 horizon: int | None = None) -> Setup:
    if name != "google-cluster-like":
        raise ValueError(f"unknown preset {name!r}")
    pr = GOOGLE_CLUSTER_LIKE
    costs = tuple(CostModel(a, s) for a, s in pr["costs"])
    levels = pr["levels"]
    catalog = tuple(make_catalog([(r1, r2) for r1 in levels for r2 in levels]))
    p_bar = p_bar_mult * costs[0].c_high
    return Setup(costs, derived_p_bars(p_bar, catalog), catalog,
                 pr["horizon"] if horizon is None else horizon)


@dataclass
class ArrivalInstance:
    customers: list
    catalog: list
    horizon: int
    p_bar_estimate: tuple | None = None   # bounds the mechanism designs for (UI/EI)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = [c.arrival for c in self.customers]
        if any(a > b for a, b in zip(arr, arr[1:])):
            raise ValueError("arrival times must be nondecreasing")
        for c in self.customers:
            if c.arrival < 0 or c.arrival + c.duration > self.horizon:
                raise ValueError(f"customer {c.id} slots fall outside [0, {self.horizon})")

    def __len__(self):
        return len(self.customers)

    def same_as(self, other: "ArrivalInstance") -> bool:
        return (self.horizon == other.horizon
                and [b.units for b in self.catalog] == [b.units for b in other.catalog]
                and [(c.id, c.arrival, c.duration, c.valuations) for c in self.customers]
                == [(c.id, c.arrival, c.duration, c.valuations) for c in other.customers])


@dataclass(frozen=True)
class GeneratorConfig:
    case: str = "UE"
    n_customers: int = 500
    p_bar_true: float = 1.0
    delta: float = 0.0
    puv_distribution: str = "uniform"    # or truncated_normal
    mu: float | None = None
    sigma: float | None = None
    mean_duration: float = 30.0
    seed: int = 0

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}, got {self.case!r}")
        if self.n_customers < 0:
            raise ValueError("n_customers must be nonnegative")
        if not self.p_bar_true > 0:
            raise ValueError("p_bar_true must be positive")
        lo, hi = DELTA_RANGE
        if not lo - 1e-12 <= self.delta <= hi + 1e-12:
            raise ValueError(f"delta must lie in [{lo}, {hi}], got {self.delta}")
        if self.puv_distribution not in ("uniform", "truncated_normal"):
            raise ValueError(f"unknown PUV distribution {self.puv_distribution!r}")
        if self.puv_distribution == "truncated_normal":
            if self.sigma is None or not self.sigma > 0:
                raise ValueError("truncated_normal needs sigma > 0")
            if self.mu is None:
                raise ValueError("truncated_normal needs mu")
        if not self.mean_duration >= 1:
            raise ValueError("mean_duration must be >= 1")

    @property
    def p_bar_estimate(self) -> float:
        if self.case in ("UI", "EI"):
            return self.p_bar_true * (1.0 + self.delta)
        return self.p_bar_true


def draw_puv(rng: np.random.Generator, n: int, lo: float, hi: float,
             cfg: GeneratorConfig) -> np.ndarray:
    if n == 0:
        return np.empty(0)
    if cfg.puv_distribution == "uniform":
        x = rng.uniform(lo, hi, n)
    else:
        a, b = (lo - cfg.mu) / cfg.sigma, (hi - cfg.mu) / cfg.sigma
        x = stats.truncnorm.rvs(a, b, loc=cfg.mu, scale=cfg.sigma, size=n, random_state=rng)
    return np.clip(x, lo, hi)


def generate(cfg: GeneratorConfig, setup: Setup) -> ArrivalInstance:
    rng = np.random.default_rng(cfg.seed)
    n, T, p_bar = cfg.n_customers, setup.horizon, cfg.p_bar_true
    if cfg.case in ("UE", "UI"):
        p = draw_puv(rng, n, 0.0, p_bar, cfg)
    else:
        half = n // 2
        p = np.concatenate((draw_puv(rng, half, 0.0, p_bar / 2.0, cfg),
                            draw_puv(rng, n - half, p_bar / 2.0, p_bar, cfg)))
    # Poisson arrivals conditioned on the count are sorted uniforms
    arrivals = np.sort(np.floor(rng.uniform(0.0, T, n)).astype(int))
    dur = rng.geometric(1.0 / cfg.mean_duration, n)
    dur = np.minimum(dur, T - arrivals)
    bundle_ids = rng.integers(1, len(setup.catalog), n)
    customers = []
    for i in range(n):
        b = int(bundle_ids[i])
        r1 = setup.catalog[b].units[0]
        v = float(p[i] * dur[i] * r1)
        customers.append(Customer(i, int(arrivals[i]), int(dur[i]), {b: v}))
    est = derived_p_bars(cfg.p_bar_estimate, setup.catalog)
    return ArrivalInstance(customers, list(setup.catalog), T, est,
                           {"case": cfg.case, "seed": cfg.seed, "p_bar_true": p_bar})


def truncated_normal_mean(mu: float, sigma: float, lo: float, hi: float) -> float:
    a, b = (lo - mu) / sigma, (hi - mu) / sigma
    return float(stats.truncnorm.mean(a, b, loc=mu, scale=sigma))


# --------------------------------------------------------------------------
# trace files
# --------------------------------------------------------------------------

def export(instance: ArrivalInstance, path, catalog_path=None) -> None:
    path = Path(path)
    catalog_path = Path(catalog_path) if catalog_path else _catalog_path(path)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(TRACE_HEADER)
        for c in instance.customers:
            for b, v in sorted(c.valuations.items()):
                wr.writerow([c.id, c.arrival, c.duration, b, repr(float(v))])
    K = len(instance.catalog[0].units)
    with open(catalog_path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["bundle_index"] + [f"r_{k + 1}" for k in range(K)])
        for i, b in enumerate(instance.catalog):
            wr.writerow([i] + [repr(x) for x in b.units])


def _catalog_path(path: Path) -> Path:
    return path.with_name(path.stem + "_catalog.csv")


def load_catalog(path) -> list:
    rows = []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if not header or header[0] != "bundle_index":
            raise TraceError(f"{path}:1: expected header bundle_index,r_1,...")
        for lineno, row in enumerate(rd, start=2):
            try:
                idx = int(row[0])
                units = tuple(float(x) for x in row[1:])
            except (ValueError, IndexError) as exc:
                raise TraceError(f"{path}:{lineno}: {exc}") from exc
            if idx != len(rows):
                raise TraceError(f"{path}:{lineno}: bundle indices must be 0, 1, 2, ...")
            rows.append(units)
    return make_catalog(rows)


def load_trace(path, catalog_path=None, horizon: int | None = None) -> ArrivalInstance:
    """Read a trace CSV (one row per customer and valued bundle) and its catalog."""
    path = Path(path)
    catalog = load_catalog(catalog_path or _catalog_path(path))
    by_id: dict = {}
    order = []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if header != TRACE_HEADER:
            raise TraceError(f"{path}:1: expected header {','.join(TRACE_HEADER)}")
        for lineno, row in enumerate(rd, start=2):
            if not row:
                continue
            try:
                cid, arr, dur, b = (int(x) for x in row[:4])
                v = float(row[4])
            except (ValueError, IndexError) as exc:
                raise TraceError(f"{path}:{lineno}: {exc}") from exc
            if not 0 <= b < len(catalog):
                raise TraceError(f"{path}:{lineno}: unknown bundle index {b}")
            if cid in by_id:
                if by_id[cid][:2] != (arr, dur):
                    raise TraceError(f"{path}:{lineno}: customer {cid} has conflicting slots")
                by_id[cid][2][b] = v
            else:
                by_id[cid] = (arr, dur, {b: v})
                order.append(cid)
    customers = [Customer(cid, by_id[cid][0], by_id[cid][1], by_id[cid][2]) for cid in order]
    arr = [c.arrival for c in customers]
    if any(a > b for a, b in zip(arr, arr[1:])):
        log.warning("%s: arrival times decrease; re-sorting stably", path)
        customers.sort(key=lambda c: c.arrival)
    if horizon is None:
        horizon = max((c.arrival + c.duration for c in customers), default=0)
    return ArrivalInstance(customers, catalog, horizon)


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

@dataclass
class ValidationReport:
    ok: bool
    violations: list
    warnings: list


def validate(instance: ArrivalInstance, setup: Setup,
             demand_cap: float = SMALL_DEMAND_CAP) -> ValidationReport:
    """List PUV-bound violations (errors) and oversize bundles (warnings)."""
    violations, warns = [], []
    for i, b in enumerate(instance.catalog):
        if max(b.units) > demand_cap:
            warns.append(f"bundle {i} exceeds the small-demand cap {demand_cap}: {b.units}")
    for c in instance.customers:
        if c.arrival + c.duration > instance.horizon:
            violations.append(f"customer {c.id}: slots beyond the horizon")
        for bi, v in c.valuations.items():
            if bi == 0:
                if v != 0:
                    violations.append(f"customer {c.id}: nonzero value for the empty bundle")
                continue
            for k, r in enumerate(instance.catalog[bi].units):
                if r == 0:
                    continue
                puv = v / (c.duration * r)
                bound = setup.p_bars[k]
                if puv > bound * (1.0 + PUV_TOL) + PUV_TOL:
                    violations.append(
                        f"customer {c.id}, bundle {bi}, resource {k}: "
                        f"PUV {puv:.6g} exceeds {bound:.6g}")
    return ValidationReport(not violations, violations, warns)


def single_slot_instance(rng: np.random.Generator, n: int, catalog, p_bars,
                         multi_bundle: bool = False) -> ArrivalInstance:
    """Small one-slot instance with PUVs uniform under every resource bound.

    Used by the exact-oracle checks; with ``multi_bundle`` each customer
    values every nonempty bundle.
    """
    customers = []
    nb = len(catalog)
    for i in range(n):
        choices = range(1, nb) if multi_bundle else [int(rng.integers(1, nb))]
        vals = {}
        for b in choices:
            units = np.array(catalog[b].units)
            cap = min(p * r for p, r in zip(p_bars, units) if r > 0)
            vals[b] = float(rng.uniform(0.0, 1.0) * cap)
        customers.append(Customer(i, 0, 1, vals))
    return ArrivalInstance(customers, list(catalog), 1, tuple(p_bars))
