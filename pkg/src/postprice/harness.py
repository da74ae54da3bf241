"""Experiment driver: seeded batches, sweeps and CSV output.

Every instance is run under all benchmark mechanisms so the dual bound (the
smallest dual objective over the mechanisms' terminal price tables) does not
depend on which mechanisms a report includes.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .instances import GeneratorConfig, Setup, generate, preset_setup, GOOGLE_CLUSTER_LIKE
from .mechanism import run
from .oracle import brute_force_opt, dual_upper_bound, empirical_ratio
from .pricing import DEFAULT_GRID, ResourceSetup, make_pricing

MECHANISMS = ("OP", "TP", "MP")
ROW_FIELDS = ["sweep_value", "mechanism", "seed", "w_online", "w_opt_kind", "w_opt", "er"]
AGG_FIELDS = ["sweep_value", "mechanism", "mean_er", "std_er", "n"]


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str = "google-cluster-like"
    case: str = "UE"
    mechanisms: tuple = MECHANISMS
    axis: str = "p_bar"                       # p_bar (multiples of c_bar) or delta
    values: tuple = (1.0,)
    p_bar_mult: float = 1.0                   # fixed p_bar when sweeping delta
    delta: float = 0.0                        # fixed delta when sweeping p_bar
    n_instances: int = GOOGLE_CLUSTER_LIKE["n_instances"]
    n_customers: int = GOOGLE_CLUSTER_LIKE["n_customers"]
    horizon: int = GOOGLE_CLUSTER_LIKE["horizon"]
    mean_duration: float = GOOGLE_CLUSTER_LIKE["mean_duration"]
    puv_distribution: str = "uniform"
    mu: float | None = None
    sigma: float | None = None
    seed: int = 0
    choice: float = 0.0
    oracle: str = "dual"                      # dual or exact
    budget: float = 40.0
    grid_size: int = DEFAULT_GRID
    workers: int = 1

    def __post_init__(self):
        if not self.mechanisms:
            raise ValueError("mechanisms list is empty")
        bad = [m for m in self.mechanisms if m not in MECHANISMS]
        if bad:
            raise ValueError(f"unknown mechanisms {bad}; choose from {MECHANISMS}")
        if self.n_instances < 1:
            raise ValueError("n_instances must be >= 1")
        if self.axis not in ("p_bar", "delta"):
            raise ValueError(f"unknown sweep axis {self.axis!r}")
        if self.oracle not in ("dual", "exact"):
            raise ValueError(f"unknown oracle {self.oracle!r}")
        if self.axis == "delta":
            for d in self.values:
                if not -0.8 - 1e-12 <= d <= 2.4 + 1e-12:
                    raise ValueError(f"delta {d} outside [-0.8, 2.4]")
        elif any(not v > 0 for v in self.values):
            raise ValueError("p_bar multiples must be positive")

    def point(self, value: float) -> tuple:
        """(p_bar_mult, delta) at one sweep point."""
        if self.axis == "p_bar":
            return float(value), self.delta
        return self.p_bar_mult, float(value)


# pricing curves are pure functions of their parameters; each worker process
# keeps its own cache
_PRICING_CACHE: dict = {}


def pricing_for(mech: str, setup: Setup, p_bars, choice: float, grid_size: int):
    key = (mech, setup.costs, tuple(p_bars), choice, grid_size)
    if key not in _PRICING_CACHE:
        _PRICING_CACHE[key] = [
            make_pricing(mech, ResourceSetup(c, p), choice, "tabulated", grid_size)
            for c, p in zip(setup.costs, p_bars)]
    return _PRICING_CACHE[key]


def instance_config(cfg: ExperimentConfig, value: float, index: int) -> tuple:
    mult, delta = cfg.point(value)
    setup = preset_setup(cfg.preset, mult, cfg.horizon)
    case = cfg.case
    if cfg.axis == "delta" and case in ("UE", "EE"):
        case = {"UE": "UI", "EE": "EI"}[case]
    gc = GeneratorConfig(case=case, n_customers=cfg.n_customers, p_bar_true=setup.p_bars[0],
                         delta=delta, puv_distribution=cfg.puv_distribution,
                         mu=None if cfg.mu is None else cfg.mu * setup.p_bars[0],
                         sigma=None if cfg.sigma is None else cfg.sigma * setup.p_bars[0],
                         mean_duration=cfg.mean_duration, seed=cfg.seed + index)
    return setup, gc


def evaluate_instance(instance, setup: Setup, cfg: ExperimentConfig, keep_logs: bool = False):
    """Run every benchmark mechanism; return per-mechanism (w_online, report) and logs."""
    design = instance.p_bar_estimate or setup.p_bars
    logs = {}
    for mech in MECHANISMS:
        pf = pricing_for(mech, setup, design, cfg.choice, cfg.grid_size)
        logs[mech] = run(instance, pf, setup.costs)
    bound = min(dual_upper_bound(instance, setup.costs, lg.terminal_prices)
                for lg in logs.values())
    exact = None
    if cfg.oracle == "exact":
        exact = brute_force_opt(instance, setup.costs, budget=cfg.budget)
    reports = {m: empirical_ratio(logs[m].w_online, bound, exact) for m in cfg.mechanisms}
    return reports, (logs if keep_logs else None)


def _point_job(args):
    cfg, value, index = args
    setup, gc = instance_config(cfg, value, index)
    inst = generate(gc, setup)
    reports, _ = evaluate_instance(inst, setup, cfg)
    rows = []
    for mech in cfg.mechanisms:
        rep = reports[mech]
        rows.append({"sweep_value": value, "mechanism": mech, "seed": gc.seed,
                     "w_online": rep.w_online, "w_opt_kind": rep.method,
                     "w_opt": rep.w_opt, "er": rep.er if rep.er is not None else math.nan})
    return rows


def run_point(cfg: ExperimentConfig, value: float) -> list:
    jobs = [(cfg, value, i) for i in range(cfg.n_instances)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            chunks = list(ex.map(_point_job, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    else:
        chunks = [_point_job(j) for j in jobs]
    return [r for ch in chunks for r in ch]


def run_experiment(cfg: ExperimentConfig) -> list:
    rows = []
    for v in cfg.values:
        rows.extend(run_point(cfg, v))
    return rows


def aggregate(rows) -> list:
    groups: dict = {}
    for r in rows:
        groups.setdefault((float(r["sweep_value"]), r["mechanism"]), []).append(float(r["er"]))
    out = []
    for (v, m), ers in groups.items():
        a = np.array([e for e in ers if not math.isnan(e)])
        out.append({"sweep_value": v, "mechanism": m,
                    "mean_er": float(a.mean()) if len(a) else math.nan,
                    "std_er": float(a.std(ddof=1)) if len(a) > 1 else 0.0,
                    "n": len(a)})
    return out


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return x


def write_csv(path, rows, fields) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=fields)
        wr.writeheader()
        for r in rows:
            wr.writerow({k: _fmt(r[k]) for k in fields})


def read_rows(path) -> list:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        r["sweep_value"] = float(r["sweep_value"])
        r["seed"] = int(r["seed"])
        for k in ("w_online", "w_opt", "er"):
            r[k] = float(r[k])
    return rows


def utilization_series(cfg: ExperimentConfig, value: float, index: int = 0) -> list:
    """Per-slot utilization of each mechanism on one instance."""
    setup, gc = instance_config(cfg, value, index)
    inst = generate(gc, setup)
    _, logs = evaluate_instance(inst, setup, cfg, keep_logs=True)
    rows = []
    for mech in cfg.mechanisms:
        y = logs[mech].utilization
        for k in range(y.shape[0]):
            for t in range(y.shape[1]):
                rows.append({"sweep_value": value, "mechanism": mech, "resource": k + 1,
                             "slot": t, "utilization": float(y[k, t])})
    return rows


SERIES_FIELDS = ["sweep_value", "mechanism", "resource", "slot", "utilization"]


def sweep(cfg: ExperimentConfig, out_dir, flag_value: float | None = None) -> dict:
    """One row file per sweep point, an aggregate file and a utilization series."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    all_rows = []
    paths = {}
    for v in cfg.values:
        rows = run_point(cfg, v)
        p = out / f"rows_{cfg.axis}_{v:g}.csv"
        write_csv(p, rows, ROW_FIELDS)
        paths[v] = p
        all_rows.extend(rows)
    write_csv(out / "aggregates.csv", aggregate(all_rows), AGG_FIELDS)
    flag = cfg.values[0] if flag_value is None else flag_value
    write_csv(out / "utilization.csv", utilization_series(cfg, flag), SERIES_FIELDS)
    return {"rows": all_rows, "points": paths}


def config_to_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["mechanisms"] = list(cfg.mechanisms)
    d["values"] = list(cfg.values)
    return d


def config_from_dict(d: dict) -> ExperimentConfig:
    d = dict(d)
    if "mechanisms" in d:
        d["mechanisms"] = tuple(d["mechanisms"])
    if "values" in d:
        d["values"] = tuple(float(v) for v in d["values"])
    unknown = set(d) - set(ExperimentConfig.__dataclass_fields__)
    if unknown:
        raise ValueError(f"unknown config fields {sorted(unknown)}")
    return ExperimentConfig(**d)
