"""Command line entry point: synthesize, gen, run, sweep, oracle."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .cost_model import CostModel
from .instances import (GeneratorConfig, TraceError, export, generate, load_trace,
                        preset_setup, validate)
from .mechanism import run
from .oracle import BudgetExceeded, brute_force_opt, dual_upper_bound, empirical_ratio
from .pricing import (ResourceSetup, SynthesisError, classify, make_pricing, optimal_ratio,
                      synthesize_optimal)

EXIT_VALIDATION = 2


def _floats(text: str) -> tuple:
    """Comma list or lo:hi:step range."""
    if ":" in text:
        lo, hi, step = (float(x) for x in text.split(":"))
        n = int(round((hi - lo) / step)) + 1
        return tuple(float(round(lo + i * step, 12)) for i in range(n))
    return tuple(float(x) for x in text.split(",") if x)


def cmd_synthesize(args) -> int:
    cost = CostModel(args.a, args.s)
    p_bar = args.p_bar if args.p_bar is not None else args.p_bar_mult * cost.c_high
    rs = ResourceSetup(cost, p_bar)
    regime = classify(rs)
    pf = synthesize_optimal(rs, args.choice)
    print(f"regime      {regime.tag}")
    print(f"c_bar       {cost.c_high:.10g}")
    print(f"p_bar       {p_bar:.10g}")
    print(f"C_s         {regime.C_s:.10g}  ({regime.C_s / cost.c_high:.6g} c_bar)")
    print(f"alpha_star  {optimal_ratio(rs):.10g}")
    for k, v in pf.describe().items():
        if k not in ("name", "regime", "alpha"):
            print(f"{k:<11} {v:.10g}" if isinstance(v, float) else f"{k:<11} {v}")
    if args.curve:
        pf.to_csv(args.curve, n=args.points)
        print(f"curve written to {args.curve}")
    return 0


def _experiment(args, **over) -> harness.ExperimentConfig:
    if args.config:
        base = harness.config_from_dict(json.loads(Path(args.config).read_text()))
    else:
        base = harness.ExperimentConfig()
    fields = {}
    for name in ("case", "n_instances", "n_customers", "horizon", "mean_duration", "seed",
                 "choice", "oracle", "workers", "p_bar_mult", "delta"):
        val = getattr(args, name, None)
        if val is not None:
            fields[name] = val
    if getattr(args, "mechanisms", None) is not None:
        fields["mechanisms"] = tuple(m.strip().upper() for m in args.mechanisms.split(",")
                                     if m.strip())
    if getattr(args, "preset", None):
        fields["preset"] = args.preset
    fields.update(over)
    return replace(base, **fields)


def cmd_run(args) -> int:
    value = args.p_bar_mult if args.p_bar_mult is not None else 1.0
    cfg = _experiment(args, axis="p_bar", values=(value,))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = harness.run_experiment(cfg)
    harness.write_csv(out / "rows.csv", rows, harness.ROW_FIELDS)
    agg = harness.aggregate(rows)
    harness.write_csv(out / "aggregates.csv", agg, harness.AGG_FIELDS)
    for a in agg:
        print(f"{a['sweep_value']:g}  {a['mechanism']}  mean ER {a['mean_er']:.4f}"
              f"  std {a['std_er']:.4f}  n={a['n']}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _experiment(args, axis=args.axis, values=_floats(args.values))
    res = harness.sweep(cfg, args.out)
    for a in harness.aggregate(res["rows"]):
        print(f"{cfg.axis}={a['sweep_value']:g}  {a['mechanism']}  mean ER {a['mean_er']:.4f}"
              f"  std {a['std_er']:.4f}  n={a['n']}")
    return 0


def cmd_gen(args) -> int:
    setup = preset_setup(args.preset, args.p_bar_mult, args.horizon)
    gc = GeneratorConfig(case=args.case, n_customers=args.n_customers,
                         p_bar_true=setup.p_bars[0], delta=args.delta,
                         mean_duration=args.mean_duration, seed=args.seed)
    inst = generate(gc, setup)
    export(inst, args.out)
    print(f"{len(inst)} customers written to {args.out}")
    return 0


def cmd_oracle(args) -> int:
    setup = preset_setup(args.preset, args.p_bar_mult, None)
    inst = load_trace(args.trace, args.catalog, args.horizon)
    setup = replace(setup, horizon=inst.horizon, catalog=tuple(inst.catalog))
    rep = validate(inst, setup)
    for w in rep.warnings:
        logging.warning(w)
    for v in rep.violations:
        logging.warning("assumption violated: %s", v)
    pf = [make_pricing(args.mechanism, ResourceSetup(c, p), args.choice)
          for c, p in zip(setup.costs, setup.p_bars)]
    lg = run(inst, pf, setup.costs)
    bound = dual_upper_bound(inst, setup.costs, lg.terminal_prices)
    exact = None
    try:
        exact = brute_force_opt(inst, setup.costs, budget=args.budget)
    except BudgetExceeded as exc:
        print(f"exact oracle skipped: {exc}")
    r = empirical_ratio(lg.w_online, bound, exact)
    print(f"w_online     {r.w_online:.10g}")
    if exact is not None:
        print(f"w_opt_exact  {exact:.10g}")
        print(f"er_exact     {r.er_exact}")
    print(f"dual_bound   {bound:.10g}")
    print(f"er_bound     {r.er_bound}")
    if args.log:
        lg.to_csv(args.log)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="postprice", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synthesize", help="optimal pricing function for one resource")
    s.add_argument("--a", type=float, default=0.223)
    s.add_argument("--s", type=float, default=3.0)
    s.add_argument("--p-bar-mult", type=float, default=1.0, help="p_bar as a multiple of c_bar")
    s.add_argument("--p-bar", type=float, default=None, help="absolute p_bar (overrides the multiple)")
    s.add_argument("--choice", type=float, default=0.0, help="0 most conservative, 1 most aggressive")
    s.add_argument("--curve", "--out", dest="curve", default=None, help="write (y, phi) CSV here")
    s.add_argument("--points", type=int, default=201)
    s.set_defaults(func=cmd_synthesize)

    def common(sp):
        sp.add_argument("--config", default=None, help="JSON file with ExperimentConfig fields")
        sp.add_argument("--preset", default=None, choices=["google-cluster-like"])
        sp.add_argument("--case", default=None, choices=["UE", "EE", "UI", "EI"])
        sp.add_argument("--mechanisms", default=None, help="comma list of OP,TP,MP")
        sp.add_argument("--n-instances", type=int, default=None)
        sp.add_argument("--n-customers", type=int, default=None)
        sp.add_argument("--horizon", type=int, default=None)
        sp.add_argument("--mean-duration", type=float, default=None)
        sp.add_argument("--choice", type=float, default=None)
        sp.add_argument("--oracle", default=None, choices=["dual", "exact"])
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", required=True, help="output directory")

    r = sub.add_parser("run", help="batch of seeded instances at one p_bar")
    common(r)
    r.add_argument("--p-bar-mult", type=float, default=None)
    r.add_argument("--delta", type=float, default=None)
    r.set_defaults(func=cmd_run)

    w = sub.add_parser("sweep", help="sweep p_bar or delta")
    common(w)
    w.add_argument("--axis", choices=["p_bar", "delta"], default="p_bar")
    w.add_argument("--values", default="1:9:1", help="comma list or lo:hi:step")
    w.add_argument("--p-bar-mult", type=float, default=None, help="fixed p_bar for delta sweeps")
    w.add_argument("--delta", type=float, default=None)
    w.set_defaults(func=cmd_sweep)

    g = sub.add_parser("gen", help="write a synthetic trace and its catalog")
    g.add_argument("--preset", default="google-cluster-like", choices=["google-cluster-like"])
    g.add_argument("--case", default="UE", choices=["UE", "EE", "UI", "EI"])
    g.add_argument("--p-bar-mult", type=float, default=1.0)
    g.add_argument("--delta", type=float, default=0.0)
    g.add_argument("--n-customers", type=int, default=harness.ExperimentConfig.n_customers)
    g.add_argument("--horizon", type=int, default=None)
    g.add_argument("--mean-duration", type=float, default=harness.ExperimentConfig.mean_duration)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="trace CSV path (catalog goes next to it)")
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("oracle", help="online welfare, exact optimum and dual bound for a trace")
    o.add_argument("--trace", required=True)
    o.add_argument("--catalog", default=None)
    o.add_argument("--horizon", type=int, default=None)
    o.add_argument("--preset", default="google-cluster-like", choices=["google-cluster-like"])
    o.add_argument("--p-bar-mult", type=float, default=1.0)
    o.add_argument("--mechanism", default="OP", choices=["OP", "TP", "MP"])
    o.add_argument("--choice", type=float, default=0.0)
    o.add_argument("--budget", type=float, default=40.0)
    o.add_argument("--log", "--out", dest="log", default=None, help="write the outcome log CSV here")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, TraceError, SynthesisError, BudgetExceeded, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
