import json

import numpy as np
import pytest

from postprice import harness
from postprice.cli import main
from postprice.harness import ExperimentConfig

SMALL = dict(n_customers=40, horizon=60, mean_duration=30.0, n_instances=2)
SMALL_ARGS = ["--n-customers", "40", "--horizon", "60", "--mean-duration", "30",
              "--n-instances", "2"]


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(mechanisms=())
    with pytest.raises(ValueError):
        ExperimentConfig(mechanisms=("OP", "XX"))
    with pytest.raises(ValueError):
        ExperimentConfig(n_instances=0)
    with pytest.raises(ValueError):
        ExperimentConfig(axis="delta", values=(2.5,))
    with pytest.raises(ValueError):
        harness.config_from_dict({"bogus": 1})
    cfg = ExperimentConfig(values=(1.0, 2.0), **SMALL)
    assert harness.config_from_dict(json.loads(json.dumps(harness.config_to_dict(cfg)))) == cfg


def test_run_one_instance_one_mechanism():
    cfg = ExperimentConfig(mechanisms=("OP",), values=(3.0,), n_customers=40, horizon=60,
                           mean_duration=30.0, n_instances=1)
    rows = harness.run_experiment(cfg)
    agg = harness.aggregate(rows)
    assert len(rows) == 1 and len(agg) == 1
    assert rows[0]["er"] >= 1 - 1e-9


def test_exact_oracle_rows():
    cfg = ExperimentConfig(values=(3.0,), n_customers=6, horizon=10, mean_duration=3.0,
                           n_instances=3, oracle="exact")
    rows = harness.run_experiment(cfg)
    assert all(r["w_opt_kind"] == "exact" for r in rows)
    assert all(r["er"] >= 1 - 1e-9 for r in rows if not np.isnan(r["er"]))


def test_csv_roundtrip_regenerates_aggregates(tmp_path):
    cfg = ExperimentConfig(values=(2.0, 5.0), **SMALL)
    res = harness.sweep(cfg, tmp_path)
    rows = []
    for p in res["points"].values():
        rows.extend(harness.read_rows(p))
    again = harness.aggregate(rows)
    orig = harness.aggregate(res["rows"])
    assert again == orig
    text = (tmp_path / "aggregates.csv").read_text().splitlines()
    assert text[0] == ",".join(harness.AGG_FIELDS)
    series = (tmp_path / "utilization.csv").read_text().splitlines()
    assert series[0] == ",".join(harness.SERIES_FIELDS)
    assert len(series) == 1 + 3 * 2 * 60


def test_parallel_matches_serial():
    cfg = ExperimentConfig(values=(3.0,), **SMALL)
    a = harness.run_experiment(cfg)
    b = harness.run_experiment(ExperimentConfig(values=(3.0,), workers=2, **SMALL))
    assert a == b


def test_utilization_ordering_flagged_instance():
    # with binding capacity the myopic curve sells the most
    cfg = ExperimentConfig(values=(3.0,), n_customers=500, horizon=600, n_instances=1)
    rows = harness.utilization_series(cfg, 3.0)
    peak = {m: max(r["utilization"] for r in rows if r["mechanism"] == m and r["resource"] == 1)
            for m in harness.MECHANISMS}
    assert peak["MP"] >= peak["OP"] - 1e-12


# ---------------------------------------------------------------- CLI

def test_cli_synthesize(capsys, tmp_path):
    assert main(["synthesize", "--a", "0.223", "--s", "3", "--p-bar-mult", "3"]) == 0
    out = capsys.readouterr().out
    assert "regime      HUC1" in out and "5.196152" in out
    assert main(["synthesize", "--p-bar-mult", "1"]) == 0
    out = capsys.readouterr().out
    assert "regime      LUC" in out and "5.196152" in out
    curve = tmp_path / "c.csv"
    assert main(["synthesize", "--p-bar-mult", "9", "--curve", str(curve)]) == 0
    out = capsys.readouterr().out
    assert "regime      HUC2" in out
    alpha = float(next(l for l in out.splitlines() if l.startswith("alpha_star")).split()[1])
    assert alpha > 5.19616
    assert curve.read_text().startswith("y,phi")


def test_cli_run_deterministic(tmp_path):
    args = ["run", "--p-bar-mult", "3", "--seed", "4", *SMALL_ARGS]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("rows.csv", "aggregates.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    head = (tmp_path / "a" / "rows.csv").read_text().splitlines()[0]
    assert head == "sweep_value,mechanism,seed,w_online,w_opt_kind,w_opt,er"


def test_cli_sweep_and_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_customers": 30, "horizon": 40, "mean_duration": 10.0,
                               "n_instances": 1, "case": "UE"}))
    assert main(["sweep", "--config", str(cfg), "--axis", "delta", "--values=-0.4,0.8",
                 "--p-bar-mult", "3", "--out", str(tmp_path / "s")]) == 0
    assert (tmp_path / "s" / "rows_delta_-0.4.csv").exists()
    assert (tmp_path / "s" / "utilization.csv").exists()


def test_cli_gen_and_oracle(tmp_path, capsys):
    trace = tmp_path / "t.csv"
    assert main(["gen", "--n-customers", "8", "--horizon", "5", "--mean-duration", "2",
                 "--p-bar-mult", "3", "--out", str(trace)]) == 0
    log = tmp_path / "log.csv"
    assert main(["oracle", "--trace", str(trace), "--horizon", "5", "--p-bar-mult", "3",
                 "--log", str(log)]) == 0
    out = capsys.readouterr().out
    assert "w_opt_exact" in out and "dual_bound" in out
    assert log.read_text().startswith("customer_id,")


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["sweep", "--axis", "delta", "--values", "3.0", "--out", str(tmp_path)]) == 2
    assert main(["run", "--mechanisms", ",", "--out", str(tmp_path)]) == 2
    assert main(["synthesize", "--s", "1.0"]) == 2
    assert main(["oracle", "--trace", str(tmp_path / "missing.csv")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == 2
