import json

import numpy as np
import pytest

import nlagg.experiment as experiment
from nlagg.cli import main
from nlagg.core import ConfigurationError, Metric, split
from nlagg.experiment import (ColumnStat, ExperimentConfig, ExperimentResult, RunError,
                              emit_sweep, emit_table, oracle_bridge, rep_rng, run_experiment,
                              run_repetition, thm2_sweep)
from nlagg.knn import EnsembleSpec
from nlagg.oracles import exact_match_aggregate

SMALL_HD = dict(n=80, k=60, dim=10, reps=4)


def test_highdim_fixed_layout():
    cfg = ExperimentConfig.for_scenario("highdim-fixed", **SMALL_HD)
    rows = run_repetition(cfg, 0)
    names = [r[0] for r in rows]
    assert names[:2] == ["g_T", "g_T"] and [r[1] for r in rows[:2]] == [0.0, 0.25]
    assert names[2:10] == [f"g_{m}k" for m in range(1, 9)]
    assert names[10:] == [f"g_{m}k[k]" for m in range(1, 9)]
    assert all(0 <= r[2] <= 1 for r in rows)


def test_functional_layout():
    cfg = ExperimentConfig.for_scenario("functional-I", reps=2)
    names = [r[0] for r in run_repetition(cfg, 0)]
    assert names.count("g_T") == 3
    assert [n for n in names if not n.endswith("[k]") and n != "g_T"] == [
        f"g_{m}k" for m in range(1, 6)]


def test_highdim_random_layout():
    cfg = ExperimentConfig.for_scenario("highdim-random", n=300, k=200, dim=10, reps=2)
    names = [r[0] for r in run_repetition(cfg, 1)]
    assert names == ["g_T"] * 3 + ["gcv_n", "gcv_k"]


def test_repetition_deterministic():
    cfg = ExperimentConfig.for_scenario("functional-I", reps=1)
    assert run_repetition(cfg, 3) == run_repetition(cfg, 3)
    assert run_repetition(cfg, 3) != run_repetition(cfg, 4)


def test_alpha_zero_column_is_exact_match():
    cfg = ExperimentConfig.for_scenario("functional-I", reps=1, alphas=(0.0,))
    err = run_repetition(cfg, 5)[0][2]
    # rebuild the same repetition by hand with the exact-match voting rule
    rng = rep_rng(cfg.seed, 5)
    train, test, metric = experiment._draw(cfg, rng)
    sp = split(train, cfg.k)
    ens = cfg.ensemble.build(sp.d_k, metric, rng)
    pool = ens.predict_all(sp.e_l.x)
    q = ens.predict_all(test.x)
    pred = [int(exact_match_aggregate(p, pool, sp.e_l.y) > 0.5) for p in q]
    assert err == np.mean(np.array(pred) != test.y)


def test_constant_rows_have_zero_std_error(monkeypatch):
    monkeypatch.setattr(experiment, "run_repetition", lambda cfg, r: [("g_T", 0.0, 0.125)])
    res = run_experiment(ExperimentConfig.for_scenario("functional-I", reps=3))
    assert res.columns == [ColumnStat("g_T", 0.0, 0.125, 0.0, 3)]


def test_failed_repetitions(monkeypatch):
    def boom(cfg, r):
        raise ConfigurationError("too few minority points")
    monkeypatch.setattr(experiment, "run_repetition", boom)
    with pytest.raises(RunError):
        run_experiment(ExperimentConfig.for_scenario("functional-I", reps=2))


def test_thread_count_does_not_change_results():
    cfg = ExperimentConfig.for_scenario("highdim-random", n=200, k=150, dim=5, reps=6)
    a = emit_table(run_experiment(cfg, threads=1))
    b = emit_table(run_experiment(cfg, threads=4))
    assert a == b


@pytest.mark.parametrize("bad", [dict(k=0), dict(k=80), dict(reps=0), dict(alphas=(1.0,)),
                                 dict(test_size=-1)])
def test_config_validation(bad):
    kw = dict(SMALL_HD, **bad)
    with pytest.raises(ConfigurationError):
        ExperimentConfig.for_scenario("highdim-fixed", **kw)


def _result(n_cols):
    cfg = ExperimentConfig.for_scenario("highdim-fixed", reps=1)
    cols = [ColumnStat("g_T", 0.0, 0.046, 0.001, 500), ColumnStat("g_T", 0.25, 0.056, 0.001, 500)]
    cols += [ColumnStat(f"g_{m}k", None, 0.07, 0.002, 500) for m in range(1, 9)]
    return ExperimentResult(cfg, cols[:n_cols])


def test_emit_minimal_csv():
    text = emit_table(_result(1), "csv")
    assert text.splitlines() == [
        "classifier,alpha,mean_error,std_error,reps,n,k,seed",
        "g_T,0.0000,0.0460,0.0010,500,400,300,0",
    ]


def test_emit_table1_shape(tmp_path):
    out = tmp_path / "t1.csv"
    text = emit_table(_result(10), "csv", out)
    assert len(text.splitlines()) == 11
    assert out.read_text() == text
    manifest = json.loads((tmp_path / "t1.csv.manifest.json").read_text())
    assert manifest["scenario"] == "highdim-fixed" and manifest["alphas"] == ["0", "1/4"]
    assert emit_table(_result(10), "csv") == text


def test_emit_text_has_manifest():
    lines = emit_table(_result(3), "text").splitlines()
    assert json.loads(lines[0])["n"] == 400
    assert lines[1].split() == ["classifier", "alpha", "mean_error", "std_error", "reps", "n",
                                "k", "seed"]
    with pytest.raises(ConfigurationError):
        emit_table(_result(3), "xml")


def test_emit_unwritable(tmp_path):
    with pytest.raises(OSError):
        emit_table(_result(2), "csv", tmp_path / "missing" / "x.csv")


SWEEP = dict(k=100, test_size=20_000)


def test_sweep_single_l():
    cfg = ExperimentConfig.for_scenario("thm2-sweep", l_values=(500,), **SWEEP)
    rep = thm2_sweep(cfg)
    assert len(rep.rows) == 1
    assert len(emit_sweep(rep).splitlines()) == 2


def test_sweep_single_classifier():
    cfg = ExperimentConfig.for_scenario("thm2-sweep", l_values=(20_000,),
                                        ensemble=EnsembleSpec("fixed-list", (5,)), **SWEEP)
    row = thm2_sweep(cfg).rows[0]
    # one classifier: the pool can only keep or flip each of its two cells
    assert row.limit_risk <= row.min_base_risk + 1e-12
    assert row.gap <= 0.01
    assert abs(row.risk_gT - row.limit_risk) <= 0.01


def test_oracle_bridge():
    cfg = ExperimentConfig.for_scenario("oracle-bridge")
    row = oracle_bridge(cfg).rows[0]
    assert row.l == 50_000
    assert abs(row.risk_gT_kept - row.limit_risk_kept) <= 0.005
    assert abs(row.risk_gT - row.limit_risk) <= 0.005 + row.excluded_mass


# --- CLI --------------------------------------------------------------------

def test_cli_csv_to_file(tmp_path):
    out = tmp_path / "f.csv"
    assert main(["functional-I", "--reps", "2", "--alpha", "0", "--alpha", "1/5",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("classifier,alpha") and lines[2].startswith("g_T,0.2000")
    assert (tmp_path / "f.csv.manifest.json").exists()


def test_cli_text_stdout(capsys):
    assert main(["thm2-sweep", "--k", "50", "--l", "100", "--test-size", "1000",
                 "--neighbors", "1,3,5", "--format", "text"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert json.loads(out[0])["scenario"] == "thm2-sweep"
    assert out[1].split()[0] == "l" and len(out) == 3


def test_cli_neighbor_modes(capsys):
    assert main(["highdim-fixed", "--n", "60", "--k", "40", "--dim", "3", "--reps", "2",
                 "--neighbors", "cv"]) == 0
    assert main(["highdim-fixed", "--n", "200", "--k", "150", "--dim", "3", "--reps", "2",
                 "--neighbors", "random:3"]) == 0


def test_cli_exit_codes(capsys):
    assert main(["highdim-fixed", "--n", "50", "--k", "60"]) == 2
    assert main(["functional-II", "--h1", "-1", "--reps", "1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["highdim-fixed", "--neighbors", "2,4"])
    assert exc.value.code == 2


def test_cli_runtime_error_exit(monkeypatch, capsys):
    def boom(cfg, threads=1):
        raise FloatingPointError("overflow")
    monkeypatch.setattr("nlagg.cli.run_experiment", boom)
    assert main(["functional-I", "--reps", "1"]) == 3
