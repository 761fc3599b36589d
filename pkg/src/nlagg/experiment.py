"""Seeded Monte Carlo repetitions, result tables and large-pool sweeps.

Every repetition draws from its own generator,
``default_rng(SeedSequence(seed, spawn_key=(rep,)))``, so results do not
depend on how repetitions are scheduled across threads.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .aggregator import AggregatedClassifier, check_alpha, pattern_of
from .core import ConfigurationError, Dataset, Metric, split
from .generators import FunctionalSpec, HighDimSpec, gen_functional, gen_highdim
from .knn import EnsembleSpec, KnnEnsemble, cv_select_knn, random_odd_bound
from .oracles import empirical_cell_table, limit_risk
from .smoothing import DEFAULT_BANDWIDTH_GRID, SmootherSpec, cv_bandwidths, smooth_training_set

log = logging.getLogger(__name__)

SCENARIOS = ("highdim-fixed", "highdim-random", "functional-I", "functional-II",
             "thm2-sweep", "oracle-bridge")

#: Candidate neighbor counts for the cross-validated kNN columns.
CV_GRID = tuple(range(1, 42, 2))


class RunError(RuntimeError):
    """No repetition of an experiment finished."""


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    n: int
    k: int
    alphas: tuple = (0.0,)
    reps: int = 100
    seed: int = 0
    test_size: int = 0
    ensemble: EnsembleSpec = EnsembleSpec()
    smoother: Optional[SmootherSpec] = None
    cv_bandwidths: bool = False
    theta_form: str = "exp"
    dim: int = 150
    shift: float = 0.25
    l_values: tuple = ()

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(f"unknown scenario {self.scenario!r}")
        if self.reps < 1:
            raise ConfigurationError("reps must be >= 1")
        if self.test_size < 1:
            raise ConfigurationError("test_size must be >= 1")
        if not self.alphas:
            raise ConfigurationError("need at least one alpha")
        for a in self.alphas:
            check_alpha(a)
        if self.scenario in ("thm2-sweep", "oracle-bridge"):
            if self.k < 1 or not self.l_values or min(self.l_values) < 1:
                raise ConfigurationError("sweeps need k >= 1 and pool sizes >= 1")
        elif not 1 <= self.k < self.n:
            raise ConfigurationError(f"need 1 <= k < n, got k={self.k}, n={self.n}")
        if self.scenario.startswith("functional"):
            if self.n % 2 or self.test_size % 2:
                raise ConfigurationError("functional scenarios need even n and test size")

    @property
    def l(self) -> int:  # noqa: E743
        return self.n - self.k

    @classmethod
    def for_scenario(cls, scenario: str, **overrides) -> "ExperimentConfig":
        """Defaults reproducing the published layout of each scenario."""
        base = {
            "highdim-fixed": dict(n=400, k=300, alphas=(0.0, 0.25), reps=500),
            "highdim-random": dict(n=600, k=400, alphas=(0.0, 0.125, 0.25), reps=500,
                                   ensemble=EnsembleSpec("random-odd", M=10)),
            "functional-I": dict(n=50, k=30, alphas=(0.0, 0.2, 0.4), reps=200, test_size=200,
                                 ensemble=EnsembleSpec.odd_range(5)),
            "functional-II": dict(n=50, k=30, alphas=(0.0, 0.2, 0.4), reps=200, test_size=200,
                                  ensemble=EnsembleSpec.odd_range(5), smoother=SmootherSpec()),
            "thm2-sweep": dict(n=0, k=200, dim=2, reps=1, test_size=100_000,
                               ensemble=EnsembleSpec("fixed-list", (1, 7, 25)),
                               l_values=(100, 1000, 10_000, 50_000)),
            "oracle-bridge": dict(n=0, k=200, dim=2, reps=1, test_size=100_000,
                                  ensemble=EnsembleSpec("fixed-list", (1, 7, 25)),
                                  l_values=(50_000,)),
        }
        if scenario not in base:
            raise ConfigurationError(f"unknown scenario {scenario!r}")
        kw = dict(scenario=scenario, **base[scenario])
        kw.update({k: v for k, v in overrides.items() if v is not None})
        if not kw.get("test_size"):
            kw["test_size"] = kw["n"]
        return cls(**kw)

    def manifest(self) -> str:
        """Single-line JSON description of the run."""
        d = asdict(self)
        d["alphas"] = [str(Fraction(a).limit_denominator(10**6)) for a in self.alphas]
        return json.dumps(d, sort_keys=True, default=list)


@dataclass(frozen=True)
class ColumnStat:
    classifier: str
    alpha: Optional[float]
    mean_error: float
    std_error: float
    reps: int


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    columns: list = field(default_factory=list)

    def column(self, classifier: str, alpha=None) -> ColumnStat:
        for c in self.columns:
            if c.classifier == classifier and (alpha is None or (
                    c.alpha is not None and abs(c.alpha - float(alpha)) < 1e-12)):
                return c
        raise KeyError((classifier, alpha))


def rep_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _error(pred, y) -> float:
    return float(np.mean(np.asarray(pred) != y))


def _draw(cfg: ExperimentConfig, rng: np.random.Generator) -> tuple[Dataset, Dataset, Metric]:
    if cfg.scenario.startswith("highdim"):
        spec = HighDimSpec(dim=cfg.dim, shift=cfg.shift)
        return gen_highdim(spec, cfg.n, rng), gen_highdim(spec, cfg.test_size, rng), Metric()
    spec = (FunctionalSpec.model_i() if cfg.scenario == "functional-I"
            else FunctionalSpec.model_ii(cfg.theta_form))
    train = gen_functional(spec, cfg.n // 2, rng)
    test = gen_functional(spec, cfg.test_size // 2, rng)
    return train, test, Metric.l2_grid(spec.grid)


def _aggregate_columns(cfg, ens, sp, test) -> list[tuple[str, float, float]]:
    pool = pattern_of(ens, sp.e_l.x)
    query = pattern_of(ens, test.x)
    rows = []
    for a in cfg.alphas:
        agg = AggregatedClassifier(pool, sp.e_l.y, a, ens)
        rows.append(("g_T", float(a), _error(agg.classify_patterns(query), test.y)))
    return rows


def _cv_candidates(train: Dataset) -> list[int]:
    cap = min(random_odd_bound(train), len(train) - 1)
    ks = [k for k in CV_GRID if k <= cap]
    return ks or [1]


def run_repetition(cfg: ExperimentConfig, rep_index: int) -> list[tuple[str, Optional[float], float]]:
    """One draw-fit-evaluate cycle; returns (classifier, alpha, error) rows."""
    rng = rep_rng(cfg.seed, rep_index)
    train, test, metric = _draw(cfg, rng)

    if cfg.scenario == "functional-II":
        sm = cfg.smoother or SmootherSpec()
        if cfg.cv_bandwidths:
            grid = sm.search_grid or DEFAULT_BANDWIDTH_GRID
            h1, h2 = cv_bandwidths(train, grid, cfg.ensemble, cfg.alphas[0],
                                   rng=rep_rng(cfg.seed, rep_index, 1), metric=metric)
            sm = SmootherSpec(h1, h2)
        # test curves stay raw
        train = smooth_training_set(train, sm, metric.grid)

    sp = split(train, cfg.k)
    ens = cfg.ensemble.build(sp.d_k, metric, rng)
    rows = _aggregate_columns(cfg, ens, sp, test)

    if cfg.scenario == "highdim-random":
        for name, data in (("gcv_n", train), ("gcv_k", sp.d_k)):
            clf = cv_select_knn(data, metric, _cv_candidates(data))
            rows.append((name, None, _error(clf.predict(test.x), test.y)))
    else:
        full = KnnEnsemble(train, metric, ens.neighbors).predict_all(test.x)
        part = ens.predict_all(test.x)
        for m in range(len(ens)):
            rows.append((f"g_{m + 1}k", None, _error(full[:, m], test.y)))
        for m in range(len(ens)):
            rows.append((f"g_{m + 1}k[k]", None, _error(part[:, m], test.y)))
    return rows


def _safe_repetition(cfg, rep):
    try:
        return run_repetition(cfg, rep)
    except ConfigurationError as exc:
        log.warning("repetition %d skipped: %s", rep, exc)
        return None


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Mean and standard error of every column over ``cfg.reps`` repetitions."""
    if cfg.scenario in ("thm2-sweep", "oracle-bridge"):
        raise ConfigurationError(f"{cfg.scenario} is a sweep; use thm2_sweep / oracle_bridge")
    reps = range(cfg.reps)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(lambda r: _safe_repetition(cfg, r), reps))
    else:
        rows = [_safe_repetition(cfg, r) for r in reps]
    rows = [r for r in rows if r is not None]
    if not rows:
        raise RunError("no repetition completed")

    keys = [(name, alpha) for name, alpha, _ in rows[0]]
    errs = np.array([[e for _, _, e in r] for r in rows])
    mean = errs.mean(axis=0)
    se = errs.std(axis=0, ddof=1) / np.sqrt(len(rows)) if len(rows) > 1 else np.zeros(len(keys))
    cols = [ColumnStat(name, alpha, float(m), float(s), len(rows))
            for (name, alpha), m, s in zip(keys, mean, se)]
    return ExperimentResult(cfg, cols)


def _fmt(v) -> str:
    return "" if v is None else f"{v:.4f}"


CSV_HEADER = ["classifier", "alpha", "mean_error", "std_error", "reps", "n", "k", "seed"]


def emit_table(result: ExperimentResult, format: str = "csv", path=None) -> str:
    """Render (and optionally write) the result table.

    Text output starts with the JSON run manifest; CSV output writes the
    manifest next to the file as ``<path>.manifest.json``.
    """
    if not result.columns:
        raise ValueError("empty result")
    cfg = result.config
    rows = [[c.classifier, _fmt(c.alpha), _fmt(c.mean_error), _fmt(c.std_error), str(c.reps),
             str(cfg.n), str(cfg.k), str(cfg.seed)] for c in result.columns]
    text = _render(CSV_HEADER, rows, format, cfg.manifest())
    _write(text, path, format, cfg.manifest())
    return text


def _render(header, rows, format, manifest) -> str:
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    if format == "text":
        widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]
        lines = [manifest, "  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
        lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows]
        return "\n".join(lines) + "\n"
    raise ConfigurationError(f"unknown format {format!r}")


def _write(text, path, format, manifest) -> None:
    if path is None:
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)
    if format == "csv":
        with open(f"{path}.manifest.json", "w") as fh:
            fh.write(manifest + "\n")


# --- large-pool behaviour at a fixed D_k ------------------------------------

@dataclass(frozen=True)
class SweepRow:
    l: int  # noqa: E741
    risk_gT: float
    min_base_risk: float
    gap: float
    limit_risk: float
    excluded_mass: float
    risk_gT_kept: float
    limit_risk_kept: float


@dataclass
class SweepReport:
    config: ExperimentConfig
    base_risks: list
    rows: list


SWEEP_HEADER = ["l", "risk_gT", "min_base_risk", "gap", "limit_risk", "excluded_mass",
                "risk_gT_kept", "limit_risk_kept"]


def _split_cells(table, tol):
    """Cells counted in tolerance accounting: |p1 - p0| >= tol."""
    return np.abs(table.p1 - table.p0) >= tol


def _cell_risks(codes, y, pred, keep_cells):
    keep = keep_cells[codes]
    return float(np.sum((pred != y) & keep) / y.size)


def _sweep(cfg: ExperimentConfig, pool_table: bool, h_tol: float = 1e-3) -> SweepReport:
    spec = HighDimSpec(dim=cfg.dim, shift=cfg.shift)
    metric = Metric()
    d_k = gen_highdim(spec, cfg.k, rep_rng(cfg.seed, 0))
    ens = cfg.ensemble.build(d_k, metric, rep_rng(cfg.seed, 0, 1))
    test = gen_highdim(spec, cfg.test_size, rep_rng(cfg.seed, 1))
    q = pattern_of(ens, test.x)
    codes = (q.astype(np.int64) << np.arange(q.shape[1])).sum(axis=1)
    base = [(q[:, m] != test.y).mean() for m in range(q.shape[1])]
    test_table = empirical_cell_table(q, test.y)
    alpha = cfg.alphas[0]
    rows = []
    for i, l in enumerate(cfg.l_values):
        e_l = gen_highdim(spec, l, rep_rng(cfg.seed, 2, i))
        pool = pattern_of(ens, e_l.x)
        agg = AggregatedClassifier(pool, e_l.y, alpha, ens)
        pred = agg.classify_patterns(q)
        table = empirical_cell_table(pool, e_l.y) if pool_table else test_table
        keep = _split_cells(table, h_tol)
        excluded = float((table.p1 + table.p0)[~keep].sum())
        risk = _error(pred, test.y)
        # the limit value restricted to (H)-respecting cells, evaluated on test mass
        kept_limit = float(np.minimum(test_table.p1, test_table.p0)[keep].sum())
        rows.append(SweepRow(int(l), risk, float(min(base)), risk - float(min(base)),
                             limit_risk(table), excluded,
                             _cell_risks(codes, test.y, pred, keep), kept_limit))
    return SweepReport(cfg, [float(b) for b in base], rows)


def thm2_sweep(cfg: ExperimentConfig) -> SweepReport:
    """Risk of the aggregated rule against the best base rule as the pool grows.

    One D_k, one ensemble and one test set are shared across all pool sizes;
    ``limit_risk`` is read from the test-set cell table.
    """
    return _sweep(cfg, pool_table=False)


def oracle_bridge(cfg: ExperimentConfig) -> SweepReport:
    """Like :func:`thm2_sweep` but ``limit_risk`` comes from the pool's own cell frequencies."""
    return _sweep(cfg, pool_table=True)


def emit_sweep(report: SweepReport, format: str = "csv", path=None) -> str:
    rows = [[str(r.l)] + [f"{getattr(r, h):.4f}" for h in SWEEP_HEADER[1:]] for r in report.rows]
    manifest = report.config.manifest()
    text = _render(SWEEP_HEADER, rows, format, manifest)
    _write(text, path, format, manifest)
    return text

