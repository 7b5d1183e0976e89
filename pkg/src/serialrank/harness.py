"""Benchmark sweeps, the perturbation probe and real-data ranking.

Seeds: every trial gets ``derive_seed(base, grid_index, trial)``, a 64-bit
value drawn from ``numpy.random.SeedSequence([base, grid_index, trial])``.
Inside a trial, sub-streams come from ``derive_seed(trial_seed, stream)``
(0: item shuffle, 1: fixed noise, 2: swept noise). Adding trials or grid
points at the end never changes the data of existing ones.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .baselines import btl_mle, point_score, rank_centrality
from .compdata import (
    ComparisonMatrix,
    NoiseSpec,
    apply_noise,
    full_consistent,
    make_rng,
    read_matchlist,
)
from .errors import InvalidParameterError, SerialRankError
from .metrics import (
    MetricReport,
    fiedler_l2_error,
    kendall_tau,
    linf_displacement,
    metric_report,
    upsets_topk,
)
from .similarity import sim_match_debiased
from .spectral import Ranking, fiedler_vector, rank_by_fiedler, serialrank
from .svgplot import line_chart

__all__ = [
    "METHODS",
    "SWEEP_PARAMS",
    "ExperimentConfig",
    "TrialRecord",
    "SweepRow",
    "SweepResult",
    "ProbeRow",
    "derive_seed",
    "run_method",
    "run_trial",
    "trial_dataset",
    "run_sweep",
    "run_perturbation_probe",
    "write_probe_csv",
    "rank_file",
    "emit_plot",
    "DEFAULT_TOPK",
]

METHODS = ("serialrank", "serialrank-normalized", "point-score", "rank-centrality", "btl")
SWEEP_PARAMS = ("corrupt-fraction", "missing-fraction", "local-range", "erdos-q")
DEFAULT_TOPK = (10, 25, 50, 100)


def _write_to(out, writer: Callable) -> None:
    if hasattr(out, "write"):
        writer(out)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer(fh)


def derive_seed(*keys: int) -> int:
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1, np.uint64)[0])


def run_method(
    method: str,
    c: ComparisonMatrix,
    similarity: str = "match",
    laplacian: str = "unnormalized",
    contrast: float | None = None,
    rc_damping: float | None = None,
) -> Ranking:
    if method == "serialrank":
        return serialrank(c, similarity, laplacian, contrast)
    if method == "serialrank-normalized":
        return serialrank(c, similarity, "normalized", contrast)
    if method == "point-score":
        return point_score(c).ranking(c)
    if method == "rank-centrality":
        return rank_centrality(c, damping=rc_damping).ranking(c)
    if method == "btl":
        return btl_mle(c).ranking(c)
    raise InvalidParameterError(f"unknown method {method!r}; expected one of {METHODS}")


@dataclass
class ExperimentConfig:
    """One benchmark sweep. Loaded from a JSON object such as::

        {"n": 100, "trials": 50, "methods": ["serialrank", "point-score"],
         "sweep": {"param": "corrupt-fraction", "values": [0, 0.1, 0.2]},
         "fixed_noise": {"kind": "uniform-corrupt", "fraction": 0.2},
         "seed": 1, "output": "corrupt.csv"}

    ``fixed_noise`` is applied before the swept noise. ``erdos_p`` is the
    consistency probability used by an ``erdos-q`` sweep.
    """

    n: int
    trials: int
    methods: list[str]
    sweep_param: str
    grid: list[float]
    fixed_noise: dict | None = None
    seed: int = 0
    output: str | None = None
    erdos_p: float = 1.0
    rc_damping: float | None = None
    contrast: float | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise InvalidParameterError(f"n must be an integer >= 2, got {self.n}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise InvalidParameterError(f"trials must be an integer >= 1, got {self.trials}")
        self.methods = list(self.methods)
        if not self.methods:
            raise InvalidParameterError("at least one method is required")
        for m in self.methods:
            if m not in METHODS:
                raise InvalidParameterError(f"unknown method {m!r}; expected one of {METHODS}")
        if self.sweep_param not in SWEEP_PARAMS:
            raise InvalidParameterError(f"unknown sweep parameter {self.sweep_param!r}; expected one of {SWEEP_PARAMS}")
        self.grid = [float(v) for v in self.grid]
        if not self.grid:
            raise InvalidParameterError("sweep grid is empty")
        for v in self.grid:
            self._noise_for(v, 0)
        if self.fixed_noise is not None:
            self._fixed_spec(0)
        if self.workers < 1:
            raise InvalidParameterError("workers must be >= 1")

    def _noise_for(self, value: float, seed: int) -> NoiseSpec:
        p = self.sweep_param
        if p == "corrupt-fraction":
            return NoiseSpec("uniform-corrupt", fraction=value, seed=seed)
        if p == "missing-fraction":
            return NoiseSpec("uniform-delete", fraction=value, seed=seed)
        if p == "local-range":
            if value != int(value) or value < 0:
                raise InvalidParameterError(f"local range must be a nonnegative integer, got {value}")
            return NoiseSpec("local-range", m_range=int(value), seed=seed)
        return NoiseSpec("erdos-renyi", q=value, p=self.erdos_p, seed=seed)

    def _fixed_spec(self, seed: int) -> NoiseSpec:
        spec = dict(self.fixed_noise or {})
        if "kind" not in spec:
            raise InvalidParameterError("fixed_noise needs a 'kind'")
        spec.pop("seed", None)
        try:
            return NoiseSpec(seed=seed, **spec)
        except TypeError as exc:
            raise InvalidParameterError(f"bad fixed_noise: {exc}") from None

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        sweep = d.pop("sweep", None)
        if not isinstance(sweep, dict) or "param" not in sweep or "values" not in sweep:
            raise InvalidParameterError("config needs 'sweep': {'param': ..., 'values': [...]}")
        known = {f for f in cls.__dataclass_fields__} - {"sweep_param", "grid"}
        extra = set(d) - known
        if extra:
            raise InvalidParameterError(f"unknown config keys: {sorted(extra)}")
        for key in ("n", "trials", "methods"):
            if key not in d:
                raise InvalidParameterError(f"config is missing {key!r}")
        return cls(sweep_param=sweep["param"], grid=list(sweep["values"]), **d)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidParameterError(f"config is not valid JSON: {exc}") from None
        if not isinstance(d, dict):
            raise InvalidParameterError("config must be a JSON object")
        return cls.from_dict(d)


@dataclass(frozen=True)
class TrialRecord:
    method: str
    grid_index: int
    value: float
    trial: int
    seed: int
    tau: float
    exact: bool
    linf: int
    runtime: float
    error: str = ""


@dataclass(frozen=True)
class SweepRow:
    method: str
    value: float
    trials: int
    mean_tau: float
    std_tau: float
    recovery_rate: float
    mean_runtime: float
    failures: int


@dataclass
class SweepResult:
    config: ExperimentConfig
    rows: list[SweepRow]
    trials: list[TrialRecord] = field(default_factory=list)

    def row(self, method: str, value: float) -> SweepRow:
        for r in self.rows:
            if r.method == method and r.value == value:
                return r
        raise KeyError((method, value))

    def write_csv(self, out) -> None:
        """Summary table to a path or text stream.

        Runtime is left out so the file is reproducible byte for byte; see
        :meth:`write_timing_csv`.
        """
        def _write(fh) -> None:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "param", "value", "trials", "mean_tau", "std_tau", "recovery_rate", "failures"])
            for r in self.rows:
                w.writerow([r.method, self.config.sweep_param, repr(r.value), r.trials,
                            repr(r.mean_tau), repr(r.std_tau), repr(r.recovery_rate), r.failures])

        _write_to(out, _write)

    def write_trials_csv(self, path: str | os.PathLike[str]) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "grid_index", "value", "trial", "seed", "tau", "exact", "linf", "error"])
            for t in self.trials:
                w.writerow([t.method, t.grid_index, repr(t.value), t.trial, t.seed,
                            repr(t.tau), int(t.exact), t.linf, t.error])

    def write_timing_csv(self, path: str | os.PathLike[str]) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "value", "mean_runtime_s"])
            for r in self.rows:
                w.writerow([r.method, repr(r.value), f"{r.mean_runtime:.6f}"])


def trial_dataset(cfg: ExperimentConfig, value: float, seed: int) -> tuple[ComparisonMatrix, Ranking]:
    """Comparisons and ground truth for one trial, rebuilt from its recorded seed.

    The noiseless tournament is corrupted (fixed noise first, then the swept
    noise at ``value``) and its items are then shuffled, so the true ranking
    is a random permutation rather than index order.
    """
    c = full_consistent(cfg.n)
    if cfg.fixed_noise is not None:
        c = apply_noise(c, cfg._fixed_spec(derive_seed(seed, 1)))
    c = apply_noise(c, cfg._noise_for(value, derive_seed(seed, 2)))
    # item k of the shuffled matrix is item perm[k] of the index-ordered one
    perm = make_rng(derive_seed(seed, 0)).permutation(cfg.n)
    return c.permuted(perm), Ranking(perm + 1)


def run_trial(cfg: ExperimentConfig, gi: int, t: int) -> list[TrialRecord]:
    """Every configured method on one generated dataset."""
    seed = derive_seed(cfg.seed, gi, t)
    c, truth = trial_dataset(cfg, cfg.grid[gi], seed)
    out = []
    for m in cfg.methods:
        start = time.perf_counter()
        try:
            r = run_method(m, c, contrast=cfg.contrast, rc_damping=cfg.rc_damping)
        except SerialRankError as exc:
            out.append(TrialRecord(m, gi, cfg.grid[gi], t, seed, math.nan, False, -1,
                                   time.perf_counter() - start, type(exc).__name__))
            continue
        elapsed = time.perf_counter() - start
        tau = kendall_tau(r, truth)
        disp = linf_displacement(r, truth)
        out.append(TrialRecord(m, gi, cfg.grid[gi], t, seed, tau, disp == 0, disp, elapsed))
    return out


def _aggregate(cfg: ExperimentConfig, records: list[TrialRecord]) -> list[SweepRow]:
    rows = []
    for m in cfg.methods:
        for gi, v in enumerate(cfg.grid):
            rec = [r for r in records if r.method == m and r.grid_index == gi]
            ok = np.array([r.tau for r in rec if not r.error])
            rows.append(SweepRow(
                method=m,
                value=v,
                trials=len(rec),
                mean_tau=float(ok.mean()) if ok.size else math.nan,
                std_tau=float(ok.std()) if ok.size else math.nan,
                recovery_rate=sum(r.exact for r in rec) / len(rec),
                mean_runtime=float(np.mean([r.runtime for r in rec])),
                failures=sum(1 for r in rec if r.error),
            ))
    return rows


def run_sweep(cfg: ExperimentConfig, progress: Callable[[int, int], None] | None = None) -> SweepResult:
    """Run every (grid value, trial) pair; results do not depend on ``cfg.workers``."""
    jobs = [(gi, t) for gi in range(len(cfg.grid)) for t in range(cfg.trials)]
    results: dict[tuple[int, int], list[TrialRecord]] = {}
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for (gi, t), recs in zip(jobs, pool.map(lambda j: run_trial(cfg, *j), jobs)):
                results[(gi, t)] = recs
                if progress:
                    progress(len(results), len(jobs))
    else:
        for gi, t in jobs:
            results[(gi, t)] = run_trial(cfg, gi, t)
            if progress:
                progress(len(results), len(jobs))
    records = [r for key in sorted(results) for r in results[key]]
    records.sort(key=lambda r: (cfg.methods.index(r.method), r.grid_index, r.trial))
    return SweepResult(cfg, _aggregate(cfg, records), records)


def emit_plot(result: SweepResult, path: str | os.PathLike[str]) -> tuple[Path, Path]:
    """Write an SVG chart of mean Kendall tau per method and the summary CSV next to it."""
    if not result.rows:
        raise InvalidParameterError("nothing to plot")
    path = Path(path)
    series = {m: [(r.value, r.mean_tau) for r in result.rows if r.method == m] for m in result.config.methods}
    svg = line_chart(series, result.config.sweep_param, "Kendall tau",
                     title=f"n = {result.config.n}, {result.config.trials} trials")
    path.write_text(svg, encoding="utf-8")
    csv_path = path.with_suffix(".csv")
    result.write_csv(csv_path)
    return path, csv_path


@dataclass(frozen=True)
class ProbeRow:
    q: float
    trials: int
    mean_l2: float
    std_l2: float
    mean_linf: float
    std_linf: float
    failures: int


def run_perturbation_probe(
    n: int,
    q_grid: Sequence[float],
    p: float,
    trials: int,
    seed: int = 0,
) -> list[ProbeRow]:
    """Fiedler-vector and ranking error of the debiased, normalized pipeline.

    For each ``q``: sample comparisons of the identity ranking with
    probability ``q``, keep each sign with probability ``p``, build the
    debiased match similarity and compare its normalized-Laplacian Fiedler
    vector and ranking with the noiseless ones.
    """
    if not 0.5 < p <= 1.0:
        raise InvalidParameterError(f"p must lie in (1/2, 1], got {p}")
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    clean = full_consistent(n)
    f_clean = fiedler_vector(sim_match_debiased(clean, 1.0, 1.0), "normalized").fiedler
    truth = Ranking.identity(n)
    rows = []
    for qi, q in enumerate(q_grid):
        if not 0.0 < q <= 1.0:
            raise InvalidParameterError(f"q must lie in (0, 1], got {q}")
        l2s, linfs, fails = [], [], 0
        for t in range(trials):
            s_seed = derive_seed(seed, qi, t)
            noisy = apply_noise(clean, NoiseSpec("erdos-renyi", q=q, p=p, seed=s_seed))
            try:
                r, diag = rank_by_fiedler(sim_match_debiased(noisy, q, p), noisy, "normalized")
            except SerialRankError:
                fails += 1
                continue
            l2s.append(fiedler_l2_error(f_clean, diag.fiedler))
            linfs.append(linf_displacement(r, truth))
        a, b = np.array(l2s), np.array(linfs, dtype=float)
        rows.append(ProbeRow(
            float(q), trials,
            float(a.mean()) if a.size else math.nan, float(a.std()) if a.size else math.nan,
            float(b.mean()) if b.size else math.nan, float(b.std()) if b.size else math.nan,
            fails,
        ))
    return rows


def write_probe_csv(rows: Sequence[ProbeRow], out) -> None:
    def _write(fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["q", "trials", "mean_l2", "std_l2", "mean_linf", "std_linf", "failures"])
        for r in rows:
            w.writerow([repr(r.q), r.trials, repr(r.mean_l2), repr(r.std_l2),
                        repr(r.mean_linf), repr(r.std_linf), r.failures])

    _write_to(out, _write)


def rank_file(
    path: str | os.PathLike[str],
    method: str = "serialrank",
    similarity: str = "match",
    laplacian: str = "unnormalized",
    contrast: float | None = None,
    topk: Sequence[int] = (),
    output: str | os.PathLike[str] | None = None,
    rc_damping: float | None = None,
) -> tuple[Ranking, MetricReport]:
    """Rank the items of a match-list file.

    With ``output`` set, writes ``<output>`` (``rank,label,score``) and
    ``<output stem>_topk.csv`` (``k,l_k,upsets,pairs``) for
    k in {10, 25, 50, 100, n} plus any ``topk`` values.
    """
    if method not in METHODS:
        raise InvalidParameterError(f"unknown method {method!r}; expected one of {METHODS}")
    c = read_matchlist(path)
    r = run_method(method, c, similarity, laplacian, contrast, rc_damping)
    ks = sorted({k for k in (*DEFAULT_TOPK, c.n, *topk) if 2 <= k <= c.n})
    report = metric_report(r, None, c, ks)
    if output is not None:
        out = Path(output)
        labels = c.labels
        with open(out, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["rank", "label", "score"])
            for item in r.order:
                score = "" if r.scores is None else repr(float(r.scores[item]))
                w.writerow([int(r.ranks[item]), labels[item], score])
        with open(out.with_name(out.stem + "_topk.csv"), "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "l_k", "upsets", "pairs"])
            for k in ks:
                loss = upsets_topk(r, c, k)
                w.writerow([k, repr(loss.value), loss.upsets, loss.pairs])
    return r, report


def config_to_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["sweep"] = {"param": d.pop("sweep_param"), "values": d.pop("grid")}
    return d
