"""Seeded Monte Carlo runs over random central points."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .classify import DEFAULT_CROSSCAP_TOL, crosscap_test
from .errors import InvalidInput, InvalidParams, UmbrellaError
from .foliation import (WIDE_INFLATION, Box, centers_box, detect_degeneracy, levels_through_point,
                        match_point_sets, tangency_search)
from .locus import DEFAULT_TOL, solve_singular_points
from .mapping import SPECIAL_KINDS, make_special

THREADS_ENV = "UMBRELLA_THREADS"
LEVEL_FLOOR = 1e-8


@dataclass(frozen=True)
class ExperimentConfig:
    ell: int = 3
    a: float = 1.0
    b: float = 2.0
    trials: int = 1000
    box: Box = Box(-2.0, -2.0, 2.0, 2.0)
    seed: int = 42
    tol: float = DEFAULT_TOL
    form: str = "ellipse_circle"
    # run the tangency oracle on every k-th trial; 0 disables it
    oracle_every: int = 0
    keep_trials: bool = False

    def __post_init__(self):
        if int(self.ell) < 3:
            raise InvalidInput(f"ell must be at least 3, got {self.ell}")
        if int(self.trials) < 0:
            raise InvalidInput("trials must be non-negative")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidInput("seed must fit in 64 unsigned bits")
        if self.form not in SPECIAL_KINDS:
            raise InvalidParams(f"form must be one of {SPECIAL_KINDS}")
        if self.form == "ellipse_circle" and not (0 < self.a < self.b):
            raise InvalidParams(f"need 0 < a < b, got a={self.a}, b={self.b}")
        if self.tol <= 0 or self.oracle_every < 0:
            raise InvalidInput("tol must be positive and oracle_every non-negative")
        object.__setattr__(self, "box", Box.checked(*self.box))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["box"] = list(self.box)
        return d


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for one trial: Philox keyed by the seed, counter offset by the index."""
    counter = np.array([0, 0, 0, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=int(seed), counter=counter))


def sample_centers(cfg: ExperimentConfig, index: int) -> np.ndarray:
    rng = trial_rng(cfg.seed, index)
    lo = np.array([cfg.box.x0, cfg.box.y0])
    hi = np.array([cfg.box.x1, cfg.box.y1])
    return lo + (hi - lo) * rng.random((cfg.ell, 2))


def build_mapping(cfg: ExperimentConfig, centers):
    if cfg.form == "ellipse_circle":
        return make_special("ellipse_circle", centers, cfg.a, cfg.b)
    return make_special(cfg.form, centers)


@dataclass
class TrialRecord:
    index: int
    centers: list
    status: str = "ok"  # ok | failed
    count: Optional[int] = None
    points: list = field(default_factory=list)
    degenerate: bool = False
    crosscap: Optional[bool] = None
    crosscap_det: Optional[float] = None
    lemma3: Optional[bool] = None
    oracle_agree: Optional[bool] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _lemma3_holds(m, location) -> bool:
    levels = levels_through_point(m, location)
    kinds = [lv.kind for lv in levels]
    return (all(lv.level > LEVEL_FLOOR for lv in levels)
            and kinds.count("ellipse") == 1 and kinds.count("circle") == m.ell - 1)


def run_trial(cfg: ExperimentConfig, index: int) -> TrialRecord:
    centers = sample_centers(cfg, index)
    rec = TrialRecord(index=index, centers=centers.tolist())
    try:
        m = build_mapping(cfg, centers)
        rec.degenerate = bool(not detect_degeneracy(m).clean)
        points = solve_singular_points(m, cfg.tol)
    except UmbrellaError as exc:
        rec.status, rec.error = "failed", f"{type(exc).__name__}: {exc}"
        return rec
    rec.count = len(points)
    rec.points = [list(p.location) for p in points]
    if cfg.ell == 3 and len(points) == 1:
        try:
            w = crosscap_test(m, points[0].location, DEFAULT_CROSSCAP_TOL)
            rec.crosscap, rec.crosscap_det = w.is_crosscap, w.normalized_det
        except UmbrellaError:
            rec.crosscap = False
    if cfg.form == "ellipse_circle" and points:
        rec.lemma3 = all(_lemma3_holds(m, p.location) for p in points)
    if cfg.oracle_every and index % cfg.oracle_every == 0:
        report = tangency_search(m, centers_box(m, WIDE_INFLATION))
        inside = [p.location for p in points if report.box.contains(p.location)]
        rec.oracle_agree = bool(match_point_sets(inside, report.points))
    return rec


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    histogram: dict
    expected_count: int
    crosscap_pass: int
    oracle_runs: int
    oracle_agree: int
    degenerate_trials: int
    failed_trials: int
    clean_trials: int
    clean_pass: int
    lemma3_pass: int
    records: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "seed": self.config.seed,
            "config": self.config.to_dict(),
            "histogram": {str(k): v for k, v in self.histogram.items()},
            "expected_count": self.expected_count,
            "crosscap_pass": self.crosscap_pass,
            "oracle_runs": self.oracle_runs,
            "oracle_agree": self.oracle_agree,
            "degenerate_trials": self.degenerate_trials,
            "failed_trials": self.failed_trials,
            "clean_trials": self.clean_trials,
            "clean_pass": self.clean_pass,
            "lemma3_pass": self.lemma3_pass,
        }
        if self.config.keep_trials:
            out["trials"] = [r.to_dict() for r in self.records]
        return out


def thread_count(requested: Optional[int] = None) -> int:
    n = requested or os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise InvalidInput(f"{THREADS_ENV} must be an integer, got {cap!r}") from exc
    return max(1, n)


def _passes(cfg: ExperimentConfig, rec: TrialRecord, expected: int) -> bool:
    if rec.status != "ok" or rec.count != expected:
        return False
    if expected == 1:
        return bool(rec.crosscap)
    return True


def run_genericity_experiment(cfg: ExperimentConfig, threads: Optional[int] = None) -> ExperimentReport:
    """Run ``cfg.trials`` independent trials and aggregate them.

    A trial passes when its singular-point count matches the generic
    prediction for the chosen form (one cross-cap for ell = 3 with a rank-2
    coefficient matrix, none otherwise). Trials flagged by
    :func:`detect_degeneracy` are counted separately and left out of the
    pass-rate denominator. Output is identical for any thread count.
    """
    n = thread_count(threads)
    indices = range(cfg.trials)
    if n == 1 or cfg.trials < 2:
        records = [run_trial(cfg, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            records = list(pool.map(lambda i: run_trial(cfg, i), indices))
    records.sort(key=lambda r: r.index)

    rank2 = cfg.form == "ellipse_circle"
    expected = 1 if (cfg.ell == 3 and rank2) else 0
    hist: dict = {}
    for r in records:
        key = r.count if r.status == "ok" else "failed"
        hist[key] = hist.get(key, 0) + 1
    hist = dict(sorted(hist.items(), key=lambda kv: (isinstance(kv[0], str), kv[0])))
    clean = [r for r in records if not r.degenerate]
    oracle = [r for r in records if r.oracle_agree is not None]
    return ExperimentReport(
        config=cfg,
        histogram=hist,
        expected_count=expected,
        crosscap_pass=sum(1 for r in records if r.crosscap),
        oracle_runs=len(oracle),
        oracle_agree=sum(1 for r in oracle if r.oracle_agree),
        degenerate_trials=len(records) - len(clean),
        failed_trials=sum(1 for r in records if r.status != "ok"),
        clean_trials=len(clean),
        clean_pass=sum(1 for r in clean if _passes(cfg, r, expected)),
        lemma3_pass=sum(1 for r in clean if r.lemma3),
        records=records,
    )
