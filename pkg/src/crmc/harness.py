"""Seeded Monte-Carlo runner and CSV output."""

from __future__ import annotations

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .filters import DegenerateGainError, FilterDivergedError
from .metrics import (Beampattern, beampattern, median_beampattern, relative_error_db,
                      running_mean)
from .scenarios import Scenario, wiener_reference

log = logging.getLogger(__name__)

LEARNING_CURVE_COLUMNS = ("scenario", "algorithm", "trial", "iteration",
                          "relative_error_db", "abs_error", "psi", "spectral_diag")
BEAMPATTERN_COLUMNS = ("scenario", "algorithm", "trial", "angle_deg", "gain_db")
SUMMARY_COLUMNS = ("scenario", "algorithm", "diverged_fraction",
                   "median_final_error_db", "mean_step_time_ns")


@dataclass
class RunRecord:
    """One algorithm on one trial.

    Curves cover the completed iterations only; a diverged run stops at
    ``diverged_at``, the zero-based index of the faulting iteration.
    ``spectral`` is the per-step largest eigenvalue of
    ``psi F x x^H / (lam + psi x^H F x)`` and ``spectral_diag`` its running
    mean, the sample estimate of the expected eigenvalue (both NaN for
    gradient filters).
    """

    scenario: str
    algorithm: str
    trial: int
    seed: int
    relative_error_db: np.ndarray
    abs_error: np.ndarray
    psi: np.ndarray
    spectral_diag: np.ndarray
    spectral: np.ndarray
    final_weights: np.ndarray
    beampattern: Beampattern | None
    diverged_at: int | None
    step_time_ns: float

    @property
    def diverged(self) -> bool:
        return self.diverged_at is not None

    @property
    def final_error_db(self) -> float:
        if self.diverged or len(self.relative_error_db) == 0:
            return float("nan")
        return float(self.relative_error_db[-1])


def run_trial(scenario: Scenario, trial: int, w_o: np.ndarray) -> list[RunRecord]:
    """Run every configured algorithm on one shared noise realization."""
    data = scenario.trial_data(trial)
    x, d = data.x, data.d
    n_iter = len(d)
    records = []
    for name in scenario.algorithms:
        filt = scenario.make_filter(name)
        rel = np.empty(n_iter)
        abs_err = np.empty(n_iter)
        psi = np.empty(n_iter)
        spectral = np.empty(n_iter)
        diverged_at = None
        elapsed = 0
        done = 0
        for n in range(n_iter):
            t0 = time.perf_counter_ns()
            try:
                res = filt.step(x[n], d[n])
            except (FilterDivergedError, DegenerateGainError) as exc:
                log.debug("%s trial %d diverged at %d: %s", name, trial, n, exc)
                diverged_at = n
                break
            elapsed += time.perf_counter_ns() - t0
            done += 1
            rel[n] = relative_error_db(w_o, res.weights_after)
            abs_err[n] = abs(res.prior_error)
            psi[n] = res.psi
            spectral[n] = res.spectral
        pattern = None
        if diverged_at is None and scenario.kind == "beamforming" and np.any(filt.w):
            pattern = beampattern(filt.w, scenario.elements)
        records.append(RunRecord(
            scenario=scenario.name, algorithm=name, trial=trial,
            seed=scenario.seed + trial, relative_error_db=rel[:done],
            abs_error=abs_err[:done], psi=psi[:done],
            spectral_diag=running_mean(spectral[:done]), spectral=spectral[:done],
            final_weights=filt.w.copy(), beampattern=pattern,
            diverged_at=diverged_at, step_time_ns=elapsed / max(done, 1)))
    return records


def run_scenario(scenario: Scenario, workers: int = 1) -> list[RunRecord]:
    """All algorithms over all trials, sorted by ``(algorithm, trial)``.

    Trials are independent; ``workers > 1`` distributes them over a process
    pool without changing any output value.
    """
    w_o = wiener_reference(scenario)
    job = partial(run_trial, scenario, w_o=w_o)
    trials = range(scenario.trials)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(job, trials))
    else:
        chunks = [job(t) for t in trials]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (r.algorithm, r.trial))
    return records


class BiasDecay(NamedTuple):
    checkpoints: np.ndarray
    bias_norms: np.ndarray
    spectral_min: float
    spectral_max: float


def bias_decay(scenario: Scenario, algorithm: str = "crmc", checkpoints=None) -> BiasDecay:
    """Norm of the trial-averaged weight error ``||E{w(n)} - w_o||``.

    All trials of a system-identification scenario run as one batched
    filter. The result also carries the extreme values of the per-step
    spectral diagnostic over every trial and step.
    """
    if scenario.kind != "sysid":
        raise ValueError("bias decay needs a system-identification scenario")
    n_iter = scenario.iterations
    if checkpoints is None:
        checkpoints = np.unique(np.geomspace(1, n_iter, 40).astype(int))
    checkpoints = np.asarray(checkpoints)
    if checkpoints.max() > n_iter or checkpoints.min() < 1:
        raise ValueError("checkpoints must lie in [1, iterations]")
    w_o = scenario.planted_weights()
    trials = [scenario.trial_data(t) for t in range(scenario.trials)]
    x = np.stack([t.x for t in trials], axis=1)
    d = np.stack([t.d for t in trials], axis=1)
    filt = scenario.make_filter(algorithm, batch_shape=(scenario.trials,))
    wanted = set(int(c) for c in checkpoints)
    bias = {}
    lo, hi = np.inf, -np.inf
    for n in range(n_iter):
        res = filt.step(x[n], d[n])
        lo = min(lo, float(np.min(res.spectral)))
        hi = max(hi, float(np.max(res.spectral)))
        if n + 1 in wanted:
            bias[n + 1] = np.linalg.norm(filt.w.mean(axis=0) - w_o)
    return BiasDecay(checkpoints, np.array([bias[int(c)] for c in checkpoints]), lo, hi)


def _fmt(value) -> str:
    return f"{float(value):.9g}"


def emit_csv(records, output_dir) -> dict[str, Path]:
    """Write learning_curves.csv, beampatterns.csv and summary.csv.

    Floats are written with 9 significant digits. Headers are always
    written, so an empty record list produces header-only files. Besides
    one pattern per trial, beampatterns.csv carries the per-angle median
    over trials of each algorithm with ``trial`` set to ``median``.
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / f"{name}.csv" for name in ("learning_curves", "beampatterns", "summary")}
    records = list(records)
    with paths["learning_curves"].open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LEARNING_CURVE_COLUMNS)
        for r in records:
            for n in range(len(r.relative_error_db)):
                writer.writerow([r.scenario, r.algorithm, r.trial, n,
                                 _fmt(r.relative_error_db[n]), _fmt(r.abs_error[n]),
                                 _fmt(r.psi[n]), _fmt(r.spectral_diag[n])])
    with paths["beampatterns"].open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BEAMPATTERN_COLUMNS)
        groups: dict[tuple[str, str], list[Beampattern]] = {}
        for r in records:
            if r.beampattern is None:
                continue
            groups.setdefault((r.scenario, r.algorithm), []).append(r.beampattern)
            for angle, gain in zip(r.beampattern.angles_deg, r.beampattern.gain_db):
                writer.writerow([r.scenario, r.algorithm, r.trial, _fmt(angle), _fmt(gain)])
        # Monte-Carlo median pattern, labelled with trial "median"
        for (scen, alg), patterns in groups.items():
            med = median_beampattern(patterns)
            for angle, gain in zip(med.angles_deg, med.gain_db):
                writer.writerow([scen, alg, "median", _fmt(angle), _fmt(gain)])
    with paths["summary"].open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for row in summarize(records):
            writer.writerow([row["scenario"], row["algorithm"], _fmt(row["diverged_fraction"]),
                             _fmt(row["median_final_error_db"]), _fmt(row["mean_step_time_ns"])])
    return paths


def summarize(records) -> list[dict]:
    """Per (scenario, algorithm): divergence rate, median final error, step time.

    The median runs over non-diverged trials (NaN when all diverged).
    """
    groups: dict[tuple[str, str], list[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.scenario, r.algorithm), []).append(r)
    rows = []
    for (scen, alg), group in sorted(groups.items()):
        finals = [r.final_error_db for r in group if not r.diverged]
        rows.append({
            "scenario": scen, "algorithm": alg,
            "diverged_fraction": sum(r.diverged for r in group) / len(group),
            "median_final_error_db": float(np.median(finals)) if finals else float("nan"),
            "mean_step_time_ns": float(np.mean([r.step_time_ns for r in group])),
        })
    return rows
