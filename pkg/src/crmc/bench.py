"""Per-step timing micro-benchmark.

Python dispatch overhead per call is roughly constant, so timing a single
small filter measures the interpreter rather than the arithmetic. The bench
therefore steps a batch of independent filters in lockstep and reports the
wall time per filter-step.
"""

from __future__ import annotations

import time

import numpy as np

from .filters import ALGORITHMS
from .scenarios import DEFAULT_ALGORITHMS
from .sources import make_rng

# Multiplications per iteration for each algorithm.
OPERATION_COUNTS = {
    "clms": lambda m: 2 * m + 1,
    "lmp": lambda m: 2 * m + 2,
    "cmpn": lambda m: 2 * m + 3,
    "rls": lambda m: 2 * m * m + 4 * m,
    "crmc": lambda m: 2 * m * m + 4 * m + 5,
}


def _make(name, num_taps, batch):
    kwargs = {("lam" if k == "lambda" else k): v for k, v in DEFAULT_ALGORITHMS[name].items()}
    return ALGORITHMS[name](num_taps, batch_shape=(batch,), **kwargs)


def bench_step_times(num_taps: int, iterations: int = 100, batch: int = 512,
                     algorithms=None, seed: int = 0, repeats: int = 5,
                     budget_s: float = 0.5) -> dict[str, float]:
    """Mean wall time in nanoseconds per filter-step.

    Every algorithm consumes the same synthetic system-identification data
    (unit-power complex Gaussian inputs, lightly noisy reference).

    Parameters
    ----------
    num_taps : int
        Filter length ``M`` (>= 2).
    iterations : int
        Steps per timed pass.
    batch : int
        Independent filters stepped together per call.
    repeats : int
        Maximum timed passes per algorithm; the fastest is reported.
    budget_s : float
        Stop repeating once an algorithm has used this much wall time.
    """
    if num_taps < 2:
        raise ValueError("bench needs M >= 2")
    names = list(ALGORITHMS) if algorithms is None else list(algorithms)
    rng = make_rng(seed)
    shape = (iterations, batch, num_taps)
    x = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    w_o = rng.standard_normal(num_taps) + 1j * rng.standard_normal(num_taps)
    w_o /= np.linalg.norm(w_o)
    d = x @ np.conj(w_o) + 0.01 * rng.standard_normal((iterations, batch))
    times = {}
    for name in names:
        best = np.inf
        spent = 0
        for _ in range(repeats):
            filt = _make(name, num_taps, batch)
            t0 = time.perf_counter_ns()
            for n in range(iterations):
                filt.step(x[n], d[n])
            elapsed = time.perf_counter_ns() - t0
            best = min(best, elapsed)
            spent += elapsed
            if spent >= budget_s * 1e9:
                break
        times[name] = best / (iterations * batch)
    return times


def bench_sweep(sizes=(8, 16, 32), **kwargs) -> dict[int, dict[str, float]]:
    """:func:`bench_step_times` for several filter lengths."""
    return {m: bench_step_times(m, **kwargs) for m in sizes}
