import numpy as np
import pytest

from crmc.bench import OPERATION_COUNTS, _make, bench_step_times
from crmc.filters import ALGORITHMS
from crmc.sources import make_rng


class TestBench:

    def test_reports_every_algorithm(self):
        times = bench_step_times(4, iterations=5, batch=8, repeats=1)
        assert set(times) == set(ALGORITHMS)
        assert all(t > 0 for t in times.values())

    def test_subset(self):
        assert set(bench_step_times(4, iterations=3, batch=4, algorithms=["rls"])) == {"rls"}

    def test_rejects_tiny_arrays(self):
        with pytest.raises(ValueError):
            bench_step_times(1)

    def test_rls_crmc_comparable_at_16(self):
        times = bench_step_times(16, iterations=50, batch=256, algorithms=["rls", "crmc"])
        assert 1 / 3 <= times["crmc"] / times["rls"] <= 3

    def test_doubling_trend(self):
        small = bench_step_times(16, iterations=50, batch=512, algorithms=["clms", "crmc"])
        large = bench_step_times(32, iterations=50, batch=512, algorithms=["clms", "crmc"])
        assert large["clms"] / small["clms"] <= 2.5
        assert large["crmc"] / small["crmc"] >= 3.0

    def test_counts(self):
        assert OPERATION_COUNTS["clms"](16) == 33
        assert OPERATION_COUNTS["rls"](16) == 576
        assert OPERATION_COUNTS["crmc"](16) == 581

    def test_million_steps_at_m2(self):
        # 1000 filters in lockstep for 1000 steps
        rng = make_rng(12)
        n, batch = 1000, 1000
        x = (rng.standard_normal((n, batch, 2)) + 1j * rng.standard_normal((n, batch, 2))) / 2
        d = x @ np.array([0.6 - 0.2j, 0.3j]) + 0.01 * rng.standard_normal((n, batch))
        for name in ALGORITHMS:
            filt = _make(name, 2, batch)
            for k in range(n):
                filt.step(x[k], d[k])
            assert np.all(np.isfinite(filt.w))
