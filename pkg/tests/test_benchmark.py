import json
import math
import shutil
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halpern_lp import SolverConfig
from halpern_lp.benchmark import (
    BENCH_SCHEMA,
    BenchmarkRecord,
    run_benchmark,
    sgm10,
    size_class,
    summarize,
)

DATA = Path(__file__).parent / "data"


class TestSgm10:
    def test_zero(self):
        assert sgm10([0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)

    def test_pair(self):
        assert sgm10([10.0, 40.0]) == pytest.approx(math.sqrt(1000.0) - 10.0, abs=1e-9)

    @given(st.floats(0, 1e6), st.floats(0.1, 100))
    def test_single(self, t, shift):
        assert sgm10([t], shift) == pytest.approx(t, rel=1e-12, abs=1e-9)

    def test_against_direct_product(self):
        rng = np.random.default_rng(0)
        t = rng.uniform(0, 100, 7)
        assert sgm10(t) == pytest.approx(np.prod(t + 10) ** (1 / 7) - 10, rel=1e-12)

    def test_no_overflow(self):
        assert sgm10([3600.0] * 2000) == pytest.approx(3600.0, rel=1e-12)

    @pytest.mark.parametrize("bad", [[], [-1.0], [float("nan")]])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            sgm10(bad)


class TestRecords:
    def test_timeout_scored_at_limit(self):
        rec = BenchmarkRecord("a", "time_limit", 3612.5, time_limit=3600.0)
        assert rec.scored_time == 3600.0
        solved = BenchmarkRecord("b", "optimal", 12.0)
        assert solved.scored_time == 12.0
        summary = summarize([rec, solved])
        assert summary["total"]["solved"] == 1
        assert summary["total"]["sgm10"] == pytest.approx(sgm10([3600.0, 12.0]))

    @pytest.mark.parametrize("nnz,cls", [(0, "small"), (99_999, "small"), (999_999, "small"),
                                         (1_000_000, "medium"), (10_000_000, "medium"),
                                         (10_000_001, "large")])
    def test_size_classes(self, nnz, cls):
        assert size_class(nnz) == cls


class TestRunBenchmark:
    def test_empty_directory(self, tmp_path, caplog):
        report = run_benchmark(tmp_path)
        assert report["records"] == [] and report["summary"]["total"]["instances"] == 0
        assert "no MPS files" in caplog.text

    def test_directory_with_bad_file(self, tmp_path):
        shutil.copy(DATA / "simple.mps", tmp_path / "simple.mps")
        shutil.copy(DATA / "objsense_max.mps", tmp_path / "max.mps")
        (tmp_path / "broken.mps").write_text("NAME X\nNOPE\nENDATA\n")
        out = tmp_path / "out"
        report = run_benchmark(tmp_path, SolverConfig(epsilon=1e-6), out_dir=out)
        status = {r["name"]: r["status"] for r in report["records"]}
        assert status == {"broken.mps": "error", "max.mps": "optimal", "simple.mps": "optimal"}
        doc = json.loads((out / "benchmark.json").read_text())
        assert doc["schema"] == BENCH_SCHEMA
        assert doc["summary"]["small"]["solved"] == 2
        assert "Small" in (out / "benchmark.txt").read_text()

    def test_parallel_matches_serial(self, tmp_path):
        for name in ("simple.mps", "ranges.mps", "fx_bound.mps"):
            shutil.copy(DATA / name, tmp_path / name)
        cfg = SolverConfig(epsilon=1e-6)
        serial = run_benchmark(tmp_path, cfg)
        parallel = run_benchmark(tmp_path, cfg, workers=2)
        key = lambda r: (r["name"], r["status"], r["iterations"])  # noqa: E731
        assert [key(r) for r in serial["records"]] == [key(r) for r in parallel["records"]]

    def test_not_a_directory(self, tmp_path):
        with pytest.raises(NotADirectoryError):
            run_benchmark(tmp_path / "nothing")
