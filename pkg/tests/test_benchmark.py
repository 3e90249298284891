import importlib.util
from pathlib import Path

import pytest

from ncclark import _kernels as K

pytestmark = pytest.mark.skipif(K.numba_impl is None, reason="numba not installed")


def test_benchmark_backends_agree():
    path = Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    before = K.BACKEND
    rows = mod.run(2, 10, 1)
    assert K.BACKEND == before
    assert {r["kernel"] for r in rows} == {"series_mul", "series_reciprocal", "gram_block", "series_eval"}
    assert all(r["maxDeviation"] < 1e-12 for r in rows)
