import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import stats

from bjp import _kernels
from bjp.graph import edge_slots


class TestRandomStream:
    def test_uniform_range_and_distribution(self):
        keys = _kernels.row_keys(_kernels.seed_key(1), np.arange(20000))
        u = _kernels.uniforms(keys, 3)
        assert u.min() >= 0.0 and u.max() < 1.0
        assert stats.kstest(u, "uniform").pvalue > 1e-3

    def test_counters_are_uncorrelated(self):
        keys = _kernels.row_keys(_kernels.seed_key(2), np.arange(20000))
        a, b = _kernels.uniforms(keys, 0), _kernels.uniforms(keys, 1)
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.03

    def test_seed_keys_distinct(self):
        keys = {int(_kernels.seed_key(s)) for s in range(10000)}
        assert len(keys) == 10000
        assert _kernels.seed_key(2**70) == _kernels.seed_key(2**70)


class TestCiLogliks:
    def test_empty_configurations_contribute_nothing(self):
        counts = np.array([[[2, 1], [0, 3]]])
        padded = np.concatenate([counts, np.zeros((2, 2, 2), dtype=counts.dtype)])
        for use_numba in (True, False):
            assert _kernels.ci_logliks(counts, 1.0, 1.0, use_numba=use_numba) == \
                _kernels.ci_logliks(padded, 1.0, 1.0, use_numba=use_numba)

    def test_backends_agree_on_large_tables(self):
        rng = np.random.default_rng(0)
        counts = rng.integers(0, 500, size=(30, 3, 4))
        a = _kernels.ci_logliks(counts, 0.5, 2.0, use_numba=True)
        b = _kernels.ci_logliks(counts, 0.5, 2.0, use_numba=False)
        np.testing.assert_allclose(a, b, rtol=1e-13)


class TestScoreMasks:
    @pytest.mark.parametrize("n", [2, 4, 5])
    @pytest.mark.parametrize("bjp", [True, False])
    def test_backends_bit_identical(self, n, bjp):
        rng = np.random.default_rng(n)
        lp_ind = -rng.exponential(size=(n, n, 1 << n))
        lp_dep = -rng.exponential(size=(n, n, 1 << n))
        slots = edge_slots(n)
        pa = np.array([a for a, _ in slots], dtype=np.int64)
        pb = np.array([b for _, b in slots], dtype=np.int64)
        hi = 1 << len(slots)
        a = _kernels.score_masks(n, bjp, 0, hi, pa, pb, lp_ind, lp_dep, use_numba=True)
        b = _kernels.score_masks(n, bjp, 0, hi, pa, pb, lp_ind, lp_dep, use_numba=False)
        assert np.array_equal(a, b)


def test_env_flag_selects_numpy():
    env = dict(os.environ, BJP_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from bjp import _kernels; print(_kernels.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
