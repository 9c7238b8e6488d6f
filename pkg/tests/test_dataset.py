import numpy as np
import pytest
from hypothesis import given, strategies as st

from bjp.dataset import Dataset, count_table, read_csv, write_csv
from bjp.errors import DataFormatError


class TestReadCsv:
    def test_basic(self):
        d = read_csv("a,b\n0,1\n1,0\n")
        assert (d.n_vars, d.n_rows, d.cardinalities) == (2, 2, (2, 2))
        assert d.names == ("a", "b")

    def test_floor_at_two(self):
        assert read_csv("a\n0\n0\n0\n").cardinalities == (2,)

    def test_ternary(self):
        assert read_csv("a,b\n2,0\n0,1\n").cardinalities == (3, 2)

    def test_crlf(self):
        assert read_csv("a,b\r\n0,1\r\n1,1\r\n").n_rows == 2

    @pytest.mark.parametrize("text", ["a,b\n0\n", "a,b\n0,x\n", "a,b\n", "", "a\n-1\n", "a\n1.5\n"])
    def test_malformed(self, text):
        with pytest.raises(DataFormatError):
            read_csv(text)

    def test_cardinality_override(self):
        d = read_csv("a,b\n0,1\n", [3, 4])
        assert d.cardinalities == (3, 4)
        with pytest.raises(DataFormatError):
            read_csv("a\n3\n", [2])

    def test_round_trip(self):
        d = Dataset([[0, 1, 2], [1, 0, 0]], names=["x", "y", "z"])
        assert read_csv(write_csv(d)) == d

    def test_values_read_only(self):
        d = read_csv("a\n1\n")
        with pytest.raises(ValueError):
            d.values[0, 0] = 0


class TestCountTable:
    def test_identical_columns(self):
        d = Dataset([[0, 0], [0, 0], [1, 1], [1, 1]])
        t = count_table(d, 0, 1, ())
        assert list(t.counts) == [()]
        np.testing.assert_array_equal(t.counts[()], [[2, 0], [0, 2]])

    def test_constant_conditioning_column(self):
        d = Dataset([[0, 1, 1], [1, 0, 1], [1, 1, 1]])
        t = count_table(d, 0, 1, {2})
        assert list(t.counts) == [(1,)]

    def test_keys_are_observed_configs(self):
        d = Dataset([[0, 0, 1, 0], [1, 1, 0, 1], [0, 1, 1, 0]])
        t = count_table(d, 0, 1, [3, 2])
        assert t.z == (2, 3)
        assert sorted(t.counts) == [(0, 1), (1, 0)]
        np.testing.assert_array_equal(t.counts[(1, 0)], [[1, 1], [0, 0]])

    @pytest.mark.parametrize("i,k,z", [(0, 0, ()), (0, 1, (1,)), (0, 1, (0, 2)), (0, 5, ())])
    def test_bad_indices(self, i, k, z):
        d = Dataset(np.zeros((3, 3), dtype=int))
        with pytest.raises((ValueError, IndexError)):
            count_table(d, i, k, z)

    @given(st.data())
    def test_conservation_and_z_order(self, data):
        seed = data.draw(st.integers(0, 10_000))
        rng = np.random.default_rng(seed)
        n_vars = data.draw(st.integers(2, 6))
        cards = [data.draw(st.integers(2, 3)) for _ in range(n_vars)]
        n_rows = data.draw(st.integers(1, 60))
        d = Dataset(np.stack([rng.integers(0, c, n_rows) for c in cards], axis=1), cards)
        i, k = data.draw(st.lists(st.integers(0, n_vars - 1), min_size=2, max_size=2, unique=True))
        rest = [v for v in range(n_vars) if v not in (i, k)]
        z = data.draw(st.lists(st.sampled_from(rest), unique=True)) if rest else []
        t = count_table(d, i, k, z)
        assert t.total() == n_rows
        assert all(m.sum() > 0 for m in t.counts.values())
        t2 = count_table(d, i, k, list(reversed(z)))
        assert t2.z == t.z and t2.counts.keys() == t.counts.keys()
        assert all(np.array_equal(t.counts[key], t2.counts[key]) for key in t.counts)
