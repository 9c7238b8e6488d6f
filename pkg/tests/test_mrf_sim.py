import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bjp.errors import DataFormatError
from bjp.graph import UndirectedGraph, gen_scale_free
from bjp.mrf_sim import (BURN_IN, ITERATIONS, MrfModel, conditional_distribution, gibbs_sample,
                         joint_distribution, maximal_cliques, random_model)

from conftest import random_graph
from oracles import brute_joint, brute_max_clique_sets

EDGE = UndirectedGraph(2, [(0, 1)])
AGREE = MrfModel(EDGE, (2, 2), [(0, 1)], [np.array([[0.9, 0.1], [0.1, 0.9]])])


def _uniform_model(g):
    cliques = maximal_cliques(g)
    return MrfModel(g, (2,) * g.n, cliques, [np.ones((2,) * len(c)) for c in cliques])


class TestCliques:
    def test_examples(self, star):
        assert maximal_cliques(EDGE) == [(0, 1)]
        assert maximal_cliques(UndirectedGraph(3)) == [(0,), (1,), (2,)]
        assert maximal_cliques(star) == [(0, 1), (0, 2), (0, 3)]
        assert maximal_cliques(UndirectedGraph(0)) == []

    def test_against_brute_force_and_networkx(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(1, 9))
            g = random_graph(rng, n, float(rng.random()))
            want = brute_max_clique_sets(n, g.edges)
            assert maximal_cliques(g) == want
            nxg = nx.Graph()
            nxg.add_nodes_from(range(n))
            nxg.add_edges_from(g.edges)
            assert sorted(tuple(sorted(c)) for c in nx.find_cliques(nxg)) == want

    def test_larger_graph_matches_networkx(self):
        g = gen_scale_free(60, 3, np.random.default_rng(2))
        nxg = nx.Graph(list(g.edges))
        assert maximal_cliques(g) == sorted(tuple(sorted(c)) for c in nx.find_cliques(nxg))


class TestModel:
    def test_random_model_shapes(self, star):
        m = random_model(star, rng=np.random.default_rng(0))
        assert m.cliques == [(0, 1), (0, 2), (0, 3)]
        for t in m.potentials:
            assert t.shape == (2, 2)
            assert np.all((t > 0) & (t < 1))

    def test_empty_graph(self):
        m = random_model(UndirectedGraph(3), rng=np.random.default_rng(0))
        assert [t.shape for t in m.potentials] == [(2,), (2,), (2,)]

    def test_mixed_cardinalities(self):
        m = random_model(EDGE, (3, 2), np.random.default_rng(0))
        assert m.potentials[0].shape == (3, 2)

    def test_clique_cap(self):
        k5 = UndirectedGraph(5, itertools.combinations(range(5), 2))
        with pytest.raises(ValueError):
            random_model(k5, rng=np.random.default_rng(0), max_clique_size=4)

    def test_validation(self):
        with pytest.raises(ValueError):
            MrfModel(EDGE, (2, 2), [(0,), (1,)], [np.ones(2), np.ones(2)])
        with pytest.raises(ValueError):
            MrfModel(EDGE, (2, 2), [(0, 1)], [np.array([[1.0, 0.0], [1.0, 1.0]])])
        with pytest.raises(ValueError):
            MrfModel(EDGE, (2,), [(0, 1)], [np.ones((2, 2))])

    def test_json_round_trip_exact(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            g = random_graph(rng, int(rng.integers(1, 7)), 0.5)
            cards = [int(c) for c in rng.integers(2, 4, size=g.n)]
            m = random_model(g, cards, rng)
            back = MrfModel.from_json(m.to_json())
            assert back.graph == m.graph and back.cardinalities == m.cardinalities
            assert back.cliques == m.cliques
            for a, b in zip(back.potentials, m.potentials):
                assert np.array_equal(a, b)

    @pytest.mark.parametrize("text", ["{}", "[1]", '{"format": "bjp-mrf"}', "{nope"])
    def test_bad_model_file(self, text):
        with pytest.raises(DataFormatError):
            MrfModel.from_json(text)


class TestConditional:
    def test_uniform_potentials(self, star):
        p = conditional_distribution(_uniform_model(star), 0, [0, 1, 0, 1])
        np.testing.assert_allclose(p, [0.5, 0.5])

    def test_agreement_potential(self):
        np.testing.assert_allclose(conditional_distribution(AGREE, 1, [0, 0]), [0.9, 0.1])

    def test_invalid_state(self):
        with pytest.raises(ValueError):
            conditional_distribution(AGREE, 1, [2, 0])
        with pytest.raises(IndexError):
            conditional_distribution(AGREE, 2, [0, 0])

    @settings(max_examples=100)
    @given(st.integers(0, 2**32 - 1))
    def test_normalized_and_blanket_local(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        g = random_graph(rng, n, 0.4)
        cards = [int(c) for c in rng.integers(2, 4, size=n)]
        m = random_model(g, cards, rng)
        state = [int(rng.integers(0, c)) for c in cards]
        i = int(rng.integers(0, n))
        p = conditional_distribution(m, i, state)
        assert abs(p.sum() - 1.0) <= 1e-12
        for u in range(n):
            if u == i or u in g.neighbors(i):
                continue
            other = list(state)
            other[u] = (other[u] + 1) % cards[u]
            assert np.array_equal(conditional_distribution(m, i, other), p)

    def test_matches_joint(self):
        rng = np.random.default_rng(9)
        m = random_model(random_graph(rng, 4, 0.6), rng=rng)
        joint = brute_joint(4, m.cardinalities, m.cliques, m.potentials)
        np.testing.assert_allclose(joint_distribution(m), joint, rtol=1e-12)
        state = [1, 0, 1, 1]
        col = joint[(slice(None),) + tuple(state[1:])]
        np.testing.assert_allclose(conditional_distribution(m, 0, state), col / col.sum(), rtol=1e-12)


class TestGibbs:
    def test_defaults(self):
        assert (BURN_IN, ITERATIONS) == (100, 1000)

    def test_empty_graph_marginals(self):
        d = gibbs_sample(_uniform_model(UndirectedGraph(3)), 10000, seed=1)
        means = d.values.mean(axis=0)
        assert np.all((means >= 0.45) & (means <= 0.55))

    def test_single_edge_agreement(self):
        joint = brute_joint(2, (2, 2), AGREE.cliques, AGREE.potentials)
        exact = joint[0, 0] + joint[1, 1]
        d = gibbs_sample(AGREE, 10000, seed=2)
        agree = np.mean(d.values[:, 0] == d.values[:, 1])
        assert abs(agree - exact) <= 0.03

    def test_deterministic_and_prefix(self, star):
        m = random_model(star, rng=np.random.default_rng(0))
        a = gibbs_sample(m, 300, 5, 20, seed=11)
        b = gibbs_sample(m, 300, 5, 20, seed=11)
        assert a == b
        assert gibbs_sample(m, 100, 5, 20, seed=11) == a.head(100)
        tail = gibbs_sample(m, 200, 5, 20, seed=11, row_start=100)
        assert np.array_equal(tail.values, a.values[100:])
        assert gibbs_sample(m, 300, 5, 20, seed=12) != a

    def test_backends_bit_identical(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            g = random_graph(rng, int(rng.integers(1, 7)), 0.5)
            m = random_model(g, [int(c) for c in rng.integers(2, 4, size=g.n)], rng)
            a = gibbs_sample(m, 200, 3, 10, seed=7, use_numba=True)
            b = gibbs_sample(m, 200, 3, 10, seed=7, use_numba=False)
            assert np.array_equal(a.values, b.values)

    def test_generator_seed(self):
        m = _uniform_model(EDGE)
        a = gibbs_sample(m, 50, 1, 1, seed=np.random.default_rng(3))
        b = gibbs_sample(m, 50, 1, 1, seed=np.random.default_rng(3))
        assert a == b

    def test_states_in_range(self):
        m = random_model(EDGE, (3, 2), np.random.default_rng(0))
        d = gibbs_sample(m, 500, 2, 5, seed=0)
        assert d.values[:, 0].max() <= 2 and d.values[:, 1].max() <= 1
        assert d.cardinalities == (3, 2)

    @pytest.mark.parametrize("kw", [{"n_rows": 0}, {"n_rows": 5, "burn_in": -1}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            gibbs_sample(AGREE, **kw)
