"""Structure optimizers: exhaustive enumeration and IBMAP-HC hill climbing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from . import _kernels
from .citest import CITestEngine
from .errors import InvariantError
from .graph import UndirectedGraph, edge_slots, from_mask
from .scores import ScoreBreakdown, bjp_score, edge_contributions, ib_score

ScoreFn = Callable[[UndirectedGraph, CITestEngine], ScoreBreakdown]

DEFAULT_MAX_N = 6
_CHUNK = 1 << 16


@dataclass
class SearchResult:
    best_graph: UndirectedGraph
    best_score: float
    iterations: int
    evaluations: int
    trajectory: list[tuple[tuple[int, int], float]] | None = None
    breakdown: ScoreBreakdown | None = field(default=None, repr=False)


def _posterior_tables(n: int, e: CITestEngine) -> tuple[np.ndarray, np.ndarray]:
    """Every test any graph on ``n`` nodes can ask for, indexed ``[v, k, zmask]``."""
    lp_ind = np.zeros((n, n, 1 << n), dtype=np.float64)
    lp_dep = np.zeros_like(lp_ind)
    for i, k in combinations(range(n), 2):
        others = [v for v in range(n) if v != i and v != k]
        for r in range(len(others) + 1):
            for z in combinations(others, r):
                zmask = sum(1 << v for v in z)
                a = e.log_posterior_independence(i, k, z)
                b = e.log_posterior_dependence(i, k, z)
                lp_ind[i, k, zmask] = lp_ind[k, i, zmask] = a
                lp_dep[i, k, zmask] = lp_dep[k, i, zmask] = b
    return lp_ind, lp_dep


def exhaustive_search(n: int, score: ScoreFn, e: CITestEngine, max_n: int = DEFAULT_MAX_N,
                      use_numba: bool | None = None) -> SearchResult:
    """Score all ``2**C(n,2)`` graphs and return the best one.

    Ties go to the smallest edge bitmask (bit b is the b-th lexicographic
    pair). For the two built-in scores the enumeration runs in a compiled
    kernel over precomputed test tables; any other callable is scored graph
    by graph.
    """
    if n > max_n:
        raise ValueError(f"exhaustive search capped at n={max_n}, got n={n}")
    if n != e.n_vars:
        raise ValueError(f"n={n} but dataset has {e.n_vars} variables")
    slots = edge_slots(n)
    n_graphs = 1 << len(slots)

    if score is bjp_score or score is ib_score:
        lp_ind, lp_dep = _posterior_tables(n, e)
        pa = np.array([a for a, _ in slots], dtype=np.int64)
        pb = np.array([b for _, b in slots], dtype=np.int64)
        best_mask, best_val = 0, -math.inf
        for lo in range(0, n_graphs, _CHUNK):
            hi = min(n_graphs, lo + _CHUNK)
            vals = _kernels.score_masks(n, score is bjp_score, lo, hi, pa, pb,
                                        lp_ind, lp_dep, use_numba=use_numba)
            j = int(np.argmax(vals))
            if vals[j] > best_val:
                best_mask, best_val = lo + j, float(vals[j])
        best = from_mask(n, best_mask)
        bd = score(best, e)
        if abs(bd.total - best_val) > 1e-12:
            raise InvariantError(f"kernel score {best_val!r} != rescored {bd.total!r}")
        return SearchResult(best, best_val, n_graphs, n_graphs, None, bd)

    best_bd, best_val = None, -math.inf
    for mask in range(n_graphs):
        bd = score(from_mask(n, mask), e)
        if bd.total > best_val:
            best_bd, best_val = bd, bd.total
    return SearchResult(best_bd.graph, best_val, n_graphs, n_graphs, None, best_bd)


def hill_climb(n: int, score: ScoreFn, e: CITestEngine,
               max_iterations: int | None = None) -> SearchResult:
    """IBMAP-HC: greedy single-edge flips starting from the empty graph.

    Each step proposes one neighbour, obtained by flipping the pair with the
    lowest local contribution to the current score (ties by pair order). The
    proposal is kept only if it strictly improves the score; the first
    rejection ends the search.
    """
    if n != e.n_vars:
        raise ValueError(f"n={n} but dataset has {e.n_vars} variables")
    cap = max_iterations if max_iterations is not None else max(1, 2 * math.comb(n, 2) * n)
    current = score(UndirectedGraph(n), e)
    evaluations = 1
    iterations = 0
    trajectory: list[tuple[tuple[int, int], float]] = []
    while True:
        iterations += 1
        contrib = edge_contributions(current)
        if not contrib:
            break
        i, j = min(contrib, key=lambda p: (contrib[p], p))
        proposal = score(current.graph.with_flipped(i, j), e)
        evaluations += 1
        if proposal.total > current.total:
            current = proposal
            trajectory.append(((i, j), proposal.total))
        else:
            break
        if iterations >= cap:
            raise InvariantError(f"hill climbing hit the iteration cap ({cap})")
    return SearchResult(current.graph, current.total, iterations, evaluations, trajectory, current)
