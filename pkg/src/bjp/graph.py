"""Undirected independence structures over nodes ``0..n-1``.

Besides the graph value type this module holds the structural helpers the
scores and the experiment harness need: Markov blankets, the ascending-degree
ordering, irregularity, edge Hamming distance, topology generators and the
plain-text edge-list format.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import DataFormatError

Edge = tuple[int, int]


def _canonical(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


class UndirectedGraph:
    """Immutable simple undirected graph.

    Edges are stored once, as ``(min, max)`` pairs. Two graphs compare equal
    when they have the same node count and the same edge set.
    """

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        n = int(n)
        if n < 0:
            raise ValueError(f"node count must be non-negative, got {n}")
        canon = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            canon.add(_canonical(i, j))
        adj: list[set[int]] = [set() for _ in range(n)]
        for i, j in canon:
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(canon))
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    def __setattr__(self, name, value):
        raise AttributeError("UndirectedGraph is immutable")

    def __eq__(self, other):
        if not isinstance(other, UndirectedGraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"UndirectedGraph(n={self.n}, edges={sorted(self.edges)})"

    def _check_node(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"node {i} out of range for n={self.n}")

    def neighbors(self, i: int) -> frozenset[int]:
        self._check_node(i)
        return self._adj[i]

    def has_edge(self, i: int, j: int) -> bool:
        return _canonical(i, j) in self.edges

    def degree(self, i: int) -> int:
        self._check_node(i)
        return len(self._adj[i])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def with_flipped(self, i: int, j: int) -> "UndirectedGraph":
        """Copy of this graph with the edge slot ``{i, j}`` toggled."""
        e = _canonical(i, j)
        edges = set(self.edges)
        edges.symmetric_difference_update({e})
        return UndirectedGraph(self.n, edges)

    def relabel(self, perm) -> "UndirectedGraph":
        """Graph with node ``v`` renamed to ``perm[v]``."""
        return UndirectedGraph(self.n, ((perm[i], perm[j]) for i, j in self.edges))


def blanket(g: UndirectedGraph, i: int) -> frozenset[int]:
    """Markov blanket of node ``i``: its set of neighbours."""
    return g.neighbors(i)


@dataclass(frozen=True)
class DegreeOrdering:
    psi: tuple[int, ...]
    rank: tuple[int, ...]


def degree_ordering(g: UndirectedGraph) -> DegreeOrdering:
    """Nodes sorted by ascending degree, ties broken by ascending index."""
    deg = g.degrees()
    psi = tuple(sorted(range(g.n), key=lambda v: (deg[v], v)))
    rank = [0] * g.n
    for p, v in enumerate(psi):
        rank[v] = p
    return DegreeOrdering(psi, tuple(rank))


def irregularity(g: UndirectedGraph) -> int:
    deg = g.degrees()
    return sum(abs(deg[i] - deg[j]) for i, j in g.edges)


def hamming_distance(g1: UndirectedGraph, g2: UndirectedGraph) -> int:
    """Number of false-positive plus false-negative edges."""
    if g1.n != g2.n:
        raise ValueError(f"node-count mismatch: {g1.n} vs {g2.n}")
    return len(g1.edges ^ g2.edges)


# -- edge-slot bitmasks (used by exhaustive search) -------------------------


def edge_slots(n: int) -> list[Edge]:
    """All ``C(n, 2)`` node pairs in lexicographic order; slot b is bit b."""
    return list(combinations(range(n), 2))


def from_mask(n: int, mask: int) -> UndirectedGraph:
    slots = edge_slots(n)
    return UndirectedGraph(n, (slots[b] for b in range(len(slots)) if mask >> b & 1))


def to_mask(g: UndirectedGraph) -> int:
    index = {e: b for b, e in enumerate(edge_slots(g.n))}
    return sum(1 << index[e] for e in g.edges)


# -- generators --------------------------------------------------------------


def gen_hub(n: int, h: int, rng=None) -> UndirectedGraph:
    """Hub topology: nodes ``0..h-1`` are hubs joined to every non-hub node.

    Hubs are not connected to each other. The construction is deterministic;
    ``rng`` is accepted for signature uniformity with the other generators.
    """
    if not 1 <= h < n:
        raise ValueError(f"hub count must satisfy 1 <= h < n, got h={h}, n={n}")
    return UndirectedGraph(n, ((a, b) for a in range(h) for b in range(h, n)))


def gen_star(n: int, rng=None) -> UndirectedGraph:
    return gen_hub(n, 1, rng)


def gen_scale_free(n: int, m: int, rng: np.random.Generator) -> UndirectedGraph:
    """Barabasi-Albert preferential attachment.

    Starts from a clique on nodes ``0..m``; every later node attaches to
    ``m`` distinct earlier nodes drawn with probability proportional to
    their current degree.
    """
    if not 1 <= m < n:
        raise ValueError(f"attachment count must satisfy 1 <= m < n, got m={m}, n={n}")
    edges = list(combinations(range(m + 1), 2))
    deg = np.zeros(n, dtype=np.float64)
    deg[: m + 1] = m
    for v in range(m + 1, n):
        p = deg[:v] / deg[:v].sum()
        targets = rng.choice(v, size=m, replace=False, p=p)
        for t in targets:
            edges.append((int(t), v))
            deg[t] += 1
        deg[v] = m
    return UndirectedGraph(n, edges)


def gen_random(n: int, p: float, rng: np.random.Generator) -> UndirectedGraph:
    """Erdos-Renyi G(n, p) over the lexicographic edge slots."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    slots = edge_slots(n)
    keep = rng.random(len(slots)) < p
    return UndirectedGraph(n, (e for e, k in zip(slots, keep) if k))


# -- edge-list text format ---------------------------------------------------


def read_edge_list(text: str) -> UndirectedGraph:
    """Parse the edge-list format: a node-count line, then one ``i j`` per line.

    Blank lines and lines starting with ``#`` are skipped. Duplicate edges
    produce a warning and are merged; self-loops are rejected.
    """
    n = None
    edges: list[Edge] = []
    seen: set[Edge] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise DataFormatError(f"line {lineno}: non-integer token in {raw!r}") from None
        if n is None:
            if len(nums) != 1 or nums[0] < 0:
                raise DataFormatError(f"line {lineno}: expected a node count, got {raw!r}")
            n = nums[0]
            continue
        if len(nums) != 2:
            raise DataFormatError(f"line {lineno}: expected 'i j', got {raw!r}")
        i, j = nums
        if not (0 <= i < n and 0 <= j < n):
            raise DataFormatError(f"line {lineno}: node index out of range for n={n}")
        if i == j:
            raise DataFormatError(f"line {lineno}: self-loop on node {i}")
        e = _canonical(i, j)
        if e in seen:
            warnings.warn(f"line {lineno}: duplicate edge {e} ignored", stacklevel=2)
            continue
        seen.add(e)
        edges.append(e)
    if n is None:
        raise DataFormatError("edge list is empty: missing node-count line")
    return UndirectedGraph(n, edges)


def write_edge_list(g: UndirectedGraph) -> str:
    lines = [str(g.n)] + [f"{i} {j}" for i, j in g.sorted_edges()]
    return "\n".join(lines) + "\n"
