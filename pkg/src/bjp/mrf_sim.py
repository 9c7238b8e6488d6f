"""Synthetic Markov networks: clique potentials and Gibbs sampling."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .dataset import Dataset
from .errors import DataFormatError
from .graph import UndirectedGraph

MAX_CLIQUE_SIZE = 12
BURN_IN = 100
ITERATIONS = 1000
MODEL_FORMAT = "bjp-mrf"


def maximal_cliques(g: UndirectedGraph) -> list[tuple[int, ...]]:
    """All maximal cliques (Bron-Kerbosch with pivoting), sorted.

    Isolated nodes come back as singleton cliques.
    """
    adj = [g.neighbors(v) for v in range(g.n)]
    out: list[tuple[int, ...]] = []
    stack = [(frozenset(), frozenset(range(g.n)), frozenset())]
    while stack:
        r, p, x = stack.pop()
        if not p and not x:
            if r:
                out.append(tuple(sorted(r)))
            continue
        pivot = max(p | x, key=lambda u: (len(adj[u] & p), -u))
        for v in sorted(p - adj[pivot]):
            stack.append((r | {v}, p & adj[v], x & adj[v]))
            p = p - {v}
            x = x | {v}
    return sorted(out)


@dataclass(eq=False)
class MrfModel:
    """Graph, maximal cliques and one strictly positive table per clique.

    ``potentials[c]`` has shape ``[cardinalities[v] for v in cliques[c]]``;
    flattened in C order it lists the clique configurations
    lexicographically.
    """

    graph: UndirectedGraph
    cardinalities: tuple[int, ...]
    cliques: list[tuple[int, ...]]
    potentials: list[np.ndarray]

    def __post_init__(self):
        self.cardinalities = tuple(int(c) for c in self.cardinalities)
        if len(self.cardinalities) != self.graph.n:
            raise ValueError("one cardinality per node required")
        if any(c < 1 for c in self.cardinalities):
            raise ValueError("cardinalities must be positive")
        if sorted(tuple(sorted(c)) for c in self.cliques) != maximal_cliques(self.graph):
            raise ValueError("cliques are not the maximal cliques of the graph")
        if len(self.potentials) != len(self.cliques):
            raise ValueError("one potential table per clique required")
        pots = []
        for members, table in zip(self.cliques, self.potentials):
            t = np.asarray(table, dtype=np.float64)
            shape = tuple(self.cardinalities[v] for v in members)
            if t.shape != shape:
                t = t.reshape(shape)
            if not np.all(t > 0) or not np.all(np.isfinite(t)):
                raise ValueError(f"potential of clique {members} must be finite and > 0")
            pots.append(t)
        self.potentials = pots
        self._flat = None

    @property
    def n(self) -> int:
        return self.graph.n

    def kernel_arrays(self) -> tuple:
        """Flattened CSR-style layout consumed by the Gibbs kernels.

        Each table is divided by its maximum, which leaves every conditional
        unchanged and keeps long products away from underflow.
        """
        if self._flat is None:
            n = self.n
            cards = np.array(self.cardinalities, dtype=np.int64)
            cl_ptr, members, strides, pot_ptr, pots = [0], [], [], [0], []
            var_lists: list[list[int]] = [[] for _ in range(n)]
            for c, (mem, table) in enumerate(zip(self.cliques, self.potentials)):
                stride = 1
                st = []
                for v in reversed(mem):
                    st.append(stride)
                    stride *= self.cardinalities[v]
                members.extend(mem)
                strides.extend(reversed(st))
                cl_ptr.append(len(members))
                flat = table.ravel() / table.max()
                pots.extend(flat.tolist())
                pot_ptr.append(len(pots))
                for v in mem:
                    var_lists[v].append(c)
            var_ptr = np.cumsum([0] + [len(l) for l in var_lists]).astype(np.int64)
            var_cl = np.array([c for l in var_lists for c in l], dtype=np.int64)
            self._flat = (cards, var_ptr, var_cl,
                          np.array(cl_ptr, dtype=np.int64), np.array(members, dtype=np.int64),
                          np.array(strides, dtype=np.int64), np.array(pot_ptr[:-1], dtype=np.int64),
                          np.array(pots, dtype=np.float64))
        return self._flat

    # -- model file ----------------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "format": MODEL_FORMAT,
            "version": 1,
            "n": self.n,
            "cardinalities": list(self.cardinalities),
            "edges": [list(e) for e in self.graph.sorted_edges()],
            "cliques": [{"members": list(m), "potential": t.ravel().tolist()}
                        for m, t in zip(self.cliques, self.potentials)],
        }
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "MrfModel":
        try:
            doc = json.loads(text)
            if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
                raise DataFormatError(f"not a {MODEL_FORMAT} model file")
            g = UndirectedGraph(doc["n"], [tuple(e) for e in doc["edges"]])
            cliques = [tuple(c["members"]) for c in doc["cliques"]]
            pots = [np.array(c["potential"], dtype=np.float64) for c in doc["cliques"]]
            return cls(g, tuple(doc["cardinalities"]), cliques, pots)
        except DataFormatError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"invalid model file: {exc}") from None


def random_model(g: UndirectedGraph, cardinalities: Sequence[int] | None = None,
                 rng: np.random.Generator | None = None,
                 max_clique_size: int = MAX_CLIQUE_SIZE) -> MrfModel:
    """Model on ``g`` with i.i.d. uniform(0, 1) potentials on its maximal cliques."""
    rng = rng if rng is not None else np.random.default_rng()
    cards = tuple(cardinalities) if cardinalities is not None else (2,) * g.n
    cliques = maximal_cliques(g)
    biggest = max((len(c) for c in cliques), default=0)
    if biggest > max_clique_size:
        raise ValueError(f"largest clique has {biggest} members, cap is {max_clique_size}")
    pots = []
    for members in cliques:
        size = int(np.prod([cards[v] for v in members]))
        vals = rng.random(size)
        while np.any(vals == 0.0):
            zero = vals == 0.0
            vals[zero] = rng.random(int(zero.sum()))
        pots.append(vals.reshape([cards[v] for v in members]))
    return MrfModel(g, cards, cliques, pots)


def conditional_distribution(m: MrfModel, i: int, assignment: Sequence[int]) -> np.ndarray:
    """Distribution of ``X_i`` given every other variable (``assignment[i]`` ignored)."""
    if not 0 <= i < m.n:
        raise IndexError(f"variable {i} out of range")
    state = [int(s) for s in assignment]
    if len(state) != m.n:
        raise ValueError(f"assignment has {len(state)} entries, model has {m.n} variables")
    for v, s in enumerate(state):
        if v != i and not 0 <= s < m.cardinalities[v]:
            raise ValueError(f"state {s} invalid for variable {v}")
    prob = np.ones(m.cardinalities[i])
    for members, table in zip(m.cliques, m.potentials):
        if i not in members:
            continue
        idx = tuple(slice(None) if v == i else state[v] for v in members)
        prob = prob * (table[idx] / table.max())
    return prob / prob.sum()


def joint_distribution(m: MrfModel, max_states: int = 1 << 20) -> np.ndarray:
    """Exact joint by enumerating every state; array indexed by the state tuple."""
    size = int(np.prod(m.cardinalities))
    if size > max_states:
        raise ValueError(f"{size} joint states exceeds the enumeration cap {max_states}")
    joint = np.empty(m.cardinalities, dtype=np.float64)
    for state in itertools.product(*(range(c) for c in m.cardinalities)):
        p = 1.0
        for members, table in zip(m.cliques, m.potentials):
            p *= table[tuple(state[v] for v in members)]
        joint[state] = p
    return joint / joint.sum()


def _as_seed(seed) -> int:
    if isinstance(seed, np.random.Generator):
        return int(seed.integers(0, 2**63 - 1))
    return int(seed)


def gibbs_sample(m: MrfModel, n_rows: int, burn_in: int = BURN_IN,
                 iterations_per_sample: int = ITERATIONS, seed=0, row_start: int = 0,
                 use_numba: bool | None = None) -> Dataset:
    """Draw ``n_rows`` samples, each from its own chain.

    Every chain starts from a uniformly random state, runs ``burn_in`` plus
    ``iterations_per_sample`` full sweeps (variables resampled in index
    order), and emits its final state. Row ``r`` depends only on
    ``(seed, row_start + r)``, so a longer sample extends a shorter one.
    ``seed`` may be an int or a numpy Generator.
    """
    if n_rows < 1:
        raise ValueError(f"n_rows must be >= 1, got {n_rows}")
    if burn_in < 0 or iterations_per_sample < 0:
        raise ValueError("sweep counts must be non-negative")
    key = _kernels.seed_key(_as_seed(seed))
    values = _kernels.gibbs(key, row_start, n_rows, burn_in + iterations_per_sample,
                            m.kernel_arrays(), use_numba=use_numba)
    return Dataset(values, [max(2, c) for c in m.cardinalities])
