"""Structure scores built from conditional (in)dependence posteriors.

Both scores describe a graph by its Markov blanket closure: for each node
``v``, independence of ``v`` from every non-neighbour given the blanket and
dependence on every neighbour given the rest of the blanket.

``ib_score`` treats all ``n(n-1)`` closure assertions as independent and sums
their log posteriors. ``bjp_score`` walks the blankets in ascending-degree
order and evaluates an assertion from data only when its other endpoint has
not been visited yet; the remaining half is implied by blankets already
scored and contributes log 1 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .citest import Assertion, CITestEngine
from .graph import DegreeOrdering, UndirectedGraph, blanket, degree_ordering

EVALUATED = "evaluated"
INFERRED = "inferred"


@dataclass(frozen=True)
class ScoredAssertion:
    assertion: Assertion
    source: str
    log_value: float
    node: int  # variable whose blanket produced the assertion

    def __post_init__(self):
        if self.source == INFERRED and self.log_value != 0.0:
            raise ValueError("inferred assertions carry log value 0")
        if self.source == EVALUATED and not self.log_value <= 0.0:
            raise ValueError(f"log posterior must be <= 0, got {self.log_value}")


@dataclass
class ScoreBreakdown:
    graph: UndirectedGraph
    ordering: DegreeOrdering
    entries: list[ScoredAssertion] = field(default_factory=list)
    total: float = 0.0
    score_name: str = ""

    def evaluated(self) -> list[ScoredAssertion]:
        return [e for e in self.entries if e.source == EVALUATED]

    def inferred(self) -> list[ScoredAssertion]:
        return [e for e in self.entries if e.source == INFERRED]

    def blanket_entries(self, v: int) -> list[ScoredAssertion]:
        return [e for e in self.entries if e.node == v]

    def to_report(self) -> str:
        """One tab-separated line per assertion, in scoring order."""
        lines = [f"# score={self.score_name} n={self.graph.n} total={self.total!r}",
                 "node\tkind\ti\tk\tz\tsource\tlog_value"]
        for e in self.entries:
            a = e.assertion
            z = ",".join(map(str, a.z)) or "-"
            lines.append(f"{e.node}\t{a.kind}\t{a.i}\t{a.k}\t{z}\t{e.source}\t{e.log_value!r}")
        return "\n".join(lines) + "\n"


def closure_assertion(g: UndirectedGraph, v: int, k: int) -> Assertion:
    mb = blanket(g, v)
    if k in mb:
        return Assertion.dep(v, k, mb - {k})
    return Assertion.indep(v, k, mb)


def blanket_closure(g: UndirectedGraph, i: int) -> list[Assertion]:
    """The ``n - 1`` assertions that pin down the blanket of node ``i``."""
    g.neighbors(i)
    return [closure_assertion(g, i, k) for k in range(g.n) if k != i]


def _check_dims(g: UndirectedGraph, e: CITestEngine) -> None:
    if g.n != e.n_vars:
        raise ValueError(f"graph has {g.n} nodes but dataset has {e.n_vars} variables")


def bjp_score(g: UndirectedGraph, e: CITestEngine) -> ScoreBreakdown:
    """Blankets joint posterior of ``g`` (log space)."""
    _check_dims(g, e)
    order = degree_ordering(g)
    entries = []
    total = 0.0
    for p, v in enumerate(order.psi):
        for k in range(g.n):
            if k == v:
                continue
            a = closure_assertion(g, v, k)
            if order.rank[k] > p:
                lv = e.log_posterior(a)
                total += lv
                entries.append(ScoredAssertion(a, EVALUATED, lv, v))
            else:
                entries.append(ScoredAssertion(a, INFERRED, 0.0, v))
    return ScoreBreakdown(g, order, entries, total, "bjp")


def ib_score(g: UndirectedGraph, e: CITestEngine) -> ScoreBreakdown:
    """Closure posterior under mutual independence of all assertions (log space)."""
    _check_dims(g, e)
    entries = []
    total = 0.0
    for v in range(g.n):
        for k in range(g.n):
            if k == v:
                continue
            a = closure_assertion(g, v, k)
            lv = e.log_posterior(a)
            total += lv
            entries.append(ScoredAssertion(a, EVALUATED, lv, v))
    return ScoreBreakdown(g, degree_ordering(g), entries, total, "ib")


SCORES = {"bjp": bjp_score, "ib": ib_score}


def edge_contribution(b: ScoreBreakdown, i: int, j: int) -> float:
    """Summed log value of the evaluated assertions whose targets are ``{i, j}``."""
    n = b.graph.n
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ValueError(f"invalid pair ({i}, {j}) for n={n}")
    pair = (min(i, j), max(i, j))
    return sum((x.log_value for x in b.entries
                if x.source == EVALUATED and x.assertion.pair == pair), 0.0)


def edge_contributions(b: ScoreBreakdown) -> dict[tuple[int, int], float]:
    """``edge_contribution`` for every pair at once."""
    n = b.graph.n
    out = {(i, j): 0.0 for i in range(n) for j in range(i + 1, n)}
    for x in b.entries:
        if x.source == EVALUATED:
            out[x.assertion.pair] += x.log_value
    return out
