"""Structure learning for discrete Markov networks with the BJP and IB scores."""

from .citest import Assertion, CITestEngine
from .dataset import ContingencyTable, Dataset, count_table, read_csv, write_csv
from .errors import BJPError, DataFormatError, InvariantError
from .graph import (DegreeOrdering, UndirectedGraph, blanket, degree_ordering, gen_hub,
                    gen_random, gen_scale_free, gen_star, hamming_distance, irregularity,
                    read_edge_list, write_edge_list)
from .mrf_sim import (MrfModel, conditional_distribution, gibbs_sample, joint_distribution,
                      maximal_cliques, random_model)
from .scores import (ScoreBreakdown, ScoredAssertion, bjp_score, blanket_closure,
                     edge_contribution, ib_score)
from .search import SearchResult, exhaustive_search, hill_climb

__version__ = "0.1.0"

__all__ = [
    "Assertion", "CITestEngine",
    "ContingencyTable", "Dataset", "count_table", "read_csv", "write_csv",
    "BJPError", "DataFormatError", "InvariantError",
    "DegreeOrdering", "UndirectedGraph", "blanket", "degree_ordering", "gen_hub", "gen_random",
    "gen_scale_free", "gen_star", "hamming_distance", "irregularity", "read_edge_list",
    "write_edge_list",
    "MrfModel", "conditional_distribution", "gibbs_sample", "joint_distribution",
    "maximal_cliques", "random_model",
    "ScoreBreakdown", "ScoredAssertion", "bjp_score", "blanket_closure", "edge_contribution",
    "ib_score",
    "SearchResult", "exhaustive_search", "hill_climb",
]
