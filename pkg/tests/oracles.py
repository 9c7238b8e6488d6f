"""Independent reference computations used by the tests.

Nothing here imports the code under test's numeric paths: marginal
likelihoods use exact rational arithmetic, joints use brute-force
enumeration.
"""

import itertools
import math
from fractions import Fraction

import numpy as np


def rising(a: Fraction, n: int) -> Fraction:
    """a (a+1) ... (a+n-1); equals Gamma(a+n)/Gamma(a)."""
    out = Fraction(1)
    for j in range(n):
        out *= a + j
    return out


def exact_dm(counts, alpha=Fraction(1)) -> Fraction:
    """Dirichlet-multinomial marginal likelihood of one count vector, exactly."""
    counts = [int(c) for c in np.asarray(counts).ravel()]
    a_tot = alpha * len(counts)
    num = Fraction(1)
    for c in counts:
        num *= rising(alpha, c)
    return num / rising(a_tot, sum(counts))


def exact_log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def exact_marginals(values, i, k, z, cards, alpha=Fraction(1), alpha_m=Fraction(1)):
    """(ML_independent, ML_dependent) summed over Z-configurations, as Fractions."""
    values = np.asarray(values)
    ri, rk = cards[i], cards[k]
    groups = {}
    for row in values:
        key = tuple(int(row[v]) for v in z)
        groups.setdefault(key, np.zeros((ri, rk), dtype=int))[row[i], row[k]] += 1
    ml_ind, ml_dep = Fraction(1), Fraction(1)
    for table in groups.values():
        ml_dep *= exact_dm(table, alpha)
        ml_ind *= exact_dm(table.sum(axis=1), alpha_m) * exact_dm(table.sum(axis=0), alpha_m)
    return ml_ind, ml_dep


def exact_posterior_independence(values, i, k, z, cards, prior=Fraction(1, 2)) -> Fraction:
    ml_ind, ml_dep = exact_marginals(values, i, k, z, cards)
    return prior * ml_ind / (prior * ml_ind + (1 - prior) * ml_dep)


def brute_joint(n, cards, cliques, potentials):
    """Normalized joint of a clique-factorized model by full enumeration."""
    joint = np.zeros(cards)
    for state in itertools.product(*(range(c) for c in cards)):
        p = 1.0
        for members, table in zip(cliques, potentials):
            p *= float(np.asarray(table)[tuple(state[v] for v in members)])
        joint[state] = p
    return joint / joint.sum()


def brute_max_clique_sets(n, edges):
    """Maximal cliques by checking every vertex subset (n <= 10)."""
    adj = {v: set() for v in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    cliques = []
    for r in range(1, n + 1):
        for sub in itertools.combinations(range(n), r):
            if all(b in adj[a] for a, b in itertools.combinations(sub, 2)):
                cliques.append(set(sub))
    return sorted(tuple(sorted(c)) for c in cliques
                  if not any(c < d for d in cliques))
