"""Bayesian conditional-independence test for discrete data.

For every observed configuration ``z`` of the conditioning set the count
matrix of ``(X_i, X_k)`` is scored under two Dirichlet-multinomial models:
a dependent model over the joint ``r_i * r_k`` cells, and an independent
model that is the product of the two marginals. The log marginal
likelihoods are summed over configurations and turned into a posterior
with prior ``prior_independence`` on the independent model.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from .dataset import Dataset, _check_indices, count_array

INDEP = "indep"
DEP = "dep"


@dataclass(frozen=True)
class Assertion:
    """``(i _|_ k | z)`` or its negation, stored with ``i < k`` and sorted ``z``."""

    kind: str
    i: int
    k: int
    z: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in (INDEP, DEP):
            raise ValueError(f"unknown assertion kind {self.kind!r}")
        i, k = int(self.i), int(self.k)
        if i == k:
            raise ValueError(f"assertion targets must differ, got {i}")
        z = tuple(sorted(set(int(v) for v in self.z)))
        if i in z or k in z:
            raise ValueError(f"conditioning set {z} overlaps targets ({i}, {k})")
        object.__setattr__(self, "i", min(i, k))
        object.__setattr__(self, "k", max(i, k))
        object.__setattr__(self, "z", z)

    @classmethod
    def indep(cls, i, k, z: Iterable[int] = ()):
        return cls(INDEP, i, k, tuple(z))

    @classmethod
    def dep(cls, i, k, z: Iterable[int] = ()):
        return cls(DEP, i, k, tuple(z))

    @property
    def pair(self) -> tuple[int, int]:
        return (self.i, self.k)

    def __str__(self):
        rel = "_|_" if self.kind == INDEP else "~"
        return f"({self.i} {rel} {self.k} | {{{','.join(map(str, self.z))}}})"


def log_dirichlet_multinomial(counts, alpha: float) -> float:
    """Log marginal likelihood of one count vector under a symmetric Dirichlet prior."""
    c = np.asarray(counts, dtype=np.float64).ravel()
    a_tot = alpha * c.size
    return (math.lgamma(a_tot) - math.lgamma(a_tot + c.sum())
            + sum(math.lgamma(alpha + x) - math.lgamma(alpha) for x in c))


def log1mexp(x: float) -> float:
    """``log(1 - exp(x))`` for ``x <= 0`` without cancellation."""
    if x > 0.0:
        raise ValueError(f"log1mexp needs x <= 0, got {x}")
    if x > -math.log(2.0):
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


class CITestEngine:
    """Memoized posterior of conditional independence over one dataset.

    The cache is keyed by the canonical ``(min(i,k), max(i,k), sorted z)``
    triple and holds both log posteriors of the test, so an independence
    assertion and its negation share a single computation. Access to the
    cache is guarded by a lock; values are deterministic, so concurrent
    readers always see the same numbers.
    """

    def __init__(self, data: Dataset, alpha: float = 1.0, alpha_marginal: float = 1.0,
                 prior_independence: float = 0.5, use_cache: bool = True):
        if data.n_rows < 1:
            raise ValueError("empty dataset")
        if alpha <= 0 or alpha_marginal <= 0:
            raise ValueError("Dirichlet pseudo-counts must be positive")
        if not 0.0 < prior_independence < 1.0:
            raise ValueError("prior_independence must lie strictly inside (0, 1)")
        self.data = data
        self.alpha = float(alpha)
        self.alpha_marginal = float(alpha_marginal)
        self.prior_independence = float(prior_independence)
        self.use_cache = use_cache
        self._log_prior_ind = math.log(self.prior_independence)
        self._log_prior_dep = math.log1p(-self.prior_independence)
        self._cache: dict[tuple, tuple[float, float]] = {}
        self._lock = threading.Lock()
        self.n_computed = 0

    @property
    def n_vars(self) -> int:
        return self.data.n_vars

    def _key(self, i, k, z) -> tuple:
        zs = _check_indices(self.data, int(i), int(k), z)
        i, k = int(i), int(k)
        return (min(i, k), max(i, k), zs)

    def log_marginal_likelihoods(self, i: int, k: int, z: Iterable[int] = ()) -> tuple[float, float]:
        """Summed log marginal likelihoods ``(independent, dependent)``."""
        a, b, zs = self._key(i, k, z)
        counts = count_array(self.data, a, b, zs)
        return _kernels.ci_logliks(counts, self.alpha, self.alpha_marginal)

    def _posteriors(self, key) -> tuple[float, float]:
        if self.use_cache:
            with self._lock:
                hit = self._cache.get(key)
            if hit is not None:
                return hit
        a, b, zs = key
        l_ind, l_dep = _kernels.ci_logliks(count_array(self.data, a, b, zs),
                                           self.alpha, self.alpha_marginal)
        # posterior log-odds of independence; softplus keeps whichever side is
        # close to probability 1 accurate
        odds = (self._log_prior_ind + l_ind) - (self._log_prior_dep + l_dep)
        value = (-float(np.logaddexp(0.0, -odds)), -float(np.logaddexp(0.0, odds)))
        with self._lock:
            self.n_computed += 1
            if self.use_cache:
                value = self._cache.setdefault(key, value)
        return value

    def log_posterior_independence(self, i: int, k: int, z: Iterable[int] = ()) -> float:
        return self._posteriors(self._key(i, k, z))[0]

    def log_posterior_dependence(self, i: int, k: int, z: Iterable[int] = ()) -> float:
        return self._posteriors(self._key(i, k, z))[1]

    def log_posterior(self, a: Assertion) -> float:
        post = self._posteriors(self._key(a.i, a.k, a.z))
        return post[0] if a.kind == INDEP else post[1]

    def cache_size(self) -> int:
        return len(self._cache)
