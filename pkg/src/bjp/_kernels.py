"""Hot numeric loops, each with a numba kernel and a pure-numpy twin.

The numba path is used when numba imports and ``BJP_DISABLE_NUMBA`` is unset
or falsy. Both paths consume the same counter-based random stream and
accumulate floating-point values in the same order, so the Gibbs sampler and
the exhaustive scorer return bit-identical results on either backend. The
Dirichlet-multinomial kernel uses ``math.lgamma`` vs ``scipy.special.gammaln``
and agrees to ~1e-13 relative.
"""

from __future__ import annotations

import math
import os

import numpy as np
from scipy.special import gammaln

try:
    import numba
    from numba import njit, prange
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
else:
    # try OpenMP before TBB: older TBB builds make the probe warn on every run
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

_DISABLED = os.environ.get("BJP_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")
USE_NUMBA = numba is not None and not _DISABLED


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def _maybe_njit(**kwargs):
    def wrap(fn):
        if numba is None:
            return fn
        return njit(**kwargs)(fn)
    return wrap


# -- counter-based uniforms --------------------------------------------------
# splitmix64 finalizer; written with uint64 operands only so the same source
# runs on numpy arrays and inside numba without float promotion.

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0
_MASK64 = (1 << 64) - 1


def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def seed_key(seed: int) -> np.uint64:
    """Fold an arbitrary non-negative integer seed into a 64-bit stream key."""
    z = (int(seed) * 0x9E3779B97F4A7C15 + 0x632BE59BD9B4E019) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return np.uint64(z ^ (z >> 31))


_mix_nb = _maybe_njit(cache=True, inline="always")(_mix)


def row_keys(key: np.uint64, rows: np.ndarray) -> np.ndarray:
    return _mix(key ^ (rows.astype(np.uint64) * _GOLDEN))


def uniforms(rkeys: np.ndarray, counter: int) -> np.ndarray:
    """Uniform [0, 1) draws for every row key at one stream position."""
    c = np.uint64((int(counter) * 0x9E3779B97F4A7C15) & _MASK64)
    return (_mix(rkeys + c) >> _S11).astype(np.float64) * _INV53


# -- Gibbs sampling ----------------------------------------------------------


@_maybe_njit(cache=True, parallel=True)
def _gibbs_nb(key, row_start, n_rows, n_sweeps, cards, var_ptr, var_cliques,
              cl_ptr, cl_members, cl_strides, pot_ptr, pot):
    n = cards.shape[0]
    out = np.empty((n_rows, n), dtype=np.int64)
    max_card = 1
    for v in range(n):
        if cards[v] > max_card:
            max_card = cards[v]
    for r in prange(n_rows):
        rk = _mix_nb(key ^ (np.uint64(row_start + r) * _GOLDEN))
        state = np.empty(n, dtype=np.int64)
        prob = np.empty(max_card, dtype=np.float64)
        for v in range(n):
            u = np.float64(_mix_nb(rk + np.uint64(v) * _GOLDEN) >> _S11) * _INV53
            s = np.int64(u * cards[v])
            state[v] = s if s < cards[v] else cards[v] - 1
        for sweep in range(1, n_sweeps + 1):
            for v in range(n):
                cv = cards[v]
                for t in range(cv):
                    prob[t] = 1.0
                for q in range(var_ptr[v], var_ptr[v + 1]):
                    c = var_cliques[q]
                    base = pot_ptr[c]
                    sv = 0
                    for m in range(cl_ptr[c], cl_ptr[c + 1]):
                        if cl_members[m] == v:
                            sv = cl_strides[m]
                        else:
                            base += state[cl_members[m]] * cl_strides[m]
                    for t in range(cv):
                        prob[t] *= pot[base + t * sv]
                total = 0.0
                for t in range(cv):
                    total += prob[t]
                    prob[t] = total
                counter = np.uint64(sweep * n + v)
                u = np.float64(_mix_nb(rk + counter * _GOLDEN) >> _S11) * _INV53
                pick = cv - 1
                if total > 0.0:
                    thr = u * total
                    for t in range(cv):
                        if thr < prob[t]:
                            pick = t
                            break
                else:
                    s = np.int64(u * cv)
                    pick = s if s < cv else cv - 1
                state[v] = pick
        for v in range(n):
            out[r, v] = state[v]
    return out


def _gibbs_np(key, row_start, n_rows, n_sweeps, cards, var_ptr, var_cliques,
              cl_ptr, cl_members, cl_strides, pot_ptr, pot):
    n = cards.shape[0]
    rkeys = row_keys(key, np.arange(row_start, row_start + n_rows, dtype=np.int64))
    state = np.empty((n_rows, n), dtype=np.int64)
    for v in range(n):
        u = uniforms(rkeys, v)
        state[:, v] = np.minimum((u * cards[v]).astype(np.int64), cards[v] - 1)
    for sweep in range(1, n_sweeps + 1):
        for v in range(n):
            cv = int(cards[v])
            prob = np.ones((n_rows, cv), dtype=np.float64)
            for q in range(var_ptr[v], var_ptr[v + 1]):
                c = var_cliques[q]
                base = np.full(n_rows, pot_ptr[c], dtype=np.int64)
                sv = 0
                for m in range(cl_ptr[c], cl_ptr[c + 1]):
                    if cl_members[m] == v:
                        sv = cl_strides[m]
                    else:
                        base += state[:, cl_members[m]] * cl_strides[m]
                for t in range(cv):
                    prob[:, t] *= pot[base + t * sv]
            cum = np.cumsum(prob, axis=1)
            total = cum[:, -1]
            u = uniforms(rkeys, sweep * n + v)
            hit = (u * total)[:, None] < cum
            pick = np.where(hit.any(axis=1), hit.argmax(axis=1), cv - 1)
            dead = ~(total > 0.0)
            if dead.any():
                pick[dead] = np.minimum((u[dead] * cv).astype(np.int64), cv - 1)
            state[:, v] = pick
    return state


def gibbs(key, row_start, n_rows, n_sweeps, arrays, use_numba=None):
    """Run one independent chain per row and return the final states.

    ``arrays`` is the flattened model from ``MrfModel.kernel_arrays``.
    Row ``r`` of the output depends only on ``(key, row_start + r)``.
    """
    use = USE_NUMBA if use_numba is None else (use_numba and numba is not None)
    fn = _gibbs_nb if use else _gibbs_np
    return fn(np.uint64(key), np.int64(row_start), np.int64(n_rows), np.int64(n_sweeps), *arrays)


# -- Dirichlet-multinomial log marginal likelihoods -------------------------


@_maybe_njit(cache=True)
def _ci_logliks_nb(counts, alpha, alpha_m):
    n_cfg, ri, rk = counts.shape
    a_joint = alpha * ri * rk
    a_row = alpha_m * ri
    a_col = alpha_m * rk
    lg_a = math.lgamma(alpha)
    lg_am = math.lgamma(alpha_m)
    l_dep = 0.0
    l_ind = 0.0
    rows = np.empty(ri, dtype=np.int64)
    cols = np.empty(rk, dtype=np.int64)
    for z in range(n_cfg):
        total = 0
        for a in range(ri):
            rows[a] = 0
        for b in range(rk):
            cols[b] = 0
        dep = 0.0
        for a in range(ri):
            for b in range(rk):
                c = counts[z, a, b]
                total += c
                rows[a] += c
                cols[b] += c
                dep += math.lgamma(alpha + c) - lg_a
        if total == 0:
            continue
        l_dep += math.lgamma(a_joint) - math.lgamma(a_joint + total) + dep
        ind = math.lgamma(a_row) - math.lgamma(a_row + total)
        for a in range(ri):
            ind += math.lgamma(alpha_m + rows[a]) - lg_am
        ind += math.lgamma(a_col) - math.lgamma(a_col + total)
        for b in range(rk):
            ind += math.lgamma(alpha_m + cols[b]) - lg_am
        l_ind += ind
    return l_ind, l_dep


def _ci_logliks_np(counts, alpha, alpha_m):
    counts = counts[counts.sum(axis=(1, 2)) > 0]
    n_cfg, ri, rk = counts.shape
    if n_cfg == 0:
        return 0.0, 0.0
    total = counts.sum(axis=(1, 2))
    rows = counts.sum(axis=2)
    cols = counts.sum(axis=1)

    def log_dm(cnt, a, cells, tot):
        return (gammaln(a * cells) - gammaln(a * cells + tot)
                + (gammaln(a + cnt) - gammaln(a)).sum(axis=1))

    l_dep = log_dm(counts.reshape(n_cfg, -1), alpha, ri * rk, total).sum()
    l_ind = (log_dm(rows, alpha_m, ri, total) + log_dm(cols, alpha_m, rk, total)).sum()
    return float(l_ind), float(l_dep)


def ci_logliks(counts: np.ndarray, alpha: float, alpha_m: float, use_numba=None):
    """Summed log marginal likelihoods ``(independent, dependent)`` of a count stack."""
    use = USE_NUMBA if use_numba is None else (use_numba and numba is not None)
    if use:
        l_ind, l_dep = _ci_logliks_nb(np.ascontiguousarray(counts, dtype=np.int64),
                                      float(alpha), float(alpha_m))
        return float(l_ind), float(l_dep)
    return _ci_logliks_np(np.asarray(counts, dtype=np.int64), float(alpha), float(alpha_m))


# -- exhaustive scoring over edge bitmasks ----------------------------------
# lp_ind[v, k, z] / lp_dep[v, k, z]: log posterior of (v _|_ k | z) / its
# negation, with z an n-bit node mask. Accumulation order matches the
# generic scorers in scores.py exactly.


@_maybe_njit(cache=True)
def _score_masks_nb(n, bjp, mask_lo, mask_hi, pair_a, pair_b, lp_ind, lp_dep):
    n_masks = mask_hi - mask_lo
    out = np.empty(n_masks, dtype=np.float64)
    adj = np.empty(n, dtype=np.int64)
    deg = np.empty(n, dtype=np.int64)
    psi = np.empty(n, dtype=np.int64)
    rank = np.empty(n, dtype=np.int64)
    n_slots = pair_a.shape[0]
    for idx in range(n_masks):
        mask = mask_lo + idx
        for v in range(n):
            adj[v] = 0
        for b in range(n_slots):
            if (mask >> b) & 1:
                adj[pair_a[b]] |= np.int64(1) << pair_b[b]
                adj[pair_b[b]] |= np.int64(1) << pair_a[b]
        total = 0.0
        if bjp:
            for v in range(n):
                d = 0
                x = adj[v]
                while x:
                    x &= x - 1
                    d += 1
                deg[v] = d
                psi[v] = v
            for p in range(1, n):
                cur = psi[p]
                q = p - 1
                while q >= 0 and deg[psi[q]] > deg[cur]:
                    psi[q + 1] = psi[q]
                    q -= 1
                psi[q + 1] = cur
            for p in range(n):
                rank[psi[p]] = p
            for p in range(n):
                v = psi[p]
                for k in range(n):
                    if k == v or rank[k] <= p:
                        continue
                    if (adj[v] >> k) & 1:
                        total += lp_dep[v, k, adj[v] & ~(np.int64(1) << k)]
                    else:
                        total += lp_ind[v, k, adj[v]]
        else:
            for v in range(n):
                for k in range(n):
                    if k == v:
                        continue
                    if (adj[v] >> k) & 1:
                        total += lp_dep[v, k, adj[v] & ~(np.int64(1) << k)]
                    else:
                        total += lp_ind[v, k, adj[v]]
        out[idx] = total
    return out


def _score_masks_np(n, bjp, mask_lo, mask_hi, pair_a, pair_b, lp_ind, lp_dep):
    masks = np.arange(mask_lo, mask_hi, dtype=np.int64)
    m = masks.shape[0]
    adj = np.zeros((n, m), dtype=np.int64)
    for b in range(pair_a.shape[0]):
        on = (masks >> b) & 1
        adj[pair_a[b]] |= on << pair_b[b]
        adj[pair_b[b]] |= on << pair_a[b]
    cols = np.arange(m)
    total = np.zeros(m, dtype=np.float64)

    def term(v, k):
        av = adj[v, cols] if np.ndim(v) else adj[v]
        linked = ((av >> k) & 1).astype(bool)
        dep = lp_dep[v, k, av & ~(np.int64(1) << k)]
        ind = lp_ind[v, k, av]
        return np.where(linked, dep, ind)

    if bjp:
        deg = np.zeros((n, m), dtype=np.int64)
        for v in range(n):
            deg[v] = sum(((adj[v] >> u) & 1) for u in range(n))
        psi = np.argsort(deg * n + np.arange(n)[:, None], axis=0, kind="stable")
        rank = np.empty_like(psi)
        rank[psi, cols[None, :]] = np.arange(n)[:, None]
        for p in range(n):
            v = psi[p]
            for k in range(n):
                use = (rank[k] > p) & (v != k)
                if not use.any():
                    continue
                vals = term(v, k)
                total = np.where(use, total + vals, total)
    else:
        for v in range(n):
            for k in range(n):
                if k != v:
                    total = total + term(v, k)
    return total


def score_masks(n, bjp, mask_lo, mask_hi, pair_a, pair_b, lp_ind, lp_dep, use_numba=None):
    """Log score of every graph whose edge bitmask lies in ``[mask_lo, mask_hi)``."""
    use = USE_NUMBA if use_numba is None else (use_numba and numba is not None)
    fn = _score_masks_nb if use else _score_masks_np
    return fn(np.int64(n), bool(bjp), np.int64(mask_lo), np.int64(mask_hi),
              np.asarray(pair_a, dtype=np.int64), np.asarray(pair_b, dtype=np.int64),
              np.ascontiguousarray(lp_ind), np.ascontiguousarray(lp_dep))
