"""Time the numba kernels against their pure-numpy twins.

Usage: python3 benchmarks/bench_kernels.py [--rows 5000] [--repeat 3]

Each kernel is run once untimed (numba compiles or loads its cache), then
timed ``--repeat`` times; the best time is reported. Outputs of the two
backends are compared so a speedup never hides a mismatch.
"""

import argparse
import time

import numpy as np

from bjp import _kernels
from bjp.citest import CITestEngine
from bjp.dataset import Dataset, count_array
from bjp.graph import edge_slots, gen_hub
from bjp.mrf_sim import gibbs_sample, random_model
from bjp.search import _posterior_tables


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_gibbs(rows):
    model = random_model(gen_hub(6, 1), rng=np.random.default_rng(0))

    def run(flag):
        return lambda: gibbs_sample(model, rows, 100, 1000, seed=1, use_numba=flag).values

    return run


def bench_masks():
    n = 6
    rng = np.random.default_rng(0)
    e = CITestEngine(Dataset(rng.integers(0, 2, size=(2000, n))))
    lp_ind, lp_dep = _posterior_tables(n, e)
    slots = edge_slots(n)
    pa = np.array([a for a, _ in slots], dtype=np.int64)
    pb = np.array([b for _, b in slots], dtype=np.int64)

    def run(flag):
        return lambda: _kernels.score_masks(n, True, 0, 1 << len(slots), pa, pb,
                                            lp_ind, lp_dep, use_numba=flag)

    return run


def bench_ci():
    rng = np.random.default_rng(0)
    d = Dataset(rng.integers(0, 2, size=(20000, 12)))
    counts = count_array(d, 0, 1, list(range(2, 12)))

    def run(flag):
        return lambda: _kernels.ci_logliks(counts, 1.0, 1.0, use_numba=flag)

    return run


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rows", type=int, default=5000, help="Gibbs rows (100 + 1000 sweeps each)")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    cases = [
        (f"gibbs star n=6, {args.rows} rows", bench_gibbs(args.rows), "equal"),
        ("score all 32768 graphs, n=6", bench_masks(), "equal"),
        ("DM log-likelihoods, 1024 configs", bench_ci(), "close"),
    ]
    print(f"{'kernel':<36} {'numba s':>10} {'numpy s':>10} {'speedup':>8}  outputs")
    for name, make, mode in cases:
        t_nb, out_nb = best_of(make(True), args.repeat)
        t_np, out_np = best_of(make(False), args.repeat)
        if mode == "equal":
            same = np.array_equal(out_nb, out_np)
        else:
            same = np.allclose(out_nb, out_np, rtol=1e-12)
        print(f"{name:<36} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>7.1f}x  "
              f"{'identical' if mode == 'equal' and same else 'match' if same else 'MISMATCH'}")


if __name__ == "__main__":
    main()
