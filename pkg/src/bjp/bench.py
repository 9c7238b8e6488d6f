"""Experiment grid: generate models, sample data, learn, and score recovery.

A grid cell is one (structure, distribution, dataset, N_D, score) tuple.
Every random choice is seeded from a hash of the cell's coordinates, so
cells can be run in any order or in parallel without changing the output.
Per-cell timings are kept out of ``results.csv`` and ``summary.csv`` so those
two files are byte-identical across reruns of the same config.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import multiprocessing
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .citest import CITestEngine
from .errors import BJPError, DataFormatError
from .graph import (UndirectedGraph, gen_hub, gen_random, gen_scale_free, hamming_distance,
                    irregularity, read_edge_list)
from .mrf_sim import BURN_IN, ITERATIONS, gibbs_sample, random_model
from .scores import SCORES
from .search import DEFAULT_MAX_N, exhaustive_search, hill_climb

log = logging.getLogger(__name__)

METHODS = ("exhaustive", "hc")
STRUCTURE_KINDS = ("hub", "star", "scale-free", "random", "edge-list")


class ConfigError(DataFormatError):
    """Invalid experiment config; the message starts with the offending key path."""


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from a tuple of ints/strings."""
    h = hashlib.blake2b(repr(tuple(parts)).encode(), digest_size=8).digest()
    return int.from_bytes(h, "little") >> 1


@dataclass
class StructureSpec:
    id: str
    kind: str
    n: int = 0
    hubs: int = 1
    m: int = 1
    p: float = 0.2
    path: str = ""

    def build(self, base_seed: int) -> UndirectedGraph:
        rng = np.random.default_rng(derive_seed(base_seed, "structure", self.id))
        if self.kind == "hub":
            return gen_hub(self.n, self.hubs)
        if self.kind == "star":
            return gen_hub(self.n, 1)
        if self.kind == "scale-free":
            return gen_scale_free(self.n, self.m, rng)
        if self.kind == "random":
            return gen_random(self.n, self.p, rng)
        return read_edge_list(Path(self.path).read_text(encoding="utf-8"))


@dataclass
class ExperimentConfig:
    structures: list[StructureSpec]
    scores: list[str] = field(default_factory=lambda: ["bjp", "ib"])
    method: str = "exhaustive"
    dataset_sizes: list[int] = field(default_factory=lambda: [250, 500, 1000, 2000, 4000, 8000])
    distributions: int = 10
    datasets_per_distribution: int = 10
    seed: int = 0
    cardinality: int = 2
    alpha: float = 1.0
    alpha_marginal: float = 1.0
    prior_independence: float = 0.5
    burn_in: int = BURN_IN
    iterations: int = ITERATIONS
    max_exhaustive_n: int = DEFAULT_MAX_N

    @classmethod
    def from_dict(cls, doc: dict[str, Any], base_dir: Path | None = None) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("<root>: config must be a JSON object")

        def get(key, typ, default, where=None, src=doc):
            where = where or key
            if key not in src:
                return default
            val = src[key]
            ok = isinstance(val, typ) and not (typ is not bool and isinstance(val, bool))
            if typ is float and isinstance(val, int) and not isinstance(val, bool):
                val, ok = float(val), True
            if not ok:
                raise ConfigError(f"{where}: expected {typ.__name__}, got {val!r}")
            return val

        known = {"structures", "scores", "method", "dataset_sizes", "distributions",
                 "datasets_per_distribution", "seed", "cardinality", "citest", "gibbs",
                 "max_exhaustive_n"}
        for key in doc:
            if key not in known:
                raise ConfigError(f"{key}: unknown config key")

        raw_structs = get("structures", list, None)
        if not raw_structs:
            raise ConfigError("structures: at least one structure required")
        structs = []
        for s_idx, raw in enumerate(raw_structs):
            where = f"structures[{s_idx}]"
            if not isinstance(raw, dict):
                raise ConfigError(f"{where}: expected an object")
            kind = get("kind", str, None, f"{where}.kind", raw)
            if kind not in STRUCTURE_KINDS:
                raise ConfigError(f"{where}.kind: must be one of {STRUCTURE_KINDS}, got {kind!r}")
            spec = StructureSpec(
                id=get("id", str, f"s{s_idx}", f"{where}.id", raw),
                kind=kind,
                n=get("n", int, 0, f"{where}.n", raw),
                hubs=get("hubs", int, 1, f"{where}.hubs", raw),
                m=get("m", int, 1, f"{where}.m", raw),
                p=get("p", float, 0.2, f"{where}.p", raw),
                path=get("path", str, "", f"{where}.path", raw),
            )
            if kind == "edge-list":
                if not spec.path:
                    raise ConfigError(f"{where}.path: required for edge-list structures")
                if base_dir is not None and not Path(spec.path).is_absolute():
                    spec.path = str(base_dir / spec.path)
            elif spec.n < 1:
                raise ConfigError(f"{where}.n: must be >= 1")
            structs.append(spec)
        if len({s.id for s in structs}) != len(structs):
            raise ConfigError("structures: ids must be unique")

        scores = get("scores", list, ["bjp", "ib"])
        for j, s in enumerate(scores):
            if s not in SCORES:
                raise ConfigError(f"scores[{j}]: unknown score {s!r}, expected one of {sorted(SCORES)}")
        method = get("method", str, "exhaustive")
        if method not in METHODS:
            raise ConfigError(f"method: must be one of {METHODS}, got {method!r}")
        sizes = get("dataset_sizes", list, [250, 500, 1000, 2000, 4000, 8000])
        if not sizes:
            raise ConfigError("dataset_sizes: at least one size required")
        for j, nd in enumerate(sizes):
            if not isinstance(nd, int) or isinstance(nd, bool) or nd < 1:
                raise ConfigError(f"dataset_sizes[{j}]: must be a positive integer, got {nd!r}")
        cit = get("citest", dict, {})
        gib = get("gibbs", dict, {})
        cfg = cls(
            structures=structs,
            scores=list(scores),
            method=method,
            dataset_sizes=list(sizes),
            distributions=get("distributions", int, 10),
            datasets_per_distribution=get("datasets_per_distribution", int, 10),
            seed=get("seed", int, 0),
            cardinality=get("cardinality", int, 2),
            alpha=get("alpha", float, 1.0, "citest.alpha", cit),
            alpha_marginal=get("alpha_marginal", float, 1.0, "citest.alpha_marginal", cit),
            prior_independence=get("prior_independence", float, 0.5, "citest.prior_independence", cit),
            burn_in=get("burn_in", int, BURN_IN, "gibbs.burn_in", gib),
            iterations=get("iterations", int, ITERATIONS, "gibbs.iterations", gib),
            max_exhaustive_n=get("max_exhaustive_n", int, DEFAULT_MAX_N),
        )
        for key in ("distributions", "datasets_per_distribution"):
            if getattr(cfg, key) < 1:
                raise ConfigError(f"{key}: must be >= 1")
        if cfg.cardinality < 2:
            raise ConfigError("cardinality: must be >= 2")
        if cfg.alpha <= 0 or cfg.alpha_marginal <= 0:
            raise ConfigError("citest: pseudo-counts must be positive")
        if not 0 < cfg.prior_independence < 1:
            raise ConfigError("citest.prior_independence: must lie in (0, 1)")
        if cfg.burn_in < 0 or cfg.iterations < 0:
            raise ConfigError("gibbs: sweep counts must be non-negative")
        return cfg

    @classmethod
    def from_json(cls, text: str, base_dir: Path | None = None) -> "ExperimentConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"<line {exc.lineno}, column {exc.colno}>: {exc.msg}") from None
        return cls.from_dict(doc, base_dir)


@dataclass
class ResultRecord:
    structure: str
    n: int
    irr: int
    score: str
    method: str
    nd: int
    distribution: int
    dataset: int
    hamming: int
    success: bool
    learned_edges: str
    wall_time: float = 0.0
    error: str = ""


RESULT_COLUMNS = ["structure", "n", "irr", "score", "method", "nd", "distribution", "dataset",
                  "hamming", "success", "learned_edges", "error"]


def _edges_str(g: UndirectedGraph) -> str:
    return ";".join(f"{i}-{j}" for i, j in g.sorted_edges())


def learn(data, score: str, method: str, cfg: ExperimentConfig):
    engine = CITestEngine(data, cfg.alpha, cfg.alpha_marginal, cfg.prior_independence)
    fn = SCORES[score]
    if method == "exhaustive":
        return exhaustive_search(data.n_vars, fn, engine, max_n=cfg.max_exhaustive_n)
    return hill_climb(data.n_vars, fn, engine)


def _run_unit(cfg: ExperimentConfig, s_idx: int, dist: int, ds: int) -> list[ResultRecord]:
    """All (N_D, score) cells that share one sampled dataset."""
    spec = cfg.structures[s_idx]
    base = dict(structure=spec.id, method=cfg.method, distribution=dist, dataset=ds)

    def failed(msg, n=-1, irr=-1):
        return [ResultRecord(n=n, irr=irr, score=s, nd=nd, hamming=-1, success=False,
                             learned_edges="", error=msg, **base)
                for nd in cfg.dataset_sizes for s in cfg.scores]

    try:
        truth = spec.build(cfg.seed)
    except (BJPError, ValueError, OSError) as exc:
        return failed(f"structure: {exc}")
    n, irr = truth.n, irregularity(truth)
    try:
        model_rng = np.random.default_rng(derive_seed(cfg.seed, spec.id, dist))
        model = random_model(truth, (cfg.cardinality,) * n, model_rng)
        data_seed = derive_seed(cfg.seed, spec.id, dist, ds)
        full = gibbs_sample(model, max(cfg.dataset_sizes), cfg.burn_in, cfg.iterations, data_seed)
    except (BJPError, ValueError) as exc:
        return failed(f"generate: {exc}", n, irr)

    out = []
    for nd in cfg.dataset_sizes:
        data = full.head(nd)
        for score in cfg.scores:
            t0 = time.perf_counter()
            try:
                res = learn(data, score, cfg.method, cfg)
            except (BJPError, ValueError) as exc:
                out.append(ResultRecord(n=n, irr=irr, score=score, nd=nd, hamming=-1,
                                        success=False, learned_edges="",
                                        error=f"learn: {exc}", **base))
                continue
            elapsed = time.perf_counter() - t0
            ham = hamming_distance(res.best_graph, truth)
            out.append(ResultRecord(n=n, irr=irr, score=score, nd=nd, hamming=ham,
                                    success=ham == 0, learned_edges=_edges_str(res.best_graph),
                                    wall_time=elapsed, **base))
    return out


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> list[ResultRecord]:
    units = [(s, d, j) for s in range(len(cfg.structures))
             for d in range(cfg.distributions)
             for j in range(cfg.datasets_per_distribution)]
    if workers > 1:
        # spawn, not fork: forking after OpenMP threads exist aborts the child
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            futures = [pool.submit(_run_unit, cfg, *u) for u in units]
            chunks = [f.result() for f in futures]
    else:
        chunks = []
        for u in units:
            log.info("unit structure=%s distribution=%d dataset=%d",
                     cfg.structures[u[0]].id, u[1], u[2])
            chunks.append(_run_unit(cfg, *u))
    return [r for chunk in chunks for r in chunk]


@dataclass
class SummaryRow:
    structure: str
    n: int
    irr: int
    score: str
    nd: int
    count: int
    errors: int
    success_rate: float
    hamming_mean: float
    hamming_std: float
    runtime_mean: float
    runtime_std: float


def _mean_std(xs: list[float]) -> tuple[float, float]:
    if not xs:
        return math.nan, math.nan
    if len(xs) == 1:
        return float(xs[0]), 0.0
    return statistics.fmean(xs), statistics.stdev(xs)


def aggregate(records: list[ResultRecord]) -> list[SummaryRow]:
    """Mean and sample standard deviation per (structure, score, N_D).

    Errored cells are counted but excluded from the statistics. A group with
    a single record reports a standard deviation of 0.
    """
    if not records:
        raise ValueError("cannot aggregate an empty record list")
    groups: dict[tuple, list[ResultRecord]] = {}
    for r in records:
        groups.setdefault((r.structure, r.score, r.nd), []).append(r)
    rows = []
    for (structure, score, nd), rs in groups.items():
        ok = [r for r in rs if not r.error]
        h_mean, h_std = _mean_std([r.hamming for r in ok])
        t_mean, t_std = _mean_std([r.wall_time for r in ok])
        rate = sum(r.success for r in ok) / len(ok) if ok else math.nan
        rows.append(SummaryRow(structure, rs[0].n, rs[0].irr, score, nd, len(rs), len(rs) - len(ok),
                               rate, h_mean, h_std, t_mean, t_std))
    return rows


def _pivot(rows: list[SummaryRow], scores: list[str], fields: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["structure", "n", "irr", "nd"] + [f"{s}_{f}" for s in scores for f in fields])
    keyed = {(r.structure, r.nd, r.score): r for r in rows}
    seen = []
    for r in rows:
        if (r.structure, r.nd) not in seen:
            seen.append((r.structure, r.nd))
    for structure, nd in seen:
        first = next(r for r in rows if r.structure == structure and r.nd == nd)
        line = [structure, first.n, first.irr, nd]
        for s in scores:
            r = keyed.get((structure, nd, s))
            line += [repr(getattr(r, f)) if r else "" for f in fields]
        w.writerow(line)
    return buf.getvalue()


def results_csv(records: list[ResultRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=RESULT_COLUMNS, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in records:
        w.writerow(asdict(r))
    return buf.getvalue()


def timings_csv(records: list[ResultRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["structure", "score", "nd", "distribution", "dataset", "wall_time"])
    for r in records:
        w.writerow([r.structure, r.score, r.nd, r.distribution, r.dataset, repr(r.wall_time)])
    return buf.getvalue()


def summary_csv(rows: list[SummaryRow], scores: list[str]) -> str:
    return _pivot(rows, scores, ["success_rate", "hamming_mean", "hamming_std"])


def runtime_csv(rows: list[SummaryRow], scores: list[str]) -> str:
    return _pivot(rows, scores, ["runtime_mean", "runtime_std"])


def write_outputs(records: list[ResultRecord], scores: list[str], out_dir: Path) -> dict[str, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = aggregate(records)
    files = {
        "results": (out_dir / "results.csv", results_csv(records)),
        "summary": (out_dir / "summary.csv", summary_csv(rows, scores)),
        "timings": (out_dir / "timings.csv", timings_csv(records)),
        "runtime": (out_dir / "runtime_summary.csv", runtime_csv(rows, scores)),
    }
    for path, text in files.values():
        path.write_text(text, encoding="utf-8")
    return {k: p for k, (p, _) in files.items()}


def read_results_csv(text: str) -> list[ResultRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(ResultRecord(
            structure=row["structure"], n=int(row["n"]), irr=int(row["irr"]), score=row["score"],
            method=row["method"], nd=int(row["nd"]), distribution=int(row["distribution"]),
            dataset=int(row["dataset"]), hamming=int(row["hamming"]),
            success=row["success"] == "True", learned_edges=row["learned_edges"],
            error=row["error"]))
    return out
