"""Complete discrete datasets and conditional contingency tables."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DataFormatError


class Dataset:
    """Immutable table of state indices, one column per variable.

    ``values[r, v]`` is the state of variable ``v`` in row ``r`` and always
    lies in ``[0, cardinalities[v])``.
    """

    def __init__(self, values, cardinalities: Sequence[int] | None = None,
                 names: Sequence[str] | None = None):
        arr = np.array(values, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise ValueError("dataset values must be a 2-D table")
        if arr.shape[0] < 1:
            raise ValueError("dataset must contain at least one row")
        if arr.size and arr.min() < 0:
            raise ValueError("state indices must be non-negative")
        observed = arr.max(axis=0) + 1 if arr.shape[1] else np.zeros(0, np.int64)
        if cardinalities is None:
            cards = tuple(max(2, int(c)) for c in observed)
        else:
            cards = tuple(int(c) for c in cardinalities)
            if len(cards) != arr.shape[1]:
                raise ValueError(f"{len(cards)} cardinalities for {arr.shape[1]} variables")
            for v, (c, o) in enumerate(zip(cards, observed)):
                if c < 2:
                    raise ValueError(f"variable {v}: cardinality must be >= 2, got {c}")
                if o > c:
                    raise ValueError(f"variable {v}: state {o - 1} exceeds cardinality {c}")
        arr.setflags(write=False)
        self.values = arr
        self.cardinalities = cards
        self.names = tuple(names) if names is not None else tuple(f"X{v}" for v in range(arr.shape[1]))
        if len(self.names) != arr.shape[1]:
            raise ValueError("one name per variable required")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_vars(self) -> int:
        return self.values.shape[1]

    def head(self, n_rows: int) -> "Dataset":
        """First ``n_rows`` rows, keeping cardinalities and names."""
        return Dataset(self.values[:n_rows], self.cardinalities, self.names)

    def permute_columns(self, perm: Sequence[int]) -> "Dataset":
        """Dataset whose column ``perm[v]`` holds the old column ``v``."""
        inv = np.empty(self.n_vars, dtype=np.int64)
        inv[np.asarray(perm)] = np.arange(self.n_vars)
        return Dataset(self.values[:, inv], [self.cardinalities[u] for u in inv],
                       [self.names[u] for u in inv])

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.cardinalities == other.cardinalities
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        return f"Dataset(n_rows={self.n_rows}, n_vars={self.n_vars}, cardinalities={self.cardinalities})"


def read_csv(text: str, cardinalities: Sequence[int] | None = None) -> Dataset:
    """Parse a header row of names followed by rows of integer states."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataFormatError("CSV is empty: header row required")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise DataFormatError("CSV has a header but no data rows")
    values = []
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataFormatError(f"row {lineno}: expected {len(header)} cells, got {len(row)}")
        try:
            cells = [int(c) for c in row]
        except ValueError:
            raise DataFormatError(f"row {lineno}: non-integer cell in {row!r}") from None
        if any(c < 0 for c in cells):
            raise DataFormatError(f"row {lineno}: negative state index")
        values.append(cells)
    try:
        return Dataset(values, cardinalities, header)
    except ValueError as exc:
        raise DataFormatError(str(exc)) from None


def write_csv(d: Dataset) -> str:
    buf = io.StringIO()
    buf.write(",".join(d.names) + "\n")
    for row in d.values:
        buf.write(",".join(map(str, row)) + "\n")
    return buf.getvalue()


@dataclass
class ContingencyTable:
    """Counts of ``(X_i, X_k)`` for every observed configuration of ``Z``.

    ``counts`` maps a tuple of Z-states (ordered by ascending variable index)
    to an ``r_i x r_k`` integer matrix. Unobserved configurations are absent.
    """

    i: int
    k: int
    z: tuple[int, ...]
    counts: dict[tuple[int, ...], np.ndarray] = field(default_factory=dict)

    def total(self) -> int:
        return int(sum(int(m.sum()) for m in self.counts.values()))

    def stacked(self) -> np.ndarray:
        """Count matrices as an array of shape ``(configs, r_i, r_k)`` in key order."""
        return np.stack([self.counts[key] for key in sorted(self.counts)])


def _check_indices(d: Dataset, i: int, k: int, z: Iterable[int]) -> tuple[int, ...]:
    zs = tuple(sorted(set(int(v) for v in z)))
    for v in (i, k) + zs:
        if not 0 <= v < d.n_vars:
            raise IndexError(f"variable {v} out of range for {d.n_vars} variables")
    if i == k:
        raise ValueError(f"target variables must differ, got i=k={i}")
    if i in zs or k in zs:
        raise ValueError(f"conditioning set {zs} overlaps targets ({i}, {k})")
    return zs


def count_array(d: Dataset, i: int, k: int, z: Sequence[int]) -> np.ndarray:
    """Stacked count matrices ``(configs, r_i, r_k)`` for observed Z-configurations.

    ``z`` must already be sorted and disjoint from ``{i, k}``. Configurations
    appear in lexicographic order of their Z-state tuples.
    """
    ri, rk = d.cardinalities[i], d.cardinalities[k]
    vals = d.values
    if z:
        _, zid = np.unique(vals[:, list(z)], axis=0, return_inverse=True)
        zid = zid.reshape(-1)
        n_cfg = int(zid.max()) + 1
    else:
        zid = np.zeros(d.n_rows, dtype=np.int64)
        n_cfg = 1
    flat = (zid * ri + vals[:, i]) * rk + vals[:, k]
    return np.bincount(flat, minlength=n_cfg * ri * rk).reshape(n_cfg, ri, rk)


def count_table(d: Dataset, i: int, k: int, z: Iterable[int] = ()) -> ContingencyTable:
    zs = _check_indices(d, i, k, z)
    arr = count_array(d, i, k, zs)
    if zs:
        keys = [tuple(int(s) for s in row) for row in np.unique(d.values[:, list(zs)], axis=0)]
    else:
        keys = [()]
    return ContingencyTable(i, k, zs, {key: arr[c] for c, key in enumerate(keys)})
