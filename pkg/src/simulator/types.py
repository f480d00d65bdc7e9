"""Compositions, joint types and L∞ typicality checks on count vectors."""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Iterator

import numpy as np
from scipy.special import gammaln, xlogy

TYPICALITY_SLACK = 1e-12


@lru_cache(maxsize=1024)
def compositions(n: int, parts: int) -> np.ndarray:
    """Every nonnegative integer vector of length ``parts`` summing to ``n``.

    Rows come in reverse lexicographic order (first coordinate largest first).
    The returned array is shared and read-only.
    """
    if parts == 1:
        rows = np.array([[n]], dtype=np.int16)
    else:
        blocks = []
        for first in range(n, -1, -1):
            rest = compositions(n - first, parts - 1)
            blocks.append(np.hstack([np.full((len(rest), 1), first, dtype=np.int16), rest]))
        rows = np.vstack(blocks)
    rows.setflags(write=False)
    return rows


def count_compositions(n: int, parts: int) -> int:
    return comb(n + parts - 1, parts - 1)


def joint_type_prefixes(n: int, cells: int) -> np.ndarray:
    """Leading counts that split the joint types at blocklength ``n`` into chunks."""
    head = min(2, cells - 1)
    return compositions(n, head + 1)[:, :head]


def joint_types_with_prefix(n: int, cells: int, prefix: np.ndarray) -> np.ndarray:
    """All joint types whose first ``len(prefix)`` counts equal ``prefix``."""
    head = len(prefix)
    rest = compositions(n - int(np.sum(prefix)), cells - head)
    return np.hstack([np.broadcast_to(np.asarray(prefix, dtype=np.int16), (len(rest), head)), rest])


def iter_joint_types(n: int, cells: int) -> Iterator[np.ndarray]:
    """Yield every joint type at blocklength ``n`` in chunks sharing their leading counts."""
    for prefix in joint_type_prefixes(n, cells):
        yield joint_types_with_prefix(n, cells, prefix)


def log_type_probability(counts: np.ndarray, probs: np.ndarray, n: int) -> np.ndarray:
    """ln Pr{type class} = ln multinomial(n; counts) + Σ counts·ln p, row by row."""
    log_coeff = gammaln(n + 1.0) - gammaln(counts + 1.0).sum(axis=-1)
    return log_coeff + xlogy(counts, np.asarray(probs, dtype=float)).sum(axis=-1)


def marginal_counts(counts: np.ndarray, shape: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    """Sum flat joint counts (rows) over every axis of ``shape`` not in ``keep``."""
    table = counts.reshape((-1,) + shape)
    drop = tuple(1 + i for i in range(len(shape)) if i not in keep)
    summed = table.sum(axis=drop) if drop else table
    return summed.reshape(len(counts), -1)


def is_typical(counts: np.ndarray, n: int, reference: np.ndarray, radius: float) -> np.ndarray:
    """Rows whose empirical type lies within ``radius`` of ``reference`` in L∞."""
    gap = np.abs(counts / n - np.asarray(reference).reshape(-1)).max(axis=-1)
    return gap <= radius + TYPICALITY_SLACK


def joint_counts(codes: np.ndarray, cells: int) -> np.ndarray:
    """Per-row histogram of cell codes along the last axis."""
    out = np.empty(codes.shape[:-1] + (cells,), dtype=np.int64)
    for cell in range(cells):
        out[..., cell] = (codes == cell).sum(axis=-1)
    return out
