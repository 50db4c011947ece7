"""Link functions and sample matrices for block circulant / Toeplitz ensembles.

An entry a_ij is identified by a link key ``(d, s)``: ``d`` the canonical
diagonal and ``s`` the symbol read from the row (or column) that owns the
entry.  Two positions hold the same random variable iff their keys agree.
Indices in the public ``link_key`` API are 1-based; arrays are 0-based.
"""

from __future__ import annotations

import json
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .core import TOEPLITZ, EnsembleSpec, SymmetricMatrix, trial_rng


class LinkKey(NamedTuple):
    d: int
    s: int


def _half_diagonal_classes(slots: tuple[int, ...], N: int) -> tuple[int, ...]:
    """Canonical symbol for each residue on the d = N/2 wrapped diagonal.

    Entry (i, i+N/2) reads slot(i) while its transpose, also on that
    diagonal, reads slot(i+N/2); symmetry merges the two.  Returns the
    smallest symbol of each merged class.
    """
    m = len(slots)
    parent = list(range(max(slots) + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    h = (N // 2) % m
    for r in range(m):
        a, b = find(slots[r]), find(slots[(r + h) % m])
        if a != b:
            parent[max(a, b)] = min(a, b)
    return tuple(find(slots[r]) for r in range(m))


def _check_index(spec: EnsembleSpec, i: int, j: int):
    if not (1 <= i <= spec.N and 1 <= j <= spec.N):
        raise IndexError(f"index ({i}, {j}) outside 1..{spec.N}")


def link_key(spec: EnsembleSpec, i: int, j: int) -> LinkKey:
    """Canonical variable key of entry (i, j), 1-based."""
    _check_index(spec, i, j)
    N, m, slots = spec.N, spec.m, spec.slots
    r, c = i - 1, j - 1
    if spec.kind == TOEPLITZ:
        d = c - r
        return LinkKey(d, slots[r % m]) if d >= 0 else LinkKey(-d, slots[c % m])
    d = (c - r) % N
    if 2 * d < N:
        return LinkKey(d, slots[r % m])
    if 2 * d > N:
        return LinkKey(N - d, slots[c % m])
    return LinkKey(d, _half_diagonal_classes(slots, N)[r % m])


def link_arrays(spec: EnsembleSpec) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``link_key`` over the whole N x N grid: (d, s) arrays."""
    N, m = spec.N, spec.m
    slots = np.asarray(spec.slots)
    r = np.arange(N)[:, None]
    c = np.arange(N)[None, :]
    srow = np.broadcast_to(slots[r % m], (N, N))
    scol = np.broadcast_to(slots[c % m], (N, N))
    if spec.kind == TOEPLITZ:
        d = c - r
        return np.abs(d), np.where(d >= 0, srow, scol)
    d = (c - r) % N
    upper = 2 * d < N
    dd = np.where(upper, d, N - d)
    s = np.where(upper, srow, scol)
    if N % 2 == 0:
        half = np.asarray(_half_diagonal_classes(spec.slots, N))
        s = np.where(2 * d == N, np.broadcast_to(half[r % m], (N, N)), s)
    return dd, s


def link_ids(spec: EnsembleSpec) -> tuple[np.ndarray, int]:
    """Dense variable ids (0..n_vars-1, ordered by key) and the number of variables."""
    return _link_ids(spec.kind, spec.N, spec.m, spec.slots)


@lru_cache(maxsize=32)
def _link_ids(kind: str, N: int, m: int, slots: tuple[int, ...]):
    tmp = _KeySpec(kind, N, m, slots)
    d, s = link_arrays(tmp)
    code = d.astype(np.int64) * (max(slots) + 1) + s
    uniq, inv = np.unique(code, return_inverse=True)
    ids = inv.reshape(N, N).astype(np.int64)
    ids.setflags(write=False)
    return ids, int(uniq.size)


class _KeySpec(NamedTuple):
    kind: str
    N: int
    m: int
    slots: tuple[int, ...]


def count_free_parameters(spec: EnsembleSpec) -> int:
    """Number of independent variables in an N x N matrix of the ensemble."""
    return link_ids(spec)[1]


def build_matrix(spec: EnsembleSpec, trial: int = 0) -> SymmetricMatrix:
    """Draw one matrix; trial ``t`` uses the stream derived from (seed, t)."""
    ids, n_vars = link_ids(spec)
    values = spec.dist.sample(trial_rng(spec.seed, trial), n_vars)
    return SymmetricMatrix(values[ids], link=ids, spec=spec)


def first_block_row(M: SymmetricMatrix, m: int) -> np.ndarray:
    """Blocks B_0..B_{n-1} of the first block row, shape (N/m, m, m)."""
    N = M.n
    if N % m:
        raise ValueError(f"m={m} does not divide N={N}")
    return M.entries[:m].reshape(m, N // m, m).transpose(1, 0, 2)


def matrix_to_csv(M: SymmetricMatrix, path) -> None:
    np.savetxt(path, M.entries, delimiter=",", fmt="%.17g")


def describe(spec: EnsembleSpec) -> str:
    return json.dumps(spec.to_dict(), sort_keys=True)
