import itertools

import numpy as np
import pytest

from blockcirc.core import EnsembleSpec
from blockcirc.genpattern import classify_zone
from blockcirc.ensembles import (
    LinkKey,
    build_matrix,
    count_free_parameters,
    describe,
    first_block_row,
    link_arrays,
    link_ids,
    link_key,
    matrix_to_csv,
)

CIRC_6 = """
c0 c1 c2 c3 c2 d1
c1 d0 d1 d2 c3 d2
c2 d1 c0 c1 c2 c3
c3 d2 c1 d0 d1 d2
c2 c3 c2 d1 c0 c1
d1 d2 c3 d2 c1 d0
"""

CIRC_8 = """
c0 c1 c2 c3 c4 d3 c2 d1
c1 d0 d1 d2 d3 d4 c3 d2
c2 d1 c0 c1 c2 c3 c4 d3
c3 d2 c1 d0 d1 d2 d3 d4
c4 d3 c2 d1 c0 c1 c2 c3
d3 d4 c3 d2 c1 d0 d1 d2
c2 c3 c4 d3 c2 d1 c0 c1
d1 d2 d3 d4 c3 d2 c1 d0
"""

TOEP_8 = """
c0 c1 c2 c3 c4 c5 c6 c7
c1 d0 d1 d2 d3 d4 d5 d6
c2 d1 c0 c1 c2 c3 c4 c5
c3 d2 c1 d0 d1 d2 d3 d4
c4 d3 c2 d1 c0 c1 c2 c3
c5 d4 c3 d2 c1 d0 d1 d2
c6 d5 c4 d3 c2 d1 c0 c1
c7 d6 c5 d4 c3 d2 c1 d0
"""


def _template(text):
    return [row.split() for row in text.strip().splitlines()]


def _same_partition(labels, ids):
    n = len(labels)
    cells = [(i, j) for i in range(n) for j in range(n)]
    fwd, back = {}, {}
    for i, j in cells:
        a, b = labels[i][j], int(ids[i, j])
        if fwd.setdefault(a, b) != b or back.setdefault(b, a) != a:
            return False
    return True


@pytest.mark.parametrize("kind,N,text", [
    ("circulant", 6, CIRC_6),
    ("circulant", 8, CIRC_8),
    ("toeplitz", 8, TOEP_8),
])
def test_display_templates(kind, N, text):
    ids, n_vars = link_ids(EnsembleSpec(kind, N, 2))
    labels = _template(text)
    assert _same_partition(labels, ids)
    assert n_vars == len({x for row in labels for x in row})


def test_display_6x6_named_entries():
    spec = EnsembleSpec("circulant", 6, 2)
    # (1,6) and (5,4) both hold d_1; (5,2) holds c_3 like (1,4)
    assert link_key(spec, 1, 6) == link_key(spec, 5, 4)
    assert link_key(spec, 5, 2) == link_key(spec, 1, 4)
    assert link_key(spec, 1, 3) == link_key(spec, 3, 5)


def test_link_key_is_symmetric():
    for kind, N, m in [("circulant", 12, 3), ("toeplitz", 12, 4), ("circulant", 10, 5)]:
        spec = EnsembleSpec(kind, N, m)
        for i, j in itertools.product(range(1, N + 1), repeat=2):
            k = link_key(spec, i, j)
            assert k == link_key(spec, j, i)
            assert isinstance(k, LinkKey)
            assert 0 <= k.d <= (N - 1 if kind == "toeplitz" else N // 2)


def test_link_key_index_range():
    spec = EnsembleSpec("circulant", 6, 2)
    with pytest.raises(IndexError):
        link_key(spec, 0, 1)
    with pytest.raises(IndexError):
        link_key(spec, 1, 7)


def test_link_arrays_match_scalar_keys():
    spec = EnsembleSpec.from_pattern("aab", 12)
    d, s = link_arrays(spec)
    for i, j in itertools.product(range(12), repeat=2):
        assert (d[i, j], s[i, j]) == tuple(link_key(spec, i + 1, j + 1))


@pytest.mark.parametrize("N,m", [(N, m) for m in (1, 2, 3, 4) for N in range(m, 25, m)])
def test_two_clause_relation_exhaustive(N, m):
    ids, _ = link_ids(EnsembleSpec("circulant", N, m))
    i = np.arange(N)
    I, J = np.meshgrid(i, i, indexing="ij")
    I, J = I.ravel(), J.ravel()
    flat = ids.ravel()
    eq = flat[:, None] == flat[None, :]
    dij = (J - I)[:, None]
    d2 = (J - I)[None, :]
    same = ((dij - d2) % N == 0) & ((I[:, None] - I[None, :]) % m == 0)
    swapped = ((dij + d2) % N == 0) & ((I[:, None] - J[None, :]) % m == 0)
    assert np.array_equal(eq, same | swapped)


def _zone_partition(N, slots):
    """Reference partition from zones: entries in zones 1, 3 read their slot
    from the row, zones 2, 4 from the column; entries on the same folded
    diagonal with matching slot symbols are equal.  On the length-N/2
    diagonal both readings apply, since the entry and its transpose share
    that wrapped diagonal."""
    parent = list(range(N * N))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    m = len(slots)
    owner = {}
    for a, b in itertools.product(range(N), repeat=2):
        d = (b - a) % N
        zone = classify_zone(N, a + 1, b + 1)
        syms = {slots[a % m] if zone.area == "I" else slots[b % m]}
        if 2 * d == N:
            syms |= {slots[a % m], slots[b % m]}
        for sym in syms:
            key = (min(d, N - d), sym)
            if key in owner:
                parent[find(a * N + b)] = find(owner[key])
            else:
                owner[key] = a * N + b
    return np.array([find(x) for x in range(N * N)]).reshape(N, N)


@pytest.mark.parametrize("pattern,N", [("aabb", 8), ("abab", 8), ("aab", 6), ("abca", 8), ("aabb", 12), ("abc", 12), ("ab", 10)])
def test_pattern_keys_match_relation_closure(pattern, N):
    spec = EnsembleSpec.from_pattern(pattern, N)
    ids, _ = link_ids(spec)
    ref = _zone_partition(N, spec.slots)
    assert _same_partition(ref.tolist(), ids)


def test_pattern_abab_slot_parity():
    spec = EnsembleSpec.from_pattern("abab", 16)
    for j in range(1, 17):
        assert link_key(spec, 1, j) == link_key(spec, 3, (j + 1) % 16 + 1)


def test_toeplitz_agrees_with_circulant_away_from_corner():
    N, m = 16, 2
    ct = link_ids(EnsembleSpec("circulant", N, m))[0]
    tt = link_ids(EnsembleSpec("toeplitz", N, m))[0]
    near = [(i, j) for i in range(N) for j in range(N) if 2 * abs(j - i) < N]
    for (a, b), (c, d) in itertools.combinations(near, 2):
        assert (ct[a, b] == ct[c, d]) == (tt[a, b] == tt[c, d])


@pytest.mark.parametrize("spec,expected", [
    (EnsembleSpec("circulant", 6, 2), 7),
    (EnsembleSpec("circulant", 6, 1), 4),
    (EnsembleSpec("circulant", 10, 1), 6),
    (EnsembleSpec("circulant", 5, 5), 15),
    (EnsembleSpec("toeplitz", 8, 2), 15),
])
def test_count_free_parameters(spec, expected):
    assert count_free_parameters(spec) == expected


def test_full_period_is_all_symmetric_matrices():
    for N in (4, 6, 7):
        assert count_free_parameters(EnsembleSpec("circulant", N, N)) == N * (N + 1) // 2


def test_repeated_symbol_has_fewer_keys():
    full = count_free_parameters(EnsembleSpec("circulant", 12, 4))
    assert count_free_parameters(EnsembleSpec.from_pattern("aabc", 12)) < full


def test_build_matrix_symmetric_and_consistent():
    spec = EnsembleSpec("circulant", 24, 3, seed=11)
    M = build_matrix(spec, trial=2)
    assert np.array_equal(M.entries, M.entries.T)
    ids = M.link
    for v in range(ids.max() + 1):
        vals = M.entries[ids == v]
        assert np.all(vals == vals[0])


def test_build_matrix_deterministic():
    spec = EnsembleSpec.from_pattern("aabb", 16, seed=3)
    assert np.array_equal(build_matrix(spec, 4).entries, build_matrix(spec, 4).entries)
    assert not np.array_equal(build_matrix(spec, 4).entries, build_matrix(spec, 5).entries)


def test_block_circulant_structure():
    N, m = 24, 4
    M = build_matrix(EnsembleSpec("circulant", N, m, seed=1))
    n = N // m
    blocks = [[M.entries[a * m:(a + 1) * m, b * m:(b + 1) * m] for b in range(n)] for a in range(n)]
    for a in range(n):
        for b in range(n):
            assert np.array_equal(blocks[a][b], blocks[0][(b - a) % n])
    B = first_block_row(M, m)
    for i in range(1, n):
        # B_{-i} = B_{n-i}, and symmetry gives B_{-i} = B_i^T
        assert np.array_equal(B[n - i], B[i].T)


def test_wrapped_diagonals_periodic():
    N, m = 20, 4
    E = build_matrix(EnsembleSpec("circulant", N, m, seed=8)).entries
    for d in range(N):
        diag = np.array([E[i, (i + d) % N] for i in range(N)])
        assert np.array_equal(diag, np.roll(diag, -m))


def test_symmetric_circulant_first_row():
    N = 9
    row = build_matrix(EnsembleSpec("circulant", N, 1, seed=2)).entries[0]
    assert np.array_equal(row[1:], row[1:][::-1])


def test_export(tmp_path):
    spec = EnsembleSpec("circulant", 4, 2, seed=1)
    M = build_matrix(spec)
    p = tmp_path / "m.csv"
    matrix_to_csv(M, p)
    assert np.array_equal(np.loadtxt(p, delimiter=","), M.entries)
    assert '"kind": "circulant"' in describe(spec)
