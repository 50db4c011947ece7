"""Generalized-pattern circulant ensembles: zones, pairing counts, exact finite-N moments."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import GAUSSIAN, EntryDistribution, EnsembleSpec, InvariantViolation, Pattern, moment
from .ensembles import build_matrix, link_ids
from .moments import enumerate_pairings
from .spectra import spectrum

MAX_EXACT_N = 16
MAX_EXACT_ORDER = 6
MAX_COUNT_N = 360
MAX_COUNT_K = 3
AREA_I, AREA_II = "I", "II"


@dataclass(frozen=True)
class ZoneId:
    zone: int

    def __post_init__(self):
        if self.zone not in (1, 2, 3, 4):
            raise ValueError(f"zone must be 1..4, got {self.zone}")

    @property
    def area(self) -> str:
        return AREA_I if self.zone in (1, 3) else AREA_II


@dataclass(frozen=True)
class PatternMomentResult:
    k: int
    pattern: Pattern
    N: int | None
    value: Fraction | float
    method: str  # finite-N-exact | pairing-count | analytic


def _as_pattern(pattern) -> Pattern:
    return pattern if isinstance(pattern, Pattern) else Pattern.parse(pattern)


def classify_zone(N: int, i: int, j: int) -> ZoneId:
    """Zone of entry (i, j), 1-based, from the raw difference j - i in (-N, N).

    1: 0 <= j-i <= N/2-1    2: N/2 <= j-i <= N-1
    3: N/2 <= i-j <= N-1    4: 1 <= i-j <= N/2-1
    """
    if N % 2:
        raise ValueError("zones need even N")
    if not (1 <= i <= N and 1 <= j <= N):
        raise IndexError(f"index ({i}, {j}) outside 1..{N}")
    h = N // 2
    d = j - i
    if 0 <= d < h:
        return ZoneId(1)
    if d >= h:
        return ZoneId(2)
    if -d >= h:
        return ZoneId(3)
    return ZoneId(4)


def _pattern_spec(pattern, N: int) -> EnsembleSpec:
    p = _as_pattern(pattern)
    return EnsembleSpec.from_pattern(p, N, max_dim=max(N, 1))


# --- exact finite-N moment ------------------------------------------------

def pattern_moment_finite_exact(pattern, N: int, n: int, dist: EntryDistribution = GAUSSIAN,
                                chunk: int = 1 << 16) -> Fraction:
    """E[(1/N) tr (M/sqrt N)^n] exactly, summing over all N^n index tuples.

    Each tuple contributes the product of E[X^c] over the variable classes
    of its n factors; tuples are grouped by the multiset of class sizes.
    """
    if N > MAX_EXACT_N or n > MAX_EXACT_ORDER:
        raise ValueError(f"exact oracle limited to N <= {MAX_EXACT_N}, n <= {MAX_EXACT_ORDER}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if n % 2:
        return Fraction(0)
    ids, _ = link_ids(_pattern_spec(pattern, N))
    base = n + 1
    weights = base ** np.arange(n, dtype=np.int64)
    tally: dict[int, int] = {}
    total = N**n
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total), dtype=np.int64)
        idx = np.stack([(flat // N**p) % N for p in range(n)], axis=1)
        fac = ids[idx, np.roll(idx, -1, axis=1)]
        mult = (fac[:, :, None] == fac[:, None, :]).sum(axis=2)
        code = np.sort(mult, axis=1) @ weights
        keys, counts = np.unique(code, return_counts=True)
        for key, cnt in zip(keys.tolist(), counts.tolist()):
            tally[key] = tally.get(key, 0) + cnt
    out = Fraction(0)
    for key, cnt in tally.items():
        mult = [(key // base**p) % base for p in range(n)]
        term = Fraction(1)
        # a class of size c shows up c times in the multiplicity vector
        for c, reps in sorted(Counter(mult).items()):
            term *= moment(dist, c) ** (reps // c)
        out += cnt * term
    return out / Fraction(N) ** (n // 2 + 1)


# --- asymptotic pairing count ---------------------------------------------

def _difference_classes(N: int, m: int):
    """Partition of 0..N-1 into (representative, size) by branch and residue mod m."""
    groups: dict[tuple[int, int], list[int]] = {}
    for x in range(N):
        branch = 0 if x == 0 else 1 if 2 * x < N else 2 if 2 * x == N else 3
        g = groups.setdefault((branch, x % m), [x, 0])
        g[1] += 1
    return [(rep, size, branch) for (branch, _), (rep, size) in sorted(groups.items())]


def _check_count_args(pattern, N: int, k: int) -> EnsembleSpec:
    if not 1 <= k <= MAX_COUNT_K:
        raise ValueError(f"k must be in 1..{MAX_COUNT_K}")
    if N > MAX_COUNT_N:
        raise ValueError(f"N must be <= {MAX_COUNT_N}")
    return _pattern_spec(pattern, N)


def _zone_check(N: int, a: tuple[int, int], b: tuple[int, int]):
    za = classify_zone(N, a[0] + 1, a[1] + 1)
    zb = classify_zone(N, b[0] + 1, b[1] + 1)
    if za.area == zb.area:
        raise InvariantViolation(f"paired entries {a}, {b} share area {za.area}")


def pairing_eta(pattern, N: int, sigma) -> int:
    """Index tuples meeting the diagonal and modulo conditions for pairing sigma.

    The tuple is fixed by i_1 and one difference x per pair (the partner gets
    -x).  Validity depends only on i_1 mod m and each x's branch
    (0, < N/2, = N/2, > N/2) and residue mod m, so each class is checked once
    on a representative and weighted by its size.
    """
    spec = _pattern_spec(pattern, N)
    ids, _ = link_ids(spec)
    m = spec.m
    n = len(sigma)
    firsts = [s for s in range(n) if s < sigma[s]]
    classes = _difference_classes(N, m)
    zone_ok = N % 2 == 0
    eta = 0
    for choice in itertools.product(classes, repeat=len(firsts)):
        diff = [0] * n
        for s, (rep, _, _) in zip(firsts, choice):
            diff[s] = rep
            diff[sigma[s]] = (-rep) % N
        weight = math.prod(size for _, size, _ in choice)
        for i1 in range(m):
            idx = [i1]
            for s in range(n - 1):
                idx.append((idx[-1] + diff[s]) % N)
            edges = [(idx[s], idx[(s + 1) % n]) for s in range(n)]
            if all(ids[edges[s]] == ids[edges[sigma[s]]] for s in firsts):
                eta += weight
                if zone_ok:
                    for s, (_, _, branch) in zip(firsts, choice):
                        if branch in (1, 3):
                            _zone_check(N, edges[s], edges[sigma[s]])
    # i_1 ranges over N values, N/m per residue
    return eta * (N // m)


def pattern_moment_pairing_count(pattern, N: int, k: int, threads: int = 1) -> float:
    """N^{-(k+1)} sum over pairings of eta, opposite orientation only."""
    _check_count_args(pattern, N, k)
    pairings = list(enumerate_pairings(k))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            etas = list(ex.map(lambda s: pairing_eta(pattern, N, s), pairings))
    else:
        etas = [pairing_eta(pattern, N, s) for s in pairings]
    return sum(etas) / N ** (k + 1)


def pattern_moment_pairing_count_bruteforce(pattern, N: int, k: int) -> float:
    """Same count over all N^{2k} tuples; only for small N."""
    if N ** (2 * k) > 5_000_000:
        raise ValueError("brute-force count too large")
    spec = _pattern_spec(pattern, N)
    ids, _ = link_ids(spec)
    n = 2 * k
    grids = np.meshgrid(*[np.arange(N)] * n, indexing="ij")
    idx = [g.ravel() for g in grids]
    nxt = idx[1:] + idx[:1]
    total = 0
    for sigma in enumerate_pairings(k):
        ok = np.ones(idx[0].size, dtype=bool)
        for s in range(n):
            t = sigma[s]
            if s < t:
                ds = (nxt[s] - idx[s]) % N
                dt = (nxt[t] - idx[t]) % N
                ok &= (ds + dt) % N == 0
                ok &= ids[idx[s], nxt[s]] == ids[idx[t], nxt[t]]
        total += int(ok.sum())
    return total / N ** (k + 1)


# --- analytic and simulated -----------------------------------------------

def fourth_moment_analytic(pattern) -> Fraction:
    """2 + sum_r (nu_r / m)^3 over the symbol frequencies nu_r."""
    p = _as_pattern(pattern)
    return 2 + sum((Fraction(c, p.m) ** 3 for c in p.counts.values()), Fraction(0))


def simulate_pattern_moments(pattern, N: int, trials: int, k_max: int, seed: int = 0,
                             dist: EntryDistribution = GAUSSIAN, threads: int = 1) -> dict[int, tuple[float, float]]:
    """Average even empirical moments n <= k_max over ``trials`` sampled matrices.

    Returns {n: (mean, standard error)}.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = _as_pattern(pattern)
    spec = EnsembleSpec.from_pattern(p, N, dist=dist, seed=seed)
    orders = list(range(2, k_max + 1, 2))
    if not orders:
        raise ValueError("k_max must be >= 2")

    def one(t):
        S = spectrum(spec, build_matrix(spec, t))
        return [S.moment(o) for o in orders]

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            rows = list(ex.map(one, range(trials)))
    else:
        rows = [one(t) for t in range(trials)]
    arr = np.asarray(rows)
    se = arr.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(len(orders))
    return {o: (float(arr[:, c].mean()), float(se[c])) for c, o in enumerate(orders)}
