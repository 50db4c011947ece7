"""Pairings of 2k-gon edges, their genus, and the exact limiting moments.

A pairing is stored as a tuple ``p`` with ``p[s]`` the partner of edge s,
edges numbered 0..2k-1 (edge s joins polygon vertices s and s+1 mod 2k).
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .core import InvariantViolation, bernoulli_numbers, double_factorial, series_mul, series_pow

MAX_ENUM_K = 8
MAX_CLOSED_K = 64

Pairing = tuple[int, ...]


def enumerate_pairings(k: int) -> Iterator[Pairing]:
    """Every fixed-point-free involution of {0..2k-1}, each exactly once."""
    if not 1 <= k <= MAX_ENUM_K:
        raise ValueError(f"k must be in 1..{MAX_ENUM_K}, got {k}")
    n = 2 * k
    partner = [-1] * n

    def rec():
        try:
            s = partner.index(-1)
        except ValueError:
            yield tuple(partner)
            return
        for t in range(s + 1, n):
            if partner[t] == -1:
                partner[s], partner[t] = t, s
                yield from rec()
                partner[s] = partner[t] = -1

    yield from rec()


def is_pairing(p: Pairing) -> bool:
    return all(p[p[s]] == s and p[s] != s for s in range(len(p)))


def quotient_vertices(p: Pairing) -> int:
    """Vertex count after gluing each edge to its partner, orientations reversed."""
    n = len(p)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            parent[a] = b

    for s, t in enumerate(p):
        if s < t:
            # edge s = (s, s+1) glued to edge t = (t, t+1) reversed
            union(s, (t + 1) % n)
            union((s + 1) % n, t)
    return len({find(x) for x in range(n)})


def genus(p: Pairing, k: int | None = None) -> int:
    """Genus of the orientable surface from the pairing: 2g = k + 1 - v."""
    if k is None:
        k = len(p) // 2
    if len(p) != 2 * k or not is_pairing(p):
        raise ValueError("not a pairing of 2k edges")
    twice = k + 1 - quotient_vertices(p)
    if twice % 2 or twice < 0:
        raise InvariantViolation(f"non-integral genus for pairing {p}")
    return twice // 2


def genus_histogram(k: int) -> list[int]:
    """Number of pairings of the 2k-gon of each genus, by brute force."""
    counts = Counter(genus(p, k) for p in enumerate_pairings(k))
    return [counts.get(g, 0) for g in range(k // 2 + 1)]


@lru_cache(maxsize=None)
def _half_x_over_tanh(order: int) -> tuple[Fraction, ...]:
    """Coefficients of (x/2)/tanh(x/2) = sum B_{2n} x^{2n} / (2n)! up to x^order."""
    B = bernoulli_numbers(order)
    coeffs = [Fraction(0)] * (order + 1)
    for n in range(0, order + 1, 2):
        coeffs[n] = B[n] / math.factorial(n)
    return tuple(coeffs)


@lru_cache(maxsize=None)
def epsilon_table(k: int) -> tuple[int, ...]:
    """Harer-Zagier counts eps_g(k), g = 0..floor(k/2), from the tanh series."""
    if k < 1:
        raise ValueError("k must be >= 1")
    order = 2 * (k // 2)
    power = series_pow(_half_x_over_tanh(order), k + 1, order)
    prefactor = Fraction(math.factorial(2 * k), math.factorial(k + 1))
    out = []
    for g in range(k // 2 + 1):
        val = prefactor / math.factorial(k - 2 * g) * power[2 * g]
        if val.denominator != 1:
            raise InvariantViolation(f"eps_{g}({k}) = {val} is not an integer")
        out.append(int(val))
    return tuple(out)


@lru_cache(maxsize=None)
def c_coeff(k: int, r: int) -> Fraction:
    """c(k, r) with 1 + 2 sum_k c(k, r) x^{k+1} = ((1+x)/(1-x))^r."""
    if k < 0 or r < 1:
        raise ValueError("need k >= 0 and r >= 1")
    order = k + 1
    one_plus = [Fraction(1), Fraction(1)]
    geometric = [Fraction(1)] * (order + 1)  # 1/(1-x)
    ratio = series_mul(one_plus, geometric, order)
    return series_pow(ratio, r, order)[order] / 2


def catalan(k: int) -> int:
    if k < 0:
        raise ValueError("k must be >= 0")
    return math.comb(2 * k, k) // (k + 1)


def _check_km(k: int, m: int):
    if not 0 <= k <= MAX_CLOSED_K:
        raise ValueError(f"k must be in 0..{MAX_CLOSED_K}")
    if m < 1:
        raise ValueError("m must be >= 1")


def limiting_moment_genus_form(k: int, m: int) -> Fraction:
    """sum_g eps_g(k) m^{-2g}."""
    _check_km(k, m)
    if k == 0:
        return Fraction(1)
    return sum((Fraction(e, m ** (2 * g)) for g, e in enumerate(epsilon_table(k))), Fraction(0))


@lru_cache(maxsize=None)
def limiting_moment(k: int, m: int) -> Fraction:
    """Limit of the average 2k-th moment of the m-block circulant ensemble.

    Computed as m^{-(k+1)} (2k-1)!! c(k, m) and checked against the genus
    expansion.
    """
    _check_km(k, m)
    value = Fraction(double_factorial(2 * k - 1), m ** (k + 1)) * c_coeff(k, m)
    if value != limiting_moment_genus_form(k, m):
        raise InvariantViolation(f"closed forms disagree at k={k}, m={m}")
    return value
