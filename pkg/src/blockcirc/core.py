"""Shared types, the sampling contract and small exact-arithmetic helpers."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

CIRCULANT = "circulant"
TOEPLITZ = "toeplitz"
PATTERN = "pattern"
KINDS = (CIRCULANT, TOEPLITZ, PATTERN)

DEFAULT_MAX_DIM = 4096


class InvariantViolation(RuntimeError):
    """A quantity that must hold by construction did not (e.g. non-integral genus)."""


@dataclass(frozen=True)
class Pattern:
    """One period of a wrapped diagonal, e.g. ``Pattern.parse("aabb")``.

    Symbols are relabelled to integers in order of first appearance, so
    ``"abab"`` and ``"xyxy"`` are the same pattern.
    """

    symbols: tuple[int, ...]

    def __post_init__(self):
        if len(self.symbols) < 1:
            raise ValueError("pattern must have length >= 1")
        relabel: dict = {}
        canon = tuple(relabel.setdefault(s, len(relabel)) for s in self.symbols)
        object.__setattr__(self, "symbols", canon)

    @classmethod
    def parse(cls, text: str | Sequence) -> "Pattern":
        if isinstance(text, str):
            text = text.strip().strip("{}").replace(",", "").replace(" ", "")
        return cls(tuple(text))

    @classmethod
    def all_distinct(cls, m: int) -> "Pattern":
        return cls(tuple(range(m)))

    @property
    def m(self) -> int:
        return len(self.symbols)

    @property
    def n_symbols(self) -> int:
        return max(self.symbols) + 1

    @property
    def counts(self) -> dict[int, int]:
        """Occurrences of each symbol within the period."""
        return dict(sorted(Counter(self.symbols).items()))

    def is_all_distinct(self) -> bool:
        return self.n_symbols == self.m

    def __str__(self):
        letters = "abcdefghijklmnopqrstuvwxyz"
        if self.n_symbols <= len(letters):
            return "".join(letters[s] for s in self.symbols)
        return ",".join(map(str, self.symbols))


_DIST_ALIASES = {
    "gaussian": "gaussian",
    "standard-gaussian": "gaussian",
    "normal": "gaussian",
    "rademacher": "rademacher",
    "uniform": "uniform",
    "uniform-scaled": "uniform",
}


@dataclass(frozen=True)
class EntryDistribution:
    """Mean-zero, unit-variance entry law with closed-form even moments."""

    kind: str = "gaussian"

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", _DIST_ALIASES[self.kind])
        except KeyError:
            raise ValueError(f"unknown entry distribution {self.kind!r}") from None

    def sample(self, rng: np.random.Generator, size=None):
        if self.kind == "gaussian":
            return rng.standard_normal(size)
        if self.kind == "rademacher":
            return rng.choice(np.array([-1.0, 1.0]), size=size)
        s3 = math.sqrt(3.0)
        return rng.uniform(-s3, s3, size)

    def even_moment(self, j: int) -> Fraction:
        return even_moment(self, j)


GAUSSIAN = EntryDistribution("gaussian")


def double_factorial(n: int) -> int:
    """n!! with the convention (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError("double factorial undefined below -1")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def even_moment(dist: EntryDistribution, j: int) -> Fraction:
    """E[X^{2j}] for the entry distribution, exactly."""
    if j < 0:
        raise ValueError("j must be >= 0")
    if dist.kind == "gaussian":
        return Fraction(double_factorial(2 * j - 1))
    if dist.kind == "rademacher":
        return Fraction(1)
    # uniform on [-sqrt3, sqrt3]
    return Fraction(3**j, 2 * j + 1)


def moment(dist: EntryDistribution, d: int) -> Fraction:
    """E[X^d]; odd moments vanish for every supported (symmetric) law."""
    if d % 2:
        return Fraction(0)
    return even_moment(dist, d // 2)


def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """Independent stream for trial ``trial`` of a run seeded with ``seed``.

    The stream depends only on (seed, trial), never on how many trials run
    or in which order.
    """
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(int(trial),))
    return np.random.Generator(np.random.PCG64(ss))


def sample_value(dist: EntryDistribution, rng: np.random.Generator) -> float:
    return float(dist.sample(rng))


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    N: int
    m: int
    pattern: Pattern | None = None
    dist: EntryDistribution = GAUSSIAN
    seed: int = 0
    max_dim: int = field(default=DEFAULT_MAX_DIM, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if isinstance(self.pattern, str):
            object.__setattr__(self, "pattern", Pattern.parse(self.pattern))
        if isinstance(self.dist, str):
            object.__setattr__(self, "dist", EntryDistribution(self.dist))
        if self.N < 1 or self.m < 1:
            raise ValueError("N and m must be positive")
        if self.N % self.m:
            raise ValueError(f"m={self.m} does not divide N={self.N}")
        if self.N > self.max_dim:
            raise ValueError(f"N={self.N} exceeds the configured cap {self.max_dim}")
        if self.kind == PATTERN:
            if self.pattern is None:
                raise ValueError("pattern ensemble needs a pattern")
            if self.pattern.m != self.m:
                raise ValueError(
                    f"pattern length {self.pattern.m} does not match m={self.m}"
                )

    @classmethod
    def from_pattern(cls, pattern, N: int, **kw) -> "EnsembleSpec":
        if not isinstance(pattern, Pattern):
            pattern = Pattern.parse(pattern)
        return cls(PATTERN, N, pattern.m, pattern=pattern, **kw)

    @property
    def slots(self) -> tuple[int, ...]:
        """Symbol id for each residue of the 0-based row index mod m."""
        if self.kind == PATTERN:
            return self.pattern.symbols
        return tuple(range(self.m))

    def with_seed(self, seed: int) -> "EnsembleSpec":
        return EnsembleSpec(self.kind, self.N, self.m, self.pattern, self.dist, seed, self.max_dim)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "N": self.N,
            "m": self.m,
            "pattern": str(self.pattern) if self.pattern is not None else None,
            "dist": self.dist.kind,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleSpec":
        pattern = Pattern.parse(d["pattern"]) if d.get("pattern") else None
        return cls(d["kind"], int(d["N"]), int(d["m"]), pattern,
                   EntryDistribution(d.get("dist", "gaussian")), int(d.get("seed", 0)))


@dataclass
class SymmetricMatrix:
    """Dense real symmetric matrix, optionally with its entry -> variable map."""

    entries: np.ndarray
    link: np.ndarray | None = None
    spec: EnsembleSpec | None = None

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not symmetric")
        self.entries = a

    @property
    def n(self) -> int:
        return self.entries.shape[0]


# --- truncated power series over Fractions -------------------------------

def series_mul(a: Sequence[Fraction], b: Sequence[Fraction], order: int) -> list[Fraction]:
    """Product of two power series, keeping coefficients of x^0..x^order."""
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: order + 1 - i]):
            out[i + j] += ai * bj
    return out


def series_pow(a: Sequence[Fraction], e: int, order: int) -> list[Fraction]:
    result = [Fraction(1)] + [Fraction(0)] * order
    base = [Fraction(c) for c in a[: order + 1]]
    base += [Fraction(0)] * (order + 1 - len(base))
    while e:
        if e & 1:
            result = series_mul(result, base, order)
        e >>= 1
        if e:
            base = series_mul(base, base, order)
    return result


def bernoulli_numbers(n: int) -> list[Fraction]:
    """B_0..B_n (B_1 = -1/2 convention) from sum_{j<=n} C(n+1, j) B_j = 0."""
    B = [Fraction(1)]
    for k in range(1, n + 1):
        B.append(-sum(math.comb(k + 1, j) * B[j] for j in range(k)) / (k + 1))
    return B
