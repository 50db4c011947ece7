"""Eigenvalues, empirical spectral measures and spacing statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import PATTERN, CIRCULANT, EnsembleSpec, SymmetricMatrix
from .ensembles import first_block_row


@lru_cache(maxsize=64)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Disjoint index pairs for each round of a cyclic tournament on n players.

    Every pair (p, q), p < q, appears in exactly one round; within a round no
    index repeats, so the rotations of a round commute.
    """
    players = list(range(n + (n % 2)))
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        ps, qs = [], []
        for a in range(size // 2):
            p, q = players[a], players[size - 1 - a]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(a: np.ndarray) -> np.ndarray:
    off = a * ~np.eye(a.shape[-1], dtype=bool)
    return np.sqrt((off * off).sum(axis=(-2, -1)))


def jacobi_eigvalsh(a, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of real symmetric matrices by cyclic Jacobi rotations.

    Accepts a stack ``(..., n, n)`` and returns ascending eigenvalues
    ``(..., n)``.  Sweeps use the round-robin ordering so each round's n/2
    rotations are applied at once.  Stops when the off-diagonal Frobenius
    norm is at most ``tol`` times the initial Frobenius norm.
    """
    a = np.array(a, dtype=float, copy=True)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError("expected square matrices")
    if not np.array_equal(a, np.swapaxes(a, -1, -2)):
        raise ValueError("matrix is not symmetric")
    n = a.shape[-1]
    if n == 1:
        return a[..., 0].copy()
    target = tol * np.sqrt((a * a).sum(axis=(-2, -1)))
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        if np.all(_off_norm(a) <= target):
            break
        for p, q in rounds:
            app = a[..., p, p]
            aqq = a[..., q, q]
            apq = a[..., p, q]
            nz = apq != 0.0
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                theta = (aqq - app) / (2.0 * np.where(nz, apq, 1.0))
                t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(theta == 0.0, 1.0, t)
            t = np.where(nz & np.isfinite(t), t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rp = a[..., p, :]
            rq = a[..., q, :]
            cc, ss = c[..., None], s[..., None]
            a[..., p, :] = cc * rp - ss * rq
            a[..., q, :] = ss * rp + cc * rq
            cp = a[..., :, p]
            cq = a[..., :, q]
            cc, ss = c[..., None, :], s[..., None, :]
            a[..., :, p] = cc * cp - ss * cq
            a[..., :, q] = ss * cp + cc * cq
            a[..., p, q] = 0.0
            a[..., q, p] = 0.0
    else:
        if not np.all(_off_norm(a) <= target):
            raise RuntimeError("Jacobi iteration did not converge")
    return np.sort(np.diagonal(a, axis1=-2, axis2=-1), axis=-1)


@dataclass
class SpectralMeasure:
    """Sorted normalised eigenvalues lambda_i / sqrt(N) of one N x N matrix."""

    N: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.sort(np.asarray(self.values, dtype=float))
        if self.values.shape != (self.N,):
            raise ValueError(f"expected {self.N} eigenvalues, got {self.values.shape}")

    def moment(self, n: int) -> float:
        return empirical_moment(self, n)


def eigs_dense(M: SymmetricMatrix | np.ndarray) -> SpectralMeasure:
    a = M.entries if isinstance(M, SymmetricMatrix) else np.asarray(M, dtype=float)
    N = a.shape[0]
    return SpectralMeasure(N, jacobi_eigvalsh(a) / math.sqrt(N))


def hermitian_eigvalsh(h: np.ndarray) -> np.ndarray:
    """Eigenvalues of Hermitian m x m matrices via the real 2m x 2m embedding.

    [[X, -Y], [Y, X]] has every eigenvalue of X + iY twice; keep every
    second one of the sorted list.
    """
    x, y = h.real, h.imag
    top = np.concatenate([x, -y], axis=-1)
    bottom = np.concatenate([y, x], axis=-1)
    emb = np.concatenate([top, bottom], axis=-2)
    emb = 0.5 * (emb + np.swapaxes(emb, -1, -2))
    return jacobi_eigvalsh(emb)[..., ::2]


def block_fourier(blocks: np.ndarray) -> np.ndarray:
    """H_t = sum_j B_j w^{jt}, w = exp(2 pi i / n), for t = 0..n-1."""
    n = blocks.shape[0]
    return n * np.fft.ifft(blocks, axis=0)


def eigs_block_circulant(spec: EnsembleSpec, M: SymmetricMatrix) -> SpectralMeasure:
    """Spectrum of an m-block circulant matrix from its first block row.

    The DFT over blocks splits the matrix into N/m Hermitian m x m pieces
    whose eigenvalues together are those of M.
    """
    if spec.kind not in (CIRCULANT, PATTERN):
        raise ValueError(f"block DFT path needs a circulant ensemble, got {spec.kind!r}")
    if M.n != spec.N:
        raise ValueError("matrix size does not match the ensemble spec")
    H = block_fourier(first_block_row(M, spec.m))
    vals = hermitian_eigvalsh(H).ravel()
    return SpectralMeasure(spec.N, vals / math.sqrt(spec.N))


def spectrum(spec: EnsembleSpec, M: SymmetricMatrix, method: str = "auto") -> SpectralMeasure:
    if method == "auto":
        method = "block" if spec.kind in (CIRCULANT, PATTERN) else "dense"
    if method == "block":
        return eigs_block_circulant(spec, M)
    if method == "dense":
        return eigs_dense(M)
    raise ValueError(f"unknown eigen method {method!r}")


def empirical_moment(S: SpectralMeasure, n: int) -> float:
    """(1/N) sum (lambda_i / sqrt N)^n."""
    if n < 1:
        raise ValueError("moment order must be >= 1")
    return float(np.mean(S.values**n))


def histogram(samples, bins: int = 61, range: tuple[float, float] = (-3.0, 3.0)):
    """Density histogram of (pooled) normalised eigenvalues.

    Accepts a SpectralMeasure, a list of them, or a flat array.  Densities
    are relative to all samples, so mass outside ``range`` is simply lost.
    Returns (bin_centers, density).
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if isinstance(samples, SpectralMeasure):
        x = samples.values
    elif isinstance(samples, (list, tuple)) and samples and isinstance(samples[0], SpectralMeasure):
        x = np.concatenate([s.values for s in samples])
    else:
        x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empty sample")
    counts, edges = np.histogram(x, bins=bins, range=range)
    width = edges[1] - edges[0]
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, counts / (x.size * width)


@dataclass
class SpacingSample:
    """Nonzero spacings rescaled to mean 1, plus the near-zero count."""

    spacings: np.ndarray
    zero_count: int
    raw: np.ndarray

    @property
    def total(self) -> int:
        return self.zero_count + self.raw.size

    @property
    def zero_fraction(self) -> float:
        return self.zero_count / self.total if self.total else 0.0


def _rescale(raw: np.ndarray) -> np.ndarray:
    mean = raw.mean() if raw.size else 0.0
    return raw / mean if mean > 0 else raw.copy()


def central_spacings(S: SpectralMeasure, count: int = 10, tol: float = 1e-8) -> SpacingSample:
    """Spacings between the ``count`` eigenvalues closest to the median.

    ``tol`` applies to normalised eigenvalues (1e-8 here is 1e-8 * sqrt(N)
    in raw units); gaps below it are tallied as multiplicity pairs.
    """
    if count < 2:
        raise ValueError("need at least two eigenvalues")
    if count > S.N:
        raise ValueError(f"count={count} exceeds N={S.N}")
    start = min(max(S.N // 2 - count // 2, 0), S.N - count)
    gaps = np.diff(S.values[start:start + count])
    zero = gaps < tol
    raw = gaps[~zero]
    return SpacingSample(_rescale(raw), int(zero.sum()), raw)


def unpaired_count(S: SpectralMeasure, tol: float = 1e-8) -> int:
    """Eigenvalues left over after greedily pairing neighbours closer than ``tol``.

    For an m-block circulant matrix H_t and H_{n-t} share a spectrum, so at
    most 2m values (those of H_0 and, for even n = N/m, H_{n/2}) are unpaired.
    """
    v = S.values
    left, i = 0, 0
    while i < v.size:
        if i + 1 < v.size and v[i + 1] - v[i] < tol:
            i += 2
        else:
            left += 1
            i += 1
    return left


def pool_spacings(samples: list[SpacingSample]) -> SpacingSample:
    """Concatenate raw nonzero spacings of many trials and rescale jointly."""
    raw = np.concatenate([s.raw for s in samples]) if samples else np.empty(0)
    return SpacingSample(_rescale(raw), sum(s.zero_count for s in samples), raw)


def reference_spacing_density(kind: str, s):
    """exponential: e^{-s}; goe-surmise: (pi s / 2) exp(-pi s^2 / 4)."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("spacing must be nonnegative")
    if kind == "exponential":
        out = np.exp(-s_arr)
    elif kind in ("goe", "goe-surmise"):
        out = 0.5 * np.pi * s_arr * np.exp(-0.25 * np.pi * s_arr**2)
    else:
        raise ValueError(f"unknown reference density {kind!r}")
    return float(out) if out.ndim == 0 else out


def ks_distance(sample, kind: str = "exponential") -> float:
    """Kolmogorov-Smirnov distance between a spacing sample and a reference law."""
    from scipy import stats

    x = np.asarray(sample, dtype=float)
    if kind == "exponential":
        return float(stats.kstest(x, "expon").statistic)
    if kind in ("goe", "goe-surmise"):
        return float(stats.kstest(x, lambda s: 1.0 - np.exp(-0.25 * np.pi * np.asarray(s) ** 2)).statistic)
    raise ValueError(f"unknown reference density {kind!r}")
