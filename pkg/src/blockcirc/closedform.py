"""Closed-form limiting characteristic function and density, and the m -> oo diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from scipy.integrate import simpson

from .core import double_factorial
from .moments import c_coeff

_LOG10E = math.log10(math.e)


def _log10_abs(c: Fraction) -> float:
    return math.log10(abs(c.numerator)) - math.log10(c.denominator)


def _gauss_poly(coeffs: tuple[Fraction, ...], y) -> np.ndarray:
    """exp(-y/2) * sum_r coeffs[r] y^r for y >= 0, elementwise.

    The alternating polynomial is huge where exp(-y/2) is tiny, so the sum
    runs in mpmath with enough digits to absorb the cancellation.
    """
    y = np.asarray(y, dtype=float)
    flat = y.ravel()
    if flat.size == 0:
        return y.copy()
    logc = [(r, _log10_abs(c)) for r, c in enumerate(coeffs) if c != 0]
    ly = np.log10(np.maximum(flat, 1e-300))
    peak = np.max([lc + r * ly for r, lc in logc], axis=0)
    spare = peak - 0.5 * _LOG10E * flat
    dps = int(max(20.0, float(spare.max()) + 25.0))
    out = np.empty_like(flat)
    with mpmath.workdps(dps):
        cm = [mpmath.mpf(c.numerator) / c.denominator for c in coeffs]
        for idx, v in enumerate(flat):
            yv = mpmath.mpf(float(v))
            acc = mpmath.mpf(0)
            for c in reversed(cm):
                acc = acc * yv + c
            out[idx] = float(acc * mpmath.exp(-yv / 2))
    return out.reshape(y.shape)


def _scalar_or_array(x, out):
    return float(out) if np.ndim(x) == 0 else out


@lru_cache(maxsize=None)
def laguerre_coefficients(n: int, alpha: int = 1) -> tuple[Fraction, ...]:
    """L_n^(alpha)(x) = sum_i C(n+alpha, n-i) (-x)^i / i!, as exact coefficients of x^i."""
    return tuple(
        Fraction((-1) ** i * math.comb(n + alpha, n - i), math.factorial(i)) for i in range(n + 1)
    )


def phi(m: int, t):
    """Characteristic function (1/m) exp(-t^2/2m) L^(1)_{m-1}(t^2/m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    coeffs = tuple(c / m for c in laguerre_coefficients(m - 1, 1))
    t = np.asarray(t, dtype=float)
    return _scalar_or_array(t, _gauss_poly(coeffs, t * t / m))


def phi_derivatives(m: int, t: float) -> tuple[float, float, float]:
    """(phi, phi', phi'') at t from the analytic product rule, in high precision."""
    lag = laguerre_coefficients(m - 1, 1)
    with mpmath.workdps(50):
        tt = mpmath.mpf(t)
        # Q(t) = sum_r lag_r (t^2/m)^r as a polynomial in t
        q = q1 = q2 = mpmath.mpf(0)
        for r, c in enumerate(lag):
            a = mpmath.mpf(c.numerator) / c.denominator / mpmath.mpf(m) ** r
            q += a * tt ** (2 * r)
            if r >= 1:
                q1 += a * 2 * r * tt ** (2 * r - 1)
                q2 += a * 2 * r * (2 * r - 1) * tt ** (2 * r - 2)
        g = mpmath.exp(-tt**2 / (2 * m))
        g1 = -tt / m * g
        g2 = (tt**2 / m**2 - mpmath.mpf(1) / m) * g
        f0 = g * q / m
        f1 = (g1 * q + g * q1) / m
        f2 = (g2 * q + 2 * g1 * q1 + g * q2) / m
        return float(f0), float(f1), float(f2)


def phi_ode_residual(m: int, t: float) -> float:
    """t phi'' + 3 phi' + t (4 - (t/m)^2) phi."""
    f0, f1, f2 = phi_derivatives(m, t)
    return t * f2 + 3 * f1 + t * (4 - (t / m) ** 2) * f0


def phi_series(m: int, t, terms: int = 20):
    """Truncated moment series sum_k (-t^2)^k m^{-(k+1)} (2k-1)!! c(k,m) / (2k)!."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for k in range(terms + 1):
        coef = Fraction(double_factorial(2 * k - 1), m ** (k + 1) * math.factorial(2 * k)) * c_coeff(k, m)
        total = total + float(coef) * (-t * t) ** k
    return _scalar_or_array(t, total)


@lru_cache(maxsize=None)
def density_coefficients(m: int) -> tuple[Fraction, ...]:
    """p_r with f_m(x) = exp(-m x^2/2) / sqrt(2 pi m) * sum_r p_r (m x^2)^r."""
    if m < 1:
        raise ValueError("m must be >= 1")
    out = []
    for r in range(m):
        inner = Fraction(0)
        for s in range(0, m - r + 1):
            inner += (
                math.comb(m, r + s + 1)
                * Fraction(math.factorial(2 * r + 2 * s), math.factorial(r + s) * math.factorial(s))
                * Fraction(-1, 2) ** s
            )
        out.append(inner / math.factorial(2 * r))
    return tuple(out)


@dataclass(frozen=True)
class DensityModel:
    """Limiting spectral density of the m-block circulant ensemble."""

    m: int

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return density_coefficients(self.m)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        y = self.m * (x * x)
        vals = _gauss_poly(self.coefficients, y) / math.sqrt(2 * math.pi * self.m)
        return _scalar_or_array(x, vals)


def density(m: int, x):
    return DensityModel(m)(x)


def wigner_density(x):
    """Semi-ellipse (1/pi) sqrt(1 - (x/2)^2) on |x| <= 2."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= 2
    out = np.where(inside, np.sqrt(np.clip(1 - (x / 2) ** 2, 0, None)) / np.pi, 0.0)
    return _scalar_or_array(x, out)


def quadrature_moment(m: int, n: int, half_width: float = 8.0, h: float = 0.005) -> float:
    """Integral of x^n f_m(x) over [-half_width, half_width] by composite Simpson."""
    x = np.linspace(-half_width, half_width, int(round(2 * half_width / h)) + 1)
    return float(simpson(x**n * density(m, x), x=x))


def default_grid() -> np.ndarray:
    return np.linspace(-3.0, 3.0, 601)


def sup_distance_to_wigner(m: int, grid=None) -> float:
    x = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if x.min() > -3 or x.max() < 3 or np.max(np.diff(np.sort(x))) > 0.01 + 1e-12:
        raise ValueError("grid must cover [-3, 3] with step <= 0.01")
    return float(np.max(np.abs(density(m, x) - wigner_density(x))))


def wigner_convergence(ms=(4, 8, 16, 32, 64, 128), grid=None) -> tuple[np.ndarray, float]:
    """Sup distances for each m and the least-squares log-log slope."""
    ms = np.asarray(ms, dtype=float)
    dist = np.array([sup_distance_to_wigner(int(m), grid) for m in ms])
    slope = float(np.polyfit(np.log(ms), np.log(dist), 1)[0])
    return dist, slope


def phi_numeric_transform_check(m: int, xs=None, h: float = 0.01) -> float:
    """Max |(1/2pi) int e^{-itx} phi_m(t) dt - f_m(x)| with |t| <= 40 sqrt(m).

    phi is even and real, so the transform is (1/pi) int_0^T cos(tx) phi(t) dt.
    """
    if m > 32:
        raise ValueError("transform check supports m <= 32")
    xs = np.linspace(-4.0, 4.0, 81) if xs is None else np.asarray(xs, dtype=float)
    T = 40.0 * math.sqrt(m)
    t = np.linspace(0.0, T, int(math.ceil(T / h)) + 1)
    ph = phi(m, t)
    approx = simpson(np.cos(np.outer(xs, t)) * ph, x=t, axis=1) / math.pi
    return float(np.max(np.abs(approx - density(m, xs))))
