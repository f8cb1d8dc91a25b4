"""Bernoulli numbers, complex log-Gamma / digamma, and composite Gauss-Legendre.

log Gamma and digamma use the Stirling series with ten correction terms after
shifting the argument to Re(z) > 12, and the reflection formula for
Re(z) < 1/2. All routines accept numpy arrays.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import AccuracyError

STIRLING_TERMS = 10
STIRLING_SHIFT = 12.0
HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


@lru_cache(maxsize=None)
def bernoulli_numbers(n: int) -> tuple[Fraction, ...]:
    """Exact B_0..B_n (B_1 = -1/2 convention)."""
    B = [Fraction(0)] * (n + 1)
    B[0] = Fraction(1)
    for m in range(1, n + 1):
        acc = Fraction(0)
        binom = 1
        for k in range(m):
            acc += binom * B[k]
            binom = binom * (m + 1 - k) // (k + 1)
        B[m] = -acc / (m + 1)
    return tuple(B)


@lru_cache(maxsize=None)
def em_coefficients(M: int) -> np.ndarray:
    """B_{2k}/(2k)! for k = 1..M."""
    B = bernoulli_numbers(2 * M)
    return np.array([float(B[2 * k] / math.factorial(2 * k)) for k in range(1, M + 1)])


@lru_cache(maxsize=None)
def _stirling_coefficients() -> np.ndarray:
    B = bernoulli_numbers(2 * STIRLING_TERMS)
    return np.array([float(B[2 * k] / (2 * k * (2 * k - 1))) for k in range(1, STIRLING_TERMS + 1)])


@lru_cache(maxsize=None)
def _digamma_coefficients() -> np.ndarray:
    B = bernoulli_numbers(2 * STIRLING_TERMS)
    return np.array([float(B[2 * k] / (2 * k)) for k in range(1, STIRLING_TERMS + 1)])


def _loggamma_right(z: np.ndarray) -> np.ndarray:
    # Re(z) >= 1/2 assumed; principal branch continued from the positive axis
    shift = np.maximum(0, np.ceil(STIRLING_SHIFT - z.real)).astype(int)
    acc = np.zeros_like(z)
    w = z.copy()
    for k in range(int(shift.max(initial=0))):
        m = shift > k
        acc[m] += np.log(w[m])
        w[m] += 1.0
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(z)
    for c in _stirling_coefficients()[::-1]:
        series = series * inv2 + c
    return (w - 0.5) * np.log(w) - w + HALF_LOG_2PI + series * inv - acc


def log_sin_pi(z: np.ndarray) -> np.ndarray:
    """A logarithm of sin(pi z), stable for large |Im z| (branch unspecified)."""
    z = np.asarray(z, dtype=complex)
    w = np.pi * z
    up = w.imag >= 0
    # sin w = (i/2) e^{-iw} (1 - e^{2iw}) for Im w >= 0, mirrored below
    e = np.where(up, np.exp(2j * np.where(up, w, 0)), np.exp(-2j * np.where(up, 0, w)))
    base = np.where(up, np.log(0.5j) - 1j * w, np.log(-0.5j) + 1j * w)
    return base + np.log1p(-e)


def loggamma(z) -> np.ndarray:
    """log Gamma(z); exp(loggamma(z)) = Gamma(z) everywhere off the poles.

    For Re(z) >= 1/2 this is the principal analytic branch.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty_like(z)
    right = z.real >= 0.5
    if right.any():
        out[right] = _loggamma_right(z[right])
    if (~right).any():
        zl = z[~right]
        out[~right] = math.log(math.pi) - log_sin_pi(zl) - _loggamma_right(1.0 - zl)
    return out


def cot(w) -> np.ndarray:
    """cot(w) evaluated without overflow for large |Im w|."""
    w = np.asarray(w, dtype=complex)
    up = w.imag >= 0
    e = np.where(up, np.exp(2j * np.where(up, w, 0)), np.exp(-2j * np.where(up, 0, w)))
    return np.where(up, -1j * (1 + e) / (1 - e), 1j * (1 + e) / (1 - e))


def _digamma_right(z: np.ndarray) -> np.ndarray:
    shift = np.maximum(0, np.ceil(STIRLING_SHIFT - z.real)).astype(int)
    acc = np.zeros_like(z)
    w = z.copy()
    for k in range(int(shift.max(initial=0))):
        m = shift > k
        acc[m] += 1.0 / w[m]
        w[m] += 1.0
    inv2 = 1.0 / (w * w)
    series = np.zeros_like(z)
    for c in _digamma_coefficients()[::-1]:
        series = series * inv2 + c
    return np.log(w) - 0.5 / w - series * inv2 - acc


@lru_cache(maxsize=None)
def _trigamma_coefficients() -> np.ndarray:
    B = bernoulli_numbers(2 * STIRLING_TERMS)
    return np.array([float(B[2 * k]) for k in range(1, STIRLING_TERMS + 1)])


def trigamma(z) -> np.ndarray:
    """psi'(z) for Re(z) >= 1/2."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(z.real < 0.5):
        raise ValueError("trigamma is implemented for Re(z) >= 1/2 only")
    shift = np.maximum(0, np.ceil(STIRLING_SHIFT - z.real)).astype(int)
    acc = np.zeros_like(z)
    w = z.copy()
    for k in range(int(shift.max(initial=0))):
        m = shift > k
        acc[m] += 1.0 / (w[m] * w[m])
        w[m] += 1.0
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(z)
    for c in _trigamma_coefficients()[::-1]:
        series = series * inv2 + c
    return inv + 0.5 * inv2 + series * inv2 * inv + acc


def digamma(z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty_like(z)
    right = z.real >= 0.5
    if right.any():
        out[right] = _digamma_right(z[right])
    if (~right).any():
        zl = z[~right]
        out[~right] = _digamma_right(1.0 - zl) - np.pi * cot(np.pi * zl)
    return out


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

GL_ORDER = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


def _panel_sums(f, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
    return half * (vals @ _GL_W)


def adaptive_gauss_legendre(f, a: float, b: float, tol: float = 1e-10,
                            initial_panels: int = 1, max_rounds: int = 40) -> float:
    """Integrate a vectorized real function over [a, b].

    Each panel is compared with its two halves; panels whose estimates differ
    by more than their share of ``tol`` are halved and retried, until the
    summed differences fall below ``tol``.
    """
    if b == a:
        return 0.0
    edges = np.linspace(a, b, initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    whole = _panel_sums(f, lo, hi)
    total = 0.0
    spent = 0.0  # error estimates of accepted panels
    width = abs(b - a)
    for _ in range(max_rounds):
        mid = 0.5 * (lo + hi)
        left = _panel_sums(f, lo, mid)
        right = _panel_sums(f, mid, hi)
        fine = left + right
        err = np.abs(fine - whole)
        share = tol * np.abs(hi - lo) / width
        ok = err <= np.maximum(share, 1e-15 * np.abs(fine))
        total += float(fine[ok].sum())
        spent += float(err[ok].sum())
        # global test: lets panels at integrable singularities stop shrinking
        if ok.all() or spent + float(err[~ok].sum()) <= tol:
            return total + float(fine[~ok].sum())
        bad = ~ok
        lo = np.concatenate([lo[bad], mid[bad]])
        hi = np.concatenate([mid[bad], hi[bad]])
        whole = np.concatenate([left[bad], right[bad]])
    raise AccuracyError(
        "adaptive quadrature did not converge",
        achieved=float(np.abs(fine - whole).sum()),
        estimates=(total + float(whole.sum()), total + float(fine[~ok].sum())),
    )
