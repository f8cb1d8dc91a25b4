"""Hurwitz zeta, Dirichlet L-functions and their derivatives in binary64.

Everything rests on one Euler-Maclaurin kernel. For a set of shifts a with
weights w_a and a common step q it evaluates

    sum_a w_a sum_{n>=0} (q n + a)^{-s}

as a direct sum over n < N, the integral term, the half term and M Bernoulli
corrections. The Hurwitz zeta function is the case q = 1 with one shift; the
L-function of a nonprincipal character mod q uses the residues a coprime to q
with weights chi(a). Because sum_a chi(a) = 0 for such characters the
integral terms are combined so that the pole at s = 1 cancels analytically,
and L(1, chi) needs no special treatment.

The vectorized ``*_array`` / ``l_series`` functions are the workhorses used by
the zero finder; the scalar functions return :class:`ComplexValue` records and
enforce the accuracy target.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .characters import (
    DirichletCharacter,
    chi_eval,
    root_number,
    smallest_nondividing_prime,
)
from .errors import AccuracyError, DomainError, PathThroughZero, PoleError
from .special import cot, digamma, em_coefficients, log_sin_pi, loggamma, trigamma

EPS = np.finfo(float).eps
_CHUNK = 1_500_000  # max complex entries of the direct-sum matrix per block
REFLECT_BELOW = 0.0  # primitive L left of this abscissa goes through the functional equation


@dataclass(frozen=True)
class EvalConfig:
    """Euler-Maclaurin parameters.

    ``euler_maclaurin_shift`` None selects N = max(50, ceil(1.3|t|) + 20) per
    batch; an explicit value is raised to ceil(|t|) + 10 when too small.
    """

    euler_maclaurin_shift: int | None = None
    bernoulli_terms: int = 12
    target_abs_error: float = 1e-10

    def __post_init__(self):
        if not 5 <= self.bernoulli_terms <= 30:
            raise DomainError("bernoulli_terms must lie in [5, 30]")
        if not 1e-14 <= self.target_abs_error <= 1e-6:
            raise DomainError("target_abs_error must lie in [1e-14, 1e-6]")
        if self.euler_maclaurin_shift is not None and self.euler_maclaurin_shift < 1:
            raise DomainError("euler_maclaurin_shift must be positive")

    def shift_for(self, t_abs: float) -> int:
        if self.euler_maclaurin_shift is None:
            return max(50, math.ceil(1.3 * t_abs) + 20)
        return max(self.euler_maclaurin_shift, math.ceil(t_abs) + 10)

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


DEFAULT_CONFIG = EvalConfig()


@dataclass(frozen=True)
class ComplexValue:
    re: float
    im: float
    abs_error_bound: float

    def __post_init__(self):
        if not (self.abs_error_bound >= 0 and math.isfinite(self.abs_error_bound)):
            raise AccuracyError("error bound is not finite", achieved=self.abs_error_bound)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def __complex__(self):
        return self.value

    def __abs__(self):
        return abs(self.value)


def _cv(z: complex, err: float) -> ComplexValue:
    return ComplexValue(float(z.real), float(z.imag), float(err))


# ---------------------------------------------------------------------------
# Euler-Maclaurin kernel
# ---------------------------------------------------------------------------

def _phi_series(u: np.ndarray, d: int, terms: int = 32) -> np.ndarray:
    # sum_j u^j / (j! (j+1+d))
    out = np.zeros_like(u)
    term = np.ones_like(u)
    for j in range(terms):
        out += term / (j + 1 + d)
        term = term * u / (j + 1)
    return out


def _pole_free_integral(w: np.ndarray, ell: np.ndarray, max_deriv: int) -> list[np.ndarray]:
    """Derivatives in w of exp(-w*ell)/w, each shifted by a w-only constant.

    Near w = 0 the shifted function g(w) = (exp(-w*ell) - 1)/w is used (a
    power series, smooth through the pole); elsewhere the plain form. The
    shift is the same for every residue in a row, so it cancels from any
    sum with weights adding to zero, i.e. from L(s, chi) for nonprincipal chi.
    """
    u = -w * ell
    near = np.any(np.abs(u) < 1.0, axis=-1, keepdims=True) & np.ones(u.shape, dtype=bool)
    wl = np.where(near, 1.0, w)
    e = np.exp(-wl * ell)
    plain = [e / wl, -e * (ell * wl + 1) / wl**2, e * (ell**2 * wl**2 + 2 * ell * wl + 2) / wl**3]
    out = []
    for d in range(max_deriv + 1):
        if near.any():
            # rows near the pole have |u| <= ~1.3, well inside the series' reach
            ser = (-ell) ** (1 + d) * _phi_series(np.where(near, u, 0), d)
            out.append(np.where(near, ser, plain[d]))
        else:
            out.append(plain[d])
    return out


def _em_sum(
    s: np.ndarray,
    step: float,
    shifts: np.ndarray,
    weights: np.ndarray,
    max_deriv: int,
    cfg: EvalConfig,
    cancel_pole: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """Values (max_deriv+1, P) and error estimates of the weighted sum."""
    s = np.asarray(s, dtype=complex).ravel()
    P = s.size
    out = np.zeros((max_deriv + 1, P), dtype=complex)
    err = np.zeros((max_deriv + 1, P))
    if P == 0:
        return out, err
    M = cfg.bernoulli_terms
    N = cfg.shift_for(float(np.max(np.abs(s.imag))))

    # direct part: sum over k = step*n + a, n < N
    ks = (step * np.arange(N)[:, None] + shifts[None, :]).ravel()
    cs = np.repeat(weights[None, :], N, axis=0).ravel()
    logk = np.log(ks)
    coef = np.stack([cs * (-logk) ** d for d in range(max_deriv + 1)], axis=1)
    absw2 = np.abs(cs) ** 2
    alog = np.abs(logk)
    # rounding per term ~ eps*|term|*(1 + |s| |log k|) (the phase t*log k carries
    # most of it), accumulated as a random walk
    nd = max_deriv + 1
    mag_coef = np.stack([absw2 * alog ** (2 * d + j) for d in range(nd) for j in range(3)], axis=1)
    rows = max(1, _CHUNK // ks.size)
    for i in range(0, P, rows):
        blk = s[i:i + rows]
        E = np.exp(-np.outer(blk, logk))
        out[:, i:i + rows] = (E @ coef).T
        mags = (np.exp(-2 * np.outer(blk.real, logk)) @ mag_coef).reshape(-1, nd, 3)
        a = np.abs(blk)[:, None]
        var = mags[:, :, 0] + 2 * a * mags[:, :, 1] + a**2 * mags[:, :, 2]
        err[:, i:i + rows] = 2 * EPS * np.sqrt(var).T

    # tail: y = step*N + a, x = y / step
    sc = s[:, None]
    y = step * N + shifts[None, :]
    x = y / step
    ell = np.log(y)
    c = em_coefficients(M + 1)
    poly = [np.ones_like(sc), np.zeros_like(sc), np.zeros_like(sc)]
    A = [np.full((P, shifts.size), 0.5, dtype=complex), np.zeros((P, shifts.size), complex),
         np.zeros((P, shifts.size), complex)]
    nxt = 0
    for k in range(1, M + 2):
        for j in range(nxt, 2 * k - 1):
            p0, p1, p2 = poly
            poly = [p0 * (sc + j), p1 * (sc + j) + p0, p2 * (sc + j) + 2 * p1]
        nxt = 2 * k - 1
        xp = x ** (1 - 2 * k)
        if k <= M:
            for d in range(max_deriv + 1):
                A[d] = A[d] + c[k - 1] * poly[d] * xp
        else:
            omitted = np.abs(c[k - 1] * poly[0] * xp)
            sig = sc.real + 2 * M + 1
            factor = np.where(sig > 0, np.abs(sc + 2 * M + 1) / np.where(sig > 0, sig, 1.0), np.inf)
            omitted = omitted * factor
    ys = np.exp(-sc * ell)
    parts = [ys * A[0]]
    if max_deriv >= 1:
        parts.append(ys * (A[1] - ell * A[0]))
    if max_deriv >= 2:
        parts.append(ys * (A[2] - 2 * ell * A[1] + ell**2 * A[0]))

    w = sc - 1.0
    if cancel_pole:
        integ = _pole_free_integral(w, ell, max_deriv)
        integ = [g / step for g in integ]
    else:
        e = np.exp(-w * ell)
        integ = [e / w, -e * (ell * w + 1) / w**2, e * (ell**2 * w**2 + 2 * ell * w + 2) / w**3]
    for d in range(max_deriv + 1):
        tail = (parts[d] + integ[d]) * weights[None, :]
        out[d] += tail.sum(axis=1)
        trunc = (np.abs(ys) * omitted * (ell + 2.0) ** d * np.abs(weights)[None, :]).sum(axis=1)
        rnd = 2 * EPS * np.sqrt((((np.abs(parts[d]) + np.abs(integ[d])) * (1 + np.abs(sc) * ell)) ** 2).sum(axis=1))
        err[d] += trunc + rnd
    return out, err


# ---------------------------------------------------------------------------
# Hurwitz zeta
# ---------------------------------------------------------------------------

def hurwitz_zeta_array(s, a: float, deriv: int = 0, cfg: EvalConfig = DEFAULT_CONFIG):
    """Vectorized d^deriv/ds^deriv zeta(s, a); returns (values, error estimates)."""
    if not 0 < a <= 1:
        raise DomainError(f"a must lie in (0, 1], got {a}")
    if deriv not in (0, 1, 2):
        raise DomainError("deriv must be 0, 1 or 2")
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(s == 1):
        raise PoleError("zeta(s, a) has a pole at s = 1")
    vals, errs = _em_sum(s, 1.0, np.array([float(a)]), np.array([1.0 + 0j]), deriv, cfg, False)
    return vals[deriv], errs[deriv]


def _check_accuracy(val: complex, err: float, cfg: EvalConfig, what: str) -> None:
    # absolute target below |value| = 1, relative above (binary64 cannot do better)
    if not err <= cfg.target_abs_error * max(1.0, abs(val)):
        raise AccuracyError(f"{what}: error estimate {err:.3g} exceeds target", achieved=err)


def hurwitz_zeta(s: complex, a: float, deriv: int = 0, cfg: EvalConfig = DEFAULT_CONFIG) -> ComplexValue:
    """zeta(s, a) = sum_{n>=0} (n + a)^{-s} or one of its first two s-derivatives."""
    vals, errs = hurwitz_zeta_array([s], a, deriv, cfg)
    _check_accuracy(vals[0], errs[0], cfg, "hurwitz_zeta")
    return _cv(vals[0], errs[0])


# ---------------------------------------------------------------------------
# Dirichlet L-functions
# ---------------------------------------------------------------------------

def _require_nonprincipal(chi: DirichletCharacter) -> None:
    if chi.is_principal:
        raise DomainError("principal characters are not supported")


def _residues(chi: DirichletCharacter) -> tuple[np.ndarray, np.ndarray]:
    a = np.array([n for n in range(1, chi.q) if chi.value_exponents[n] >= 0], dtype=float)
    return a, chi.values[a.astype(int)]


def l_series(chi: DirichletCharacter, s, max_deriv: int = 0, cfg: EvalConfig = DEFAULT_CONFIG):
    """L, L', ... L^(max_deriv) at an array of points.

    Returns ``(values, errors)`` of shape (max_deriv + 1, len(s)).
    """
    _require_nonprincipal(chi)
    if max_deriv not in (0, 1, 2):
        raise DomainError("max_deriv must be 0, 1 or 2")
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    a, w = _residues(chi)
    left = s.real < REFLECT_BELOW if chi.primitive else np.zeros(s.shape, bool)
    if not left.any():
        return _em_sum(s, float(chi.q), a, w, max_deriv, cfg, True)
    vals = np.zeros((max_deriv + 1, s.size), dtype=complex)
    errs = np.zeros((max_deriv + 1, s.size))
    if (~left).any():
        vals[:, ~left], errs[:, ~left] = _em_sum(s[~left], float(chi.q), a, w, max_deriv, cfg, True)
    vals[:, left], errs[:, left] = _reflected_series(chi, s[left], max_deriv, cfg)
    return vals, errs


def _f_series(chi: DirichletCharacter, s: np.ndarray, max_deriv: int):
    """F, F', F'' for Re(s) < 1/2 without overflow or 0 * inf at trivial zeros.

    F = H(s) sin(pi (s + kappa)/2) with H = eps 2^s pi^(s-1) q^(1/2-s) Gamma(1-s).
    sin and cos share a factor exp(-+ i w) that is folded into log H.
    """
    q = chi.q
    logH = (np.log(root_number(chi)) + s * math.log(2.0) + (s - 1) * math.log(math.pi)
            + (0.5 - s) * math.log(q) + loggamma(1 - s))
    wv = 0.5 * math.pi * (s + chi.parity)
    up = wv.imag >= 0
    e = np.exp(np.where(up, 2j * wv, -2j * wv))
    sin_r = np.where(up, 0.5j * (1 - e), -0.5j * (1 - e))
    cos_r = 0.5 * (1 + e)
    K = np.exp(logH + np.where(up, -1j * wv, 1j * wv))
    h1 = math.log(2 * math.pi / q) - digamma(1 - s)
    out = [K * sin_r]
    if max_deriv >= 1:
        out.append(K * (0.5 * math.pi * cos_r + sin_r * h1))
    if max_deriv >= 2:
        h2 = h1 * h1 + trigamma(1 - s)
        out.append(K * (-0.25 * math.pi**2 * sin_r + math.pi * cos_r * h1 + sin_r * h2))
    # relative rounding of F plus absolute rounding of the sine/cosine factors,
    # which dominates next to trivial zeros
    rel = 64 * EPS * (1 + np.abs(logH))
    base = 4 * EPS * (1 + np.abs(wv)) * np.abs(K)
    err = [rel * np.abs(f) + base * (3 + np.abs(h1)) ** j for j, f in enumerate(out)]
    return out, err


def _reflected_series(chi: DirichletCharacter, s: np.ndarray, max_deriv: int, cfg: EvalConfig):
    """L(s) = F(s) L(1 - s, conj chi) and its derivatives by the Leibniz rule."""
    u = 1 - s
    lv, le = l_series(chi.conjugate(), u, max_deriv, cfg)
    sign = np.array([(-1) ** j for j in range(max_deriv + 1)])[:, None]
    lv = lv * sign  # d/ds = -d/du
    F, Ferr = _f_series(chi, s, max_deriv)
    vals = np.zeros((max_deriv + 1, s.size), dtype=complex)
    errs = np.zeros((max_deriv + 1, s.size))
    for d in range(max_deriv + 1):
        for j in range(d + 1):
            c = math.comb(d, j)
            vals[d] += c * F[j] * lv[d - j]
            errs[d] += c * (np.abs(F[j]) * le[d - j] + Ferr[j] * np.abs(lv[d - j]))
    return vals, errs


def l_values(chi: DirichletCharacter, s, deriv: int = 0, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    vals, _ = l_series(chi, s, deriv, cfg)
    return vals[deriv]


def l_value(chi: DirichletCharacter, s: complex, deriv: int = 0, cfg: EvalConfig = DEFAULT_CONFIG) -> ComplexValue:
    """L(s, chi), L'(s, chi) or L''(s, chi) for a nonprincipal character."""
    if deriv not in (0, 1, 2):
        raise DomainError("deriv must be 0, 1 or 2")
    vals, errs = l_series(chi, [s], deriv, cfg)
    v, e = vals[deriv, 0], errs[deriv, 0]
    _check_accuracy(v, e, cfg, "l_value")
    return _cv(v, e)


# ---------------------------------------------------------------------------
# functional-equation factor F(s, chi)
# ---------------------------------------------------------------------------

def log_f_factor(chi: DirichletCharacter, s) -> np.ndarray:
    """A logarithm of F(s, chi); only exp() of it is branch independent."""
    if not chi.primitive:
        raise DomainError(f"{chi!r} is not primitive")
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    bad = (s.imag == 0) & (s.real >= 1) & (s.real == np.round(s.real))
    if bad.any():
        raise DomainError("F(s, chi) is evaluated only off the positive integers")
    eps = root_number(chi)
    q = chi.q
    return (
        np.log(eps)
        + s * math.log(2.0)
        + (s - 1) * math.log(math.pi)
        + (0.5 - s) * math.log(q)
        + log_sin_pi((s + chi.parity) / 2)
        + loggamma(1 - s)
    )


def f_factor_array(chi: DirichletCharacter, s) -> np.ndarray:
    return np.exp(log_f_factor(chi, s))


def f_factor(chi: DirichletCharacter, s: complex) -> ComplexValue:
    """F(s, chi) with L(s, chi) = F(s, chi) L(1 - s, conj chi)."""
    logf = log_f_factor(chi, [s])[0]
    val = np.exp(logf)
    err = 64 * EPS * abs(val) * (1 + abs(logf))
    return _cv(val, err)


def _logderiv_precondition(s: np.ndarray) -> None:
    if np.any(s.real >= 1) or np.any(np.abs(s.imag) <= 1):
        raise DomainError("F'/F is supported on Re(s) < 1, |Im(s)| > 1")


def f_logderiv_array(chi: DirichletCharacter, s, mode: str = "direct") -> np.ndarray:
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    _logderiv_precondition(s)
    q = chi.q
    if mode == "direct":
        return (math.log(2 * math.pi / q)
                + 0.5 * math.pi * cot(0.5 * math.pi * (s + chi.parity))
                - digamma(1 - s))
    if mode == "asymptotic":
        sign = np.where(s.imag > 0, 1.0, -1.0)
        return (-np.log(q * (1 - s)) + math.log(2 * math.pi)
                - sign * 0.5j * math.pi + 0.5 / (1 - s))
    raise DomainError(f"unknown mode {mode!r}")


def f_logderiv(chi: DirichletCharacter, s: complex, mode: str = "direct") -> ComplexValue:
    """(F'/F)(s, chi), either exactly (digamma and cotangent) or by its
    large-|t| expansion -log(q(1-s)) + log 2pi -+ i pi/2 + 1/(2(1-s))."""
    val = f_logderiv_array(chi, [s], mode)[0]
    return _cv(val, 32 * EPS * (1 + abs(val)))


# ---------------------------------------------------------------------------
# G_1(s, chi) = -m^s / (chi(m) log m) * L'(s, chi)
# ---------------------------------------------------------------------------

def _g1_scale(chi: DirichletCharacter) -> tuple[int, complex]:
    m = smallest_nondividing_prime(chi.q)
    return m, -1.0 / (chi_eval(chi, m) * math.log(m))


def g1_series(chi: DirichletCharacter, s, max_deriv: int = 0, cfg: EvalConfig = DEFAULT_CONFIG):
    """G_1 and (optionally) its s-derivative at an array of points."""
    if max_deriv not in (0, 1):
        raise DomainError("max_deriv must be 0 or 1")
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    m, scale = _g1_scale(chi)
    vals, errs = l_series(chi, s, max_deriv + 1, cfg)
    pre = scale * np.exp(s * math.log(m))
    out = [pre * vals[1]]
    err = [np.abs(pre) * errs[1]]
    if max_deriv == 1:
        out.append(pre * (math.log(m) * vals[1] + vals[2]))
        err.append(np.abs(pre) * (math.log(m) * errs[1] + errs[2]))
    return np.array(out), np.array(err)


def g1_values(chi: DirichletCharacter, s, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    return g1_series(chi, s, 0, cfg)[0][0]


def g1_value(chi: DirichletCharacter, s: complex, cfg: EvalConfig = DEFAULT_CONFIG) -> ComplexValue:
    vals, errs = g1_series(chi, [s], 0, cfg)
    v, e = vals[0, 0], errs[0, 0]
    _check_accuracy(v, e, cfg, "g1_value")
    return _cv(v, e)


# ---------------------------------------------------------------------------
# targets and continuous argument tracking
# ---------------------------------------------------------------------------

TARGETS = ("L", "Lprime", "G1", "FlogDeriv")
_TARGET_ALIASES = {"L": "L", "Lprime": "Lprime", "L'": "Lprime", "G1": "G1",
                   "F'/F": "FlogDeriv", "FlogDeriv": "FlogDeriv"}


def target_function(target: str, chi: DirichletCharacter, cfg: EvalConfig = DEFAULT_CONFIG,
                    with_derivative: bool = False) -> Callable:
    """Vectorized callable for a tracked function.

    With ``with_derivative`` the callable returns ``(f(s), f'(s))``.
    """
    name = _TARGET_ALIASES.get(target)
    if name is None:
        raise DomainError(f"unknown target {target!r}")
    if name == "L":
        def f(s):
            v, _ = l_series(chi, s, 1 if with_derivative else 0, cfg)
            return (v[0], v[1]) if with_derivative else v[0]
    elif name == "Lprime":
        def f(s):
            v, _ = l_series(chi, s, 2 if with_derivative else 1, cfg)
            return (v[1], v[2]) if with_derivative else v[1]
    elif name == "G1":
        def f(s):
            v, _ = g1_series(chi, s, 1 if with_derivative else 0, cfg)
            return (v[0], v[1]) if with_derivative else v[0]
    else:
        if with_derivative:
            raise DomainError("no derivative available for F'/F")

        def f(s):
            return f_logderiv_array(chi, s, "direct")
    return f


def default_step(q: int, t_abs: float) -> float:
    """Initial sample spacing along a path: a fraction of the local zero gap."""
    return min(0.25, 0.5 / math.log(q * (t_abs + 4)))


@dataclass
class PhaseTrack:
    """Samples of a function along a path with continuous phase."""

    points: np.ndarray
    values: np.ndarray
    phase: np.ndarray  # unwrapped argument, phase[0] = principal arg of values[0]
    param: np.ndarray  # arc-length parameter of each sample

    @property
    def increment(self) -> float:
        return float(self.phase[-1] - self.phase[0])

    def phase_at(self, z: np.ndarray, fz: np.ndarray, param: np.ndarray) -> np.ndarray:
        """Unwrapped phase of new values ``fz`` at path parameters ``param``
        (same parametrisation as :attr:`param`)."""
        guess = np.interp(param, self.param, self.phase)
        principal = np.angle(fz)
        k = np.round((guess - principal) / (2 * math.pi))
        return principal + 2 * math.pi * k


def track_phase(
    f: Callable,
    vertices: Sequence[complex],
    h0: float,
    rel_chord: float = 0.5,
    zero_tol: float = 1e-13,
    min_step_rel: float = 1e-10,
    max_rounds: int = 80,
) -> PhaseTrack:
    """Follow arg f continuously along a polyline.

    Adjacent samples are bisected until the chord between consecutive values
    is at most ``rel_chord`` times the smaller modulus, which bounds every
    phase jump by asin(rel_chord) < pi/2. A value below ``zero_tol`` or a
    bisection below ``min_step_rel * (1 + |s|)`` raises PathThroughZero.
    """
    verts = np.asarray(vertices, dtype=complex)
    seglen = np.abs(np.diff(verts))
    cum = np.concatenate([[0.0], np.cumsum(seglen)])
    total = cum[-1]
    if total == 0:
        v = np.atleast_1d(f(verts[:1]))
        if np.abs(v[0]) < zero_tol:
            raise PathThroughZero("function vanishes at the path point", complex(verts[0]))
        ph = np.angle(v)
        return PhaseTrack(verts[:1], v, ph, np.zeros(1))

    def at(u):
        idx = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, len(seglen) - 1)
        frac = np.where(seglen[idx] > 0, (u - cum[idx]) / np.where(seglen[idx] > 0, seglen[idx], 1), 0)
        return verts[idx] + frac * (verts[idx + 1] - verts[idx])

    grids = []
    for i, L in enumerate(seglen):
        n = max(1, math.ceil(L / h0))
        grids.append(cum[i] + np.linspace(0.0, L, n + 1)[:-1])
    u = np.concatenate(grids + [[total]])
    pts = at(u)
    vals = np.asarray(f(pts), dtype=complex)
    for _ in range(max_rounds):
        mod = np.abs(vals)
        tiny = mod < zero_tol
        if tiny.any():
            z = complex(pts[np.argmax(tiny)])
            raise PathThroughZero(f"|f| < {zero_tol:g} at {z}", z)
        chord = np.abs(np.diff(vals))
        bad = chord > rel_chord * np.minimum(mod[:-1], mod[1:])
        if not bad.any():
            break
        du = np.diff(u)
        floor = min_step_rel * (1 + np.abs(pts[:-1]))
        stuck = bad & (du < floor)
        if stuck.any():
            z = complex(pts[np.argmax(stuck)])
            raise PathThroughZero(f"function (nearly) vanishes on the path near {z}", z)
        newu = 0.5 * (u[:-1] + u[1:])[bad]
        newp = at(newu)
        newv = np.asarray(f(newp), dtype=complex)
        u = np.concatenate([u, newu])
        order = np.argsort(u, kind="stable")
        u = u[order]
        pts = np.concatenate([pts, newp])[order]
        vals = np.concatenate([vals, newv])[order]
    else:
        raise AccuracyError("phase tracking did not settle", achieved=float("inf"))
    jumps = np.angle(vals[1:] / vals[:-1])
    phase = np.angle(vals[0]) + np.concatenate([[0.0], np.cumsum(jumps)])
    return PhaseTrack(pts, vals, phase, u)


def arg_along_path(target: str, chi: DirichletCharacter, path: Iterable[complex],
                   cfg: EvalConfig = DEFAULT_CONFIG, h0: float | None = None) -> float:
    """Continuous increment of arg f along the polyline ``path``."""
    path = np.asarray(list(path), dtype=complex)
    if h0 is None:
        h0 = default_step(chi.q, float(np.max(np.abs(path.imag))))
    return track_phase(target_function(target, chi, cfg), path, h0).increment


RIGHT_ANCHOR = 30.0


def g1_branch_track(chi: DirichletCharacter, t: float, sigma_lo: float,
                    cfg: EvalConfig = DEFAULT_CONFIG, h0: float | None = None) -> PhaseTrack:
    """arg G_1 along the horizontal ray from 30 + it leftward to sigma_lo + it.

    The branch tends to 0 as sigma grows (|G_1 - 1| is tiny at sigma = 30).
    """
    if h0 is None:
        h0 = default_step(chi.q, abs(t))
    start = complex(RIGHT_ANCHOR, t)
    return track_phase(target_function("G1", chi, cfg), [start, complex(sigma_lo, t)], h0)


# ---------------------------------------------------------------------------
# L'/L minus the nearby-zero sum
# ---------------------------------------------------------------------------

def logderiv_zero_sum_residual(chi: DirichletCharacter, s: complex, zeros,
                               cfg: EvalConfig = DEFAULT_CONFIG) -> ComplexValue:
    """(L'/L)(s, chi) - sum over zeros rho with |gamma - t| <= 1 of 1/(s - rho).

    ``zeros`` are records with ``beta``/``gamma`` attributes (zeros of L).
    """
    s = complex(s)
    if not -1 <= s.real <= 2:
        raise DomainError("s must satisfy -1 <= Re(s) <= 2")
    vals, errs = l_series(chi, [s], 1, cfg)
    L0, L1 = vals[0, 0], vals[1, 0]
    ld = L1 / L0
    err = (errs[1, 0] + abs(ld) * errs[0, 0]) / abs(L0)
    acc = 0j
    for z in zeros:
        if abs(z.gamma - s.imag) <= 1:
            rho = complex(z.beta, z.gamma)
            if rho == s:
                raise DomainError("s coincides with a supplied zero")
            acc += getattr(z, "multiplicity", 1) / (s - rho)
    return _cv(ld - acc, err)
