"""Counting, isolating and scanning zeros of L(s, chi) and L'(s, chi).

Counts come from the argument principle: arg f is tracked continuously
around the boundary of a rectangle (see :func:`lprime.evaluator.track_phase`)
and the total increment divided by 2 pi is the number of zeros inside.
Isolation quadrisects until each box winds once and then runs Newton's method
with the analytic derivative (L' for L, L'' for L').

Scans cover |t| <= T in bands of height 2. Band edges sit at t = +-2k,
nudged by a deterministic perturbation when a zero lies within about 1e-6 of
the line, so neighbouring bands (and resumed scans) always agree on shared
edges.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .characters import DirichletCharacter, get_character, smallest_nondividing_prime
from .errors import AccuracyError, DomainError, PathThroughZero, ScanIncomplete
from .evaluator import (
    DEFAULT_CONFIG,
    EvalConfig,
    default_step,
    target_function,
    track_phase,
)
from .special import adaptive_gauss_legendre

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
SPLIT_SIGMA = 0.5618  # off-centre so split lines avoid Re(s) = 1/2
SPLIT_T = 0.4721
INTEGRALITY_TOL = 0.05
MIN_BOX = 1e-6
RESIDUAL_MAX = 1e-9
NEWTON_MAX_ITER = 60
JITTER_RETRIES = 8
LEVEL_CLEARANCE = 1e-6
BAND_HEIGHT = 2.0
SCAN_SIGMA_MIN = 1e-4  # delta_0
GRH_TOL = 1e-8
MULTI_BOX = 1e-3  # try a multiple-zero fit below this box size
MULTI_CONFIRM = 1e-5

FN_TAGS = ("L", "Lprime")


def lprime_sigma_max(q: int) -> float:
    """Right edge 1 + 3m/2 of the L' scan; zero-free from there on."""
    return 1.0 + 1.5 * smallest_nondividing_prime(q)


def zero_free_abscissa(q: int) -> float:
    """1 + (m/2)(1 + sqrt(1 + 4/(m log m))): no zeros of L' to the right."""
    m = smallest_nondividing_prime(q)
    return 1.0 + 0.5 * m * (1.0 + math.sqrt(1.0 + 4.0 / (m * math.log(m))))


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rectangle:
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float

    def __post_init__(self):
        if not (self.sigma_min < self.sigma_max and self.t_min < self.t_max):
            raise DomainError(f"degenerate rectangle {self}")

    @property
    def width(self) -> float:
        return self.sigma_max - self.sigma_min

    @property
    def height(self) -> float:
        return self.t_max - self.t_min

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.sigma_min + self.sigma_max), 0.5 * (self.t_min + self.t_max))

    def corners(self) -> tuple[complex, complex, complex, complex]:
        """Counter-clockwise from the lower-left corner."""
        return (complex(self.sigma_min, self.t_min), complex(self.sigma_max, self.t_min),
                complex(self.sigma_max, self.t_max), complex(self.sigma_min, self.t_max))

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return (self.sigma_min - slack < z.real < self.sigma_max + slack
                and self.t_min - slack < z.imag < self.t_max + slack)

    def split(self, fs: float = SPLIT_SIGMA, ft: float = SPLIT_T) -> list["Rectangle"]:
        sm = self.sigma_min + fs * self.width
        tm = self.t_min + ft * self.height
        return [
            Rectangle(self.sigma_min, sm, self.t_min, tm),
            Rectangle(sm, self.sigma_max, self.t_min, tm),
            Rectangle(sm, self.sigma_max, tm, self.t_max),
            Rectangle(self.sigma_min, sm, tm, self.t_max),
        ]


@dataclass(frozen=True)
class ZeroRecord:
    """One located zero of L (tag "L") or L' (tag "Lprime")."""

    beta: float
    gamma: float
    multiplicity: int
    residual: float
    function_tag: str
    q: int
    chi_index: int

    def __post_init__(self):
        if self.function_tag not in FN_TAGS:
            raise DomainError(f"function_tag must be one of {FN_TAGS}")
        if self.multiplicity < 1:
            raise DomainError("multiplicity must be >= 1")
        if not (self.residual <= RESIDUAL_MAX):
            raise DomainError(f"residual {self.residual:g} exceeds {RESIDUAL_MAX:g}")
        if not (math.isfinite(self.beta) and math.isfinite(self.gamma)):
            raise DomainError("zero coordinates must be finite")

    @property
    def rho(self) -> complex:
        return complex(self.beta, self.gamma)

    @property
    def grh_violation(self) -> bool:
        """True for an L-zero off the critical line by more than 1e-8."""
        return self.function_tag == "L" and abs(self.beta - 0.5) > GRH_TOL

    def to_json(self) -> dict:
        return {"q": self.q, "chi_index": self.chi_index, "fn": self.function_tag,
                "beta": self.beta, "gamma": self.gamma,
                "multiplicity": self.multiplicity, "residual": self.residual}

    @classmethod
    def from_json(cls, obj: dict) -> "ZeroRecord":
        keys = {"q", "chi_index", "fn", "beta", "gamma", "multiplicity", "residual"}
        if set(obj) != keys:
            raise DomainError(f"zero record fields must be exactly {sorted(keys)}")
        return cls(beta=float(obj["beta"]), gamma=float(obj["gamma"]),
                   multiplicity=int(obj["multiplicity"]), residual=float(obj["residual"]),
                   function_tag=str(obj["fn"]), q=int(obj["q"]), chi_index=int(obj["chi_index"]))


def sort_zeros(zeros: Iterable[ZeroRecord]) -> list[ZeroRecord]:
    return sorted(zeros, key=lambda z: (z.gamma, z.beta))


# ---------------------------------------------------------------------------
# winding numbers
# ---------------------------------------------------------------------------

class ContourEngine:
    """Argument-principle machinery for one function, with an edge cache.

    Sibling boxes share their dividing lines, so caching oriented segments
    halves the work of quadrisection.
    """

    def __init__(self, target: str, chi: DirichletCharacter, cfg: EvalConfig = DEFAULT_CONFIG):
        self.target = target
        self.chi = chi
        self.cfg = cfg
        self.f = target_function(target, chi, cfg)
        self.fd = target_function(target, chi, cfg, with_derivative=True)
        self._edges: dict[tuple[complex, complex], float] = {}
        self._min_step: dict[tuple[complex, complex], float] = {}

    def _track(self, a: complex, b: complex):
        h0 = default_step(self.chi.q, max(abs(a.imag), abs(b.imag)))
        tr = track_phase(self.f, [a, b], h0)
        du = np.diff(tr.param)
        self._edges[(a, b)] = tr.increment
        self._min_step[(a, b)] = float(du.min()) if du.size else math.inf
        return tr

    def edge(self, a: complex, b: complex) -> float:
        if (a, b) in self._edges:
            return self._edges[(a, b)]
        if (b, a) in self._edges:
            return -self._edges[(b, a)]
        self._track(a, b)
        return self._edges[(a, b)]

    def line_clearance(self, a: complex, b: complex) -> float:
        """Smallest sample spacing needed along a segment (tracks it if new)."""
        if (a, b) not in self._min_step and (b, a) not in self._min_step:
            self._track(a, b)
        return self._min_step.get((a, b), self._min_step.get((b, a)))

    def winding(self, rect: Rectangle) -> float:
        c = rect.corners()
        total = sum(self.edge(c[i], c[(i + 1) % 4]) for i in range(4))
        return total / TWO_PI

    def count(self, rect: Rectangle) -> int:
        w = self.winding(rect)
        n = round(w)
        if abs(w - n) > INTEGRALITY_TOL:
            raise AccuracyError(f"non-integral winding {w:.4f} on {rect}", achieved=abs(w - n))
        return int(n)


def winding_number(target: str, chi: DirichletCharacter, rect: Rectangle,
                   cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """Pre-rounding winding of ``target`` around ``rect``."""
    return ContourEngine(target, chi, cfg).winding(rect)


def count_zeros_rect(target: str, chi: DirichletCharacter, rect: Rectangle,
                     cfg: EvalConfig = DEFAULT_CONFIG) -> int:
    """Number of zeros of L, L' or G_1 inside ``rect`` (with multiplicity).

    Raises PathThroughZero when the target vanishes on the boundary and
    AccuracyError when the winding is not within 0.05 of an integer.
    """
    return ContourEngine(target, chi, cfg).count(rect)


# ---------------------------------------------------------------------------
# isolation
# ---------------------------------------------------------------------------

def _tag(target: str) -> str:
    return "L" if target == "L" else "Lprime"


def _newton(engine: ContourEngine, rect: Rectangle, mult: int = 1):
    z = rect.center
    radius = 0.5 * math.hypot(rect.width, rect.height)
    for _ in range(NEWTON_MAX_ITER):
        v, dv = engine.fd(np.array([z]))
        v, dv = complex(v[0]), complex(dv[0])
        if v == 0:
            break
        if dv == 0:
            return None
        step = mult * v / dv
        if abs(step) > radius:
            step *= radius / abs(step)
        z -= step
        if abs(step) <= 4e-16 * (1 + abs(z)):
            break
    residual = float(abs(engine.f(np.array([z]))[0]))
    if residual > RESIDUAL_MAX or not rect.contains(z):
        return None
    return z, residual


def _multiple_zero(engine: ContourEngine, rect: Rectangle, n: int):
    """Modified Newton for an n-fold zero, confirmed by a small winding box."""
    got = _newton(engine, rect, n)
    if got is None:
        return None
    z, res = got
    h = MULTI_CONFIRM * (1 + abs(z))
    box = Rectangle(z.real - h, z.real + h, z.imag - h, z.imag + h)
    if not (rect.contains(complex(box.sigma_min, box.t_min)) and rect.contains(complex(box.sigma_max, box.t_max))):
        return None
    try:
        k = engine.count(box)
    except (PathThroughZero, AccuracyError):
        return None
    return (z, res) if k == n else None


def _split_counts(engine: ContourEngine, rect: Rectangle, n: int, rng: np.random.Generator):
    fs, ft = SPLIT_SIGMA, SPLIT_T
    last = None
    for _ in range(JITTER_RETRIES + 1):
        kids = rect.split(fs, ft)
        try:
            counts = [engine.count(k) for k in kids]
        except (PathThroughZero, AccuracyError) as exc:
            last = exc
        else:
            if sum(counts) == n:
                return kids, counts
            last = AccuracyError(f"children of {rect} count {sum(counts)} != {n}")
        # jitter the dividing lines by ~1e-7 (1 + |t|) in box-relative units
        scale = 1e-7 * (1 + abs(rect.center.imag))
        fs += rng.uniform(-1, 1) * max(scale / rect.width, 1e-3)
        ft += rng.uniform(-1, 1) * max(scale / rect.height, 1e-3)
    raise last


def isolate_with_engine(engine: ContourEngine, rect: Rectangle, count: int | None = None,
                        rng: np.random.Generator | None = None) -> list[ZeroRecord]:
    if rng is None:
        rng = np.random.default_rng(0)
    if count is None:
        count = engine.count(rect)
    chi = engine.chi
    tag = _tag(engine.target)
    out: list[ZeroRecord] = []
    stack = [(rect, count)]
    while stack:
        r, n = stack.pop()
        if n == 0:
            continue
        size = max(r.width, r.height)
        if n >= 2 and size < MULTI_BOX:
            got = _multiple_zero(engine, r, n)
            if got is not None:
                z, res = got
                out.append(ZeroRecord(z.real, z.imag, n, res, tag, chi.q, chi.index))
                continue
        if n == 1 or size < MIN_BOX:
            got = _newton(engine, r, n if size < MIN_BOX else 1)
            if got is not None:
                z, res = got
                out.append(ZeroRecord(z.real, z.imag, n, res, tag, chi.q, chi.index))
                continue
            if size < MIN_BOX:
                if n >= 2:
                    z = r.center
                    res = float(abs(engine.f(np.array([z]))[0]))
                    if res <= RESIDUAL_MAX:
                        out.append(ZeroRecord(z.real, z.imag, n, res, tag, chi.q, chi.index))
                        continue
                if size < 1e-8:
                    raise AccuracyError(f"could not refine zero in {r}", achieved=size)
        kids, counts = _split_counts(engine, r, n, rng)
        stack.extend((k, c) for k, c in zip(kids, counts) if c)
    return sort_zeros(out)


def isolate_zeros(target: str, chi: DirichletCharacter, rect: Rectangle, tol: float = 1e-10,
                  cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0) -> list[ZeroRecord]:
    """Locate every zero of ``target`` inside ``rect``.

    Newton iterates to machine precision, so coordinates are far more
    accurate than any ``tol`` >= 1e-12; ``tol`` is kept for the contract.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    engine = ContourEngine(target, chi, cfg)
    return isolate_with_engine(engine, rect, rng=np.random.default_rng(seed))


# ---------------------------------------------------------------------------
# edge levels
# ---------------------------------------------------------------------------

def clear_level(engine: ContourEngine, t: float, sigma_min: float, sigma_max: float) -> float:
    """A horizontal line near ``t`` with no zero within ~1e-6.

    Offsets tried: 0, then +-eps, +-eps/2, ... with eps = 1e-4 (1 + |t|).
    Deterministic, so independent bands agree on shared edges.
    """
    eps = 1e-4 * (1 + abs(t))
    offsets = [0.0]
    for k in range(JITTER_RETRIES // 2):
        offsets += [eps / 2**k, -eps / 2**k]
    last = None
    for off in offsets:
        lvl = t + off
        a, b = complex(sigma_min, lvl), complex(sigma_max, lvl)
        try:
            if engine.line_clearance(a, b) >= LEVEL_CLEARANCE:
                if off:
                    log.info("edge t=%g moved to %.10g", t, lvl)
                return lvl
        except PathThroughZero as exc:
            last = exc
    raise last or PathThroughZero(f"no clear level near t={t}", complex(sigma_min, t))


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

def scan_sigma_range(fn: str, q: int) -> tuple[float, float]:
    if fn == "L":
        return SCAN_SIGMA_MIN, 1.0
    if fn == "Lprime":
        return SCAN_SIGMA_MIN, lprime_sigma_max(q)
    raise DomainError(f"fn must be one of {FN_TAGS}")


def band_edges(t_from: float, t_to: float, height: float = BAND_HEIGHT) -> list[tuple[float, float]]:
    """Nominal bands covering (t_from, t_to] on the grid of multiples of ``height``."""
    out = []
    lo = t_from
    while lo < t_to - 1e-12:
        hi = min(t_to, (math.floor(lo / height + 1e-9) + 1) * height)
        out.append((lo, hi))
        lo = hi
    return out


@dataclass
class BandResult:
    t_lo: float
    t_hi: float
    status: str  # "done" | "failed"
    count: int = 0
    levels: tuple[float, ...] = ()
    error: str | None = None
    zeros: list[ZeroRecord] = field(default_factory=list, repr=False)


@dataclass
class ScanResult:
    q: int
    chi_index: int
    fn: str
    T: float
    sigma_min: float
    sigma_max: float
    zeros: list[ZeroRecord]
    bands: list[BandResult]
    sliver: dict = field(default_factory=dict)

    @property
    def T_done(self) -> float:
        done = 0.0
        for b in sorted(self.bands, key=lambda b: b.t_lo):
            if b.status != "done" or b.t_lo > done + 1e-12:
                break
            done = b.t_hi
        return done

    def missing_bands(self, T: float) -> list[tuple[float, float]]:
        covered = self.T_done
        if covered >= T - 1e-12:
            return []
        failed = [(b.t_lo, b.t_hi) for b in self.bands if b.status != "done" and b.t_lo < T]
        return failed or [(covered, T)]

    def require(self, T: float) -> None:
        missing = self.missing_bands(T)
        if missing:
            raise ScanIncomplete(f"scan incomplete below T={T}: missing {missing}", missing)

    def top_levels(self) -> tuple[float, float]:
        """Actual (lower, upper) t of the outermost scanned edges."""
        last = max(self.bands, key=lambda b: b.t_hi)
        return last.levels[0], last.levels[-1]

    def rectangle(self) -> Rectangle:
        lo, hi = self.top_levels()
        return Rectangle(self.sigma_min, self.sigma_max, lo, hi)


def scan_band(chi: DirichletCharacter, fn: str, t_lo: float, t_hi: float,
              cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0) -> BandResult:
    """Zeros of L or L' with t_lo < |gamma| <= t_hi (both signs)."""
    target = "L" if fn == "L" else "Lprime"
    s0, s1 = scan_sigma_range(fn, chi.q)
    engine = ContourEngine(target, chi, cfg)
    rng = np.random.default_rng(seed)
    try:
        up = clear_level(engine, t_hi, s0, s1)
        dn = clear_level(engine, -t_hi, s0, s1)
        if t_lo <= 0:
            rects = [Rectangle(s0, s1, dn, up)]
            levels = (dn, up)
        else:
            up_lo = clear_level(engine, t_lo, s0, s1)
            dn_lo = clear_level(engine, -t_lo, s0, s1)
            rects = [Rectangle(s0, s1, dn, dn_lo), Rectangle(s0, s1, up_lo, up)]
            levels = (dn, dn_lo, up_lo, up)
        zeros = []
        for r in rects:
            zeros.extend(isolate_with_engine(engine, r, rng=rng))
    except (PathThroughZero, AccuracyError) as exc:
        log.warning("band (%g, %g] failed: %s", t_lo, t_hi, exc)
        return BandResult(t_lo, t_hi, "failed", error=str(exc))
    zeros = sort_zeros(zeros)
    return BandResult(t_lo, t_hi, "done", sum(z.multiplicity for z in zeros), levels, None, zeros)


def _band_job(args):
    q, index, fn, lo, hi, cfg, seed = args
    return scan_band(get_character(q, index), fn, lo, hi, cfg, seed)


def run_bands(chi: DirichletCharacter, fn: str, bands: list[tuple[float, float]],
              cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0, workers: int = 1,
              on_band: Callable[[BandResult], None] | None = None) -> list[BandResult]:
    """Scan bands in order; ``on_band`` sees each finished band (in order)."""
    jobs = [(chi.q, chi.index, fn, lo, hi, cfg, seed) for lo, hi in bands]
    results = []
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_band_job, jobs):
                results.append(res)
                if on_band:
                    on_band(res)
    else:
        for job in jobs:
            res = _band_job(job)
            results.append(res)
            if on_band:
                on_band(res)
    return results


def lprime_left_sliver(chi: DirichletCharacter, T: float, cfg: EvalConfig = DEFAULT_CONFIG) -> dict:
    """Winding counts of L' on [-1, delta_0] x [.] left of the scan rectangle."""
    engine = ContourEngine("Lprime", chi, cfg)
    s0, s1 = -1.0, SCAN_SIGMA_MIN
    out = {}
    try:
        if T > 6:
            top = clear_level(engine, T, s0, s1)
            bot = clear_level(engine, -T, s0, s1)
            six = clear_level(engine, 6.0, s0, s1)
            msix = clear_level(engine, -6.0, s0, s1)
            out["upper"] = engine.count(Rectangle(s0, s1, six, top))
            out["lower"] = engine.count(Rectangle(s0, s1, bot, msix))
            out["low"] = engine.count(Rectangle(s0, s1, msix, six))
        else:
            top = clear_level(engine, T, s0, s1)
            bot = clear_level(engine, -T, s0, s1)
            out["low"] = engine.count(Rectangle(s0, s1, bot, top))
    except (PathThroughZero, AccuracyError) as exc:
        out["error"] = str(exc)
    out["ok"] = out.get("upper", 0) == 0 and out.get("lower", 0) == 0 and "error" not in out
    return out


def scan_zeros(chi: DirichletCharacter, T: float, fn: str = "Lprime",
               cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0, workers: int = 1) -> ScanResult:
    if T < 2:
        raise DomainError("T must be >= 2")
    if not chi.primitive:
        raise DomainError(f"{chi!r} is not primitive")
    s0, s1 = scan_sigma_range(fn, chi.q)
    bands = run_bands(chi, fn, band_edges(0.0, T), cfg, seed, workers)
    zeros = sort_zeros(z for b in bands if b.status == "done" for z in b.zeros)
    res = ScanResult(chi.q, chi.index, fn, T, s0, s1, zeros, bands)
    if fn == "Lprime":
        res.sliver = lprime_left_sliver(chi, T, cfg)
    return res


def scan_lprime_zeros(chi: DirichletCharacter, T: float, cfg: EvalConfig = DEFAULT_CONFIG,
                      seed: int = 0, workers: int = 1) -> ScanResult:
    """All zeros of L' with 0 < beta and |gamma| <= T.

    The scan rectangle is [1e-4, 1 + 3m/2] x [-T, T]; the sliver
    [-1, 1e-4] is winding-checked separately (``ScanResult.sliver``).
    """
    return scan_zeros(chi, T, "Lprime", cfg, seed, workers)


def scan_l_zeros(chi: DirichletCharacter, T: float, cfg: EvalConfig = DEFAULT_CONFIG,
                 seed: int = 0, workers: int = 1) -> ScanResult:
    return scan_zeros(chi, T, "L", cfg, seed, workers)


# ---------------------------------------------------------------------------
# counting functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CountResult:
    count: int
    t_lower: float  # actual edges used (after any perturbation)
    t_upper: float


def _count_fn(chi: DirichletCharacter, T: float, fn: str, cfg: EvalConfig) -> CountResult:
    if T < 2:
        raise DomainError("T must be >= 2")
    target = "L" if fn == "L" else "Lprime"
    s0, s1 = scan_sigma_range(fn, chi.q)
    engine = ContourEngine(target, chi, cfg)
    up = clear_level(engine, T, s0, s1)
    dn = clear_level(engine, -T, s0, s1)
    return CountResult(engine.count(Rectangle(s0, s1, dn, up)), dn, up)


def count_N(chi: DirichletCharacter, T: float, cfg: EvalConfig = DEFAULT_CONFIG) -> int:
    """Zeros of L(s, chi) with Re(s) > 0, |Im(s)| <= T."""
    return _count_fn(chi, T, "L", cfg).count


def count_N1(chi: DirichletCharacter, T: float, cfg: EvalConfig = DEFAULT_CONFIG) -> int:
    """Zeros of L'(s, chi) with Re(s) > 0, |Im(s)| <= T."""
    return _count_fn(chi, T, "Lprime", cfg).count


def count_detail(chi: DirichletCharacter, T: float, fn: str,
                 cfg: EvalConfig = DEFAULT_CONFIG) -> CountResult:
    """Like count_N / count_N1 but also reports the edges actually used."""
    return _count_fn(chi, T, fn, cfg)


def count_from_zeros(zeros: Iterable[ZeroRecord], T: float) -> int:
    return sum(z.multiplicity for z in zeros if abs(z.gamma) <= T)


# ---------------------------------------------------------------------------
# sums over zeros and the Littlewood boundary integral
# ---------------------------------------------------------------------------

def zero_offset_sum(zeros: Iterable[ZeroRecord], b: float = 0.5) -> float:
    """sum multiplicity * (beta - b)."""
    return math.fsum(z.multiplicity * (z.beta - b) for z in zeros)


def zeros_in(zeros: Iterable[ZeroRecord], rect: Rectangle) -> list[ZeroRecord]:
    return [z for z in zeros if rect.contains(z.rho)]


def _arg_integral(f: Callable, start_phase: float, t: float, s0: float, s1: float,
                  h0: float, tol: float) -> float:
    """Integral over [s0, s1] of arg f(sigma + it), arg continued leftward
    from s1 + it where it equals ``start_phase``."""
    tr = track_phase(f, [complex(s1, t), complex(s0, t)], h0)
    shift = start_phase - tr.phase[0]

    def integrand(sig):
        sig = np.asarray(sig, dtype=float)
        pts = sig + 1j * t
        return tr.phase_at(pts, f(pts), s1 - sig) + shift

    return adaptive_gauss_legendre(integrand, s0, s1, tol, initial_panels=max(1, math.ceil(s1 - s0)))


def littlewood_boundary_sum(chi: DirichletCharacter, rect: Rectangle,
                            cfg: EvalConfig = DEFAULT_CONFIG, tol: float = 1e-8) -> float:
    """sum over zeros of G_1 (equivalently L') in ``rect`` of (beta - sigma_min),
    computed from boundary data only:

        (1/2pi) [ int log|G1(s0+it)| dt - int log|G1(s1+it)| dt
                  - int arg G1(sigma+it0) dsigma + int arg G1(sigma+it1) dsigma ]

    with arg continued along the right edge and then leftward.
    """
    f = target_function("G1", chi, cfg)
    s0, s1, t0, t1 = rect.sigma_min, rect.sigma_max, rect.t_min, rect.t_max
    h0 = default_step(chi.q, max(abs(t0), abs(t1)))

    def logabs(sig):
        def g(t):
            t = np.asarray(t, dtype=float)
            return np.log(np.abs(f(sig + 1j * t)))
        return g

    panels = max(1, math.ceil(rect.height / 0.5))
    left = adaptive_gauss_legendre(logabs(s0), t0, t1, tol, initial_panels=panels)
    right = adaptive_gauss_legendre(logabs(s1), t0, t1, tol, initial_panels=panels)

    right_edge = track_phase(f, [complex(s1, t0), complex(s1, t1)], h0)
    ph_bottom = right_edge.phase[0]
    ph_top = right_edge.phase[-1]
    bottom = _arg_integral(f, ph_bottom, t0, s0, s1, h0, tol)
    top = _arg_integral(f, ph_top, t1, s0, s1, h0, tol)
    return (left - right - bottom + top) / TWO_PI
