"""Main terms, acceptance bands and zero-free-region checks.

The asymptotic formulas carry unspecified O-constants, so every comparison
uses an explicit engineering band (constant ``C``, default 5) and the
reports keep the raw residuals so trends across T can be inspected.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Protocol, Sequence

import numpy as np
from scipy.stats import kendalltau

from .characters import DirichletCharacter, smallest_nondividing_prime
from .errors import DomainError
from .evaluator import DEFAULT_CONFIG, EvalConfig
from .special import adaptive_gauss_legendre
from .zerofinder import (
    ContourEngine,
    Rectangle,
    ZeroRecord,
    clear_level,
    count_detail,
    count_from_zeros,
    lprime_sigma_max,
    zero_free_abscissa,
    zero_offset_sum,
)

STATISTICS = ("N1", "offset_sum", "N")
DEFAULT_C = 5.0


class ZeroSource(Protocol):
    """What the verifiers need from a scan: its zeros and its coverage."""

    zeros: list[ZeroRecord]
    fn: str

    def missing_bands(self, T: float) -> list: ...

    def require(self, T: float) -> None: ...


def li(x: float) -> float:
    """Li(x) = integral from 2 to x of dt / log t."""
    if not x >= 2:
        raise DomainError(f"li requires x >= 2, got {x}")
    if x == 2:
        return 0.0
    # substitute t = e^u: integrand e^u / u is smooth on [log 2, log x]
    a, b = math.log(2.0), math.log(x)
    return adaptive_gauss_legendre(lambda u: np.exp(u) / u, a, b, tol=1e-12,
                                   initial_panels=max(1, math.ceil(b - a)))


def _loglog_arg(q: int, T: float) -> float:
    x = q * T / (2 * math.pi)
    if x <= math.e:
        raise DomainError(f"qT/2pi = {x:.6g} <= e; log log undefined")
    return x


def thm1_main_term(q: int, m: int, T: float) -> float:
    """(T/pi) loglog(qT/2pi) + (T/pi)((1/2)log m - loglog m) - (2/q) Li(qT/2pi)."""
    if T < 2:
        raise DomainError("T must be >= 2")
    x = _loglog_arg(q, T)
    return (T / math.pi) * math.log(math.log(x)) \
        + (T / math.pi) * (0.5 * math.log(m) - math.log(math.log(m))) \
        - (2.0 / q) * li(x)


def thm2_main_term(q: int, m: int, T: float) -> float:
    """(T/pi) log(qT/(2 m pi)) - T/pi."""
    if T < 2:
        raise DomainError("T must be >= 2")
    return (T / math.pi) * math.log(q * T / (2 * m * math.pi)) - T / math.pi


def prop_ntchi_main_term(q: int, T: float) -> float:
    """(T/pi) log(qT/2pi) - T/pi, the main term of N(T, chi)."""
    if T < 2:
        raise DomainError("T must be >= 2")
    return (T / math.pi) * math.log(q * T / (2 * math.pi)) - T / math.pi


# ---------------------------------------------------------------------------
# bands
# ---------------------------------------------------------------------------

def counting_band(q: int, T: float, C: float = DEFAULT_C) -> float:
    m = smallest_nondividing_prime(q)
    L = math.log(q * T)
    return C * (math.sqrt(m) * L / math.sqrt(math.log(L)) + math.sqrt(m) * math.log(q))


def offset_sum_band(q: int, T: float, C: float = DEFAULT_C) -> float:
    m = smallest_nondividing_prime(q)
    ll = math.log(math.log(q * T))
    return C * (math.sqrt(m) * ll**2 + m * ll + math.sqrt(m) * math.log(q))


def n_band(q: int, T: float) -> float:
    L = math.log(q * T)
    return 3.0 * L / math.log(L) + 2.0


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    """Measured statistic versus main term; ``passed`` is serialized as "pass"."""

    statistic: str
    q: int
    chi_index: int
    T: float
    measured: float
    main_term: float
    residual: float
    band: float
    passed: bool

    @classmethod
    def build(cls, statistic: str, chi: DirichletCharacter, T: float, measured: float,
              main_term: float, band: float) -> "ResidualReport":
        if statistic not in STATISTICS:
            raise DomainError(f"statistic must be one of {STATISTICS}")
        residual = measured - main_term
        return cls(statistic, chi.q, chi.index, float(T), float(measured), float(main_term),
                   residual, float(band), abs(residual) <= band)

    @property
    def relative_residual(self) -> float:
        return abs(self.residual) / abs(self.main_term) if self.main_term else math.inf

    def as_row(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} {self.statistic} q={self.q} chi={self.chi_index} T={self.T:g} "
                f"measured={self.measured:.10g} main={self.main_term:.10g} "
                f"residual={self.residual:.6g} band={self.band:.6g}")


def _check_source(zeros_db: ZeroSource, fn: str, T: float) -> None:
    if zeros_db.fn != fn:
        raise DomainError(f"expected a scan of {fn}, got {zeros_db.fn}")
    zeros_db.require(T)


def verify_counting(chi: DirichletCharacter, T: float, zeros_db: ZeroSource,
                    C: float = DEFAULT_C) -> ResidualReport:
    """N_1(T, chi) from a completed L' scan against its main term (T/pi) log(qT/(2 m pi)) - T/pi."""
    _check_source(zeros_db, "Lprime", T)
    m = smallest_nondividing_prime(chi.q)
    measured = count_from_zeros(zeros_db.zeros, T)
    return ResidualReport.build("N1", chi, T, measured, thm2_main_term(chi.q, m, T),
                                counting_band(chi.q, T, C))


def verify_offset_sum(chi: DirichletCharacter, T: float, zeros_db: ZeroSource,
                      C: float = DEFAULT_C) -> ResidualReport:
    """sum (beta' - 1/2) over L' zeros with |gamma'| <= T against its main term."""
    _check_source(zeros_db, "Lprime", T)
    m = smallest_nondividing_prime(chi.q)
    measured = zero_offset_sum([z for z in zeros_db.zeros if abs(z.gamma) <= T], 0.5)
    return ResidualReport.build("offset_sum", chi, T, measured, thm1_main_term(chi.q, m, T),
                                offset_sum_band(chi.q, T, C))


def verify_n(chi: DirichletCharacter, T: float, zeros_db: ZeroSource | None = None,
             cfg: EvalConfig = DEFAULT_CONFIG) -> ResidualReport:
    """N(T, chi) against its main term, band 3 log(qT)/loglog(qT) + 2.

    Uses the zeros of an L scan when given, otherwise a direct winding count.
    """
    if zeros_db is not None:
        _check_source(zeros_db, "L", T)
        measured = count_from_zeros(zeros_db.zeros, T)
    else:
        measured = count_detail(chi, T, "L", cfg).count
    return ResidualReport.build("N", chi, T, measured, prop_ntchi_main_term(chi.q, T),
                                n_band(chi.q, T))


def kendall_trend(reports: Sequence[ResidualReport]) -> float:
    """Kendall tau between T and |residual|/main; negative means decaying."""
    rs = sorted(reports, key=lambda r: r.T)
    if len(rs) < 2:
        raise DomainError("need at least two reports for a trend")
    tau = kendalltau([r.T for r in rs], [r.relative_residual for r in rs]).statistic
    return float(tau)


# ---------------------------------------------------------------------------
# zero-free regions
# ---------------------------------------------------------------------------

def check_zero_free_right(chi: DirichletCharacter, zeros: Iterable[ZeroRecord]) -> bool:
    """No L' zero right of 1 + (m/2)(1 + sqrt(1 + 4/(m log m))), nor at or beyond 1 + 3m/2."""
    bound = zero_free_abscissa(chi.q)
    cap = lprime_sigma_max(chi.q)
    if bound > cap:
        return False
    return all(z.beta <= bound and z.beta < cap for z in zeros if z.function_tag == "Lprime")


@dataclass(frozen=True)
class LeftRegionReport:
    q: int
    chi_index: int
    kappa: int
    window: float
    upper_count: int  # [-3, 0] x [6, W]
    lower_count: int  # [-3, 0] x [-W, -6]
    strip_count: int  # [1e-6, 1/2 - 1e-6] x [-W, W]
    expected_strip: int | None
    passed: bool
    note: str = ""

    def summary(self) -> str:
        exp = "-" if self.expected_strip is None else str(self.expected_strip)
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} regions q={self.q} chi={self.chi_index} kappa={self.kappa} "
                f"window={self.window:g} left_upper={self.upper_count} left_lower={self.lower_count} "
                f"strip={self.strip_count} expected_strip={exp}{(' ' + self.note) if self.note else ''}")


def expected_strip_count(chi: DirichletCharacter) -> int | None:
    if chi.kappa == 1 and chi.q >= 23:
        return 0
    if chi.kappa == 0 and chi.q >= 216:
        return 1
    return None


STRIP_EDGE = 1e-6
LEFT_SIGMA = -3.0
LEFT_T = 6.0
MAX_WIDENINGS = 2


def _left_counts(engine: ContourEngine, W: float) -> tuple[int, int, int]:
    s0, s1 = LEFT_SIGMA, 0.0
    six, top = clear_level(engine, LEFT_T, s0, s1), clear_level(engine, W, s0, s1)
    msix, bot = clear_level(engine, -LEFT_T, s0, s1), clear_level(engine, -W, s0, s1)
    up = engine.count(Rectangle(s0, s1, six, top))
    lo = engine.count(Rectangle(s0, s1, bot, msix))
    a, b = STRIP_EDGE, 0.5 - STRIP_EDGE
    stop, sbot = clear_level(engine, W, a, b), clear_level(engine, -W, a, b)
    strip = engine.count(Rectangle(a, b, sbot, stop))
    return up, lo, strip


def check_left_halfplane(chi: DirichletCharacter, window_T: float,
                         cfg: EvalConfig = DEFAULT_CONFIG) -> LeftRegionReport:
    """Winding checks of L' left of the critical line.

    The boxes [-3, 0] x {6 <= |t| <= W} must hold no zeros. The strip
    0 < sigma < 1/2 is compared with the parity case split; an even
    character that shows no strip zero gets the window doubled (twice)
    before the check fails.
    """
    if window_T < LEFT_T:
        raise DomainError("window_T must be >= 6")
    if not chi.primitive:
        raise DomainError(f"{chi!r} is not primitive")
    expected = expected_strip_count(chi)
    W = float(window_T)
    note = ""
    for attempt in range(MAX_WIDENINGS + 1):
        engine = ContourEngine("Lprime", chi, cfg)
        up, lo, strip = _left_counts(engine, W)
        if not (expected == 1 and strip == 0) or attempt == MAX_WIDENINGS:
            break
        W *= 2
        note = f"window widened to {W:g}"
    ok = up == 0 and lo == 0
    if expected is not None:
        ok = ok and strip == expected
    return LeftRegionReport(chi.q, chi.index, chi.kappa, W, up, lo, strip, expected, ok, note)


def left_box_count(chi: DirichletCharacter, t_lo: float, t_hi: float,
                   cfg: EvalConfig = DEFAULT_CONFIG) -> int:
    """L' zeros in [-3, 0] x [t_lo, t_hi]."""
    engine = ContourEngine("Lprime", chi, cfg)
    return engine.count(Rectangle(LEFT_SIGMA, 0.0, t_lo, t_hi))


__all__ = [
    "ResidualReport", "LeftRegionReport", "li",
    "thm1_main_term", "thm2_main_term", "prop_ntchi_main_term", "counting_band",
    "offset_sum_band", "n_band", "verify_counting", "verify_offset_sum", "verify_n",
    "kendall_trend", "check_zero_free_right", "check_left_halfplane", "left_box_count",
    "expected_strip_count",
]
