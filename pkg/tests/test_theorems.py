import math

import mpmath as mp
import numpy as np
import pytest
from scipy.integrate import quad

from lprime.characters import get_character, primitive_characters, smallest_nondividing_prime
from lprime.errors import DomainError, ScanIncomplete
from lprime.theorems import (
    ResidualReport,
    check_left_halfplane,
    check_zero_free_right,
    counting_band,
    kendall_trend,
    left_box_count,
    li,
    n_band,
    offset_sum_band,
    prop_ntchi_main_term,
    thm1_main_term,
    thm2_main_term,
    verify_counting,
    verify_n,
    verify_offset_sum,
)
from lprime.zerofinder import BandResult, ScanResult, ZeroRecord, count_N1, zero_free_abscissa

from conftest import lprime_scan

CHI3 = get_character(3, 1)


def li_oracle(x):
    # offset logarithmic integral: li(x) - li(2) via mpmath's special function
    mp.mp.dps = 30
    return float(mp.li(x) - mp.li(2))


def test_li_examples():
    assert li(2) == 0.0
    assert abs(li(10) - 5.12043572466980) < 1e-10
    for x in (5, 10, 100, 1000):
        assert abs(li(x) - li_oracle(x)) < 1e-10
        val, err = quad(lambda t: 1 / math.log(t), 2, x, epsabs=1e-13, epsrel=1e-13, limit=200)
        assert abs(li(x) - val) < 1e-10
    with pytest.raises(DomainError):
        li(1.5)


def test_li_monotone_and_bounded():
    xs = np.linspace(20, 500, 40)
    vals = [li(x) for x in xs]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert all(v < x - 2 for v, x in zip(vals, xs))


def test_thm1_instance_by_hand():
    x = 300 / (2 * math.pi)
    hand = (100 / math.pi) * math.log(math.log(x)) \
        + (100 / math.pi) * (0.5 * math.log(2) - math.log(math.log(2))) \
        - (2 / 3) * li_oracle(x)
    assert math.isclose(thm1_main_term(3, 2, 100), hand, rel_tol=1e-6)


def test_thm1_domain():
    with pytest.raises(DomainError):
        thm1_main_term(3, 2, 2.0)  # 6/2pi < e
    with pytest.raises(DomainError):
        thm1_main_term(3, 2, 1.0)
    assert math.isfinite(thm1_main_term(11, 2, 2.0))


def test_thm1_piece_monotonicity():
    T = 50.0
    # loglog piece grows with q, Li coefficient 2/q shrinks
    ll = lambda q: (T / math.pi) * math.log(math.log(q * T / (2 * math.pi)))
    assert ll(6) > ll(3)
    assert 2 / 6 < 2 / 3
    coef = lambda m: 0.5 * math.log(m) - math.log(math.log(m))
    # d/dm = (log m - 2)/(2 m log m): falls until e^2, rises after
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    small, large = primes[:4], primes[3:]
    assert all(coef(a) > coef(b) for a, b in zip(small, small[1:]))
    assert all(coef(a) < coef(b) for a, b in zip(large, large[1:]))
    assert coef(3) < coef(2)
    # at fixed qT the main term moves only through the m coefficient
    assert thm1_main_term(5, 3, T) - thm1_main_term(5, 2, T) == pytest.approx((T / math.pi) * (coef(3) - coef(2)), abs=1e-9)


def test_thm2_arithmetic():
    a = (100 / math.pi) * math.log(300 / (4 * math.pi)) - 100 / math.pi
    b = float(mp.mpf(100) / mp.pi * (mp.log(mp.mpf(300) / (4 * mp.pi)) - 1))
    assert abs(a - b) < 1e-12
    assert abs(thm2_main_term(3, 2, 100) - b) < 1e-12
    assert abs(b - 69.16104) < 1e-4


def test_thm2_root_and_identity():
    for q, m in ((3, 2), (6, 5), (7, 2), (30, 7)):
        T = 2 * m * math.pi * math.e / q
        if T >= 2:
            assert abs(thm2_main_term(q, m, T)) < 1e-12
        for T in (2.0, 10.0, 57.3, 100.0):
            lhs = thm2_main_term(q, m, T)
            rhs = prop_ntchi_main_term(q, T) - (T / math.pi) * math.log(m)
            assert abs(lhs - rhs) < 1e-12


def test_prop_main_term():
    assert prop_ntchi_main_term(3, 100) == pytest.approx((100 / math.pi) * math.log(300 / (2 * math.pi)) - 100 / math.pi, rel=1e-15)
    grid = np.linspace(2 * math.pi * math.e / 3 + 0.01, 200, 60)
    vals = [prop_ntchi_main_term(3, T) for T in grid]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    with pytest.raises(DomainError):
        prop_ntchi_main_term(3, 1.0)


def test_band_monotonicity():
    for q in (3, 4, 5, 7, 11):
        Ts = np.linspace(10, 200, 20)
        for band in (counting_band, offset_sum_band, n_band):
            vals = [band(q, T) if band is n_band else band(q, T, 5.0) for T in Ts]
            assert all(a < b for a, b in zip(vals, vals[1:]))


def test_report_invariants():
    r = ResidualReport.build("N1", CHI3, 10.0, 7, 6.5, 0.5)
    assert r.residual == 7 - 6.5 and r.passed
    r0 = ResidualReport.build("N1", CHI3, 10.0, 7, 6.5, 0.0)
    assert not r0.passed
    assert r.as_row()["pass"] is True and "passed" not in r.as_row()
    assert r.summary().startswith("PASS")
    with pytest.raises(DomainError):
        ResidualReport.build("bogus", CHI3, 10.0, 1, 1, 1)


def test_verify_counting_and_offset_q3(scan3_30):
    rc = verify_counting(CHI3, 30, scan3_30)
    ro = verify_offset_sum(CHI3, 30, scan3_30)
    assert rc.passed and ro.passed
    assert rc.measured == count_N1(CHI3, 30)
    assert not verify_counting(CHI3, 30, scan3_30, C=0).passed or rc.residual == 0
    m = smallest_nondividing_prime(3)
    assert abs(ro.measured) <= rc.measured * (0.5 + 1.5 * m)
    # pure functions of the inputs
    assert verify_counting(CHI3, 30, scan3_30) == rc
    assert verify_offset_sum(CHI3, 30, scan3_30) == ro


def test_verify_offset_degenerate_T2():
    chi = primitive_characters(11)[0]
    scan = lprime_scan(11, chi.index, 2.0)
    r = verify_offset_sum(chi, 2.0, scan)
    assert all(math.isfinite(v) for v in (r.measured, r.main_term, r.residual, r.band))
    assert r.residual == r.measured - r.main_term


def test_counting_trend_q3():
    scan = lprime_scan(3, 1, 100.0)
    reports = [verify_counting(CHI3, T, scan) for T in (20, 40, 60, 80, 100)]
    assert all(r.passed for r in reports)
    assert kendall_trend(reports) < 0


def test_incomplete_scan_rejected():
    bands = [BandResult(0, 2, "done"), BandResult(2, 4, "failed", error="boom")]
    res = ScanResult(3, 1, "Lprime", 4, 1e-4, 4, [], bands)
    with pytest.raises(ScanIncomplete) as exc:
        verify_counting(CHI3, 4, res)
    assert (2, 4) in exc.value.missing
    with pytest.raises(DomainError):
        verify_n(CHI3, 2, res)  # wrong function


def test_verify_n_matches_scan_count():
    from conftest import l_scan

    scan = l_scan(3, 1, 50.0)
    a = verify_n(CHI3, 50, scan)
    b = verify_n(CHI3, 50)
    assert a.measured == b.measured and a.passed


def test_zero_free_right(scan3_30):
    assert abs(zero_free_abscissa(3) - (1 + 1 + math.sqrt(1 + 2 / math.log(2)))) < 1e-12
    assert zero_free_abscissa(3) < 1 + 1.5 * 2
    assert check_zero_free_right(CHI3, scan3_30.zeros)
    bad = list(scan3_30.zeros) + [ZeroRecord(5.0, 10.0, 1, 0.0, "Lprime", 3, 1)]
    assert not check_zero_free_right(CHI3, bad)


def test_left_boxes_empty():
    for chi in (CHI3, primitive_characters(5)[1]):
        assert left_box_count(chi, 6, 30) == 0
        assert left_box_count(chi, -30, -6) == 0


def test_left_halfplane_q23_odd():
    chi = next(c for c in primitive_characters(23) if c.kappa == 1)
    rep = check_left_halfplane(chi, 30)
    assert rep.upper_count == rep.lower_count == 0
    assert rep.strip_count == 0 and rep.passed


@pytest.mark.slow
def test_left_halfplane_q217_even():
    chi = next(c for c in primitive_characters(217) if c.kappa == 0)
    rep = check_left_halfplane(chi, 30)
    assert rep.strip_count == 1 and rep.passed, rep.summary()
