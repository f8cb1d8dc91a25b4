import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lprime.characters import get_character, primitive_characters, smallest_nondividing_prime
from lprime.errors import DomainError, PathThroughZero, ScanIncomplete
from lprime.zerofinder import (
    SCAN_SIGMA_MIN,
    BandResult,
    ContourEngine,
    Rectangle,
    ScanResult,
    ZeroRecord,
    band_edges,
    clear_level,
    count_N,
    count_N1,
    count_zeros_rect,
    isolate_with_engine,
    isolate_zeros,
    littlewood_boundary_sum,
    lprime_sigma_max,
    scan_lprime_zeros,
    winding_number,
    zero_offset_sum,
    zeros_in,
)

from conftest import lprime_scan

CHI3 = get_character(3, 1)


def first_zeros_chi3():
    """Zeros of L(s, chi_3) on the critical line via mpmath: sign changes of the
    rotated real function Z(t) = exp(i theta) L(1/2 + it), then root polishing."""
    mp.mp.dps = 25
    f = lambda t: mp.dirichlet(mp.mpc(0.5, t), [0, 1, -1])
    roots = []
    for t0 in np.arange(0.5, 15, 0.05):
        a, b = f(t0), f(t0 + 0.05)
        # the rotation is locally constant: a sign change of Re(a * conj(phase)) <=> zero
        ph = mp.sqrt(a * mp.conj(b))
        if mp.re(a / ph) * mp.re(b / ph) < 0:
            g = float(mp.im(mp.findroot(lambda z: mp.dirichlet(z, [0, 1, -1]), mp.mpc(0.5, t0 + 0.025))))
            if not roots or abs(g - roots[-1]) > 1e-6:
                roots.append(g)
    return roots


def test_rectangle_validation_and_split():
    with pytest.raises(DomainError):
        Rectangle(1, 1, 0, 2)
    with pytest.raises(DomainError):
        Rectangle(0, 1, 3, 2)
    r = Rectangle(0, 1, 0, 2)
    kids = r.split()
    assert math.isclose(sum(k.width * k.height for k in kids), 2.0)
    assert all(r.contains(k.center) for k in kids)


def test_count_examples():
    chi5 = primitive_characters(5)[0]
    assert count_zeros_rect("L", chi5, Rectangle(2, 3, 1, 2)) == 0
    assert count_zeros_rect("L", CHI3, Rectangle(0, 1, 7, 9)) == 1
    m = smallest_nondividing_prime(3)
    assert count_zeros_rect("Lprime", CHI3, Rectangle(1 + 1.5 * m, 10, -60, 60)) == 0
    w = winding_number("L", CHI3, Rectangle(0, 1, 7, 9))
    assert abs(w - 1) < 1e-6


def test_boundary_zero_raises():
    gamma = 8.039737155681468
    with pytest.raises(PathThroughZero):
        count_zeros_rect("L", CHI3, Rectangle(0.5, 1, gamma - 1, gamma + 1))


def test_isolate_l_zeros_chi3_against_mpmath():
    zs = isolate_zeros("L", CHI3, Rectangle(0, 1, 0.5, 15))
    ref = first_zeros_chi3()
    assert len(zs) == 2 == len(ref)
    for z, g in zip(zs, ref):
        assert abs(z.beta - 0.5) < 1e-8
        assert abs(z.gamma - g) < 1e-10
        assert z.residual <= 1e-9 and z.function_tag == "L" and z.multiplicity == 1
    assert isolate_zeros("L", CHI3, Rectangle(2, 3, 0, 5)) == []


def test_partition_property():
    for T in (12.0, 25.0):
        r = Rectangle(SCAN_SIGMA_MIN, 1, 0.5, T)
        zs = isolate_zeros("L", CHI3, r)
        assert sum(z.multiplicity for z in zs) == count_zeros_rect("L", CHI3, r)


def test_g1_and_lprime_share_zeros():
    r = Rectangle(0.2, 3.0, 5, 25)
    a = isolate_zeros("Lprime", CHI3, r)
    e = ContourEngine("G1", CHI3)
    b = isolate_with_engine(e, r)
    assert len(a) == len(b) > 0
    for x, y in zip(a, b):
        assert abs(x.rho - y.rho) < 1e-9


def test_real_character_conjugate_symmetry():
    chi4 = primitive_characters(4)[0]
    zs = isolate_zeros("Lprime", chi4, Rectangle(SCAN_SIGMA_MIN, 4, -20.3, 20.3))
    ups = sorted((z.beta, z.gamma) for z in zs if z.gamma > 0)
    downs = sorted((z.beta, -z.gamma) for z in zs if z.gamma < 0)
    assert len(ups) == len(downs)
    for u, d in zip(ups, downs):
        assert abs(u[0] - d[0]) < 1e-10 and abs(u[1] - d[1]) < 1e-10


def test_multiplicity_recorded_for_double_zero():
    z0, z1 = 0.3 + 0.4j, 0.7 + 0.2j
    e = ContourEngine("L", CHI3)
    e.f = lambda s: (s - z0) ** 2 * (s - z1)
    e.fd = lambda s: ((s - z0) ** 2 * (s - z1), 2 * (s - z0) * (s - z1) + (s - z0) ** 2)
    recs = isolate_with_engine(e, Rectangle(0, 1, 0, 1))
    mults = sorted((r.multiplicity, round(r.beta, 6), round(r.gamma, 6)) for r in recs)
    assert [m for m, *_ in mults] == [1, 2]
    assert abs(complex(mults[1][1], mults[1][2]) - z0) < 1e-6
    assert abs(complex(mults[0][1], mults[0][2]) - z1) < 1e-6


def test_clear_level_moves_off_a_zero():
    gamma = isolate_zeros("L", CHI3, Rectangle(0, 1, 7, 9))[0].gamma
    e = ContourEngine("L", CHI3)
    lvl = clear_level(e, gamma, SCAN_SIGMA_MIN, 1.0)
    assert lvl != gamma and abs(lvl - gamma) <= 1e-4 * (1 + gamma)
    assert clear_level(e, 5.0, SCAN_SIGMA_MIN, 1.0) == 5.0


def test_band_edges():
    assert band_edges(0, 10) == [(0, 2), (2, 4), (4, 6), (6, 8), (8, 10)]
    assert band_edges(3, 7) == [(3, 4), (4, 6), (6, 7)]
    assert band_edges(5, 5) == []


def test_scan_small_T_matches_full_winding():
    res = scan_lprime_zeros(CHI3, 2.0)
    full = count_zeros_rect("Lprime", CHI3, res.rectangle())
    assert len(res.zeros) == full
    assert res.T_done == 2.0 and res.missing_bands(2.0) == []


def test_scan_30_postconditions(scan3_30):
    res = scan3_30
    rect = res.rectangle()
    assert sum(z.multiplicity for z in res.zeros) == count_zeros_rect("Lprime", CHI3, rect)
    for z in res.zeros:
        assert z.residual <= 1e-9
        assert rect.contains(z.rho)
        assert 0 < z.beta < lprime_sigma_max(3)
    assert res.sliver["ok"] and res.sliver["upper"] == 0 and res.sliver["lower"] == 0
    assert [z.gamma for z in res.zeros] == sorted(z.gamma for z in res.zeros)
    assert count_N1(CHI3, 30) == len(res.zeros)


def test_scan_rejects_bad_input():
    with pytest.raises(DomainError):
        scan_lprime_zeros(CHI3, 1.0)
    with pytest.raises(DomainError):
        scan_lprime_zeros(get_character(9, 0), 10)


def test_missing_bands_report():
    bands = [BandResult(0, 2, "done"), BandResult(2, 4, "failed", error="x"), BandResult(4, 6, "done")]
    res = ScanResult(3, 1, "Lprime", 6, SCAN_SIGMA_MIN, 4, [], bands)
    assert res.T_done == 2
    assert res.missing_bands(6) == [(2, 4)]
    with pytest.raises(ScanIncomplete) as exc:
        res.require(6)
    assert exc.value.missing == [(2, 4)]
    res.require(2)


def test_n_parity_for_real_characters():
    for chi in (CHI3, primitive_characters(4)[0], next(c for c in primitive_characters(5) if c.is_real)):
        assert count_N(chi, 37.3) % 2 == 0


def test_n1_monotone_on_grid():
    scan = lprime_scan(3, 1, 30.0)
    grid = np.linspace(2, 30, 50)
    counts = [sum(z.multiplicity for z in scan.zeros if abs(z.gamma) <= T) for T in grid]
    assert all(a <= b for a, b in zip(counts, counts[1:]))
    # spot check against independent winding counts
    for T in (7.7, 19.1, 30.0):
        i = int(np.argmin(np.abs(grid - T)))
        assert count_N1(CHI3, grid[i]) == counts[i]


def test_zero_offset_sum_basics():
    assert zero_offset_sum([]) == 0
    z = ZeroRecord(0.75, 3.0, 1, 0.0, "Lprime", 3, 1)
    assert zero_offset_sum([z]) == 0.25
    z2 = ZeroRecord(0.75, 3.0, 2, 0.0, "Lprime", 3, 1)
    assert zero_offset_sum([z2], 0.5) == 0.5


def test_zero_record_invariants():
    with pytest.raises(DomainError):
        ZeroRecord(0.5, 1.0, 1, 2e-9, "L", 3, 1)
    with pytest.raises(DomainError):
        ZeroRecord(0.5, 1.0, 0, 0.0, "L", 3, 1)
    with pytest.raises(DomainError):
        ZeroRecord(0.5, 1.0, 1, 0.0, "G1", 3, 1)
    with pytest.raises(DomainError):
        ZeroRecord.from_json({"q": 3, "chi_index": 1, "fn": "L", "beta": 0.5, "gamma": 1})
    z = ZeroRecord(0.5 + 2e-8, 1.0, 1, 0.0, "L", 3, 1)
    assert z.grh_violation
    assert not ZeroRecord(0.5, 1.0, 1, 0.0, "L", 3, 1).grh_violation


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(-1e3, 1e3), st.integers(1, 4), st.floats(0, 1e-9),
       st.sampled_from(["L", "Lprime"]))
def test_zero_record_json_roundtrip(beta, gamma, mult, res, fn):
    z = ZeroRecord(beta, gamma, mult, res, fn, 7, 3)
    assert ZeroRecord.from_json(z.to_json()) == z


def test_littlewood_empty_rectangle():
    assert abs(littlewood_boundary_sum(CHI3, Rectangle(4.5, 6, 10, 12))) < 1e-6


def test_littlewood_matches_zero_sum_and_is_linear_in_sigma_min(scan3_30):
    delta = 1e-4
    m = smallest_nondividing_prime(3)
    e = ContourEngine("Lprime", CHI3)
    lo = clear_level(e, 2.0, 0.5 - delta, 1 + 1.5 * m)
    hi = clear_level(e, 30.0, 0.5 - delta, 1 + 1.5 * m)
    rect = Rectangle(0.5 - delta, 1 + 1.5 * m, lo, hi)
    inside = zeros_in(scan3_30.zeros, rect)
    assert len(inside) == count_zeros_rect("Lprime", CHI3, rect) > 0
    lw = littlewood_boundary_sum(CHI3, rect)
    assert abs(lw - zero_offset_sum(inside, 0.5 - delta)) < 1e-5
    shift = 0.05
    rect2 = Rectangle(rect.sigma_min - shift, rect.sigma_max, lo, hi)
    assert len(zeros_in(scan3_30.zeros, rect2)) == len(inside)
    lw2 = littlewood_boundary_sum(CHI3, rect2)
    assert abs((lw2 - lw) - shift * len(inside)) < 1e-6
