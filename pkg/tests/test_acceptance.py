"""Acceptance criteria, one test per criterion.

Each test prints a single "[k] PASS|FAIL ..." line; the lines are also
collected into the terminal summary by conftest.
"""

import math
import os
import subprocess
import sys
import time

import mpmath as mp
import numpy as np
import pytest

import conftest
from conftest import l_scan, lprime_scan
from lprime.characters import get_character, primitive_characters, smallest_nondividing_prime
from lprime.evaluator import f_factor_array, f_logderiv_array, g1_values, l_value, l_values
from lprime.store import load_scan, resume_scan
from lprime.theorems import (
    check_left_halfplane,
    check_zero_free_right,
    kendall_trend,
    left_box_count,
    verify_counting,
    verify_n,
    verify_offset_sum,
)
from lprime.zerofinder import (
    ContourEngine,
    Rectangle,
    clear_level,
    littlewood_boundary_sum,
    zero_offset_sum,
    zeros_in,
)

TREND_GRID = (20, 40, 60, 80, 100)


def record(k: int, ok: bool, detail: str, t0: float) -> None:
    line = f"[{k}] {'PASS' if ok else 'FAIL'} {detail} ({time.perf_counter() - t0:.1f}s)"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def chars(qs):
    return [c for q in qs for c in primitive_characters(q)]


def test_criterion_01_functional_equation():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for chi in chars((3, 4, 5, 7, 8, 11)):
        sig = rng.uniform(-2, 3, 100)
        t = rng.uniform(2, 50, 100) * rng.choice([-1, 1], 100)
        s = sig + 1j * t
        lhs = l_values(chi, s)
        rhs = f_factor_array(chi, s) * l_values(chi.conjugate(), 1 - s)
        rel = np.abs(lhs - rhs) / np.maximum(np.abs(lhs), np.abs(rhs))
        worst = max(worst, float(rel.max()))
    record(1, worst < 1e-8, f"functional equation, worst relative residual {worst:.2e} (< 1e-8)", t0)


def test_criterion_02_special_values():
    t0 = time.perf_counter()
    mp.mp.dps = 30
    # independent series oracles
    catalan = mp.nsum(lambda n: (-1) ** n / (2 * n + 1) ** 2, [0, mp.inf])
    l1_chi3 = mp.pi / (3 * mp.sqrt(3))
    l1_direct = mp.nsum(lambda n: 1 / (3 * n + 1) - 1 / (3 * n + 2), [0, mp.inf])
    assert abs(float(catalan) - 0.915965594177219) < 1e-14
    assert abs(float(l1_chi3) - 0.604599788078073) < 1e-14
    assert abs(l1_direct - l1_chi3) < 1e-20
    chi4 = primitive_characters(4)[0]
    chi3 = get_character(3, 1)
    e1 = abs(l_value(chi4, 2).value - 0.915965594177219)
    e2 = abs(l_value(chi3, 1).value - 0.604599788078073)
    record(2, e1 < 1e-10 and e2 < 1e-10, f"L(2,chi4) err {e1:.1e}, L(1,chi3) err {e2:.1e}", t0)


def test_criterion_03_g1_inequalities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    violations = 0
    n = 0
    for q in (3, 4, 5, 7):
        m = smallest_nondividing_prime(q)
        qchars = primitive_characters(q)
        per = math.ceil(1000 / len(qchars))
        for chi in qchars:
            sig = 2 + rng.exponential(6, per)
            s = sig + 1j * rng.uniform(-100, 100, per)
            bound = 2 * (1 + 8 * m / sig) * (1 + 1 / m) ** (-sig)
            g = g1_values(chi, s)
            violations += int(np.sum(np.abs(g - 1) > bound))
            violations += int(np.sum(np.abs(g / l_values(chi, s) - 1) > bound))
            n += per
    record(3, violations == 0, f"G1 bounds at {n} points, {violations} violations", t0)


def test_criterion_04_logderiv_asymptotic():
    t0 = time.perf_counter()
    violations = 0
    npts = 0
    sig = np.linspace(-10, 0, 21)
    tt = np.concatenate([np.linspace(2, 50, 49), -np.linspace(2, 50, 49)])
    S = (sig[:, None] + 1j * tt[None, :]).ravel()
    for chi in chars((3, 5, 7)):
        d = f_logderiv_array(chi, S, "direct")
        a = f_logderiv_array(chi, S, "asymptotic")
        allowed = 5 / np.abs(1 - S) ** 2 + 5 * np.exp(-np.pi * np.abs(S.imag))
        violations += int(np.sum(np.abs(d - a) > allowed))
        npts += S.size
    record(4, violations == 0, f"F'/F asymptotic at {npts} points, {violations} violations", t0)


def test_criterion_05_argument_principle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = 0.0
    bad_add = 0
    total = 0
    for q in (3, 4, 5):
        for i in range(500):
            chi = primitive_characters(q)[i % len(primitive_characters(q))]
            target = "Lprime" if i % 2 else "L"
            engine = ContourEngine(target, chi)
            s0 = rng.uniform(-1, 3)
            t_lo = rng.uniform(-40, 40)
            rect = Rectangle(s0, s0 + rng.uniform(0.05, 2), t_lo, t_lo + rng.uniform(0.05, 6))
            w = engine.winding(rect)
            worst = max(worst, abs(w - round(w)))
            kids = rect.split()
            kw = [engine.winding(k) for k in kids]
            worst = max(worst, max(abs(x - round(x)) for x in kw))
            bad_add += int(sum(round(x) for x in kw) != round(w))
            total += 1
    ok = worst < 1e-3 and bad_add == 0
    record(5, ok, f"{total} rectangles, worst integrality gap {worst:.1e}, additivity failures {bad_add}", t0)


def test_criterion_06_littlewood():
    t0 = time.perf_counter()
    worst = 0.0
    cases = 0
    for q in (3, 4, 5):
        chi = primitive_characters(q)[0]
        scan = lprime_scan(q, chi.index, 30.0)
        engine = ContourEngine("Lprime", chi)
        for T in (10, 20, 30):
            s0, s1 = scan.sigma_min, scan.sigma_max
            rect = Rectangle(s0, s1, clear_level(engine, -T, s0, s1), clear_level(engine, T, s0, s1))
            inside = zeros_in(scan.zeros, rect)
            assert len(inside) == engine.count(rect)
            diff = abs(zero_offset_sum(inside, s0) - littlewood_boundary_sum(chi, rect))
            worst = max(worst, diff)
            cases += 1
    record(6, worst < 1e-5, f"Littlewood identity over {cases} (q,T) cases, worst gap {worst:.1e}", t0)


def test_criterion_07_and_11_n_band_and_grh():
    t0 = time.perf_counter()
    fails = []
    worst_grh = 0.0
    nzeros = 0
    for chi in chars((3, 4, 5, 7, 11)):
        scan = l_scan(chi.q, chi.index, 100.0)
        for T in (50, 100):
            r = verify_n(chi, T, scan)
            if not r.passed:
                fails.append(r.summary())
        worst_grh = max([worst_grh] + [abs(z.beta - 0.5) for z in scan.zeros])
        nzeros += len(scan.zeros)
    record(7, not fails, f"N(T,chi) band for {len(chars((3, 4, 5, 7, 11)))} characters x T in (50,100); "
           f"failures {fails}", t0)
    record(11, worst_grh < 1e-8, f"GRH spot-check over {nzeros} L-zeros, max |beta-1/2| {worst_grh:.1e}", t0)


def test_criterion_08_counting_band_and_trend():
    t0 = time.perf_counter()
    fails, taus = [], []
    for chi in chars((3, 4, 5)):
        scan = lprime_scan(chi.q, chi.index, 100.0)
        reps = [verify_counting(chi, T, scan, 5.0) for T in TREND_GRID]
        fails += [r.summary() for r in reps if not r.passed]
        taus.append((chi.q, chi.index, kendall_trend(reps)))
    ok = not fails and all(t < 0 for *_, t in taus)
    record(8, ok, "N1 band C=5 and Kendall trend: " + ", ".join(f"q{q}#{i} tau={t:+.2f}" for q, i, t in taus)
           + (f"; failures {fails}" if fails else ""), t0)


def test_criterion_09_offset_sum_band():
    t0 = time.perf_counter()
    fails, margins = [], []
    for chi in chars((3, 4, 5)):
        scan = lprime_scan(chi.q, chi.index, 100.0)
        for T in (20, 40, 60):
            r = verify_offset_sum(chi, T, scan, 5.0)
            margins.append(abs(r.residual) / r.band)
            if not r.passed:
                fails.append(r.summary())
    record(9, not fails, f"offset-sum band C=5, max |residual|/band {max(margins):.2f}"
           + (f"; failures {fails}" if fails else ""), t0)


def test_criterion_10_zero_free_regions():
    t0 = time.perf_counter()
    right = all(check_zero_free_right(c, lprime_scan(c.q, c.index, 100.0).zeros) for c in chars((3, 4, 5)))
    right = right and all(check_zero_free_right(c, lprime_scan(c.q, c.index, 30.0).zeros) for c in chars((3, 4, 5)))
    chi23 = next(c for c in primitive_characters(23) if c.kappa == 1)
    rep = check_left_halfplane(chi23, 30)
    boxes = {q: left_box_count(primitive_characters(q)[0], 6, 30) for q in (3, 4, 5, 23)}
    ok = right and rep.strip_count == 0 and rep.passed and all(v == 0 for v in boxes.values())
    record(10, ok, f"right region {'ok' if right else 'violated'}; q=23 kappa=1 strip count "
           f"{rep.strip_count}; left boxes {boxes}", t0)


def test_criterion_12_crash_resume(tmp_path):
    t0 = time.perf_counter()
    chi = get_character(3, 1)
    cold = lprime_scan(3, 1, 30.0).zeros

    class Crash(Exception):
        pass

    def hook_at(stage, t_lo):
        def hook(s, band):
            if s == stage and band.t_lo == t_lo:
                raise Crash
        return hook

    results = []
    for stage, t_lo in (("data_written", 0), ("committed", 14)):
        path = str(tmp_path / f"{stage}.jsonl")
        with pytest.raises(Crash):
            resume_scan(path, chi, "Lprime", 30, hook=hook_at(stage, t_lo))
        resume_scan(path, chi, "Lprime", 30)
        results.append(load_scan(path).zeros)
    # a real process kill between the data write and the manifest commit
    path = str(tmp_path / "killed.jsonl")
    cmd = [sys.executable, "-m", "lprime", "zeros", "scan", "--q", "3", "--chi", "1", "--T", "30", "--out", path]
    env = dict(os.environ, LPRIME_CRASH_AT="data_written:22")
    assert subprocess.run(cmd, env=env, capture_output=True).returncode == 137
    env.pop("LPRIME_CRASH_AT")
    assert subprocess.run(cmd, env=env, capture_output=True).returncode == 0
    results.append(load_scan(path).zeros)

    def key(zs):
        return sorted((z.gamma, z.beta, z.multiplicity) for z in zs)

    ref = key(cold)
    worst = 0.0
    same = True
    for zs in results:
        k = key(zs)
        if len(k) != len(ref) or any(a[2] != b[2] for a, b in zip(k, ref)):
            same = False
            continue
        worst = max([worst] + [max(abs(a[0] - b[0]), abs(a[1] - b[1])) for a, b in zip(k, ref)])
    ok = same and worst <= 1e-9
    record(12, ok, f"3 kill points, {len(ref)} zeros each, max coordinate gap {worst:.1e}", t0)
