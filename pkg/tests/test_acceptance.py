"""Acceptance criteria, one test per criterion.

Each test appends a ``CRITERION n: PASS|FAIL ...`` line that is echoed in a
dedicated section at the end of the pytest run, then asserts. Shared
Casimir-Polder interpolant construction is excluded from the per-criterion
runtimes (it is built once per session).
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from cntrap.core import CONSTANTS as C
from cntrap.green import (Shell, c1v_closed_form, green_scattering, green_vacuum,
                          solve_boundary_system)
from cntrap.material import NanotubeResponse
from cntrap.specfun import bessel_j, hankel1, modified_i_k
from cntrap.spinflip import spin_flip_rate
from cntrap.trap import AtomSpec
from cntrap.tunneling import build_profile, trap_for, tunneling_sweep, wkb_lifetime

from conftest import ACCEPTANCE_LINES

R = 3.52e-10
W0 = 2 * math.pi * 70e3
T_ENV = 380.0


def record(n, checks, t0, limit=None):
    """``checks`` is a list of (label, ok, detail)."""
    dt = time.perf_counter() - t0
    ok = all(c[1] for c in checks)
    if limit is not None and dt > limit:
        checks = list(checks) + [("runtime", False, f"{dt:.1f} s > {limit:g} s")]
        ok = False
    detail = "; ".join(f"{lab} {'ok' if good else 'MISS'} ({d})" for lab, good, d in checks)
    ACCEPTANCE_LINES.append(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} [{dt:.1f} s] {detail}")
    print(ACCEPTANCE_LINES[-1])
    return ok


@pytest.fixture(scope="module")
def atom70():
    return AtomSpec.rb87(f0=70e3)


def test_criterion_01_conductivity(spec):
    t0 = time.perf_counter()
    s = NanotubeResponse(spec, "calibrated").sigma_bulk(W0)
    tb = NanotubeResponse(spec, "tight-binding").sigma_bulk(W0)
    target = 1.19e9 + 11.5j
    e_cal = abs(s - target) / abs(target)
    ratio = abs(tb) / abs(target)
    checks = [("calibrated", e_cal < 0.01, f"{s.real:.4e}{s.imag:+.4e}i, rel err {e_cal:.1e}"),
              ("tight-binding", 0.5 <= ratio <= 2, f"{tb.real:.4e}{tb.imag:+.4e}i, ratio {ratio:.3f}")]
    assert record(1, checks, t0, 10)


def test_criterion_02_permittivity(response):
    t0 = time.perf_counter()
    e = response.eps_r(W0)
    ok_mag = abs(abs(e) / 3e14 - 1) < 0.1
    r = abs(e.real) / abs(e.imag)
    checks = [("|eps| ~ 3e14", ok_mag, f"{abs(e):.4e}"), ("imaginary", r < 1e-2, f"|Re|/|Im| = {r:.1e}")]
    assert record(2, checks, t0, 10)


def test_criterion_03_spin_flip(response, atom70):
    t0 = time.perf_counter()
    tau = {y: spin_flip_rate(response, trap_for(y * 1e-9, R), atom70, y * 1e-9, T_ENV).tau_sf
           for y in (120, 150, 170)}
    checks = [("150 nm = 94.4 s +-25%", abs(tau[150] / 94.4 - 1) <= 0.25, f"{tau[150]:.4e} s"),
              ("120 nm in [40, 90] s", 40 <= tau[120] <= 90, f"{tau[120]:.4e} s"),
              ("170 nm > 100 s", tau[170] > 100, f"{tau[170]:.4e} s")]
    assert record(3, checks, t0, 300)


def test_criterion_04_barrier_geometry(cp_interp, atom):
    t0 = time.perf_counter()
    p = build_profile(cp_interp, trap_for(150e-9, R), atom, R)
    w = p.width * 1e9 if p.barrier_present else math.nan
    h = p.height if p.barrier_present else math.nan
    checks = [("width 68.6 nm +-10%", abs(w / 68.6 - 1) <= 0.10, f"{w:.2f} nm"),
              ("height 3.8e-29 J +-20%", abs(h / 3.8e-29 - 1) <= 0.20, f"{h:.3e} J")]
    assert record(4, checks, t0, 300)


def test_criterion_05_critical_distance(response, atom, cp_interp):
    t0 = time.perf_counter()
    a, b = tunneling_sweep(response, atom, [95e-9, 115e-9], cp=cp_interp)
    checks = [("95 nm absent", not a.barrier_present, a.error or "no error"),
              ("115 nm present", b.barrier_present, b.error or f"T = {b.T:.3g}")]
    assert record(5, checks, t0, 600)


def test_criterion_06_tunneling_lifetime(response, atom, cp_interp):
    t0 = time.perf_counter()
    a, b = tunneling_sweep(response, atom, [150e-9, 170e-9], cp=cp_interp)
    f = a.tau_cp / 0.2
    checks = [("150 nm = 0.2 s within x3", 1 / 3 <= f <= 3, f"{a.tau_cp:.3e} s"),
              ("170 nm >= 1 s", b.tau_cp >= 1, f"{b.tau_cp:.3e} s")]
    assert record(6, checks, t0, 600)


def test_criterion_07_ordering(response, atom, cp_interp, atom70):
    t0 = time.perf_counter()
    ys = [110e-9, 130e-9, 150e-9, 170e-9, 190e-9]
    cp = tunneling_sweep(response, atom, ys, cp=cp_interp)
    checks = []
    for y, r in zip(ys, cp):
        sf = spin_flip_rate(response, trap_for(y, R), atom70, y, T_ENV).tau_sf
        q = r.tau_cp / sf
        checks.append((f"{y * 1e9:.0f} nm", q < 0.1, f"ratio {q:.1e}"))
    assert record(7, checks, t0)


def test_criterion_08_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240601)
    worst, worst_other, done, skipped = 0.0, 0.0, 0, 0
    while done < 500:
        n = int(rng.integers(0, 11))
        w = 10.0 ** rng.uniform(3, 16)
        k = w / C.c
        q = rng.uniform(-3, 3)
        if abs(abs(q) - 1) < 1e-3:
            continue
        h = q * k
        x = abs(complex(k * k - h * h) ** 0.5) * R
        if n and 2 * n * math.log10(x) < -250:
            skipped += 1  # entries leave double range
            continue
        sig = 10.0 ** rng.uniform(-6, 4) * complex(1, rng.uniform(0, 1))
        sol = solve_boundary_system(n, h, w, sig, R)
        cf = c1v_closed_form(n, h, w, sig, R)
        worst = max(worst, abs(sol.C1V - cf) / max(abs(sol.C1V), abs(cf)))
        other = max(abs(sol.C1H), abs(sol.C2H), abs(sol.C2V)) / max(1.0, abs(sol.C1V))
        worst_other = max(worst_other, other)
        done += 1
    checks = [("C1V 1e-9", worst < 1e-9, f"max rel {worst:.1e} over 500 draws, {skipped} unrepresentable skipped"),
              ("others zero", worst_other < 1e-9, f"max {worst_other:.1e}")]
    assert record(8, checks, t0, 60)


def test_criterion_09_green_invariants(response):
    t0 = time.perf_counter()
    shell = Shell.from_response(response)
    r, rp = (R + 120e-9, 0.2, 0.0), (R + 80e-9, 1.1, 40e-9)
    rec = 0.0
    for w in (W0, 1j * 1e15):
        a = green_scattering(r, rp, w, shell).tensor.data
        b = green_scattering(rp, r, w, shell).tensor.data
        rec = max(rec, np.abs(a - b.T).max() / np.linalg.norm(a))
    pt = (R + 150e-9, 0.0, 0.0)
    real = 0.0
    for u in np.geomspace(1e12, 1e18, 7):
        t = green_scattering(pt, pt, 1j * u, shell).tensor.data
        nz = np.abs(t.real) > 0
        if np.any(nz):
            real = max(real, float(np.max(np.abs(t.imag)[nz] / np.abs(t.real)[nz])))
    zero = all(np.all(green_scattering(pt, x, w, Shell(R, 0.0)).tensor.data == 0)
               for x in (pt, rp) for w in (W0, 1j * 1e14))
    vac = 0.0
    for m in ("closed", "expansion"):
        g = green_vacuum(pt, pt, W0, imag_only=True, method=m)
        vac = max(vac, abs(np.trace(g.tensor.data).imag / (W0 / (2 * math.pi * C.c)) - 1))
    checks = [("reciprocity", rec < 1e-7, f"{rec:.1e}"), ("reality", real < 1e-8, f"{real:.1e}"),
              ("sigma->0 zero", zero, "exact zeros" if zero else "nonzero entries"),
              ("vacuum trace", vac < 1e-6, f"both paths {vac:.1e}")]
    assert record(9, checks, t0, 120)


def test_criterion_10_special_functions():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    x = 10.0 ** rng.uniform(-2, 2, 400)
    w_jh = w_ik = rec = 0.0
    for n in range(0, 21):
        j, jp = bessel_j(n, x)
        h, hp = hankel1(n, x)
        w_jh = max(w_jh, np.max(np.abs((j * hp - jp * h) / (2j / (np.pi * x)) - 1)))
        i, ip, k, kp = modified_i_k(n, x)
        ok = np.isfinite(i * kp) & np.isfinite(ip * k)
        w_ik = max(w_ik, np.max(np.abs(((i * kp - ip * k) / (-1 / x) - 1)[ok])))
        if n >= 1:
            jm, hm = bessel_j(n - 1, x)[0], hankel1(n - 1, x)[0]
            jn, hn = bessel_j(n + 1, x)[0], hankel1(n + 1, x)[0]
            im, km = modified_i_k(n - 1, x)[::2]
            ip1, kp1 = modified_i_k(n + 1, x)[::2]
            for lhs, rhs, scale in ((jm + jn, 2 * n / x * j, np.abs(jm) + np.abs(jn)),
                                    (hm + hn, 2 * n / x * h, np.abs(hm) + np.abs(hn)),
                                    (im - ip1, 2 * n / x * i, np.abs(im) + np.abs(ip1)),
                                    (kp1 - km, 2 * n / x * k, np.abs(kp1) + np.abs(km))):
                good = np.isfinite(scale) & (scale > 0)
                rec = max(rec, np.max(np.abs(lhs - rhs)[good] / scale[good]))
    checks = [("J/H Wronskian", w_jh < 1e-9, f"{w_jh:.1e}"), ("I/K Wronskian", w_ik < 1e-9, f"{w_ik:.1e}"),
              ("recurrences", rec < 1e-9, f"{rec:.1e}")]
    assert record(10, checks, t0, 10)


def test_criterion_11_determinism(tmp_path):
    t0 = time.perf_counter()
    outs = [subprocess.run([sys.executable, "-m", "cntrap", "summary"], capture_output=True,
                           check=True, cwd=tmp_path).stdout for _ in range(2)]
    same = outs[0] == outs[1] and len(outs[0]) > 0
    checks = [("byte-identical", same, f"{len(outs[0])} bytes")]
    assert record(11, checks, t0)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
