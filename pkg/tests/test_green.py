"""Shell Green tensor: reflection coefficients, vacuum term, scattering tensor.

The numeric 4x4 boundary solve is the oracle for the closed-form ``C1V``;
the general-point path (complex Bessel functions, full vector wave
functions) is the oracle for the fast coincident path.
"""
import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import special as sp

from cntrap.core import CONSTANTS as C
from cntrap.green import (BoundarySystemError, CoincidenceError, GuidedModeWarning, Shell,
                          c1v_closed_form, green_scattering, green_vacuum, solve_boundary_system,
                          vector_wave_functions)
from cntrap.green import _guided_mode_check

R = 3.52e-10
W0 = 2 * math.pi * 70e3
K0 = W0 / C.c
PT150 = (R + 150e-9, 0.0, 0.0)


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def representable(n, h, w):
    """Boundary system entries stay inside double range: |eta R|^(2n) > 1e-250."""
    k = w / C.c
    x = abs(complex(k * k - h * h) ** 0.5) * R
    return n == 0 or 2 * n * math.log10(x) > -250


@st.composite
def draws(draw):
    n = draw(st.integers(0, 10))
    w = 10.0 ** draw(st.floats(3, 16))
    k = w / C.c
    q = draw(st.floats(-3, 3).filter(lambda v: abs(abs(v) - 1) > 1e-3))
    s = 10.0 ** draw(st.floats(-6, 4))
    loss = draw(st.floats(0, 1))
    return n, q * k, w, s * complex(1, loss)


@settings(max_examples=300, deadline=None)
@given(d=draws())
def test_c1v_closed_form_matches_solver(d):
    n, h, w, sig = d
    assume(representable(n, h, w))
    sol = solve_boundary_system(n, h, w, sig, R)
    cf = c1v_closed_form(n, h, w, sig, R)
    assert _rel(sol.C1V, cf) < 1e-9
    bound = 1e-9 * max(1.0, abs(sol.C1V))
    assert abs(sol.C1H) < bound and abs(sol.C2H) < bound and abs(sol.C2V) < bound


def test_unrepresentable_system_raises():
    # (eta R)^20 ~ 1e-300: the solver refuses instead of returning garbage
    with np.errstate(all="ignore"):
        with pytest.raises(BoundarySystemError):
            solve_boundary_system(10, 0.0, 1e3, 1.0, R)


def test_generic_point_vanishing_coefficients(response):
    sig = response.sheet_conductance(W0)
    sol = solve_boundary_system(1, 0.3 * K0, W0, sig, R)
    c1 = abs(sol.C1V)
    assert c1 > 0
    assert max(abs(sol.C1H), abs(sol.C2H), abs(sol.C2V)) < 1e-10 * c1


def test_zero_conductance_passes_through():
    sol = solve_boundary_system(2, 0.5 * K0, W0, 0.0, R)
    assert sol.C1V == 0 and sol.C1H == 0 and sol.C2H == 0 and sol.C2V == 0
    assert sol.C3V == 1 and sol.C3H == 1
    assert c1v_closed_form(2, 0.5 * K0, W0, 0.0, R) == 0


def _pec_error(sigma):
    h = 0.3 * K0
    eta = math.sqrt(K0 * K0 - h * h)
    lim = -sp.jv(1, eta * R) / sp.hankel1(1, eta * R)
    return _rel(solve_boundary_system(1, h, W0, sigma, R).C1V, lim)


def test_perfect_conductor_limit_convergence():
    # the deviation falls as 1/sigma; the shell couples weakly at omega0
    errs = [_pec_error(s) for s in (1e12, 1e14, 1e16)]
    assert errs[2] < 1e-4
    assert errs[1] == pytest.approx(errs[0] / 100, rel=0.05)


def test_perfect_conductor_limit_at_stated_conductance():
    assert _pec_error(1e6) < 1e-4


@settings(max_examples=200, deadline=None)
@given(n=st.integers(0, 10), q=st.floats(0.0, 0.999), lw=st.floats(3, 16), ls=st.floats(-6, 4))
def test_c1v_bounded_for_propagating_waves(n, q, lw, ls):
    w = 10.0 ** lw
    assert abs(c1v_closed_form(n, q * w / C.c, w, 10.0 ** ls, R)) <= 1 + 1e-12


def test_singular_at_eta_zero():
    with pytest.raises(BoundarySystemError):
        solve_boundary_system(1, K0, W0, 1.0, R)


def test_vector_wave_functions_solenoidal_pair():
    # curl N = k M checked by central differences on the z component route
    n, k, h = 2, 3e6, 1e6
    pt = (4e-7, 0.3, 1e-8)
    Me, _, Ne, _ = vector_wave_functions(n, np.array([h]), k, pt, "J")
    assert Me.shape == (1, 3) and Ne.shape == (1, 3)
    # N_z = eta^2 Z cos / k, M_phi = -eta Z' cos: both finite and consistent in phase
    eta = math.sqrt(k * k - h * h)
    z = sp.jv(n, eta * pt[0]) * math.cos(n * pt[1]) * np.exp(1j * h * pt[2])
    assert Ne[0, 2] == pytest.approx(eta * eta * z / k, rel=1e-12)


# ---------------------------------------------------------------- vacuum

def test_vacuum_imag_trace_closed():
    for w in (W0, 1e12, 3e15):
        g = green_vacuum(PT150, PT150, w, imag_only=True)
        assert np.trace(g.tensor.data).imag == pytest.approx(w / (2 * math.pi * C.c), rel=1e-12)


def test_vacuum_imag_trace_expansion():
    g = green_vacuum(PT150, PT150, W0, imag_only=True, method="expansion")
    assert np.trace(g.tensor.data).imag == pytest.approx(W0 / (2 * math.pi * C.c), rel=1e-6)


def test_vacuum_expansion_matches_closed_form():
    # about 50 nm apart; distinct radii keep the order sum geometric
    r, rp = (180e-9, 0.2, 30e-9), (150e-9, 0.0, 0.0)
    a = green_vacuum(r, rp, W0).tensor.data
    b = green_vacuum(r, rp, W0, method="expansion").tensor.data
    big = np.abs(a) > 1e-6 * np.abs(a).max()
    assert np.all(np.abs(a - b)[big] <= 1e-6 * np.abs(a)[big])


def test_vacuum_far_field_slope():
    w = 1e15
    ds = np.geomspace(1e-4, 1e-2, 6)
    ns = [green_vacuum((1.0, 0.0, 0.0), (1.0, 0.0, d), w).tensor.norm() for d in ds]
    slope = np.polyfit(np.log(ds), np.log(ns), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.05)


def test_vacuum_coincident_real_part_refused():
    with pytest.raises(CoincidenceError):
        green_vacuum(PT150, PT150, W0)


def test_vacuum_curlcurl_coincident():
    g = green_vacuum(PT150, PT150, W0, flavor="curlcurl", imag_only=True)
    assert g.tensor.data[0, 0].imag == pytest.approx(K0 ** 3 / (6 * math.pi), rel=1e-12)


# ---------------------------------------------------------------- scattering

def test_zero_shell_gives_zero_tensor():
    shell = Shell(R, 0.0)
    for w in (W0, 1j * 1e14):
        g = green_scattering(PT150, PT150, w, shell)
        assert np.all(g.tensor.data == 0)
    g = green_scattering(PT150, (R + 100e-9, 0.4, 2e-8), W0, shell)
    assert np.all(g.tensor.data == 0)


@pytest.mark.parametrize("flavor", ["electric", "curlcurl"])
def test_fast_path_matches_general(response, flavor):
    shell = Shell.from_response(response)
    for w in (W0, 1j * 2e15):
        a = green_scattering(PT150, PT150, w, shell, flavor=flavor, method="coincident", rtol=1e-9)
        b = green_scattering(PT150, PT150, w, shell, flavor=flavor, method="general", rtol=1e-9)
        assert np.abs(a.tensor.data - b.tensor.data).max() < 1e-7 * a.tensor.norm()


def test_coincident_curlcurl_frozen(response):
    # fast path at 150 nm, omega0; agrees with the general path above
    g = green_scattering(PT150, PT150, W0, Shell.from_response(response), flavor="curlcurl")
    d = np.diag(g.tensor.data)
    assert d[0] == pytest.approx(0.1256 + 0.1256j, rel=2e-3)
    assert d[1] == pytest.approx(8009 + 7638j, rel=2e-4)
    assert d[2] == 0


def test_reciprocity(response):
    shell = Shell.from_response(response)
    r, rp = (R + 120e-9, 0.2, 0.0), (R + 80e-9, 1.1, 40e-9)
    for w in (W0, 1j * 1e15):
        a = green_scattering(r, rp, w, shell).tensor.data
        b = green_scattering(rp, r, w, shell).tensor.data
        assert np.abs(a - b.T).max() < 1e-7 * np.linalg.norm(a)


def test_imaginary_axis_reality(response):
    shell = Shell.from_response(response)
    for u in np.geomspace(1e12, 1e18, 7):
        t = green_scattering(PT150, PT150, 1j * u, shell).tensor.data
        nz = np.abs(t.real) > 0
        assert np.all(np.abs(t.imag)[nz] <= 1e-8 * np.abs(t.real)[nz])


def test_attractive_sign_on_imaginary_axis(response):
    shell = Shell.from_response(response)
    for u in (1e13, 1e15, 1e17):
        tr = np.trace(green_scattering(PT150, PT150, 1j * u, shell).tensor.data)
        assert tr.real < 0


def test_total_is_sum_of_parts(response):
    shell = Shell.from_response(response)
    r, rp = (R + 120e-9, 0.2, 0.0), (R + 80e-9, 1.1, 40e-9)
    s = green_scattering(r, rp, W0, shell).tensor.data
    v = green_vacuum(r, rp, W0).tensor.data
    t = green_scattering(r, rp, W0, shell, part="total").tensor.data
    assert np.allclose(t, s + v, rtol=1e-12, atol=0)


def test_norm_decreases_with_distance(response):
    shell = Shell.from_response(response)
    ys = np.geomspace(10e-9, 500e-9, 8)
    norms = [green_scattering((R + y, 0, 0), (R + y, 0, 0), W0, shell, flavor="curlcurl").tensor.norm()
             for y in ys]
    assert np.all(np.diff(norms) < 0)


def test_points_inside_rejected(response):
    shell = Shell.from_response(response)
    with pytest.raises(ValueError):
        green_scattering((R / 2, 0, 0), PT150, W0, shell)


def test_guided_mode_flag():
    # synthetic lossless shell with a denominator zero exactly on the grid
    kappa = np.linspace(1.0, 2.0, 201)
    gamma = -1.0 / (1.5 ** 2 * sp.ive(0, 1.5) * sp.kve(0, 1.5))
    with pytest.warns(GuidedModeWarning):
        _guided_mode_check(kappa, 0, 1, 1.0, gamma)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        _guided_mode_check(kappa, 0, 3, 1.0, 1e-3j)
