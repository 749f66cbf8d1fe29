import math
from dataclasses import replace

import numpy as np
import pytest

from cntrap.core import CONSTANTS as C
from cntrap.material import (NanotubeResponse, NanotubeSpec, band_energy, calibrated_plasma_frequency,
                             default_k0, eps_drude, eps_interband, fermi, plasma_frequency,
                             sigma_axial)

W0 = 2 * math.pi * 70e3


def test_spec_validation():
    with pytest.raises(ValueError):
        NanotubeSpec(radius=-1.0)
    with pytest.raises(ValueError):
        NanotubeSpec(t0=0.0)


def test_metallic_rule():
    assert NanotubeSpec(a=9, b=0).metallic
    assert not NanotubeSpec(a=10, b=0).metallic
    assert NanotubeSpec(a=5, b=5).metallic


def test_carbon_density_relation(spec):
    rho = math.pi * math.sqrt(3) / (2 * spec.radius * spec.ell ** 2)
    assert spec.carbon_density == pytest.approx(rho, rel=1e-12)
    assert 2 * spec.a * spec.tubule_density == pytest.approx(rho, rel=1e-12)


def test_band_energy_examples(spec):
    ep, em = band_energy(spec, 0, 0.0)
    assert ep == pytest.approx(3 * spec.t0, rel=1e-14)
    assert ep + em == 0
    ep, _ = band_energy(spec, 3, 0.0)
    assert ep == pytest.approx(spec.t0 * math.sqrt(3), rel=1e-13)


def test_band_energy_domain(spec):
    with pytest.raises(ValueError):
        band_energy(spec, 9, 0.0)
    with pytest.raises(ValueError):
        band_energy(spec, 0, 1.01 * math.pi / spec.ell)


def test_band_symmetry_under_channel_pairing(spec):
    p = np.linspace(-math.pi, math.pi, 41) / spec.ell
    for N in range(1, spec.a):
        a = band_energy(spec, N, p)[0] + band_energy(spec, spec.a - N, p)[0]
        assert np.allclose(a, a[::-1], rtol=1e-12)
        k = np.abs(default_k0(spec, N, p).real) ** 2 + np.abs(default_k0(spec, spec.a - N, p).real) ** 2
        assert np.allclose(k, k[::-1], rtol=1e-10, atol=1e-14 * k.max())


def test_fermi_examples(spec):
    mu = spec.mu_chem
    assert fermi(mu, spec) == 0.5
    assert fermi(mu + 1e-15, spec) == pytest.approx(0.0, abs=1e-300)
    assert fermi(mu + C.kB * spec.temperature, spec) == pytest.approx(1 / (math.e + 1), rel=1e-14)


def test_interband_zero_k0(spec):
    assert eps_interband(spec, W0, None) == 1
    assert eps_interband(spec, W0, lambda s, N, p: np.zeros_like(p)) == 1


def test_interband_semiconducting_cold():
    s = NanotubeSpec(a=10, temperature=1.0)
    e = eps_interband(s, 1e12)
    assert abs(e.imag) < 1e-4 * abs(e.real - 1)


def test_plasma_frequency_scaling(spec):
    w1 = plasma_frequency(spec)
    w2 = plasma_frequency(spec, lambda s, N, p: 2 * default_k0(s, N, p))
    assert w2 ** 2 == pytest.approx(4 * w1 ** 2, rel=1e-10)


def test_plasma_frequency_cold_limit(spec):
    a = plasma_frequency(replace(spec, temperature=10.0))
    b = plasma_frequency(replace(spec, temperature=1.0))
    assert abs(a / b - 1) < 0.01


def test_plasma_frequency_frozen(spec):
    # regression value of the shipped tight-binding matrix element
    assert plasma_frequency(spec) == pytest.approx(2.781513856869482e16, rel=1e-6)


def test_plasma_frequency_requires_metal():
    with pytest.raises(ValueError):
        plasma_frequency(NanotubeSpec(a=10))


def test_drude_limits(spec):
    wpl = 1e15
    lo = 1e-3 / spec.tau
    e = eps_drude(spec, lo, wpl)
    assert e.imag == pytest.approx(wpl ** 2 * spec.tau / lo, rel=1e-3)
    assert abs(e.real) < 1e-2 * e.imag
    hi = 1e3 / spec.tau
    e = eps_drude(spec, hi, wpl)
    assert e.real == pytest.approx(-wpl ** 2 / hi ** 2, rel=1e-5)


def test_calibration_inverts(spec):
    wpl = calibrated_plasma_frequency(spec)
    r = NanotubeResponse(spec, "calibrated")
    assert r.omega_pl == wpl
    assert r.sigma_bulk(W0).real == pytest.approx(1.19e9, rel=1e-12)


def test_sigma_eps_relation(response):
    for w in (1e4, W0, 1e12):
        s = response.sigma_axial(w)
        assert s.eps_r - 1 == pytest.approx(1j * s.sigma_bulk_equiv / (w * C.eps0), rel=1e-10)
        assert s.sigma_sheet == pytest.approx(s.sigma_bulk_equiv * response.spec.shell_thickness,
                                             rel=1e-14)


@pytest.mark.parametrize("mode", ["calibrated", "tight-binding"])
def test_passivity(spec, mode):
    r = NanotubeResponse(spec, mode)
    for w in np.geomspace(1e3, 1e16, 27):
        assert r.sheet_conductance(w).real >= 0


def test_low_frequency_flatness(response):
    a = abs(response.sigma_bulk(2 * math.pi * 1e4))
    b = abs(response.sigma_bulk(2 * math.pi * 1e6))
    assert abs(a / b - 1) < 0.01


def test_high_frequency_trend(spec):
    r = NanotubeResponse(spec, "tight-binding")
    ims = [r.eps_r(w).imag for w in np.geomspace(1e17, 1e19, 5)]
    assert all(v >= 0 for v in ims)
    assert ims[-1] < ims[0]


def test_imaginary_axis_real(response):
    e = response.eps_r(1j * 1e15)
    assert e.imag == 0 and e.real > 1


def test_module_level_sigma(spec):
    s = sigma_axial(spec, W0)
    assert s.sigma_bulk_equiv.real == pytest.approx(1.19e9, rel=1e-12)


def test_bad_mode(spec):
    with pytest.raises(ValueError):
        NanotubeResponse(spec, "quantum")
