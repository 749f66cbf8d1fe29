"""Axial electronic response of an (a, b) single-wall carbon nanotube.

Two conductivity modes are provided:

``"tight-binding"``
    Drude plus interband permittivity from the pi-band dispersion, with the
    momentum matrix element ``K0(N, p)`` injectable (see :func:`default_k0`).
``"calibrated"``
    Drude-only permittivity whose plasma frequency is fitted so that the
    real part of the bulk-equivalent conductivity equals a target value at a
    target frequency (by default 1.19e9 S/m at 70 kHz).

Frequencies may be complex: ``omega = 1j * u`` evaluates the analytic
continuation on the imaginary axis, where all responses are real.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import optimize
from scipy.special import expit

from .core import CONSTANTS as C
from .quadrature import QuadratureError, integrate

__all__ = [
    "NanotubeSpec",
    "SurfaceConductivity",
    "NanotubeResponse",
    "band_energy",
    "fermi",
    "fermi_derivative",
    "default_k0",
    "eps_interband",
    "plasma_frequency",
    "eps_drude",
    "sigma_axial",
    "calibrated_plasma_frequency",
    "CALIBRATION_SIGMA",
    "CALIBRATION_FREQUENCY",
]

CALIBRATION_SIGMA = 1.19e9        # S/m, real part of the bulk-equivalent sigma
CALIBRATION_FREQUENCY = 70e3      # Hz

K0Function = Callable[["NanotubeSpec", int, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class NanotubeSpec:
    """Material identity of the shell.

    Lengths in metres, energies in joules, temperature in kelvin.
    ``shell_thickness`` converts the bulk-equivalent conductivity (S/m) into
    the sheet conductance (S) entering the surface jump condition.
    """

    a: int = 9
    b: int = 0
    radius: float = 3.52e-10
    ell: float = 2.13e-10
    t0: float = 4.32e-19
    hbar_over_tau: float = 4.8e-21
    temperature: float = 380.0
    mu_chem: float = 0.0
    shell_thickness: float = 3.4e-10

    def __post_init__(self):
        if self.a <= 0 or self.b < 0:
            raise ValueError("winding indices must satisfy a > 0, b >= 0")
        for name in ("radius", "ell", "t0", "hbar_over_tau", "temperature", "shell_thickness"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def metallic(self) -> bool:
        return (2 * self.a + self.b) % 3 == 0

    @property
    def carbon_density(self) -> float:
        """Carbon atoms per volume, pi*sqrt(3) / (2 R ell^2)."""
        return math.pi * math.sqrt(3.0) / (2.0 * self.radius * self.ell ** 2)

    @property
    def tubule_density(self) -> float:
        return self.carbon_density / (2 * self.a)

    @property
    def tau(self) -> float:
        return C.hbar / self.hbar_over_tau


@dataclass(frozen=True)
class SurfaceConductivity:
    omega: complex
    sigma_sheet: complex        # S
    sigma_bulk_equiv: complex   # S/m
    eps_r: complex


# ---------------------------------------------------------------- bands

def _beta_chiral(spec: NanotubeSpec) -> float:
    return (spec.a + 2 * spec.b) / (2 * spec.a)


def _structure_factor(spec: NanotubeSpec, N: int, x):
    """``f`` with ``|f|^2`` equal to the band radicand, and ``df/dx``; ``x = p ell``."""
    beta = _beta_chiral(spec)
    X = 2 * math.pi * N / spec.a - beta * x
    Y = 0.5 * x
    e1 = np.exp(1j * (X + Y))
    e2 = np.exp(1j * (X - Y))
    f = 1.0 + e1 + e2
    df = 1j * (0.5 - beta) * e1 + 1j * (-0.5 - beta) * e2
    return f, df


def _band_plus(spec: NanotubeSpec, N: int, x):
    beta = _beta_chiral(spec)
    cy = np.cos(0.5 * x)
    rad = 1.0 + 4.0 * np.cos(2 * math.pi * N / spec.a - beta * x) * cy + 4.0 * cy * cy
    return spec.t0 * np.sqrt(np.clip(rad, 0.0, None))


def band_energy(spec: NanotubeSpec, N: int, p):
    """``(E_plus, E_minus)`` in joules for channel ``N`` at wavenumber ``p`` (1/m)."""
    if not (0 <= N < spec.a) or int(N) != N:
        raise ValueError(f"channel N={N} outside 0..{spec.a - 1}")
    p = np.asarray(p, dtype=float)
    if np.any(np.abs(p) * spec.ell > math.pi * (1 + 1e-12)):
        raise ValueError("|p| exceeds pi/ell")
    e = _band_plus(spec, N, p * spec.ell)
    return e, -e


def fermi(E, spec: NanotubeSpec):
    beta = 1.0 / (C.kB * spec.temperature)
    return expit(-beta * (np.asarray(E) - spec.mu_chem))


def fermi_derivative(E, spec: NanotubeSpec):
    beta = 1.0 / (C.kB * spec.temperature)
    f = fermi(E, spec)
    return -beta * f * (1.0 - f)


def default_k0(spec: NanotubeSpec, N: int, p):
    """Dimensionless momentum matrix element from the pi-band Hamiltonian.

    Uses the gradient approximation ``<s|p_z|s'> = (m/hbar) <s|dH/dp|s'>``
    for the two-band nearest-neighbour Hamiltonian ``H = t0 [[0, f], [f*, 0]]``,
    expressed in units of ``hbar/ell``:

    * ``Im K0 = (m ell/hbar^2) t0 Re(f' f*) / |f|`` is the intraband element
      (equal to ``(m ell/hbar^2) dE_+/dp``);
    * ``Re K0 = (m ell/hbar^2) t0 Im(f' f*) / |f|`` is the interband element.
    """
    x = np.asarray(p, dtype=float) * spec.ell
    f, dfdx = _structure_factor(spec, N, x)
    dfdp = dfdx * spec.ell
    mod = np.abs(f)
    safe = np.where(mod > 1e-300, mod, 1.0)
    prod = dfdp * np.conj(f)
    scale = C.m * spec.ell * spec.t0 / C.hbar ** 2
    k0 = scale * (prod.imag + 1j * prod.real) / safe
    return np.where(mod > 1e-300, k0, 0.0)


def _special_points(spec: NanotubeSpec, N: int, level: float) -> list[float]:
    """Positions ``x = p ell`` where ``E_+`` touches or crosses ``level``."""
    xs = np.linspace(-math.pi, math.pi, 4097)
    e = _band_plus(spec, N, xs)
    out = []
    g = e - level
    for i in np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]:
        out.append(optimize.brentq(lambda t: _band_plus(spec, N, t) - level, xs[i], xs[i + 1]))
    for i in range(1, xs.size - 1):
        if e[i] <= e[i - 1] and e[i] <= e[i + 1]:
            res = optimize.minimize_scalar(lambda t: _band_plus(spec, N, t),
                                           bounds=(xs[i - 1], xs[i + 1]), method="bounded",
                                           options={"xatol": 1e-14})
            out.append(float(res.x))
    return sorted(out)


def _refined_breaks(centres, width: float) -> list[float]:
    pts = []
    for c in centres:
        for s in (0.0, 1.0, 4.0, 16.0, 64.0):
            pts.extend([c - s * width, c + s * width])
    return [p for p in pts if -math.pi < p < math.pi]


# ---------------------------------------------------------------- permittivity

def eps_interband(spec: NanotubeSpec, omega, K0: K0Function | None = default_k0,
                  rtol: float = 1e-6) -> complex:
    """Interband relative permittivity, including the additive 1."""
    if K0 is None:
        return 1.0 + 0j
    omega = complex(omega)
    hw = C.hbar * omega
    gamma = C.hbar * spec.hbar_over_tau  # hbar^2 / tau
    pref = (C.e * C.hbar ** 2 / C.m) ** 2 * 4.0 * spec.carbon_density / (spec.a * spec.ell) / C.eps0
    beta = 1.0 / (C.kB * spec.temperature)
    width = C.kB * spec.temperature / spec.t0
    total = 0j
    for N in range(spec.a):
        def integrand(x, N=N):
            ep = _band_plus(spec, N, x)
            fp = fermi(ep, spec)
            fm = fermi(-ep, spec)
            small = beta * ep < 1e-6
            occ = np.where(small, fermi_derivative(0.0 * ep, spec),
                           (fp - fm) / np.where(small, 1.0, 2.0 * ep))
            k0 = np.asarray(K0(spec, N, x / spec.ell))
            num = k0.real ** 2
            den = hw ** 2 + 1j * gamma * omega - (2.0 * ep) ** 2
            return occ * num / den / spec.ell
        breaks = _refined_breaks(_special_points(spec, N, abs(spec.mu_chem)), width)
        if omega.imag == 0 and omega.real > 0:
            breaks += _special_points(spec, N, 0.5 * abs(hw))
        try:
            res = integrate(integrand, -math.pi, math.pi, rtol=rtol, breakpoints=breaks,
                            initial_panels=8)
        except QuadratureError as exc:
            raise QuadratureError(f"interband integral, channel N={N}: {exc}", exc.partial) from exc
        total += complex(res.value)
    return 1.0 + pref * total


def plasma_frequency(spec: NanotubeSpec, K0: K0Function = default_k0,
                     rtol: float = 1e-8) -> float:
    """Drude plasma frequency (rad/s) from the Fermi-surface weighted integral."""
    if not spec.metallic:
        raise ValueError(f"({spec.a},{spec.b}) tube is not metallic")
    pref = (C.e * C.hbar / C.m) ** 2 * 2.0 * spec.carbon_density / (spec.a * spec.ell) / C.eps0
    width = C.kB * spec.temperature / spec.t0
    total = 0.0
    for N in range(spec.a):
        def integrand(x, N=N):
            ep = _band_plus(spec, N, x)
            k0 = np.asarray(K0(spec, N, x / spec.ell))
            return k0.imag ** 2 * (fermi_derivative(ep, spec) + fermi_derivative(-ep, spec)) / spec.ell
        breaks = _refined_breaks(_special_points(spec, N, abs(spec.mu_chem)), width)
        try:
            res = integrate(integrand, -math.pi, math.pi, rtol=rtol, breakpoints=breaks,
                            initial_panels=8)
        except QuadratureError as exc:
            raise QuadratureError(f"plasma integral, channel N={N}: {exc}", exc.partial) from exc
        total += float(res.value)
    wpl2 = -pref * total
    if not wpl2 > 0:
        raise ValueError(f"non-positive plasma frequency squared ({wpl2:.3g})")
    return math.sqrt(wpl2)


def eps_drude(spec: NanotubeSpec, omega, omega_pl: float) -> complex:
    hw = C.hbar * complex(omega)
    return -(C.hbar * omega_pl) ** 2 / (hw * (hw + 1j * spec.hbar_over_tau))


def calibrated_plasma_frequency(spec: NanotubeSpec, sigma_re: float = CALIBRATION_SIGMA,
                                frequency: float = CALIBRATION_FREQUENCY) -> float:
    """Plasma frequency giving ``Re sigma_bulk = sigma_re`` at ``frequency`` (Hz)."""
    w = 2 * math.pi * frequency
    g = 1.0 / spec.tau
    return math.sqrt(sigma_re * (w * w + g * g) / (C.eps0 * g))


# ---------------------------------------------------------------- assembled response

@dataclass
class NanotubeResponse:
    """Frequency-dependent axial response of one tube in a given mode.

    The plasma frequency is computed once per instance (thread-safe) and
    imaginary-axis permittivities are memoised.
    """

    spec: NanotubeSpec = field(default_factory=NanotubeSpec)
    mode: str = "calibrated"
    k0: K0Function = default_k0
    calibration_sigma: float = CALIBRATION_SIGMA
    calibration_frequency: float = CALIBRATION_FREQUENCY

    def __post_init__(self):
        if self.mode not in ("calibrated", "tight-binding"):
            raise ValueError(f"unknown conductivity mode {self.mode!r}")
        self._lock = threading.Lock()
        self._omega_pl = None
        self._eps_imag = lru_cache(maxsize=4096)(self._eps_imag_uncached)

    def __hash__(self):
        return id(self)

    def __getstate__(self):
        state = self.__dict__.copy()
        for key in ("_lock", "_eps_imag"):
            state.pop(key, None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()
        self._eps_imag = lru_cache(maxsize=4096)(self._eps_imag_uncached)

    @property
    def omega_pl(self) -> float:
        if self._omega_pl is None:
            with self._lock:
                if self._omega_pl is None:
                    if self.mode == "calibrated":
                        self._omega_pl = calibrated_plasma_frequency(
                            self.spec, self.calibration_sigma, self.calibration_frequency)
                    else:
                        self._omega_pl = plasma_frequency(self.spec, self.k0)
        return self._omega_pl

    def _eps_b(self, omega: complex) -> complex:
        if self.mode == "calibrated":
            return 1.0 + 0j
        return eps_interband(self.spec, omega, self.k0)

    def _eps_imag_uncached(self, u: float) -> float:
        w = 1j * u
        return (eps_drude(self.spec, w, self.omega_pl) + self._eps_b(w)).real

    def eps_r(self, omega) -> complex:
        omega = complex(omega)
        if omega.real == 0.0 and omega.imag > 0:
            return complex(self._eps_imag(omega.imag))
        return eps_drude(self.spec, omega, self.omega_pl) + self._eps_b(omega)

    def sigma_bulk(self, omega) -> complex:
        """Bulk-equivalent conductivity (S/m): ``eps_r - 1 = i sigma / (omega eps0)``."""
        omega = complex(omega)
        return -1j * omega * C.eps0 * (self.eps_r(omega) - 1.0)

    def sheet_conductance(self, omega) -> complex:
        return self.sigma_bulk(omega) * self.spec.shell_thickness

    def sigma_axial(self, omega) -> SurfaceConductivity:
        omega = complex(omega)
        if not (omega.real > 0 or omega.imag > 0):
            raise ValueError("frequency must lie on the positive real or imaginary axis")
        eps = self.eps_r(omega)
        bulk = -1j * omega * C.eps0 * (eps - 1.0)
        return SurfaceConductivity(omega, bulk * self.spec.shell_thickness, bulk, eps)

    def plasma_imag_sheet(self, u: float) -> float:
        """Sheet conductance (S) at imaginary frequency ``i u``; real and positive."""
        return float(self.sheet_conductance(1j * u).real)


def sigma_axial(spec: NanotubeSpec, omega, mode: str = "calibrated") -> SurfaceConductivity:
    return NanotubeResponse(spec, mode).sigma_axial(omega)
