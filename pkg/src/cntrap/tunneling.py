"""Total trap potential, barrier geometry and WKB tunneling lifetime.

Coordinates are distances from the tube surface. The magnetic part uses the
axis distance ``y_surface + R`` internally.

The atom sits in the magnetic well near ``y0``; the Casimir-Polder
attraction pulls the potential to ``-inf`` at the surface, so the well is
separated from the surface by a barrier whose top lies between the two. The
tunneling energy is the zero-point level ``E = V_min + hbar omega_r / 2``,
with ``omega_r`` taken from the curvature of the total potential.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .casimir import CPInterpolant
from .core import CONSTANTS as C
from .material import NanotubeResponse
from .quadrature import integrate
from .trap import AtomSpec, TrapConfig, trap_frequency_gradient, zeeman_potential

__all__ = [
    "TrapDestroyedError",
    "PotentialProfile",
    "TunnelResult",
    "default_grid",
    "trap_for",
    "build_profile",
    "wkb_lifetime",
    "tunneling_sweep",
]

DEFAULT_CURRENT = 20e-6
DEFAULT_OFFSET = 1e-5


class TrapDestroyedError(RuntimeError):
    """The total potential has no local minimum: the surface attraction wins."""

    def __init__(self, msg, profile=None):
        super().__init__(msg)
        self.profile = profile


@dataclass
class PotentialProfile:
    y_surface: np.ndarray
    V_mag: np.ndarray
    U_cp: np.ndarray
    V_tot: np.ndarray
    radius: float
    y0: float
    minimum_present: bool = False
    y_min: float = math.nan
    V_min: float = math.nan
    omega_r: float = math.nan       # rad/s, curvature of V_tot at the minimum
    omega_r_gradient: float = math.nan   # rad/s, linearised magnetic trap
    energy: float = math.nan        # J, V_min + hbar omega_r / 2
    barrier_present: bool = False   # V_tot rises above E between surface and minimum
    local_maximum: bool = False     # V_tot has a maximum above V_min, whatever E is
    y_top: float = math.nan
    V_top: float = math.nan
    height: float = math.nan        # J, V_top - V_min
    y1: float = math.nan
    y2: float = math.nan
    potential: object = field(default=None, repr=False)

    @property
    def width(self) -> float:
        return self.y2 - self.y1 if self.barrier_present else math.nan

    def footer(self) -> list[str]:
        lines = [f"y0_nm = {self.y0 * 1e9:.9e}",
                 f"omega_r_gradient_rad_s = {self.omega_r_gradient:.9e}"]
        if not self.minimum_present:
            lines += ["minimum: absent", "barrier: absent"]
            return lines
        lines += [f"y_min_nm = {self.y_min * 1e9:.9e}",
                  f"v_min_J = {self.V_min:.9e}",
                  f"omega_r_rad_s = {self.omega_r:.9e}",
                  f"omega_r_over_2pi_hz = {self.omega_r / (2 * math.pi):.9e}",
                  f"energy_J = {self.energy:.9e}"]
        if not self.barrier_present:
            lines.append("barrier: absent")
            if self.local_maximum:
                lines.append(f"local_maximum_below_energy_height_J = {self.height:.9e}")
            return lines
        lines += ["barrier: present",
                  f"barrier_height_J = {self.height:.9e}",
                  f"barrier_width_nm = {self.width * 1e9:.9e}",
                  f"y1_nm = {self.y1 * 1e9:.9e}",
                  f"y2_nm = {self.y2 * 1e9:.9e}"]
        return lines


@dataclass(frozen=True)
class TunnelResult:
    y0: float
    barrier_present: bool
    T: float
    omega_r: float
    tau_cp: float
    energy: float
    ln_T: float = math.nan
    ln_T_vmin: float = math.nan     # exponent with E = V_min, sensitivity diagnostic
    omega_r_gradient: float = math.nan
    error: str | None = None

    @property
    def attempt_hz(self) -> float:
        return self.omega_r / (2 * math.pi)


def default_grid(y0: float, n: int = 400) -> np.ndarray:
    """Geometric grid over ``[max(1 nm, 0.02 y0), 3 y0]``, dense near the surface."""
    return np.geomspace(max(1e-9, 0.02 * y0), 3 * y0, max(n, 400))


def _stencil2(f, x, h):
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)


def build_profile(cp, cfg: TrapConfig, atom: AtomSpec, radius: float,
                  grid: np.ndarray | None = None, strict: bool = True) -> PotentialProfile:
    """Sample and characterise ``V_tot = V_mag + U_cp`` along the radial line.

    Parameters
    ----------
    cp : callable
        ``U_cp(y_surface)`` in joules, vectorised; ``None`` removes the shell.
    cfg, atom
        Magnetic trap and trapped state.
    radius : float
        Tube radius (m).
    grid : array, optional
        Surface distances (m); defaults to :func:`default_grid`.
    strict : bool
        Raise :class:`TrapDestroyedError` when there is no minimum; otherwise
        return the profile with ``minimum_present`` false.
    """
    y0 = cfg.y0_surface(radius)
    y = default_grid(y0) if grid is None else np.asarray(grid, dtype=float)
    if y.size < 5 or np.any(np.diff(y) <= 0) or y[0] <= 0:
        raise ValueError("grid must be positive, increasing, with at least 5 points")

    def cpf(x):
        return np.zeros_like(np.asarray(x, dtype=float)) if cp is None else cp(x)

    def V(x):
        x = np.asarray(x, dtype=float)
        return zeeman_potential(cfg, atom, x + radius) + cpf(x)

    vm = zeeman_potential(cfg, atom, y + radius)
    uc = np.asarray(cpf(y), dtype=float)
    vt = vm + uc
    prof = PotentialProfile(y, vm, uc, vt, radius, y0, potential=V,
                            omega_r_gradient=trap_frequency_gradient(cfg, atom))

    inner = np.flatnonzero((vt[1:-1] < vt[:-2]) & (vt[1:-1] <= vt[2:])) + 1
    if inner.size == 0:
        if strict:
            raise TrapDestroyedError(f"no potential minimum near y0 = {y0 * 1e9:.4g} nm", prof)
        return prof
    i = inner[np.argmin(np.abs(y[inner] - y0))]
    res = minimize_scalar(lambda x: float(V(x)), bounds=(y[i - 1], y[i + 1]), method="bounded",
                          options={"xatol": 1e-7 * y[i]})
    ym = float(res.x)
    vmin = float(V(ym))
    curv = float(_stencil2(lambda x: float(V(x)), ym, 1e-3 * y0))
    if not curv > 0:
        if strict:
            raise TrapDestroyedError("non-positive curvature at the minimum", prof)
        return prof
    w = math.sqrt(curv / atom.mass)
    E = vmin + 0.5 * C.hbar * w
    prof.minimum_present = True
    prof.y_min, prof.V_min, prof.omega_r, prof.energy = ym, vmin, w, E

    # barrier top: highest sample between the surface end and the minimum
    j = int(np.argmax(vt[: i + 1]))
    if j == 0 or j == i:
        return prof
    res = minimize_scalar(lambda x: -float(V(x)), bounds=(y[j - 1], y[j + 1]), method="bounded",
                          options={"xatol": 1e-7 * y[j]})
    yt, vtop = float(res.x), float(V(res.x))
    prof.y_top, prof.V_top, prof.height = yt, vtop, vtop - vmin
    prof.local_maximum = vtop > vmin
    if vtop <= E:
        return prof
    below = np.flatnonzero(vt[:j] < E)
    if below.size == 0:
        return prof
    g = lambda x: float(V(x)) - E  # noqa: E731
    prof.y1 = brentq(g, y[below[-1]], yt, xtol=1e-15, rtol=1e-13)
    prof.y2 = brentq(g, yt, ym, xtol=1e-15, rtol=1e-13)
    prof.barrier_present = True
    return prof


def _wkb_exponent(V, y1, y2, E, mass):
    """``(2/hbar) Int_{y1}^{y2} sqrt(2 M (V - E)) dy`` with ``y = y1 + (y2-y1)(1-cos t)/2``."""
    half = 0.5 * (y2 - y1)

    def f(t):
        x = y1 + half * (1 - np.cos(t))
        d = np.maximum(np.asarray(V(x), dtype=float) - E, 0.0)
        return np.sqrt(2 * mass * d) * half * np.sin(t)

    r = integrate(f, 0.0, math.pi, rtol=1e-10, atol=0.0, initial_panels=4)
    return 2.0 / C.hbar * float(r.value)


def wkb_lifetime(profile: PotentialProfile, atom: AtomSpec) -> TunnelResult:
    """WKB transmission and ``tau_CP = 2 pi / (T omega_r)``.

    Without a barrier above the zero-point level the atom escapes in one
    oscillation period (``T = 1``).
    """
    if not profile.minimum_present:
        raise TrapDestroyedError("profile has no minimum")
    w = profile.omega_r
    if not profile.barrier_present:
        return TunnelResult(profile.y0, False, 1.0, w, 2 * math.pi / w, profile.energy, 0.0,
                            math.nan, profile.omega_r_gradient)
    V = profile.potential
    S = _wkb_exponent(V, profile.y1, profile.y2, profile.energy, atom.mass)
    # sensitivity diagnostic at E = V_min
    g = lambda x: float(V(x)) - profile.V_min  # noqa: E731
    lo = profile.y_surface[0]
    try:
        a = brentq(g, lo, profile.y_top, xtol=1e-15) if g(lo) < 0 else lo
        S0 = _wkb_exponent(V, a, profile.y_min, profile.V_min, atom.mass)
    except ValueError:
        S0 = math.nan
    T = math.exp(-S)
    tau = 2 * math.pi / (T * w) if T > 0 else math.inf
    return TunnelResult(profile.y0, True, T, w, tau, profile.energy, -S, -S0, profile.omega_r_gradient)


def trap_for(y0_surface: float, radius: float, current: float = DEFAULT_CURRENT,
             offset_field: float = DEFAULT_OFFSET) -> TrapConfig:
    return TrapConfig.from_surface_distance(current, y0_surface, offset_field, radius)


def _sweep_point(args):
    cp, atom, radius, y0, current, offset = args
    cfg = None
    try:
        cfg = trap_for(y0, radius, current, offset)
        prof = build_profile(cp, cfg, atom, radius)
        return wkb_lifetime(prof, atom)
    except TrapDestroyedError as exc:
        nan = math.nan
        return TunnelResult(y0, False, nan, nan, nan, nan, omega_r_gradient=trap_frequency_gradient(cfg, atom),
                            error=f"trap destroyed: {exc}")
    except Exception as exc:  # captured per point
        nan = math.nan
        return TunnelResult(y0, False, nan, nan, nan, nan, error=f"{type(exc).__name__}: {exc}")


def tunneling_sweep(response: NanotubeResponse, atom: AtomSpec, y0_list,
                    current: float = DEFAULT_CURRENT, offset_field: float = DEFAULT_OFFSET,
                    cp=None, jobs: int = 1) -> list[TunnelResult]:
    """Tunneling results per surface distance; the bias field is re-derived at each point.

    ``cp`` defaults to a :class:`CPInterpolant` for ``response``; it is built
    once before any worker processes start.
    """
    if cp is None:
        cp = CPInterpolant(response, atom)
    if isinstance(cp, CPInterpolant):
        cp(np.array([cp.y_min]))
    R = response.spec.radius
    tasks = [(cp, atom, R, float(y), current, offset_field) for y in y0_list]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]
