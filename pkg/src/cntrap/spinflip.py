"""Thermally assisted spin-flip rate of a trapped atom near the shell.

The zero-temperature rate is

    Gamma_0 = 2 mu0 (mu_B g_S)^2 / hbar
              * Sum_{q,k in (x,y)} <f|S_q|i><i|S_k|f> Im[curl G(r, r, omega0) curl']_qk

and the thermal rate is ``Gamma_0 (n_th + 1)``. At the trap centre the
curl-curl tensor is diagonal in ``(e_r, e_phi, e_z)``; the spin frame maps
``x`` and ``y`` onto two of those axes (``frame``), with the quantisation
axis along the wire.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import CONSTANTS as C
from .green import Shell, green_scattering, green_vacuum
from .material import NanotubeResponse
from .trap import AtomSpec, TrapConfig

__all__ = ["SpinFlipResult", "FRAMES", "thermal_occupation", "spin_flip_rate", "lifetime_sweep"]

# spin axis -> cylindrical index (0 = r, 1 = phi)
FRAMES = {"phi-r": (1, 0), "r-phi": (0, 1)}


@dataclass(frozen=True)
class SpinFlipResult:
    y0: float                   # m, from the tube surface
    gamma0: float               # 1/s
    n_th: float
    gamma_tot: float            # 1/s
    tau_sf: float               # s
    vacuum_contribution: float  # 1/s, zero-temperature
    n_used: int = 0
    error: str | None = None


def thermal_occupation(omega: float, temperature: float) -> float:
    return 1.0 / math.expm1(C.hbar * omega / (C.kB * temperature))


def _prefactor(atom: AtomSpec) -> float:
    return 2 * C.mu0 * (C.muB * atom.g_S) ** 2 / C.hbar


def spin_flip_rate(response: NanotubeResponse, cfg: TrapConfig | None, atom: AtomSpec,
                   y0: float, T_env: float, frame: str = "phi-r",
                   rtol: float = 1e-7) -> SpinFlipResult:
    """Spin-flip rate at surface distance ``y0`` (m) and environment temperature ``T_env`` (K)."""
    if not y0 > 0:
        raise ValueError("y0 must be positive")
    if not T_env > 0:
        raise ValueError("T_env must be positive")
    ix, iy = FRAMES[frame]
    f0 = atom.transition_frequency(cfg)
    if not f0 > 0:
        raise ValueError("transition frequency must be positive")
    w0 = 2 * math.pi * f0
    R = response.spec.radius
    point = (R + y0, 0.0, 0.0)
    shell = Shell.from_response(response)
    gs = green_scattering(point, point, w0, shell, flavor="curlcurl", rtol=rtol)
    gv = green_vacuum(point, point, w0, flavor="curlcurl", imag_only=True)
    pref = _prefactor(atom)

    def rate(t):
        im = np.imag(t)
        return pref * (atom.s_x ** 2 * im[ix, ix] + atom.s_y ** 2 * im[iy, iy])

    vac = rate(gv.tensor.data)
    gamma0 = rate(gs.tensor.data) + vac
    n_th = thermal_occupation(w0, T_env)
    gamma_tot = gamma0 * (n_th + 1.0)
    return SpinFlipResult(y0, float(gamma0), n_th, float(gamma_tot), float(1.0 / gamma_tot),
                          float(vac), gs.n_used)


def _sweep_point(args):
    response, cfg, atom, y0, T_env, frame = args
    try:
        return spin_flip_rate(response, cfg, atom, y0, T_env, frame)
    except Exception as exc:  # captured per point, the sweep continues
        nan = float("nan")
        return SpinFlipResult(y0, nan, nan, nan, nan, nan, 0, f"{type(exc).__name__}: {exc}")


def lifetime_sweep(response: NanotubeResponse, cfg: TrapConfig | None, atom: AtomSpec,
                   y0_list, T_env: float, frame: str = "phi-r", jobs: int = 1) -> list[SpinFlipResult]:
    """Spin-flip results for each surface distance in ``y0_list``, in input order."""
    tasks = [(response, cfg, atom, float(y), T_env, frame) for y in y0_list]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]
