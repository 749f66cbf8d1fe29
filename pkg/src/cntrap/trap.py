"""Side-guide magnetic trap: wire field plus bias and offset fields.

Distances ``y`` passed to the field functions are measured from the wire
axis. Reporting elsewhere uses the distance from the tube surface,
``y_surface = y - R``; :meth:`TrapConfig.from_surface_distance` converts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import CONSTANTS as C

__all__ = [
    "TrapConfig",
    "AtomSpec",
    "NotTrappableError",
    "field_magnitude",
    "zeeman_potential",
    "harmonic_potential",
    "trap_frequency_gradient",
    "larmor_frequency",
]


class NotTrappableError(ValueError):
    pass


@dataclass(frozen=True)
class TrapConfig:
    """Wire current ``current`` (A), bias ``bias_field`` and offset ``offset_field`` (T)."""

    current: float
    bias_field: float
    offset_field: float

    def __post_init__(self):
        for name in ("current", "bias_field", "offset_field"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_trap_distance(cls, current: float, y0: float, offset_field: float) -> "TrapConfig":
        """Bias field placing the field zero at axis distance ``y0``."""
        if not y0 > 0:
            raise ValueError("y0 must be positive")
        return cls(current, C.mu0 * current / (2 * math.pi * y0), offset_field)

    @classmethod
    def from_surface_distance(cls, current: float, y0_surface: float, offset_field: float,
                              radius: float) -> "TrapConfig":
        return cls.from_trap_distance(current, y0_surface + radius, offset_field)

    @property
    def y0(self) -> float:
        """Axis distance of the field minimum (m)."""
        return C.mu0 * self.current / (2 * math.pi * self.bias_field)

    @property
    def gradient(self) -> float:
        """``b' = -2 pi B_b^2 / (mu0 I)`` (T/m)."""
        return -2 * math.pi * self.bias_field ** 2 / (C.mu0 * self.current)

    def y0_surface(self, radius: float) -> float:
        return self.y0 - radius


@dataclass(frozen=True)
class AtomSpec:
    """Trapped atom in a Zeeman sublevel.

    ``f0`` is the spin-flip transition frequency (Hz); ``None`` means it is
    derived from the trap offset field. ``d2_dipole`` is in C m.
    """

    mass: float
    g_F: float
    m_F: int
    g_S: float = 2.00231930436
    f0: float | None = None
    d2_wavelength: float = 780e-9
    d2_dipole: float = 4.227 * C.e * C.a0
    s_x: float = 0.25
    s_y: float = 0.25

    @classmethod
    def rb87(cls, **overrides) -> "AtomSpec":
        """87Rb in |F=2, m_F=2>."""
        base = cls(mass=86.909180527 * C.amu, g_F=0.5, m_F=2)
        return replace(base, **overrides)

    @property
    def trappable(self) -> bool:
        return self.g_F * self.m_F > 0

    @property
    def omega_d2(self) -> float:
        return 2 * math.pi * C.c / self.d2_wavelength

    def transition_frequency(self, cfg: TrapConfig | None = None) -> float:
        """``f0`` in Hz, from the explicit value or the offset field."""
        if self.f0 is not None:
            return self.f0
        if cfg is None:
            raise ValueError("f0 not set and no trap configuration to derive it from")
        return larmor_frequency(cfg.offset_field, self.g_F)


def larmor_frequency(field: float, g_F: float = 0.5) -> float:
    """Splitting of adjacent Zeeman sublevels, ``|g_F| mu_B B / h`` (Hz)."""
    return abs(g_F) * C.muB * field / C.h


def field_magnitude(cfg: TrapConfig, y):
    """Exact ``|B|`` (T) at axis distance ``y`` along the line through the trap centre."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("y must be positive")
    wire = C.mu0 * cfg.current / (2 * math.pi * y)
    return np.sqrt(cfg.offset_field ** 2 + (wire - cfg.bias_field) ** 2)


def zeeman_potential(cfg: TrapConfig, atom: AtomSpec, y):
    """``g_F m_F mu_B |B|(y)`` in joules."""
    if not atom.trappable:
        raise NotTrappableError(f"g_F m_F = {atom.g_F * atom.m_F} is not low-field seeking")
    return atom.g_F * atom.m_F * C.muB * field_magnitude(cfg, y)


def trap_frequency_gradient(cfg: TrapConfig, atom: AtomSpec) -> float:
    """Radial frequency of the linearised trap, ``sqrt(g_F m_F mu_B/(M B_o)) |b'|`` (rad/s)."""
    if not atom.trappable:
        raise NotTrappableError("state is not low-field seeking")
    return math.sqrt(atom.g_F * atom.m_F * C.muB / (atom.mass * cfg.offset_field)) * abs(cfg.gradient)


def harmonic_potential(cfg: TrapConfig, atom: AtomSpec, y):
    """Second-order expansion of :func:`zeeman_potential` about ``y0``."""
    w = trap_frequency_gradient(cfg, atom)
    v0 = atom.g_F * atom.m_F * C.muB * cfg.offset_field
    return v0 + 0.5 * atom.mass * w * w * (np.asarray(y, dtype=float) - cfg.y0) ** 2
