"""Physical constants and 3x3 complex tensors.

All quantities in this package are SI. The constant table below is frozen
(CODATA 2018 exact/recommended values) so results do not drift with the
installed scipy version.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "Complex3x3",
    "BasisMismatchError",
    "trace",
    "hermitian_defect",
]


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34        # J s
    h: float = 6.62607015e-34            # J s
    c: float = 299792458.0               # m / s
    eps0: float = 8.8541878128e-12       # F / m
    mu0: float = 1.25663706212e-6        # H / m
    kB: float = 1.380649e-23             # J / K
    muB: float = 9.2740100783e-24        # J / T
    e: float = 1.602176634e-19           # C
    a0: float = 5.29177210903e-11        # m
    m: float = 9.1093837015e-31          # kg, electron mass
    amu: float = 1.66053906660e-27       # kg


CONSTANTS = PhysicalConstants()

_BASES = ("cyl", "cart")


class BasisMismatchError(ValueError):
    pass


class Complex3x3:
    """A 3x3 complex tensor tagged with the basis its indices refer to.

    ``basis`` is ``"cyl"`` for (r, phi, z) or ``"cart"`` for (x, y, z).
    """

    __slots__ = ("data", "basis")

    def __init__(self, data, basis: str = "cyl"):
        if basis not in _BASES:
            raise ValueError(f"unknown basis {basis!r}")
        arr = np.array(data, dtype=complex)
        if arr.shape != (3, 3):
            raise ValueError(f"expected a 3x3 array, got shape {arr.shape}")
        self.data = arr
        self.basis = basis

    @classmethod
    def zeros(cls, basis: str = "cyl") -> "Complex3x3":
        return cls(np.zeros((3, 3)), basis)

    @classmethod
    def identity(cls, basis: str = "cyl") -> "Complex3x3":
        return cls(np.eye(3), basis)

    @classmethod
    def diag(cls, values, basis: str = "cyl") -> "Complex3x3":
        return cls(np.diag(np.asarray(values, dtype=complex)), basis)

    def _check(self, other: "Complex3x3") -> None:
        if not isinstance(other, Complex3x3):
            raise TypeError("operand must be Complex3x3")
        if other.basis != self.basis:
            raise BasisMismatchError(f"{self.basis} vs {other.basis}")

    def __add__(self, other):
        self._check(other)
        return Complex3x3(self.data + other.data, self.basis)

    def __sub__(self, other):
        self._check(other)
        return Complex3x3(self.data - other.data, self.basis)

    def __matmul__(self, other):
        self._check(other)
        return Complex3x3(self.data @ other.data, self.basis)

    def __mul__(self, scalar):
        return Complex3x3(self.data * scalar, self.basis)

    __rmul__ = __mul__

    def __getitem__(self, idx):
        return self.data[idx]

    @property
    def T(self) -> "Complex3x3":
        return Complex3x3(self.data.T, self.basis)

    @property
    def real(self) -> np.ndarray:
        return self.data.real

    @property
    def imag(self) -> np.ndarray:
        return self.data.imag

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def __repr__(self) -> str:
        return f"Complex3x3({self.data!r}, basis={self.basis!r})"


def trace(t: Complex3x3) -> complex:
    return complex(np.trace(t.data))


def hermitian_defect(t: Complex3x3) -> float:
    """Largest ``|t_ij - t_ji|``; a transpose (not conjugate) defect."""
    d = t.data
    return float(np.max(np.abs(d - d.T)))
