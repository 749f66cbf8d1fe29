"""Cylinder functions J_n, H_n^(1), I_n, K_n with first derivatives.

Values come from the AMOS routines exposed by :mod:`scipy.special`.
Derivatives use the standard three-term relations, so they are consistent
with the values to rounding. ``modified_i_k`` can return exponentially
scaled values, which is how the Green-tensor integrands consume them:
``I_n(x) K_n(x)`` is formed from the scaled factors and stays finite where
``I_n`` alone overflows.

All functions accept scalars or numpy arrays for ``x``.
"""
from __future__ import annotations

import numpy as np
from scipy import special as sp

__all__ = [
    "bessel_j",
    "hankel1",
    "modified_i_k",
    "ik_product",
    "cylinder_pair",
]


def _check_order(n) -> None:
    if np.any(np.asarray(n) < 0):
        raise ValueError("order n must be non-negative")


def _check_positive(x, name: str) -> None:
    xa = np.asarray(x)
    if np.iscomplexobj(xa) or np.any(~(xa > 0)):
        raise ValueError(f"{name} requires real x > 0, got {x!r}")


def bessel_j(n, x):
    """Return ``(J_n(x), J_n'(x))`` for real ``x``."""
    _check_order(n)
    x = np.asarray(x, dtype=float)
    value = sp.jv(n, x)
    deriv = 0.5 * (sp.jv(np.asarray(n) - 1, x) - sp.jv(np.asarray(n) + 1, x))
    return value, deriv


def hankel1(n, x):
    """Return ``(H_n^(1)(x), H_n^(1)'(x))`` for real ``x > 0``."""
    _check_order(n)
    _check_positive(x, "hankel1")
    x = np.asarray(x, dtype=float)
    value = sp.hankel1(n, x)
    deriv = 0.5 * (sp.hankel1(np.asarray(n) - 1, x) - sp.hankel1(np.asarray(n) + 1, x))
    return value, deriv


def modified_i_k(n, x, scaled: bool = False):
    """Return ``(I_n, I_n', K_n, K_n')`` at real ``x > 0``.

    With ``scaled=True`` the I pair is multiplied by ``exp(-x)`` and the
    K pair by ``exp(x)``.
    """
    _check_order(n)
    _check_positive(x, "modified_i_k")
    x = np.asarray(x, dtype=float)
    n = np.asarray(n)
    if scaled:
        i_fun, k_fun = sp.ive, sp.kve
    else:
        i_fun, k_fun = sp.iv, sp.kv
    iv = i_fun(n, x)
    ip = 0.5 * (i_fun(n - 1, x) + i_fun(n + 1, x))
    kv = k_fun(n, x)
    kp = -0.5 * (k_fun(n - 1, x) + k_fun(n + 1, x))
    return iv, ip, kv, kp


def ik_product(n, x):
    """``I_n(x) K_n(x)`` evaluated from scaled factors."""
    _check_order(n)
    _check_positive(x, "ik_product")
    return sp.ive(n, x) * sp.kve(n, x)


def cylinder_pair(n: int, z):
    """``(J_n(z), J_n'(z), H_n(z), H_n'(z))`` for complex ``z``.

    Internal helper for the reference (general-point) Green-tensor path,
    where the radial argument ``eta * r`` is real or purely imaginary.
    """
    z = np.asarray(z, dtype=complex)
    j = sp.jv(n, z)
    jp = 0.5 * (sp.jv(n - 1, z) - sp.jv(n + 1, z))
    h = sp.hankel1(n, z)
    hp = 0.5 * (sp.hankel1(n - 1, z) - sp.hankel1(n + 1, z))
    return j, jp, h, hp
