"""Backend selection for the shell Green-tensor integrand.

``shell_blocks(kappa, n0, n1, R, r, beta, gamma)`` returns a complex array of
shape ``(len(kappa), n1 - n0, 3)`` holding, for each node ``kappa`` and order
``n``, the three radial building blocks of the coincident-point scattering
tensor

    a1 = w F K_n'(kr)^2 kappa^2,
    a2 = w F K_n(kr)^2 n^2 / r^2,
    a3 = w F K_n(kr)^2 kappa^4,

with ``F = beta I_n(kR)^2 / (1 + gamma kappa^2 I_n(kR) K_n(kR))`` and the
degeneracy weight ``w = 2 - delta_n0``. Exponentially scaled Bessel
functions keep every product finite; where single factors leave double range
the leading small-argument forms are used instead (those orders are far below
any truncation threshold).

The compiled extension is used when importable unless the environment
variable ``CNTRAP_PURE_PYTHON`` is set to a non-empty value other than ``0``.
"""
from __future__ import annotations

import os

from . import _kernels_py

__all__ = ["shell_blocks", "BACKEND"]

_force_py = os.environ.get("CNTRAP_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    shell_blocks = _kernels_py.shell_blocks
    BACKEND = "python"
else:
    try:
        from ._kernels import shell_blocks  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        shell_blocks = _kernels_py.shell_blocks
        BACKEND = "python"
