"""Pure numpy implementation of the shell integrand kernel.

Reference backend, and the one used when the compiled extension is absent.
See :func:`cntrap.kernels.shell_blocks` for the contract. Orders are filled
by the same recurrences as the compiled version, vectorised over nodes.
"""
from __future__ import annotations

import numpy as np
from scipy import special as sp

_BIG = 1e280
_TINY = 1e-250


def _k_upward(x, top: int):
    kv = np.empty((top + 1,) + x.shape)
    kv[0] = sp.kve(0, x)
    if top >= 1:
        kv[1] = sp.kve(1, x)
    for n in range(1, top):
        kv[n + 1] = kv[n - 1] + (2.0 * n / x) * kv[n]
    return kv


def _i_downward(x, lo: int, hi: int):
    span = hi - lo
    iv = np.empty((span + 1,) + x.shape)
    iv[span] = sp.ive(hi, x)
    if span == 0:
        return iv
    iv[span - 1] = sp.ive(hi - 1, x)
    for n in range(hi - 1, lo, -1):
        j = n - lo
        iv[j - 1] = iv[j + 1] + (2.0 * n / x) * iv[j]
    direct = iv[span] < _TINY
    if np.any(direct):
        for j in range(span - 1):
            iv[j, direct] = sp.ive(lo + j, x[direct])
    return iv


def shell_blocks(kappa, n0: int, n1: int, R: float, r: float, beta: complex, gamma: complex):
    kappa = np.ascontiguousarray(kappa, dtype=float)
    xR = kappa * R
    xr = kappa * r
    with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
        kvr = _k_upward(xr, n1)
        kvR = _k_upward(xR, n1)
        ivR = _i_downward(xR, n0, n1)
        n = np.arange(n0, n1)
        iR = ivR[:-1].T
        kR = kvR[n0:n1].T
        kr = kvr[n0:n1].T
        kpr = np.where(n == 0, -kvr[1][:, None],
                       -0.5 * (kvr[np.maximum(n - 1, 0)] + kvr[n + 1]).T)
        damp = np.exp(-2.0 * kappa * (r - R))[:, None]
        p2 = (iR * kr) ** 2 * damp
        p2d = (iR * kpr) ** 2 * damp
        ikR = iR * kR

        ok = (iR > _TINY) & (np.abs(kr) < _BIG) & (np.abs(kpr) < _BIG) & (np.abs(kR) < _BIG)
        bad = (n > 0) & ~ok
        if np.any(bad):
            nn = np.where(n > 0, n, 1).astype(float)
            ratio = (R / r) ** (2 * nn)
            p2 = np.where(bad, ratio / (4 * nn * nn), p2)
            p2d = np.where(bad, ratio / (4 * xr[:, None] ** 2), p2d)
            ikR = np.where(bad, 1.0 / (2 * nn), ikR)

    k2 = (kappa * kappa)[:, None]
    common = np.where(n == 0, 1.0, 2.0) * beta / (1.0 + gamma * k2 * ikR)
    out = np.empty(kappa.shape + (n1 - n0, 3), dtype=complex)
    out[..., 0] = common * k2 * p2d
    out[..., 1] = common * n * n * p2 / (r * r)
    out[..., 2] = common * k2 * k2 * p2
    return out


def denominator(kappa, n0: int, n1: int, R: float, gamma: complex):
    """``1 + gamma kappa^2 I_n(kappa R) K_n(kappa R)``, shape ``(m, n1 - n0)``."""
    kappa = np.asarray(kappa, dtype=float)[:, None]
    n = np.arange(n0, n1, dtype=float)[None, :]
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        ik = sp.ive(n, kappa * R) * sp.kve(n, kappa * R)
        ik = np.where(np.isfinite(ik) & (ik > 0), ik, 1.0 / (2 * np.maximum(n, 1)))
    return 1.0 + gamma * kappa * kappa * ik
