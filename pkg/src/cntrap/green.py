"""Dyadic Green tensor of an infinitely long, zero-thickness conducting shell.

The tensor is split into the free-space part and the part scattered by the
shell. The shell carries an axial sheet conductance ``sigma`` (S) and has
radius ``R``. Outside the shell, only one coefficient survives (``C1V``),
and the scattered tensor is

    G_S(r, r') = i/(8 pi) Int dh Sum_n (2 - delta_n0)/eta^2 C1V(n, h)
                 Sum_{e,o} N^(1)(h; r) (x) N^(1)(-h; r')

with ``eta^2 = k^2 - h^2`` and cylindrical vector wave functions ``M``, ``N``
built on ``Z_n(eta r) {cos, sin}(n phi) exp(i h z) e_z``. The curl-curl
tensor ``curl G curl'`` follows from ``curl N = k M`` without numerical
differentiation.

Frequencies are complex: a real ``omega > 0`` or a purely imaginary
``omega = 1j * u``. Points are cylindrical triples ``(rho, phi, z)``.
Tensor rows refer to the local ``(e_r, e_phi, e_z)`` basis at the field
point, columns to the local basis at the source point.

Two evaluation paths exist for the scattered part:

``coincident``
    ``r == r'``, where the tensor is diagonal. The ``h`` integral is folded
    onto ``h >= 0`` and rewritten with exponentially scaled ``I_n``, ``K_n``
    (see :mod:`cntrap.kernels`).
``general``
    Arbitrary point pairs, with complex Bessel functions and full vector
    wave functions. Slower; it is the reference path for the fast one.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special as sp

from .core import CONSTANTS as C
from .core import Complex3x3
from .kernels import shell_blocks
from ._kernels_py import denominator as _denominator
from .quadrature import QuadratureError, integrate

__all__ = [
    "Shell",
    "GreenEval",
    "ReflectionCoefficients",
    "BoundarySystemError",
    "CoincidenceError",
    "GreenConvergenceError",
    "GuidedModeWarning",
    "axial_eta",
    "vector_wave_functions",
    "boundary_matrices",
    "solve_boundary_system",
    "c1v_closed_form",
    "green_vacuum",
    "green_scattering",
]

N_TOL = 1e-8
N_CAP = 200
_N_BLOCK = 6
_KAPPA_DECAY = 50.0   # integrate until exp(-2 kappa d) ~ exp(-100)


class BoundarySystemError(np.linalg.LinAlgError):
    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (condition number {condition:.3g})")
        self.condition = condition


class CoincidenceError(ValueError):
    pass


class GreenConvergenceError(RuntimeError):
    """Order truncation or ``h`` quadrature failed; ``partial`` holds the sum so far."""

    def __init__(self, message: str, partial=None, n_used: int = 0):
        super().__init__(message)
        self.partial = partial
        self.n_used = n_used


class GuidedModeWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class Shell:
    """Cylindrical conducting shell.

    ``conductance`` is either a constant sheet conductance (S) or a callable
    ``omega -> sigma_sheet(omega)`` accepting complex frequencies.
    """

    radius: float
    conductance: Callable[[complex], complex] | complex = 0.0

    def sigma(self, omega: complex) -> complex:
        c = self.conductance
        return complex(c(omega)) if callable(c) else complex(c)

    @classmethod
    def from_response(cls, response) -> "Shell":
        return cls(response.spec.radius, response.sheet_conductance)


@dataclass(frozen=True)
class GreenEval:
    r: tuple
    r_prime: tuple
    omega: complex
    tensor: Complex3x3
    part: str
    flavor: str
    n_used: int = 0
    error: float = 0.0


@dataclass(frozen=True)
class ReflectionCoefficients:
    n: int
    h: float
    omega: complex
    C1H: complex
    C2H: complex
    C3H: complex
    C4H: complex
    C1V: complex
    C2V: complex
    C3V: complex
    C4V: complex
    condition: float = float("nan")


# ---------------------------------------------------------------- helpers

def _wavenumber(omega) -> complex:
    omega = complex(omega)
    if omega.real > 0 and omega.imag == 0:
        return complex(omega.real / C.c)
    if omega.real == 0 and omega.imag > 0:
        return 1j * omega.imag / C.c
    raise ValueError(f"frequency must be real positive or imaginary positive, got {omega!r}")


def axial_eta(k: complex, h):
    """Radial wavenumber ``sqrt(k^2 - h^2)`` on the branch with ``Im eta >= 0``."""
    h = np.asarray(h, dtype=complex)
    eta = np.sqrt(k * k - h * h)
    return np.where(eta.imag < 0, -eta, eta)


def _cyl_pair(n: int, x, radial: str):
    x = np.asarray(x, dtype=complex)
    if radial == "J":
        return sp.jv(n, x), 0.5 * (sp.jv(n - 1, x) - sp.jv(n + 1, x))
    if radial == "H":
        return sp.hankel1(n, x), 0.5 * (sp.hankel1(n - 1, x) - sp.hankel1(n + 1, x))
    raise ValueError(f"unknown radial kind {radial!r}")


def vector_wave_functions(n: int, h, k: complex, point, radial: str = "H"):
    """Cylindrical vector wave functions at ``point = (rho, phi, z)``.

    Returns ``(M_e, M_o, N_e, N_o)``, each of shape ``h.shape + (3,)`` with
    components along ``(e_r, e_phi, e_z)``. ``radial`` selects ``J`` or
    ``H`` (outgoing Hankel) for ``Z_n``.
    """
    rho, phi, z = point
    h = np.asarray(h, dtype=complex)
    eta = axial_eta(k, h)
    with np.errstate(over="ignore", invalid="ignore"):
        Z, Zp = _cyl_pair(n, eta * rho, radial)
    ph = np.exp(1j * h * z)
    cn, sn = math.cos(n * phi), math.sin(n * phi)
    zero = np.zeros_like(Z)
    Me = np.stack([-(n / rho) * Z * sn, -eta * Zp * cn, zero], axis=-1)
    Mo = np.stack([(n / rho) * Z * cn, -eta * Zp * sn, zero], axis=-1)
    Ne = np.stack([1j * h * eta * Zp * cn, -(1j * h * n / rho) * Z * sn, eta * eta * Z * cn], axis=-1) / k
    No = np.stack([1j * h * eta * Zp * sn, (1j * h * n / rho) * Z * cn, eta * eta * Z * sn], axis=-1) / k
    ph = ph[..., None]
    return Me * ph, Mo * ph, Ne * ph, No * ph


# ---------------------------------------------------------------- boundary conditions

def boundary_matrices(n: int, h: float, omega, sigma_sheet: complex, radius: float,
                      parity: str = "e"):
    """The H-set and V-set linear systems ``(A_H, b_H, A_V, b_V)``.

    Unknowns are ordered ``(C1, C2, C3, C4)``. ``parity`` picks the upper
    (``"e"``) or lower (``"o"``) signs.
    """
    k = _wavenumber(omega)
    w = complex(omega)
    eta = complex(axial_eta(k, h))
    x = eta * radius
    J, Jp = (complex(v) for v in _cyl_pair(n, x, "J"))
    H, Hp = (complex(v) for v in _cyl_pair(n, x, "H"))
    s = 1.0 if parity == "e" else -1.0
    a = s * 1j * h * n / radius
    e2 = eta * eta
    load = 1j * w * C.mu0 * sigma_sheet * e2 / k * J
    AH = np.array([
        [0, -e2 / k * H, 0, e2 / k * J],
        [-eta * Hp, a / k * H, eta * Jp, -a / k * J],
        [-e2 * H, 0, e2 * J, 0],
        [-a * H, -k * eta * Hp, a * J, k * eta * Jp - load],
    ], dtype=complex)
    bH = np.array([0, eta * Jp, e2 * J, a * J], dtype=complex)
    AV = np.array([
        [-e2 / k * H, 0, e2 / k * J, 0],
        [-a / k * H, -eta * Hp, a / k * J, eta * Jp],
        [0, -e2 * H, 0, e2 * J],
        [-k * eta * Hp, a * H, k * eta * Jp - load, -a * J],
    ], dtype=complex)
    bV = np.array([e2 / k * J, a / k * J, 0, k * eta * Jp], dtype=complex)
    return AH, bH, AV, bV


def _shell_load(n: int, h: float, omega, sigma_sheet: complex, radius: float) -> complex:
    k = _wavenumber(omega)
    eta = complex(axial_eta(k, h))
    J = complex(sp.jv(n, eta * radius))
    return 1j * complex(omega) * C.mu0 * sigma_sheet * eta * eta / k * J


def _equilibrated_solve(A, b, max_condition: float):
    A = A.copy()
    rows = np.ones(4)
    cols = np.ones(4)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for _ in range(4):
            rmax = np.max(np.abs(A), axis=1)
            if np.any(rmax == 0) or not np.all(np.isfinite(rmax)):
                raise BoundarySystemError("singular boundary system", float("inf"))
            A /= rmax[:, None]
            rows /= rmax
            cmax = np.max(np.abs(A), axis=0)
            if np.any(cmax == 0) or not np.all(np.isfinite(A)):
                raise BoundarySystemError("singular boundary system", float("inf"))
            A /= cmax[None, :]
            cols /= cmax
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(rows)) and np.all(np.isfinite(cols))):
            raise BoundarySystemError("boundary system outside double range", float("inf"))
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > max_condition:
        raise BoundarySystemError("ill-conditioned boundary system", cond)
    y = np.linalg.solve(A, b * rows)
    return y * cols, cond


def solve_boundary_system(n: int, h: float, omega, sigma_sheet: complex,
                          radius: float, max_condition: float = 1e13) -> ReflectionCoefficients:
    """Solve both 4x4 systems numerically for all eight coefficients.

    The systems are solved for the deviation from the shell-free solution
    (``C3 = 1``, all others zero) so that weak-coupling coefficients keep
    full relative accuracy. The deviation right-hand sides are formed
    analytically: zero for the H-set, the shell load in the last row for
    the V-set.
    """
    k = _wavenumber(omega)
    if abs(axial_eta(k, h)) == 0:
        raise BoundarySystemError("eta = 0: boundary system is singular", float("inf"))
    AH, bH, AV, bV = boundary_matrices(n, h, omega, sigma_sheet, radius)
    rhsH = np.zeros(4, dtype=complex)
    rhsV = np.zeros(4, dtype=complex)
    rhsV[3] = _shell_load(n, h, omega, sigma_sheet, radius)
    xH, cH = _equilibrated_solve(AH, rhsH, max_condition)
    xV, cV = _equilibrated_solve(AV, rhsV, max_condition)
    return ReflectionCoefficients(
        n, h, complex(omega),
        complex(xH[0]), complex(xH[1]), complex(1 + xH[2]), complex(xH[3]),
        complex(xV[0]), complex(xV[1]), complex(1 + xV[2]), complex(xV[3]),
        max(cH, cV),
    )


def c1v_closed_form(n: int, h, omega, sigma_sheet: complex, radius: float):
    """Closed-form ``C1V`` derived with ``J H' - J' H = 2i/(pi x)``.

    ``-pi mu0 omega R sigma eta^2 J_n^2 / (2 k^2 + pi mu0 omega R sigma eta^2 J_n H_n)``,
    Bessel arguments ``eta R``. Valid for real and imaginary frequencies.
    """
    k = _wavenumber(omega)
    eta = axial_eta(k, h)
    x = eta * radius
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        J = sp.jv(n, x)
        H = sp.hankel1(n, x)
        A = math.pi * C.mu0 * complex(omega) * radius * sigma_sheet * eta * eta
        out = -A * J * J / (2 * k * k + A * J * H)
    return out if np.ndim(out) else complex(out)


# ---------------------------------------------------------------- vacuum

def _cart(point):
    rho, phi, z = point
    return np.array([rho * math.cos(phi), rho * math.sin(phi), z])


def _frame(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def _same_point(r, rp) -> bool:
    return np.allclose(_cart(r), _cart(rp), rtol=0, atol=1e-18)


def _vacuum_closed(r, rp, k: complex, flavor: str) -> np.ndarray:
    d = _cart(r) - _cart(rp)
    dist = float(np.linalg.norm(d))
    u = d / dist
    x = k * dist
    g = np.exp(1j * x) / (4 * math.pi * dist)
    a = 1 + 1j / x - 1 / x ** 2
    b = 3 / x ** 2 - 3j / x - 1
    G = g * (a * np.eye(3) + b * np.outer(u, u))
    if flavor == "curlcurl":
        G = k * k * G
    return _frame(r[1]) @ G @ _frame(rp[1]).T


def _vacuum_expansion(r, rp, k: complex, flavor: str, imag_only: bool, rtol: float):
    """Free-space tensor from the cylindrical-wave expansion (real ``omega`` only)."""
    if k.imag != 0:
        raise ValueError("the cylindrical expansion of the vacuum tensor needs real omega")
    k = k.real
    coincident = _same_point(r, rp)
    if imag_only and not coincident:
        G, n_used, err = _vacuum_expansion(r, rp, k, flavor, False, rtol)
        return 1j * G.imag, n_used, err
    if imag_only:
        # Only J J products survive in Im G at coincidence, over |h| < k.
        outer, inner = "J", "J"
    else:
        outer, inner = "H", "J"
    swap = r[0] < rp[0]
    ra, rb = (rp, r) if swap else (r, rp)

    def pair_sum(n, h):
        with np.errstate(all="ignore"):
            return _pair_sum(n, h)

    def _pair_sum(n, h):
        Wa = vector_wave_functions(n, h, k, ra, outer)
        Wb = vector_wave_functions(n, -h, k, rb, inner)
        Ma, Mb = Wa[:2], Wb[:2]
        Na, Nb = Wa[2:], Wb[2:]
        if flavor == "curlcurl":
            Ma, Na = Na, Ma
            Mb, Nb = Nb, Mb
        t = sum(np.einsum("...i,...j->...ij", Ma[p], Mb[p]) + np.einsum("...i,...j->...ij", Na[p], Nb[p])
                for p in range(2))
        eta2 = axial_eta(k, h) ** 2
        t = t / eta2[..., None, None]
        if swap:
            t = np.swapaxes(t, -1, -2)
        if n > 0:
            # single Bessel factors out of double range only occur at orders
            # far below the truncation threshold
            t = np.where(np.isfinite(t), t, 0.0)
        return t * (1.0 if n == 0 else 2.0)

    if imag_only:
        def f(theta, n0, n1):
            h = k * np.sin(theta)
            jac = k * np.cos(theta)
            out = [pair_sum(n, h) * jac[:, None, None] for n in range(n0, n1)]
            return np.stack(out, axis=1).reshape(theta.size, -1)
        pref = 1.0 / (8 * math.pi)
    else:
        d = max(abs(r[0] - rp[0]), abs(r[2] - rp[2]), 1e-300)
        kmax = _KAPPA_DECAY * 2 / max(d, 1e-300)
        smax = math.asinh(kmax / k)

        def f_prop(theta, n0, n1):
            h = k * np.sin(theta)
            jac = k * np.cos(theta)
            out = [pair_sum(n, h) * jac[:, None, None] for n in range(n0, n1)]
            return np.stack(out, axis=1).reshape(theta.size, -1)

        def f_ev(s, n0, n1):
            h = k * np.cosh(s)
            jac = k * np.sinh(s)
            out = [(pair_sum(n, h) + pair_sum(n, -h)) * jac[:, None, None] for n in range(n0, n1)]
            return np.stack(out, axis=1).reshape(s.size, -1)
        pref = 1j / (8 * math.pi)

    def block(n0, n1):
        if imag_only:
            res = integrate(lambda t: f(t, n0, n1), -0.5 * math.pi, 0.5 * math.pi,
                            rtol=rtol, initial_panels=4)
            return res.value.reshape(n1 - n0, 3, 3), res.error
        r1 = integrate(lambda t: f_prop(t, n0, n1), -0.5 * math.pi, 0.5 * math.pi,
                       rtol=rtol, initial_panels=4)
        r2 = integrate(lambda s: f_ev(s, n0, n1), 0.0, smax, rtol=rtol,
                       initial_panels=8, max_panels=20000)
        return (r1.value + r2.value).reshape(n1 - n0, 3, 3), r1.error + r2.error

    total, n_used, err = _order_sum(block, 8)
    G = pref * total * (k * k if flavor == "curlcurl" else 1.0)
    if imag_only:
        G = 1j * G.real
    return G, n_used, err


def green_vacuum(r, r_prime, omega, flavor: str = "electric", imag_only: bool = False,
                 method: str = "closed", rtol: float = 1e-9) -> GreenEval:
    """Free-space dyadic Green tensor (or its curl-curl).

    At ``r == r'`` only ``imag_only=True`` is defined; the result is
    ``i k/(6 pi) I`` (electric) or ``i k^3/(6 pi) I`` (curl-curl).
    ``method="expansion"`` uses the cylindrical-wave expansion instead of the
    closed form (cross-check mode, real frequencies).
    """
    _check_flavor(flavor)
    k = _wavenumber(omega)
    coincident = _same_point(r, r_prime)
    if coincident and not imag_only:
        raise CoincidenceError("the vacuum tensor diverges at r = r'; request imag_only=True")
    if imag_only and k.imag != 0:
        raise ValueError("imag_only is meaningful for real frequencies only")
    n_used, err = 0, 0.0
    if method == "closed":
        if coincident:
            val = k.real / (6 * math.pi) * (k.real ** 2 if flavor == "curlcurl" else 1.0)
            data = 1j * val * np.eye(3)
        else:
            data = _vacuum_closed(r, r_prime, k, flavor)
            if imag_only:
                data = 1j * data.imag
    elif method == "expansion":
        data, n_used, err = _vacuum_expansion(r, r_prime, k, flavor, imag_only, rtol)
    else:
        raise ValueError(f"unknown method {method!r}")
    return GreenEval(tuple(r), tuple(r_prime), complex(omega), Complex3x3(data, "cyl"),
                     "vacuum", flavor, n_used, err)


# ---------------------------------------------------------------- scattering

def _check_flavor(flavor: str) -> None:
    if flavor not in ("electric", "curlcurl"):
        raise ValueError(f"unknown flavor {flavor!r}")


def _order_sum(block, n_block: int, tol: float = N_TOL, n_cap: int = N_CAP):
    """Sum per-order contributions until the last two orders are negligible."""
    total = None
    err = 0.0
    n0 = 0
    while True:
        n1 = min(n0 + n_block, n_cap + 1)
        try:
            vals, e = block(n0, n1)
        except QuadratureError as exc:
            raise GreenConvergenceError(f"h quadrature failed at orders {n0}..{n1 - 1}: {exc}",
                                        total, n0) from exc
        err += e
        block_sum = vals.sum(axis=0)
        total = block_sum if total is None else total + block_sum
        scale = float(np.max(np.abs(total)))
        last = float(np.max(np.abs(vals[-2:]))) if vals.shape[0] >= 2 else float(np.max(np.abs(vals)))
        if scale == 0.0 or last < tol * scale:
            return total, n1, err
        if n1 > n_cap:
            raise GreenConvergenceError(f"order sum not converged by n = {n_cap}", total, n1)
        n0 = n1


def _guided_mode_check(kappa, n0, n1, R, gamma) -> None:
    den = np.abs(_denominator(kappa, n0, n1, R, gamma))
    for j in range(den.shape[1]):
        d = den[:, j]
        idx = np.nonzero((d[1:-1] < d[:-2]) & (d[1:-1] < d[2:]))[0] + 1
        for i in idx:
            lo, hi = max(0, i - 50), min(d.size, i + 51)
            if d[i] < 1e-6 * np.median(d[lo:hi]):
                warnings.warn(f"near-zero C1V denominator (guided mode) at order {n0 + j}, "
                              f"kappa = {kappa[i]:.4g} 1/m", GuidedModeWarning, stacklevel=3)


def _coincident_scattering(rho: float, omega: complex, shell: Shell, flavor: str, rtol: float):
    R = shell.radius
    k = _wavenumber(omega)
    sigma = shell.sigma(omega)
    d = rho - R
    kmax = _KAPPA_DECAY / d
    if k.imag == 0:
        k = k.real
        A = C.mu0 * omega.real * R * sigma
        beta = A / k ** 2
        gamma = 1j * A / k ** 2
        smax = math.asinh(kmax / k)
        if flavor == "electric":
            pref = 1j / (2 * math.pi ** 2 * k * k)
        else:
            pref = 1j * k * k / (2 * math.pi ** 2)
    else:
        q = k.imag
        B = C.mu0 * omega.imag * R * sigma.real
        beta = gamma = B / q ** 2
        smax = math.acosh(max(kmax / q, 1.0)) if kmax > q else 1.0
        if flavor == "electric":
            pref = -1.0 / (2 * math.pi ** 2 * q * q)
        else:
            pref = -q * q / (2 * math.pi ** 2)
    real_axis = not isinstance(k, complex)

    def ev(s, n0, n1):
        if real_axis:
            kap = k * np.sinh(s)
            h = k * np.cosh(s)
        else:
            kap = k.imag * np.cosh(s)
            h = k.imag * np.sinh(s)
        blk = shell_blocks(kap, n0, n1, R, rho, beta, gamma)
        jac = kap[:, None]
        out = np.empty(blk.shape, dtype=complex)
        if flavor == "electric":
            h2 = (h * h)[:, None]
            out[..., 0] = h2 * blk[..., 0] * jac
            out[..., 1] = h2 * blk[..., 1] * jac
            out[..., 2] = blk[..., 2] * jac
        else:
            out[..., 0] = blk[..., 1] * jac
            out[..., 1] = blk[..., 0] * jac
            out[..., 2] = 0.0
        return out.reshape(s.size, -1)

    def prop(theta, n0, n1):
        h = k * np.sin(theta)
        eta = k * np.cos(theta)
        out = np.zeros((theta.size, n1 - n0, 3), dtype=complex)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            for j, n in enumerate(range(n0, n1)):
                c1 = c1v_closed_form(n, h, omega, sigma, R)
                H, Hp = _cyl_pair(n, eta * rho, "H")
                w = (1.0 if n == 0 else 2.0) * eta
                if flavor == "electric":
                    t = np.stack([c1 * h * h * Hp * Hp,
                                  c1 * h * h * n * n * H * H / (eta * eta * rho * rho),
                                  c1 * eta * eta * H * H], axis=-1)
                else:
                    t = np.stack([c1 * n * n * H * H / (eta * eta * rho * rho),
                                  c1 * Hp * Hp, 0 * H], axis=-1)
                t = t * w[:, None]
                if n > 0:
                    t = np.where(np.isfinite(t), t, 0.0)
                out[:, j] = t
        return out.reshape(theta.size, -1)

    # propagating prefactor: i/(4 pi k^2) electric, i k^2/(4 pi) curl-curl
    prop_pref = pref * math.pi / 2

    s_breaks = []
    scale = abs(k)
    for kap0 in (1.0 / d, 0.1 / d, 1.0 / math.sqrt(abs(gamma)) if gamma != 0 else 0.0):
        if kap0 > 0:
            s = math.asinh(kap0 / scale) if real_axis else math.acosh(max(kap0 / scale, 1.0))
            if 0 < s < smax:
                s_breaks.append(s)

    def block(n0, n1):
        res = integrate(lambda s: ev(s, n0, n1), 0.0, smax, rtol=rtol, breakpoints=s_breaks,
                        initial_panels=4, max_panels=8000)
        vals = pref * res.value.reshape(n1 - n0, 3)
        err = abs(pref) * res.error
        if real_axis:
            rp = integrate(lambda t: prop(t, n0, n1), 0.0, 0.5 * math.pi, rtol=rtol,
                           initial_panels=2)
            vals = vals + prop_pref * rp.value.reshape(n1 - n0, 3)
            err += abs(prop_pref) * rp.error
        return vals, err

    if sigma == 0:
        return np.zeros((3, 3), dtype=complex), 0, 0.0
    total, n_used, err = _order_sum(block, _N_BLOCK)
    if real_axis:
        kap = k * np.sinh(np.linspace(0, smax, 4001)[1:])
        _guided_mode_check(kap, 0, n_used, R, gamma)
    return np.diag(total), n_used, err


def _general_scattering(r, rp, omega: complex, shell: Shell, flavor: str, rtol: float):
    R = shell.radius
    k = _wavenumber(omega)
    sigma = shell.sigma(omega)
    if sigma == 0:
        return np.zeros((3, 3), dtype=complex), 0, 0.0
    real_axis = k.imag == 0
    d = 0.5 * (r[0] + rp[0]) - R
    kmax = _KAPPA_DECAY / d

    def terms(n, h):
        c1 = c1v_closed_form(n, h, omega, sigma, R)
        Wa = vector_wave_functions(n, h, k, r, "H")
        Wb = vector_wave_functions(n, -h, k, rp, "H")
        if flavor == "electric":
            A, B = Wa[2:], Wb[2:]
            fac = 1.0
        else:
            A, B = Wa[:2], Wb[:2]
            fac = k * k
        t = sum(np.einsum("...i,...j->...ij", A[p], B[p]) for p in range(2))
        eta2 = axial_eta(k, h) ** 2
        t = t * (fac * c1 / eta2)[..., None, None] * (1.0 if n == 0 else 2.0)
        if n > 0:
            t = np.where(np.isfinite(t), t, 0.0)
        return t

    if real_axis:
        kr = k.real
        smax = math.asinh(kmax / kr)

        def ev(s, n0, n1):
            h = kr * np.cosh(s)
            jac = (kr * np.sinh(s))[:, None, None]
            with np.errstate(all="ignore"):
                out = [(terms(n, h) + terms(n, -h)) * jac for n in range(n0, n1)]
            return np.stack(out, axis=1).reshape(s.size, -1)

        def prop(theta, n0, n1):
            h = kr * np.sin(theta)
            jac = (kr * np.cos(theta))[:, None, None]
            with np.errstate(all="ignore"):
                out = [terms(n, h) * jac for n in range(n0, n1)]
            return np.stack(out, axis=1).reshape(theta.size, -1)

        def block(n0, n1):
            a = integrate(lambda s: ev(s, n0, n1), 0.0, smax, rtol=rtol, initial_panels=8,
                          max_panels=20000)
            b = integrate(lambda t: prop(t, n0, n1), -0.5 * math.pi, 0.5 * math.pi, rtol=rtol,
                          initial_panels=4)
            return (a.value + b.value).reshape(n1 - n0, 3, 3), a.error + b.error
    else:
        q = k.imag
        smax = math.acosh(max(kmax / q, 1.0)) if kmax > q else 1.0

        def ev(s, n0, n1):
            h = q * np.sinh(s)
            jac = (q * np.cosh(s))[:, None, None]
            with np.errstate(all="ignore"):
                out = [terms(n, h) * jac for n in range(n0, n1)]
            return np.stack(out, axis=1).reshape(s.size, -1)

        def block(n0, n1):
            a = integrate(lambda s: ev(s, n0, n1), -smax, smax, rtol=rtol, initial_panels=16,
                          max_panels=20000)
            return a.value.reshape(n1 - n0, 3, 3), a.error

    total, n_used, err = _order_sum(block, 4)
    return 1j / (8 * math.pi) * total, n_used, err / (8 * math.pi)


def green_scattering(r, r_prime, omega, shell: Shell, flavor: str = "electric",
                     part: str = "scattering", rtol: float = 1e-7, method: str = "auto",
                     vacuum_imag_only: bool = False) -> GreenEval:
    """Scattering (or total) Green tensor of the shell.

    ``part="total"`` adds the closed-form vacuum tensor; at ``r == r'`` this
    requires ``vacuum_imag_only=True`` (only the finite imaginary part of
    the free-space tensor is added). ``method`` is ``"auto"``,
    ``"coincident"`` or ``"general"``.
    """
    _check_flavor(flavor)
    if part not in ("scattering", "total", "vacuum"):
        raise ValueError(f"unknown part {part!r}")
    for p in (r, r_prime):
        if not p[0] > shell.radius:
            raise ValueError("field and source points must lie outside the shell")
    omega = complex(omega)
    if part == "vacuum":
        return green_vacuum(r, r_prime, omega, flavor, imag_only=vacuum_imag_only)
    coincident = _same_point(r, r_prime)
    if method == "auto":
        method = "coincident" if coincident else "general"
    if method == "coincident":
        if not coincident:
            raise ValueError("coincident method requested for distinct points")
        data, n_used, err = _coincident_scattering(r[0], omega, shell, flavor, rtol)
    elif method == "general":
        data, n_used, err = _general_scattering(r, r_prime, omega, shell, flavor, rtol)
    else:
        raise ValueError(f"unknown method {method!r}")
    if part == "total":
        vac = green_vacuum(r, r_prime, omega, flavor, imag_only=vacuum_imag_only)
        data = data + vac.tensor.data
    return GreenEval(tuple(r), tuple(r_prime), omega, Complex3x3(data, "cyl"), part, flavor,
                     n_used, err)
