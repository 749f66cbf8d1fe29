"""Run configuration: sectioned INI files with units encoded in key names.

Example::

    [nanotube]
    a = 9
    b = 0
    radius_nm = 0.352
    mode = calibrated

    [trap]
    current_uA = 20
    offset_field_mT = 0.01     ; or f0_kHz
    y0_nm = 150                ; or bias_field_mT

    [environment]
    temperature_K = 380

The resolved configuration keeps the keys that were actually given, so the
echo written into every CSV header parses back to an identical object.
"""
from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .core import CONSTANTS as C
from .material import NanotubeResponse, NanotubeSpec
from .trap import AtomSpec, TrapConfig, larmor_frequency

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "ECHO_BEGIN", "ECHO_END",
           "echo_lines", "parse_echo"]

ECHO_BEGIN = "--- resolved config ---"
ECHO_END = "--- end config ---"

_NM, _MT, _EV = 1e-9, 1e-3, C.e

# key -> (NanotubeSpec field, scale to SI)
_TUBE_KEYS = {
    "a": ("a", None),
    "b": ("b", None),
    "radius_nm": ("radius", _NM),
    "ell_nm": ("ell", _NM),
    "t0_eV": ("t0", _EV),
    "hbar_over_tau_eV": ("hbar_over_tau", _EV),
    "electron_temperature_K": ("temperature", 1.0),
    "mu_chem_eV": ("mu_chem", _EV),
    "shell_thickness_nm": ("shell_thickness", _NM),
}
_ATOM_KEYS = {
    "mass_amu": ("mass", C.amu),
    "g_F": ("g_F", 1.0),
    "m_F": ("m_F", None),
    "g_S": ("g_S", 1.0),
    "d2_wavelength_nm": ("d2_wavelength", _NM),
    "d2_dipole_ea0": ("d2_dipole", C.e * C.a0),
    "s_x": ("s_x", 1.0),
    "s_y": ("s_y", 1.0),
}
MODES = ("calibrated", "tight-binding")
SPACINGS = ("log", "linear")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Sweep:
    start: float
    stop: float
    points: int
    spacing: str = "log"

    def __post_init__(self):
        if self.spacing not in SPACINGS:
            raise ConfigError(f"spacing must be one of {SPACINGS}")
        if not (self.points >= 1 and self.start > 0 and self.stop >= self.start):
            raise ConfigError(f"empty or invalid sweep range [{self.start}, {self.stop}] x {self.points}")
        if self.points == 1 and self.stop != self.start:
            raise ConfigError("a single-point sweep needs start == stop")
        if self.points > 1 and self.stop == self.start:
            raise ConfigError("sweep range is empty")

    def values(self):
        if self.points == 1:
            return np.array([self.start])
        f = np.geomspace if self.spacing == "log" else np.linspace
        return f(self.start, self.stop, self.points)


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration; values are kept in the units of their keys."""

    nanotube: tuple = ()            # ((key, value), ...) overrides of the defaults
    mode: str = "calibrated"
    current_uA: float = 20.0
    trap_field: tuple = ("offset_field_mT", 0.01)   # or ("f0_kHz", value)
    trap_position: tuple = ("y0_nm", 150.0)         # or ("bias_field_mT", value)
    species: str = "rb87"
    atom: tuple = ()
    temperature_K: float = 380.0
    frame: str = "phi-r"
    omega_sweep: Sweep = field(default_factory=lambda: Sweep(1e3, 1e16, 131))
    y0_sweep: Sweep = field(default_factory=lambda: Sweep(1.0, 200.0, 200, "linear"))
    profile_y0_nm: tuple = (100.0, 150.0, 200.0)
    precision: int = 9

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.trap_field[0] not in ("offset_field_mT", "f0_kHz"):
            raise ConfigError("trap needs offset_field_mT or f0_kHz")
        if self.trap_position[0] not in ("y0_nm", "bias_field_mT"):
            raise ConfigError("trap needs y0_nm or bias_field_mT")
        for name, v in (("current_uA", self.current_uA), (self.trap_field[0], self.trap_field[1]),
                        (self.trap_position[0], self.trap_position[1]),
                        ("temperature_K", self.temperature_K)):
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive, got {v}")
        if any(not y > 0 for y in self.profile_y0_nm):
            raise ConfigError("profile y0 values must be positive")
        if self.species != "rb87":
            raise ConfigError(f"unknown species {self.species!r}")
        if self.precision < 9:
            raise ConfigError("precision must be at least 9 significant digits")

    # -- derived objects -------------------------------------------------
    def tube_spec(self) -> NanotubeSpec:
        kw = {}
        for key, val in self.nanotube:
            name, scale = _TUBE_KEYS[key]
            kw[name] = int(val) if scale is None else float(val) * scale
        try:
            return NanotubeSpec(**kw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def response(self) -> NanotubeResponse:
        return NanotubeResponse(self.tube_spec(), self.mode)

    def atom_spec(self) -> AtomSpec:
        kw = {}
        for key, val in self.atom:
            name, scale = _ATOM_KEYS[key]
            kw[name] = int(val) if scale is None else float(val) * scale
        if self.trap_field[0] == "f0_kHz":
            kw["f0"] = self.trap_field[1] * 1e3
        return AtomSpec.rb87(**kw)

    @property
    def current(self) -> float:
        return self.current_uA * 1e-6

    def offset_field(self) -> float:
        key, val = self.trap_field
        if key == "offset_field_mT":
            return val * _MT
        g = self.atom_spec().g_F
        return val * 1e3 * C.h / (abs(g) * C.muB)

    def f0(self) -> float:
        key, val = self.trap_field
        if key == "f0_kHz":
            return val * 1e3
        return larmor_frequency(val * _MT, self.atom_spec().g_F)

    def trap(self, y0_surface: float | None = None) -> TrapConfig:
        """Trap at the configured position, or re-biased to ``y0_surface`` (m)."""
        R = self.tube_spec().radius
        if y0_surface is not None:
            return TrapConfig.from_surface_distance(self.current, y0_surface, self.offset_field(), R)
        key, val = self.trap_position
        if key == "y0_nm":
            return TrapConfig.from_surface_distance(self.current, val * _NM, self.offset_field(), R)
        return TrapConfig(self.current, val * _MT, self.offset_field())

    def y0_surface(self) -> float:
        return self.trap().y0_surface(self.tube_spec().radius)


def _num(s: str, key: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {s!r}") from None


def _pick_one(sec, a, b, default):
    has = [k for k in (a, b) if k in sec]
    if len(has) > 1:
        raise ConfigError(f"give exactly one of {a}, {b}")
    if not has:
        return default
    return (has[0], _num(sec[has[0]], has[0]))


def _sweep(sec, keys, default: Sweep) -> Sweep:
    """``keys`` names the (min, max, points, spacing) entries of ``sec``."""
    kmin, kmax, kpts, kspc = keys
    try:
        return Sweep(_num(sec[kmin], kmin) if kmin in sec else default.start,
                     _num(sec[kmax], kmax) if kmax in sec else default.stop,
                     int(sec[kpts]) if kpts in sec else default.points,
                     sec.get(kspc, default.spacing))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";",), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    known = {"nanotube", "trap", "atom", "environment", "sweep", "output"}
    extra = set(cp.sections()) - known
    if extra:
        raise ConfigError(f"unknown sections: {sorted(extra)}")
    d = RunConfig()
    empty: dict = {}
    tube = cp["nanotube"] if cp.has_section("nanotube") else empty
    trap = cp["trap"] if cp.has_section("trap") else empty
    atom = cp["atom"] if cp.has_section("atom") else empty
    env = cp["environment"] if cp.has_section("environment") else empty
    sw = cp["sweep"] if cp.has_section("sweep") else empty
    out = cp["output"] if cp.has_section("output") else empty

    def check(sec, allowed, name):
        bad = set(sec) - set(allowed)
        if bad:
            raise ConfigError(f"[{name}] unknown keys: {sorted(bad)}")

    check(tube, list(_TUBE_KEYS) + ["mode"], "nanotube")
    check(trap, ["current_uA", "offset_field_mT", "f0_kHz", "y0_nm", "bias_field_mT"], "trap")
    check(atom, list(_ATOM_KEYS) + ["species"], "atom")
    check(env, ["temperature_K", "spin_frame"], "environment")
    check(sw, ["omega_min_rad_s", "omega_max_rad_s", "omega_points", "omega_spacing",
               "y0_min_nm", "y0_max_nm", "y0_points", "y0_spacing", "profile_y0_nm"], "sweep")
    check(out, ["precision"], "output")

    nanotube = tuple((k, _num(tube[k], k)) for k in _TUBE_KEYS if k in tube)
    atoms = tuple((k, _num(atom[k], k)) for k in _ATOM_KEYS if k in atom)
    profile = d.profile_y0_nm
    if "profile_y0_nm" in sw:
        profile = tuple(_num(v, "profile_y0_nm") for v in sw["profile_y0_nm"].split(",") if v.strip())
        if not profile:
            raise ConfigError("profile_y0_nm is empty")
    return RunConfig(
        nanotube=nanotube,
        mode=tube.get("mode", d.mode),
        current_uA=_num(trap["current_uA"], "current_uA") if "current_uA" in trap else d.current_uA,
        trap_field=_pick_one(trap, "offset_field_mT", "f0_kHz", d.trap_field),
        trap_position=_pick_one(trap, "y0_nm", "bias_field_mT", d.trap_position),
        species=atom.get("species", d.species),
        atom=atoms,
        temperature_K=_num(env["temperature_K"], "temperature_K") if "temperature_K" in env
        else d.temperature_K,
        frame=env.get("spin_frame", d.frame),
        omega_sweep=_sweep(sw, ("omega_min_rad_s", "omega_max_rad_s", "omega_points",
                                "omega_spacing"), d.omega_sweep),
        y0_sweep=_sweep(sw, ("y0_min_nm", "y0_max_nm", "y0_points", "y0_spacing"), d.y0_sweep),
        profile_y0_nm=profile,
        precision=int(out["precision"]) if "precision" in out else d.precision,
    )


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc


def to_ini(cfg: RunConfig) -> str:
    """Canonical INI text of a resolved configuration; floats use ``repr``."""
    lines = ["[nanotube]", f"mode = {cfg.mode}"]
    lines += [f"{k} = {v!r}" for k, v in cfg.nanotube]
    lines += ["", "[trap]", f"current_uA = {cfg.current_uA!r}",
              f"{cfg.trap_field[0]} = {cfg.trap_field[1]!r}",
              f"{cfg.trap_position[0]} = {cfg.trap_position[1]!r}"]
    lines += ["", "[atom]", f"species = {cfg.species}"]
    lines += [f"{k} = {v!r}" for k, v in cfg.atom]
    lines += ["", "[environment]", f"temperature_K = {cfg.temperature_K!r}", f"spin_frame = {cfg.frame}"]
    o, y = cfg.omega_sweep, cfg.y0_sweep
    lines += ["", "[sweep]",
              f"omega_min_rad_s = {o.start!r}", f"omega_max_rad_s = {o.stop!r}",
              f"omega_points = {o.points}", f"omega_spacing = {o.spacing}",
              f"y0_min_nm = {y.start!r}", f"y0_max_nm = {y.stop!r}",
              f"y0_points = {y.points}", f"y0_spacing = {y.spacing}",
              "profile_y0_nm = " + ", ".join(repr(v) for v in cfg.profile_y0_nm)]
    lines += ["", "[output]", f"precision = {cfg.precision}"]
    return "\n".join(lines) + "\n"


def echo_lines(cfg: RunConfig) -> list[str]:
    return [ECHO_BEGIN] + to_ini(cfg).splitlines() + [ECHO_END]


def parse_echo(text: str) -> RunConfig:
    """Recover the configuration from the ``#`` header of a CSV written by the CLI."""
    buf = io.StringIO()
    inside = False
    for line in text.splitlines():
        if not line.startswith("#"):
            continue
        body = line[1:].strip()
        if body == ECHO_BEGIN:
            inside = True
        elif body == ECHO_END:
            break
        elif inside:
            buf.write(line[2:] if line.startswith("# ") else line[1:])
            buf.write("\n")
    if not inside:
        raise ConfigError("no configuration echo found")
    return parse_config(buf.getvalue())


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    names = {f.name for f in fields(RunConfig)}
    return replace(cfg, **{k: v for k, v in kw.items() if k in names and v is not None})
