"""Batch command-line front end.

Every CSV starts with ``#`` comment lines holding the library version, the
command and the fully resolved configuration; a gnuplot script is written
next to it. Exit codes: 0 success, 2 configuration or usage error, 3 numeric
failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .casimir import CPInterpolant
from .config import ConfigError, RunConfig, Sweep, echo_lines, load_config
from .spinflip import lifetime_sweep, spin_flip_rate
from .tunneling import TrapDestroyedError, build_profile, tunneling_sweep, wkb_lifetime

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
_NM = 1e-9


class NumericFailure(RuntimeError):
    pass


# -- output helpers -----------------------------------------------------------

def _fmt(v, prec: int) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, str):
        return v.replace(",", ";").replace("\n", " ")
    return f"{float(v):.{prec}e}"


def _header(cfg: RunConfig, command: str) -> list[str]:
    return [f"# cntrap {__version__}", f"# command: {command}"] + [f"# {s}" for s in echo_lines(cfg)]


def write_csv(path: str, cfg: RunConfig, command: str, columns, rows, footer=()):
    p = cfg.precision
    lines = _header(cfg, command) + [",".join(columns)]
    lines += [",".join(_fmt(v, p) for v in row) for row in rows]
    lines += [f"# {s}" for s in footer]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_gnuplot(path: str, body: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n")
        fh.write(body)


def _y0_grid(cfg: RunConfig) -> np.ndarray:
    return cfg.y0_sweep.values() * _NM


def _cp_interpolant(cfg: RunConfig, response, atom, y0s) -> CPInterpolant:
    y0s = np.asarray(list(y0s), dtype=float)
    lo = min(1e-9, float(np.min(np.maximum(1e-9, 0.02 * y0s))))
    hi = max(600e-9, float(np.max(3 * y0s)))
    return CPInterpolant(response, atom, y_min=lo, y_max=hi)


# -- commands -----------------------------------------------------------------

def cmd_conductivity(cfg: RunConfig, out: str, jobs: int = 1) -> list[str]:
    resp = cfg.response()
    w0 = 2 * math.pi * cfg.f0()
    sw = cfg.omega_sweep
    omegas = sw.values()
    if sw.points > 1:
        # the transition frequency row is always present in multi-point sweeps
        omegas = np.unique(np.append(omegas, w0))
    rows = []
    for w in omegas:
        sb = resp.sigma_bulk(w)
        ss = resp.sheet_conductance(w)
        eps = resp.eps_r(w)
        rows.append((w, sb.real, sb.imag, ss.real, ss.imag, eps.real, eps.imag))
    path = os.path.join(out, "conductivity.csv")
    cols = ["omega_rad_s", "sigma_bulk_re", "sigma_bulk_im", "sigma_sheet_re", "sigma_sheet_im",
            "eps_re", "eps_im"]
    write_csv(path, cfg, "conductivity", cols, rows)
    write_gnuplot(os.path.join(out, "conductivity.gp"),
                  "set logscale xy\nset xlabel 'omega (rad/s)'\nset ylabel 'sigma (S/m)'\n"
                  "plot 'conductivity.csv' using 1:2 with lines, '' using 1:(abs($3)) with lines\n")
    return [path]


def cmd_spinflip_sweep(cfg: RunConfig, out: str, jobs: int = 1) -> list[str]:
    resp, atom = cfg.response(), cfg.atom_spec()
    y0s = _y0_grid(cfg)
    # f0 is fixed by the offset field; bias is re-derived per point but does not enter the rate
    res = lifetime_sweep(resp, cfg.trap(), atom, y0s, cfg.temperature_K, cfg.frame, jobs=jobs)
    rows = [(r.y0 / _NM, r.gamma0, r.n_th, r.gamma_tot, r.tau_sf, r.error) for r in res]
    path = os.path.join(out, "spinflip_sweep.csv")
    write_csv(path, cfg, "spinflip-sweep",
              ["y0_nm", "gamma0_hz", "n_th", "gamma_tot_hz", "tau_sf_s", "error"], rows)
    write_gnuplot(os.path.join(out, "spinflip_sweep.gp"),
                  "set logscale y\nset xlabel 'y0 (nm)'\nset ylabel 'tau_SF (s)'\n"
                  "plot 'spinflip_sweep.csv' using 1:5 with lines\n")
    if all(r.error for r in res):
        raise NumericFailure("every spin-flip row failed: " + (res[0].error if res else "no rows"))
    return [path]


def _profile_name(y0_nm: float) -> str:
    return f"profile_{y0_nm:g}nm.csv"


def cmd_potential_profile(cfg: RunConfig, out: str, jobs: int = 1) -> list[str]:
    resp, atom = cfg.response(), cfg.atom_spec()
    y0s = [v * _NM for v in cfg.profile_y0_nm]
    cp = _cp_interpolant(cfg, resp, atom, y0s)
    R = resp.spec.radius
    paths = []
    for y0 in y0s:
        prof = build_profile(cp, cfg.trap(y0), atom, R, strict=False)
        footer = prof.footer()
        if prof.barrier_present:
            r = wkb_lifetime(prof, atom)
            footer += [f"T = {r.T:.9e}", f"tau_cp_s = {r.tau_cp:.9e}"]
        rows = zip(prof.y_surface / _NM, prof.V_mag, prof.U_cp, prof.V_tot)
        name = _profile_name(y0 / _NM)
        path = os.path.join(out, name)
        write_csv(path, cfg, "potential-profile", ["y_nm", "v_mag_J", "u_cp_J", "v_tot_J"], rows,
                  footer)
        paths.append(path)
    plots = ", ".join(f"'{_profile_name(v)}' using 1:4 with lines title '{v:g} nm'"
                      for v in cfg.profile_y0_nm)
    write_gnuplot(os.path.join(out, "potential_profile.gp"),
                  "set xlabel 'y (nm)'\nset ylabel 'V_tot (J)'\nplot " + plots + "\n")
    return paths


def cmd_tunneling_sweep(cfg: RunConfig, out: str, jobs: int = 1) -> list[str]:
    resp, atom = cfg.response(), cfg.atom_spec()
    y0s = _y0_grid(cfg)
    cp = _cp_interpolant(cfg, resp, atom, y0s)
    res = tunneling_sweep(resp, atom, y0s, cfg.current, cfg.offset_field(), cp=cp, jobs=jobs)
    rows = [(r.y0 / _NM, r.barrier_present, r.T, r.omega_r, r.tau_cp, r.omega_r_gradient, r.ln_T_vmin,
             r.error) for r in res]
    path = os.path.join(out, "tunneling_sweep.csv")
    write_csv(path, cfg, "tunneling-sweep",
              ["y0_nm", "barrier_present", "T", "omega_r_rad_s", "tau_cp_s", "omega_r_gradient_rad_s",
               "ln_T_at_vmin", "error"], rows)
    write_gnuplot(os.path.join(out, "tunneling_sweep.gp"),
                  "set logscale y\nset xlabel 'y0 (nm)'\nset ylabel 'tau_CP (s)'\n"
                  "plot 'tunneling_sweep.csv' using 1:5 with linespoints\n")
    if res and all(r.error and not r.error.startswith("trap destroyed") for r in res):
        raise NumericFailure("every tunneling row failed: " + res[0].error)
    return [path]


def summary_text(cfg: RunConfig) -> str:
    resp, atom = cfg.response(), cfg.atom_spec()
    y0 = cfg.y0_surface()
    trap = cfg.trap()
    w0 = 2 * math.pi * cfg.f0()
    sb, eps = resp.sigma_bulk(w0), resp.eps_r(w0)
    sf = spin_flip_rate(resp, trap, atom, y0, cfg.temperature_K, cfg.frame)
    cp = _cp_interpolant(cfg, resp, atom, [y0])
    prof = build_profile(cp, trap, atom, resp.spec.radius, strict=False)
    lines = [f"# cntrap {__version__}", "# command: summary"] + [f"# {s}" for s in echo_lines(cfg)]
    lines += [
        f"f0_hz = {cfg.f0():.9e}",
        f"bias_field_T = {trap.bias_field:.9e}",
        f"sigma_bulk_S_per_m = {sb.real:.9e} {sb.imag:+.9e}i",
        f"eps_r = {eps.real:.9e} {eps.imag:+.9e}i",
        f"n_th = {sf.n_th:.9e}",
    ]
    lines += prof.footer()
    if prof.minimum_present:
        r = wkb_lifetime(prof, atom)
        tau_cp = r.tau_cp
        lines += [f"T = {r.T:.9e}", f"ln_T_at_vmin = {r.ln_T_vmin:.9e}"]
    else:
        tau_cp = math.nan
    lines += ["", f"{'':12s}{'tau_SF_s':>18s}{'tau_CP_s':>18s}",
              f"{'y0 = ' + format(y0 / _NM, 'g') + ' nm':12s}{sf.tau_sf:18.9e}{tau_cp:18.9e}"]
    return "\n".join(lines) + "\n"


def cmd_summary(cfg: RunConfig, out: str | None = None, jobs: int = 1) -> str:
    text = summary_text(cfg)
    sys.stdout.write(text)
    return text


COMMANDS = {
    "conductivity": cmd_conductivity,
    "spinflip-sweep": cmd_spinflip_sweep,
    "potential-profile": cmd_potential_profile,
    "tunneling-sweep": cmd_tunneling_sweep,
    "summary": cmd_summary,
}


# -- argument handling --------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory")
    common.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
    common.add_argument("--mode", choices=("tight-binding", "calibrated"))

    p = argparse.ArgumentParser(prog="cntrap", description="Atom trapping near a carbon nanotube")
    p.add_argument("--version", action="version", version=f"cntrap {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("conductivity", parents=[common], help="conductivity and permittivity sweep")
    c.add_argument("--omega", type=float, metavar="W", help="single angular frequency (rad/s)")
    c.add_argument("--omega-range", type=float, nargs=2, metavar=("MIN", "MAX"))
    c.add_argument("--points", type=int)
    c.add_argument("--spacing", choices=("log", "linear"))

    for name, helptext in (("spinflip-sweep", "spin-flip lifetime versus trap distance"),
                           ("tunneling-sweep", "tunneling lifetime versus trap distance")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--y0-range", type=float, nargs=2, metavar=("MIN_NM", "MAX_NM"))
        s.add_argument("--y0", type=float, metavar="NM", help="single trap distance (nm)")
        s.add_argument("--points", type=int)
        s.add_argument("--spacing", choices=("log", "linear"))

    s = sub.add_parser("potential-profile", parents=[common], help="total potential along the radius")
    s.add_argument("--y0", type=float, nargs="+", metavar="NM", help="trap distances (nm)")

    s = sub.add_parser("summary", parents=[common], help="lifetimes at the configured trap distance")
    s.add_argument("--y0", type=float, metavar="NM")
    return p


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    kw = {}
    if args.mode:
        kw["mode"] = args.mode
    cmd = args.command
    if cmd == "conductivity":
        sw = cfg.omega_sweep
        if args.omega is not None:
            sw = Sweep(args.omega, args.omega, 1, sw.spacing)
        elif args.omega_range or args.points or args.spacing:
            lo, hi = args.omega_range or (sw.start, sw.stop)
            sw = Sweep(lo, hi, args.points or sw.points, args.spacing or sw.spacing)
        kw["omega_sweep"] = sw
    elif cmd in ("spinflip-sweep", "tunneling-sweep"):
        sw = cfg.y0_sweep
        if args.y0 is not None:
            sw = Sweep(args.y0, args.y0, 1, sw.spacing)
        elif args.y0_range or args.points or args.spacing:
            lo, hi = args.y0_range or (sw.start, sw.stop)
            sw = Sweep(lo, hi, args.points or sw.points, args.spacing or sw.spacing)
        kw["y0_sweep"] = sw
    elif cmd == "potential-profile" and args.y0:
        kw["profile_y0_nm"] = tuple(args.y0)
    elif cmd == "summary" and args.y0 is not None:
        kw["trap_position"] = ("y0_nm", args.y0)
    return replace(cfg, **kw) if kw else cfg


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        cfg = _apply_overrides(load_config(args.config), args)
        cfg.tube_spec()
        if args.command != "summary":
            os.makedirs(args.out, exist_ok=True)
    except ConfigError as exc:
        print(f"cntrap: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = COMMANDS[args.command](cfg, args.out, args.jobs)
    except ConfigError as exc:
        print(f"cntrap: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TrapDestroyedError, NumericFailure, ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"cntrap: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.command != "summary":
        for path in result:
            print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
