"""Compare the compiled and pure-numpy shell kernels.

    python3 benchmarks/bench_kernels.py [--nodes 20000] [--orders 8] [--repeat 5]

Reports the best-of-``repeat`` wall time per call for the raw kernel and for
a full coincident Green-tensor evaluation with each backend, plus the
largest relative disagreement between the two kernels.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from cntrap import _kernels_py, green
from cntrap.green import Shell, green_scattering
from cntrap.material import NanotubeResponse

try:
    from cntrap import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def best_of(fn, repeat):
    t = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        t.append(time.perf_counter() - t0)
    return min(t)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=20000)
    ap.add_argument("--orders", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    R, r = 3.52e-10, 3.52e-10 + 150e-9
    kappa = np.geomspace(1e3, 50 / 150e-9, args.nodes)
    beta, gamma = 1e-20 + 0j, 1e-20j
    call = lambda mod: mod.shell_blocks(kappa, 0, args.orders, R, r, beta, gamma)  # noqa: E731

    backends = [("python", _kernels_py)]
    if _kernels_c is not None:
        backends.append(("cython", _kernels_c))
    else:
        print("compiled extension not built; only the numpy backend is timed")

    resp = NanotubeResponse()
    shell = Shell.from_response(resp)
    pt = (r, 0.0, 0.0)
    w0 = 2 * np.pi * 70e3

    print(f"{'backend':8s} {'kernel (s)':>12s} {'G real w (s)':>14s} {'G imag w (s)':>14s}")
    saved = green.shell_blocks
    try:
        for name, mod in backends:
            tk = best_of(lambda: call(mod), args.repeat)
            green.shell_blocks = mod.shell_blocks
            tr = best_of(lambda: green_scattering(pt, pt, w0, shell, flavor="curlcurl"), args.repeat)
            ti = best_of(lambda: green_scattering(pt, pt, 1j * 3e15, shell), args.repeat)
            print(f"{name:8s} {tk:12.4e} {tr:14.4e} {ti:14.4e}")
    finally:
        green.shell_blocks = saved

    if _kernels_c is not None:
        a, b = call(_kernels_py), call(_kernels_c)
        scale = np.maximum(np.abs(a), 1e-300)
        print(f"max relative kernel disagreement: {np.max(np.abs(a - b) / scale):.3e}")


if __name__ == "__main__":
    main()
