"""Compare the numba kernels with the pure-numpy fallback.

Each path runs in its own interpreter because the backend is fixed at import
time by ``OPINEQ_DISABLE_NUMBA``.  Usage::

    python3 benchmarks/bench_kernels.py [--reps 2000] [--json]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from opineq import _accel
from opineq.rng import SplitMix64, random_hermitian

reps = int(sys.argv[1])
out = {"numba": _accel.HAVE_NUMBA, "eig_us": {}, "splitmix_ns_per_draw": None}
g = SplitMix64(1)
for n in (2, 4, 6, 8, 16):
    mats = [random_hermitian(n, g) for _ in range(32)]
    _accel.jacobi_sweeps(mats[0], 1e-13, 60)  # compile / warm up
    t = time.perf_counter()
    for i in range(reps):
        _accel.jacobi_sweeps(mats[i % 32], 1e-13, 60)
    out["eig_us"][str(n)] = 1e6 * (time.perf_counter() - t) / reps
_accel.splitmix_block(7, 16)
t = time.perf_counter()
for _ in range(20):
    _accel.splitmix_block(7, 1_000_000)
out["splitmix_ns_per_draw"] = 1e9 * (time.perf_counter() - t) / 20e6
print(json.dumps(out))
"""


def run(disable, reps):
    env = dict(os.environ, OPINEQ_DISABLE_NUMBA="1" if disable else "0")
    res = subprocess.run([sys.executable, "-c", WORKER, str(reps)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    nb = run(False, args.reps)
    np_ = run(True, args.reps)
    if args.json:
        print(json.dumps({"numba": nb, "numpy": np_}, indent=2))
        return
    if not nb["numba"]:
        print("numba unavailable: both columns use the numpy fallback")
    print(f"{'kernel':<22} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for n, t_nb in nb["eig_us"].items():
        t_np = np_["eig_us"][n]
        print(f"{'jacobi eig n=' + n:<22} {t_nb:>10.1f}us {t_np:>10.1f}us {t_np / t_nb:>8.1f}x")
    a, b = nb["splitmix_ns_per_draw"], np_["splitmix_ns_per_draw"]
    print(f"{'splitmix64 per draw':<22} {a:>10.2f}ns {b:>10.2f}ns {b / a:>8.1f}x")


if __name__ == "__main__":
    main()
