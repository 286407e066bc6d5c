"""Compare the numba and numpy kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Times each kernel on registers of growing size, then one end-to-end
workload (the 2-circle search) under each backend in a subprocess so the
environment flag takes effect.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from mcwalk.kernels import _numba, _numpy

CASES = [
    ("4 qubits", [2] * 4),
    ("3 qutrits + walker", [3] * 4),
    ("5 qudits d=5", [5] * 5),
    ("8 qudits d=5", [5] * 8),
]

END_TO_END = (
    "import time; from mcwalk import recipes; recipes.circle_search('two_qubit_3coins', 20); "
    "t = time.perf_counter(); recipes.circle_search('two_qubit_3coins', 300, seed=1); "
    "print(time.perf_counter() - t)"
)


def time_call(fn, repeat):
    fn()  # warm-up, includes JIT compilation for numba
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'register':<22}{'kernel':<16}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, dims in CASES:
        dims = np.array(dims)
        total = int(np.prod(dims))
        amps = rng.standard_normal(total) + 1j * rng.standard_normal(total)
        targets = np.array([0, 1])
        sub = int(dims[0] * dims[1])
        mat = np.linalg.qr(rng.standard_normal((sub, sub)) + 1j * rng.standard_normal((sub, sub)))[0]
        perm = rng.permutation(sub)
        kernels = {
            "apply_local": lambda m, a=amps: m.apply_local(a, dims, mat, targets),
            "permute_local": lambda m, a=amps: m.permute_local(a, dims, perm, targets),
            "marginal_probs": lambda m, a=amps: m.marginal_probs(a, dims, targets),
        }
        for kname, call in kernels.items():
            t_np = time_call(lambda: call(_numpy), args.repeat) * 1e3
            t_nb = time_call(lambda: call(_numba), args.repeat) * 1e3
            print(f"{name:<22}{kname:<16}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.2f}x")
    print("\nend-to-end: circle_search two_qubit_3coins, 300 samples")
    for flag, label in (("1", "numpy"), ("0", "numba")):
        env = dict(os.environ, MCWALK_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
        print(f"  {label:<6} {float(out.stdout):.3f}s")


if __name__ == "__main__":
    main()
