"""Compare the compiled and pure-numpy backends on a few representative runs.

Each backend runs in its own interpreter because the choice is made at import
time (RKDV_DISABLE_NUMBA). A short warm-up run absorbs JIT compilation.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys

CASES = [
    # name, N, tau, T
    ("soliton1d", 1024, 0.1, 20.0),
    ("soliton1d", 256, 0.001, 1.0),
    ("periodic2d", 64, 0.1, 10.0),
    ("manufactured2d", 32, 0.001, 0.5),
]

WORKER = r"""
import json, sys, time
from rkdv import _accel
from rkdv.problems import get_problem
from rkdv.stepper import SchemeConfig, run
cases, repeat = json.loads(sys.argv[1]), int(sys.argv[2])
out = {"backend": _accel.BACKEND, "cases": []}
for name, N, tau, T in cases:
    prob = get_problem(name)
    cfg = SchemeConfig.for_problem(prob, tau)
    run(prob, N, cfg, 2 * tau)
    best = min(run(prob, N, cfg, T).wall_seconds for _ in range(repeat))
    out["cases"].append({"case": f"{name} N={N} tau={tau:g} T={T:g}", "steps": round(T / tau), "seconds": best})
print(json.dumps(out))
"""


def measure(disable_numba, repeat):
    env = dict(os.environ)
    env.pop("RKDV_DISABLE_NUMBA", None)
    if disable_numba:
        env["RKDV_DISABLE_NUMBA"] = "1"
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps(CASES), str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    fast = measure(False, args.repeat)
    slow = measure(True, args.repeat)
    if fast["backend"] != "numba":
        print("numba/rocket-fft not importable; both columns use numpy", file=sys.stderr)
    print(f"{'case':<42} {'steps':>7} {'numba s':>9} {'numpy s':>9} {'speedup':>8}")
    for a, b in zip(fast["cases"], slow["cases"]):
        print(f"{a['case']:<42} {a['steps']:>7} {a['seconds']:>9.3f} {b['seconds']:>9.3f} "
              f"{b['seconds'] / a['seconds']:>7.1f}x")


if __name__ == "__main__":
    main()
