"""Compare the compiled and numpy kernel backends.

Times the raw kernels on random coefficient maps, then one full criterion
evaluation per backend (the numpy run happens in a subprocess with
``CONJSCAN_PURE_PYTHON=1`` so backend selection at import is exercised).

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from conjscan import kernels


def random_map(rng, radius, density=0.6):
    keys = [(a, b) for a in range(-radius, radius + 1) for b in range(-radius, radius + 1)
            if rng.random() < density]
    k = np.array(sorted(keys), dtype=np.int64).reshape(-1, 2)
    c = rng.normal(size=len(k)) + 1j * rng.normal(size=len(k))
    return np.ascontiguousarray(k), c


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for radius in (3, 6, 12):
        ka, ca = random_map(rng, radius)
        kb, cb = random_map(rng, radius)
        for name in kernels.available_backends():
            mod = kernels.backend_module(name)
            calls = {
                "convolve": lambda: mod.convolve(ka, ca, kb, cb),
                "inner": lambda: mod.inner(ka, ca, kb, cb),
                "merge": lambda: mod.merge(ka, ca, kb, cb, 1.0),
            }
            for op, fn in calls.items():
                t = min(timeit.repeat(fn, number=repeat, repeat=3)) / repeat
                rows.append((op, radius, len(ka), name, t))
    return rows


END_TO_END = r"""
import json, sys, timeit
import numpy as np
sys.path.insert(0, sys.argv[1])
from conftest import random_div_free
from conjscan import kernels
from conjscan.conjugacy import evaluate
from conjscan.kolmogorov import KolmogorovParams, kolmogorov_field
rng = np.random.default_rng(1)
u0 = kolmogorov_field(KolmogorovParams(6, 2, 1.0))
vs = [random_div_free(u0.geometry, rng) for _ in range(50)]
t = min(timeit.repeat(lambda: [evaluate(u0, v) for v in vs], number=1, repeat=3)) / len(vs)
print(json.dumps({"backend": kernels.BACKEND, "seconds": t}))
"""


def bench_end_to_end():
    tests = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir, "tests")
    out = []
    for pure in ("0", "1"):
        env = dict(os.environ, CONJSCAN_PURE_PYTHON=pure)
        res = subprocess.run([sys.executable, "-c", END_TO_END, tests], env=env,
                             capture_output=True, text=True, check=True)
        out.append(json.loads(res.stdout))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    print(f"{'kernel':<10}{'radius':>7}{'modes':>7}  {'backend':<8}{'time/call':>12}")
    for op, radius, n, name, t in bench_kernels(args.repeat):
        print(f"{op:<10}{radius:>7}{n:>7}  {name:<8}{t * 1e6:>10.1f} us")
    print()
    print("full criterion evaluation, Kolmogorov (6, 2, 1), random directions:")
    for r in bench_end_to_end():
        print(f"  {r['backend']:<8}{r['seconds'] * 1e3:8.2f} ms per direction")


if __name__ == "__main__":
    main()
