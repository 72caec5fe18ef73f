"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--skip-search]

Micro benchmarks call both modules directly.  The end-to-end search runs
in a subprocess so that FTGOSSIP_PURE=1 can switch the whole package.
"""
import argparse
import os
import subprocess
import sys
import timeit

from ftgossip import kernels
from ftgossip.schedules import build_asymmetric
from ftgossip.core import Schedule, product

SEARCH_SNIPPET = (
    "import time; from ftgossip.search import min_updates;"
    "t = time.perf_counter(); r = min_updates({n}, '{mode}', {budget});"
    "print(time.perf_counter() - t, r.min_updates, r.backend)"
)


def _int_matrix(n, bits):
    full = build_asymmetric(n)
    psi = product(Schedule(n, list(full)[:n]))  # a non-trivial prefix
    scale = 1 << bits
    return tuple(int(v.to_fraction() * scale) for row in psi.rows for v in row)


def micro(repeat):
    py, c = kernels.python_backend, kernels.compiled_backend
    rows = []
    for n in (4, 6, 8):
        bits = 12
        flat = _int_matrix(n, bits)
        cases = [
            ("canonical", lambda m, f=flat, n=n: m.canonical(f, n)),
            ("lower_bound", lambda m, f=flat, n=n: m.lower_bound(f, n, bits, 64)),
            ("children", lambda m, f=flat, n=n: m.children(f, n, True, 0, 64, True, bits)),
        ]
        for name, fn in cases:
            number = 200
            t_py = min(timeit.repeat(lambda: fn(py), number=number, repeat=repeat)) / number
            t_c = min(timeit.repeat(lambda: fn(c), number=number, repeat=repeat)) / number
            rows.append((f"{name} n={n}", t_py, t_c))
    for n in (8, 10):
        e = 4 if n <= 8 else 5
        t_py = min(timeit.repeat(lambda: py.chi_scan(n, e), number=1, repeat=repeat))
        t_c = min(timeit.repeat(lambda: c.chi_scan(n, e), number=1, repeat=repeat))
        rows.append((f"chi_scan n={n} e={e}", t_py, t_c))
    return rows


def search(n, mode, budget):
    out = {}
    for label, env in (("python", {"FTGOSSIP_PURE": "1"}), ("cython", {})):
        code = SEARCH_SNIPPET.format(n=n, mode=mode, budget=budget)
        res = subprocess.run([sys.executable, "-c", code], env={**os.environ, **env},
                             capture_output=True, text=True, check=True)
        t, value, backend = res.stdout.split()
        out[label] = (float(t), int(value), backend)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-search", action="store_true")
    args = ap.parse_args()
    if kernels.compiled_backend is None:
        sys.exit("compiled kernels are not built; run pip install -e . --no-build-isolation")

    print(f"{'kernel':<24}{'python':>12}{'cython':>12}{'speedup':>10}")
    for name, t_py, t_c in micro(args.repeat):
        print(f"{name:<24}{t_py * 1e6:>10.1f}us{t_c * 1e6:>10.1f}us{t_py / t_c:>9.1f}x")
    if not args.skip_search:
        for n, mode, budget in ((4, "asym", 10), (5, "asym", 14)):
            res = search(n, mode, budget)
            (tp, vp, _), (tc, vc, bc) = res["python"], res["cython"]
            assert vp == vc, "backends disagree"
            print(f"min_updates({n}, {mode}, {budget}) = {vc}: python {tp:.2f}s, {bc} {tc:.2f}s, "
                  f"speedup {tp / tc:.1f}x")


if __name__ == "__main__":
    main()
