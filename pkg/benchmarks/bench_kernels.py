"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Times ``radial_cells`` and ``cell_moments`` on random polytopes and
checks that both backends return the same values.
"""
import argparse
import json
import timeit

import numpy as np

from dualmink import _fallback
from dualmink.geometry import normalize, random_polytope

try:
    from dualmink import _kernels
except ImportError:
    _kernels = None

CASES = [(2, 8, 100_000), (2, 64, 100_000), (3, 20, 100_000), (3, 20, 1_000_000),
         (3, 100, 200_000)]


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def run(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for dim, m, N in CASES:
        P = random_polytope(dim, m, rng)
        U = normalize(rng.standard_normal((N, dim)))
        V, h = np.ascontiguousarray(P.normals), np.ascontiguousarray(P.supports)
        for name, args in (("radial_cells", (U, V, h)), ("cell_moments", (U, V, h, -1.5))):
            row = {"kernel": name, "dim": dim, "m": m, "N": N}
            ref = getattr(_fallback, name)(*args)
            row["python_s"] = best_time(lambda: getattr(_fallback, name)(*args), repeat)
            if _kernels is not None:
                out = getattr(_kernels, name)(*args)
                row["agree"] = bool(all(np.allclose(a, b, rtol=1e-11) for a, b in zip(out, ref)))
                row["cython_s"] = best_time(lambda: getattr(_kernels, name)(*args), repeat)
                row["speedup"] = row["python_s"] / row["cython_s"]
            rows.append(row)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None)
    args = ap.parse_args()
    rows = run(args.repeat)
    if _kernels is None:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"{'kernel':<13}{'dim':>4}{'m':>5}{'N':>10}{'numpy [ms]':>12}{'cython [ms]':>13}"
          f"{'speedup':>9}{'agree':>7}")
    for r in rows:
        cy = f"{1e3 * r['cython_s']:13.2f}" if "cython_s" in r else f"{'-':>13}"
        sp = f"{r['speedup']:9.1f}" if "speedup" in r else f"{'-':>9}"
        print(f"{r['kernel']:<13}{r['dim']:>4}{r['m']:>5}{r['N']:>10}{1e3 * r['python_s']:12.2f}"
              f"{cy}{sp}{str(r.get('agree', '-')):>7}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
