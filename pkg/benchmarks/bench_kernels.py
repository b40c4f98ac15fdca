"""Time the Cython kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json PATH]

Each kernel is called on the same inputs under both backends; the table
reports the best-of-N mean time per call and the speedup. An end-to-end
row compiles one bundled benchmark with each backend in a subprocess
(the backend is fixed at import time).
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from zeroswap.kernels import backends


def cases(rng):
    n = 20
    pts = np.ascontiguousarray(rng.random((n, 2)) * 100.0)
    skip = np.zeros(n, dtype=np.uint8)
    ei, ej = np.triu_indices(n, 1)
    ei, ej = np.ascontiguousarray(ei, dtype=np.int_), np.ascontiguousarray(ej, dtype=np.int_)
    w = np.ascontiguousarray(rng.random(len(ei)))
    x = np.ascontiguousarray(rng.random(2 * n))
    g = np.empty_like(x)
    kept = np.ascontiguousarray(rng.random((12, 2)) * 100.0)
    occ = np.ascontiguousarray((rng.random(35 * 35) < 0.6).astype(np.uint8))
    return {
        "anneal_objective": lambda k: k.anneal_objective(x, ei, ej, w, 1.0, 0.1, None),
        "anneal_objective+grad": lambda k: k.anneal_objective(x, ei, ej, w, 1.0, 0.1, g),
        "max_mst_edge": lambda k: k.max_mst_edge(pts),
        "segment_clearance": lambda k: k.segment_clearance(5.0, 5.0, 95.0, 5.0, pts, skip),
        "blockade_hit": lambda k: k.blockade_hit(50.0, 50.0, 60.0, 50.0, kept, 1.0),
        "nearest_free_site": lambda k: k.nearest_free_site(17.3, 4.2, occ, 35, 35),
    }


def time_call(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def end_to_end(backend, name):
    env = dict(os.environ, ZEROSWAP_PURE_PYTHON="1" if backend == "python" else "0")
    code = ("import time; from zeroswap.benchmarks import load_benchmark;"
            "from zeroswap.pipeline import compile_circuit; from zeroswap import kernels;"
            f"c = load_benchmark({name!r}); t = time.perf_counter(); compile_circuit(c);"
            "print(kernels.BACKEND, time.perf_counter() - t)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out[0] == backend, out
    return float(out[1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--circuit", default="qft", help="bundled benchmark for the end-to-end row")
    ap.add_argument("--json", metavar="PATH", help="also write the results as JSON")
    args = ap.parse_args(argv)

    impls = backends()
    if "cython" not in impls:
        print("compiled kernels are not built; only the numpy backend is available")
    rows = []
    for name, call in cases(np.random.default_rng(0)).items():
        t = {b: time_call(lambda k=k: call(k), args.repeat) for b, k in impls.items()}
        rows.append((name, t))
    t = {b: end_to_end(b, args.circuit) for b in impls}
    rows.append((f"compile {args.circuit}", t))

    print(f"{'kernel':28s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for name, t in rows:
        py, cy = t["python"], t.get("cython")
        unit = 1.0 if name.startswith("compile") else 1e6
        suffix = " s" if name.startswith("compile") else " us"
        cy_s = f"{cy * unit:10.2f}{suffix}" if cy is not None else "-"
        sp = f"{py / cy:7.1f}x" if cy else "-"
        print(f"{name:28s} {py * unit:10.2f}{suffix} {cy_s:>12s} {sp:>8s}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({name: t for name, t in rows}, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
