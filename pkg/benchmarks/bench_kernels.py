"""Compare the compiled brute-force kernel with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hypernorm import _backend, catalog
from hypernorm.engine import Budget, _brute, _tables
from hypernorm.measure import DiscreteMeasureSpace
from hypernorm.rng import sample_values, stream

CASES = [
    ("U_2", catalog.make_gowers(2), 8),
    ("U_2", catalog.make_gowers(2), 16),
    ("U_3", catalog.make_gowers(3), 4),
    ("S_6", catalog.make_schatten(6), 5),
    ("sqrt2", catalog.sqrt2_pair(), 12),
]


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def run(repeat: int = 5) -> list[dict]:
    rows = []
    budget = Budget(terms=10 ** 12)
    for name, h, n in CASES:
        space = DiscreteMeasureSpace.counting(n)
        vals = sample_values(stream(0, 99, n), (n,) * h.k, "complex")
        tables = _tables([(h, vals)], h.k)
        out = {}
        for label, mod in (("compiled", _backend.kernels if _backend.COMPILED else None),
                           ("fallback", _backend.fallback)):
            if mod is None:
                continue
            res = _brute(h.dims, tables, space.weights, 1, budget, kernels=mod)
            out[label] = (_time(lambda m=mod: _brute(h.dims, tables, space.weights, 1, budget, kernels=m), repeat),
                          res)
        row = {"pair": name, "n": n, "terms": n ** sum(h.dims)}
        for label, (sec, _) in out.items():
            row[label] = sec
        if len(out) == 2:
            a, b = out["compiled"][1], out["fallback"][1]
            row["speedup"] = out["fallback"][0] / out["compiled"][0]
            row["rel_diff"] = abs(a - b) / max(abs(b), 1e-300)
        rows.append(row)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"backend: {_backend.NAME}")
    print(f"{'pair':<6} {'n':>3} {'terms':>12} {'compiled s':>11} {'fallback s':>11} {'speedup':>8} {'rel diff':>9}")
    for r in run(args.repeat):
        comp = f"{r['compiled']:.4f}" if "compiled" in r else "-"
        sp = f"{r['speedup']:.1f}x" if "speedup" in r else "-"
        rd = f"{r['rel_diff']:.1e}" if "rel_diff" in r else "-"
        print(f"{r['pair']:<6} {r['n']:>3} {r['terms']:>12} {comp:>11} {r['fallback']:>11.4f} {sp:>8} {rd:>9}")


if __name__ == "__main__":
    main()
