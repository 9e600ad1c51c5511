"""Benchmark of the bitmap kernels: compiled extension vs pure Python.

Measures the three hot paths of the detection phase: per-access inserts,
membership checks, and pairwise segment conflict tests on populated
address sets. Workload shapes mimic real segments: mostly dense local
traffic, a sprinkle of far addresses.
"""

from __future__ import annotations

import time

from .bitmap import available_backends
from .machine import splitmix64


def _addresses(n: int, seed: int = 7) -> list:
    out = []
    state = seed
    for i in range(n):
        if i % 8 == 7:
            state, value = splitmix64(state)
            out.append(value & 0xFFFFFFFC)
        else:
            out.append(0x00001000 + 4 * (i % 4096))
    return out


def _time(fn) -> float:
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def _segment_pairs(impl, pairs: int):
    state = 99
    segs = []
    for _ in range(32):
        loads, stores = impl.BitmapCore(), impl.BitmapCore()
        for _ in range(64):
            state, value = splitmix64(state)
            loads.insert(0x2000 + (value & 0x3FF) * 4)
            state, value = splitmix64(state)
            stores.insert(0x2000 + (value & 0x3FF) * 4)
        segs.append((loads, stores))
    out = []
    for i in range(pairs):
        a = segs[i % len(segs)]
        b = segs[(i * 7 + 3) % len(segs)]
        out.append((a, b))
    return out


def run_benchmark(inserts: int = 200_000, pairs: int = 2_000) -> dict:
    backends = available_backends()
    addresses = _addresses(inserts)
    results = {}
    for name, impl in backends.items():
        bm = impl.BitmapCore()

        def do_inserts():
            for a in addresses:
                bm.insert(a)

        def do_lookups():
            for a in addresses:
                bm.contains(a)

        pair_list = _segment_pairs(impl, pairs)

        def do_pairs():
            for (la, sa), (lb, sb) in pair_list:
                impl.race_witnesses(la, sa, lb, sb)

        results[name] = {
            "insert": inserts / _time(do_inserts),
            "contains": inserts / _time(do_lookups),
            "race_test": pairs / _time(do_pairs),
        }

    print(f"{'backend':<8} {'insert/s':>12} {'contains/s':>12} {'race tests/s':>13}")
    for name, row in results.items():
        print(f"{name:<8} {row['insert']:>12.0f} {row['contains']:>12.0f} "
              f"{row['race_test']:>13.0f}")
    if "ext" in results and "py" in results:
        for op in ("insert", "contains", "race_test"):
            speedup = results["ext"][op] / results["py"][op]
            print(f"ext/py speedup {op}: {speedup:.1f}x")
    else:
        print("compiled extension unavailable; measured pure Python only")
    return results
