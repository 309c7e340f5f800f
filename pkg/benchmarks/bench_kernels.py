"""Compare the compiled kernels with the interpreted fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Times the associativity scan, the three Cayley-graph SCC passes and defect
counting on the same inputs through both backends, and checks that they agree.
"""
import argparse
import time
from fractions import Fraction

import numpy as np

from sofic import _backend
from sofic.fixtures import load_fixture
from sofic.witness import diagonal_power_exponent, diagonal_power_witness


def best_of(fn, repeat):
    best, out = None, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, out


def workloads():
    T4 = load_fixture("T4")
    T3 = load_fixture("T3")
    K = T3.elements()[:10]
    eps = Fraction(1, 2)
    while diagonal_power_exponent(T3, K, eps)[0] < 4:   # N = 27^4 points
        eps /= 2
    W = diagonal_power_witness(T3, K, eps)
    pos = {e: i for i, e in enumerate(W.encodings)}
    kidx = [pos[T3.encode(k)] for k in K]
    triples = np.array([(pos[T3.encode(g)], pos[T3.encode(h)], pos[T3.encode(T3.multiply(g, h))])
                        for g in K for h in K], dtype=np.int64)
    pairs = np.array([(a, b) for i, a in enumerate(kidx) for b in kidx[i + 1:]], dtype=np.int64)
    one = pos[T3.encode(T3.one)]
    return [
        ("associativity T3 (27^3)", lambda k: k.find_nonassociative(T3.table)),
        ("associativity T4 (256^3)", lambda k: k.find_nonassociative(T4.table)),
        ("SCC x3 on T4", lambda k: [k.scc_labels(T4.table, m).tolist() for m in (0, 1, 2)]),
        (f"defects on N={W.N}", lambda k: [np.asarray(a).tolist() if not isinstance(a, int) else a
                                           for a in k.count_defects(W.tables, triples, pairs,
                                                                    one, 0, W.N)]),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = _backend.available()
    print(f"backends: {', '.join(backends)}")
    print(f"{'workload':<28}" + "".join(f"{b:>12}" for b in backends) + "     speedup")
    for name, fn in workloads():
        times, outs = [], []
        for b in backends:
            k = _backend.get(b)
            dt, out = best_of(lambda: fn(k), args.repeat)
            times.append(dt)
            outs.append(out)
        assert all(o == outs[0] for o in outs), f"backends disagree on {name}"
        speed = f"{times[-1] / times[0]:10.1f}x" if len(times) > 1 else ""
        print(f"{name:<28}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
