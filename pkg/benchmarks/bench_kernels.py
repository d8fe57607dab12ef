"""Compare the compiled and pure-Python kernels on representative inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--json]

Every workload is first run through both implementations and the results
compared, so a speedup is never reported for diverging code.
"""
import argparse
import json
import random
import sys
import timeit

from orbitrel.kernels import implementations


def workloads(seed=0):
    rng = random.Random(seed)
    big = [rng.randint(-10 ** 40, 10 ** 40) for _ in range(64)]
    small = [rng.randint(-9, 9) for _ in range(256)]
    yield "conv_trunc 64 digits x 10^40", "conv_trunc", (big, big[::-1], 64)
    yield "conv_trunc 256 small digits", "conv_trunc", (small, small[::-1], 256)
    yield "mann_box_search n=3, box 12", "mann_box_search", ([7, -3, 5], 2, 64, 12, False)
    yield "mann_box_search homogeneous n=3", "mann_box_search", ([4, -1, -3], 3, 0, 10, True)
    rows = [[1, -2, 1], [-1, 1, 2], [2, 1, -1]]
    yield "box_points n=3, box 20", "box_points", (rows, [5, 9, 12], [0, 0, 0], [20, 20, 20], 10 ** 6)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="timing repetitions (best is kept)")
    ap.add_argument("--json", action="store_true", help="print results as JSON")
    args = ap.parse_args(argv)

    impls = implementations()
    if "cython" not in impls:
        print("compiled kernels are not built; only the Python fallback is available",
              file=sys.stderr)
    rows = []
    for label, name, call_args in workloads():
        outs = {k: getattr(m, name)(*call_args) for k, m in impls.items()}
        ref = [tuple(x) if isinstance(x, (list, tuple)) else x for x in outs["python"]]
        for k, out in outs.items():
            got = [tuple(x) if isinstance(x, (list, tuple)) else x for x in out]
            if got != ref:
                raise SystemExit(f"{k} disagrees with python on {label}")
        times = {}
        for k, m in impls.items():
            fn = getattr(m, name)
            number = 1
            while timeit.timeit(lambda: fn(*call_args), number=number) < 0.05:
                number *= 2
            best = min(timeit.repeat(lambda: fn(*call_args), number=number, repeat=args.repeat))
            times[k] = best / number
        rows.append({"workload": label, "seconds": times,
                     "speedup": times["python"] / times["cython"] if "cython" in times else None})

    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'workload':36s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for r in rows:
        cy = r["seconds"].get("cython")
        print(f"{r['workload']:36s} {r['seconds']['python'] * 1e3:10.3f}ms "
              + (f"{cy * 1e3:10.3f}ms {r['speedup']:7.1f}x" if cy is not None else f"{'-':>12s} {'-':>8s}"))


if __name__ == "__main__":
    main()
