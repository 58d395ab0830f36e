"""Compare the compiled kernels against the NumPy/SciPy fallback.

Times the per-edge primitives on random regular graphs, then times whole
training epochs in subprocesses with CGBP_KERNELS forcing each backend.

    python3 benchmarks/kernel_backends.py --sizes 1000,10000,100000
"""

import argparse
import csv
import os
import subprocess
import sys
import time

import numpy as np

import cgbp._pykernels as pyk
from cgbp.graph import generate_regular

try:
    import cgbp._ckernels as ck
except ImportError:
    ck = None

_TRAIN_SNIPPET = """
import json
from cgbp.graph import generate_regular
from cgbp.hamiltonians import ProblemEncoding
from cgbp.kernels import BACKEND
from cgbp.training import ChaoticConfig, train

g = generate_regular({n}, {d}, seed=0)
r = train(g, ProblemEncoding("mc"), chaotic=ChaoticConfig(),
          epochs={epochs}, seed=0, patience={epochs})
print(json.dumps({{"backend": BACKEND, "epoch_seconds": r.epoch_seconds}}))
"""


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def op_rows(sizes, degree, repeats):
    rows = []
    for n in sizes:
        g = generate_regular(n, degree, seed=0)
        eu = g.edge_list[:, 0]
        ev = g.edge_list[:, 1]
        rng = np.random.default_rng(0)
        p = rng.uniform(size=n)
        pq = rng.dirichlet(np.ones(4), size=n)
        h = rng.normal(size=(n, 16))
        x = rng.integers(0, 2, size=n)
        weights = np.ones(g.neighbor_ids.shape[0])
        ops = [
            ("csr_weighted_sum", lambda m: m.csr_weighted_sum(
                g.row_offsets, g.neighbor_ids, weights, h)),
            ("mis_loss_grad", lambda m: m.mis_loss_grad(eu, ev, p, 2.0)),
            ("mc_loss_grad", lambda m: m.mc_loss_grad(eu, ev, p)),
            ("gc_loss_grad", lambda m: m.gc_loss_grad(eu, ev, pq)),
            ("cut_count", lambda m: m.cut_count(eu, ev, x)),
        ]
        for name, call in ops:
            t_py = _best_of(lambda: call(pyk), repeats)
            t_c = _best_of(lambda: call(ck), repeats) if ck else None
            rows.append({"op": name, "n": n,
                         "python_us": t_py * 1e6,
                         "compiled_us": None if t_c is None else t_c * 1e6})
    return rows


def epoch_rows(n, degree, epochs):
    rows = []
    for backend in ("python", "compiled"):
        if backend == "compiled" and ck is None:
            continue
        env = dict(os.environ, CGBP_KERNELS=backend)
        code = _TRAIN_SNIPPET.format(n=n, d=degree, epochs=epochs)
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        import json
        info = json.loads(out.stdout.strip().splitlines()[-1])
        assert info["backend"] == backend, info
        rows.append({"op": f"train_epoch(n={n})", "n": n,
                     "backend": backend,
                     "ms_per_epoch": info["epoch_seconds"] * 1e3})
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--degree", type=int, default=3)
    ap.add_argument("--repeats", type=int, default=7)
    ap.add_argument("--train-size", type=int, default=10000)
    ap.add_argument("--epochs", type=int, default=200)
    ap.add_argument("--skip-train", action="store_true")
    ap.add_argument("--out", default=None, help="also write rows as CSV")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]

    if ck is None:
        print("compiled backend not available; timing the fallback only")

    rows = op_rows(sizes, args.degree, args.repeats)
    print(f"{'op':<18}{'n':>9}{'python':>12}{'compiled':>12}{'speedup':>9}")
    for r in rows:
        c = r["compiled_us"]
        speed = "" if c is None else f"{r['python_us'] / c:8.2f}x"
        cstr = "" if c is None else f"{c:10.1f}us"
        print(f"{r['op']:<18}{r['n']:>9}{r['python_us']:>10.1f}us"
              f"{cstr:>12}{speed:>9}")

    if not args.skip_train:
        print()
        for r in epoch_rows(args.train_size, args.degree, args.epochs):
            print(f"{r['op']:<28}{r['backend']:>10}"
                  f"{r['ms_per_epoch']:>10.2f} ms/epoch")
            rows.append(r)

    if args.out:
        keys = sorted({k for r in rows for k in r})
        with open(args.out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=keys)
            writer.writeheader()
            writer.writerows(rows)
        print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()
