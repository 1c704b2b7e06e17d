"""Compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Times the primal simplex loop on random packing LPs, the dual simplex loop
after appending violated rows, and the exhaustive QPBF minimiser, and
checks that both backends return the same answers.  A final section times
a full n=7 bound computation under each backend in a subprocess.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from unionbound import _core_py

try:
    from unionbound import _core
except ImportError:
    _core = None

TOL = (1e-9, 1e-10, 1e-9)


def packing_tableau(m: int, n: int, seed: int):
    """``max c.x, A x <= b, x >= 0`` as a minimisation tableau with slack basis."""
    rng = np.random.default_rng(seed)
    A = rng.random((m, n))
    b = rng.random(m) * n / 2 + 1.0
    c = rng.random(n)
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = np.arange(n, n + m, dtype=np.int64)
    return T, basis


def time_primal(impl, m, n, seed, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        T, basis = packing_tableau(m, n, seed)
        allowed = np.ones(T.shape[1] - 1, dtype=np.uint8)
        t = time.perf_counter()
        status, it = impl.run_simplex(T, basis, allowed, 100_000, *TOL, 1)
        best = min(best, time.perf_counter() - t)
        out = (status, it, -T[-1, -1])
    return best, out


def time_dual(impl, m, n, seed, repeat):
    rng = np.random.default_rng(seed + 1)
    T0, basis0 = packing_tableau(m, n, seed)
    allowed = np.ones(T0.shape[1] - 1, dtype=np.uint8)
    impl.run_simplex(T0, basis0, allowed, 100_000, *TOL, 1)
    x = np.zeros(T0.shape[1] - 1)
    x[basis0] = T0[:-1, -1]
    # rows sum(x_S) <= 0.8 * current value over random supports
    k = m // 4
    G = (rng.random((k, n)) < 0.3).astype(float)
    h = 0.8 * (G @ x[:n])
    best, out = np.inf, None
    for _ in range(repeat):
        mm, N = T0.shape[0] - 1, T0.shape[1] - 1
        T = np.zeros((mm + k + 1, N + k + 1))
        T[:mm, :N] = T0[:mm, :N]
        T[:mm, -1] = T0[:mm, -1]
        T[-1, :N] = T0[-1, :N]
        T[-1, -1] = T0[-1, -1]
        new = np.zeros((k, N + k + 1))
        new[:, :n] = G
        new[:, N:N + k] = np.eye(k)
        new[:, -1] = h
        basis = np.concatenate([basis0, N + np.arange(k)])
        new -= new[:, basis0] @ T[:mm]
        T[mm:mm + k] = new
        allow = np.ones(N + k, dtype=np.uint8)
        t = time.perf_counter()
        status, it = impl.run_dual_simplex(T, basis, allow, 100_000, *TOL)
        best = min(best, time.perf_counter() - t)
        out = (status, it, -T[-1, -1])
    return best, out


def time_qpbf(impl, n, seed, repeat):
    rng = np.random.default_rng(seed)
    a1 = rng.normal(size=n)
    a2 = np.triu(rng.normal(size=(n, n)), 1)
    a2 = a2 + a2.T
    best, out = np.inf, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = impl.qpbf_min(0.5, a1, a2)
        best = min(best, time.perf_counter() - t)
    return best, out


def end_to_end(pure: bool) -> float:
    code = ("import time; from unionbound import bench; t=time.perf_counter(); "
            "bench.run_records([7], 5, 0, bench.MODELS); print(time.perf_counter()-t)")
    env = dict(os.environ, UNIONBOUND_PURE="1" if pure else "0")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(res.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller sizes, no end-to-end run")
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled extension not built; only the fallback can run")
        return 1

    sizes = [(60, 80), (150, 200)] if args.quick else [(60, 80), (150, 200), (300, 400)]
    qn = [12, 16] if args.quick else [12, 16, 20]
    print(f"{'kernel':<28}{'compiled s':>12}{'python s':>12}{'speedup':>10}  agree")
    for m, n in sizes:
        tc, oc = time_primal(_core, m, n, 7, args.repeat)
        tp, op = time_primal(_core_py, m, n, 7, args.repeat)
        agree = oc[0] == op[0] and abs(oc[2] - op[2]) < 1e-7
        print(f"{f'primal {m}x{n}':<28}{tc:>12.4f}{tp:>12.4f}{tp / tc:>10.1f}  {agree}")
    for m, n in sizes:
        tc, oc = time_dual(_core, m, n, 7, args.repeat)
        tp, op = time_dual(_core_py, m, n, 7, args.repeat)
        agree = oc[0] == op[0] and abs(oc[2] - op[2]) < 1e-7
        print(f"{f'dual {m}x{n}':<28}{tc:>12.4f}{tp:>12.4f}{tp / tc:>10.1f}  {agree}")
    for n in qn:
        tc, oc = time_qpbf(_core, n, 3, args.repeat)
        tp, op = time_qpbf(_core_py, n, 3, args.repeat)
        agree = oc[1] == op[1] and abs(oc[0] - op[0]) < 1e-9
        print(f"{f'qpbf_min n={n}':<28}{tc:>12.4f}{tp:>12.4f}{tp / tc:>10.1f}  {agree}")
    if not args.quick:
        tc, tp = end_to_end(False), end_to_end(True)
        print(f"{'all models, 5 x n=7':<28}{tc:>12.2f}{tp:>12.2f}{tp / tc:>10.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
