"""Benchmark the numba kernels against the pure-Python/numpy fallbacks.

Runs the birth-death chain simulator and the exhaustive subset scan on the
same inputs with both backends and prints wall-clock timings plus the
speedup.  Usage:

    python benchmarks/bench_kernels.py [--samples N] [--scan-bits K]

The first numba call includes JIT compilation; a warm-up run is timed
separately so the steady-state numbers are comparable.
"""

import argparse
import time

import numpy as np

from graphlap.accel import NUMBA_ENABLED
from graphlap.kernels import (
    ZIG_FI,
    ZIG_KI,
    ZIG_WI,
    _np_subset_scan,
    _py_chain,
    run_subset_scan,
)
from graphlap.simulate import _U64_MAX, _to_u64


def chain_inputs(nmax=2000):
    k = np.arange(nmax, dtype=float)
    up = (k + 1.0) ** 3
    down = np.where(k > 0, k**3, 0.0)
    n = up + down
    a = _to_u64(up / n)
    b = np.full(nmax, _U64_MAX)  # no killing
    inv_rate = 1.0 / n
    return a, b, inv_rate


def scan_inputs(rng, nbits):
    bd = np.triu(rng.random((nbits, nbits)) * (rng.random((nbits, nbits)) < 0.4), 1)
    bd = bd + bd.T
    c = np.where(rng.random(nbits) < 0.5, rng.uniform(0, 1, nbits), 0.0)
    degb = bd.sum(axis=1)
    return bd, degb, c, rng.uniform(0.1, 2.0, nbits), degb + c


def timeit(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--scan-bits", type=int, default=20)
    args = ap.parse_args()

    print(f"numba backend available: {NUMBA_ENABLED}")

    # ---- chain simulation -------------------------------------------
    a, b, inv = chain_inputs()
    cp0 = np.zeros(0, dtype=np.int64)
    cs0 = np.zeros(0)
    chain_args = (0, 0.5, 10**6, a, b, inv, cp0, cs0, 7, False, ZIG_KI, ZIG_WI, ZIG_FI)
    # the fallback runs the same semantics orders of magnitude slower, so it
    # gets a smaller batch and the comparison is per-sample
    py_samples = max(10, args.samples // 100)

    rows = []
    if NUMBA_ENABLED:
        from graphlap.kernels import _nb_chain

        _, t_compile = timeit(lambda: _nb_chain(10, *chain_args))
        out_nb, t_nb = timeit(lambda: _nb_chain(args.samples, *chain_args))
        rows.append(
            (
                f"chain (numba, {args.samples} samples)",
                t_nb,
                f"compile+first call: {t_compile:.2f}s",
            )
        )
    out_py, t_py = timeit(lambda: _py_chain(py_samples, *chain_args))
    rows.append((f"chain (python fallback, {py_samples} samples)", t_py, ""))
    if NUMBA_ENABLED:
        same = all(np.array_equal(x[:py_samples], y) for x, y in zip(out_nb, out_py))
        rows.append(("chain outputs identical (shared samples)", None, str(same)))
        per_nb = t_nb / args.samples
        per_py = t_py / py_samples
        rows.append(("chain per-sample speedup", None, f"{per_py / per_nb:.0f}x"))

    # ---- subset scan ------------------------------------------------
    rng = np.random.default_rng(0)
    scan = scan_inputs(rng, args.scan_bits)
    if NUMBA_ENABLED:
        from graphlap.kernels import _nb_subset_scan

        small = scan_inputs(rng, 4)
        _, t_compile = timeit(lambda: _nb_subset_scan(*small))
        (r_nb, m_nb), t_nb = timeit(lambda: _nb_subset_scan(*scan))
        rows.append(
            (f"subset scan {args.scan_bits} bits (numba)", t_nb, f"compile: {t_compile:.2f}s")
        )
    (r_np, m_np), t_np = timeit(lambda: _np_subset_scan(*scan))
    rows.append((f"subset scan {args.scan_bits} bits (numpy fallback)", t_np, ""))
    if NUMBA_ENABLED:
        agree = np.allclose(r_nb, r_np, rtol=1e-12, atol=1e-14) and np.array_equal(m_nb, m_np)
        rows.append(("scan results agree", None, str(agree)))
        rows.append(("scan speedup", None, f"{t_np / t_nb:.1f}x"))

    # dispatcher sanity: public entry point works regardless of backend
    run_subset_scan(*scan_inputs(rng, 8))

    print()
    for name, secs, note in rows:
        stamp = f"{secs:8.3f}s" if secs is not None else " " * 9
        print(f"  {name:45s} {stamp}  {note}")


if __name__ == "__main__":
    main()
