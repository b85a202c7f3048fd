"""Benchmark the JIT kernels against the pure-numpy fallbacks.

Two workload shapes matter in practice:
  * batched dilogarithms over large arrays (potential evaluation), and
  * many repeated residual/Jacobian assemblies over small term tables
    (the Newton solver calls these thousands of times per multi-start).

Both implementations stay importable regardless of the LINKVOL_PURE_NUMPY
flag, so this script compares them in a single process. An optional
end-to-end section reruns the parabolic multi-start in two subprocesses,
one per backend.

Usage: python3 benchmarks/bench_kernels.py [--end-to-end]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from linkvol import _examples, _kernels, diagram, potential


def best_of(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def random_dilog_args(n, rng):
    # cover all four evaluation regimes: |z| small, |z| large, near 1,
    # and the Bernoulli annulus in between
    r = rng.uniform(0.05, 4.0, n)
    th = rng.uniform(-np.pi, np.pi, n)
    return np.ascontiguousarray(r * np.exp(1j * th))


def bench_dilog(rng):
    print("batched dilogarithm")
    print(f"  {'points':>8}  {'numpy':>10}  {'jit':>10}  {'speedup':>7}")
    for n in (1_000, 10_000, 100_000):
        z = random_dilog_args(n, rng)
        ref = _kernels.dilog_many_numpy(z)
        got = _kernels.dilog_many_jit(z)
        assert np.max(np.abs(ref - got)) < 1e-13
        t_np = best_of(lambda: _kernels.dilog_many_numpy(z))
        t_jit = best_of(lambda: _kernels.dilog_many_jit(z))
        print(f"  {n:>8}  {t_np * 1e3:>8.2f}ms  {t_jit * 1e3:>8.2f}ms"
              f"  {t_np / t_jit:>6.1f}x")


def bench_terms(rng):
    print("term-table assembly (10000 calls, Newton-shaped workload)")
    print(f"  {'diagram':>10}  {'kernel':>14}  {'numpy':>10}  {'jit':>10}"
          f"  {'speedup':>7}")
    cases = (("fig-eight", _examples.FIG8_PD),
             ("whitehead", _examples.WHITEHEAD_PD))
    for name, pd in cases:
        d = diagram.load_diagram(pd)
        t = potential._tables(d)
        w_ext = np.concatenate([
            rng.standard_normal(d.n_regions)
            + 1j * rng.standard_normal(d.n_regions), [1.0 + 0j]])
        m_ext = np.concatenate([
            np.full(d.n_components, 1.05 + 0.2j), [1.0 + 0j]])
        row, kind, sign, n1, n2, d1, d2, mi, mexp = t.wdw
        args = (w_ext, m_ext, row, kind, sign, n1, n2, d1, d2, mi, mexp,
                t.n_w)

        for label, fn_np, fn_jit in (
                ("residual", _kernels.eval_terms_numpy,
                 _kernels.eval_terms_jit),
                ("residual+jac", _kernels.eval_terms_jac_numpy,
                 _kernels.eval_terms_jac_jit)):
            ref = fn_np(*args)
            got = fn_jit(*args)
            if label == "residual":
                assert np.max(np.abs(ref - got)) < 1e-13
            else:
                assert np.max(np.abs(ref[0] - got[0])) < 1e-13
                assert np.max(np.abs(ref[1] - got[1])) < 1e-13

            def many(fn):
                for _ in range(10_000):
                    fn(*args)

            t_np = best_of(lambda: many(fn_np), repeats=3)
            t_jit = best_of(lambda: many(fn_jit), repeats=3)
            print(f"  {name:>10}  {label:>14}  {t_np * 1e3:>8.1f}ms"
                  f"  {t_jit * 1e3:>8.1f}ms  {t_np / t_jit:>6.1f}x")


_E2E_SNIPPET = """
import time
from linkvol import diagram, engine, _examples, _kernels
_kernels.warmup()
d = diagram.load_diagram(_examples.FIG8_PD)
t0 = time.perf_counter()
for _ in range(5):
    sols = engine.multi_start(d, [complex(1.0)])
print(f"{(time.perf_counter() - t0) / 5:.3f} s/run, "
      f"{len(sols)} solutions, jit={_kernels.USE_JIT}")
"""


def bench_end_to_end():
    print("end-to-end parabolic multi-start (64 seeds, figure-eight)")
    for label, extra in (("jit", {}), ("numpy", {"LINKVOL_PURE_NUMPY": "1"})):
        env = dict(os.environ, **extra)
        out = subprocess.run([sys.executable, "-c", _E2E_SNIPPET], env=env,
                             capture_output=True, text=True, check=True)
        print(f"  {label:>6}: {out.stdout.strip()}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--end-to-end", action="store_true",
                    help="also time multi_start in one subprocess per "
                         "backend")
    args = ap.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; the 'jit' columns fall back to the "
              "plain python loops")
    _kernels.warmup()
    rng = np.random.default_rng(0)
    bench_dilog(rng)
    bench_terms(rng)
    if args.end_to_end:
        bench_end_to_end()


if __name__ == "__main__":
    main()
