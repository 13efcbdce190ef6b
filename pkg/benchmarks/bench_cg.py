"""Time the compiled stencil CG kernel against the numpy fallback.

Both kernels solve the same W0 manufactured problem; the script reports the
wall time per solve, the iteration counts and the largest difference between
the two solutions.

    python benchmarks/bench_cg.py --h 0.05 0.025 --repeat 3
"""

import argparse
import time

import numpy as np

from cigardeform import _cg_python
from cigardeform import eigensolve as es

try:
    from cigardeform import _cg_kernel
except ImportError:
    _cg_kernel = None


def _problem(h, xi_max=6.0, x_max=4.0):
    grid = es.HalfStripGrid(xi_max, x_max, h)
    op = es.assemble(grid)
    b = es._boundary_rhs(es.w0_boundary(grid).values)
    return grid, op, b


def time_kernel(kernel, b, diag, tol, budget, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        x, it, rel, ok = kernel.cg_stencil(b, diag, tol, budget)
        best = min(best, time.perf_counter() - t0)
    return best, x, it, rel, ok


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--h", type=float, nargs="+", default=[0.1, 0.05, 0.025])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--tol", type=float, default=1e-10)
    args = ap.parse_args(argv)

    kernels = [("python", _cg_python)]
    if _cg_kernel is not None:
        kernels.insert(0, ("compiled", _cg_kernel))
    else:
        print("compiled kernel not built; timing the numpy fallback only")

    print(f"{'h':>7} {'unknowns':>9} {'kernel':>9} {'iters':>6} {'seconds':>9} {'speedup':>8} {'max |diff|':>11}")
    for h in args.h:
        grid, op, b = _problem(h)
        budget = es.SolverConfig().iteration_budget(grid)
        runs = {name: time_kernel(k, b, op.scaled_diag, args.tol, budget, args.repeat) for name, k in kernels}
        ref_t, ref_x = runs["python"][0], runs["python"][1]
        for name, (t, x, it, rel, ok) in runs.items():
            diff = float(np.abs(x - ref_x).max())
            print(f"{h:7.4f} {b.size:9d} {name:>9} {it:6d} {t:9.4f} {ref_t / t:8.2f} {diff:11.2e}")


if __name__ == "__main__":
    main()
