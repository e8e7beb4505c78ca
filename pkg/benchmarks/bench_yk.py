"""Time the compiled and numpy screening-potential kernels.

Two measurements per grid size:

* ``kernel``: one ``yk_sym_batch`` call on a batch of densities
* ``energy+grad``: one closed-form energy and gradient evaluation, which
  is what the optimiser does each iteration

Usage::

    python benchmarks/bench_yk.py --sizes 220 400 800 --batch 12 --repeat 50
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from spdbreak import kernels
from spdbreak.energy import EnergyFunctional
from spdbreak.grid import make_log_grid
from spdbreak.slater_condon import HamiltonianParams
from spdbreak.solver import hydrogenic_orbitals


def _best(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_kernel(n: int, batch: int, repeat: int, rng) -> dict:
    grid = make_log_grid(n)
    idx, wts = grid.interval_tables
    rho = rng.normal(size=(batch, n)) * grid.r**2 * np.exp(-grid.r)
    ks = np.arange(batch, dtype=np.intp) % 5
    args = (rho, ks, grid.r, grid.w, idx, wts)
    out = {"numpy": _best(lambda: kernels.yk_sym_batch_py(*args), repeat)}
    if kernels.BACKEND == "cython":
        out["cython"] = _best(lambda: kernels.yk_sym_batch(*args), repeat)
        out["max_diff"] = float(np.max(np.abs(kernels.yk_sym_batch(*args) - kernels.yk_sym_batch_py(*args))))
    return out


def bench_energy(n: int, repeat: int) -> dict:
    grid = make_log_grid(n)
    fun = EnergyFunctional("sp+pd", "J1", grid, HamiltonianParams())
    X = hydrogenic_orbitals(grid, 4.0)
    c = np.full(5, 5**-0.5)
    compiled = kernels.yk_sym_batch
    out = {}
    try:
        kernels.yk_sym_batch = kernels.yk_sym_batch_py
        out["numpy"] = _best(lambda: fun.energy_and_gradient(X, c), repeat)
    finally:
        kernels.yk_sym_batch = compiled
    if kernels.BACKEND == "cython":
        out["cython"] = _best(lambda: fun.energy_and_gradient(X, c), repeat)
    return out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[220, 400, 800])
    ap.add_argument("--batch", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    print(f"active backend: {kernels.BACKEND}")
    if kernels.BACKEND != "cython":
        print("compiled extension not available; timing the numpy path only")
    print(f"{'n':>6} {'what':<12} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8} {'max |diff|':>11}")
    for n in args.sizes:
        for what, res in (("kernel", bench_kernel(n, args.batch, args.repeat, rng)),
                          ("energy+grad", bench_energy(n, max(3, args.repeat // 5)))):
            py = res["numpy"] * 1e3
            cy = res.get("cython")
            cy_s = f"{cy * 1e3:10.3f}" if cy else f"{'-':>10}"
            sp_s = f"{res['numpy'] / cy:8.1f}" if cy else f"{'-':>8}"
            diff = f"{res['max_diff']:11.1e}" if "max_diff" in res else f"{'':>11}"
            print(f"{n:>6} {what:<12} {py:10.3f} {cy_s} {sp_s} {diff}")


if __name__ == "__main__":
    main()
