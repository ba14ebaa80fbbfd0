"""Benchmark the two boundary-reduction backends on a realistic workload.

Builds one noisy two-circle filtration, pushes it onto a handful of
diagonal slices and times the full barcode computation with the numba
kernel and with the pure-numpy fallback.  The same comparison can be
forced process-wide by setting MPLANDS_DISABLE_NUMBA=1 before import.

Usage: python benchmarks/bench_reduction.py [--points 40] [--slices 6]
"""

import argparse
import time

import numpy as np

from mplands import _kernels
from mplands.bifilt import build_function_rips, push_to_line
from mplands.datagen import gen_circles
from mplands.reduction import compute_barcode


def time_backend(name, kernel, filtrations, hom_dim):
    previous = _kernels.reduce_columns
    _kernels.reduce_columns = kernel
    try:
        t0 = time.perf_counter()
        checksum = 0.0
        for filt in filtrations:
            bc = compute_barcode(filt, hom_dim)
            checksum += float(bc.births.sum() + bc.deaths[np.isfinite(bc.deaths)].sum())
        dt = time.perf_counter() - t0
    finally:
        _kernels.reduce_columns = previous
    return dt, checksum


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=40, help="points per circle")
    ap.add_argument("--slices", type=int, default=6)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    sample = gen_circles(args.points, "A", 0.3, seed=args.seed)
    cx = build_function_rips(sample.distances, sample.vertex_values,
                             max_scale=6.0, max_dim=2)
    n_tri = int((cx.dims == 2).sum())
    print(f"complex: {len(cx)} simplices ({n_tri} triangles), "
          f"{args.slices} diagonal slices, H1")

    filtrations = [push_to_line(cx, (2.0 + 0.2 * s, 0.1 * s), (1.0, 1.0))
                   for s in range(args.slices)]

    if _kernels._reduce_columns_numba is not None:
        # warm up the JIT before timing
        compute_barcode(filtrations[0], 1)
        t_nb, c_nb = time_backend("numba", _kernels._reduce_columns_numba,
                                  filtrations, 1)
        print(f"numba : {t_nb:8.3f} s  ({t_nb / args.slices * 1000:7.1f} ms/slice)")
    else:
        t_nb = c_nb = None
        print("numba : unavailable (MPLANDS_DISABLE_NUMBA set or numba missing)")

    t_np, c_np = time_backend("numpy", _kernels._reduce_columns_py, filtrations, 1)
    print(f"numpy : {t_np:8.3f} s  ({t_np / args.slices * 1000:7.1f} ms/slice)")

    if t_nb is not None:
        assert c_nb == c_np, "backends disagree"
        print(f"speedup: {t_np / t_nb:.1f}x, identical barcodes")


if __name__ == "__main__":
    main()
