"""Single-parameter persistence landscapes evaluated from barcodes.

The k-th landscape at t is the k-th largest tent value over the bars,
where the tent of a bar (b, d] is max(0, min(t - b, d - t)).  Evaluation
selects the k-th largest among the tent values at each query point
rather than precomputing a piecewise-linear structure.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .reduction import Bar, Barcode


def tent(bar: Bar, t: float) -> float:
    """Tent value of a single bar; death = inf gives max(0, t - birth)."""
    up = t - bar.birth
    down = bar.death - t
    return max(0.0, min(up, down))


def _tent_matrix(barcode: Barcode, ts: np.ndarray) -> np.ndarray:
    b = barcode.births[:, None]
    d = barcode.deaths[:, None]
    vals = np.minimum(ts[None, :] - b, d - ts[None, :])
    return np.maximum(vals, 0.0)


def landscape_eval(barcode: Barcode, k: int, t: float) -> float:
    """k-th largest tent value at t; 0 if fewer than k positive tents."""
    if k < 1:
        raise InputError("k must be >= 1")
    n = len(barcode)
    if n < k:
        return 0.0
    vals = _tent_matrix(barcode, np.array([float(t)]))[:, 0]
    return float(np.partition(vals, n - k)[n - k])


def landscape_profile(barcode: Barcode, k_max: int, ts) -> np.ndarray:
    """Matrix (k_max, len(ts)) of landscape values; ts must be sorted."""
    if k_max < 1:
        raise InputError("k_max must be >= 1")
    ts = np.asarray(ts, np.float64)
    if np.any(np.diff(ts) < 0):
        raise InputError("query times must be sorted")
    out = np.zeros((k_max, len(ts)))
    n = len(barcode)
    if n == 0 or len(ts) == 0:
        return out
    vals = _tent_matrix(barcode, ts)
    kk = min(k_max, n)
    if n > kk:
        vals = -np.partition(-vals, kk - 1, axis=0)[:kk]
        vals.sort(axis=0)
        vals = vals[::-1]
    else:
        vals = -np.sort(-vals, axis=0)
    out[:kk] = vals[:kk]
    return out
