"""Hot selection kernels: numba-jitted loops with a pure-numpy fallback.

The greedy cover ordering is O(n_tests^2 * n_units) and the cumulative
fault-union count is O(n_tests * n_faults); on large industrial matrices
these two loops dominate end-to-end runtime, so both ship in a jitted and
a vectorized flavor.  The active flavor is chosen once, at import time,
from the ``TESTYIELD_BACKEND`` environment variable:

    auto   use numba when importable, else numpy (default)
    numba  require numba; ImportError if it is missing
    numpy  force the pure-numpy implementations

``benchmarks/bench_backends.py`` times the two flavors side by side.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via TESTYIELD_BACKEND=numpy
    HAS_NUMBA = False

BACKEND_ENV = "TESTYIELD_BACKEND"


def _greedy_order_numpy(cov: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = cov.shape[0]
    order = np.empty(n, dtype=np.int64)
    gains = np.empty(n, dtype=np.int64)
    uncovered = np.ones(cov.shape[1], dtype=bool)
    remaining = np.ones(n, dtype=bool)
    k = 0
    while k < n and uncovered.any():
        # uint8 rows: sum with an explicit wide dtype to avoid overflow
        g = cov[:, uncovered].sum(axis=1, dtype=np.int64)
        g[~remaining] = -1
        best = int(np.argmax(g))  # first max -> lowest-index tie-break
        if g[best] <= 0:
            break
        order[k] = best
        gains[k] = g[best]
        uncovered &= cov[best] == 0
        remaining[best] = False
        k += 1
    return order[:k], gains[:k]


def _cumulative_detected_numpy(faults: np.ndarray, order: np.ndarray) -> np.ndarray:
    if order.size == 0:
        return np.zeros(0, dtype=np.int64)
    seen = np.logical_or.accumulate(faults[order] != 0, axis=0)
    return seen.sum(axis=1, dtype=np.int64)


if HAS_NUMBA:

    @njit(cache=True)
    def _greedy_order_numba(cov):  # pragma: no cover - compiled
        n, u = cov.shape
        order = np.empty(n, np.int64)
        gains = np.empty(n, np.int64)
        unc = np.arange(u)  # indices of still-uncovered units, compacted
        n_unc = u
        remaining = np.ones(n, np.uint8)
        k = 0
        while k < n and n_unc > 0:
            best = -1
            best_gain = 0
            for t in range(n):
                if remaining[t] == 0:
                    continue
                g = 0
                for j in range(n_unc):
                    if cov[t, unc[j]] != 0:
                        g += 1
                if g > best_gain:  # strict: first max wins ties
                    best_gain = g
                    best = t
            if best < 0:
                break
            w = 0
            for j in range(n_unc):
                if cov[best, unc[j]] == 0:
                    unc[w] = unc[j]
                    w += 1
            n_unc = w
            remaining[best] = 0
            order[k] = best
            gains[k] = best_gain
            k += 1
        return order[:k], gains[:k]

    @njit(cache=True)
    def _cumulative_detected_numba(faults, order):  # pragma: no cover - compiled
        n = order.shape[0]
        f = faults.shape[1]
        out = np.empty(n, np.int64)
        seen = np.zeros(f, np.uint8)
        count = 0
        for i in range(n):
            row = order[i]
            for j in range(f):
                if seen[j] == 0 and faults[row, j] != 0:
                    seen[j] = 1
                    count += 1
            out[i] = count
        return out


def available_backends() -> tuple[str, ...]:
    return ("numpy", "numba") if HAS_NUMBA else ("numpy",)


def _resolve_backend() -> str:
    choice = os.environ.get(BACKEND_ENV, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{BACKEND_ENV} must be one of auto|numba|numpy, got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    if HAS_NUMBA:
        return "numba"
    if choice == "numba":
        raise ImportError(f"{BACKEND_ENV}=numba but numba is not importable")
    return "numpy"


ACTIVE_BACKEND = _resolve_backend()

if ACTIVE_BACKEND == "numba":
    greedy_order = _greedy_order_numba
    cumulative_detected = _cumulative_detected_numba
else:
    greedy_order = _greedy_order_numpy
    cumulative_detected = _cumulative_detected_numpy


def implementations() -> dict[str, tuple]:
    """(greedy_order, cumulative_detected) per importable backend."""
    impls = {"numpy": (_greedy_order_numpy, _cumulative_detected_numpy)}
    if HAS_NUMBA:
        impls["numba"] = (_greedy_order_numba, _cumulative_detected_numba)
    return impls
