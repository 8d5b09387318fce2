"""Nelson-Siegel rate and yield functions over investment levels.

The model describes an investment/return process with four parameters.
The instantaneous rate of return at investment level ``m`` is

    r(m) = beta0 + beta1 * exp(-m/tau) + beta2 * (m/tau) * exp(-m/tau)

and the yield (the running average of ``r`` over ``[0, m]``) has the
closed form

    R(m) = beta0 + beta1 * L1(m/tau) + beta2 * L2(m/tau)

with the slope loading ``L1(x) = (1 - exp(-x)) / x`` and the curvature
loading ``L2(x) = L1(x) - exp(-x)``.  ``beta0`` is the long-run level
(``r(m) -> beta0`` as ``m`` grows), ``-beta1`` is the total climb of the
rate from its start (``r(0) = beta0 + beta1``), and ``beta2`` shapes a
medium-range hump whose loading peaks at ``m = CURVATURE_PEAK_X * tau``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Below this x the naive (1 - exp(-x))/x loses ~10 significant digits to
# cancellation; the cubic series truncation error at the threshold is < 1e-21.
SMALL_X = 1e-5

# argmax of the curvature loading L2, to full double precision.
CURVATURE_PEAK_X = 1.7932821329007610


@dataclass(frozen=True)
class NsParams:
    """Level, slope and curvature coefficients plus the decay scale.

    ``beta0``, ``beta1`` and ``beta2`` are in return units; ``tau`` is in
    investment units and must be strictly positive.  All fields must be
    finite.
    """

    beta0: float
    beta1: float
    beta2: float
    tau: float

    def __post_init__(self) -> None:
        vals = (self.beta0, self.beta1, self.beta2, self.tau)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"parameters must be finite, got {vals}")
        if self.tau <= 0.0:
            raise ValueError(f"tau must be > 0, got {self.tau}")


def loadings(tau: float, m):
    """Slope and curvature loadings ``(L1, L2)`` at investment ``m``.

    Accepts a scalar or array ``m >= 0``.  Near zero the loadings are
    evaluated by series expansion so the m -> 0 limits (L1 -> 1, L2 -> 0)
    are reached without cancellation; both decay to 0 for large ``m``.
    """
    if tau <= 0.0:
        raise ValueError(f"tau must be > 0, got {tau}")
    x = np.asarray(m, dtype=float) / tau
    if np.any(x < 0.0):
        raise ValueError("m must be >= 0")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)

    l1 = np.empty_like(x)
    l2 = np.empty_like(x)
    small = x < SMALL_X
    xs = x[small]
    l1[small] = 1.0 - xs / 2.0 + xs * xs / 6.0 - xs**3 / 24.0
    l2[small] = xs / 2.0 - xs * xs / 3.0 + xs**3 / 8.0
    xb = x[~small]
    eb = np.exp(-xb)
    l1[~small] = (1.0 - eb) / xb
    l2[~small] = l1[~small] - eb

    if scalar:
        return float(l1[0]), float(l2[0])
    return l1, l2


def forward_rate(p: NsParams, m):
    """Instantaneous rate of return at investment level ``m >= 0``."""
    x = np.asarray(m, dtype=float) / p.tau
    if np.any(x < 0.0):
        raise ValueError("m must be >= 0")
    e = np.exp(-x)
    out = p.beta0 + p.beta1 * e + p.beta2 * x * e
    return float(out) if out.ndim == 0 else out


def average_yield(p: NsParams, m):
    """Average of the forward rate over ``[0, m]``, in closed form.

    For ``m`` below the series threshold the ``m -> 0`` limit
    ``beta0 + beta1`` is used, which keeps the function total and
    continuous on ``m >= 0``.  Agrees with direct quadrature of the
    forward rate to high relative accuracy.
    """
    l1, l2 = loadings(p.tau, m)
    out = p.beta0 + p.beta1 * np.asarray(l1) + p.beta2 * np.asarray(l2)
    return float(out) if out.ndim == 0 else out


def asymptotes(p: NsParams) -> tuple[float, float]:
    """Long-run level of the forward rate and its total drop from m = 0.

    The rate tends to ``beta0`` for large ``m`` and starts at
    ``beta0 + beta1``, so ``(level, drop) = (beta0, -beta1)`` exactly.
    """
    return p.beta0, -p.beta1


def practicality_warnings(p: NsParams) -> list[str]:
    """Advisory checks for economically implausible parameters.

    Returns human-readable warnings (never raises): currently flags a
    negative yield at zero investment, i.e. ``beta0 + beta1 < 0``.
    """
    warnings = []
    start = p.beta0 + p.beta1
    if start < 0.0:
        warnings.append(
            f"yield at zero investment is negative (beta0 + beta1 = {start:.6g})"
        )
    return warnings
