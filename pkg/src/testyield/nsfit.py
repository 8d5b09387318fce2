"""Nonlinear least-squares fitting of yield curves by variable projection.

The model is linear in (beta0, beta1, beta2) once the decay scale tau is
fixed, so the search is one-dimensional: scan a tau grid, solve the
3-column linear subproblem at each point by SVD (an orthogonal
factorization; raw normal equations would lose half the digits near
collinear loadings), then refine tau by golden-section search inside the
bracket of every grid-local minimum and keep the global best.  This needs
no starting values and is deterministic: ties resolve to the lower tau.

The tau-grid scan is embarrassingly parallel; here it is evaluated as one
batched SVD over all grid designs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .nsmodel import NsParams, average_yield, loadings
from .selection import YieldCurve


class TooFewPoints(ValueError):
    """Four parameters need at least four curve points."""


class DegenerateCurve(ValueError):
    """All return values identical and strict mode is on."""


class ZeroVariance(ValueError):
    """R-squared is undefined when the returns have zero variance."""


class SingularDesign(RuntimeError):
    """No tau on the grid produced a full-rank loading design."""

    def __init__(self, taus):
        self.taus = np.asarray(taus, dtype=float)
        super().__init__(
            f"loading design is rank-deficient at every tau in "
            f"[{self.taus.min():g}, {self.taus.max():g}]"
        )


class TauSpacing(str, Enum):
    LOG = "log"
    LINEAR = "linear"


@dataclass(frozen=True)
class FitConfig:
    """Tau search grid and refinement settings.

    Bounds left as None are derived from the curve: tau_min =
    max(0.5, m_min / 4), tau_max = 4 * m_max, which brackets any decay
    scale resolvable from the observed investment range with wide margin.
    """

    tau_min: float | None = None
    tau_max: float | None = None
    tau_points: int = 200
    spacing: TauSpacing = TauSpacing.LOG
    refine_tol: float = 1e-8
    max_refine_iters: int = 100

    def __post_init__(self) -> None:
        object.__setattr__(self, "spacing", TauSpacing(self.spacing))
        if self.tau_min is not None and self.tau_min <= 0.0:
            raise ValueError("tau_min must be > 0")
        if self.tau_max is not None and self.tau_max <= 0.0:
            raise ValueError("tau_max must be > 0")
        if (
            self.tau_min is not None
            and self.tau_max is not None
            and self.tau_min >= self.tau_max
        ):
            raise ValueError("tau_min must be < tau_max")
        if self.tau_points < 1:
            raise ValueError("tau_points must be >= 1")
        if not 0.0 < self.refine_tol < 1.0:
            raise ValueError("refine_tol must be in (0, 1)")
        if self.max_refine_iters < 0:
            raise ValueError("max_refine_iters must be >= 0")

    def grid(self, investments: np.ndarray) -> np.ndarray:
        m = np.asarray(investments, dtype=float)
        lo = self.tau_min if self.tau_min is not None else max(0.5, m.min() / 4.0)
        hi = self.tau_max if self.tau_max is not None else 4.0 * m.max()
        if lo >= hi:
            raise ValueError(
                f"derived tau bounds [{lo:g}, {hi:g}] are empty; "
                "set tau_min/tau_max explicitly"
            )
        if self.tau_points == 1:
            return np.array([lo])
        if self.spacing is TauSpacing.LOG:
            return np.geomspace(lo, hi, self.tau_points)
        return np.linspace(lo, hi, self.tau_points)


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters plus goodness-of-fit diagnostics.

    ``tau_profile`` is the (tau, sse) grid scan that located the optimum;
    ``converged`` reports whether the winning golden-section refinement
    reached the configured tolerance.
    """

    params: NsParams
    r_squared: float
    sse: float
    residuals: np.ndarray
    tau_profile: np.ndarray  # shape (grid points, 2): tau, sse
    converged: bool

    def __post_init__(self) -> None:
        res = np.ascontiguousarray(self.residuals, dtype=float)
        res.flags.writeable = False
        object.__setattr__(self, "residuals", res)
        prof = np.ascontiguousarray(self.tau_profile, dtype=float)
        prof.flags.writeable = False
        object.__setattr__(self, "tau_profile", prof)

    def to_json_dict(self) -> dict:
        return {
            "beta0": self.params.beta0,
            "beta1": self.params.beta1,
            "beta2": self.params.beta2,
            "tau": self.params.tau,
            "r_squared": self.r_squared,
            "sse": self.sse,
            "converged": self.converged,
        }


class TauProfilePoint(NamedTuple):
    tau: float
    sse: float
    betas: np.ndarray


_EPS = np.finfo(float).eps


def _design(m: np.ndarray, taus: np.ndarray) -> np.ndarray:
    """Stack of loading designs, shape (len(taus), len(m), 3)."""
    x = m[None, :] / np.asarray(taus, dtype=float)[:, None]
    l1, l2 = loadings(1.0, x)
    ones = np.broadcast_to(1.0, x.shape)
    return np.stack([ones, l1, l2], axis=-1)


def _solve(X: np.ndarray, y: np.ndarray):
    """Min-norm least squares via SVD for a (possibly batched) design.

    Returns (betas, sse, rank); rank < 3 marks a collinear design.
    """
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    cutoff = s[..., :1] * (_EPS * max(X.shape[-2], X.shape[-1]))
    keep = s > cutoff
    uty = np.einsum("...nk,n->...k", U, y)
    inv = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    betas = np.einsum("...kj,...k->...j", Vt, uty * inv)
    resid = y - np.einsum("...nj,...j->...n", X, betas)
    sse = np.einsum("...n,...n->...", resid, resid)
    return betas, sse, keep.sum(axis=-1)


def _scan(m: np.ndarray, r: np.ndarray, grid: np.ndarray):
    betas, sse, rank = _solve(_design(m, grid), r)
    bad = rank < 3
    if bad.any():
        # collinear designs are skipped, never selected
        sse = np.where(bad, np.inf, sse)
        betas = np.where(bad[:, None], np.nan, betas)
    return betas, sse


def _local_minima(sse: np.ndarray) -> list[int]:
    """Indices of grid-local minima, one per plateau run."""
    idxs = []
    t = sse.size
    i = 0
    while i < t:
        j = i
        while j + 1 < t and sse[j + 1] == sse[i]:
            j += 1
        left_ok = i == 0 or sse[i - 1] >= sse[i]
        right_ok = j == t - 1 or sse[j + 1] >= sse[i]
        if left_ok and right_ok and np.isfinite(sse[i]):
            idxs.append(i)
        i = j + 1
    return idxs


def _golden(f, lo: float, hi: float, tol: float, max_iters: int):
    """Golden-section minimum of f on [lo, hi] (single basin assumed)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    invphi2 = (3.0 - math.sqrt(5.0)) / 2.0
    a, b = lo, hi
    h = b - a
    c = a + invphi2 * h
    d = a + invphi * h
    fc, fd = f(c), f(d)
    iters = 0
    while h > tol and iters < max_iters:
        if fc < fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + invphi2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + invphi * h
            fd = f(d)
        iters += 1
    x, fx = (c, fc) if fc < fd else (d, fd)
    return x, fx, h <= tol


def _validate_curve(curve: YieldCurve, strict: bool) -> bool:
    if len(curve) < 4:
        raise TooFewPoints(f"need at least 4 points, got {len(curve)}")
    flat = bool(np.all(curve.returns == curve.returns[0]))
    if flat and strict:
        raise DegenerateCurve("all return values are identical")
    return flat


def fit(curve: YieldCurve, config: FitConfig | None = None, strict: bool = True) -> FitResult:
    """Fit the four parameters to a curve; see the module doc for the method.

    A flat curve (strict=False) short-circuits to the exact degenerate
    solution: level = the constant, slope = curvature = 0, tau = the low
    grid bound (every tau attains zero error; ties go to the lower tau).

    Raises TooFewPoints, DegenerateCurve (strict mode), or SingularDesign
    when no grid tau yields a full-rank design.
    """
    config = config or FitConfig()
    m = curve.investments
    r = curve.returns
    flat = _validate_curve(curve, strict)
    grid = config.grid(m)

    if flat:
        c = float(r[0])
        return FitResult(
            params=NsParams(c, 0.0, 0.0, float(grid[0])),
            r_squared=1.0,
            sse=0.0,
            residuals=np.zeros_like(r),
            tau_profile=np.column_stack([grid, np.zeros_like(grid)]),
            converged=True,
        )

    betas, sse = _scan(m, r, grid)
    if not np.isfinite(sse).any():
        raise SingularDesign(grid)
    profile = np.column_stack([grid, sse])

    def sse_at(tau: float) -> float:
        _, s, rank = _solve(_design(m, np.array([tau]))[0], r)
        return float(s) if rank == 3 else np.inf

    log_space = config.spacing is TauSpacing.LOG
    # (tau, sse, converged) candidates: every grid-local minimum, refined
    candidates: list[tuple[float, float, bool]] = []
    for i in _local_minima(sse):
        candidates.append((float(grid[i]), float(sse[i]), True))
        if grid.size < 2 or config.max_refine_iters == 0:
            continue
        lo = float(grid[max(i - 1, 0)])
        hi = float(grid[min(i + 1, grid.size - 1)])
        if log_space:
            f = lambda u: sse_at(math.exp(u))
            x, fx, conv = _golden(
                f, math.log(lo), math.log(hi),
                math.log1p(config.refine_tol), config.max_refine_iters,
            )
            tau_ref = math.exp(x)
        else:
            tol = config.refine_tol * 0.5 * (lo + hi)
            tau_ref, fx, conv = _golden(sse_at, lo, hi, tol, config.max_refine_iters)
        candidates.append((tau_ref, fx, conv))

    tau_best, sse_best, converged = min(candidates, key=lambda c: (c[1], c[0]))

    X = _design(m, np.array([tau_best]))[0]
    beta, final_sse, rank = _solve(X, r)
    residuals = r - X @ beta
    sst = float(np.sum((r - r.mean()) ** 2))
    r2 = 1.0 - float(final_sse) / sst  # sst > 0: the flat case returned above

    return FitResult(
        params=NsParams(float(beta[0]), float(beta[1]), float(beta[2]), tau_best),
        r_squared=r2,
        sse=float(final_sse),
        residuals=residuals,
        tau_profile=profile,
        converged=bool(converged),
    )


def profile_tau(
    curve: YieldCurve, config: FitConfig | None = None, strict: bool = True
) -> list[TauProfilePoint]:
    """The full (tau, sse, betas) grid scan behind fit, for diagnostics."""
    config = config or FitConfig()
    _validate_curve(curve, strict)
    grid = config.grid(curve.investments)
    betas, sse = _scan(curve.investments, curve.returns, grid)
    return [
        TauProfilePoint(float(t), float(s), b)
        for t, s, b in zip(grid, sse, betas)
    ]


def r_squared(curve: YieldCurve, params: NsParams) -> float:
    """Coefficient of determination of the model on the curve's points.

    Negative values (model worse than the mean) are reported as-is.
    Raises ZeroVariance when the returns are all identical.
    """
    r = curve.returns
    sst = float(np.sum((r - r.mean()) ** 2))
    if sst == 0.0:
        raise ZeroVariance("returns have zero variance")
    pred = average_yield(params, curve.investments)
    sse = float(np.sum((r - pred) ** 2))
    return 1.0 - sse / sst
