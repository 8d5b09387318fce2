"""Synthetic curves and matrices with known ground truth.

These generators close the loop for fit and selection testing: a curve
sampled from known parameters must fit back to those parameters, and a
random bundle exercises the ordering pipeline end to end.  The PRNG is
the same PCG64 family used for random orderings, so one seed story
covers the whole package.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .matrices import (
    CoverageMatrix,
    FaultMatrix,
    SubjectBundle,
    UnitKind,
    save_coverage,
    save_faults,
)
from .nsmodel import NsParams, average_yield
from .selection import YieldCurve


class Rounding(str, Enum):
    CONTINUOUS = "continuous"
    INTEGER_COUNTS = "integer"


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic curve."""

    params: NsParams
    n_points: int
    noise_sigma: float = 0.0
    seed: int = 0
    rounding: Rounding = Rounding.CONTINUOUS

    def __post_init__(self) -> None:
        object.__setattr__(self, "rounding", Rounding(self.rounding))
        if self.n_points < 4:
            raise ValueError(f"n_points must be >= 4, got {self.n_points}")
        if self.noise_sigma < 0.0:
            raise ValueError("noise_sigma must be >= 0")


def generate_curve(spec: SynthSpec) -> YieldCurve:
    """Model curve on the unit grid 1..n, optionally noisy and discretized.

    INTEGER_COUNTS rounds to the nearest nonnegative integer and then
    applies a running maximum, mimicking cumulative fault counts.
    """
    m = np.arange(1, spec.n_points + 1, dtype=float)
    r = np.asarray(average_yield(spec.params, m), dtype=float)
    if spec.noise_sigma > 0.0:
        r = r + np.random.default_rng(spec.seed).normal(
            0.0, spec.noise_sigma, spec.n_points
        )
    if spec.rounding is Rounding.INTEGER_COUNTS:
        r = np.maximum.accumulate(np.clip(np.rint(r), 0.0, None))
    return YieldCurve(m, r)


def generate_bundle(
    n_tests: int,
    n_units: int,
    n_faults: int,
    cov_density: float,
    fault_density: float,
    seed: int,
    name: str = "synthetic",
) -> SubjectBundle:
    """Independent Bernoulli matrices at the given cell densities.

    Statement and branch matrices are drawn independently (same unit
    count); all three matrices share the same test ids in the same order.
    """
    if min(n_tests, n_units, n_faults) < 1:
        raise ValueError("all counts must be >= 1")
    if not (0.0 < cov_density <= 1.0 and 0.0 < fault_density <= 1.0):
        raise ValueError("densities must be in (0, 1]")

    rng = np.random.default_rng(seed)

    def draw(cols: int, density: float) -> np.ndarray:
        return (rng.random((n_tests, cols)) < density).astype(np.uint8)

    def ids(prefix: str, count: int) -> tuple[str, ...]:
        width = len(str(count))
        return tuple(f"{prefix}{i + 1:0{width}d}" for i in range(count))

    test_ids = ids("t", n_tests)
    statement = CoverageMatrix(
        test_ids, ids("s", n_units), UnitKind.STATEMENT, draw(n_units, cov_density)
    )
    branch = CoverageMatrix(
        test_ids, ids("b", n_units), UnitKind.BRANCH, draw(n_units, cov_density)
    )
    faults = FaultMatrix(test_ids, ids("f", n_faults), draw(n_faults, fault_density))
    return SubjectBundle(name, faults, statement, branch)


def save_bundle(bundle: SubjectBundle, directory) -> dict[str, Path]:
    """Write the bundle's matrices as CSV files into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}
    if bundle.statement is not None:
        paths["statement"] = directory / "statement.csv"
        save_coverage(bundle.statement, paths["statement"])
    if bundle.branch is not None:
        paths["branch"] = directory / "branch.csv"
        save_coverage(bundle.branch, paths["branch"])
    paths["faults"] = directory / "faults.csv"
    save_faults(bundle.faults, paths["faults"])
    return paths


def save_curve(curve: YieldCurve, path) -> None:
    """Write a curve as headerless ``m,R`` CSV lines."""
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        for m, r in zip(curve.investments, curve.returns):
            fh.write(f"{m:.10g},{r:.10g}\n")


def load_curve(path) -> YieldCurve:
    """Read a headerless ``m,R`` CSV written by save_curve (or by hand)."""
    ms: list[float] = []
    rs: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'm,R', got {line!r}")
            try:
                ms.append(float(parts[0]))
                rs.append(float(parts[1]))
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: non-numeric value in {line!r}"
                ) from None
    if not ms:
        raise ValueError(f"{path}: no data points")
    return YieldCurve(np.array(ms), np.array(rs))
