"""Test ordering under a criterion and conversion to yield curves.

Unit pricing follows the one-test-one-unit / one-fault-one-unit
convention: by default point ``i`` of a curve is
``(i, distinct faults detected by the first i tests)``.  Multipliers for
test cost and fault value are accepted and default to 1.

Random orderings come from numpy's PCG64 generator
(``numpy.random.default_rng(seed)``): a named, stable, splittable 64-bit
PRNG, so orderings are reproducible bit-for-bit across platforms for a
given numpy version.  There is no implicit entropy source anywhere.

All operations are pure functions over immutable inputs; orderings and
curves for different criteria may be computed concurrently.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import kernels
from .matrices import CoverageMatrix, FaultMatrix, SubjectBundle, UnitKind


class EmptyMatrix(ValueError):
    """Coverage matrix has no tests or no coverable units."""


class CriterionKind(str, Enum):
    RANDOM = "random"
    STATEMENT = "statement"
    BRANCH = "branch"


@dataclass(frozen=True)
class Criterion:
    """Ordering criterion; random carries its seed explicitly."""

    kind: CriterionKind
    seed: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", CriterionKind(self.kind))
        if self.kind is CriterionKind.RANDOM:
            if self.seed is None:
                raise ValueError("random criterion requires an explicit seed")
        elif self.seed is not None:
            raise ValueError(f"{self.kind.value} criterion takes no seed")

    @property
    def name(self) -> str:
        return self.kind.value


_KIND_FOR_UNIT = {
    UnitKind.STATEMENT: CriterionKind.STATEMENT,
    UnitKind.BRANCH: CriterionKind.BRANCH,
}


@dataclass(frozen=True)
class Ordering:
    """A test ordering plus the length of its criterion-qualified prefix.

    ``gains`` holds the per-pick count of newly covered units for greedy
    orderings (zero on any appended tail) and is None for random ones.
    """

    criterion: Criterion
    selected: np.ndarray  # int64 test indices
    qualified_len: int
    appended_tail: bool
    gains: np.ndarray | None = None

    def __post_init__(self) -> None:
        sel = np.ascontiguousarray(self.selected, dtype=np.int64)
        if sel.ndim != 1 or sel.size == 0:
            raise ValueError("selected must be a nonempty 1-D index array")
        if np.unique(sel).size != sel.size:
            raise ValueError("selected contains duplicate test indices")
        if not 1 <= self.qualified_len <= sel.size:
            raise ValueError(
                f"qualified_len {self.qualified_len} outside 1..{sel.size}"
            )
        sel.flags.writeable = False
        object.__setattr__(self, "selected", sel)
        if self.gains is not None:
            g = np.ascontiguousarray(self.gains, dtype=np.int64)
            if g.shape != sel.shape:
                raise ValueError("gains must match selected in length")
            g.flags.writeable = False
            object.__setattr__(self, "gains", g)


@dataclass(frozen=True)
class YieldCurve:
    """Investment/return points for one criterion ordering.

    ``investments`` must be strictly increasing and positive; under unit
    pricing it is 1, 2, ..., k.  ``returns`` from a fault matrix are
    nondecreasing cumulative counts, but the type also carries noisy or
    model-generated curves, so monotonicity is a property of the builders
    rather than a constructor guard.
    """

    investments: np.ndarray
    returns: np.ndarray
    criterion: Criterion | None = None
    total_faults: int | None = None

    def __post_init__(self) -> None:
        m = np.ascontiguousarray(self.investments, dtype=float)
        r = np.ascontiguousarray(self.returns, dtype=float)
        if m.ndim != 1 or m.shape != r.shape or m.size == 0:
            raise ValueError("investments and returns must be equal-length 1-D arrays")
        if not (np.isfinite(m).all() and np.isfinite(r).all()):
            raise ValueError("curve values must be finite")
        if np.any(m <= 0.0) or np.any(np.diff(m) <= 0.0):
            raise ValueError("investments must be positive and strictly increasing")
        m.flags.writeable = False
        r.flags.writeable = False
        object.__setattr__(self, "investments", m)
        object.__setattr__(self, "returns", r)

    def __len__(self) -> int:
        return self.investments.size


class PrefixMode(str, Enum):
    QUALIFIED_ONLY = "qualified"
    FULL_SUITE = "full"


def order_additional_greedy(cov: CoverageMatrix, append_tail: bool = True) -> Ordering:
    """Order tests by most not-yet-covered units, ties to the lowest index.

    The qualified prefix stops once no remaining test adds new coverage
    (the criterion is satisfied); with ``append_tail`` the remaining tests
    follow in original row order so the full suite stays usable for curve
    fitting.  Raises EmptyMatrix for a matrix without tests or units.
    """
    if cov.n_tests == 0 or cov.unit_count == 0:
        raise EmptyMatrix(
            f"coverage matrix is {cov.n_tests} tests x {cov.unit_count} units"
        )
    picks, gains = kernels.greedy_order(cov.rows)
    criterion = Criterion(_KIND_FOR_UNIT[cov.unit_kind])

    if append_tail:
        in_prefix = np.zeros(cov.n_tests, dtype=bool)
        in_prefix[picks] = True
        tail = np.flatnonzero(~in_prefix).astype(np.int64)
        selected = np.concatenate([picks, tail])
        all_gains = np.concatenate([gains, np.zeros(tail.size, dtype=np.int64)])
    else:
        selected, all_gains = picks, gains
        if selected.size == 0:
            # nothing ever gains coverage (all-zero rows): keep a 1-test
            # prefix so the ordering is well-formed
            selected = np.zeros(1, dtype=np.int64)
            all_gains = np.zeros(1, dtype=np.int64)

    qualified = max(1, picks.size)
    return Ordering(criterion, selected, qualified, append_tail, all_gains)


def order_random(n_tests: int, seed: int) -> Ordering:
    """Uniform permutation of 0..n_tests-1 from the seeded PCG64 stream."""
    if n_tests < 1:
        raise ValueError(f"n_tests must be >= 1, got {n_tests}")
    perm = np.random.default_rng(seed).permutation(n_tests).astype(np.int64)
    return Ordering(Criterion(CriterionKind.RANDOM, seed), perm, n_tests, False)


def build_curve(
    ordering: Ordering,
    faults: FaultMatrix,
    prefix: PrefixMode = PrefixMode.FULL_SUITE,
    test_cost: float = 1.0,
    fault_value: float = 1.0,
) -> YieldCurve:
    """Cumulative distinct-fault returns along an ordering.

    Point ``i`` is ``(i * test_cost, fault_value * |union of fault rows of
    the first i tests|)``; QUALIFIED_ONLY stops at the qualified prefix.
    """
    if test_cost <= 0.0 or fault_value <= 0.0:
        raise ValueError("unit prices must be positive")
    idx = ordering.selected
    if prefix is PrefixMode.QUALIFIED_ONLY:
        idx = idx[: ordering.qualified_len]
    if idx.min() < 0 or idx.max() >= faults.n_tests:
        raise IndexError(
            f"ordering indices span {idx.min()}..{idx.max()}, "
            f"fault matrix has {faults.n_tests} tests"
        )
    counts = kernels.cumulative_detected(faults.rows, idx)
    m = np.arange(1, idx.size + 1, dtype=float) * test_cost
    return YieldCurve(
        m, counts * fault_value, ordering.criterion, faults.n_faults
    )


def average_random_curves(
    bundle: SubjectBundle,
    runs: int,
    base_seed: int,
    test_cost: float = 1.0,
    fault_value: float = 1.0,
) -> YieldCurve:
    """Pointwise mean return over seeded random orderings.

    Seeds are ``base_seed .. base_seed + runs - 1``; the investment grid is
    the full suite.
    """
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    n = bundle.faults.n_tests
    total = np.zeros(n, dtype=float)
    for s in range(base_seed, base_seed + runs):
        curve = build_curve(
            order_random(n, s), bundle.faults, PrefixMode.FULL_SUITE,
            test_cost, fault_value,
        )
        total += curve.returns
    m = np.arange(1, n + 1, dtype=float) * test_cost
    return YieldCurve(
        m, total / runs, Criterion(CriterionKind.RANDOM, base_seed),
        bundle.faults.n_faults,
    )


def ordering_to_csv(ordering: Ordering, faults: FaultMatrix, path) -> None:
    """Audit export: one row per rank with test id, gain and cumulative faults."""
    counts = kernels.cumulative_detected(faults.rows, ordering.selected)
    path = Path(path)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank", "test_id", "new_units", "cum_faults"])
        for i, t in enumerate(ordering.selected):
            gain = "" if ordering.gains is None else int(ordering.gains[i])
            writer.writerow([i + 1, faults.test_ids[int(t)], gain, int(counts[i])])
