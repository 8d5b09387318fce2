"""Coverage and fault matrices: data model, strict CSV ingestion, alignment.

File format (UTF-8, LF or CRLF): line 1 is ``test,<col-id>,...``; every
following line is ``<test-id>,<0|1>,...``.  Column ids are coverable-unit
ids for coverage files and fault ids for fault files.  Cells must be
exactly ``0`` or ``1`` -- no truthy coercion, since silent coercion hides
corrupt exports.  Identifiers must not contain commas.

All matrix types are immutable after construction (frozen dataclasses over
read-only arrays) and safe to share across concurrent readers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np


class UnitKind(str, Enum):
    STATEMENT = "statement"
    BRANCH = "branch"


class MalformedFile(ValueError):
    """A matrix CSV violates the schema; carries path and 1-based line."""

    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class TestIdMismatch(ValueError):
    """Matrices in a bundle disagree on the set of test ids."""

    __test__ = False  # name starts with Test; keep pytest from collecting it

    def __init__(self, only_in_coverage: frozenset, only_in_faults: frozenset):
        self.only_in_coverage = frozenset(only_in_coverage)
        self.only_in_faults = frozenset(only_in_faults)
        super().__init__(
            "test id sets differ: "
            f"only in coverage {sorted(self.only_in_coverage)}, "
            f"only in faults {sorted(self.only_in_faults)}"
        )


def _freeze(rows, n_cols: int) -> np.ndarray:
    arr = np.ascontiguousarray(rows, dtype=np.uint8)
    if arr.ndim != 2 or arr.shape[1] != n_cols:
        raise ValueError(f"rows must be 2-D with {n_cols} columns, got {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("matrix entries must be exactly 0 or 1")
    arr.flags.writeable = False
    return arr


def _check_ids(ids, what: str) -> tuple[str, ...]:
    ids = tuple(ids)
    if any(not isinstance(i, str) or not i for i in ids):
        raise ValueError(f"{what} must be nonempty strings")
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate {what}")
    return ids


@dataclass(frozen=True)
class CoverageMatrix:
    """Binary tests x coverable-units matrix at one granularity."""

    test_ids: tuple[str, ...]
    unit_ids: tuple[str, ...]
    unit_kind: UnitKind
    rows: np.ndarray  # uint8, shape (n_tests, n_units), read-only

    def __post_init__(self) -> None:
        object.__setattr__(self, "test_ids", _check_ids(self.test_ids, "test ids"))
        object.__setattr__(self, "unit_ids", _check_ids(self.unit_ids, "unit ids"))
        object.__setattr__(self, "unit_kind", UnitKind(self.unit_kind))
        rows = _freeze(self.rows, len(self.unit_ids))
        if rows.shape[0] != len(self.test_ids):
            raise ValueError("row count must equal number of test ids")
        object.__setattr__(self, "rows", rows)

    @property
    def n_tests(self) -> int:
        return len(self.test_ids)

    @property
    def unit_count(self) -> int:
        return len(self.unit_ids)


@dataclass(frozen=True)
class FaultMatrix:
    """Binary tests x faults matrix; 1 means the test detects the fault.

    Fault columns no test detects are kept: they never contribute to
    returns but they are exactly what residual-risk analysis is about.
    """

    test_ids: tuple[str, ...]
    fault_ids: tuple[str, ...]
    rows: np.ndarray  # uint8, shape (n_tests, n_faults), read-only

    def __post_init__(self) -> None:
        object.__setattr__(self, "test_ids", _check_ids(self.test_ids, "test ids"))
        object.__setattr__(self, "fault_ids", _check_ids(self.fault_ids, "fault ids"))
        rows = _freeze(self.rows, len(self.fault_ids))
        if rows.shape[0] != len(self.test_ids):
            raise ValueError("row count must equal number of test ids")
        object.__setattr__(self, "rows", rows)

    @property
    def n_tests(self) -> int:
        return len(self.test_ids)

    @property
    def n_faults(self) -> int:
        return len(self.fault_ids)


@dataclass(frozen=True)
class SubjectBundle:
    """One subject's matrices. Coverage matrices are optional per kind."""

    name: str
    faults: FaultMatrix
    statement: CoverageMatrix | None = None
    branch: CoverageMatrix | None = None

    def coverage_for(self, kind: UnitKind) -> CoverageMatrix | None:
        return self.statement if UnitKind(kind) is UnitKind.STATEMENT else self.branch


def _read_matrix(path) -> tuple[tuple[str, ...], tuple[str, ...], np.ndarray]:
    path = Path(path)
    test_ids: list[str] = []
    data: list[list[int]] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedFile(path, 1, "empty file") from None
        if len(header) < 2:
            raise MalformedFile(path, 1, "header must name at least one column")
        col_ids = header[1:]
        for i, cid in enumerate(col_ids):
            if not cid:
                raise MalformedFile(path, 1, f"empty column id at position {i + 2}")
            if "," in cid:
                raise MalformedFile(path, 1, f"column id contains a comma: {cid!r}")
        if len(set(col_ids)) != len(col_ids):
            raise MalformedFile(path, 1, "duplicate column ids")

        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise MalformedFile(
                    path, lineno, f"expected {len(header)} cells, got {len(row)}"
                )
            tid = row[0]
            if not tid:
                raise MalformedFile(path, lineno, "empty test id")
            if "," in tid:
                raise MalformedFile(path, lineno, f"test id contains a comma: {tid!r}")
            if tid in seen:
                raise MalformedFile(path, lineno, f"duplicate test id: {tid!r}")
            seen.add(tid)
            cells = row[1:]
            for j, cell in enumerate(cells):
                if cell != "0" and cell != "1":
                    raise MalformedFile(
                        path, lineno, f"cell in column {header[j + 1]!r} is {cell!r}, "
                        "expected exactly 0 or 1"
                    )
            test_ids.append(tid)
            data.append([int(c) for c in cells])

    if not test_ids:
        raise MalformedFile(path, 2, "no data rows")
    rows = np.array(data, dtype=np.uint8)
    return tuple(test_ids), tuple(col_ids), rows


def load_coverage(path, unit_kind: UnitKind) -> CoverageMatrix:
    """Load a coverage CSV; row order equals file order.

    Raises MalformedFile on schema violations (with line number) and
    OSError if the file cannot be read.
    """
    test_ids, unit_ids, rows = _read_matrix(path)
    return CoverageMatrix(test_ids, unit_ids, UnitKind(unit_kind), rows)


def load_faults(path) -> FaultMatrix:
    """Load a fault CSV; columns that no test detects are retained."""
    test_ids, fault_ids, rows = _read_matrix(path)
    return FaultMatrix(test_ids, fault_ids, rows)


def _write_matrix(path, first_col: str, col_ids, test_ids, rows) -> None:
    path = Path(path)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(",".join((first_col, *col_ids)) + "\n")
        for tid, row in zip(test_ids, rows):
            fh.write(tid + "," + ",".join("1" if c else "0" for c in row) + "\n")


def save_coverage(matrix: CoverageMatrix, path) -> None:
    """Write the canonical CSV form (LF, header row, 0/1 cells)."""
    _write_matrix(path, "test", matrix.unit_ids, matrix.test_ids, matrix.rows)


def save_faults(matrix: FaultMatrix, path) -> None:
    _write_matrix(path, "test", matrix.fault_ids, matrix.test_ids, matrix.rows)


def align(bundle: SubjectBundle) -> SubjectBundle:
    """Reorder coverage rows to the fault matrix's test order.

    Idempotent; raises TestIdMismatch (listing the symmetric difference)
    if any present matrix covers a different set of test ids.
    """
    ref = bundle.faults.test_ids
    ref_set = set(ref)

    def _reorder(cov: CoverageMatrix | None) -> CoverageMatrix | None:
        if cov is None:
            return None
        if cov.test_ids == ref:
            return cov
        cov_set = set(cov.test_ids)
        if cov_set != ref_set:
            raise TestIdMismatch(cov_set - ref_set, ref_set - cov_set)
        index = {t: i for i, t in enumerate(cov.test_ids)}
        perm = np.fromiter((index[t] for t in ref), dtype=np.intp, count=len(ref))
        return replace(cov, test_ids=ref, rows=cov.rows[perm])

    return replace(
        bundle, statement=_reorder(bundle.statement), branch=_reorder(bundle.branch)
    )
