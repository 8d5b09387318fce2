"""Economic interpretation of fits: reports, criterion comparison, plots.

A fitted curve is summarized by its long-term yield (the fitted plateau),
short-term strength (magnitude of the initial climb), medium-term
strength (signed hump coefficient -- the sign distinguishes stable from
fluctuating mid-range returns, so it is ranked signed), the stopping
point (the decay scale, with the exact hump location ``1.7933 * tau``
reported alongside), and the residual risk: the fitted plateau minus the
faults actually detected, clamped at zero (a plateau below observed
detections means the fit underestimates reality, not negative risk; the
raw gap is kept for diagnostics).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .nsfit import FitResult
from .nsmodel import CURVATURE_PEAK_X, NsParams, average_yield
from .selection import Criterion, CriterionKind, YieldCurve

SCHEMA_VERSION = 1


class NotConverged(ValueError):
    """Fit did not converge; interpretation refused."""


class DuplicateCriterion(ValueError):
    """Two reports cover the same criterion."""


@dataclass(frozen=True)
class CriterionReport:
    criterion: Criterion
    fit: FitResult
    long_term_yield: float
    short_term_strength: float
    medium_term_strength: float
    stopping_point: float
    hump_m: float
    detected_faults: float
    residual_risk: float
    residual_risk_raw: float


@dataclass(frozen=True)
class ComparisonTable:
    """Per-criterion reports plus per-metric rankings (best first).

    ``context`` carries subject-level figures that frame the comparison
    without recommending anything, e.g. fault density per test and per
    coverable unit.
    """

    subject: str
    rows: tuple[CriterionReport, ...]
    rankings: dict[str, tuple[str, ...]]
    ties: dict[str, tuple[tuple[str, ...], ...]]
    context: dict[str, float] = field(default_factory=dict)


def interpret(fit: FitResult, curve: YieldCurve) -> CriterionReport:
    """Read economic quantities off a converged fit of a curve."""
    if not fit.converged:
        raise NotConverged("fit did not converge; refusing to interpret")
    if curve.criterion is None:
        raise ValueError("curve carries no criterion")
    p = fit.params
    detected = float(curve.returns[-1])
    raw = p.beta0 - detected
    return CriterionReport(
        criterion=curve.criterion,
        fit=fit,
        long_term_yield=p.beta0,
        short_term_strength=abs(p.beta1),
        medium_term_strength=p.beta2,
        stopping_point=p.tau,
        hump_m=CURVATURE_PEAK_X * p.tau,
        detected_faults=detected,
        residual_risk=max(0.0, raw),
        residual_risk_raw=raw,
    )


# metric name -> (report attribute, descending?)
_METRICS = {
    "beta0": ("long_term_yield", True),
    "abs_beta1": ("short_term_strength", True),
    "beta2": ("medium_term_strength", True),
    "tau": ("stopping_point", False),
}


def compare(
    reports: list[CriterionReport],
    subject: str = "",
    context: dict[str, float] | None = None,
) -> ComparisonTable:
    """Rank criteria per metric; ties break alphabetically and are flagged."""
    if len(reports) < 2:
        raise ValueError("need at least two reports to compare")
    names = [r.criterion.name for r in reports]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise DuplicateCriterion(f"duplicate criteria: {dupes}")

    rankings: dict[str, tuple[str, ...]] = {}
    ties: dict[str, tuple[tuple[str, ...], ...]] = {}
    for metric, (attr, descending) in _METRICS.items():
        value = {r.criterion.name: getattr(r, attr) for r in reports}
        sign = -1.0 if descending else 1.0
        order = sorted(names, key=lambda n: (sign * value[n], n))
        rankings[metric] = tuple(order)
        groups = []
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and value[order[j + 1]] == value[order[i]]:
                j += 1
            if j > i:
                groups.append(tuple(order[i : j + 1]))
            i = j + 1
        ties[metric] = tuple(groups)

    return ComparisonTable(subject, tuple(reports), rankings, ties, context or {})


def single_criterion_table(
    report: CriterionReport,
    subject: str = "",
    context: dict[str, float] | None = None,
) -> ComparisonTable:
    """Degenerate one-row table (compare proper needs two criteria)."""
    name = report.criterion.name
    rankings = {metric: (name,) for metric in _METRICS}
    ties = {metric: () for metric in _METRICS}
    return ComparisonTable(subject, (report,), rankings, ties, context or {})


# ---------------------------------------------------------------------------
# report rendering


class ReportFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


def _report_dict(r: CriterionReport) -> dict:
    return {
        "criterion": r.criterion.name,
        "seed": r.criterion.seed,
        "fit": r.fit.to_json_dict(),
        "long_term_yield": r.long_term_yield,
        "short_term_strength": r.short_term_strength,
        "medium_term_strength": r.medium_term_strength,
        "stopping_point": r.stopping_point,
        "hump_m": r.hump_m,
        "detected_faults": r.detected_faults,
        "residual_risk": r.residual_risk,
        "residual_risk_raw": r.residual_risk_raw,
    }


def table_to_json_str(table: ComparisonTable) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "subject": table.subject,
        "reports": [_report_dict(r) for r in table.rows],
        "rankings": {k: list(v) for k, v in table.rankings.items()},
        "ties": {k: [list(g) for g in v] for k, v in table.ties.items()},
        "context": dict(table.context),
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_report_json(text: str) -> ComparisonTable:
    """Rebuild a ComparisonTable from its JSON form.

    Fit diagnostics that are not serialized (residuals, tau profile) come
    back empty.
    """
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
    rows = []
    for rd in doc["reports"]:
        f = rd["fit"]
        fit = FitResult(
            params=NsParams(f["beta0"], f["beta1"], f["beta2"], f["tau"]),
            r_squared=f["r_squared"],
            sse=f["sse"],
            residuals=np.zeros(0),
            tau_profile=np.zeros((0, 2)),
            converged=f["converged"],
        )
        rows.append(
            CriterionReport(
                criterion=Criterion(CriterionKind(rd["criterion"]), rd["seed"]),
                fit=fit,
                long_term_yield=rd["long_term_yield"],
                short_term_strength=rd["short_term_strength"],
                medium_term_strength=rd["medium_term_strength"],
                stopping_point=rd["stopping_point"],
                hump_m=rd["hump_m"],
                detected_faults=rd["detected_faults"],
                residual_risk=rd["residual_risk"],
                residual_risk_raw=rd["residual_risk_raw"],
            )
        )
    return ComparisonTable(
        doc["subject"],
        tuple(rows),
        {k: tuple(v) for k, v in doc["rankings"].items()},
        {k: tuple(tuple(g) for g in v) for k, v in doc["ties"].items()},
        doc.get("context", {}),
    )


def table_to_csv_str(table: ComparisonTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["criterion", "r_squared", "beta0", "abs_beta1", "beta2", "tau",
         "residual_risk", "hump_m"]
    )
    for r in table.rows:
        writer.writerow(
            [
                r.criterion.name,
                f"{r.fit.r_squared:.10g}",
                f"{r.long_term_yield:.10g}",
                f"{r.short_term_strength:.10g}",
                f"{r.medium_term_strength:.10g}",
                f"{r.stopping_point:.10g}",
                f"{r.residual_risk:.10g}",
                f"{r.hump_m:.10g}",
            ]
        )
    return buf.getvalue()


def table_to_text_str(table: ComparisonTable) -> str:
    lines = [f"subject: {table.subject}"]
    header = f"{'criterion':<12}" + "".join(
        f"{h:>14}" for h in ("r_squared", "beta0", "abs_beta1", "beta2", "tau")
    )
    lines.append(header)
    for r in table.rows:
        lines.append(
            f"{r.criterion.name:<12}"
            + f"{r.fit.r_squared:>14.4f}"
            + f"{r.long_term_yield:>14.4f}"
            + f"{r.short_term_strength:>14.4f}"
            + f"{r.medium_term_strength:>14.4f}"
            + f"{r.stopping_point:>14.4f}"
        )
    return "\n".join(lines) + "\n"


_RENDERERS = {
    ReportFormat.JSON: table_to_json_str,
    ReportFormat.CSV: table_to_csv_str,
    ReportFormat.TEXT: table_to_text_str,
}


def render_report(table: ComparisonTable, format: ReportFormat, path) -> None:
    """Serialize the table to a file; byte output is deterministic."""
    text = _RENDERERS[ReportFormat(format)](table)
    Path(path).write_text(text, encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# SVG plot

_W, _H = 720, 480
_LEFT, _RIGHT, _TOP, _BOTTOM = 64, 16, 16, 44
_FIT_SAMPLES = 256


class _Axes:
    """Data-to-pixel transform shared by the renderer and its tests."""

    def __init__(self, curve: YieldCurve, fit: FitResult):
        m = curve.investments
        sample = np.linspace(m.min(), m.max(), _FIT_SAMPLES)
        fitted = np.asarray(average_yield(fit.params, sample), dtype=float)
        self.sample, self.fitted = sample, fitted
        self.x0, self.x1 = 0.0, float(m.max())
        ys = np.concatenate([curve.returns, fitted, [fit.params.beta0]])
        lo, hi = float(ys.min()), float(ys.max())
        pad = 0.05 * (hi - lo) if hi > lo else 1.0
        self.y0, self.y1 = lo - pad, hi + pad

    def sx(self, v: float) -> float:
        return _LEFT + (v - self.x0) / (self.x1 - self.x0) * (_W - _LEFT - _RIGHT)

    def sy(self, v: float) -> float:
        return _TOP + (self.y1 - v) / (self.y1 - self.y0) * (_H - _TOP - _BOTTOM)


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_plot(curve: YieldCurve, fit: FitResult, path) -> None:
    """Write an SVG of observed points, the fitted curve, a vertical
    marker at the stopping point and a horizontal line at the fitted
    plateau.  Byte output is deterministic for fixed inputs."""
    ax = _Axes(curve, fit)
    bottom, top = _H - _BOTTOM, _TOP
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">\n',
        f'<rect width="{_W}" height="{_H}" fill="white"/>\n',
        f'<line x1="{_LEFT}" y1="{bottom}" x2="{_W - _RIGHT}" y2="{bottom}" '
        'stroke="black" stroke-width="1"/>\n',
        f'<line x1="{_LEFT}" y1="{top}" x2="{_LEFT}" y2="{bottom}" '
        'stroke="black" stroke-width="1"/>\n',
    ]
    for t in np.linspace(ax.x0, ax.x1, 5):
        x = _fmt(ax.sx(t))
        parts.append(
            f'<line x1="{x}" y1="{bottom}" x2="{x}" y2="{bottom + 4}" '
            'stroke="black" stroke-width="1"/>\n'
            f'<text x="{x}" y="{bottom + 18}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{t:.6g}</text>\n'
        )
    for t in np.linspace(ax.y0, ax.y1, 5):
        y = _fmt(ax.sy(t))
        parts.append(
            f'<line x1="{_LEFT - 4}" y1="{y}" x2="{_LEFT}" y2="{y}" '
            'stroke="black" stroke-width="1"/>\n'
            f'<text x="{_LEFT - 7}" y="{y}" font-size="11" text-anchor="end" '
            f'dominant-baseline="middle" font-family="sans-serif">{t:.6g}</text>\n'
        )

    level_y = _fmt(ax.sy(fit.params.beta0))
    parts.append(
        f'<line id="level-asymptote" x1="{_LEFT}" y1="{level_y}" '
        f'x2="{_W - _RIGHT}" y2="{level_y}" stroke="#7f7f7f" '
        'stroke-width="1" stroke-dasharray="6 4"/>\n'
    )
    tau_x = _fmt(ax.sx(fit.params.tau))
    parts.append(
        f'<line id="tau-marker" x1="{tau_x}" y1="{top}" x2="{tau_x}" '
        f'y2="{bottom}" stroke="#2ca02c" stroke-width="1" '
        'stroke-dasharray="4 3"/>\n'
    )

    pts = " ".join(
        f"{_fmt(ax.sx(x))},{_fmt(ax.sy(y))}" for x, y in zip(ax.sample, ax.fitted)
    )
    parts.append(
        f'<polyline points="{pts}" fill="none" stroke="#d62728" '
        'stroke-width="1.5"/>\n'
    )
    for x, y in zip(curve.investments, curve.returns):
        parts.append(
            f'<circle cx="{_fmt(ax.sx(x))}" cy="{_fmt(ax.sy(y))}" r="2.5" '
            'fill="#1f77b4"/>\n'
        )
    label = curve.criterion.name if curve.criterion is not None else "curve"
    parts.append(
        f'<text x="{_W - _RIGHT - 4}" y="{top + 14}" font-size="12" '
        f'text-anchor="end" font-family="sans-serif">{label}: tau='
        f'{fit.params.tau:.4g}, level={fit.params.beta0:.4g}, '
        f'r2={fit.r_squared:.4f}</text>\n'
    )
    parts.append("</svg>\n")
    Path(path).write_text("".join(parts), encoding="utf-8", newline="\n")
