"""testyield: yield-curve economics for test suites.

Turn coverage and fault-detection matrices into investment/return curves,
fit the Nelson-Siegel model to them, and compare testing criteria by
long-, short- and medium-term yields, stopping point and residual risk.
"""

from .analysis import (
    ComparisonTable,
    CriterionReport,
    DuplicateCriterion,
    NotConverged,
    ReportFormat,
    compare,
    interpret,
    parse_report_json,
    render_plot,
    render_report,
)
from .matrices import (
    CoverageMatrix,
    FaultMatrix,
    MalformedFile,
    SubjectBundle,
    TestIdMismatch,
    UnitKind,
    align,
    load_coverage,
    load_faults,
    save_coverage,
    save_faults,
)
from .nsfit import (
    DegenerateCurve,
    FitConfig,
    FitResult,
    SingularDesign,
    TauSpacing,
    TooFewPoints,
    ZeroVariance,
    fit,
    profile_tau,
    r_squared,
)
from .nsmodel import (
    CURVATURE_PEAK_X,
    NsParams,
    asymptotes,
    average_yield,
    forward_rate,
    loadings,
)
from .selection import (
    Criterion,
    CriterionKind,
    EmptyMatrix,
    Ordering,
    PrefixMode,
    YieldCurve,
    average_random_curves,
    build_curve,
    order_additional_greedy,
    order_random,
    ordering_to_csv,
)
from .synth import (
    Rounding,
    SynthSpec,
    generate_bundle,
    generate_curve,
    load_curve,
    save_bundle,
    save_curve,
)

__version__ = "0.1.0"

__all__ = [
    "CURVATURE_PEAK_X",
    "ComparisonTable",
    "CoverageMatrix",
    "Criterion",
    "CriterionKind",
    "CriterionReport",
    "DegenerateCurve",
    "DuplicateCriterion",
    "EmptyMatrix",
    "FaultMatrix",
    "FitConfig",
    "FitResult",
    "MalformedFile",
    "NotConverged",
    "NsParams",
    "Ordering",
    "PrefixMode",
    "ReportFormat",
    "Rounding",
    "SingularDesign",
    "SubjectBundle",
    "SynthSpec",
    "TauSpacing",
    "TestIdMismatch",
    "TooFewPoints",
    "UnitKind",
    "YieldCurve",
    "ZeroVariance",
    "align",
    "asymptotes",
    "average_random_curves",
    "average_yield",
    "build_curve",
    "compare",
    "fit",
    "forward_rate",
    "generate_bundle",
    "generate_curve",
    "interpret",
    "load_coverage",
    "load_curve",
    "load_faults",
    "loadings",
    "order_additional_greedy",
    "order_random",
    "ordering_to_csv",
    "parse_report_json",
    "profile_tau",
    "r_squared",
    "render_plot",
    "render_report",
    "save_bundle",
    "save_coverage",
    "save_curve",
    "save_faults",
    "__version__",
]
