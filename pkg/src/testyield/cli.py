"""Command-line driver: ingestion -> ordering -> curve -> fit -> report.

Subcommands:
  analyze  full pipeline over coverage/fault matrices
  fit      fit a standalone m,R curve CSV and print the result as JSON
  synth    generate synthetic curves or matrix bundles

Exit codes: 0 success, 1 validation/input error, 2 fit failure (partial
reports may still be written by analyze).  All randomness is seeded from
flags; no code path that affects outputs reads the clock or OS entropy.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, nsfit, selection, synth
from .matrices import (
    MalformedFile,
    SubjectBundle,
    TestIdMismatch,
    UnitKind,
    align,
    load_coverage,
    load_faults,
)
from .nsmodel import NsParams, practicality_warnings
from .selection import CriterionKind, PrefixMode

_FORMATS = ("json", "csv", "text", "svg")

_FIT_ERRORS = (
    nsfit.TooFewPoints,
    nsfit.DegenerateCurve,
    nsfit.SingularDesign,
    selection.EmptyMatrix,
)


def _fit_config(args) -> nsfit.FitConfig:
    return nsfit.FitConfig(
        tau_min=args.tau_min, tau_max=args.tau_max, tau_points=args.tau_points
    )


def _add_fit_flags(parser) -> None:
    parser.add_argument("--tau-min", type=float, default=None,
                        help="low tau bound (default: derived from the curve)")
    parser.add_argument("--tau-max", type=float, default=None,
                        help="high tau bound (default: derived from the curve)")
    parser.add_argument("--tau-points", type=int, default=200,
                        help="tau grid size (default 200)")


def _csv_list(raw: str, allowed, what: str) -> list[str]:
    items = [s.strip() for s in raw.split(",") if s.strip()]
    bad = [s for s in items if s not in allowed]
    if bad:
        raise ValueError(f"unknown {what}: {bad} (allowed: {', '.join(allowed)})")
    if not items:
        raise ValueError(f"at least one {what} required")
    return items


def cmd_analyze(args) -> int:
    out_dir = Path(args.out)
    try:
        formats = _csv_list(args.format, _FORMATS, "format")
        fault_path = Path(args.faults)
        if not fault_path.is_file():
            raise ValueError(f"fault file not found: {fault_path}")
        faults = load_faults(fault_path)
        statement = (
            load_coverage(args.coverage_statement, UnitKind.STATEMENT)
            if args.coverage_statement
            else None
        )
        branch = (
            load_coverage(args.coverage_branch, UnitKind.BRANCH)
            if args.coverage_branch
            else None
        )
        subject = args.subject or fault_path.stem
        bundle = align(SubjectBundle(subject, faults, statement, branch))

        if args.criteria:
            criteria = _csv_list(args.criteria, [k.value for k in CriterionKind],
                                 "criterion")
        else:
            criteria = [k for k, cov in
                        (("statement", statement), ("branch", branch))
                        if cov is not None]
            criteria.append("random")
        for name in criteria:
            if name in ("statement", "branch") and bundle.coverage_for(name) is None:
                raise ValueError(f"criterion {name!r} requested but no "
                                 f"--coverage-{name} file given")
        prefix = (PrefixMode.QUALIFIED_ONLY if args.prefix == "qualified"
                  else PrefixMode.FULL_SUITE)
        config = _fit_config(args)
    except (ValueError, MalformedFile, TestIdMismatch, OSError) as exc:
        print(f"error: ingestion: {exc}", file=sys.stderr)
        return 1

    out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    failures = []
    for name in criteria:
        kind = CriterionKind(name)
        try:
            if kind is CriterionKind.RANDOM:
                if args.random_runs > 1:
                    curve = selection.average_random_curves(
                        bundle, args.random_runs, args.seed,
                        args.test_cost, args.fault_value,
                    )
                    ordering = None  # no single ordering to audit
                else:
                    ordering = selection.order_random(faults.n_tests, args.seed)
                    curve = selection.build_curve(
                        ordering, faults, prefix, args.test_cost, args.fault_value
                    )
            else:
                ordering = selection.order_additional_greedy(bundle.coverage_for(kind))
                curve = selection.build_curve(
                    ordering, faults, prefix, args.test_cost, args.fault_value
                )
            if ordering is not None:
                selection.ordering_to_csv(
                    ordering, faults, out_dir / f"ordering_{name}.csv"
                )
            fit = nsfit.fit(curve, config)
            report = analysis.interpret(fit, curve)
            reports.append(report)
            for warning in practicality_warnings(fit.params):
                print(f"warning: {name}: {warning}", file=sys.stderr)
            if "svg" in formats:
                analysis.render_plot(curve, fit, out_dir / f"curve_{name}.svg")
        except (*_FIT_ERRORS, analysis.NotConverged) as exc:
            failures.append((name, exc))
            print(f"error: fit[{name}]: {exc}", file=sys.stderr)

    if reports:
        # subject-level framing figures: how saturated the program is
        context = {"faults_per_test": faults.n_faults / faults.n_tests}
        if statement is not None:
            context["faults_per_unit_statement"] = (
                faults.n_faults / statement.unit_count
            )
        if branch is not None:
            context["faults_per_unit_branch"] = faults.n_faults / branch.unit_count
        table = (
            analysis.compare(reports, bundle.name, context)
            if len(reports) > 1
            else analysis.single_criterion_table(reports[0], bundle.name, context)
        )
        for fmt in formats:
            if fmt == "svg":
                continue
            suffix = "txt" if fmt == "text" else fmt
            analysis.render_report(
                table, analysis.ReportFormat(fmt), out_dir / f"report.{suffix}"
            )
        print(f"wrote {len(reports)} criterion report(s) to {out_dir}")
    return 2 if failures else 0


def cmd_fit(args) -> int:
    try:
        curve = synth.load_curve(args.curve)
        config = _fit_config(args)
    except (ValueError, OSError) as exc:
        print(f"error: ingestion: {exc}", file=sys.stderr)
        return 1
    try:
        result = nsfit.fit(curve, config, strict=not args.allow_flat)
    except _FIT_ERRORS as exc:
        print(f"error: fit: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(result.to_json_dict(), indent=2))
    return 0


def cmd_synth_curve(args) -> int:
    try:
        spec = synth.SynthSpec(
            params=NsParams(args.beta0, args.beta1, args.beta2, args.tau),
            n_points=args.n,
            noise_sigma=args.sigma,
            seed=args.seed,
            rounding=synth.Rounding(args.rounding),
        )
        curve = synth.generate_curve(spec)
        synth.save_curve(curve, args.out)
    except (ValueError, OSError) as exc:
        print(f"error: synth: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(curve)}-point curve to {args.out}")
    return 0


def cmd_synth_bundle(args) -> int:
    try:
        bundle = synth.generate_bundle(
            args.tests, args.units, args.faults,
            args.cov_density, args.fault_density, args.seed, args.name,
        )
        paths = synth.save_bundle(bundle, args.out)
    except (ValueError, OSError) as exc:
        print(f"error: synth: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {', '.join(str(p) for p in paths.values())}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="testyield",
        description="Fit test-suite investment/return curves and compare "
        "testing criteria economically.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the full matrix-to-report pipeline")
    p.add_argument("--faults", required=True, help="fault matrix CSV")
    p.add_argument("--coverage-statement", help="statement coverage CSV")
    p.add_argument("--coverage-branch", help="branch coverage CSV")
    p.add_argument("--criteria", default="",
                   help="comma list of statement,branch,random "
                   "(default: all with input files, plus random)")
    p.add_argument("--prefix", choices=("qualified", "full"), default="full",
                   help="curve over the qualified prefix only, or the full suite")
    p.add_argument("--seed", type=int, default=0, help="random-criterion seed")
    p.add_argument("--random-runs", type=int, default=1,
                   help="average this many seeded random orderings")
    p.add_argument("--test-cost", type=float, default=1.0,
                   help="investment units per test (default 1)")
    p.add_argument("--fault-value", type=float, default=1.0,
                   help="return units per fault (default 1)")
    _add_fit_flags(p)
    p.add_argument("--out", default="testyield-out", help="output directory")
    p.add_argument("--format", default="json,csv,text,svg",
                   help="comma list of json,csv,text,svg")
    p.add_argument("--subject", default="", help="subject name for reports")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fit", help="fit a standalone m,R curve CSV")
    p.add_argument("curve", help="headerless CSV of m,R lines")
    p.add_argument("--allow-flat", action="store_true",
                   help="accept a zero-variance curve (degenerate fit)")
    _add_fit_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("synth", help="generate synthetic inputs")
    ssub = p.add_subparsers(dest="synth_command", required=True)

    pc = ssub.add_parser("curve", help="sample a curve from known parameters")
    pc.add_argument("--beta0", type=float, required=True)
    pc.add_argument("--beta1", type=float, required=True)
    pc.add_argument("--beta2", type=float, required=True)
    pc.add_argument("--tau", type=float, required=True)
    pc.add_argument("--n", type=int, required=True, help="number of points")
    pc.add_argument("--sigma", type=float, default=0.0, help="noise sigma")
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--rounding", choices=("continuous", "integer"),
                    default="continuous")
    pc.add_argument("--out", required=True, help="output CSV path")
    pc.set_defaults(func=cmd_synth_curve)

    pb = ssub.add_parser("bundle", help="draw random coverage/fault matrices")
    pb.add_argument("--tests", type=int, required=True)
    pb.add_argument("--units", type=int, required=True)
    pb.add_argument("--faults", type=int, required=True)
    pb.add_argument("--cov-density", type=float, default=0.3)
    pb.add_argument("--fault-density", type=float, default=0.1)
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--name", default="synthetic")
    pb.add_argument("--out", required=True, help="output directory")
    pb.set_defaults(func=cmd_synth_bundle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def main_entry() -> None:
    sys.exit(main())
