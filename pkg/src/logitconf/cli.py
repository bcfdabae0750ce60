"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 degenerate
calibration (artifact still written). All outputs accept ``-`` for stdout.
"""

from __future__ import annotations

import argparse
import itertools
import sys

from . import io
from .calibration import LabeledScoredSet, calibrate, stability_experiment
from .confidence import min_classes, score_batch, score_record
from .core import ScorerKind
from .metrics import confidence_curve, exploit_ratio, macro_f1, split
from .synth import generate_records

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DEGENERATE = 3

DEFAULT_FRACTIONS = tuple(round(0.1 * k, 1) for k in range(1, 11))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the contract here reserves 2 for data
    errors, so remap usage failures to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fractions_arg(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")
    if not values or any(not 0 < v <= 1 for v in values):
        raise argparse.ArgumentTypeError("fractions must lie in (0, 1]")
    return values


def _scorer_arg(text: str) -> ScorerKind:
    return ScorerKind(text)


def _add_input_flags(sub, scorer_required=True):
    sub.add_argument("--input", required=True, help="record file to read")
    sub.add_argument(
        "--format",
        type=io.RecordFileFormat,
        choices=list(io.RecordFileFormat),
        default=io.RecordFileFormat.NDJSON,
        help="record file format (default: ndjson)",
    )
    sub.add_argument(
        "--scorer",
        type=_scorer_arg,
        choices=list(ScorerKind),
        required=scorer_required,
        help="confidence function"
        + ("" if scorer_required else " (default: the artifact's)"),
    )


def _add_output_flag(sub, text="output destination ('-' for stdout)"):
    sub.add_argument("--output", default="-", help=text + " (default: -)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="logitconf", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("score", help="attach confidence values to records")
    _add_input_flags(sub)
    _add_output_flag(sub, "scored NDJSON destination")
    sub.set_defaults(handler=cmd_score)

    sub = commands.add_parser("calibrate", help="calibrate a threshold on a labeled set")
    _add_input_flags(sub)
    sub.add_argument("--level", type=float, required=True, help="confidence level q in (0, 1]")
    _add_output_flag(sub, "calibration artifact destination")
    sub.set_defaults(handler=cmd_calibrate)

    sub = commands.add_parser("filter", help="split records into exploit/waste by artifact")
    _add_input_flags(sub, scorer_required=False)
    sub.add_argument("--artifact", required=True, help="calibration artifact file")
    sub.add_argument("--exploit-out", required=True, help="exploit record file")
    sub.add_argument("--waste-out", required=True, help="waste record file")
    _add_output_flag(sub, "split report JSON destination")
    sub.set_defaults(handler=cmd_filter)

    sub = commands.add_parser("evaluate", help="compare baseline vs exploit accuracy")
    _add_input_flags(sub, scorer_required=False)
    sub.add_argument("--artifact", required=True, help="calibration artifact file")
    _add_output_flag(sub, "evaluation report JSON destination")
    sub.set_defaults(handler=cmd_evaluate)

    sub = commands.add_parser("stability", help="threshold stability under subsampling")
    _add_input_flags(sub)
    sub.add_argument(
        "--error-fraction", type=float, default=0.1,
        help="fraction of existing errors the threshold admits (default: 0.1)",
    )
    sub.add_argument(
        "--fractions", type=_fractions_arg, default=DEFAULT_FRACTIONS,
        help="comma-separated subsample fractions (default: 0.1,...,1.0)",
    )
    sub.add_argument("--repeats", type=int, default=5, help="subsamples per fraction (default: 5)")
    sub.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    _add_output_flag(sub, "stability TSV destination")
    sub.set_defaults(handler=cmd_stability)

    sub = commands.add_parser("curve", help="sorted confidence curve for plotting")
    _add_input_flags(sub)
    _add_output_flag(sub, "curve TSV destination")
    sub.set_defaults(handler=cmd_curve)

    sub = commands.add_parser("synth", help="generate a synthetic labeled record file")
    sub.add_argument("--n", type=int, required=True, help="number of records")
    sub.add_argument("--classes", type=int, default=5, help="number of classes (default: 5)")
    sub.add_argument(
        "--target-accuracy", type=float, default=0.8,
        help="probability a record is correctly classified (default: 0.8)",
    )
    sub.add_argument(
        "--margin-strength", type=float, default=1.0,
        help="winner-margin scale; 0 decouples confidence from correctness (default: 1.0)",
    )
    sub.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    sub.add_argument(
        "--format",
        type=io.RecordFileFormat,
        choices=list(io.RecordFileFormat),
        default=io.RecordFileFormat.NDJSON,
        help="output record format (default: ndjson)",
    )
    _add_output_flag(sub, "record file destination")
    sub.set_defaults(handler=cmd_synth)

    return parser


def _out(args):
    return sys.stdout if args.output == "-" else args.output


def _scored_stream(args):
    """Stream records through the scorer, validating applicability on the
    first record before any output is produced."""
    records = io.iter_records(args.input, args.format)
    first = next(records, None)
    if first is None:
        return iter(())
    needed = min_classes(args.scorer)
    if first.num_classes < needed:
        raise ValueError(
            f"{args.scorer} is not applicable to {first.num_classes}-class input: "
            f"it needs at least {needed} classes"
        )
    return (
        score_record(record, args.scorer)
        for record in itertools.chain([first], records)
    )


def _read_scored(args, scorer: ScorerKind, labeled_for: str | None = None):
    records = io.read_records(args.input, args.format)
    if not records:
        raise ValueError(f"{args.input}: no records")
    if labeled_for is not None and records[0].label is None:
        raise ValueError(f"{labeled_for} needs labeled records")
    return score_batch(records, scorer)


def _load_artifact(args):
    artifact = io.read_calibration(args.artifact)
    if args.scorer is not None and args.scorer is not artifact.scorer:
        raise ValueError(
            f"requested scorer {args.scorer} does not match the artifact's "
            f"({artifact.scorer}); thresholds are not comparable across scorers"
        )
    return artifact


def cmd_score(args) -> int:
    io.write_scored(_scored_stream(args), _out(args))
    return EXIT_OK


def cmd_calibrate(args) -> int:
    if not 0 < args.level <= 1:
        raise UsageError(f"--level must be in (0, 1], got {args.level}")
    scored = _read_scored(args, args.scorer, labeled_for="calibration")
    artifact = calibrate(LabeledScoredSet.from_predictions(scored), args.level)
    io.write_calibration(artifact, _out(args))
    if artifact.accept_all:
        print(
            f"note: level {args.level} is within the baseline accuracy "
            f"{artifact.baseline_accuracy_p:.4f}; accepting everything",
            file=sys.stderr,
        )
    if artifact.degenerate:
        print(
            f"warning: degenerate calibration — no threshold reaches level "
            f"{args.level} within the error budget; filtering would reject everything",
            file=sys.stderr,
        )
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_filter(args) -> int:
    artifact = _load_artifact(args)
    scored = _read_scored(args, artifact.scorer)
    outcome = split(scored, artifact.threshold_mu)
    io.write_split(outcome, args.exploit_out, args.waste_out, _out(args), args.format)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    artifact = _load_artifact(args)
    scored = _read_scored(args, artifact.scorer, labeled_for="evaluation")
    outcome = split(scored, artifact.threshold_mu)
    report = {
        "scorer": artifact.scorer.value,
        "confidence_level_q": artifact.confidence_level_q,
        "threshold_mu": io.encode_threshold(outcome.threshold_mu),
        "n": len(scored),
        "accuracy": outcome.report.baseline_accuracy,
        "enhanced_accuracy": outcome.report.enhanced_accuracy,
        "exploit_ratio": exploit_ratio(outcome),
        "exploit_count": outcome.report.exploit_count,
        "exploit_errors": outcome.report.exploit_errors,
        "error_budget_e_mu": artifact.error_budget_e_mu,
        "macro_f1": macro_f1(scored),
    }
    io.write_report(report, _out(args))
    return EXIT_OK


def cmd_stability(args) -> int:
    if not 0 <= args.error_fraction <= 1:
        raise UsageError(f"--error-fraction must be in [0, 1], got {args.error_fraction}")
    if args.repeats < 1:
        raise UsageError("--repeats must be positive")
    scored = _read_scored(args, args.scorer, labeled_for="the stability experiment")
    report = stability_experiment(
        LabeledScoredSet.from_predictions(scored),
        fractions=args.fractions,
        error_fraction=args.error_fraction,
        seed=args.seed,
        repeats=args.repeats,
    )
    io.write_stability(report, _out(args))
    return EXIT_OK


def cmd_curve(args) -> int:
    scored = _read_scored(args, args.scorer)
    io.write_curve(confidence_curve(scored), _out(args))
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be positive")
    if args.classes < 2:
        raise UsageError("--classes must be at least 2")
    if not 0 <= args.target_accuracy <= 1:
        raise UsageError(f"--target-accuracy must be in [0, 1], got {args.target_accuracy}")
    if args.margin_strength < 0:
        raise UsageError("--margin-strength must be >= 0")
    records = generate_records(
        n=args.n,
        num_classes=args.classes,
        target_accuracy=args.target_accuracy,
        margin_strength=args.margin_strength,
        seed=args.seed,
    )
    io.write_records(records, _out(args), args.format)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits for --help and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"logitconf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK
    except (ValueError, OSError) as exc:
        print(f"logitconf: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
