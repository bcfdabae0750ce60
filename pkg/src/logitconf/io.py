"""File formats: prediction records (NDJSON/CSV), calibration artifacts
(JSON), split/evaluation reports (JSON) and plot tables (TSV).

Record parsing is streaming: memory stays bounded by one record regardless
of file size. Parse failures always carry the offending line number.
"""

from __future__ import annotations

import csv
import json
import math
from contextlib import contextmanager
from enum import Enum
from typing import IO, Iterable, Iterator

from .calibration import StabilityReport
from .core import ACCEPT_ALL, REJECT_ALL, CalibrationArtifact, PredictionRecord, ScoredPrediction, ScorerKind
from .metrics import CurveRow, SplitOutcome

CALIBRATION_SCHEMA_VERSION = 1


class RecordFileFormat(Enum):
    NDJSON = "ndjson"
    CSV = "csv"

    def __str__(self) -> str:
        return self.value


@contextmanager
def _opened(dest, mode: str) -> Iterator[IO[str]]:
    """Accept an open text stream or a filesystem path."""
    if hasattr(dest, "write") or hasattr(dest, "read"):
        yield dest
    else:
        try:
            with open(dest, mode, encoding="utf-8", newline="") as handle:
                yield handle
        except OSError as exc:
            raise OSError(f"{dest}: {exc.strerror or exc}") from exc


def _finite_floats(values, where: str) -> tuple[float, ...]:
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValueError(f"{where}: logits must be numbers, got {v!r}")
        f = float(v)
        if not math.isfinite(f):
            raise ValueError(f"{where}: non-finite logit {v!r}")
        out.append(f)
    return tuple(out)


def _parse_ndjson_line(line: str, where: str) -> PredictionRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{where}: invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: expected a JSON object")
    unknown = set(obj) - {"id", "logits", "label"}
    if unknown:
        raise ValueError(f"{where}: unknown keys {sorted(unknown)}")
    if "id" not in obj or "logits" not in obj:
        raise ValueError(f"{where}: record needs 'id' and 'logits'")
    if not isinstance(obj["id"], str):
        raise ValueError(f"{where}: 'id' must be a string")
    if not isinstance(obj["logits"], list):
        raise ValueError(f"{where}: 'logits' must be an array")
    label = obj.get("label")
    if label is not None and (isinstance(label, bool) or not isinstance(label, int)):
        raise ValueError(f"{where}: 'label' must be an integer class index")
    try:
        return PredictionRecord(
            id=obj["id"], logits=_finite_floats(obj["logits"], where), label=label
        )
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from exc


def _iter_ndjson(handle: IO[str]) -> Iterator[PredictionRecord]:
    for lineno, line in enumerate(handle, 1):
        if not line.strip():
            continue
        yield _parse_ndjson_line(line, f"line {lineno}")


def _iter_csv(handle: IO[str]) -> Iterator[PredictionRecord]:
    reader = csv.reader(handle)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("line 1: missing CSV header") from None
    r = len(header) - 2
    expected = ["id", "label"] + [f"l{i}" for i in range(r)]
    if r < 2 or header != expected:
        raise ValueError(
            "line 1: CSV header must be id,label,l0,...,l{r-1} with r >= 2, "
            f"got {','.join(header)}"
        )
    for row in reader:
        where = f"line {reader.line_num}"
        if len(row) != r + 2:
            raise ValueError(f"{where}: expected {r + 2} columns, got {len(row)}")
        label: int | None = None
        if row[1] != "":
            try:
                label = int(row[1])
            except ValueError:
                raise ValueError(f"{where}: label {row[1]!r} is not an integer") from None
        logits = []
        for cell in row[2:]:
            try:
                value = float(cell)
            except ValueError:
                raise ValueError(f"{where}: logit {cell!r} is not a number") from None
            if not math.isfinite(value):
                raise ValueError(f"{where}: non-finite logit {cell!r}")
            logits.append(value)
        try:
            yield PredictionRecord(id=row[0], logits=tuple(logits), label=label)
        except ValueError as exc:
            raise ValueError(f"{where}: {exc}") from exc


def iter_records(source, fmt: RecordFileFormat) -> Iterator[PredictionRecord]:
    """Stream records from a file, enforcing batch consistency as they flow:
    one shared logit length, labels either on every record or on none."""
    with _opened(source, "r") as handle:
        parser = _iter_ndjson(handle) if fmt is RecordFileFormat.NDJSON else _iter_csv(handle)
        num_classes: int | None = None
        labeled: bool | None = None
        for i, record in enumerate(parser, 1):
            if num_classes is None:
                num_classes = record.num_classes
                labeled = record.label is not None
            elif record.num_classes != num_classes:
                raise ValueError(
                    f"record {i} ({record.id!r}): {record.num_classes} logits, "
                    f"but earlier records have {num_classes}"
                )
            elif (record.label is not None) != labeled:
                raise ValueError(
                    f"record {i} ({record.id!r}): mixed labeling — labels must be "
                    "present on all records or on none"
                )
            yield record


def read_records(source, fmt: RecordFileFormat) -> list[PredictionRecord]:
    """Materialized variant of :func:`iter_records`."""
    return list(iter_records(source, fmt))


def _record_json(record: PredictionRecord) -> str:
    obj: dict = {"id": record.id, "logits": list(record.logits)}
    if record.label is not None:
        obj["label"] = record.label
    return json.dumps(obj, separators=(",", ":"))


def write_records(records: Iterable[PredictionRecord], dest, fmt: RecordFileFormat) -> None:
    """Write records in the given format. Floats use shortest round-trip form."""
    with _opened(dest, "w") as handle:
        if fmt is RecordFileFormat.NDJSON:
            for record in records:
                handle.write(_record_json(record) + "\n")
        else:
            records = list(records)
            r = records[0].num_classes if records else 2
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["id", "label"] + [f"l{i}" for i in range(r)])
            for record in records:
                label = "" if record.label is None else record.label
                writer.writerow([record.id, label] + [repr(v) for v in record.logits])


def write_scored(items: Iterable[ScoredPrediction], dest) -> None:
    """Scored NDJSON: the record fields plus predicted class, confidence and
    scorer identity."""
    with _opened(dest, "w") as handle:
        for item in items:
            obj: dict = {"id": item.record.id, "logits": list(item.record.logits)}
            if item.record.label is not None:
                obj["label"] = item.record.label
            obj["predicted_class"] = item.predicted_class
            obj["confidence"] = item.confidence
            obj["scorer"] = item.scorer.value
            handle.write(json.dumps(obj, separators=(",", ":")) + "\n")


def encode_threshold(value: float) -> float | str:
    """Thresholds may be infinite sentinels; JSON needs them as strings."""
    if value == ACCEPT_ALL:
        return "-inf"
    if value == REJECT_ALL:
        return "+inf"
    return value


def _decode_threshold(value) -> float:
    if value == "-inf":
        return ACCEPT_ALL
    if value == "+inf":
        return REJECT_ALL
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ValueError(f"threshold_mu must be a finite number, '-inf' or '+inf', got {value!r}")
    return float(value)


def write_calibration(artifact: CalibrationArtifact, dest) -> None:
    obj = {
        "schema_version": CALIBRATION_SCHEMA_VERSION,
        "scorer": artifact.scorer.value,
        "confidence_level_q": artifact.confidence_level_q,
        "baseline_accuracy_p": artifact.baseline_accuracy_p,
        "threshold_mu": encode_threshold(artifact.threshold_mu),
        "error_budget_e_mu": artifact.error_budget_e_mu,
        "total_errors_e": artifact.total_errors_e,
        "testset_size_n": artifact.testset_size_n,
        "num_classes_r": artifact.num_classes_r,
    }
    with _opened(dest, "w") as handle:
        json.dump(obj, handle, indent=2)
        handle.write("\n")


def read_calibration(source) -> CalibrationArtifact:
    with _opened(source, "r") as handle:
        try:
            obj = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed calibration JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ValueError("calibration file must hold a JSON object")
    version = obj.get("schema_version")
    if version != CALIBRATION_SCHEMA_VERSION:
        raise ValueError(
            f"unsupported calibration schema version {version!r} "
            f"(expected {CALIBRATION_SCHEMA_VERSION})"
        )
    try:
        return CalibrationArtifact(
            scorer=ScorerKind(obj["scorer"]),
            confidence_level_q=obj["confidence_level_q"],
            baseline_accuracy_p=obj["baseline_accuracy_p"],
            threshold_mu=_decode_threshold(obj["threshold_mu"]),
            error_budget_e_mu=obj["error_budget_e_mu"],
            total_errors_e=obj["total_errors_e"],
            testset_size_n=obj["testset_size_n"],
            num_classes_r=obj["num_classes_r"],
        )
    except KeyError as exc:
        raise ValueError(f"calibration file missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ValueError(f"invalid calibration file: {exc}") from exc


def split_report_dict(outcome: SplitOutcome) -> dict:
    """JSON-ready view of a split outcome's report."""
    report = outcome.report
    return {
        "threshold_mu": encode_threshold(outcome.threshold_mu),
        "total": report.total,
        "exploit_count": report.exploit_count,
        "waste_count": report.waste_count,
        "exploit_ratio": report.exploit_ratio,
        "exploit_errors": report.exploit_errors,
        "exploit_successes": report.exploit_successes,
        "enhanced_accuracy": report.enhanced_accuracy,
        "baseline_accuracy": report.baseline_accuracy,
    }


def write_report(obj: dict, dest) -> None:
    """Write a JSON report object (pretty-printed, trailing newline)."""
    with _opened(dest, "w") as handle:
        json.dump(obj, handle, indent=2)
        handle.write("\n")


def write_split(
    outcome: SplitOutcome,
    exploit_dest,
    waste_dest,
    report_dest,
    fmt: RecordFileFormat,
) -> None:
    """Write exploit and waste record files (input format) plus the report."""
    write_records((i.record for i in outcome.exploit), exploit_dest, fmt)
    write_records((i.record for i in outcome.waste), waste_dest, fmt)
    write_report(split_report_dict(outcome), report_dest)


def write_curve(rows: Iterable[CurveRow], dest) -> None:
    """Confidence curve TSV: rank, confidence, is_error (1/0, blank when
    unlabeled)."""
    with _opened(dest, "w") as handle:
        handle.write("rank\tconfidence\tis_error\n")
        for row in rows:
            flag = "" if row.is_error is None else str(int(row.is_error))
            handle.write(f"{row.rank}\t{row.confidence!r}\t{flag}\n")


def write_stability(report: StabilityReport, dest) -> None:
    """Stability TSV: one aggregate row per fraction; blank cells where no
    subsample produced a finite threshold."""

    def cell(value: float | None) -> str:
        return "" if value is None else repr(value)

    with _opened(dest, "w") as handle:
        handle.write(
            "fraction\tsample_size\trepeats\tdefined\tmean\tmin\tmax\tspread"
            "\tfull_set_threshold\n"
        )
        for row in report.rows:
            handle.write(
                f"{row.fraction!r}\t{row.sample_size}\t{report.repeats}\t{row.num_defined}\t"
                f"{cell(row.mean)}\t{cell(row.min)}\t{cell(row.max)}\t{cell(row.spread)}\t"
                f"{report.full_set_threshold!r}\n"
            )


__all__ = [
    "RecordFileFormat",
    "CALIBRATION_SCHEMA_VERSION",
    "iter_records",
    "read_records",
    "write_records",
    "write_scored",
    "write_calibration",
    "read_calibration",
    "encode_threshold",
    "split_report_dict",
    "write_report",
    "write_split",
    "write_curve",
    "write_stability",
]
