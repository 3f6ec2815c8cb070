"""Dataset ingestion and lightweight schema profiling.

A profile is the only thing later stages ever see of a dataset: column
names with inferred kinds, numeric ranges, capped categorical exemplars
and a handful of sample rows. Ingestion fails fast on anything that is
not a delimited text table with a header row.
"""

from __future__ import annotations

import csv
import io
import re
import uuid
from collections import Counter
from dataclasses import dataclass, field

NULL_TOKENS = {"", "NA"}
CATEGORICAL_FLOOR = 20
CATEGORICAL_ROW_FRACTION = 0.05

KINDS = ("numeric", "categorical", "datetime", "text")

_DATETIME_RE = re.compile(
    r"^\d{4}-\d{2}-\d{2}([T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?)?$"
)
_NON_FINITE = {"nan", "inf", "-inf", "+inf", "infinity", "-infinity", "+infinity"}


class Unparseable(ValueError):
    """The uploaded content cannot be profiled; rejected with a user-facing message."""


@dataclass(frozen=True)
class Caps:
    """Trimming limits that keep the prompt-facing view compact."""

    sample_rows: int = 5
    exemplars_per_column: int = 10
    history_turns: int = 10


@dataclass
class ColumnProfile:
    name: str
    kind: str
    numeric_range: tuple[float, float] | None = None
    exemplars: list[str] = field(default_factory=list)
    null_count: int = 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "numeric_range": list(self.numeric_range) if self.numeric_range else None,
            "exemplars": list(self.exemplars),
            "null_count": self.null_count,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ColumnProfile":
        rng = doc.get("numeric_range")
        return cls(
            name=doc["name"],
            kind=doc["kind"],
            numeric_range=(rng[0], rng[1]) if rng else None,
            exemplars=list(doc.get("exemplars", [])),
            null_count=int(doc.get("null_count", 0)),
        )


@dataclass
class DatasetProfile:
    dataset_id: str
    name: str
    row_count: int
    columns: list[ColumnProfile]
    sample_rows: list[dict[str, str]]

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> ColumnProfile | None:
        for col in self.columns:
            if col.name == name:
                return col
        return None

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "name": self.name,
            "row_count": self.row_count,
            "columns": [c.to_dict() for c in self.columns],
            "sample_rows": [dict(r) for r in self.sample_rows],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DatasetProfile":
        return cls(
            dataset_id=doc["dataset_id"],
            name=doc["name"],
            row_count=int(doc["row_count"]),
            columns=[ColumnProfile.from_dict(c) for c in doc["columns"]],
            sample_rows=[dict(r) for r in doc["sample_rows"]],
        )


def _decode(content: bytes) -> str:
    try:
        return content.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise Unparseable("file is not readable as UTF-8 text") from exc


def _pick_delimiter(header_line: str) -> str:
    # Tab wins only when it actually splits the header into more columns.
    comma_cols = next(csv.reader([header_line], delimiter=","), [])
    tab_cols = next(csv.reader([header_line], delimiter="\t"), [])
    return "\t" if len(tab_cols) > len(comma_cols) else ","


def _parse_number(value: str) -> float | None:
    text = value.strip()
    if not text or text.lower() in _NON_FINITE:
        return None
    try:
        return float(text)
    except ValueError:
        return None


def _looks_datetime(value: str) -> bool:
    return bool(_DATETIME_RE.match(value.strip()))


def _infer_column(
    name: str, values: list[str], row_count: int, exemplar_cap: int
) -> ColumnProfile:
    non_null = [v for v in values if v.strip() not in NULL_TOKENS]
    null_count = len(values) - len(non_null)

    if not non_null:
        return ColumnProfile(name=name, kind="text", null_count=null_count)

    numbers = [_parse_number(v) for v in non_null]
    if all(n is not None for n in numbers):
        lo = min(numbers)  # type: ignore[type-var]
        hi = max(numbers)  # type: ignore[type-var]
        return ColumnProfile(
            name=name, kind="numeric", numeric_range=(lo, hi), null_count=null_count
        )

    if all(_looks_datetime(v) for v in non_null):
        return ColumnProfile(name=name, kind="datetime", null_count=null_count)

    distinct = set(non_null)
    cat_limit = max(CATEGORICAL_FLOOR, int(CATEGORICAL_ROW_FRACTION * row_count))
    if len(distinct) <= cat_limit:
        counts = Counter(non_null)
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        exemplars = [value for value, _ in ranked[:exemplar_cap]]
        return ColumnProfile(
            name=name, kind="categorical", exemplars=exemplars, null_count=null_count
        )

    return ColumnProfile(name=name, kind="text", null_count=null_count)


def ingest_dataset(content: bytes, name: str, caps: Caps = Caps()) -> DatasetProfile:
    """Parse a delimited text table and return its profile.

    Raises Unparseable when there is no header row, no data rows, or any
    row disagrees with the header on field count.
    """
    text = _decode(content)
    stripped = text.strip()
    if not stripped:
        raise Unparseable("empty file: no header row")

    delimiter = _pick_delimiter(stripped.splitlines()[0])
    rows = [r for r in csv.reader(io.StringIO(text), delimiter=delimiter) if r]
    if not rows:
        raise Unparseable("empty file: no header row")

    header = [h.strip() for h in rows[0]]
    if any(not h for h in header):
        raise Unparseable("header row contains a blank column name")
    if len(set(header)) != len(header):
        raise Unparseable("header row contains duplicate column names")

    body = rows[1:]
    if not body:
        raise Unparseable("no data rows after the header")
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise Unparseable(
                f"line {i} has {len(row)} fields, expected {len(header)}"
            )

    columns = []
    for idx, col_name in enumerate(header):
        values = [row[idx] for row in body]
        columns.append(
            _infer_column(col_name, values, len(body), caps.exemplars_per_column)
        )

    sample_rows = [dict(zip(header, row)) for row in body[: caps.sample_rows]]
    return DatasetProfile(
        dataset_id=uuid.uuid4().hex,
        name=name,
        row_count=len(body),
        columns=columns,
        sample_rows=sample_rows,
    )
