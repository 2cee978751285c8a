import csv
import io
import json
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from updyn.symbolic.core import DottedWord, FiniteWord
from updyn.utils.intervals import Interval, IntervalBox

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

REPORT_SCHEMA_VERSION = "1"
"""
Version written to every report document.
"""

TIME_TABLE_HEADER = ("n", "t_n", "tau_n")

_DYADIC = re.compile(r"^(-?\d+)/2\^(\d+)$")
_RATIONAL = re.compile(r"^(-?\d+)/(\d+)$")


def encode_number(x: Fraction) -> str:
    """
    Exact string form: ``"p/2^q"`` for dyadic rationals (integers included, with q = 0) and
    ``"a/b"`` otherwise.

    :param x: Rational
    :return: String
    """
    x = Fraction(x)
    d = x.denominator
    if d & (d - 1) == 0:
        return f"{x.numerator}/2^{d.bit_length() - 1}"
    return f"{x.numerator}/{d}"


def decode_number(text: str) -> Optional[Fraction]:
    """
    Inverse of `encode_number`; None for strings that are not exact numbers.
    """
    m = _DYADIC.match(text)
    if m:
        return Fraction(int(m.group(1)), 1 << int(m.group(2)))
    m = _RATIONAL.match(text)
    if m:
        return Fraction(int(m.group(1)), int(m.group(2)))
    return None


def _encode(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return encode_number(value)
    if isinstance(value, dict):
        return {str(k): _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    if isinstance(value, float):
        raise TypeError("Floats are not allowed in reports; use exact rationals")
    raise TypeError(f"Cannot serialize {type(value).__name__} in a report")


def _decode(value: Any) -> Any:
    if isinstance(value, str):
        number = decode_number(value)
        return value if number is None else number
    if isinstance(value, dict):
        return {k: _decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v) for v in value]
    return value


@dataclass
class ReportDocument:
    """
    Versioned result of a CLI command.

    Payloads hold dicts, lists, strings, ints, bools, None and Fractions. Fractions are written as
    exact strings, so ``ReportDocument.from_json(doc.to_json()) == doc`` for documents built from
    lists (tuples come back as lists).

    :param command: Subcommand name
    :param parameters: Invocation parameters
    :param results: Command-specific payload
    :param schema_version: Report schema version
    :param metadata: Optional envelope (timestamps, versions) kept out of the payload
    """

    command: str
    parameters: Dict[str, Any]
    results: Any
    schema_version: str = REPORT_SCHEMA_VERSION
    metadata: Optional[Dict[str, Any]] = field(default=None)

    def to_dict(self) -> Dict[str, Any]:
        doc = {
            "schema_version": self.schema_version,
            "command": self.command,
            "parameters": _encode(self.parameters),
            "results": _encode(self.results),
        }
        if self.metadata is not None:
            doc["metadata"] = _encode(self.metadata)
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        """
        Parse a document written by `to_json`.

        :param text: JSON text
        :return: ReportDocument
        """
        raw = json.loads(text)
        if "schema_version" not in raw:
            raise ValueError("Report has no schema_version")
        if raw["schema_version"] != REPORT_SCHEMA_VERSION:
            logger.warning(
                f"Report schema {raw['schema_version']} differs from {REPORT_SCHEMA_VERSION}"
            )
        return cls(
            command=raw["command"],
            parameters=_decode(raw["parameters"]),
            results=_decode(raw["results"]),
            schema_version=raw["schema_version"],
            metadata=_decode(raw["metadata"]) if "metadata" in raw else None,
        )


def word_payload(w: FiniteWord) -> str:
    return str(w)


def dotted_payload(w: DottedWord) -> Dict[str, Any]:
    """
    Bi-infinite window as ``{offset, symbols, dot_position}``.
    """
    return {"offset": w.offset, "symbols": str(w.word), "dot_position": w.dot}


def interval_payload(iv: Interval) -> Dict[str, Fraction]:
    return {"lo": iv.lo, "hi": iv.hi, "width": iv.width}


def box_payload(box: IntervalBox) -> List[Dict[str, Fraction]]:
    return [interval_payload(iv) for iv in box]


def time_table_csv(rows: Iterable[Sequence[int]]) -> str:
    """
    ``n,t_n,tau_n`` table as CSV text.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TIME_TABLE_HEADER)
    writer.writerows(rows)
    return buffer.getvalue()


def read_time_table_csv(text: str) -> List[Tuple[int, int, int]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != TIME_TABLE_HEADER:
        raise ValueError(f"Unexpected time table header {header}")
    return [tuple(int(v) for v in row) for row in reader]


def run_checks(checks: Dict[str, List[str]]) -> bool:
    """
    Log each named check as passed or failed and combine them.

    :param checks: Check description -> list of failure descriptions
    :return: Whether every check passed
    """
    for description, failures in checks.items():
        if failures:
            logger.info(f"Found {len(failures)} failures in {description} check:")
            for failure in failures[:10]:
                logger.info(f"  {failure}")
        else:
            logger.info(f"PASSED {description} check")
    return not any(checks.values())
