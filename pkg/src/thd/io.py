"""Network ingestion and result serialization.

One self-describing JSON document is the wire contract::

    {
      "schema": 1,
      "name": "example",
      "time_unit": "ticks",
      "edges": [
        {"id": "e1", "participants": ["alice", "bob"], "start": 1, "end": 3}
      ]
    }

``start``/``end`` are either integer ticks or ISO-8601 UTC timestamps
(converted to milliseconds since the epoch); mixing the two encodings in
one document is rejected. Parsing is incremental - edge records are
decoded and released one at a time, so memory stays bounded by the
largest single record rather than the document - and every malformed
record is reported with its index. Strict mode aborts on the first bad
record, lenient mode skips and counts them.

All emitted JSON is canonical (sorted keys, compact separators, shortest
float repr, trailing newline) so byte comparison is a valid equality
check for results.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
from codecs import getincrementaldecoder
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import TYPE_CHECKING, BinaryIO, Iterable

from .core import MAX_TICK, MIN_TICK, TemporalHyperedge, TimeVaryingHypergraph
from .errors import MalformedJson, MixedTimeEncodings, RecordInvalid

if TYPE_CHECKING:
    from .simulate import DiffusionResult

SCHEMA_VERSION = 1

# hard ceiling on any single JSON value (one edge record, one metadata
# field); inputs beyond this are hostile, not data
MAX_VALUE_BYTES = 8 * 1024 * 1024
_CHUNK = 64 * 1024
_WS = " \t\n\r"


def canonical_json_bytes(obj: object) -> bytes:
    """Deterministic JSON encoding: byte-equal iff structurally equal."""
    text = json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
    )
    return (text + "\n").encode("utf-8")


@dataclass(frozen=True)
class ReadReport:
    """Document metadata plus what lenient mode skipped."""

    name: str | None
    time_unit: str | None
    schema: int | None
    time_encoding: str | None  # "ticks" | "calendar" | None (no records)
    record_count: int
    skipped: tuple[tuple[int, str], ...]


def _reject_constant(name: str) -> float:
    raise ValueError(f"non-finite number {name!r}")


class _IncrementalReader:
    """Pull-based JSON scanner over a byte stream with bounded buffering."""

    def __init__(self, stream: BinaryIO):
        self._stream = stream
        self._utf8 = getincrementaldecoder("utf-8")()
        self._decoder = json.JSONDecoder(parse_constant=_reject_constant)
        self.buf = ""
        self.pos = 0
        self.eof = False

    def _fill(self) -> None:
        if self.eof:
            return
        chunk = self._stream.read(_CHUNK)
        if not chunk:
            self.eof = True
            try:
                self.buf += self._utf8.decode(b"", final=True)
            except UnicodeDecodeError as exc:
                raise MalformedJson(f"invalid UTF-8: {exc}") from None
            return
        try:
            self.buf += self._utf8.decode(chunk)
        except UnicodeDecodeError as exc:
            raise MalformedJson(f"invalid UTF-8: {exc}") from None

    def _trim(self) -> None:
        if self.pos > 0:
            self.buf = self.buf[self.pos :]
            self.pos = 0

    def skip_ws(self) -> None:
        while True:
            while self.pos < len(self.buf) and self.buf[self.pos] in _WS:
                self.pos += 1
            if self.pos < len(self.buf) or self.eof:
                return
            self._trim()
            self._fill()

    def peek(self) -> str | None:
        self.skip_ws()
        return self.buf[self.pos] if self.pos < len(self.buf) else None

    def expect(self, char: str) -> None:
        got = self.peek()
        if got != char:
            raise MalformedJson(f"expected {char!r}, found {got!r}")
        self.pos += 1

    def at_end(self) -> bool:
        return self.peek() is None

    def value(self) -> object:
        """Decode one JSON value, growing the buffer as needed."""
        self.skip_ws()
        self._trim()
        while True:
            try:
                val, end = self._decoder.raw_decode(self.buf, self.pos)
            except RecursionError:
                raise MalformedJson("value nested too deeply") from None
            except ValueError:
                if self.eof:
                    raise MalformedJson(
                        f"truncated or invalid JSON near offset {self.pos}"
                    ) from None
                if len(self.buf) > MAX_VALUE_BYTES:
                    raise MalformedJson("single value exceeds size limit") from None
                self._fill()
                continue
            # a number at the buffer edge may continue in the next chunk
            if end == len(self.buf) and not self.eof:
                if len(self.buf) > MAX_VALUE_BYTES:
                    raise MalformedJson("single value exceeds size limit")
                self._fill()
                continue
            self.pos = end
            return val


def _calendar_to_ms(text: str) -> int:
    s = text[:-1] + "+00:00" if text.endswith("Z") else text
    try:
        dt = datetime.fromisoformat(s)
    except ValueError:
        raise ValueError(f"not an ISO-8601 timestamp: {text!r}") from None
    if dt.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no UTC offset")
    delta = dt - datetime(1970, 1, 1, tzinfo=timezone.utc)
    return (delta.days * 86400 + delta.seconds) * 1000 + delta.microseconds // 1000


def _tick_field(record: dict, key: str, index: int) -> tuple[int, str]:
    """Extract start/end as (tick, encoding); encoding is 'ticks' or 'calendar'."""
    if key not in record:
        raise RecordInvalid(index, f"missing {key!r}")
    raw = record[key]
    if isinstance(raw, bool):
        raise RecordInvalid(index, f"{key!r} must be an integer or ISO-8601 string")
    if isinstance(raw, int):
        return raw, "ticks"
    if isinstance(raw, str):
        try:
            return _calendar_to_ms(raw), "calendar"
        except ValueError as exc:
            raise RecordInvalid(index, str(exc)) from None
    raise RecordInvalid(index, f"{key!r} must be an integer or ISO-8601 string")


def _parse_record(
    record: object, index: int, encoding: str | None
) -> tuple[TemporalHyperedge, str]:
    if not isinstance(record, dict):
        raise RecordInvalid(index, "edge record must be an object")
    edge_id = record.get("id")
    if not isinstance(edge_id, str) or not edge_id:
        raise RecordInvalid(index, "missing or empty 'id'")
    participants = record.get("participants")
    if not isinstance(participants, list):
        raise RecordInvalid(index, "'participants' must be an array")
    for p in participants:
        if not isinstance(p, str) or not p:
            raise RecordInvalid(index, "participants must be nonempty strings")
    if len(set(participants)) != len(participants):
        raise RecordInvalid(index, "duplicate participant")

    start, enc_s = _tick_field(record, "start", index)
    end, enc_e = _tick_field(record, "end", index)
    if enc_s != enc_e:
        raise MixedTimeEncodings(
            f"edge record {index} mixes tick and calendar timestamps"
        )
    if encoding is not None and enc_s != encoding:
        raise MixedTimeEncodings(
            f"edge record {index} uses {enc_s!r} but document started with {encoding!r}"
        )
    if not (MIN_TICK <= start <= MAX_TICK and MIN_TICK <= end <= MAX_TICK):
        raise RecordInvalid(index, "tick outside representable range")

    edge = TemporalHyperedge(edge_id, frozenset(participants), start, end)
    try:
        edge.validate()
    except Exception as exc:
        raise RecordInvalid(index, str(exc)) from None
    return edge, enc_s


def read_network(
    source: BinaryIO | bytes | bytearray, strict: bool = True
) -> tuple[list[TemporalHyperedge], ReadReport]:
    """Parse a network document into edge records plus metadata.

    Raises MalformedJson for structural problems, MixedTimeEncodings when
    tick and calendar timestamps meet, and RecordInvalid for the first bad
    record in strict mode. In lenient mode bad records are skipped and
    listed in the report. Duplicate edge ids are record errors here so
    lenient ingest can drop them visibly.
    """
    if isinstance(source, (bytes, bytearray)):
        source = _stdio.BytesIO(bytes(source))
    reader = _IncrementalReader(source)

    name: str | None = None
    time_unit: str | None = None
    schema: int | None = None
    encoding: str | None = None
    edges: list[TemporalHyperedge] = []
    seen_ids: set[str] = set()
    skipped: list[tuple[int, str]] = []
    saw_edges = False

    reader.expect("{")
    first_member = True
    while True:
        ch = reader.peek()
        if ch == "}":
            reader.pos += 1
            break
        if not first_member:
            reader.expect(",")
        first_member = False
        key = reader.value()
        if not isinstance(key, str):
            raise MalformedJson("object key must be a string")
        reader.expect(":")
        if key == "edges":
            if saw_edges:
                raise MalformedJson("duplicate 'edges' array")
            saw_edges = True
            reader.expect("[")
            index = 0
            if reader.peek() == "]":
                reader.pos += 1
            else:
                while True:
                    raw = reader.value()
                    try:
                        edge, enc = _parse_record(raw, index, encoding)
                        if edge.id in seen_ids:
                            raise RecordInvalid(index, f"duplicate edge id {edge.id!r}")
                    except RecordInvalid as exc:
                        if strict:
                            raise
                        skipped.append((exc.index, exc.reason))
                    else:
                        encoding = enc
                        seen_ids.add(edge.id)
                        edges.append(edge)
                    index += 1
                    ch = reader.peek()
                    if ch == ",":
                        reader.pos += 1
                    elif ch == "]":
                        reader.pos += 1
                        break
                    else:
                        raise MalformedJson(f"expected ',' or ']' in edges, found {ch!r}")
        else:
            val = reader.value()
            if key == "name" and isinstance(val, str):
                name = val
            elif key == "time_unit" and isinstance(val, str):
                time_unit = val
            elif key == "schema":
                if not isinstance(val, int) or isinstance(val, bool) or val != SCHEMA_VERSION:
                    raise MalformedJson(f"unsupported schema {val!r}")
                schema = val
    if not reader.at_end():
        raise MalformedJson("trailing data after document")

    report = ReadReport(
        name=name,
        time_unit=time_unit,
        schema=schema,
        time_encoding=encoding,
        record_count=len(edges),
        skipped=tuple(skipped),
    )
    return edges, report


# --------------------------------------------------------------------------
# writers
# --------------------------------------------------------------------------


def write_network(
    network: TimeVaryingHypergraph | Iterable[TemporalHyperedge],
    name: str = "network",
    time_unit: str = "ticks",
) -> bytes:
    """Serialize edges to the canonical document; read_network inverts this."""
    edges = network.edges if isinstance(network, TimeVaryingHypergraph) else network
    doc = {
        "schema": SCHEMA_VERSION,
        "name": name,
        "time_unit": time_unit,
        "edges": [
            {
                "id": e.id,
                "participants": sorted(e.participants),
                "start": e.start,
                "end": e.end,
            }
            for e in edges
        ],
    }
    return canonical_json_bytes(doc)


def write_results(result: "DiffusionResult", fmt: str = "json") -> bytes:
    """Serialize a simulation result; canonical JSON or flat CSV.

    CSV emits one row per (source, vertex, metric, value), ordered by
    source, then metric, then vertex.
    """
    if fmt == "json":
        return canonical_json_bytes(result.to_document())
    if fmt == "csv":
        out = _stdio.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["source", "vertex", "metric", "value"])
        for labels in result.labels:
            for vertex in sorted(labels.values):
                writer.writerow(
                    [labels.source, vertex, labels.metric.value, labels.values[vertex]]
                )
        return out.getvalue().encode("utf-8")
    raise ValueError(f"unknown format {fmt!r} (json, csv)")
