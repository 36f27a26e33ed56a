"""Parse source forecast maps and observation maps into labeled assertions.

One document = one method + one generation time, mirroring the label granularity:

    {"method": "ECMWF",
     "generated_at": "<ISO-8601 | h0..hN>",
     "entries": [{"condition": "cloudiness", "location": "North",
                  "valid_at": "h1", "magnitude": 75},
                 {"condition": "wind", "location": "North",
                  "valid_at": "h1", "magnitude": 5, "direction": "NE"}, ...]}

Locations are names or {"lat": .., "lon": .., "alt": ..} objects; coordinates
are normalized to a registered named point (exact match only).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Optional

from .errors import ForecastError, SchemaError
from .model import (
    AssertionalMap,
    Compass,
    Condition,
    Label,
    LabeledAssertionalMap,
    Location,
    LocationRegistry,
    TimeRef,
    hindcast_days,
    make_value,
    parse_timeref,
)

_METHOD_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")
_json_fraction = lambda s: Fraction(Decimal(s))

#: A hindcast entry is tolerated but flagged once it trails the generation
#: time by more than one horizon (day).
HINDCAST_WARN_DAYS = -1


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity} at {self.path}: {self.message}"


@dataclass(frozen=True)
class SourceMapDocument:
    method: str
    generated_at: TimeRef
    entries: tuple[AssertionalMap, ...]

    def to_lams(self) -> list[LabeledAssertionalMap]:
        label = Label(self.method, self.generated_at)
        return [LabeledAssertionalMap(label, m) for m in self.entries]


def parse_source_map(
    data: bytes, registry: Optional[LocationRegistry] = None
) -> list[LabeledAssertionalMap]:
    """One labeled assertion per entry, in document order; raises on the first
    error-grade problem."""
    doc, diagnostics = _scan(data, registry)
    for diag in diagnostics:
        if diag.severity == "error":
            raise SchemaError(diag.path, diag.message)
    return doc.to_lams()


def validate_source_map(
    data: bytes, registry: Optional[LocationRegistry] = None
) -> list[Diagnostic]:
    """All diagnostics for a document; empty iff parsing would be clean."""
    _, diagnostics = _scan(data, registry)
    return diagnostics


def _scan(data: bytes, registry: Optional[LocationRegistry]):
    registry = registry if registry is not None else LocationRegistry()
    diags: list[Diagnostic] = []

    def err(path: str, message: str) -> None:
        diags.append(Diagnostic("error", path, message))

    try:
        doc = json.loads(data.decode("utf-8"), parse_float=_json_fraction)
    except (UnicodeDecodeError, json.JSONDecodeError, InvalidOperation) as exc:
        err("", f"not valid JSON: {exc}")
        return SourceMapDocument("invalid", TimeRef.symbolic(0), ()), diags
    if not isinstance(doc, dict):
        err("", "top level must be an object")
        doc = {}
    for key in doc:
        if key not in ("method", "generated_at", "entries"):
            err(key, "unknown key")

    method = doc.get("method")
    if not isinstance(method, str) or not _METHOD_RE.match(method):
        err("method", "must be an identifier matching [A-Za-z][A-Za-z0-9]*")
        method = "invalid"

    generated_at = TimeRef.symbolic(0)
    try:
        generated_at = parse_timeref(str(doc.get("generated_at", "")))
    except ForecastError as exc:
        err("generated_at", str(exc))

    entries: list[AssertionalMap] = []
    seen: set[tuple] = set()
    raw_entries = doc.get("entries", [])
    if not isinstance(raw_entries, list):
        err("entries", "must be a list")
        raw_entries = []
    for i, raw in enumerate(raw_entries):
        path = f"entries[{i}]"
        entry = _scan_entry(raw, path, registry, err)
        if entry is None:
            continue
        key = (entry.condition, str(entry.location), entry.valid_at)
        if key in seen:
            err(path, f"duplicate entry for {entry.condition.value} @ "
                      f"{entry.location} @ {entry.valid_at}")
            continue
        seen.add(key)
        days = hindcast_days(entry.valid_at, generated_at)
        if days is not None and days < HINDCAST_WARN_DAYS:
            diags.append(Diagnostic(
                "warning", path,
                f"hindcast entry: valid {-days} days before generation",
            ))
        entries.append(entry)

    return SourceMapDocument(method, generated_at, tuple(entries)), diags


def _scan_entry(raw, path: str, registry: LocationRegistry, err) -> Optional[AssertionalMap]:
    if not isinstance(raw, dict):
        err(path, "entry must be an object")
        return None
    for key in raw:
        if key not in ("condition", "location", "valid_at", "magnitude", "direction"):
            err(f"{path}.{key}", "unknown key")
            return None
    try:
        condition = Condition(raw.get("condition"))
    except ValueError:
        err(f"{path}.condition", f"unknown condition kind {raw.get('condition')!r}")
        return None

    loc_raw = raw.get("location")
    try:
        if isinstance(loc_raw, str):
            location = registry.resolve(Location.point(loc_raw))
        elif isinstance(loc_raw, dict):
            location = registry.resolve(Location.at(
                loc_raw.get("lat"), loc_raw.get("lon"), loc_raw.get("alt", 0)))
        else:
            raise ForecastError("location must be a name or {lat, lon, alt}")
    except (ForecastError, SchemaError) as exc:
        err(f"{path}.location", getattr(exc, "message", None) or str(exc))
        return None

    try:
        valid_at = parse_timeref(str(raw.get("valid_at", "")))
    except ForecastError as exc:
        err(f"{path}.valid_at", str(exc))
        return None

    magnitude = raw.get("magnitude")
    if not isinstance(magnitude, (int, Fraction)) or isinstance(magnitude, bool):
        err(f"{path}.magnitude", "must be a number")
        return None
    direction = None
    if "direction" in raw:
        try:
            direction = Compass(raw["direction"])
        except ValueError:
            err(f"{path}.direction", f"unknown compass point {raw['direction']!r}")
            return None
    try:
        value = make_value(condition, Fraction(magnitude), direction)
        return AssertionalMap(condition, location, valid_at, value)
    except ForecastError as exc:
        err(path, str(exc))
        return None
