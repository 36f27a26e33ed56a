"""Sharp forecasting: numeric values to the controlled forecast vocabulary.

Bands are half-open [lo, hi) over a condition's unit, contiguous from 0, with
an unbounded last band; a leading (0, term) band is the degenerate "exactly
zero" case (used by rain: 0 mm is "No precipitation", anything above starts
the rainy bands). Wind bands follow the Beaufort groupings, sea state the
Douglas scale; sky cover and rain rates use customary synoptic breakpoints.

Conditions without default bands (snow, visibility, and the non-worded
temperature/pressure/humidity) must be configured explicitly before use.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import LexiconError, SchemaError
from .model import Compass, Condition, Value, decimal_str

Band = tuple[Optional[Fraction], str]  # (exclusive upper bound, None = ∞), term

VOCABULARY: dict[Condition, tuple[str, ...]] = {
    Condition.CLOUDINESS: (
        "Clear or Sunny Skies", "Partly Cloudy", "Mostly Cloudy", "Cloudy", "Overcast",
    ),
    Condition.WIND: (
        "Light Winds", "Moderate Winds", "Fresh Winds", "Near Gale",
        "Gale", "Strong Gale", "Storm", "Violent Storm",
    ),
    Condition.SEA: (
        "Calm", "Slight", "Moderate", "Rough", "Very Rough",
        "High", "Very High", "Phenomenal",
    ),
    Condition.RAIN: (
        "No precipitation", "Very Light Rains", "Light Rains",
        "Moderate Rains", "Heavy Rains",
    ),
    Condition.SNOW: (
        "Blizzard", "Snowstorm", "Snow flurry", "Snow squall",
        "Snowburst", "Blowing snow", "Drifting snow",
    ),
    Condition.VISIBILITY: ("Clean", "Misty", "Foggy", "Hazy"),
}

_F = Fraction
DEFAULT_BANDS: dict[Condition, tuple[Band, ...]] = {
    Condition.CLOUDINESS: (
        (_F(10), "Clear or Sunny Skies"),
        (_F(40), "Partly Cloudy"),
        (_F(80), "Mostly Cloudy"),
        (_F(100), "Cloudy"),
        (None, "Overcast"),  # only 100 % exactly, given the percent bound
    ),
    Condition.WIND: (  # knots
        (_F(11), "Light Winds"),
        (_F(17), "Moderate Winds"),
        (_F(22), "Fresh Winds"),
        (_F(28), "Near Gale"),
        (_F(34), "Gale"),
        (_F(41), "Strong Gale"),
        (_F(48), "Storm"),
        (None, "Violent Storm"),
    ),
    Condition.SEA: (  # cm wave height
        (_F(50), "Calm"),
        (_F(125), "Slight"),
        (_F(250), "Moderate"),
        (_F(400), "Rough"),
        (_F(600), "Very Rough"),
        (_F(900), "High"),
        (_F(1400), "Very High"),
        (None, "Phenomenal"),
    ),
    Condition.RAIN: (  # mm/day
        (_F(0), "No precipitation"),
        (_F(2), "Very Light Rains"),
        (_F(10), "Light Rains"),
        (_F(20), "Moderate Rains"),
        (None, "Heavy Rains"),
    ),
}

DIRECTION_PHRASES: dict[Compass, str] = {
    Compass.N: "from North",
    Compass.NE: "from North East",
    Compass.E: "from East",
    Compass.SE: "from South East",
    Compass.S: "from South",
    Compass.SW: "from South West",
    Compass.W: "from West",
    Compass.NW: "from North West",
}


@dataclass(frozen=True)
class LexiconTable:
    bands: Mapping[Condition, tuple[Band, ...]] = field(
        default_factory=lambda: dict(DEFAULT_BANDS))
    vocabulary: Mapping[Condition, tuple[str, ...]] = field(
        default_factory=lambda: dict(VOCABULARY))
    direction_phrases: Mapping[Compass, str] = field(
        default_factory=lambda: dict(DIRECTION_PHRASES))

    def __post_init__(self):
        object.__setattr__(self, "bands", dict(self.bands))
        object.__setattr__(self, "vocabulary", dict(self.vocabulary))
        object.__setattr__(self, "direction_phrases", dict(self.direction_phrases))
        for condition, bands in self.bands.items():
            _check_bands(condition, bands, self.vocabulary.get(condition))


def _check_bands(condition: Condition, bands: Sequence[Band],
                 vocabulary: Optional[tuple[str, ...]]) -> None:
    if not bands:
        raise LexiconError(f"{condition.value}: empty band list")
    prev = None
    for i, (upper, term) in enumerate(bands):
        if vocabulary is not None and term not in vocabulary:
            raise LexiconError(
                f"{condition.value}: term {term!r} is not in the vocabulary")
        if upper is None:
            if i != len(bands) - 1:
                raise LexiconError(
                    f"{condition.value}: unbounded band must come last")
            continue
        degenerate_zero = i == 0 and upper == 0
        if prev is not None and upper <= prev:
            raise LexiconError(f"{condition.value}: band bounds must increase")
        if upper < 0 or (upper == 0 and not degenerate_zero):
            raise LexiconError(f"{condition.value}: bad band bound {upper}")
        prev = upper
    last_upper = bands[-1][0]
    if last_upper is not None and not (condition.is_percent and last_upper >= 100):
        raise LexiconError(
            f"{condition.value}: bands must cover the whole range "
            "(end with null, or reach 100 for percent conditions)")


DEFAULT_LEXICON = LexiconTable()


def classify(condition: Condition, value: Value,
             table: LexiconTable = DEFAULT_LEXICON) -> str:
    """The term of the band containing the value's magnitude."""
    bands = table.bands.get(condition)
    if not bands:
        raise LexiconError(
            f"no bands configured for {condition.value}; "
            "supply a lexicon override to classify it")
    mag = value.magnitude
    lo = Fraction(0)
    for i, (upper, term) in enumerate(bands):
        if upper is None:
            return term
        if i == 0 and upper == 0:
            if mag == 0:
                return term
            continue
        if lo <= mag < upper:
            return term
        lo = upper
    return bands[-1][1]  # percent tables ending at 100 catch the boundary


def direction_name(point: Compass, table: LexiconTable = DEFAULT_LEXICON) -> str:
    return table.direction_phrases[point]


def load_lexicon(data: bytes) -> LexiconTable:
    """Defaults overridden per condition from a JSON document:
    {"cloudiness": [[10, "Clear or Sunny Skies"], ..., [null, "Overcast"]]}"""
    try:
        doc = json.loads(data.decode("utf-8"),
                         parse_float=lambda s: Fraction(Decimal(s)))
    except (UnicodeDecodeError, json.JSONDecodeError, InvalidOperation) as exc:
        raise SchemaError("", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("", "top level must be an object")
    bands = dict(DEFAULT_BANDS)
    for key, raw_bands in doc.items():
        try:
            condition = Condition(key)
        except ValueError:
            raise SchemaError(key, f"unknown condition kind {key!r}") from None
        if not isinstance(raw_bands, list):
            raise SchemaError(key, "must be a list of [bound, term] pairs")
        parsed: list[Band] = []
        for i, pair in enumerate(raw_bands):
            if (not isinstance(pair, list) or len(pair) != 2
                    or not isinstance(pair[1], str)):
                raise SchemaError(f"{key}[{i}]", "expected [bound, term]")
            bound, term = pair
            if bound is not None:
                if not isinstance(bound, (int, Fraction)) or isinstance(bound, bool):
                    raise SchemaError(f"{key}[{i}]", "bound must be a number or null")
                bound = Fraction(bound)
            parsed.append((bound, term))
        bands[condition] = tuple(parsed)
    try:
        return LexiconTable(bands=bands)
    except LexiconError as exc:
        raise SchemaError("", str(exc)) from exc


def describe_band(condition: Condition, term: str,
                  table: LexiconTable = DEFAULT_LEXICON) -> str:
    """Human-readable band range for a term, e.g. "[40, 80) %"."""
    lo = Fraction(0)
    for i, (upper, t) in enumerate(table.bands.get(condition, ())):
        if t == term:
            hi = "∞" if upper is None else decimal_str(upper)
            lo_s = decimal_str(lo)
            if i == 0 and upper == 0:
                return f"exactly 0 {condition.unit}"
            return f"[{lo_s}, {hi}) {condition.unit}"
        if upper is not None:
            lo = upper
    raise LexiconError(f"{condition.value}: no band for term {term!r}")
