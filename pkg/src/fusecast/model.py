"""Core vocabulary for quantitative weather assertions.

Layers (pure data, no I/O):
  Condition / Value       a measured weather quantity in the condition's unit
  TimeRef                 absolute UTC instant or symbolic day horizon h0, h1, ...
  Location                named point or exact coordinates
  AssertionalMap          one ground assertion: condition @ location @ time = value
  Label                   the contextualised method that produced a map
  LabeledAssertionalMap   an assertional map plus its label

All types are immutable; magnitudes are exact rationals so they survive a
round trip through the textual theory encoding unchanged.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .errors import ForecastError, SchemaError

#: Reserved method id for ground-truth observations.
OBSERVATION_METHOD = "O"

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")
_HORIZON_RE = re.compile(r"h(\d+)\Z")

Rational = Union[int, str, Fraction]


class Condition(Enum):
    """Weather condition kinds, each with a fixed measurement unit."""

    TEMPERATURE = "temperature"
    PRESSURE = "pressure"
    HUMIDITY = "humidity"
    RAIN = "rain"
    SNOW = "snow"
    WIND = "wind"
    VISIBILITY = "visibility"
    CLOUDINESS = "cloudiness"
    SEA = "sea"

    @property
    def unit(self) -> str:
        return _UNITS[self]

    @property
    def is_percent(self) -> bool:
        return self in (Condition.HUMIDITY, Condition.CLOUDINESS)


_UNITS = {
    Condition.TEMPERATURE: "°C",
    Condition.PRESSURE: "hPa",
    Condition.HUMIDITY: "%",
    Condition.RAIN: "mm",
    Condition.SNOW: "cm",
    Condition.WIND: "knots",
    Condition.VISIBILITY: "m",
    Condition.CLOUDINESS: "%",
    Condition.SEA: "cm",
}


class Compass(Enum):
    """Eight-point compass rose for wind direction."""

    N = "N"
    NE = "NE"
    E = "E"
    SE = "SE"
    S = "S"
    SW = "SW"
    W = "W"
    NW = "NW"


def as_fraction(x: Rational, what: str = "magnitude") -> Fraction:
    """Coerce int/str/Fraction to an exact Fraction; floats are refused."""
    if isinstance(x, bool) or isinstance(x, float):
        raise ForecastError(
            f"{what} must be an int, Fraction or decimal string, not {type(x).__name__}"
        )
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ForecastError(f"bad {what}: {x!r}") from exc


def decimal_str(x: Fraction) -> str:
    """Exact decimal rendering of a rational, without trailing zeros.

    Raises if the denominator is not of the form 2^a * 5^b.
    """
    num, den = x.numerator, x.denominator
    scale = 0
    d = den
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        raise ForecastError(f"{x} has no finite decimal rendering")
    while den % 10 == 0:
        den //= 10
        scale += 1
    while den % 2 == 0:  # pad with 5s
        num *= 5
        den //= 2
        scale += 1
    while den % 5 == 0:
        num *= 2
        den //= 5
        scale += 1
    digits = str(abs(num)).rjust(scale + 1, "0")
    sign = "-" if num < 0 else ""
    if scale == 0:
        return f"{sign}{digits}"
    whole, frac = digits[:-scale], digits[-scale:]
    frac = frac.rstrip("0")
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


@dataclass(frozen=True)
class Value:
    """A measured value: magnitude plus, for wind only, a compass direction."""

    magnitude: Fraction
    direction: Optional[Compass] = None

    def __post_init__(self):
        object.__setattr__(self, "magnitude", as_fraction(self.magnitude))
        if self.magnitude < 0:
            raise ForecastError(f"magnitude must be non-negative, got {self.magnitude}")

    def __str__(self) -> str:
        mag = decimal_str(self.magnitude)
        return f"{self.direction.value}{mag}" if self.direction else mag


def check_value(condition: Condition, value: Value) -> Value:
    """Enforce the condition-specific value invariants; returns the value."""
    if (value.direction is not None) != (condition is Condition.WIND):
        if condition is Condition.WIND:
            raise ForecastError("wind values require a compass direction")
        raise ForecastError(f"{condition.value} values must not carry a direction")
    if condition.is_percent and value.magnitude > 100:
        raise ForecastError(
            f"{condition.value} is a percentage; magnitude {decimal_str(value.magnitude)} > 100"
        )
    return value


def make_value(
    condition: Condition, magnitude: Rational, direction: Optional[Compass] = None
) -> Value:
    """Build a Value and validate it against the condition in one step."""
    return check_value(condition, Value(as_fraction(magnitude), direction))


@dataclass(frozen=True)
class TimeRef:
    """Either an absolute UTC instant or a symbolic horizon h_k (k days from now)."""

    instant: Optional[datetime] = None
    horizon: Optional[int] = None

    def __post_init__(self):
        if (self.instant is None) == (self.horizon is None):
            raise ForecastError("TimeRef needs exactly one of instant/horizon")
        if self.horizon is not None and self.horizon < 0:
            raise ForecastError("symbolic horizons are non-negative")
        if self.instant is not None:
            dt = self.instant
            if dt.tzinfo is None:
                dt = dt.replace(tzinfo=timezone.utc)
            else:
                dt = dt.astimezone(timezone.utc)
            object.__setattr__(self, "instant", dt.replace(microsecond=0))

    @classmethod
    def absolute(cls, instant: datetime) -> "TimeRef":
        return cls(instant=instant)

    @classmethod
    def symbolic(cls, k: int) -> "TimeRef":
        return cls(horizon=k)

    @property
    def is_symbolic(self) -> bool:
        return self.horizon is not None

    def __str__(self) -> str:
        if self.is_symbolic:
            return f"h{self.horizon}"
        return self.instant.isoformat().replace("+00:00", "Z")


def parse_timeref(text: str) -> TimeRef:
    """Parse "h<k>" or an ISO-8601 timestamp."""
    m = _HORIZON_RE.match(text.strip())
    if m:
        return TimeRef.symbolic(int(m.group(1)))
    try:
        raw = text.strip().replace("Z", "+00:00")
        return TimeRef.absolute(datetime.fromisoformat(raw))
    except ValueError as exc:
        raise ForecastError(f"unparseable time reference: {text!r}") from exc


def horizon_index(valid_at: TimeRef, now: TimeRef) -> int:
    """Day offset of valid_at relative to now.

    Symbolic valid_at returns its own k regardless of now; absolute pairs use
    the calendar-day difference (so now+36h at 14:05 lands on day 1). A
    symbolic `now` against an absolute valid_at is unresolvable.
    """
    if valid_at.is_symbolic:
        return valid_at.horizon
    if now.is_symbolic:
        raise ForecastError(
            "cannot compute a horizon for an absolute time against a symbolic 'now'"
        )
    return (valid_at.instant.date() - now.instant.date()).days


def resolve_instant(t: TimeRef, now: TimeRef) -> Union[datetime, int]:
    """Comparable key for a TimeRef: a UTC datetime, or a day index when the
    whole run is symbolic. Mixing absolute refs with a symbolic `now` fails."""
    if now.is_symbolic:
        if t.is_symbolic:
            return t.horizon
        raise ForecastError(
            "cannot order an absolute time reference against a symbolic 'now'"
        )
    if t.is_symbolic:
        return now.instant + timedelta(days=t.horizon)
    return t.instant


def is_future(t: TimeRef, now: TimeRef) -> bool:
    """True iff t lies strictly after now (symbolic now compares day indexes)."""
    ref = now.horizon if now.is_symbolic else now.instant
    return resolve_instant(t, now) > ref


@dataclass(frozen=True)
class Location:
    """A named point, or exact coordinates (lat, lon, altitude in metres)."""

    name: Optional[str] = None
    lat: Optional[Fraction] = None
    lon: Optional[Fraction] = None
    alt: Optional[Fraction] = None

    def __post_init__(self):
        if self.name is not None:
            if not _NAME_RE.match(self.name):
                raise ForecastError(
                    f"location name {self.name!r} must match [A-Za-z][A-Za-z0-9]*"
                )
        elif self.lat is None or self.lon is None:
            raise ForecastError("location needs a name or lat/lon coordinates")
        for field, bound in (("lat", 90), ("lon", 180)):
            v = getattr(self, field)
            if v is not None:
                v = as_fraction(v, field)
                object.__setattr__(self, field, v)
                if abs(v) > bound:
                    raise ForecastError(f"{field} {decimal_str(v)} out of range ±{bound}")
        if self.alt is not None:
            object.__setattr__(self, "alt", as_fraction(self.alt, "alt"))

    @classmethod
    def point(cls, name: str) -> "Location":
        return cls(name=name)

    @classmethod
    def at(cls, lat: Rational, lon: Rational, alt: Rational = 0) -> "Location":
        return cls(lat=as_fraction(lat, "lat"), lon=as_fraction(lon, "lon"),
                   alt=as_fraction(alt, "alt"))

    @property
    def is_named(self) -> bool:
        return self.name is not None

    def __str__(self) -> str:
        if self.is_named:
            return self.name
        return f"({decimal_str(self.lat)},{decimal_str(self.lon)})"


class LocationRegistry:
    """The run's named points; coordinate entries resolve against it.

    Named points register implicitly on first use. Coordinate resolution is
    exact-match only (no interpolation): the registered point must carry the
    same lat/lon.
    """

    def __init__(self):
        self._points: dict[str, Location] = {}

    def declare(self, name: str, lat: Rational = None, lon: Rational = None,
                alt: Rational = 0) -> Location:
        if lat is None:
            loc = Location.point(name)
        else:
            loc = Location(name=name, lat=as_fraction(lat, "lat"),
                           lon=as_fraction(lon, "lon"), alt=as_fraction(alt, "alt"))
        self._points[name] = loc
        return loc

    def names(self) -> list[str]:
        return sorted(self._points)

    def resolve(self, loc: Location) -> Location:
        """Map a location onto a registered named point."""
        if loc.is_named:
            if loc.name not in self._points:
                self._points[loc.name] = loc
            return self._points[loc.name]
        for point in self._points.values():
            if point.lat == loc.lat and point.lon == loc.lon:
                return point
        raise SchemaError(
            "location",
            f"no registered named point at ({decimal_str(loc.lat)},{decimal_str(loc.lon)})",
        )


@dataclass(frozen=True)
class AssertionalMap:
    """One ground quantitative assertion: condition @ location @ valid_at = value."""

    condition: Condition
    location: Location
    valid_at: TimeRef
    value: Value

    def __post_init__(self):
        check_value(self.condition, self.value)


@dataclass(frozen=True)
class Label:
    """The contextualised method: which model produced the map, and when."""

    method: str
    generated_at: TimeRef

    def __post_init__(self):
        if not self.method:
            raise ForecastError("label method must be non-empty")


@dataclass(frozen=True)
class LabeledAssertionalMap:
    """An assertional map tagged with the label that produced it."""

    label: Label
    map: AssertionalMap

    @property
    def is_observation(self) -> bool:
        return self.label.method == OBSERVATION_METHOD


def conflicts_with(a: AssertionalMap, b: AssertionalMap) -> bool:
    """Two maps conflict iff they cover the same slot but disagree on the value.

    Symmetric and irreflexive by construction.
    """
    return (
        a.condition is b.condition
        and a.location == b.location
        and a.valid_at == b.valid_at
        and a.value != b.value
    )


def hindcast_days(valid_at: TimeRef, generated_at: TimeRef) -> Optional[int]:
    """How far valid_at sits from the generation instant, in days; None when
    the pair is not comparable (absolute valid_at under a symbolic label)."""
    if valid_at.is_symbolic and generated_at.is_symbolic:
        return valid_at.horizon - generated_at.horizon
    if valid_at.is_symbolic:
        return valid_at.horizon
    if generated_at.is_symbolic:
        return None
    return horizon_index(valid_at, generated_at)
