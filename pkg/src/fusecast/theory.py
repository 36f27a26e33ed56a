"""Defeasible theories, the canonical weather-atom codec, and the text format.

Theory text grammar (UTF-8, line oriented, "%" starts a comment):

    fact      := ">>" literal
    rule      := id ":" [literal ("," literal)*] arrow literal
    arrow     := "->" | "=>" | "~>"          (strict | defeasible | defeater)
    sup       := id ">" id
    literal   := ["-"] atom
    id, atom  := [A-Za-z][A-Za-z0-9_]*

Canonical atoms encode one weather slot and value:

    <COND><LOC>[_<src>]_h<k>_<DIR?><MAG>

e.g. CNorth_g_h1_90 (cloudiness, North, source g, tomorrow, 90 %) or
WCenter_h2_N6 (wind, Center, two days out, 6 knots from N). Sea atoms spell
the condition "Sea" and carry no separate location (Sea_h1_65). Fractional
magnitudes write "." as "p" (0p5). decode_atom is the strict inverse: any
string that does not re-encode byte-identically is reported opaque.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .errors import ForecastError, OpaqueAtomError, TheoryError, TheoryParseError
from .model import Compass, Condition, Location, Value, decimal_str, make_value

_ATOM_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_SRC_RE = re.compile(r"[a-z][a-z0-9]*\Z")
_HSEG_RE = re.compile(r"h\d+\Z")
_MAG_RE = re.compile(r"\d+(p\d+)?\Z")
_LOC_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")

CONDITION_CODES = {
    Condition.CLOUDINESS: "C",
    Condition.WIND: "W",
    Condition.SEA: "S",
    Condition.RAIN: "R",
    Condition.TEMPERATURE: "T",
    Condition.PRESSURE: "P",
    Condition.HUMIDITY: "H",
    Condition.VISIBILITY: "V",
    Condition.SNOW: "Sn",
}
_SINGLE_CODES = {c: k for k, c in CONDITION_CODES.items() if len(c) == 1 and k is not Condition.SEA}

# Longest first so NE/NW/SE/SW win over N/E/S/W.
_DIRECTIONS = sorted(Compass, key=lambda d: -len(d.value))


@dataclass(frozen=True)
class Literal:
    atom: str
    positive: bool = True

    def __post_init__(self):
        if not _ATOM_RE.match(self.atom):
            raise TheoryError(f"bad atom {self.atom!r}")

    def complement(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def __str__(self) -> str:
        return self.atom if self.positive else f"-{self.atom}"


def parse_literal(text: str) -> Literal:
    text = text.strip()
    if text.startswith("-"):
        return Literal(text[1:].strip(), positive=False)
    return Literal(text)


class RuleKind(Enum):
    STRICT = "->"
    DEFEASIBLE = "=>"
    DEFEATER = "~>"


@dataclass(frozen=True)
class Rule:
    id: str
    kind: RuleKind
    body: tuple[Literal, ...]
    head: Literal

    def __post_init__(self):
        if not _ATOM_RE.match(self.id):
            raise TheoryError(f"bad rule id {self.id!r}")
        object.__setattr__(self, "body", tuple(self.body))

    def __str__(self) -> str:
        body = ", ".join(str(b) for b in self.body)
        sep = f"{body} " if body else ""
        return f"{self.id}: {sep}{self.kind.value} {self.head}"


@dataclass(frozen=True)
class DefeasibleTheory:
    facts: tuple[Literal, ...] = ()
    rules: tuple[Rule, ...] = ()
    superiority: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "facts", tuple(self.facts))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "superiority",
                           tuple((w, l) for w, l in self.superiority))

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)


def validate_theory(theory: DefeasibleTheory) -> None:
    """Enforce the structural invariants: unique ids, superiority pairs over
    existing rules with complementary heads, and an acyclic superiority graph."""
    by_id: dict[str, Rule] = {}
    for rule in theory.rules:
        if rule.id in by_id:
            raise TheoryError(f"duplicate rule id {rule.id!r}")
        by_id[rule.id] = rule
    edges: dict[str, set[str]] = {}
    for winner, loser in theory.superiority:
        for rid in (winner, loser):
            if rid not in by_id:
                raise TheoryError(f"superiority references unknown rule {rid!r}")
        if by_id[winner].head != by_id[loser].head.complement():
            raise TheoryError(
                f"superiority {winner} > {loser} relates non-complementary heads "
                f"({by_id[winner].head} vs {by_id[loser].head})"
            )
        edges.setdefault(winner, set()).add(loser)
    state: dict[str, int] = {}

    def visit(node: str) -> bool:
        state[node] = 1
        for nxt in edges.get(node, ()):
            if state.get(nxt) == 1 or (state.get(nxt) is None and visit(nxt)):
                return True
        state[node] = 2
        return False

    for node in list(edges):
        if state.get(node) is None and visit(node):
            raise TheoryError("superiority relation contains a cycle")


# ---------------------------------------------------------------------------
# Canonical atom codec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecodedAtom:
    condition: Condition
    source: Optional[str]
    location: str
    horizon: int
    value: Value


def source_tag(method: str) -> str:
    """Lowercase method tag usable inside an atom."""
    tag = method.lower()
    if not _SRC_RE.match(tag) or _HSEG_RE.match(tag):
        raise ForecastError(
            f"method id {method!r} cannot be embedded in atoms "
            "(must be alphanumeric and not look like a horizon segment)"
        )
    return tag


def encode_atom(
    condition: Condition,
    source: Optional[str],
    location: Union[Location, str],
    horizon: int,
    value: Value,
) -> str:
    """Canonical, injective atom for a (condition, source, slot, value) tuple."""
    name = location.name if isinstance(location, Location) else location
    if name is None:
        raise ForecastError("atoms require a named location; resolve coordinates first")
    if not _LOC_RE.match(name):
        raise ForecastError(f"location name {name!r} cannot be embedded in an atom")
    if condition is Condition.SEA:
        if name != "Sea":
            raise ForecastError(f"sea atoms imply location 'Sea', got {name!r}")
        head = "Sea"
    else:
        head = CONDITION_CODES[condition] + name
    parts = [head]
    if source is not None:
        parts.append(source_tag(source))
    if horizon < 0:
        raise ForecastError(f"atoms cannot encode a negative horizon ({horizon})")
    parts.append(f"h{horizon}")
    mag = decimal_str(value.magnitude).replace(".", "p")
    if condition is Condition.WIND:
        parts.append(value.direction.value + mag)
    else:
        parts.append(mag)
    return "_".join(parts)


def decode_atom(atom: str) -> DecodedAtom:
    """Inverse of encode_atom; raises OpaqueAtomError on anything non-canonical."""
    def opaque() -> OpaqueAtomError:
        return OpaqueAtomError(f"opaque atom: {atom!r}")

    if atom.startswith("Sea"):
        condition, name, rest = Condition.SEA, "Sea", atom[3:]
    elif atom.startswith("Sn"):
        condition, rest = Condition.SNOW, atom[2:]
        name, _, tail = rest.partition("_")
        rest = f"_{tail}" if tail else ""
    elif atom[:1] in _SINGLE_CODES:
        condition, rest = _SINGLE_CODES[atom[0]], atom[1:]
        name, _, tail = rest.partition("_")
        rest = f"_{tail}" if tail else ""
    else:
        raise opaque()
    if not _LOC_RE.match(name) or not rest.startswith("_"):
        raise opaque()
    parts = rest[1:].split("_")
    source: Optional[str] = None
    if len(parts) == 3:
        source, hseg, vseg = parts
        if not _SRC_RE.match(source) or _HSEG_RE.match(source):
            raise opaque()
    elif len(parts) == 2:
        hseg, vseg = parts
    else:
        raise opaque()
    if not _HSEG_RE.match(hseg):
        raise opaque()
    horizon = int(hseg[1:])
    direction = None
    if condition is Condition.WIND:
        for d in _DIRECTIONS:
            if vseg.startswith(d.value):
                direction, vseg = d, vseg[len(d.value):]
                break
        else:
            raise opaque()
    if not _MAG_RE.match(vseg):
        raise opaque()
    try:
        value = make_value(condition, Fraction(vseg.replace("p", ".")), direction)
        decoded = DecodedAtom(condition, source, name, horizon, value)
        if encode_atom(condition, source, name, horizon, value) != atom:
            raise opaque()
    except ForecastError as exc:
        raise opaque() from exc
    return decoded


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_ARROWS = ("->", "=>", "~>")
_ID_RE = re.compile(r"\s*([A-Za-z][A-Za-z0-9_]*)\s*\Z")


def parse_theory(text: str) -> DefeasibleTheory:
    """Parse the line-oriented theory format; validates the result."""
    facts: list[Literal] = []
    rules: list[Rule] = []
    sups: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith(">>"):
                facts.append(_parse_literal_at(line[2:], lineno, raw))
            elif ":" in line:
                rules.append(_parse_rule(line, lineno, raw))
            elif ">" in line:
                winner, _, loser = line.partition(">")
                sups.append((_parse_id(winner, lineno, raw),
                             _parse_id(loser, lineno, raw)))
            else:
                raise TheoryParseError(lineno, 1, f"unrecognized line: {line!r}")
        except TheoryError as exc:
            if isinstance(exc, TheoryParseError):
                raise
            raise TheoryParseError(lineno, 1, str(exc)) from exc
    theory = DefeasibleTheory(tuple(facts), tuple(rules), tuple(sups))
    validate_theory(theory)
    return theory


def _parse_id(text: str, lineno: int, raw: str) -> str:
    m = _ID_RE.match(text)
    if not m:
        col = raw.find(text.strip()) + 1 if text.strip() else 1
        raise TheoryParseError(lineno, max(col, 1), f"bad identifier: {text.strip()!r}")
    return m.group(1)


def _parse_literal_at(text: str, lineno: int, raw: str) -> Literal:
    try:
        return parse_literal(text)
    except TheoryError:
        col = raw.find(text.strip()) + 1 if text.strip() else 1
        raise TheoryParseError(lineno, max(col, 1),
                               f"bad literal: {text.strip()!r}") from None


def _parse_rule(line: str, lineno: int, raw: str) -> Rule:
    rule_id, _, rest = line.partition(":")
    rid = _parse_id(rule_id, lineno, raw)
    arrow_pos = None
    for arrow in _ARROWS:
        pos = rest.find(arrow)
        if pos >= 0 and (arrow_pos is None or pos < arrow_pos[0]):
            arrow_pos = (pos, arrow)
    if arrow_pos is None:
        raise TheoryParseError(lineno, raw.find(":") + 2, "rule has no arrow")
    pos, arrow = arrow_pos
    body_text, head_text = rest[:pos], rest[pos + len(arrow):]
    body = tuple(
        _parse_literal_at(part, lineno, raw)
        for part in body_text.split(",")
        if part.strip()
    )
    head = _parse_literal_at(head_text, lineno, raw)
    return Rule(rid, RuleKind(arrow), body, head)


def serialize_theory(theory: DefeasibleTheory) -> str:
    """Canonical text: facts (given order), rules sorted by id, then
    superiority pairs (given order)."""
    lines = [f">> {fact}" for fact in theory.facts]
    lines.extend(str(rule) for rule in sorted(theory.rules, key=lambda r: r.id))
    lines.extend(f"{w} > {l}" for w, l in theory.superiority)
    return "\n".join(lines) + ("\n" if lines else "")
