"""Method accuracies, expert priority overrides, and the reliability threshold.

The knowledge base is immutable after load and read-only everywhere else.
File format (UTF-8 JSON, exact decimals preserved):

    {"accuracies": {"ECMWF": {"1": 0.85, "2": 0.80}, ...},
     "overrides": [{"winner": "...", "loser": "...",
                    "condition": "wind"?, "location": "Sea"?}, ...],
     "min_accuracy": 0}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Optional

from .errors import SchemaError, UnknownMethodError
from .model import Condition, OBSERVATION_METHOD, decimal_str

_json_fraction = lambda s: Fraction(Decimal(s))


@dataclass(frozen=True)
class AccuracyRecord:
    method: str
    horizon: int
    accuracy: Fraction


@dataclass(frozen=True)
class PriorityOverride:
    """An expert override: `winner` beats `loser`, optionally only within a
    (condition, location) scope. Unset scope fields mean "any"."""

    winner: str
    loser: str
    condition: Optional[Condition] = None
    location: Optional[str] = None

    @property
    def specificity(self) -> int:
        return 2 * (self.condition is not None) + (self.location is not None)


@dataclass(frozen=True)
class KnowledgeBase:
    accuracies: tuple[AccuracyRecord, ...] = ()
    overrides: tuple[PriorityOverride, ...] = ()
    min_accuracy: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(
            self, "accuracies",
            tuple(sorted(self.accuracies, key=lambda r: (r.method, r.horizon))),
        )
        object.__setattr__(
            self, "overrides",
            tuple(sorted(self.overrides, key=lambda o: (
                o.winner, o.loser,
                o.condition.value if o.condition else "",
                o.location or "",
            ))),
        )
        _validate(self)

    def methods(self) -> list[str]:
        return sorted({r.method for r in self.accuracies})


def _validate(kb: KnowledgeBase) -> None:
    seen = set()
    for rec in kb.accuracies:
        if rec.method == OBSERVATION_METHOD:
            raise SchemaError(
                f"accuracies.{rec.method}",
                "the observation method has implicit accuracy 1.0 and may not be overridden",
            )
        if rec.horizon < 0:
            raise SchemaError(f"accuracies.{rec.method}.{rec.horizon}",
                              "horizons are non-negative")
        if not 0 <= rec.accuracy <= 1:
            raise SchemaError(
                f"accuracies.{rec.method}.{rec.horizon}",
                f"accuracy {decimal_str(rec.accuracy)} outside [0, 1]",
            )
        key = (rec.method, rec.horizon)
        if key in seen:
            raise SchemaError(f"accuracies.{rec.method}.{rec.horizon}",
                              "duplicate (method, horizon) record")
        seen.add(key)
    if not 0 <= kb.min_accuracy <= 1:
        raise SchemaError("min_accuracy",
                          f"{decimal_str(kb.min_accuracy)} outside [0, 1]")
    by_scope: dict[tuple, list[PriorityOverride]] = {}
    for i, ov in enumerate(kb.overrides):
        if ov.winner == ov.loser:
            raise SchemaError(f"overrides[{i}]", "winner equals loser")
        by_scope.setdefault((ov.condition, ov.location), []).append(ov)
    for scope, ovs in by_scope.items():
        _check_acyclic(scope, ovs)


def _check_acyclic(scope: tuple, overrides: list[PriorityOverride]) -> None:
    edges: dict[str, set[str]] = {}
    for ov in overrides:
        edges.setdefault(ov.winner, set()).add(ov.loser)
    state: dict[str, int] = {}  # 1 = on stack, 2 = done

    def visit(node: str) -> bool:
        state[node] = 1
        for nxt in edges.get(node, ()):
            if state.get(nxt) == 1 or (state.get(nxt) is None and visit(nxt)):
                return True
        state[node] = 2
        return False

    for node in list(edges):
        if state.get(node) is None and visit(node):
            raise SchemaError(
                "overrides",
                f"priority overrides form a cycle within scope {scope}",
            )


def accuracy_of(kb: KnowledgeBase, method: str, horizon: int) -> Fraction:
    """Accuracy of a method at a forecast horizon.

    Observations are axiomatically 1.0. Missing horizons fall back to the
    nearest smaller recorded horizon (accuracy decays with horizon, so the
    nearer value is conservative); with no smaller record, the smallest
    recorded horizon is used. A method with no records at all is an error.
    """
    if method == OBSERVATION_METHOD:
        return Fraction(1)
    records = [r for r in kb.accuracies if r.method == method]
    if not records:
        raise UnknownMethodError(f"unknown method: {method!r}")
    below = [r for r in records if r.horizon <= horizon]
    if below:
        return max(below, key=lambda r: r.horizon).accuracy
    return min(records, key=lambda r: r.horizon).accuracy


def override_winner(
    kb: KnowledgeBase,
    a: str,
    b: str,
    condition: Optional[Condition] = None,
    location: Optional[str] = None,
) -> Optional[str]:
    """The override winner between methods a and b, if any override matches.

    Most specific scope wins: (condition, location) > condition-only >
    location-only > global. Antisymmetric in (a, b) by construction.
    """
    if a == b:
        raise SchemaError("override", "cannot compare a method with itself")
    candidates = [
        ov for ov in kb.overrides
        if {ov.winner, ov.loser} == {a, b}
        and (ov.condition is None or ov.condition is condition)
        and (ov.location is None or ov.location == location)
    ]
    if not candidates:
        return None
    return max(candidates, key=lambda ov: ov.specificity).winner


def load_kb(data: bytes) -> KnowledgeBase:
    """Parse and validate a KB document."""
    try:
        doc = json.loads(data.decode("utf-8"), parse_float=_json_fraction)
    except (UnicodeDecodeError, json.JSONDecodeError, InvalidOperation) as exc:
        raise SchemaError("", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("", "top level must be an object")
    for key in doc:
        if key not in ("accuracies", "overrides", "min_accuracy"):
            raise SchemaError(key, "unknown key")

    records = []
    accs = doc.get("accuracies", {})
    if not isinstance(accs, dict):
        raise SchemaError("accuracies", "must be an object keyed by method id")
    for method, horizons in accs.items():
        if not isinstance(horizons, dict) or not horizons:
            raise SchemaError(f"accuracies.{method}",
                              "must be a non-empty object keyed by horizon")
        for h, acc in horizons.items():
            try:
                horizon = int(h)
            except ValueError:
                raise SchemaError(f"accuracies.{method}.{h}",
                                  "horizon keys are integers") from None
            if not isinstance(acc, (int, Fraction)) or isinstance(acc, bool):
                raise SchemaError(f"accuracies.{method}.{h}", "accuracy must be a number")
            records.append(AccuracyRecord(method, horizon, Fraction(acc)))

    overrides = []
    for i, item in enumerate(doc.get("overrides", [])):
        if not isinstance(item, dict):
            raise SchemaError(f"overrides[{i}]", "must be an object")
        for key in item:
            if key not in ("winner", "loser", "condition", "location"):
                raise SchemaError(f"overrides[{i}].{key}", "unknown key")
        try:
            winner, loser = item["winner"], item["loser"]
        except KeyError as exc:
            raise SchemaError(f"overrides[{i}]", f"missing {exc.args[0]}") from None
        condition = None
        if "condition" in item:
            try:
                condition = Condition(item["condition"])
            except ValueError:
                raise SchemaError(f"overrides[{i}].condition",
                                  f"unknown condition {item['condition']!r}") from None
        overrides.append(PriorityOverride(winner, loser, condition,
                                          item.get("location")))

    min_acc = doc.get("min_accuracy", 0)
    if not isinstance(min_acc, (int, Fraction)) or isinstance(min_acc, bool):
        raise SchemaError("min_accuracy", "must be a number")
    return KnowledgeBase(tuple(records), tuple(overrides), Fraction(min_acc))


def save_kb(kb: KnowledgeBase) -> bytes:
    """Serialize with deterministic key order and exact decimal numbers.

    load_kb(save_kb(kb)) == kb for every valid knowledge base.
    """
    out = ["{"]
    out.append('  "accuracies": {')
    methods = kb.methods()
    for mi, method in enumerate(methods):
        recs = [r for r in kb.accuracies if r.method == method]
        inner = ", ".join(
            f'"{r.horizon}": {decimal_str(r.accuracy)}' for r in recs
        )
        comma = "," if mi < len(methods) - 1 else ""
        out.append(f"    {json.dumps(method)}: {{{inner}}}{comma}")
    out.append("  },")
    out.append('  "overrides": [')
    for i, ov in enumerate(kb.overrides):
        parts = [f'"winner": {json.dumps(ov.winner)}',
                 f'"loser": {json.dumps(ov.loser)}']
        if ov.condition is not None:
            parts.append(f'"condition": "{ov.condition.value}"')
        if ov.location is not None:
            parts.append(f'"location": {json.dumps(ov.location)}')
        comma = "," if i < len(kb.overrides) - 1 else ""
        out.append("    {" + ", ".join(parts) + "}" + comma)
    out.append("  ],")
    out.append(f'  "min_accuracy": {decimal_str(kb.min_accuracy)}')
    out.append("}")
    return ("\n".join(out) + "\n").encode("utf-8")
