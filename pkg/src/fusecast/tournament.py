"""Translate labeled forecast assertions into a defeasible theory.

Per slot (condition, location, day horizon):

  * observation assertions become facts over untagged atoms, and suppress all
    model-derived untagged conclusions for that slot (ground truth wins);
  * every model assertion becomes a body-less defeasible rule concluding a
    source-tagged literal;
  * a conflicting pair yields two "supremacy" rules (one blended value biased
    toward each side), two conflict rules connecting the blended outcomes,
    and two priorities oriented toward whichever side prevails
    (override, then accuracy, then recency);
  * an uncontested slot gets pass-through rules so the scenario layer always
    reads untagged literals.

More than two conflicting sources fold pairwise in sift order; intermediate
rounds conclude source-tagged literals so only the final round's heads are
scenario-visible (with two sources this is the plain pairwise construction).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from .errors import ForecastError
from .kb import KnowledgeBase, accuracy_of, override_winner
from .model import (
    Condition,
    LabeledAssertionalMap,
    Label,
    TimeRef,
    Value,
    conflicts_with,
    hindcast_days,
    horizon_index,
    is_future,
    resolve_instant,
)
from .theory import (
    DefeasibleTheory,
    Literal,
    Rule,
    RuleKind,
    encode_atom,
    source_tag,
    validate_theory,
)


class Bias(Enum):
    FIRST = "first"
    SECOND = "second"


class Winner(Enum):
    FIRST = "first"
    SECOND = "second"
    TIE = "tie"


class PrevalenceBasis(Enum):
    SPECIFIC = "specific"   # expert override
    ACCURACY = "accuracy"
    RECENCY = "recency"


@dataclass(frozen=True)
class Prevalence:
    winner: Winner
    basis: Optional[PrevalenceBasis]  # None exactly when winner is TIE


BlendFn = Callable[[Value, Value, Fraction, Fraction, "Bias", Mapping[str, Fraction]], Value]


@dataclass(frozen=True)
class SupremacyStrategy:
    """A pure combiner of two conflicting values into one biased outcome.

    Every strategy must keep the result magnitude inside the closed interval
    spanned by the inputs (betweenness) and return the biased value unchanged
    when both inputs are equal (idempotence).
    """

    name: str
    blend: BlendFn
    parameters: Mapping[str, Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "parameters", dict(self.parameters or {}))

    def __call__(self, v_first: Value, v_second: Value,
                 a_first: Fraction, a_second: Fraction, bias: Bias) -> Value:
        return self.blend(v_first, v_second, a_first, a_second, bias, self.parameters)


def _round_half_up(x: Fraction) -> Fraction:
    return Fraction((2 * x.numerator + x.denominator) // (2 * x.denominator))


def _biased_blend(v_first: Value, v_second: Value, a_first: Fraction,
                  a_second: Fraction, bias: Bias,
                  params: Mapping[str, Fraction]) -> Value:
    if (v_first.direction is None) != (v_second.direction is None):
        raise ForecastError("cannot blend values of mixed condition kinds")
    if bias is Bias.FIRST:
        v_bias, v_other, a_bias, a_other = v_first, v_second, a_first, a_second
    else:
        v_bias, v_other, a_bias, a_other = v_second, v_first, a_second, a_first
    floor = params.get("min_weight", Fraction(1, 2))
    w = max(a_bias, 1 - a_other)
    w = min(max(w, floor), Fraction(1))
    blended = _round_half_up(w * v_bias.magnitude + (1 - w) * v_other.magnitude)
    lo = min(v_first.magnitude, v_second.magnitude)
    hi = max(v_first.magnitude, v_second.magnitude)
    blended = min(max(blended, lo), hi)  # betweenness survives the rounding
    return Value(blended, v_bias.direction)


def _pick_biased(v_first: Value, v_second: Value, a_first: Fraction,
                 a_second: Fraction, bias: Bias,
                 params: Mapping[str, Fraction]) -> Value:
    return v_first if bias is Bias.FIRST else v_second


BIASED_BLEND = SupremacyStrategy("biased-blend", _biased_blend)
PICK_BIASED = SupremacyStrategy("pick-biased", _pick_biased)
STRATEGIES = {s.name: s for s in (BIASED_BLEND, PICK_BIASED)}


def supremacy(v_first: Value, v_second: Value, a_first: Fraction,
              a_second: Fraction, bias: Bias,
              strategy: SupremacyStrategy = BIASED_BLEND) -> Value:
    """Biased combination of two conflicting values of the same kind."""
    return strategy(v_first, v_second, a_first, a_second, bias)


# ---------------------------------------------------------------------------
# Sifting
# ---------------------------------------------------------------------------

_CONDITION_ORDER = {cond: i for i, cond in enumerate(Condition)}


def _lead_horizon(lam: LabeledAssertionalMap) -> int:
    """Forecast lead time in days (validity vs generation), floored at 0."""
    days = hindcast_days(lam.map.valid_at, lam.label.generated_at)
    return max(days or 0, 0)


def _lam_accuracy(lam: LabeledAssertionalMap, kb: KnowledgeBase) -> Fraction:
    return accuracy_of(kb, lam.label.method, _lead_horizon(lam))


def slot_key(lam: LabeledAssertionalMap, now: TimeRef) -> tuple:
    m = lam.map
    return (_CONDITION_ORDER[m.condition], str(m.location),
            horizon_index(m.valid_at, now))


def sift(lams: Sequence[LabeledAssertionalMap], kb: KnowledgeBase,
         now: TimeRef) -> list[LabeledAssertionalMap]:
    """Discard out-of-date or unreliable assertions and order the survivors.

    Dropped: future-labeled maps (generated after `now`), maps whose validity
    already lies in the past, and maps below the KB reliability threshold
    (observations always survive). Survivors are grouped per slot and ordered
    by accuracy desc, generation time desc, method id asc.
    """
    kept = []
    for lam in lams:
        if is_future(lam.label.generated_at, now):
            continue
        if horizon_index(lam.map.valid_at, now) < 0:
            continue
        if not lam.is_observation and _lam_accuracy(lam, kb) < kb.min_accuracy:
            continue
        kept.append(lam)

    def group_rank(lam: LabeledAssertionalMap) -> tuple:
        acc = _lam_accuracy(lam, kb)
        recency = resolve_instant(lam.label.generated_at, now)
        recency_key = recency.timestamp() if hasattr(recency, "timestamp") else recency
        return (-acc, -recency_key, lam.label.method, str(lam.map.value))

    return sorted(kept, key=lambda lam: (slot_key(lam, now), group_rank(lam)))


# ---------------------------------------------------------------------------
# Prevalence
# ---------------------------------------------------------------------------

def _label_order(a: Label, b: Label) -> int:
    """-1/0/+1 comparing generation times (later is greater)."""
    if not a.generated_at.is_symbolic:
        ref = a.generated_at
    elif not b.generated_at.is_symbolic:
        ref = b.generated_at
    else:
        ref = TimeRef.symbolic(0)
    ta = resolve_instant(a.generated_at, ref)
    tb = resolve_instant(b.generated_at, ref)
    return (ta > tb) - (ta < tb)


def _prevalence(label_a: Label, acc_a: Fraction, label_b: Label, acc_b: Fraction,
                kb: KnowledgeBase, condition: Condition,
                location: Optional[str]) -> Prevalence:
    ov = None
    if label_a.method != label_b.method:
        ov = override_winner(kb, label_a.method, label_b.method, condition, location)
    if ov is not None:
        return Prevalence(Winner.FIRST if ov == label_a.method else Winner.SECOND,
                          PrevalenceBasis.SPECIFIC)
    if acc_a != acc_b:
        return Prevalence(Winner.FIRST if acc_a > acc_b else Winner.SECOND,
                          PrevalenceBasis.ACCURACY)
    order = _label_order(label_a, label_b)
    if order:
        return Prevalence(Winner.FIRST if order > 0 else Winner.SECOND,
                          PrevalenceBasis.RECENCY)
    return Prevalence(Winner.TIE, None)


def prevails(a: LabeledAssertionalMap, b: LabeledAssertionalMap,
             kb: KnowledgeBase) -> Prevalence:
    """Which of two conflicting assertions wins.

    Expert override first, then higher accuracy at the lead horizon, then the
    more recent generation time; Tie only when all three are silent.
    """
    if not conflicts_with(a.map, b.map):
        raise ForecastError("prevails requires two conflicting assertional maps")
    return _prevalence(a.label, _lam_accuracy(a, kb), b.label, _lam_accuracy(b, kb),
                       kb, a.map.condition, a.map.location.name)


# ---------------------------------------------------------------------------
# Theory construction
# ---------------------------------------------------------------------------

#: Tag namespace reserved for intermediate fold candidates ("xr0", "xr1", ...).
#: Real methods may not lower onto it: intermediate rounds must own their
#: atoms outright, or value-revisiting folds would entangle earlier rounds.
_RESERVED_TAG_RE = re.compile(r"xr\d+\Z")


@dataclass
class _Round:
    """One contested step of a slot's pairwise fold.

    Non-final rounds conclude literals in the reserved per-round namespace;
    only the last round's heads are untagged and scenario-visible.
    """

    index: int
    body: tuple[Literal, Literal]
    blend_first: Value
    blend_second: Value
    first_wins: bool


def build_theory(metarules: Sequence[LabeledAssertionalMap], kb: KnowledgeBase,
                 now: TimeRef,
                 strategy: SupremacyStrategy = BIASED_BLEND) -> DefeasibleTheory:
    """Emit the defeasible theory for a set of labeled assertions.

    Sifts internally (idempotent), then processes slots in canonical order.
    Deterministic: equal inputs, in any order, serialize identically.
    """
    lams = sift(metarules, kb, now)
    _check_tag_collisions(lams)

    facts: list[Literal] = []
    rules: dict[str, Rule] = {}
    sups: list[tuple[str, str]] = []

    def add_rule(rule: Rule) -> None:
        existing = rules.get(rule.id)
        if existing is None:
            rules[rule.id] = rule
        elif existing != rule:
            raise ForecastError(f"conflicting definitions for rule {rule.id!r}")

    groups: dict[tuple, list[LabeledAssertionalMap]] = {}
    for lam in lams:
        groups.setdefault(slot_key(lam, now), []).append(lam)

    for key in sorted(groups):
        group = groups[key]
        horizon = key[2]
        cond = group[0].map.condition
        location = group[0].map.location
        obs = [l for l in group if l.is_observation]
        models = [l for l in group if not l.is_observation]

        for lam in models:
            atom = encode_atom(cond, lam.label.method, location, horizon,
                               lam.map.value)
            add_rule(Rule(f"r_{atom}", RuleKind.DEFEASIBLE, (), Literal(atom)))

        if obs:
            # Ground truth covers the slot: facts only, no untagged model output.
            for lam in obs:
                lit = Literal(encode_atom(cond, None, location, horizon,
                                          lam.map.value))
                if lit not in facts:
                    facts.append(lit)
            continue
        if not models:
            continue

        rounds = _fold_slot(models, cond, location, horizon, kb, strategy)
        if not rounds:
            for lam in models:
                tagged = encode_atom(cond, lam.label.method, location, horizon,
                                     lam.map.value)
                untagged = encode_atom(cond, None, location, horizon,
                                       lam.map.value)
                add_rule(Rule(f"pt_{tagged}", RuleKind.DEFEASIBLE,
                              (Literal(tagged),), Literal(untagged)))
            continue
        for i, rnd in enumerate(rounds):
            _emit_round(rnd, cond, location, horizon,
                        final=(i == len(rounds) - 1),
                        add_rule=add_rule, sups=sups)

    theory = DefeasibleTheory(tuple(facts), tuple(rules.values()), tuple(sups))
    validate_theory(theory)
    return theory


def _fold_slot(models: Sequence[LabeledAssertionalMap], cond: Condition,
               location, horizon: int, kb: KnowledgeBase,
               strategy: SupremacyStrategy) -> list[_Round]:
    """Simulate the pairwise fold and record every contested round.

    The champion's running value is the winner's blend, its label the
    winner's original label. Each non-final round concludes atoms in its own
    reserved namespace (tag "xr<i>"), so rounds never share literals, however
    the blended values evolve; the last round's heads become untagged at
    emission.
    """
    first = models[0]
    champ_lit = Literal(encode_atom(cond, first.label.method, location, horizon,
                                    first.map.value))
    champ_value = first.map.value
    champ_lam = first
    rounds: list[_Round] = []
    for nxt in models[1:]:
        if nxt.map.value == champ_value:
            continue
        index = len(rounds)
        a_first = _lam_accuracy(champ_lam, kb)
        a_second = _lam_accuracy(nxt, kb)
        blend_first = supremacy(champ_value, nxt.map.value, a_first, a_second,
                                Bias.FIRST, strategy)
        blend_second = supremacy(champ_value, nxt.map.value, a_first, a_second,
                                 Bias.SECOND, strategy)
        verdict = _prevalence(champ_lam.label, a_first, nxt.label, a_second,
                              kb, cond, getattr(location, "name", location))
        first_wins = verdict.winner is not Winner.SECOND  # ties keep the champion
        tagged_next = Literal(encode_atom(cond, nxt.label.method, location,
                                          horizon, nxt.map.value))
        rounds.append(_Round(
            index=index,
            body=(champ_lit, tagged_next),
            blend_first=blend_first,
            blend_second=blend_second,
            first_wins=first_wins,
        ))
        champ_value = blend_first if first_wins else blend_second
        champ_lam = champ_lam if first_wins else nxt
        champ_lit = Literal(encode_atom(cond, f"xr{index}", location, horizon,
                                        champ_value))
    return rounds


def _emit_round(rnd: _Round, cond: Condition, location, horizon: int,
                final: bool, add_rule, sups: list) -> None:
    src = None if final else f"xr{rnd.index}"

    if rnd.blend_first == rnd.blend_second:
        # Both biased outcomes agree: the contest is vacuous.
        head = Literal(encode_atom(cond, src, location, horizon, rnd.blend_first))
        add_rule(Rule(f"sr_{head.atom}", RuleKind.DEFEASIBLE, rnd.body, head))
        return

    head_first = Literal(encode_atom(cond, src, location, horizon, rnd.blend_first))
    head_second = Literal(encode_atom(cond, src, location, horizon, rnd.blend_second))
    sr_first = Rule(f"sr_{head_first.atom}", RuleKind.DEFEASIBLE, rnd.body, head_first)
    sr_second = Rule(f"sr_{head_second.atom}", RuleKind.DEFEASIBLE, rnd.body, head_second)
    vc_first = Rule(f"vc_{head_first.atom}", RuleKind.DEFEASIBLE,
                    (head_first,), head_second.complement())
    vc_second = Rule(f"vc_{head_second.atom}", RuleKind.DEFEASIBLE,
                     (head_second,), head_first.complement())
    for rule in (sr_first, sr_second, vc_first, vc_second):
        add_rule(rule)
    if rnd.first_wins:
        sups.append((vc_first.id, sr_second.id))
        sups.append((sr_first.id, vc_second.id))
    else:
        sups.append((vc_second.id, sr_first.id))
        sups.append((sr_second.id, vc_first.id))


def _check_tag_collisions(lams: Sequence[LabeledAssertionalMap]) -> None:
    tags: dict[str, str] = {}
    for lam in lams:
        method = lam.label.method
        tag = source_tag(method)
        if _RESERVED_TAG_RE.match(tag):
            raise ForecastError(
                f"method id {method!r} lowers onto the reserved tag {tag!r}"
            )
        other = tags.setdefault(tag, method)
        if other != method:
            raise ForecastError(
                f"method ids {other!r} and {method!r} collide on atom tag {tag!r}"
            )
