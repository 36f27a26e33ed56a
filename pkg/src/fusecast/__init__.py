"""fusecast: multi-model weather forecast fusion through defeasible reasoning.

Pipeline: labeled forecast assertions from several numerical models are
translated into a defeasible theory (conflicting values become competing
blended rules with priorities), a defeasible-logic engine computes the
winning weather scenario, and a lexicon/bulletin layer renders it as a
human-readable forecast.
"""

from .errors import ForecastError
from .kb import KnowledgeBase, accuracy_of, load_kb, override_winner, save_kb
from .ingest import parse_source_map, validate_source_map
from .model import (
    AssertionalMap,
    Compass,
    Condition,
    Label,
    LabeledAssertionalMap,
    Location,
    TimeRef,
    Value,
    conflicts_with,
    horizon_index,
)
from .reasoner import ConclusionSet, conclusions, oracle_conclusions
from .theory import (
    DefeasibleTheory,
    Literal,
    Rule,
    RuleKind,
    decode_atom,
    encode_atom,
    parse_theory,
    serialize_theory,
)
from .tournament import Prevalence, build_theory, prevails, sift, supremacy
from .lexicon import DEFAULT_LEXICON, LexiconTable, classify, direction_name
from .bulletin import (
    BulletinDocument,
    WeatherScenario,
    extract_scenario,
    render_document,
    render_sharp,
    render_smooth,
)

__version__ = "0.1.0"

__all__ = [
    "AssertionalMap",
    "BulletinDocument",
    "Compass",
    "ConclusionSet",
    "Condition",
    "DEFAULT_LEXICON",
    "DefeasibleTheory",
    "ForecastError",
    "KnowledgeBase",
    "Label",
    "LabeledAssertionalMap",
    "LexiconTable",
    "Literal",
    "Location",
    "Prevalence",
    "Rule",
    "RuleKind",
    "TimeRef",
    "Value",
    "WeatherScenario",
    "accuracy_of",
    "build_theory",
    "classify",
    "conclusions",
    "conflicts_with",
    "decode_atom",
    "direction_name",
    "encode_atom",
    "extract_scenario",
    "horizon_index",
    "load_kb",
    "oracle_conclusions",
    "override_winner",
    "parse_source_map",
    "parse_theory",
    "prevails",
    "render_document",
    "render_sharp",
    "render_smooth",
    "save_kb",
    "serialize_theory",
    "sift",
    "supremacy",
    "validate_source_map",
]
