"""Four-point rain demo: daily precipitation from two models, fused and worded.

    python scripts/run_rain_demo.py
"""

from fractions import Fraction

from fusecast import (
    Condition,
    build_theory,
    classify,
    conclusions,
    extract_scenario,
    render_document,
    render_sharp,
    serialize_theory,
)
from fusecast.kb import AccuracyRecord, KnowledgeBase
from fusecast.model import (
    AssertionalMap,
    Label,
    LabeledAssertionalMap,
    Location,
    TimeRef,
    make_value,
)

NOW = TimeRef.symbolic(0)
POINTS = ("North", "East", "South", "West")

RAIN_MM = {
    "IFS": {0: (5, 5, 5, 5), 1: (24, 14, 24, 24), 2: (16, 16, 16, 16)},
    "GSM": {0: (4, 4, 4, 4), 1: (4, 4, 4, 4), 2: (6, 6, 6, 6)},
    "O": {0: (5, 5, 5, 5)},
}


def lams_for(method: str) -> list[LabeledAssertionalMap]:
    label = Label(method, NOW)
    out = []
    for day, row in RAIN_MM[method].items():
        for point, mm in zip(POINTS, row):
            out.append(LabeledAssertionalMap(label, AssertionalMap(
                Condition.RAIN, Location.point(point), TimeRef.symbolic(day),
                make_value(Condition.RAIN, mm))))
    return out


def main() -> None:
    kb = KnowledgeBase(accuracies=(
        AccuracyRecord("IFS", 1, Fraction(85, 100)),
        AccuracyRecord("IFS", 2, Fraction(80, 100)),
        AccuracyRecord("GSM", 1, Fraction(45, 100)),
        AccuracyRecord("GSM", 2, Fraction(40, 100)),
    ))
    lams = lams_for("IFS") + lams_for("GSM") + lams_for("O")

    theory = build_theory(lams, kb, NOW)
    print("=== generated theory ===")
    print(serialize_theory(theory))

    tags = conclusions(theory)
    scenario = extract_scenario(tags)
    print("=== fused rain amounts ===")
    for entry in scenario.entries:
        term = classify(entry.condition, entry.value)
        print(f"  day {entry.horizon}  {entry.location:<6} "
              f"{str(entry.value.magnitude):>4} mm  -> {term}")
    print()
    print("=== bulletin ===")
    print(render_document(render_sharp(scenario), "text").decode())


if __name__ == "__main__":
    main()
