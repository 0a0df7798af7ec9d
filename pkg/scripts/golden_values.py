"""Print the headline values: u-classes of the reference forms and their derived invariants."""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from qfi import chech, witt
from qfi.kfield import FieldModel
from qfi.syntax import eval_form, parse_form


@dataclass
class GoldenValuesConfig:
    gens: str = "a,b,c,d"
    forms: list[str] = field(default_factory=lambda: [
        "<a>",
        "pf(a,b)",
        "pf(a,b,c)",
        "pf(a,b,c,d)",
        "pf(a,b) (x) <1,c,d>",
        "pf(a,b) (x) <c,d>",
    ])


def report(text: str, model: FieldModel) -> list[str]:
    q = eval_form(parse_form(text, model), model.m)
    fc = chech.uclasses_of_form(q, model)
    lines = [f"{text}  [{fc.shape}, context {fc.ctx.describe()}]"]
    for i in fc.vector.nonzero():
        lines.append(f"  u{i} = {fc.vector[i].render()}  {fc.vector[i].bidegree()}")
    lvl = witt.level(q)
    if fc.shape == "pfister-divisible":
        lines.append(f"  e_{fc.ctx.n} from u: {model.k_text(chech.arason_from_u(fc.ctx, fc.vector))}"
                     f"; Witt oracle: {model.k_text(witt.e_invariant(q, fc.ctx.n))}")
    if q.dim % 2 == 0:
        lines.append(f"  j_min = {chech.j_min(fc.vector)}, j_lower_set = {chech.j_lower_set(fc.vector)}, level = {lvl}")
    return lines


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gens", default=GoldenValuesConfig.gens)
    ap.add_argument("forms", nargs="*")
    a = ap.parse_args()
    cfg = GoldenValuesConfig(a.gens, a.forms) if a.forms else GoldenValuesConfig(a.gens)
    model = FieldModel.from_text(cfg.gens)
    for text in cfg.forms:
        print("\n".join(report(text, model)))


if __name__ == "__main__":
    main()
