"""``qfi``: command-line front end.

    qfi --gens a,b,c,d <command> "<form-expr>" [flags] [--json]

Exit codes: 0 success, 1 domain error, 2 parse error, 3 internal invariant breach.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import json
import re
import sys
from dataclasses import dataclass, field

from . import bo_ring as bo
from . import chech, motive, witt
from .errors import InvariantBreach, PreconditionError, QfiError, UnsupportedShape
from .kfield import FieldModel, KElement
from .selftest import SelftestConfig, run_all
from .syntax import eval_form, parse_form, parse_poly, render_form


@dataclass
class CommandResult:
    lines: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    exit_code: int = 0

    def add(self, key: str, value, text: str | None = None) -> None:
        self.data[key] = value
        self.lines.append(f"{key.replace('_', ' ')}: {value if text is None else text}")


def _level_value(level: float):
    return "inf" if level == float("inf") else int(level)


class _Form:
    """A parsed form together with its rendering and value."""

    def __init__(self, text: str, model: FieldModel):
        self.model = model
        self.ast = parse_form(text, model)
        self.text = render_form(self.ast, model)
        self.q = eval_form(self.ast, model.m)


def _need_model(args) -> FieldModel:
    if not getattr(args, "gens", None):
        raise PreconditionError("declare generators with --gens a,b,...")
    return FieldModel.from_text(args.gens)


def _form(args) -> _Form:
    return _Form(args.form, _need_model(args))


def _classes_or_none(q: witt.QForm, model: FieldModel):
    try:
        return chech.uclasses_of_form(q, model)
    except UnsupportedShape:
        return None


def _milnor_lines(q: witt.QForm, model: FieldModel) -> dict:
    w = witt.milnor_total_w(q)
    return {str(i): model.k_text(w.part(i)) for i in sorted(w.weights()) if i > 0}


# -- commands ------------------------------------------------------------------

def cmd_invariants(args) -> CommandResult:
    f = _form(args)
    model, q = f.model, f.q
    res = CommandResult()
    res.add("form", f.text)
    res.add("dim", q.dim)
    res.add("det", model.unit_text(witt.det_pm(q)))
    wc = witt.witt_class(q)
    res.add("witt_class", [model.unit_text(u) for u in wc.units()],
            "<" + ", ".join(model.unit_text(u) for u in wc.units()) + ">")
    res.add("anisotropic_dim", wc.anisotropic_dim, f"{wc.anisotropic_dim} (model-relative)")
    lvl = witt.level(q)
    res.add("level", _level_value(lvl), "inf (hyperbolic)" if lvl == float("inf") else None)
    if lvl != float("inf"):
        e = witt.e_invariant(q, int(lvl))
        res.add("e", {"n": int(lvl), "value": model.k_text(e)}, f"e_{int(lvl)} = {model.k_text(e)}")
    else:
        res.add("e", None, "none")
    w = _milnor_lines(q, model)
    res.add("milnor_w", w, ", ".join(f"w_{i} = {v}" for i, v in w.items()) or "1")
    return res


def cmd_witt(args) -> CommandResult:
    f = _form(args)
    model = f.model
    wc = witt.witt_class(f.q)
    nil = witt.to_nil_coords(wc)
    res = CommandResult()
    res.add("form", f.text)
    res.add("witt_class", [model.unit_text(u) for u in wc.units()],
            "<" + ", ".join(model.unit_text(u) for u in wc.units()) + ">")
    res.add("nil_coords", nil.render(model))
    res.add("valuation", _level_value(nil.valuation()))
    res.add("anisotropic_dim", wc.anisotropic_dim, f"{wc.anisotropic_dim} (model-relative)")
    return res


def cmd_inpower(args) -> CommandResult:
    f = _form(args)
    res = CommandResult()
    res.add("form", f.text)
    res.add("n", args.n)
    res.add("member", witt.in_fundamental_power(f.q, args.n), "yes" if witt.in_fundamental_power(f.q, args.n) else "no")
    res.add("level", _level_value(witt.level(f.q)))
    return res


def cmd_arason(args) -> CommandResult:
    f = _form(args)
    model = f.model
    e = witt.e_invariant(f.q, args.n)
    res = CommandResult()
    res.add("form", f.text)
    res.add("n", args.n)
    res.add("e_witt", model.k_text(e))
    fc = _classes_or_none(f.q, model)
    if fc is not None and fc.shape == "pfister-divisible" and fc.ctx.n == args.n:
        from_u = chech.arason_from_u(fc.ctx, fc.vector)
        res.add("e_from_u", model.k_text(from_u))
        if from_u != e:
            raise InvariantBreach("Arason class from u-classes disagrees with the Witt oracle",
                                  from_u=model.k_text(from_u), witt=model.k_text(e))
        res.add("agree", True, "yes")
    else:
        res.add("e_from_u", None, "not available (needs a Pfister multiple of fold n)")
    return res


def _p_of(q: witt.QForm) -> witt.QForm:
    return q if q.dim % 2 == 0 else witt.oplus(q, witt.QForm((witt.det_pm(q),), q.m))


def _j_data(fc: chech.FormClasses) -> tuple:
    jm = chech.j_min(fc.vector)
    return ("all-odd-vanishing" if jm is None else jm), chech.j_lower_set(fc.vector)


def cmd_uclasses(args) -> CommandResult:
    f = _form(args)
    model = f.model
    fc = chech.uclasses_of_form(f.q, model)
    v = fc.vector
    res = CommandResult()
    res.add("form", f.text)
    res.add("dim", f.q.dim)
    res.add("shape", fc.shape)
    res.add("context", fc.ctx.describe())
    if fc.shape == "pfister-divisible":
        res.add("slots", [model.unit_text(b) for b in fc.slots], "<" + ", ".join(model.unit_text(b) for b in fc.slots) + ">")
        res.add("faithful", fc.faithful, "yes" if fc.faithful else "no (values pulled back to the model of alpha)")
    if fc.ctx.n >= 1:
        res.add("tau_g", model.k_text(fc.ctx.alpha), f"t*g = {model.k_text(fc.ctx.alpha)}")
    classes = []
    for i in v.nonzero():
        classes.append({"i": i, "class": v[i].render(), "bidegree": list(v[i].bidegree())})
    res.data["classes"] = classes
    res.lines.append("classes:" + ("" if classes else " all zero"))
    for c in classes:
        res.lines.append(f"  u{c['i']} = {c['class']}  ({c['bidegree'][0]},{c['bidegree'][1]})")
    pf = fc if f.q.dim % 2 == 0 else _classes_or_none(_p_of(f.q), model)
    if pf is not None:
        jm, lower = _j_data(pf)
        res.add("j_min", jm)
        res.add("j_lower_set", lower, "{" + ", ".join(map(str, lower)) + "}")
    else:
        res.add("j_min", None, "not available (q + <det q> has unsupported shape)")
    if fc.shape == "pfister-divisible":
        e = chech.arason_from_u(fc.ctx, v)
        res.add("arason", {"n": fc.ctx.n, "value": model.k_text(e)}, f"e_{fc.ctx.n} = {model.k_text(e)}")
    return res


def cmd_jmin(args) -> CommandResult:
    f = _form(args)
    model = f.model
    p = _p_of(f.q)
    fc = chech.uclasses_of_form(p, model)
    jm, lower = _j_data(fc)
    res = CommandResult()
    res.add("form", f.text)
    res.add("p", p.render(model))
    res.add("d", p.dim // 2)
    res.add("j_min", jm)
    res.add("j_lower_set", lower, "{" + ", ".join(map(str, lower)) + "}")
    return res


def _labels(q: witt.QForm, model: FieldModel, tag: str) -> tuple[dict[int, str], str]:
    """u-class labels of q: computed when the shape is supported, else symbolic.

    Symbolic labels still vanish below 2^{n-1} when q lies in I^n.
    """
    fc = _classes_or_none(q, model)
    if fc is not None:
        return {i: fc.vector[i].render() for i in range(1, q.dim + 1)}, "computed"
    lvl = witt.level(q)
    out = {}
    for i in range(1, q.dim + 1):
        out[i] = "0" if lvl >= 1 and i <= 2 ** (int(lvl) - 1) - 1 else f"u{i}({tag})"
    return out, "symbolic"


def _decomposition_data(mp: motive.MotiveProduct) -> dict:
    dec = motive.split_summands(mp)
    return {
        "motive": mp.render(),
        "tate": [list(t) for t in dec.tate],
        "blocks": [f.render() for f in dec.blocks],
        "closure_poincare": motive.split_poincare(mp).render(),
        "closure_rank": mp.split_rank,
    }


def cmd_motive(args) -> CommandResult:
    f = _form(args)
    model, q = f.model, f.q
    res = CommandResult()
    res.add("form", f.text)
    base = f"Cech({f.text})"
    if args.torsor:
        labels, how = _labels(q, model, "q")
        mp = motive.torsor_motive(q.dim, [labels[i] for i in range(1, q.dim + 1)], base)
        res.add("kind", "torsor")
        res.add("labels", how)
        data = _decomposition_data(mp)
        for key in ("motive", "tate", "blocks", "closure_poincare", "closure_rank"):
            res.add(key, data[key], _fmt(data[key]))
        return res
    n = q.dim
    if n % 2 == 0:
        labels, how = _labels(q, model, "q")
    else:
        labels, how = _labels(_p_of(q), model, "p")
    mp = motive.grassmannian_motive(n, labels, base)
    res.add("kind", "grassmannian")
    res.add("labels", how)
    res.add("motive", mp.render())
    comps = motive.grassmannian_components(mp)
    res.add("components", len(comps))
    for c, comp in enumerate(comps):
        data = _decomposition_data(comp)
        res.data.setdefault("component_data", []).append(data)
        res.lines.append(f"component {c}: {data['motive']}")
        res.lines.append(f"  twists: {' '.join(f'({w})[{b}]' for w, b in (fc.twist for fc in comp.factors)) or 'none'}")
        res.lines.append(f"  tate: {_fmt(data['tate'])}; blocks: {len(data['blocks'])}")
        res.lines.append(f"  closure poincare: {data['closure_poincare']}")
    return res


def _fmt(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _infer_dim(text: str) -> int:
    idx = [int(x) for x in re.findall(r"\bu(\d+)", text)]
    return max(idx, default=1)


def cmd_sq(args) -> CommandResult:
    model = _need_model(args)
    n = args.dim or _infer_dim(args.target)
    ring = bo.bo_ring(n)
    x = parse_poly(args.target, ring, model)
    y = bo.sq(args.k, x)
    agree = bo.delta_star_sym(y) == bo.sq_oracle_sym(args.k, x)
    if not agree:
        raise InvariantBreach("Steenrod formula disagrees with the R-bullet oracle", target=x.render(model))
    res = CommandResult()
    res.add("target", x.render(model))
    res.add("n", n)
    res.add("k", args.k)
    res.add("result", y.render(model))
    bd = y.bidegree()
    if isinstance(bd, tuple):
        res.add("bidegree", list(bd), _fmt(list(bd)))
    else:
        res.add("bidegree", bd, bd or "zero")
    res.add("oracle_agrees", agree, "yes")
    return res


def cmd_restrict(args) -> CommandResult:
    model = _need_model(args)
    res = CommandResult()
    if args.pd:
        n = args.dim or _infer_dim(args.target)
        x = parse_poly(args.target, bo.bo_ring(n), model)
        res.add("target", x.render(model))
        res.add("n", n)
        res.add("restriction", "P_d")
        res.add("result", bo.restrict_to_pd(x).render(model))
        return res
    try:
        m, l = (int(p) for p in args.split.split(","))
    except ValueError:
        raise PreconditionError(f"--split expects M,L, got {args.split!r}")
    n = args.dim or m + l
    x = parse_poly(args.target, bo.bo_ring(n), model)
    y = bo.corestrict_sum(x, m, l)
    compatible = bo.delta_star(y) == bo.delta_star(x)
    if not compatible:
        raise InvariantBreach("sum restriction is not compatible with delta*")
    res.add("target", x.render(model))
    res.add("n", n)
    res.add("split", [m, l], f"{m}+{l}")
    res.add("result", y.render(model))
    res.add("delta_compatible", compatible, "yes")
    return res


def cmd_region(args) -> CommandResult:
    inside = chech.region_car(args.n, args.a, args.b, args.reduced)
    res = CommandResult()
    res.add("n", args.n)
    res.add("a", args.a)
    res.add("b", args.b)
    res.add("reduced", args.reduced)
    res.add("inside", inside, "yes" if inside else "no")
    return res


def cmd_selftest(args) -> CommandResult:
    res = CommandResult()
    results = run_all(SelftestConfig())
    failures = [(name, ce) for name, ce in results if ce is not None]
    for name, ce in results:
        res.lines.append(f"{name}: {'PASS' if ce is None else 'FAIL'}")
    res.data["suites"] = {name: ("pass" if ce is None else ce) for name, ce in results}
    if failures:
        name, ce = failures[0]
        res.lines.append(f"first counterexample ({name}): {ce}")
        res.data["ok"] = False
        res.exit_code = InvariantBreach.exit_code
    return res


# -- argument parsing --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gens", default=argparse.SUPPRESS, help="comma-separated generator names")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")

    p = argparse.ArgumentParser(prog="qfi", description="Subtle Stiefel-Whitney classes of quadratic forms "
                                "over a generic field", parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    def form_cmd(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.add_argument("form", help='form expression, e.g. "pf(a,b) (x) <1,c,d>"')
        sp.set_defaults(fn=fn)
        return sp

    form_cmd("invariants", cmd_invariants, "classical invariants from the Witt oracle")
    form_cmd("witt", cmd_witt, "Witt class and nilpotent coordinates")
    form_cmd("inpower", cmd_inpower, "membership in I^n").add_argument("--n", type=int, required=True)
    form_cmd("arason", cmd_arason, "e_n invariant, cross-checked via u-classes").add_argument("--n", type=int, required=True)
    form_cmd("uclasses", cmd_uclasses, "subtle Stiefel-Whitney classes")
    form_cmd("jmin", cmd_jmin, "bounds on the J-invariant")
    mp = form_cmd("motive", cmd_motive, "motivic decompositions")
    g = mp.add_mutually_exclusive_group(required=True)
    g.add_argument("--torsor", action="store_true")
    g.add_argument("--grassmannian", action="store_true")

    sp = sub.add_parser("sq", parents=[common], help="Steenrod square in BO(n)")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--dim", type=int)
    sp.set_defaults(fn=cmd_sq)

    sp = sub.add_parser("restrict", parents=[common], help="restriction along O(m)xO(l) or to P_d")
    rg = sp.add_mutually_exclusive_group(required=True)
    rg.add_argument("--split")
    rg.add_argument("--pd", action="store_true")
    sp.add_argument("--target", required=True)
    sp.add_argument("--dim", type=int)
    sp.set_defaults(fn=cmd_restrict)

    sp = sub.add_parser("region", parents=[common], help="proven vanishing region for I^n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--a", type=int, required=True, help="weight")
    sp.add_argument("--b", type=int, required=True, help="degree")
    sp.add_argument("--reduced", action="store_true")
    sp.set_defaults(fn=cmd_region)

    sp = sub.add_parser("selftest", parents=[common], help="run the property suites")
    sp.set_defaults(fn=cmd_selftest)
    return p


def _emit(payload: dict, as_json: bool, lines: list[str], stream) -> None:
    if as_json:
        stream.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        stream.write("\n".join(lines) + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    as_json = getattr(args, "json", False)
    try:
        res = args.fn(args)
    except QfiError as exc:
        payload = {"command": args.command, "ok": False, "error": exc.as_dict()}
        if as_json:
            _emit(payload, True, [], sys.stdout)
        else:
            sys.stderr.write(f"error [{exc.code}]: {exc.message}\n")
        return exc.exit_code
    except RecursionError as exc:
        err = InvariantBreach(f"recursion limit: {exc}")
        _emit({"command": args.command, "ok": False, "error": err.as_dict()}, as_json,
              [f"error [{err.code}]: {err.message}"], sys.stdout if as_json else sys.stderr)
        return err.exit_code
    payload = {"command": args.command, "ok": res.exit_code == 0, "result": res.data}
    _emit(payload, as_json, res.lines, sys.stdout)
    return res.exit_code


def capture(argv: list[str]) -> tuple[int, str, str]:
    """Run main in-process; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
