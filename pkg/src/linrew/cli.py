"""Command-line front end.

Exit codes: 0 the checked property holds, 1 a witness was found,
2 unknown (fuel or budget exhausted), 3 usage, parse or validation error.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import involutive as inv
from . import rewrite as rw
from .errors import FuelExhausted, IncompatibleVerb, LinrewError, NonTerminatingClosure, ValidationError
from .linspace import basis_key, format_lincomb, lincomb_to_json, parse_lincomb
from .rewrite import Verdict
from .systemfile import AbstractSpec, parse_order_override, parse_system
from .weyl import ThetaSystem, theta_nf

SCHEMA = 1

VERBS = {
    "check-strategy": "certify that the strategy's preorder is well-founded",
    "snf": "S-normal forms of the given vectors (or operators, for Weyl systems)",
    "s-confluence": "check snf(e - v) = 0 for every rule",
    "local-confluence": "check joinability of all rule pairs sharing a left-hand side",
    "quotient-basis": "basis elements fixed by SNF (a basis of the quotient)",
    "decreasing": "check decreasingness for the declared rule order",
    "serialize": "turn one parallel step into a sequence of single steps",
    "weyl-nf": "normal form(s) for the rewriting relation of the operators",
    "weyl-mul": "product of two operators",
    "divisions": "multiplicative-variable tables",
    "autoreduced": "check left autoreduction for the division",
    "involutive": "check involutivity for the division",
    "complete": "involutive completion",
    "axioms": "check involutive-division axioms on the leading monomials",
}


@dataclass
class Report:
    verb: str
    verdict: Verdict
    payload: dict = field(default_factory=dict)
    lines: list = field(default_factory=list)
    trace: Optional[rw.ReductionTrace] = None

    @property
    def exit_code(self):
        return self.verdict.exit_code

    def to_json(self):
        data = {"schema": SCHEMA, "verb": self.verb, "verdict": self.verdict.value}
        data.update(self.payload)
        return data


@dataclass
class Command:
    verb: str
    path: str
    args: list = field(default_factory=list)
    fuel: int = rw.DEFAULT_FUEL
    depth: Optional[int] = None
    max_rounds: Optional[int] = None
    trace: bool = False
    division: Optional[str] = None
    pommaret_convention: Optional[str] = None
    order: Optional[str] = None
    all_paths: bool = False
    dot: bool = False


def _vec(v):
    return format_lincomb(v)


def _trace_json(trace, fmt):
    return {
        "start": fmt(trace.start),
        "steps": [
            {"rule": s.rule_id, "basis": str(s.basis), "coefficient": str(s.coefficient), "result": fmt(s.result)}
            for s in trace.steps
        ],
    }


def _trace_lines(trace, fmt):
    out = [f"  {fmt(trace.start)}"]
    for s in trace.steps:
        out.append(f"  -> {fmt(s.result)}    [{s.rule_id}]")
    return out


def _need_strategy(spec):
    if spec.strategy is None:
        raise ValidationError("the system file declares no 'strategy' line")
    return spec.strategy


def _roots(spec):
    return spec.roots or tuple(spec.system.basis_ids())


# ---------------------------------------------------------------------------
# abstract verbs


def _check_strategy(cmd, spec):
    S = _need_strategy(spec)
    cert = rw.certify_strategy(spec.system, S, _roots(spec))
    payload = {"status": cert.status}
    lines = []
    if cert.certified:
        ranks = {str(e): r for e, r in sorted(cert.ranks.items(), key=lambda t: (-t[1], basis_key(t[0])))}
        payload["ranks"] = ranks
        lines.append("certified well-founded")
        lines.extend(f"  rank {r}: {e}" for e, r in ranks.items())
    elif cert.status == "cycle":
        payload["cycle"] = [str(e) for e in cert.cycle]
        lines.append("cycle: " + " -> ".join(map(str, cert.cycle)))
    else:
        payload["reason"] = cert.reason
        lines.append(f"unknown: {cert.reason}")
    if cmd.dot:
        graph = rw.support_graph(S, _roots(spec))
        dot = ["digraph support {"]
        for e in sorted(graph, key=basis_key):
            for e2 in graph[e]:
                dot.append(f'  "{e}" -> "{e2}";')
        dot.append("}")
        payload["dot"] = "\n".join(dot)
        lines.extend(dot)
    return Report(cmd.verb, cert.verdict, payload, lines)


def _snf_abstract(cmd, spec):
    S = _need_strategy(spec)
    results = {}
    lines = []
    for text in cmd.args:
        nf = rw.snf(parse_lincomb(text), S, cmd.fuel)
        results[text] = lincomb_to_json(nf)
        lines.append(_vec(nf))
    return Report(cmd.verb, Verdict.HOLDS, {"normal_forms": results}, lines)


def _s_confluence(cmd, spec):
    res = rw.check_s_confluence(spec.system, _need_strategy(spec), cmd.fuel)
    if res.confluent:
        return Report(cmd.verb, res.verdict, {}, ["S-confluent"])
    payload = {"rule": res.rule.id, "residual": lincomb_to_json(res.residual)}
    return Report(cmd.verb, res.verdict, payload, [f"not S-confluent: rule {res.rule.id} leaves SNF(e - v) = {_vec(res.residual)}"])


def _local_confluence(cmd, spec, system=None, fmt=_vec, basis_fmt=str):
    system = system or spec.system
    res = rw.check_local_confluence(system, cmd.fuel)
    if res.locally_confluent:
        return Report(cmd.verb, res.verdict, {}, ["locally confluent"])
    payload = {"basis": basis_fmt(res.basis), "rules": list(res.rules), "left": fmt(res.left), "right": fmt(res.right)}
    return Report(
        cmd.verb,
        res.verdict,
        payload,
        [f"not locally confluent at {basis_fmt(res.basis)}: {fmt(res.left)}  vs  {fmt(res.right)}"],
    )


def _quotient_basis(cmd, spec):
    basis = rw.quotient_basis(spec.system, _need_strategy(spec), _roots(spec), cmd.fuel)
    names = [str(e) for e in basis]
    return Report(cmd.verb, Verdict.HOLDS, {"basis": names}, [" ".join(names) if names else "(empty)"])


def _decreasing(cmd, spec):
    S = _need_strategy(spec)
    order = spec.order or rw.two_level_order(spec.system, S)
    res = rw.check_decreasing(spec.system, S, order, cmd.fuel)
    if res.decreasing:
        return Report(cmd.verb, res.verdict, {}, ["decreasing"])
    payload = {"rule": res.rule.id, "residual": lincomb_to_json(res.residual)}
    return Report(cmd.verb, res.verdict, payload, [f"not decreasing at rule {res.rule.id}: v - r_S(e) = {_vec(res.residual)}"])


def _serialize(cmd, spec):
    S = _need_strategy(spec)
    traces = []
    lines = []
    last = None
    for text in cmd.args:
        trace = rw.serialize_parallel(parse_lincomb(text), S, spec.system)
        traces.append(_trace_json(trace, _vec))
        lines.extend(_trace_lines(trace, _vec))
        last = trace
    return Report(cmd.verb, Verdict.HOLDS, {"traces": traces}, lines, last)


# ---------------------------------------------------------------------------
# Weyl verbs


def _alg(cmd, spec):
    alg = spec.alg
    if cmd.order:
        alg = alg.with_order(parse_order_override(cmd.order, alg))
        for name, D in zip(spec.names, spec.ops):
            if not alg.is_monic(D):
                raise ValidationError(f"operator {name} is not monic for the order {cmd.order!r}")
    return alg


def _isys(cmd, spec):
    alg = _alg(cmd, spec)
    L = inv.division_from_name(cmd.division or spec.division, cmd.pommaret_convention or spec.pommaret_convention)
    return inv.InvolutiveSystem(alg, spec.ops, L, spec.names)


def _snf_weyl(cmd, spec):
    isys = _isys(cmd, spec)
    alg = isys.alg
    results = {}
    lines = []
    for text in cmd.args:
        nf = inv.strategy_snf(alg.parse(text), isys, cmd.fuel)
        results[text] = alg.format(nf)
        lines.append(alg.format(nf))
    return Report(cmd.verb, Verdict.HOLDS, {"division": isys.division.name, "normal_forms": results}, lines)


def _weyl_nf(cmd, spec):
    alg = _alg(cmd, spec)
    T = ThetaSystem(alg, spec.ops, spec.names)
    results = {}
    lines = []
    verdict = Verdict.HOLDS
    for text in cmd.args:
        D = alg.parse(text)
        if cmd.all_paths:
            forms = sorted(alg.format(f) for f in theta_nf(D, T, "all", cmd.fuel))
            results[text] = forms
            lines.append(" | ".join(forms))
            if len(forms) > 1:
                verdict = Verdict.WITNESS
        else:
            nf = theta_nf(D, T, "leftmost", cmd.fuel)
            results[text] = alg.format(nf)
            lines.append(alg.format(nf))
    return Report(cmd.verb, verdict, {"normal_forms": results}, lines)


def _weyl_mul(cmd, spec):
    alg = _alg(cmd, spec)
    if len(cmd.args) != 2:
        raise ValidationError("weyl-mul takes exactly two operators")
    P = alg.mul(alg.parse(cmd.args[0]), alg.parse(cmd.args[1]))
    return Report(cmd.verb, Verdict.HOLDS, {"product": alg.format(P), "terms": alg.to_json(P)}, [alg.format(P)])


def _divisions(cmd, spec):
    alg = _alg(cmd, spec)
    names = [cmd.division] if cmd.division else ["janet", "thomas", "pommaret"]
    conv = cmd.pommaret_convention or spec.pommaret_convention
    tables = {}
    for dname in names:
        isys = inv.InvolutiveSystem(alg, spec.ops, inv.division_from_name(dname, conv), spec.names)
        tables[dname] = {name: [alg.dnames[i - 1] for i in mult] for name, _, mult in isys.table()}
    width = max(len(n) for n in spec.names)
    cols = {d: max([len(d)] + [len(", ".join(v) or "-") for v in t.values()]) for d, t in tables.items()}
    lines = [" " * width + " | " + " | ".join(d.ljust(cols[d]) for d in names)]
    for name in spec.names:
        cells = [(", ".join(tables[d][name]) or "-").ljust(cols[d]) for d in names]
        lines.append(name.ljust(width) + " | " + " | ".join(cells))
    return Report(cmd.verb, Verdict.HOLDS, {"tables": tables}, lines)


def _autoreduced(cmd, spec):
    isys = _isys(cmd, spec)
    res = inv.left_autoreduced(isys)
    alg = isys.alg
    if res.autoreduced:
        return Report(cmd.verb, res.verdict, {"division": isys.division.name}, ["left autoreduced"])
    payload = {
        "division": isys.division.name,
        "divisor": alg.format_monomial(res.divisor),
        "divided": alg.format_monomial(res.divided),
    }
    return Report(cmd.verb, res.verdict, payload, [f"{payload['divisor']} involutively divides {payload['divided']}"])


def _involutive(cmd, spec):
    isys = _isys(cmd, spec)
    alg = isys.alg
    if cmd.depth is not None:
        mode, depth = "bounded", cmd.depth
    else:
        mode, depth = spec.check_mode, spec.check_depth
    res = inv.check_involutive(isys, mode, depth, cmd.fuel)
    payload = {"division": isys.division.name, "mode": mode}
    if mode == "bounded":
        payload["depth"] = depth
    if res.involutive:
        return Report(cmd.verb, res.verdict, payload, ["involutive"])
    payload["witnesses"] = [
        {"operator": w.operator, "prolongation": alg.format_monomial(w.alpha), "residual": alg.format(w.residual)}
        for w in res.witnesses
    ]
    lines = ["not involutive"]
    lines.extend(
        f"  SNF({alg.format_monomial(w.alpha)} * {w.operator}) = {alg.format(w.residual)}" for w in res.witnesses
    )
    return Report(cmd.verb, res.verdict, payload, lines)


def _complete(cmd, spec):
    isys = _isys(cmd, spec)
    alg = isys.alg
    history = []
    rounds = cmd.max_rounds if cmd.max_rounds is not None else spec.max_rounds
    done = inv.complete(isys, rounds, cmd.fuel, history)
    lms = [alg.format_monomial(u) for u in done.lms]
    ops = {name: alg.format(D) for name, D in zip(done.names, done.theta)}
    payload = {
        "division": isys.division.name,
        "leading_monomials": lms,
        "operators": ops,
        "steps": [
            {"operator": s.operator, "variable": alg.dnames[s.variable - 1], "added": s.added} for s in history
        ],
    }
    lines = [f"{name} = {text}" for name, text in ops.items()]
    lines.append("leading monomials: " + ", ".join(lms))
    return Report(cmd.verb, Verdict.HOLDS, payload, lines)


def _axioms(cmd, spec):
    isys = _isys(cmd, spec)
    bound = cmd.depth if cmd.depth is not None else 6
    res = inv.check_division_axioms(isys.division, isys.U, bound)
    payload = {"division": isys.division.name, "degree_bound": bound}
    if res.passed:
        return Report(cmd.verb, res.verdict, payload, [f"axioms a)-f) hold up to degree {bound}"])
    payload["axiom"] = res.axiom
    payload["witness"] = [isys.alg.format_monomial(m) for m in res.witness if isinstance(m, tuple) and len(m) == isys.alg.n]
    return Report(cmd.verb, res.verdict, payload, [f"axiom {res.axiom}) fails: {', '.join(payload['witness'])}"])


def _local_confluence_weyl(cmd, spec):
    alg = _alg(cmd, spec)
    bound = cmd.depth if cmd.depth is not None else 4
    R = ThetaSystem(alg, spec.ops, spec.names).restrict(bound)
    rep = _local_confluence(cmd, spec, R, alg.format, alg.format_monomial)
    rep.payload["degree_bound"] = bound
    return rep


ABSTRACT_HANDLERS = {
    "check-strategy": _check_strategy,
    "snf": _snf_abstract,
    "s-confluence": _s_confluence,
    "local-confluence": _local_confluence,
    "quotient-basis": _quotient_basis,
    "decreasing": _decreasing,
    "serialize": _serialize,
}

WEYL_HANDLERS = {
    "snf": _snf_weyl,
    "local-confluence": _local_confluence_weyl,
    "weyl-nf": _weyl_nf,
    "weyl-mul": _weyl_mul,
    "divisions": _divisions,
    "autoreduced": _autoreduced,
    "involutive": _involutive,
    "complete": _complete,
    "axioms": _axioms,
}


def run(cmd, spec=None):
    """Execute a command and return its Report; fuel and budget exhaustion become ``unknown``."""
    spec = spec if spec is not None else parse_system(cmd.path)
    handlers = ABSTRACT_HANDLERS if isinstance(spec, AbstractSpec) else WEYL_HANDLERS
    if cmd.verb not in handlers:
        kind = "abstract" if isinstance(spec, AbstractSpec) else "Weyl"
        raise IncompatibleVerb(f"verb {cmd.verb!r} does not apply to a {kind} system")
    try:
        return handlers[cmd.verb](cmd, spec)
    except (FuelExhausted, NonTerminatingClosure) as exc:
        return Report(cmd.verb, Verdict.UNKNOWN, {"reason": str(exc)}, [f"unknown: {exc}"])


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; 2 means ``unknown`` here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(
        prog="linrew",
        description="Linear rewriting with strategies, over abstract vector spaces and rational Weyl algebras.",
        epilog="Exit codes: 0 property holds, 1 witness found, 2 unknown (fuel/budget), 3 error. "
        "The environment variable LINREW_NODE_BUDGET bounds reachable-set enumerations.",
    )
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB", parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("path", help="system file")
    common.add_argument("exprs", nargs="*", help="vectors or operators to process")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--fuel", type=int, default=rw.DEFAULT_FUEL, help="iteration / search budget")
    common.add_argument("--depth", type=int, help="bounded involutivity depth, degree window or axiom bound")
    common.add_argument("--max-rounds", type=int, help="completion round budget")
    common.add_argument("--trace", action="store_true", help="print reduction traces")
    common.add_argument("--division", choices=["janet", "thomas", "pommaret"])
    common.add_argument("--pommaret-convention", choices=["paper", "classical"])
    common.add_argument("--order", help="monomial order override, e.g. 'deglex d1 < d2 < d3'")
    common.add_argument("--all", dest="all_paths", action="store_true", help="weyl-nf: explore every reduction path")
    common.add_argument("--dot", action="store_true", help="check-strategy: emit the support graph in DOT")
    verbs = {}
    for verb, text in VERBS.items():
        verbs[verb] = sub.add_parser(verb, parents=[common], help=text, description=text)
    parser.verb_parsers = verbs
    return parser


def main(argv=None):
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] in parser.verb_parsers:
        # expressions and flags may be interleaved, so each verb parses on its own
        ns = parser.verb_parsers[argv[0]].parse_intermixed_args(argv[1:])
        ns.verb = argv[0]
    else:
        ns = parser.parse_args(argv)
    cmd = Command(
        verb=ns.verb,
        path=ns.path,
        args=ns.exprs,
        fuel=ns.fuel,
        depth=ns.depth,
        max_rounds=ns.max_rounds,
        trace=ns.trace,
        division=ns.division,
        pommaret_convention=ns.pommaret_convention,
        order=ns.order,
        all_paths=ns.all_paths,
        dot=ns.dot,
    )
    try:
        report = run(cmd)
    except (LinrewError, OSError) as exc:
        if ns.json:
            print(json.dumps({"schema": SCHEMA, "verb": ns.verb, "error": type(exc).__name__, "message": str(exc)}))
        else:
            print(f"linrew: error: {exc}", file=sys.stderr)
        return 3
    if ns.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        lines = report.lines
        if not cmd.trace and report.trace is not None and cmd.verb == "serialize":
            lines = [lines[0], lines[-1]] if len(lines) > 1 else lines
        for line in lines:
            print(line)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
