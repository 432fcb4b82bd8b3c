"""Line-oriented system files.

Abstract systems::

    basis e1 e2 e3 e4
    rule r1: e1 -> e2
    rule r2: e2 -> e3 + e4
    strategy r1 r2
    order r3 < r1
    roots e1 e2
    strict off

Weyl systems::

    weyl vars x1 x2 x3
    order deglex d1 < d2 < d3
    op D1 = d3^2 - x2*d1^2
    op D2 = d2^2
    division janet
    pommaret-convention paper
    involutive-check bounded 2
    complete max-rounds 64

``#`` starts a comment. A file containing a ``weyl`` line is a Weyl system.
"""

import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, ValidationError
from .involutive import DEFAULT_MAX_ROUNDS, InvolutiveSystem, division_from_name
from .linspace import format_lincomb, parse_lincomb
from .rewrite import Prestrategy, RewritingSystem, Rule
from .weyl import ORDER_KINDS, MonomialOrder, ThetaSystem, WeylAlgebra

_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*$")


@dataclass
class AbstractSpec:
    system: RewritingSystem
    strategy: Optional[Prestrategy] = None
    order: list = field(default_factory=list)
    roots: tuple = ()

    kind = "abstract"

    def __eq__(self, other):
        return (
            isinstance(other, AbstractSpec)
            and self.system == other.system
            and (self.strategy.selected if self.strategy else None)
            == (other.strategy.selected if other.strategy else None)
            and self.order == other.order
            and tuple(self.roots) == tuple(other.roots)
        )


@dataclass
class WeylSpec:
    alg: WeylAlgebra
    names: list
    ops: list
    division: str = "janet"
    pommaret_convention: str = "paper"
    check_mode: str = "prolongations"
    check_depth: int = 1
    max_rounds: int = DEFAULT_MAX_ROUNDS
    declared: set = field(default_factory=set)

    kind = "weyl"

    def theta_system(self):
        return ThetaSystem(self.alg, self.ops, self.names)

    def involutive_system(self, division=None, pommaret_convention=None):
        L = division_from_name(division or self.division, pommaret_convention or self.pommaret_convention)
        return InvolutiveSystem(self.alg, self.ops, L, self.names)

    def __eq__(self, other):
        return isinstance(other, WeylSpec) and (
            self.alg,
            self.names,
            self.ops,
            self.division,
            self.pommaret_convention,
            self.check_mode,
            self.check_depth,
            self.max_rounds,
        ) == (
            other.alg,
            other.names,
            other.ops,
            other.division,
            other.pommaret_convention,
            other.check_mode,
            other.check_depth,
            other.max_rounds,
        )


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, raw, line


def _col(raw, fragment):
    i = raw.find(fragment)
    return i + 1 if i >= 0 else None


def parse_system_text(text):
    lines = list(_lines(text))
    if not lines:
        raise ValidationError("empty system file")
    if any(line.split()[0] == "weyl" for _, _, line in lines):
        return _parse_weyl(lines)
    return _parse_abstract(lines)


def parse_system(path):
    with open(path, encoding="utf-8") as fh:
        return parse_system_text(fh.read())


def _parse_abstract(lines):
    basis, rules, strategy, order, roots = [], [], None, [], []
    strict = True
    for lineno, raw, line in lines:
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "basis":
                basis.extend(rest.split())
            elif head == "rule":
                m = re.match(r"([A-Za-z_0-9]+)\s*:\s*(.+?)\s*->\s*(.+)$", rest)
                if not m:
                    raise ParseError("expected 'rule <id>: <basis> -> <vector>'", lineno, _col(raw, rest))
                lhs = m.group(2)
                if not _IDENT.match(lhs):
                    raise ParseError(f"left-hand side {lhs!r} must be a basis identifier", lineno, _col(raw, lhs))
                rules.append(Rule(m.group(1), lhs, parse_lincomb(m.group(3))))
            elif head == "strategy":
                strategy = rest.split()
            elif head == "order":
                chain = [p.strip() for p in rest.split("<")]
                if len(chain) < 2 or not all(chain):
                    raise ParseError("expected 'order <rule> < <rule> ...'", lineno, _col(raw, rest))
                order.extend(zip(chain, chain[1:]))
            elif head == "roots":
                roots.extend(rest.split())
            elif head == "strict":
                if rest not in ("on", "off"):
                    raise ParseError("expected 'strict on' or 'strict off'", lineno, _col(raw, rest))
                strict = rest == "on"
            else:
                raise ParseError(f"unknown keyword {head!r}", lineno, _col(raw, head))
        except ParseError as exc:
            if exc.line is None:
                raise ParseError(str(exc), lineno, exc.column) from None
            raise
    if not rules and not basis:
        raise ValidationError("system declares no rules")
    system = RewritingSystem(rules, strict=strict, basis=basis)
    S = Prestrategy(system, strategy) if strategy is not None else None
    ids = {r.id for r in rules}
    for a, b in order:
        for rid in (a, b):
            if rid not in ids:
                raise ValidationError(f"order mentions unknown rule {rid!r}")
    return AbstractSpec(system, S, order, tuple(roots))


def _parse_weyl(lines):
    names = None
    order_line = None
    ops = []
    settings = {}
    for lineno, raw, line in lines:
        words = line.split()
        head = words[0]
        try:
            if head == "weyl":
                if len(words) < 3 or words[1] != "vars":
                    raise ParseError("expected 'weyl vars <x1> <x2> ...'", lineno)
                names = words[2:]
            elif head == "order":
                order_line = (lineno, raw, words[1:])
            elif head == "op":
                m = re.match(r"op\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.+)$", line)
                if not m:
                    raise ParseError("expected 'op <name> = <operator>'", lineno)
                ops.append((lineno, raw, m.group(1), m.group(2)))
            elif head == "division":
                settings["division"] = words[1].lower() if len(words) == 2 else None
                if settings["division"] not in ("janet", "thomas", "pommaret"):
                    raise ParseError("expected 'division janet|thomas|pommaret'", lineno)
            elif head == "pommaret-convention":
                if len(words) != 2 or words[1] not in ("paper", "classical"):
                    raise ParseError("expected 'pommaret-convention paper|classical'", lineno)
                settings["pommaret_convention"] = words[1]
            elif head == "involutive-check":
                if words[1:] == ["prolongations"]:
                    settings["check_mode"], settings["check_depth"] = "prolongations", 1
                elif len(words) == 3 and words[1] == "bounded" and words[2].isdigit():
                    settings["check_mode"], settings["check_depth"] = "bounded", int(words[2])
                else:
                    raise ParseError("expected 'involutive-check prolongations|bounded <d>'", lineno)
            elif head == "complete":
                if len(words) != 3 or words[1] != "max-rounds" or not words[2].isdigit():
                    raise ParseError("expected 'complete max-rounds <k>'", lineno)
                settings["max_rounds"] = int(words[2])
            else:
                raise ParseError(f"unknown keyword {head!r}", lineno, _col(raw, head))
        except ParseError as exc:
            if exc.line is None:
                raise ParseError(str(exc), lineno, exc.column) from None
            raise
    if names is None:
        raise ValidationError("missing 'weyl vars' line")
    try:
        alg = WeylAlgebra(names)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    if order_line is not None:
        lineno, raw, words = order_line
        alg = alg.with_order(_parse_order(words, alg, lineno))
    if not ops:
        raise ValidationError("system declares no operators")
    op_names, op_values = [], []
    for lineno, raw, name, text in ops:
        if name in op_names:
            raise ValidationError(f"line {lineno}: duplicate operator name {name!r}")
        try:
            D = alg.parse(text)
        except ParseError as exc:
            col = _col(raw, text)
            raise ParseError(str(exc), lineno, (col + exc.column - 1) if col and exc.column else col) from None
        if not D:
            raise ValidationError(f"line {lineno}: operator {name} is zero")
        if not alg.is_monic(D):
            raise ValidationError(f"line {lineno}: operator {name} = {alg.format(D)} is not monic")
        op_names.append(name)
        op_values.append(D)
    if len({alg.lm(D) for D in op_values}) != len(op_values):
        raise ValidationError("two operators share a leading monomial")
    return WeylSpec(alg, op_names, op_values, declared=set(settings), **settings)


def _parse_order(words, alg, lineno):
    if not words or words[0] not in ORDER_KINDS:
        raise ParseError(f"expected 'order {'|'.join(ORDER_KINDS)} d1 < d2 < ...'", lineno)
    kind = words[0]
    chain = [w for w in " ".join(words[1:]).replace("<", " < ").split() if w != "<"]
    if not chain:
        return MonomialOrder.default(alg.n, kind)
    try:
        precedence = tuple(alg.dnames.index(w) for w in chain)
    except ValueError:
        raise ParseError(f"order must list the derivatives {', '.join(alg.dnames)}", lineno) from None
    if sorted(precedence) != list(range(alg.n)):
        raise ParseError("order must mention every derivative exactly once", lineno)
    return MonomialOrder(kind, precedence)


def parse_order_override(text, alg):
    return _parse_order(text.split(), alg, None)


def format_system(spec):
    """Print a parsed system back to its file syntax."""
    if isinstance(spec, AbstractSpec):
        out = []
        sysm = spec.system
        if sysm.declared_basis:
            out.append("basis " + " ".join(sysm.declared_basis))
        if not sysm.strict:
            out.append("strict off")
        for rule in sysm.rules:
            out.append(f"rule {rule.id}: {rule.lhs} -> {format_lincomb(rule.rhs)}")
        if spec.strategy is not None:
            out.append("strategy " + " ".join(spec.strategy.selected))
        for a, b in spec.order:
            out.append(f"order {a} < {b}")
        if spec.roots:
            out.append("roots " + " ".join(spec.roots))
        return "\n".join(out) + "\n"
    alg = spec.alg
    out = [f"weyl vars {' '.join(alg.names)}", f"order {alg.order.describe(alg.dnames)}"]
    for name, D in zip(spec.names, spec.ops):
        out.append(f"op {name} = {alg.format(D)}")
    out.append(f"division {spec.division}")
    if spec.pommaret_convention != "paper":
        out.append(f"pommaret-convention {spec.pommaret_convention}")
    if spec.check_mode == "bounded":
        out.append(f"involutive-check bounded {spec.check_depth}")
    else:
        out.append("involutive-check prolongations")
    out.append(f"complete max-rounds {spec.max_rounds}")
    return "\n".join(out) + "\n"
