"""Tokenizer and recursive-descent evaluator for infix algebra expressions.

The grammar is shared by rational functions and Weyl operators::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom (('^'|'**') INT)?
    atom   := INT | IDENT | '(' expr ')'

Evaluation is delegated to an ``algebra`` object providing ``integer``,
``symbol``, ``add``, ``sub``, ``neg``, ``mul``, ``div`` and ``power``.
"""

import re

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", column=pos + 1)
        col = m.start(m.lastindex) + 1
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), col))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), col))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, col))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text, algebra):
        self.tokens = tokenize(text)
        self.i = 0
        self.algebra = algebra

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take_op(self, *ops):
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] in ops:
            self.i += 1
            return tok[1]
        return None

    def fail(self, message):
        tok = self.peek()
        raise ParseError(message, column=tok[2] if tok else None)

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression")
        value = self.expr()
        if self.peek() is not None:
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return value

    def expr(self):
        alg = self.algebra
        sign = self.take_op("+", "-")
        value = self.term()
        if sign == "-":
            value = alg.neg(value)
        while True:
            op = self.take_op("+", "-")
            if op is None:
                return value
            rhs = self.term()
            value = alg.add(value, rhs) if op == "+" else alg.sub(value, rhs)

    def term(self):
        alg = self.algebra
        value = self.factor()
        while True:
            op = self.take_op("*", "/")
            if op is None:
                return value
            # a leading sign is allowed after '*' or '/', as in "x*-2"
            neg = self.take_op("-") is not None
            rhs = self.factor()
            if neg:
                rhs = alg.neg(rhs)
            value = alg.mul(value, rhs) if op == "*" else alg.div(value, rhs)

    def factor(self):
        base = self.atom()
        if self.take_op("^"):
            tok = self.peek()
            if tok is None or tok[0] != "int":
                self.fail("exponent must be a non-negative integer")
            self.i += 1
            return self.algebra.power(base, tok[1])
        return base

    def atom(self):
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of expression")
        kind, value, col = tok
        if kind == "int":
            self.i += 1
            return self.algebra.integer(value)
        if kind == "ident":
            self.i += 1
            try:
                return self.algebra.symbol(value)
            except KeyError:
                raise ParseError(f"unknown symbol {value!r}", column=col) from None
        if value == "(":
            self.i += 1
            inner = self.expr()
            if not self.take_op(")"):
                self.fail("expected ')'")
            return inner
        self.fail(f"unexpected token {value!r}")


def evaluate(text, algebra):
    """Parse ``text`` and evaluate it in ``algebra``."""
    return _Parser(text, algebra).parse()
