"""Sparse finite linear combinations over an abstract basis.

A :class:`LinComb` maps basis identifiers to nonzero field elements. Any
coefficient type with Python's arithmetic operators and truthiness-as-nonzero
works (``Fraction``, sympy field elements). Basis identifiers are strings for
abstract systems and exponent tuples for Weyl monomials.
"""

import json
import re
from fractions import Fraction

from .errors import ParseError
from .scalar import format_rational

_NATURAL = re.compile(r"(\d+)")


def basis_key(e):
    """Total, session-stable sort key for basis identifiers (natural order on strings)."""
    if isinstance(e, str):
        return (0, tuple(int(p) if p.isdigit() else p for p in _NATURAL.split(e)))
    return (1, e)


class LinComb:
    """An immutable vector ``sum(c_e * e)`` with no zero coefficients stored."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for e, c in dict(terms).items():
                if c:
                    clean[e] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def basis(cls, e, coefficient=Fraction(1)):
        return cls({e: coefficient})

    @classmethod
    def zero(cls):
        return cls._raw({})

    def support(self):
        return frozenset(self._terms)

    def coeff(self, e, default=0):
        return self._terms.get(e, default)

    def items(self):
        """Terms sorted by basis identifier."""
        return sorted(self._terms.items(), key=lambda t: basis_key(t[0]))

    def keys(self):
        return [e for e, _ in self.items()]

    def as_dict(self):
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __contains__(self, e):
        return e in self._terms

    def __iter__(self):
        return iter(self.keys())

    def __eq__(self, other):
        if isinstance(other, LinComb):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def add_scaled(self, scale, other):
        """Return ``self + scale * other``."""
        terms = dict(self._terms)
        if not scale:
            return self
        for e, c in other._terms.items():
            new = terms.get(e, 0) + scale * c
            if new:
                terms[e] = new
            else:
                terms.pop(e, None)
        return LinComb._raw(terms)

    def add_term(self, e, c):
        """Return ``self + c * e``."""
        if not c:
            return self
        terms = dict(self._terms)
        new = terms.get(e, 0) + c
        if new:
            terms[e] = new
        else:
            terms.pop(e, None)
        return LinComb._raw(terms)

    def __add__(self, other):
        return self.add_scaled(1, other)

    def __sub__(self, other):
        return self.add_scaled(-1, other)

    def __neg__(self):
        return LinComb._raw({e: -c for e, c in self._terms.items()})

    def scale(self, c):
        """Left scalar multiplication ``c * self``."""
        if not c:
            return LinComb._raw({})
        return LinComb({e: c * v for e, v in self._terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def map_basis(self, fn):
        """Linear extension of ``e -> fn(e)`` where ``fn`` returns a LinComb."""
        acc = {}
        for e, c in self._terms.items():
            for e2, c2 in fn(e)._terms.items():
                new = acc.get(e2, 0) + c * c2
                if new:
                    acc[e2] = new
                else:
                    acc.pop(e2, None)
        return LinComb._raw(acc)

    def __repr__(self):
        return f"LinComb({format_lincomb(self)})"

    def __str__(self):
        return format_lincomb(self)


def support(v):
    return v.support()


def add_scaled(u, scale, v):
    return u.add_scaled(scale, v)


def coeff(v, e):
    return v.coeff(e)


def _format_coeff(c):
    if isinstance(c, Fraction) or isinstance(c, int):
        c = Fraction(c)
        if c.denominator == 1:
            return str(abs(c.numerator)), c < 0
        return f"({format_rational(abs(c))})", c < 0
    text = str(c)
    if text.startswith("-") and "+" not in text[1:] and " - " not in text[1:]:
        return text[1:], True
    return f"({text})", False


def format_lincomb(v, coeff_format=None, basis_format=str):
    """Print as ``2 e1 + (1/3) e2 - e4``; coefficient 1 is omitted."""
    if not v:
        return "0"
    parts = []
    for e, c in v.items():
        if coeff_format is None:
            mag, neg = _format_coeff(c)
        else:
            mag, neg = coeff_format(c)
        name = basis_format(e)
        body = name if mag == "1" else f"{mag} {name}"
        parts.append(("-" if neg else "+", body))
    sign, body = parts[0]
    text = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


_LC_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|([-+*()/]))")


def parse_lincomb(text, coerce=Fraction):
    """Parse ``2 e1 + (1/3) e2 - e4`` (an optional ``*`` between coefficient and id)."""
    tokens = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _LC_TOKEN.match(stripped, pos)
        if m is None:
            raise ParseError(f"unexpected character {stripped[pos]!r}", column=pos + 1)
        tokens.append((m.lastindex, m.group(m.lastindex), m.start(m.lastindex) + 1))
        pos = m.end()
    if not tokens:
        raise ParseError("empty vector expression")
    terms = {}
    i = 0

    def fail(msg):
        col = tokens[i][2] if i < len(tokens) else None
        raise ParseError(msg, column=col)

    first = True
    while i < len(tokens):
        sign = 1
        if tokens[i][0] == 3 and tokens[i][1] in "+-":
            sign = -1 if tokens[i][1] == "-" else 1
            i += 1
        elif not first:
            fail("expected '+' or '-'")
        first = False
        c = None
        if i < len(tokens) and tokens[i][0] == 1:
            c = Fraction(tokens[i][1])
            i += 1
        elif i < len(tokens) and tokens[i][1] == "(":
            depth, j = 0, i
            while j < len(tokens):
                if tokens[j][1] == "(":
                    depth += 1
                elif tokens[j][1] == ")":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            if j == len(tokens):
                fail("unbalanced parenthesis")
            inner = "".join(t[1] for t in tokens[i + 1 : j])
            try:
                c = Fraction(inner.replace(" ", ""))
            except (ValueError, ZeroDivisionError):
                fail(f"bad coefficient {inner!r}")
            i = j + 1
        if i < len(tokens) and tokens[i][1] == "*":
            i += 1
        if i < len(tokens) and tokens[i][0] == 2:
            e = tokens[i][1]
            i += 1
        elif c is not None:
            if c != 0:
                fail("a nonzero scalar term needs a basis element")
            continue
        else:
            fail("expected a coefficient or a basis element")
        c = Fraction(1) if c is None else c
        value = coerce(sign * c)
        terms[e] = terms.get(e, 0) + value
    return LinComb(terms)


def lincomb_to_json(v, coeff_format=None, basis_format=str):
    """JSON-ready dict ``{"e1": "2", "e2": "1/3"}`` in basis order."""
    fmt = coeff_format or (lambda c: format_rational(c))
    return {basis_format(e): fmt(c) for e, c in v.items()}


def lincomb_from_json(data, coerce=Fraction):
    if isinstance(data, str):
        data = json.loads(data)
    return LinComb({e: coerce(Fraction(c)) for e, c in data.items()})
