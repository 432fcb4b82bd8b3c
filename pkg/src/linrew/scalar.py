"""Exact scalars: the rationals Q and the rational-function field Q(x1..xn).

Rationals are plain :class:`fractions.Fraction` values. Rational functions are
elements of a sympy sparse fraction field; sympy keeps them in a canonical
form (coprime integer numerator and denominator, denominator with positive
leading coefficient in lex order), so equal functions compare and hash equal.
"""

from fractions import Fraction
from functools import lru_cache

from sympy import QQ
from sympy.polys.fields import FracElement, FracField
from sympy.polys.orderings import lex

from . import _parsing
from .errors import DivisionByZero, IndexOutOfRange, ParseError

Rational = Fraction

MAX_VARIABLES = 8


def parse_rational(text):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}: {exc}") from None


def format_rational(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class RationalField:
    """The field Q, presented with the same small interface as Q(X)."""

    n = 0
    names = ()

    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, value):
        return Fraction(value)

    def parse(self, text):
        return _parsing.evaluate(text, _RationalAlgebra())

    def format(self, q):
        return format_rational(q)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash(RationalField)

    def __repr__(self):
        return "QQ"


QQ_FIELD = RationalField()


class _RationalAlgebra:
    def integer(self, k):
        return Fraction(k)

    def symbol(self, name):
        raise KeyError(name)

    add = staticmethod(lambda a, b: a + b)
    sub = staticmethod(lambda a, b: a - b)
    neg = staticmethod(lambda a: -a)
    mul = staticmethod(lambda a, b: a * b)

    @staticmethod
    def div(a, b):
        if b == 0:
            raise DivisionByZero("division by zero")
        return a / b

    power = staticmethod(lambda a, k: a**k)


@lru_cache(maxsize=None)
def _frac_field(names):
    return FracField(names, QQ, lex)


class RationalFunctionField:
    """Q(x1, ..., xn) with named indeterminates.

    Elements are sympy ``FracElement`` objects; the field object adds
    parsing, printing and conversions in the project's infix syntax.
    """

    def __init__(self, names):
        names = tuple(names)
        if not names:
            raise ValueError("at least one indeterminate is required")
        if len(names) > MAX_VARIABLES:
            raise ValueError(f"at most {MAX_VARIABLES} indeterminates are supported")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate indeterminate names in {names}")
        self.names = names
        self.n = len(names)
        self.field = _frac_field(names)
        self.ring = self.field.ring
        self.gens = self.field.gens
        self.zero = self.field.zero
        self.one = self.field.one
        self._index = {name: i for i, name in enumerate(names)}

    @classmethod
    def standard(cls, n):
        return cls([f"x{i}" for i in range(1, n + 1)])

    def __eq__(self, other):
        return isinstance(other, RationalFunctionField) and other.names == self.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"QQ({', '.join(self.names)})"

    def __call__(self, value):
        """Coerce an int, Fraction, polynomial or rational function into the field."""
        if isinstance(value, FracElement) and value.field == self.field:
            return value
        if isinstance(value, Fraction):
            return self.field.ground_new(QQ(value.numerator, value.denominator))
        return self.field(value)

    def var(self, i):
        """The indeterminate x_i, 1-based."""
        if not 1 <= i <= self.n:
            raise IndexOutOfRange(f"variable index {i} outside 1..{self.n}")
        return self.gens[i - 1]

    def index(self, name):
        return self._index[name] + 1

    def from_terms(self, terms, den_terms=None):
        """Build num/den from {exponent tuple: rational} maps."""
        num = self.ring.from_dict({k: QQ(Fraction(v).numerator, Fraction(v).denominator) for k, v in terms.items()})
        if den_terms is None:
            return self.field.new(num)
        den = self.ring.from_dict(
            {k: QQ(Fraction(v).numerator, Fraction(v).denominator) for k, v in den_terms.items()}
        )
        if not den:
            raise DivisionByZero("zero denominator")
        return self.field.new(num, den)

    def parse(self, text):
        try:
            return _parsing.evaluate(text, _FieldAlgebra(self))
        except ParseError:
            raise
        except ZeroDivisionError:
            raise DivisionByZero(f"division by zero in {text!r}") from None

    def format(self, f):
        return format_ratfunc(f, self.names)

    def is_polynomial(self, f):
        return f.denom.is_ground

    def is_constant(self, f):
        return f.numer.is_ground and f.denom.is_ground

    def to_fraction(self, f):
        if not self.is_constant(f):
            raise ValueError(f"{self.format(f)} is not a constant")
        return _qq_fraction(f.numer.LC / f.denom.LC)

    def evaluate(self, f, point):
        """Evaluate at a point of Fractions; raises DivisionByZero on a pole."""
        num = _eval_poly(f.numer, point)
        den = _eval_poly(f.denom, point)
        if den == 0:
            raise DivisionByZero("pole at evaluation point")
        return num / den


class _FieldAlgebra:
    def __init__(self, K):
        self.K = K

    def integer(self, k):
        return self.K.field(k)

    def symbol(self, name):
        return self.K.gens[self.K._index[name]]

    add = staticmethod(lambda a, b: a + b)
    sub = staticmethod(lambda a, b: a - b)
    neg = staticmethod(lambda a: -a)
    mul = staticmethod(lambda a, b: a * b)

    @staticmethod
    def div(a, b):
        if not b:
            raise DivisionByZero("division by zero")
        return a / b

    power = staticmethod(lambda a, k: a**k)


def _eval_poly(p, point):
    total = Fraction(0)
    for exps, c in p.terms():
        term = Fraction(int(c.numerator), int(c.denominator))
        for x, e in zip(point, exps):
            if e:
                term *= x**e
        total += term
    return total


def _qq_fraction(c):
    return Fraction(int(c.numerator), int(c.denominator))


def format_poly(p, names):
    """Print a polynomial as ``x1^2*x2 - 3/2``; terms in descending graded-lex order."""
    if not p:
        return "0"
    terms = sorted(p.terms(), key=lambda t: (sum(t[0]), t[0]), reverse=True)
    out = []
    for exps, c in terms:
        c = _qq_fraction(c)
        factors = []
        for name, e in zip(names, exps):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append(f"{name}^{e}")
        mono = "*".join(factors)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if not mono:
            body = format_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_rational(mag)}*{mono}"
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


def format_ratfunc(f, names):
    if f.denom.is_ground:
        return format_poly(f.numer.quo_ground(f.denom.LC), names)
    num = format_poly(f.numer, names)
    return f"({num})/({format_poly(f.denom, names)})"


def is_canonical(f):
    """Check the canonical-form invariants: den != 0, coprime, sign-normalized."""
    num, den = f.numer, f.denom
    if not den:
        return False
    if den.LC < 0:
        return False
    g = num.gcd(den)
    return g.is_ground


def canonicalize(f):
    """Re-normalize ``f`` from its raw numerator and denominator."""
    return f.field.new(f.numer, f.denom)


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
}


def field_ops(a, b, op):
    """Apply a field operation; ``b`` is ignored for the unary ``neg``/``inv``."""
    if op in _OPS:
        return _OPS[op](a, b)
    if op == "neg":
        return -a
    if op == "div":
        if not b:
            raise DivisionByZero("division by the zero function")
        return a / b
    if op == "inv":
        if not a:
            raise DivisionByZero("inverse of the zero function")
        return a.field.one / a
    raise ValueError(f"unknown field operation {op!r}")


def partial_derivative(f, i):
    """d/dx_i of a rational function (1-based ``i``) by the quotient rule."""
    field = f.field
    n = len(field.gens)
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"variable index {i} outside 1..{n}")
    x = field.ring.gens[i - 1]
    num, den = f.numer, f.denom
    dnum = num.diff(x)
    if den.is_ground:
        return field.new(dnum, den)
    dden = den.diff(x)
    return field.new(dnum * den - num * dden, den * den)


def derivative(f, alpha):
    """Apply d^alpha = prod_i (d/dx_i)^alpha_i."""
    for i, k in enumerate(alpha, start=1):
        for _ in range(k):
            if not f:
                return f
            f = partial_derivative(f, i)
    return f
