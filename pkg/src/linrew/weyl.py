"""The rational Weyl algebra A_n(Q(X)) and the rewriting relation of monic operators.

An operator is a :class:`~linrew.linspace.LinComb` whose basis identifiers are
derivative multi-exponents (tuples of length n) and whose coefficients are
rational functions; coefficients sit to the left of the derivatives.
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import product
from math import comb

from . import _parsing
from .errors import DimensionMismatch, DivisionByZero, FuelExhausted, NotMonic, ParseError, ValidationError, ZeroOperator
from .linspace import LinComb
from .rewrite import DEFAULT_FUEL, Rule, RewritingSystem, all_normal_forms
from .scalar import RationalFunctionField, derivative, format_ratfunc, partial_derivative


class Ordering(Enum):
    LT = -1
    EQ = 0
    GT = 1


ORDER_KINDS = ("lex", "deglex", "degrevlex")


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order on derivative monomials.

    ``precedence`` lists 0-based variable indices from the smallest variable
    to the largest, so the default ``(0, 1, ..., n-1)`` means d1 < d2 < ... < dn.
    """

    kind: str
    precedence: tuple

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if sorted(self.precedence) != list(range(len(self.precedence))):
            raise ValueError(f"precedence {self.precedence} is not a permutation")

    @classmethod
    def default(cls, n, kind="deglex"):
        return cls(kind, tuple(range(n)))

    @property
    def n(self):
        return len(self.precedence)

    def key(self, alpha):
        """Sort key: larger key means larger monomial."""
        high_first = tuple(alpha[i] for i in reversed(self.precedence))
        if self.kind == "lex":
            return high_first
        if self.kind == "deglex":
            return (sum(alpha),) + high_first
        return (sum(alpha),) + tuple(-alpha[i] for i in self.precedence)

    def compare(self, a, b):
        ka, kb = self.key(a), self.key(b)
        if ka == kb:
            return Ordering.EQ
        return Ordering.GT if ka > kb else Ordering.LT

    def describe(self, dnames):
        return f"{self.kind} " + " < ".join(dnames[i] for i in self.precedence)


def compare(a, b, order):
    return order.compare(a, b)


def divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


def sub_exp(a, b):
    return tuple(x - y for x, y in zip(a, b))


def degree(alpha):
    return sum(alpha)


@lru_cache(maxsize=None)
def monomials_up_to(n, bound):
    """All exponent vectors of length n and total degree <= bound."""
    out = []
    for alpha in product(range(bound + 1), repeat=n):
        if sum(alpha) <= bound:
            out.append(alpha)
    out.sort(key=lambda a: (sum(a), a))
    return tuple(out)


def derivative_name(name):
    return "d" + name[1:] if name.startswith("x") and len(name) > 1 else ("d" if name == "x" else "d" + name)


class WeylAlgebra:
    """Arithmetic in A_n(Q(x1..xn)) together with a fixed monomial order."""

    def __init__(self, names, order=None, dnames=None):
        self.K = RationalFunctionField(names)
        self.n = self.K.n
        self.names = self.K.names
        self.dnames = tuple(dnames) if dnames else tuple(derivative_name(s) for s in self.names)
        if len(self.dnames) != self.n or len(set(self.dnames) | set(self.names)) != 2 * self.n:
            raise ValueError(f"bad derivative names {self.dnames}")
        self.order = order or MonomialOrder.default(self.n)
        if self.order.n != self.n:
            raise DimensionMismatch(f"order on {self.order.n} variables for an algebra in {self.n}")
        self._dindex = {name: i for i, name in enumerate(self.dnames)}
        self.unit = (0,) * self.n

    @classmethod
    def standard(cls, n, kind="deglex"):
        return cls([f"x{i}" for i in range(1, n + 1)], MonomialOrder.default(n, kind))

    def with_order(self, order):
        return WeylAlgebra(self.names, order, self.dnames)

    def __eq__(self, other):
        return (
            isinstance(other, WeylAlgebra)
            and (self.names, self.dnames, self.order) == (other.names, other.dnames, other.order)
        )

    def __hash__(self):
        return hash((self.names, self.dnames, self.order))

    # constructors ---------------------------------------------------------

    def zero(self):
        return LinComb.zero()

    def one(self):
        return LinComb({self.unit: self.K.one})

    def scalar(self, f):
        return LinComb({self.unit: self.K(f)})

    def monomial(self, alpha, coefficient=None):
        alpha = tuple(alpha)
        if len(alpha) != self.n:
            raise DimensionMismatch(f"exponent {alpha} has length {len(alpha)}, expected {self.n}")
        return LinComb({alpha: self.K.one if coefficient is None else self.K(coefficient)})

    def x(self, i):
        return self.scalar(self.K.var(i))

    def d(self, i, k=1):
        alpha = [0] * self.n
        alpha[i - 1] = k
        return self.monomial(alpha)

    def _check(self, D):
        for alpha in D.support():
            if len(alpha) != self.n:
                raise DimensionMismatch(f"operator monomial {alpha} not in {self.n} variables")

    # arithmetic -----------------------------------------------------------

    def add(self, A, B):
        return A + B

    def mul(self, A, B):
        """Product in A_n: ``d^a f = sum_g C(a, g) d^g(f) d^(a-g)`` termwise."""
        self._check(A)
        self._check(B)
        if all(c.denom.is_ground for c in (*A._terms.values(), *B._terms.values())):
            return self._mul_poly(A, B)
        acc = {}
        for beta, b in B._terms.items():
            derivs = {self.unit: b}
            for alpha, a in A._terms.items():
                for gamma in product(*(range(k + 1) for k in alpha)):
                    db = self._deriv(derivs, gamma)
                    if not db:
                        continue
                    binom = 1
                    for k, g in zip(alpha, gamma):
                        binom *= comb(k, g)
                    mono = tuple(p - g + q for p, g, q in zip(alpha, gamma, beta))
                    c = a * db if binom == 1 else a * db * binom
                    new = acc.get(mono, 0) + c
                    if new:
                        acc[mono] = new
                    else:
                        acc.pop(mono, None)
        return LinComb._raw(acc)

    def _mul_poly(self, A, B):
        # polynomial coefficients: work in the ring and skip the gcd cancels
        field = self.K.field
        gens = field.ring.gens

        def poly(c):
            return c.numer.quo_ground(c.denom.LC)

        left = {alpha: poly(a) for alpha, a in A._terms.items()}
        acc = {}
        for beta, b in B._terms.items():
            derivs = {self.unit: poly(b)}

            def deriv(gamma):
                if gamma not in derivs:
                    i = next(k for k, g in enumerate(gamma) if g)
                    base = deriv(gamma[:i] + (gamma[i] - 1,) + gamma[i + 1 :])
                    derivs[gamma] = base.diff(gens[i]) if base else base
                return derivs[gamma]

            for alpha, a in left.items():
                for gamma in product(*(range(k + 1) for k in alpha)):
                    db = deriv(gamma)
                    if not db:
                        continue
                    binom = 1
                    for k, g in zip(alpha, gamma):
                        binom *= comb(k, g)
                    mono = tuple(p - g + q for p, g, q in zip(alpha, gamma, beta))
                    acc[mono] = acc.get(mono, 0) + a * db * binom
        return LinComb._raw({m: field.new(c) for m, c in acc.items() if c})

    def _deriv(self, memo, gamma):
        if gamma in memo:
            return memo[gamma]
        i = next(k for k, g in enumerate(gamma) if g)
        prev = gamma[:i] + (gamma[i] - 1,) + gamma[i + 1 :]
        base = self._deriv(memo, prev)
        value = partial_derivative(base, i + 1) if base else base
        memo[gamma] = value
        return value

    def power(self, A, k):
        result = self.one()
        for _ in range(k):
            result = self.mul(result, A)
        return result

    def left_scale(self, f, D):
        return D.scale(self.K(f))

    def apply(self, D, f):
        """Act on a rational function: ``sum_a c_a * d^a(f)``."""
        total = self.K.zero
        f = self.K(f)
        for alpha, c in D._terms.items():
            total += c * derivative(f, alpha)
        return total

    # leading terms --------------------------------------------------------

    def lm(self, D):
        if not D:
            raise ZeroOperator("the zero operator has no leading monomial")
        return max(D.support(), key=self.order.key)

    def lc(self, D):
        return D.coeff(self.lm(D))

    def is_monic(self, D):
        return bool(D) and self.lc(D) == self.K.one

    def make_monic(self, D):
        c = self.lc(D)
        return D.scale(self.K.one / c)

    def r_op(self, D):
        """``r(D) = lm(D) - D`` for a monic operator."""
        if not self.is_monic(D):
            raise NotMonic(f"{self.format(D)} is not monic")
        return LinComb.basis(self.lm(D), self.K.one) - D

    def sorted_terms(self, D):
        return sorted(D._terms.items(), key=lambda t: self.order.key(t[0]), reverse=True)

    # text and JSON --------------------------------------------------------

    def format_monomial(self, alpha):
        parts = []
        for name, k in zip(self.dnames, alpha):
            if k == 1:
                parts.append(name)
            elif k:
                parts.append(f"{name}^{k}")
        return "*".join(parts) if parts else "1"

    def format(self, D):
        """Print as ``d3^2 - x2*d1^2``, terms in decreasing monomial order."""
        if not D:
            return "0"
        pieces = []
        for alpha, c in self.sorted_terms(D):
            ctext = format_ratfunc(c, self.names)
            if alpha == self.unit:
                pieces.append(ctext)
                continue
            mono = self.format_monomial(alpha)
            num, den = c.numer, c.denom
            single = den.is_ground and len(num.terms()) == 1
            if ctext == "1":
                pieces.append(mono)
            elif ctext == "-1":
                pieces.append("-" + mono)
            elif single:
                pieces.append(f"{ctext}*{mono}")
            elif den.is_ground:
                pieces.append(f"({ctext})*{mono}")
            else:
                pieces.append(f"{ctext}*{mono}")
        text = pieces[0]
        for p in pieces[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text

    def parse(self, text):
        try:
            return _parsing.evaluate(text, _OperatorAlgebra(self))
        except ZeroDivisionError:
            raise DivisionByZero(f"division by zero in {text!r}") from None

    def to_json(self, D):
        return {",".join(map(str, alpha)): format_ratfunc(c, self.names) for alpha, c in self.sorted_terms(D)}

    def from_json(self, data):
        terms = {}
        for key, value in data.items():
            alpha = tuple(int(k) for k in key.split(",")) if key else ()
            terms[alpha] = self.K.parse(value)
        D = LinComb(terms)
        self._check(D)
        return D


class _OperatorAlgebra:
    def __init__(self, alg):
        self.alg = alg

    def integer(self, k):
        return self.alg.scalar(k)

    def symbol(self, name):
        alg = self.alg
        if name in alg._dindex:
            return alg.d(alg._dindex[name] + 1)
        return alg.scalar(alg.K.gens[alg.K._index[name]])

    add = staticmethod(lambda a, b: a + b)
    sub = staticmethod(lambda a, b: a - b)
    neg = staticmethod(lambda a: -a)

    def mul(self, a, b):
        return self.alg.mul(a, b)

    def div(self, a, b):
        if set(b.support()) - {self.alg.unit}:
            raise ParseError("division is only defined by rational functions")
        f = b.coeff(self.alg.unit)
        if not f:
            raise DivisionByZero("division by zero")
        return self.alg.mul(a, self.alg.scalar(self.alg.K.one / f))

    def power(self, a, k):
        return self.alg.power(a, k)


def weyl_mul(A, B, alg):
    return alg.mul(A, B)


# ---------------------------------------------------------------------------
# the rule family of a set of monic operators


class ThetaSystem:
    """Rules ``d^a lm(D) -> d^a r(D)`` for every D in theta and every monomial d^a.

    The family is infinite; rules are generated on demand by ``rules_for``.
    ``restrict(bound)`` materializes the finite subsystem on monomials of
    total degree <= bound.
    """

    strict = True

    def __init__(self, alg, theta, names=None):
        self.alg = alg
        self.theta = tuple(theta)
        self.names = tuple(names) if names else tuple(f"D{k}" for k in range(1, len(self.theta) + 1))
        for name, D in zip(self.names, self.theta):
            if not alg.is_monic(D):
                raise NotMonic(f"{name} = {alg.format(D)} is not monic")
        self.lms = tuple(alg.lm(D) for D in self.theta)
        self.tails = tuple(alg.r_op(D) for D in self.theta)
        self._rhs = {}
        self._rules = {}

    def rhs(self, k, alpha):
        """``d^alpha * r(D_k)`` (0-based k), cached."""
        key = (k, alpha)
        if key not in self._rhs:
            self._rhs[key] = self.alg.mul(self.alg.monomial(alpha), self.tails[k])
        return self._rhs[key]

    def rule_id(self, k, alpha):
        return f"{self.names[k]}*{self.alg.format_monomial(alpha)}"

    def rule(self, k, alpha):
        key = (k, alpha)
        if key not in self._rules:
            lhs = add_exp(alpha, self.lms[k])
            self._rules[key] = Rule(self.rule_id(k, alpha), lhs, self.rhs(k, alpha))
        return self._rules[key]

    def rules_for(self, m):
        return tuple(self.rule(k, sub_exp(m, u)) for k, u in enumerate(self.lms) if divides(u, m))

    def restrict(self, bound):
        rules = []
        for m in monomials_up_to(self.alg.n, bound):
            rules.extend(self.rules_for(m))
        return RewritingSystem(rules, strict=True)


def theta_steps(D, theta_system):
    """Yield the successive operators of the leftmost-maximal reduction of D."""
    alg = theta_system.alg
    current = D
    yield current
    while True:
        for alpha in sorted(current.support(), key=alg.order.key, reverse=True):
            rules = theta_system.rules_for(alpha)
            if rules:
                rule = rules[0]
                lam = current.coeff(alpha)
                current = current.add_scaled(lam, rule.rhs).add_term(alpha, -lam)
                yield current
                break
        else:
            return


def theta_nf(D, theta_system, mode="leftmost", fuel=DEFAULT_FUEL):
    """Normal form(s) for the rewriting relation of a set of monic operators.

    ``mode="leftmost"`` reduces the largest reducible monomial with the first
    matching operator and returns one operator; ``mode="all"`` explores every
    reduction path (bounded by ``fuel`` explored operators) and returns the
    frozenset of normal forms reached.
    """
    if mode == "all":
        return all_normal_forms(D, theta_system, fuel)
    if mode != "leftmost":
        raise ValueError(f"unknown mode {mode!r}")
    last = D
    for i, last in enumerate(theta_steps(D, theta_system)):
        if i > fuel:
            raise FuelExhausted(f"theta reduction exceeded {fuel} steps")
    return last


def parse_theta(alg, ops, make_monic=False):
    """Build a ThetaSystem from ``[(name, text), ...]``."""
    names, theta = [], []
    for name, text in ops:
        D = alg.parse(text)
        if not D:
            raise ValidationError(f"operator {name} is zero")
        if make_monic:
            D = alg.make_monic(D)
        names.append(name)
        theta.append(D)
    return ThetaSystem(alg, theta, names)
