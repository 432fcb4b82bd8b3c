"""Involutive divisions on derivative monomials and the strategies they induce.

Monomials are exponent tuples; variable indices are 0-based internally and
1-based in everything user-facing (``multiplicative_variables`` and printed
tables), matching the names d1..dn.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional

from .errors import NotAutoreduced, NotInU, RoundBudgetExhausted, ValidationError, WindowTooSmall
from .linspace import LinComb
from .rewrite import DEFAULT_FUEL, Prestrategy, Verdict, snf
from .weyl import ThetaSystem, add_exp, divides, monomials_up_to, sub_exp

DEFAULT_MAX_ROUNDS = 64


class Division:
    """An involutive division presented by its multiplicative variables."""

    name = "division"

    def multiplicative(self, u, U):
        """0-based indices of the multiplicative variables of ``u`` w.r.t. ``U``."""
        raise NotImplementedError

    def divides(self, u, m, U):
        if not divides(u, m):
            return False
        mult = self.multiplicative(u, U)
        return all(i in mult for i, (a, b) in enumerate(zip(u, m)) if b != a)

    def __repr__(self):
        return self.name


class Janet(Division):
    name = "janet"

    def multiplicative(self, u, U):
        n = len(u)
        mult = set()
        for i in range(n):
            group = [v for v in U if v[i + 1 :] == u[i + 1 :]]
            if u[i] == max(v[i] for v in group):
                mult.add(i)
        return frozenset(mult)


class Thomas(Division):
    name = "thomas"

    def multiplicative(self, u, U):
        return frozenset(i for i in range(len(u)) if u[i] == max(v[i] for v in U))


class Pommaret(Division):
    """Pommaret division.

    ``convention="paper"``: d_i is multiplicative for u iff d_j(u) = 0 for every
    j <= i. ``convention="classical"``: d_1..d_k are multiplicative, where k is
    the smallest index with d_k(u) > 0 (all variables when u = 1).
    """

    def __init__(self, convention="paper"):
        if convention not in ("paper", "classical"):
            raise ValueError(f"unknown Pommaret convention {convention!r}")
        self.convention = convention
        self.name = "pommaret" if convention == "paper" else "pommaret-classical"

    def multiplicative(self, u, U):
        n = len(u)
        cls = next((i for i in range(n) if u[i]), None)
        if cls is None:
            return frozenset(range(n))
        limit = cls if self.convention == "paper" else cls + 1
        return frozenset(range(limit))


class Custom(Division):
    """A division given by an arbitrary function ``(u, U) -> set of 1-based indices``."""

    def __init__(self, fn: Callable, name="custom"):
        self.fn = fn
        self.name = name

    def multiplicative(self, u, U):
        return frozenset(i - 1 for i in self.fn(u, frozenset(U)))


def all_multiplicative():
    return Custom(lambda u, U: range(1, len(u) + 1), name="all-multiplicative")


DIVISIONS = {"janet": Janet, "thomas": Thomas, "pommaret": Pommaret}


def division_from_name(name, pommaret_convention="paper"):
    name = name.lower()
    if name == "pommaret":
        return Pommaret(pommaret_convention)
    if name not in DIVISIONS:
        raise ValidationError(f"unknown division {name!r}")
    return DIVISIONS[name]()


def multiplicative_variables(u, U, L):
    """1-based indices of the L-multiplicative variables of ``u`` w.r.t. ``U``."""
    U = frozenset(U)
    if u not in U:
        raise NotInU(f"{u} is not in U")
    return frozenset(i + 1 for i in L.multiplicative(u, U))


def involutive_divides(u, m, U, L):
    return L.divides(u, m, frozenset(U))


@dataclass(frozen=True)
class DivisorResult:
    kind: str  # "divisor" | "none" | "multiple"
    divisor: Optional[tuple] = None
    cofactor: Optional[tuple] = None
    candidates: tuple = ()


def involutive_divisor(m, U, L):
    U = frozenset(U)
    found = sorted(u for u in U if L.divides(u, m, U))
    if not found:
        return DivisorResult("none")
    if len(found) > 1:
        return DivisorResult("multiple", candidates=tuple(found))
    return DivisorResult("divisor", found[0], sub_exp(m, found[0]), tuple(found))


@dataclass(frozen=True)
class AutoreducedResult:
    autoreduced: bool
    divisor: Optional[tuple] = None
    divided: Optional[tuple] = None

    @property
    def verdict(self):
        return Verdict.HOLDS if self.autoreduced else Verdict.WITNESS


def check_autoreduced(U, L):
    """Autoreduced iff no element of U involutively divides another element of U."""
    U = frozenset(U)
    for u in sorted(U):
        for v in sorted(U):
            if u != v and L.divides(u, v, U):
                return AutoreducedResult(False, u, v)
    return AutoreducedResult(True)


@dataclass(frozen=True)
class AxiomResult:
    passed: bool
    axiom: Optional[str] = None
    witness: tuple = ()

    @property
    def verdict(self):
        return Verdict.HOLDS if self.passed else Verdict.WITNESS


def _check_axioms(rel, U, window, n, subset_rel=None):
    """Exhaustive check of axioms a)-f) for ``rel(u, m)`` over the monomial window."""
    in_window = set(window)
    for u in U:
        for m in window:
            if rel(u, m) and not divides(u, m):
                return AxiomResult(False, "a", (u, m))
    for u in U:
        if not rel(u, u):
            return AxiomResult(False, "b", (u,))
    for u in U:
        for m in window:
            for m2 in window:
                umm = add_exp(add_exp(u, m), m2)
                if umm not in in_window:
                    continue
                lhs = rel(u, add_exp(u, m)) and rel(u, add_exp(u, m2))
                if lhs != rel(u, umm):
                    return AxiomResult(False, "c", (u, m, m2))
    for m in window:
        divs = [u for u in U if rel(u, m)]
        for u, v in combinations(divs, 2):
            if not (rel(u, v) or rel(v, u)):
                return AxiomResult(False, "d", (u, v, m))
    for u in U:
        for v in U:
            if not rel(u, v):
                continue
            for m in window:
                if rel(v, m) and not rel(u, m):
                    return AxiomResult(False, "e", (u, v, m))
    if subset_rel is not None:
        members = sorted(U)
        for r in range(1, len(members)):
            for V in combinations(members, r):
                V = frozenset(V)
                for v in V:
                    for m in window:
                        if rel(v, m) and not subset_rel(v, m, V):
                            return AxiomResult(False, "f", (v, m, tuple(sorted(V))))
    return AxiomResult(True)


def check_division_axioms(L, U, degree_bound, max_subset_size=6):
    """Check axioms a)-f) of an involutive division on all monomials of degree <= bound.

    Axiom f) quantifies over every subset of U and is only tested when
    ``|U| <= max_subset_size``.
    """
    U = frozenset(U)
    if not U:
        return AxiomResult(True)
    n = len(next(iter(U)))
    window = monomials_up_to(n, degree_bound)
    mult = {u: L.multiplicative(u, U) for u in U}

    def rel(u, m):
        return divides(u, m) and all(i in mult[u] for i in range(n) if m[i] != u[i])

    subset_rel = L.divides if len(U) <= max_subset_size else None
    return _check_axioms(rel, U, window, n, subset_rel)


# ---------------------------------------------------------------------------
# involutive systems of operators


class InvolutiveSystem:
    """Monic operators, a monomial order (carried by the algebra) and a division."""

    def __init__(self, alg, theta, division, names=None):
        self.alg = alg
        self.division = division
        self.theta_system = ThetaSystem(alg, theta, names)
        self.theta = self.theta_system.theta
        self.names = self.theta_system.names
        self.lms = self.theta_system.lms
        if len(set(self.lms)) != len(self.lms):
            raise ValidationError("two operators share a leading monomial")
        if len(set(self.names)) != len(self.names):
            raise ValidationError("duplicate operator names")
        self.U = frozenset(self.lms)
        self._mult = {u: division.multiplicative(u, self.U) for u in self.U}
        self._strategy = None

    def with_division(self, division):
        return InvolutiveSystem(self.alg, self.theta, division, self.names)

    def multiplicative(self, k):
        """0-based multiplicative indices of the k-th operator's leading monomial."""
        return self._mult[self.lms[k]]

    def table(self):
        """``[(name, lm, sorted 1-based multiplicative indices)]``."""
        return [(name, u, sorted(i + 1 for i in self._mult[u])) for name, u in zip(self.names, self.lms)]

    def operator(self, name):
        return self.theta[self.names.index(name)]

    def strategy(self):
        if self._strategy is None:
            self._strategy = InvolutiveStrategy(self)
        return self._strategy

    def __eq__(self, other):
        return (
            isinstance(other, InvolutiveSystem)
            and self.alg == other.alg
            and self.theta == other.theta
            and self.names == other.names
            and self.division.name == other.division.name
        )


def left_autoreduced(sys):
    return check_autoreduced(sys.U, sys.division)


class InvolutiveStrategy:
    """The strategy selecting ``d^a lm(D) -> d^a r(D)`` when lm(D) involutively divides."""

    def __init__(self, sys):
        check = left_autoreduced(sys)
        if not check.autoreduced:
            raise NotAutoreduced(
                f"{sys.alg.format_monomial(check.divisor)} involutively divides "
                f"{sys.alg.format_monomial(check.divided)}"
            )
        self.sys = sys
        self.system = sys.theta_system
        self._cache = {}

    def divisor(self, m):
        """(k, cofactor) of the unique involutive divisor of ``m``, or None."""
        if m not in self._cache:
            hit = None
            for k, u in enumerate(self.sys.lms):
                if divides(u, m):
                    mult = self.sys._mult[u]
                    if all(i in mult for i in range(len(m)) if m[i] != u[i]):
                        hit = (k, sub_exp(m, u))
                        break
            self._cache[m] = hit
        return self._cache[m]

    def rule_for(self, m):
        hit = self.divisor(m)
        if hit is None:
            return None
        return self.system.rule(*hit)


def strategy_snf(D, sys, fuel=DEFAULT_FUEL):
    """The parallel normal form of D for the involutive strategy of ``sys``."""
    return snf(D, sys.strategy(), fuel)


@dataclass(frozen=True)
class InvolutiveWitness:
    operator: str
    alpha: tuple
    residual: LinComb


@dataclass(frozen=True)
class InvolutivityResult:
    involutive: bool
    witnesses: tuple = ()

    @property
    def witness(self):
        return self.witnesses[0] if self.witnesses else None

    @property
    def verdict(self):
        return Verdict.HOLDS if self.involutive else Verdict.WITNESS


def check_involutive(sys, mode="prolongations", depth=1, fuel=DEFAULT_FUEL, first_only=False):
    """Check ``SNF(d^a D) == 0`` over single-variable prolongations or all ``|a| <= depth``.

    Every failure found in the chosen range is reported (in operator order,
    then by increasing ``a``) unless ``first_only`` is set.
    """
    alg = sys.alg
    n = alg.n
    if mode == "prolongations":
        alphas = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    elif mode == "bounded":
        alphas = list(monomials_up_to(n, depth))
    else:
        raise ValueError(f"unknown involutivity mode {mode!r}")
    strategy = sys.strategy()
    witnesses = []
    for name, D in zip(sys.names, sys.theta):
        for alpha in alphas:
            residual = snf(alg.mul(alg.monomial(alpha), D), strategy, fuel)
            if residual:
                witnesses.append(InvolutiveWitness(name, alpha, residual))
                if first_only:
                    return InvolutivityResult(False, tuple(witnesses))
    return InvolutivityResult(not witnesses, tuple(witnesses))


@dataclass
class CompletionStep:
    operator: str
    variable: int  # 1-based
    added: str
    leading_monomial: tuple


def complete(sys, max_rounds=DEFAULT_MAX_ROUNDS, fuel=DEFAULT_FUEL, history=None):
    """Adjoin reduced nonmultiplicative prolongations until the set is involutive.

    A round scans operators in order and, for each, its nonmultiplicative
    variables in increasing index; the first nonzero normal form is made monic
    and appended, and the next round starts from the updated set.
    """
    alg = sys.alg
    theta = list(sys.theta)
    names = list(sys.names)
    current = sys
    counter = len(names)
    for _ in range(max_rounds):
        strategy = current.strategy()
        new = None
        for k, (name, D) in enumerate(zip(current.names, current.theta)):
            mult = current.multiplicative(k)
            for i in range(alg.n):
                if i in mult:
                    continue
                h = snf(alg.mul(alg.d(i + 1), D), strategy, fuel)
                if h:
                    new = (name, i + 1, alg.make_monic(h))
                    break
            if new:
                break
        if new is None:
            return current
        counter += 1
        label = f"D{counter}"
        while label in names:
            counter += 1
            label = f"D{counter}"
        theta.append(new[2])
        names.append(label)
        if history is not None:
            history.append(CompletionStep(new[0], new[1], label, alg.lm(new[2])))
        current = InvolutiveSystem(alg, theta, sys.division, names)
        check = left_autoreduced(current)
        if not check.autoreduced:
            raise NotAutoreduced(
                f"adjoining {alg.format(new[2])} broke autoreduction: "
                f"{alg.format_monomial(check.divisor)} divides {alg.format_monomial(check.divided)}"
            )
    # the budget may run out exactly when the set became involutive
    if check_involutive(current, "prolongations", first_only=True, fuel=fuel).involutive:
        return current
    raise RoundBudgetExhausted(f"not involutive after {max_rounds} rounds")


# ---------------------------------------------------------------------------
# strategies over a finite monomial window


@dataclass
class ThetaWindow:
    """The finite restriction of the rule family to monomials of degree <= bound."""

    theta_system: ThetaSystem
    bound: int
    system: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.system = self.theta_system.restrict(self.bound)
        for (k, alpha), rule in self.theta_system._rules.items():
            self.meta[rule.id] = (k, alpha)

    def prestrategy(self, selection):
        """Prestrategy from ``[(k, alpha), ...]`` (0-based operator index)."""
        return Prestrategy(self.system, [self.theta_system.rule(k, alpha).id for k, alpha in selection])


def involutive_window(sys, bound):
    """The window and the restriction of the involutive strategy of ``sys`` to it."""
    window = ThetaWindow(sys.theta_system, bound)
    strategy = sys.strategy()
    selection = []
    for m in monomials_up_to(sys.alg.n, bound):
        hit = strategy.divisor(m)
        if hit is not None:
            selection.append(hit)
    return window, window.prestrategy(selection)


def _s_relation(window, S):
    chosen = set()
    for rule in S.rules():
        chosen.add(window.meta[rule.id])
    lms = window.theta_system.lms

    def rel(u, m):
        if not divides(u, m):
            return False
        return any((k, sub_exp(m, u)) in chosen for k, v in enumerate(lms) if v == u)

    return rel, chosen


def _s_multiplicative(window, chosen, k):
    n = window.theta_system.alg.n
    return {i for i in range(n) if (k, tuple(1 if j == i else 0 for j in range(n))) in chosen}


@dataclass(frozen=True)
class StrategyInvolutivityResult:
    involutive: bool
    rule: Optional[str] = None

    @property
    def verdict(self):
        return Verdict.HOLDS if self.involutive else Verdict.WITNESS


def check_involutive_strategy(window, S):
    """Every selected ``d^a lm(D)`` must have ``a`` built from S-multiplicative variables of D."""
    lms = window.theta_system.lms
    for u in lms:
        if sum(u) + 1 > window.bound:
            raise WindowTooSmall(f"window {window.bound} cannot decide the multiplicative variables of {u}")
    _, chosen = _s_relation(window, S)
    for rule in sorted(S.rules(), key=lambda r: (sum(r.lhs), r.lhs)):
        k, alpha = window.meta[rule.id]
        mult = _s_multiplicative(window, chosen, k)
        if any(a and i not in mult for i, a in enumerate(alpha)):
            return StrategyInvolutivityResult(False, rule.id)
    return StrategyInvolutivityResult(True)


def s_division_axioms(window, S):
    """Axioms a)-e) for the S-division on the window (f) does not apply to a fixed U)."""
    rel, _ = _s_relation(window, S)
    U = frozenset(window.theta_system.lms)
    n = window.theta_system.alg.n
    return _check_axioms(rel, U, monomials_up_to(n, window.bound), n)


def s_division_agrees(window, S, L):
    """Does the S-division coincide with L on lm(theta) over the window?"""
    rel, _ = _s_relation(window, S)
    U = frozenset(window.theta_system.lms)
    for u in U:
        for m in monomials_up_to(window.theta_system.alg.n, window.bound):
            if rel(u, m) != L.divides(u, m, U):
                return False
    return True
