"""Random generators and independent oracles shared by the test modules."""

import random
from fractions import Fraction

import sympy

from linrew.linspace import LinComb
from linrew.rewrite import Prestrategy, RewritingSystem, Rule, apply_r_S, snf
from linrew.weyl import WeylAlgebra

ROOT = __import__("pathlib").Path(__file__).parent
FIXTURES = ROOT / "fixtures"


def basis_names(n):
    return [f"e{i}" for i in range(1, n + 1)]


def rand_q(rng, lo=-5, hi=5, dens=(1, 2, 3)):
    return Fraction(rng.randint(lo, hi), rng.choice(dens))


def rand_nonzero_q(rng):
    while True:
        q = rand_q(rng)
        if q:
            return q


def rand_vector(rng, names, density=0.6):
    return LinComb({e: rand_q(rng) for e in names if rng.random() < density})


def _rand_tail(rng, names, i, max_terms=3):
    """A vector supported on basis elements strictly after position ``i``."""
    later = names[i + 1 :]
    if not later:
        return LinComb.zero()
    k = rng.randint(0, min(max_terms, len(later)))
    return LinComb({e: rand_nonzero_q(rng) for e in rng.sample(later, k)})


def random_acyclic_system(rng, n=None, n_rules=None):
    """Rules ``e_i -> v`` with ``supp(v)`` after ``e_i``; the support graph is acyclic.

    Returns ``(system, names)``; several rules may share a left-hand side.
    """
    n = n or rng.randint(2, 8)
    names = basis_names(n)
    n_rules = n_rules or rng.randint(1, 10)
    rules = []
    for k in range(n_rules):
        i = rng.randrange(n - 1)
        rules.append(Rule(f"r{k + 1}", names[i], _rand_tail(rng, names, i)))
    return RewritingSystem(rules, basis=names), names


def random_selection(rng, system):
    """One rule per left-hand side, chosen at random: a prestrategy."""
    chosen = {}
    for rule in system.rules:
        chosen.setdefault(rule.lhs, []).append(rule.id)
    return Prestrategy(system, [rng.choice(ids) for ids in chosen.values()])


def random_certified(rng, n=None, n_rules=None):
    system, names = random_acyclic_system(rng, n, n_rules)
    return system, random_selection(rng, system), names


def random_s_confluent(rng):
    """A system built to pass S-confluence.

    Start from a strategy ``e_i -> v_i`` and add rules ``e -> v`` whose
    difference ``e - v`` is ``e - snf(e)`` plus a combination of strategy
    rules, so that ``snf(e - v) = 0`` by linearity.
    """
    n = rng.randint(2, 8)
    names = basis_names(n)
    base = []
    for i in range(n - 1):
        if rng.random() < 0.6:
            base.append(Rule(f"s{i + 1}", names[i], _rand_tail(rng, names, i)))
    if not base:
        base.append(Rule("s1", names[0], _rand_tail(rng, names, 0)))
    system = RewritingSystem(base, basis=names)
    S = Prestrategy(system, [r.id for r in base])
    extra = []
    for k in range(rng.randint(0, 10 - len(base))):
        e = rng.choice(names[:-1])
        v = snf(LinComb.basis(e), S)
        for r in rng.sample(base, rng.randint(0, len(base))):
            v = v.add_scaled(rand_q(rng), r.vector())
        if e in v.support():
            continue
        extra.append(Rule(f"x{k + 1}", e, v))
    system = RewritingSystem(base + extra, basis=names)
    return system, Prestrategy(system, [r.id for r in base]), names


def random_locally_confluent(rng):
    """An acyclic system that is locally confluent by construction.

    A base system has one rule ``e_i -> v_i`` per chosen left-hand side. Each
    extra rule is ``e_i -> v_i + c (e_j - v_j)`` for a base rule at a later
    position ``j``, so the two reducts of ``e_i`` are joined by one step.
    """
    n = rng.randint(3, 7)
    names = basis_names(n)
    base = {}
    for i in range(n - 1):
        if rng.random() < 0.7:
            base[i] = Rule(f"b{i + 1}", names[i], _rand_tail(rng, names, i, 2))
    rules = list(base.values())
    for k in range(rng.randint(0, 4)):
        i = rng.choice(sorted(base)) if base else None
        later = [j for j in base if i is not None and j > i]
        if not later:
            continue
        j = rng.choice(later)
        c = rand_nonzero_q(rng)
        rhs = base[i].rhs.add_scaled(c, base[j].vector())
        rules.append(Rule(f"c{k + 1}", names[i], rhs))
    return RewritingSystem(rules, basis=names), names


def dense_vector(v, names):
    return [v.coeff(e) for e in names]


# ---------------------------------------------------------------------------
# Weyl oracles


def rand_poly_coeff(alg, rng, max_deg=2, rational=False):
    K = alg.K
    terms = {}
    for _ in range(rng.randint(1, 3)):
        exps = tuple(rng.randint(0, max_deg) for _ in range(alg.n))
        terms[exps] = rand_nonzero_q(rng)
    f = K.from_terms(terms)
    if rational and rng.random() < 0.3:
        i = rng.randint(1, alg.n)
        f = f / (K.var(i) + rng.randint(1, 3))
    return f if f else K.one


def rand_operator(alg, rng, max_order=2, max_deg=2, terms=3, rational=False):
    D = {}
    for _ in range(rng.randint(1, terms)):
        alpha = tuple(rng.randint(0, max_order) for _ in range(alg.n))
        D[alpha] = rand_poly_coeff(alg, rng, max_deg, rational)
    return LinComb(D)


def operator_to_sympy(alg, D, f):
    """Act with D on f using sympy's own differentiation (unsimplified).

    ``f`` may be a plain expression or a ``sympy.Poly``; the latter keeps the
    arithmetic in sympy's polynomial domain and returns a Poly.
    """
    xs = sympy.symbols(list(alg.names))
    if isinstance(f, sympy.Poly):
        # polynomial fast path: coefficients must be polynomials as well
        total = sympy.Poly(0, *xs, domain="QQ")
        for alpha, c in D.items():
            g = f
            for x, k in zip(xs, alpha):
                if k:
                    g = g.diff((x, k))
            total += sympy.Poly(ratfunc_to_sympy(alg, c), *xs, domain="QQ") * g
        return total
    total = 0
    for alpha, c in D.items():
        g = f
        for x, k in zip(xs, alpha):
            if k:
                g = sympy.diff(g, x, k)
        total += ratfunc_to_sympy(alg, c) * g
    return total


def same_function(alg, f, g, rng, points=4):
    """Exact comparison of two rational expressions at random rational points.

    A nonzero rational function of bounded degree vanishes at a few random
    points only with negligible probability; every evaluation is exact.
    """
    xs = sympy.symbols(list(alg.names))
    for _ in range(points):
        at = {x: sympy.Rational(rng.randint(-40, 40), rng.randint(1, 9)) for x in xs}
        a, b = f.subs(at), g.subs(at)
        if a.has(sympy.zoo, sympy.nan) or b.has(sympy.zoo, sympy.nan):
            continue
        if a != b:
            return False
    return True


def ratfunc_to_sympy(alg, c):
    return sympy.sympify(c.as_expr()) if hasattr(c, "as_expr") else sympy.sympify(str(c))


def commutation_mul(A, B, n):
    """Product of polynomial-coefficient operators by repeated commutation.

    Operators are dicts ``{(xexp, dexp): Fraction}``. Only the relation
    ``d_i x_i = x_i d_i + 1`` is used: one derivative at a time is pushed
    through one power of x at a time.
    """
    out = {}

    def add(key, c):
        out[key] = out.get(key, 0) + c
        if not out[key]:
            del out[key]

    def push(xa, da, xb, db, c):
        # x^xa d^da x^xb d^db  with everything normal-ordered except the middle
        i = next((k for k in range(n) if da[k] and xb[k]), None)
        if i is None:
            add((tuple(p + q for p, q in zip(xa, xb)), tuple(p + q for p, q in zip(da, db))), c)
            return
        # d_i^a x_i^b = d_i^(a-1) (x_i^b d_i + b x_i^(b-1))
        a_less = tuple(k - (j == i) for j, k in enumerate(da))
        # first term: d^(da - e_i) x^xb  d_i d^db
        db_more = tuple(k + (j == i) for j, k in enumerate(db))
        push(xa, a_less, xb, db_more, c)
        b = xb[i]
        xb_less = tuple(k - (j == i) for j, k in enumerate(xb))
        push(xa, a_less, xb_less, db, c * b)

    for (xa, da), ca in A.items():
        for (xb, db), cb in B.items():
            push(xa, da, xb, db, ca * cb)
    return out


def to_commutation_form(alg, D):
    """LinComb operator with polynomial coefficients -> commutation-oracle dict."""
    out = {}
    for alpha, c in D.items():
        assert c.denom.is_ground
        num = c.numer.quo_ground(c.denom.LC)
        for xexp, q in num.terms():
            out[(tuple(xexp), alpha)] = Fraction(int(q.numerator), int(q.denominator))
    return out


def random_weyl(rng, n=None):
    n = n or rng.randint(1, 3)
    return WeylAlgebra.standard(n)


def check_projector(u, v, S, a, b):
    """snf is idempotent and linear on the given inputs."""
    su, sv = snf(u, S), snf(v, S)
    return (
        snf(su, S) == su
        and snf(u + v, S) == su + sv
        and snf(u.scale(a), S) == su.scale(a)
        and snf(u.scale(a) + v.scale(b), S) == su.scale(a) + sv.scale(b)
    )


def parallel_endpoint(u, S):
    return apply_r_S(u, S)


def rng_for(name):
    return random.Random(f"linrew:{name}")
