import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import rand_operator, rng_for
from linrew.errors import NotAutoreduced, NotInU, RoundBudgetExhausted, ValidationError, WindowTooSmall
from linrew.involutive import (
    Custom,
    InvolutiveSystem,
    Janet,
    Pommaret,
    Thomas,
    all_multiplicative,
    check_autoreduced,
    check_division_axioms,
    check_involutive,
    check_involutive_strategy,
    complete,
    division_from_name,
    involutive_divides,
    involutive_divisor,
    involutive_window,
    multiplicative_variables,
    s_division_agrees,
    s_division_axioms,
    strategy_snf,
)
from linrew.weyl import ThetaSystem, WeylAlgebra, theta_nf

A1 = WeylAlgebra(["x"])
A3 = WeylAlgebra.standard(3)
D1 = A3.parse("d3^2 - x2*d1^2")
D2 = A3.parse("d2^2")
U = {(0, 0, 2), (0, 2, 0)}

COMPLETED = ["d3^2", "d2^2", "d2^2*d3", "d1^2*d2", "d1^2*d2*d3", "d1^4", "d1^4*d3"]


def janet_system(division=None):
    return InvolutiveSystem(A3, [D1, D2], division or Janet(), ["D1", "D2"])


# ---------------------------------------------------------------------------
# multiplicative variables


def test_janet_table():
    assert multiplicative_variables((0, 0, 2), U, Janet()) == {1, 2, 3}
    assert multiplicative_variables((0, 2, 0), U, Janet()) == {1, 2}


def test_thomas_table():
    assert multiplicative_variables((0, 0, 2), U, Thomas()) == {1, 3}
    # d2 is multiplicative for d2^2: its d2-degree is the maximum over U
    assert multiplicative_variables((0, 2, 0), U, Thomas()) == {1, 2}


def test_pommaret_conventions():
    paper = Pommaret("paper")
    assert multiplicative_variables((0, 2, 0), U, paper) == {1}
    # d3^2 has no d1 or d2, so d1 and d2 are multiplicative
    assert multiplicative_variables((0, 0, 2), U, paper) == {1, 2}
    classical = Pommaret("classical")
    assert multiplicative_variables((0, 2, 0), U, classical) == {1, 2}
    assert multiplicative_variables((0, 0, 2), U, classical) == {1, 2, 3}
    assert multiplicative_variables((0, 0, 0), {(0, 0, 0)}, paper) == {1, 2, 3}


def test_not_in_u():
    with pytest.raises(NotInU):
        multiplicative_variables((1, 0, 0), U, Janet())


def test_division_names():
    assert division_from_name("Janet").name == "janet"
    assert division_from_name("pommaret", "classical").name == "pommaret-classical"
    with pytest.raises(ValidationError):
        division_from_name("bogus")
    with pytest.raises(ValueError):
        Pommaret("other")


def test_custom_division_uses_one_based_indices():
    only_first = Custom(lambda u, V: {1}, name="first")
    assert multiplicative_variables((0, 2, 0), U, only_first) == {1}
    assert involutive_divides((0, 2, 0), (3, 2, 0), U, only_first)
    assert not involutive_divides((0, 2, 0), (0, 3, 0), U, only_first)


def test_involutive_divisor_kinds():
    assert involutive_divisor((1, 0, 2), U, Janet()).kind == "divisor"
    assert involutive_divisor((1, 0, 2), U, Janet()).cofactor == (1, 0, 0)
    # d2^2*d3 is divisible by d2^2, but d3 is not multiplicative for it
    assert involutive_divisor((0, 2, 1), U, Janet()).kind == "none"
    assert involutive_divisor((0, 2, 2), U, all_multiplicative()).kind == "multiple"


def test_autoreduced():
    assert check_autoreduced(U, Janet()).autoreduced
    res = check_autoreduced({(1, 0), (2, 0)}, all_multiplicative())
    assert not res.autoreduced and res.divisor == (1, 0) and res.divided == (2, 0)
    assert check_autoreduced({(1, 0), (2, 0)}, Janet()).autoreduced


monomial_sets = st.sets(
    st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)).filter(lambda t: sum(t) <= 4),
    min_size=1,
    max_size=5,
)


@settings(max_examples=40, deadline=None)
@given(monomial_sets)
def test_janet_and_thomas_cones_are_disjoint(V):
    for L in (Janet(), Thomas()):
        for m in [(a, b, c) for a in range(6) for b in range(6) for c in range(6)]:
            assert involutive_divisor(m, V, L).kind != "multiple"


def test_axioms_hold_for_classical_divisions():
    rng = rng_for("axioms")
    for _ in range(10):
        n = rng.randint(1, 3)
        V = {tuple(rng.randint(0, 2) for _ in range(n)) for _ in range(rng.randint(1, 4))}
        for L in (Janet(), Thomas(), Pommaret()):
            assert check_division_axioms(L, V, 4).passed, (L, V)


def test_all_multiplicative_violates_d():
    res = check_division_axioms(all_multiplicative(), {(1, 0), (0, 1)}, 4)
    assert not res.passed and res.axiom == "d"


def test_overlapping_cones_violate_d():
    nothing = Custom(lambda u, V: set(), name="none")
    assert check_division_axioms(nothing, {(1, 0)}, 3).passed
    split = Custom(lambda u, V: {1} if u == (1, 0) else {2}, name="split")
    assert check_division_axioms(split, {(1, 0), (0, 1)}, 3).passed
    # d1*d2 lies in both cones and neither generator divides the other
    overlap = Custom(lambda u, V: {1, 2} if u == (1, 0) else {1}, name="overlap")
    res = check_division_axioms(overlap, {(1, 0), (0, 1)}, 3)
    assert not res.passed and res.axiom == "d"


# ---------------------------------------------------------------------------
# operator systems


def test_system_validation():
    with pytest.raises(ValidationError):
        InvolutiveSystem(A3, [D2, A3.parse("d2^2 + d1")], Janet())
    sysm = janet_system()
    assert sysm.table() == [("D1", (0, 0, 2), [1, 2, 3]), ("D2", (0, 2, 0), [1, 2])]


def test_strategy_normal_form():
    sysm = janet_system()
    # d3^2 * d2^2 is Janet-divisible by d3^2 only
    assert strategy_snf(A3.parse("d2^2*d3^2"), sysm) == A3.parse("2*d1^2*d2")
    assert strategy_snf(A3.parse("d2^2*d3"), sysm) == A3.parse("d2^2*d3")


def test_strategy_requires_autoreduction():
    sysm = InvolutiveSystem(A3, [A3.parse("d1"), A3.parse("d1^2 + d2")], all_multiplicative())
    with pytest.raises(NotAutoreduced):
        sysm.strategy()


def test_involutivity_verdicts():
    dx = A1.parse("d - x")
    for L in (Janet(), Thomas()):
        assert check_involutive(InvolutiveSystem(A1, [dx], L)).involutive
    res = check_involutive(InvolutiveSystem(A1, [dx], Pommaret()))
    assert not res.involutive
    assert res.witness.residual == A1.parse("d^2 - x^2 - 1")

    janet = check_involutive(janet_system())
    assert not janet.involutive
    assert (janet.witness.operator, janet.witness.alpha) == ("D2", (0, 0, 1))
    assert janet.witness.residual == A3.parse("d2^2*d3")
    bounded = check_involutive(janet_system(), "bounded", 2)
    assert ("D2", (0, 0, 2), A3.parse("2*d1^2*d2")) in [(w.operator, w.alpha, w.residual) for w in bounded.witnesses]


def test_completion_reproduces_completed_set():
    history = []
    done = complete(janet_system(), history=history)
    assert [A3.format_monomial(u) for u in done.lms] == COMPLETED
    assert [h.added for h in history] == ["D3", "D4", "D5", "D6", "D7"]
    assert check_involutive(done).involutive
    assert check_involutive(done, "bounded", 2).involutive


def test_completion_round_budget():
    with pytest.raises(RoundBudgetExhausted):
        complete(janet_system(), max_rounds=2)


def test_completed_system_has_unique_normal_forms():
    done = complete(janet_system())
    T = ThetaSystem(A3, done.theta, done.names)
    rng = rng_for("completed")
    for _ in range(8):
        D = rand_operator(A3, rng, max_order=2, max_deg=1, terms=2)
        assert len(theta_nf(D, T, mode="all", fuel=5000)) == 1


# ---------------------------------------------------------------------------
# strategies over a window


def test_window_strategy_is_involutive_and_matches_janet():
    sysm = janet_system()
    window, S = involutive_window(sysm, 4)
    assert check_involutive_strategy(window, S).involutive
    assert s_division_agrees(window, S, Janet())
    assert not s_division_agrees(window, S, Thomas())
    assert s_division_axioms(window, S).passed


def test_window_too_small():
    window, S = involutive_window(janet_system(), 2)
    with pytest.raises(WindowTooSmall):
        check_involutive_strategy(window, S)


def test_non_involutive_selection_detected():
    sysm = janet_system()
    window, _ = involutive_window(sysm, 4)
    # d3^2 * d2^2 is selected for D2, but d3 * d2^2 is not, so d3 is not
    # an S-multiplicative variable of D2
    S = window.prestrategy([(0, (0, 0, 0)), (1, (0, 0, 0)), (1, (0, 0, 2)), (0, (1, 0, 0))])
    res = check_involutive_strategy(window, S)
    assert not res.involutive and res.rule == "D2*d3^2"
