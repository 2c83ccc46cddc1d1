from hypothesis import given, settings, strategies as st
import pytest

import oracles
from transfinite import bridge
from transfinite.lc_logic import (PHI_LIM_TEXT, Alphabet, And, CAtom, Eq, Exists, Forall, Le,
                                  LcError, LcSyntaxError, Not, ORD, SYM, OrdConst, SortError, SymConst,
                                  UnboundVariable, UncertifiedLimitEvaluation, Var, check_program,
                                  check_sorts, depth, eval_formula, format_formula, free_vars,
                                  parse, substitute, symbol_order_sugar)
from transfinite.ordinal import OMEGA, Ordinal, parse_ordinal
from transfinite.precomp import (EventPrecomputation, ExplicitPrecomputation,
                                 parse_precomputation)

A = Alphabet.of("0", "1", "H")


def empty(tau):
    return EventPrecomputation(A, Ordinal.of(tau))


# parsing ---------------------------------------------------------------

def test_parse_phi_lim():
    phi = parse(PHI_LIM_TEXT)
    x, y = Var("x"), Var("y")
    assert phi == Forall("x", Exists("y", And((Le(x, y), Not(Eq(x, y))))))
    assert format_formula(phi) == PHI_LIM_TEXT


@pytest.mark.parametrize("text", [
    "C(0) = 1", "C(o{0}) = #1", "x = ", "(x = y & y = z | x = z)", "E . x = x",
    "o{w+} = x", "x -> y -> z", "#q = #0 &",
])
def test_syntax_errors(text):
    with pytest.raises(LcSyntaxError):
        parse(text)


def test_syntax_error_has_position():
    with pytest.raises(LcSyntaxError) as info:
        parse("E x. (x = x & )")
    assert info.value.pos is not None


@pytest.mark.parametrize("text", ["E s. C(s, s) = s", "C(x, #0) = #1", "E u. C(o{0}, u) = u"])
def test_sort_errors(text):
    with pytest.raises(SortError):
        parse(text)


def test_cross_sort_comparisons_are_false():
    for text in ["(C(x, y) = z & x = z)", "E x. x = #1", "E x. #1 <= x"]:
        phi = parse(text)
        env = {k: v for k, v in (("x", Ordinal.of(1)), ("y", Ordinal.of(0)), ("z", "1"))
               if k in free_vars(phi)}
        assert eval_formula(phi, empty(3), 3, env).value == 0


def test_arrow_and_sugar_round_trip():
    for text in ["(x <= y -> C(x, y) = #H)", "A u. !(E v. (u <= v | C(u, v) = s))",
                 "(o{w+1} = x & o{w^2} <= y & #0 = s)"]:
        phi = parse(text)
        assert parse(format_formula(phi)) == phi


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_printer_round_trip_random(seed):
    rng = oracles.rng_for(seed)
    f = oracles.random_formula(rng, 4, ["u"], ["s"], ["0", "1", "H"], 30)
    phi = parse(oracles.render(f))
    assert parse(format_formula(phi)) == phi


def test_free_vars_and_substitution():
    phi = parse("E y. (x <= y & C(y, x) = s)")
    assert free_vars(phi) == {"x", "s"}
    psi = substitute(phi, {"x": Var("y")})
    assert free_vars(psi) == {"y", "s"}  # the bound y was renamed, not captured
    assert depth(phi) == 2


def test_check_sorts_reports_kinds():
    sorts = check_sorts(parse("E u. C(u, p) = q"))
    assert sorts["p"] == ORD and sorts["q"] == SYM


# evaluation -------------------------------------------------------------

def test_phi_lim_values():
    phi = parse(PHI_LIM_TEXT)
    assert str(eval_formula(phi, empty(OMEGA), OMEGA)) == "1 certified"
    assert eval_formula(phi, empty(5), 5).value == 0
    assert eval_formula(phi, empty(0), 0).value == 1  # vacuous at 0


def test_reads_a_cell():
    F = ExplicitPrecomputation(A, [[], ["0"], ["1", "0"]])
    assert eval_formula(parse("C(o{2}, o{0}) = #1"), F, 3).value == 1
    assert eval_formula(parse("C(o{2}, o{0}) = #0"), F, 3).value == 0


@pytest.mark.parametrize("s", ["0", "1", "H"])
def test_literal_time_before_place(s):
    F = ExplicitPrecomputation(A, [[], ["0"], ["1", "0"]])
    assert eval_formula(parse("C(o{1}, o{5}) = s"), F, 3, {"s": s}).value == 1
    blank = eval_formula(parse("C(o{1}, o{5}) = s"), F, 3, {"s": s}, semantics="blank-default")
    assert blank.value == (s == A.blank)


def test_unwritten_cells_read_blank():
    F = ExplicitPrecomputation(A, [[], [], ["1"]])
    assert eval_formula(parse("C(o{2}, o{1}) = #0"), F, 3).value == 1


def test_env_may_hold_tau():
    F = ExplicitPrecomputation(A, [[], ["1"]])
    assert eval_formula(parse("E u. u <= x"), F, 2, {"x": Ordinal.of(2)}).value == 1
    assert eval_formula(parse("E u. x <= u"), F, 2, {"x": Ordinal.of(2)}).value == 0


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        eval_formula(parse("E x. C(x, y) = #1"), empty(4), 4)


def test_strict_mode_on_heuristic_limit():
    phi = parse("A x. E y. (x <= y & C(y, o{0}) = #1)")
    r = eval_formula(phi, empty(OMEGA), OMEGA)
    assert not r.certified
    with pytest.raises(UncertifiedLimitEvaluation):
        eval_formula(phi, empty(OMEGA), OMEGA, strict=True)
    # finite stages never need the procedure
    assert eval_formula(phi, empty(6), 6, strict=True).certified


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_de_morgan(seed):
    rng = oracles.rng_for(seed)
    tau = rng.randint(0, 8)
    body = parse(oracles.render(oracles.random_formula(rng, 3, ["u"], [], ["0", "1", "H"], 9)))
    hist = oracles.random_history(rng, tau, ["0", "1", "H"])
    F = ExplicitPrecomputation(A, hist)
    direct = eval_formula(Forall("u", body), F, tau)
    sugar = eval_formula(Not(Exists("u", Not(body))), F, tau)
    assert direct.value == sugar.value


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["literal", "blank-default"]))
def test_matches_brute_force(seed, semantics):
    rng = oracles.rng_for(seed)
    tau = rng.randint(0, 12)
    f = oracles.random_formula(rng, 4, ["u"], ["s"], ["0", "1", "H"], 14)
    hist = oracles.random_history(rng, tau, ["0", "1", "H"])
    u, s = rng.randint(0, tau), rng.choice("01H")
    phi = parse(oracles.render(f))
    env = {k: v for k, v in (("u", Ordinal.of(u)), ("s", s)) if k in free_vars(phi)}
    got = eval_formula(phi, ExplicitPrecomputation(A, hist), tau, env, semantics=semantics)
    want = oracles.brute_eval(f, hist, tau, {"u": ("ord", u), "s": ("sym", s)}, "0",
                              literal=semantics == "literal")
    assert got.value == int(want)


def test_certified_limit_answers_match_prefix_brute_force():
    """phi_liminf at w against the liminf read off 5, 10 and 20 periods."""
    phi = bridge.build_phi_liminf(A)
    rng = oracles.rng_for(3)
    for _ in range(30):
        pre = [rng.choice("01H") for _ in range(rng.randint(0, 6))]
        cyc = [rng.choice("01H") for _ in range(rng.randint(1, 4))]
        F = EventPrecomputation.from_history(A, Ordinal.of(0), pre, cyc)
        answers = {oracles.prefix_liminf(pre + cyc * n, n * len(cyc), "01H") for n in (5, 10, 20)}
        assert len(answers) == 1
        answers = sorted(answers)
        for b in "01H":
            r = eval_formula(phi, F, OMEGA, {"a": Ordinal.of(0), "b": b})
            assert r.certified and r.value == (b == answers[0])


# symbol order ---------------------------------------------------------------

def test_symbol_order_sugar():
    two = Alphabet.of("0", "1", "H")
    low = symbol_order_sugar(two, SymConst("0"), Var("t"))
    assert all(eval_formula(low, empty(1), 1, {"t": t}).value for t in "01H")
    top = symbol_order_sugar(two, SymConst("H"), Var("t"))
    assert [eval_formula(top, empty(1), 1, {"t": t}).value for t in "01H"] == [0, 0, 1]
    fixed = symbol_order_sugar(two, Var("s"), SymConst("1"))
    assert len(fixed.items) == 2  # one disjunct per symbol at or below #1


def test_alphabet_validation():
    with pytest.raises(LcError):
        Alphabet(())
    with pytest.raises(LcError):
        Alphabet.of("0", "0", "H")
    with pytest.raises(LcError):
        Alphabet.of("0", "1")
    assert Alphabet.parse("#0 #1 #H") == A and A.format() == "#0 #1 #H"


# program checker -------------------------------------------------------------

def test_check_program_constant_is_fine():
    r = check_program(parse("z = #0"), A, OMEGA, samples=40)
    assert r.ok and r.samples == 40


def test_check_program_finds_non_functional():
    r = check_program(parse("z = z"), A, Ordinal.of(6), samples=10)
    assert not r.ok and len(r.counterexamples[0][2]) == 3


def test_check_program_liminf():
    two = Alphabet.of("0", "H")
    phi = bridge.build_phi_liminf(two)
    r = check_program(phi, two, OMEGA, samples=24, semantics="blank-default",
                      names=("t", "a", "b"))
    assert r.ok


# precomputation files ----------------------------------------------------------

def test_precomputation_round_trip():
    F = EventPrecomputation.random(A, oracles.rng_for(1), places=3)
    G = parse_precomputation(F.format())
    for t in range(30):
        for p in range(4):
            assert F.value(Ordinal.of(t), Ordinal.of(p)) == G.value(Ordinal.of(t), Ordinal.of(p))


def test_precomputation_file():
    text = """alphabet: #0 #1 #H
length: w
t=3 place=0 sym=#1
summary place=1 kind=cycle since=2 syms=#0,#1
"""
    F = parse_precomputation(text)
    assert F.length == OMEGA
    assert F.value(Ordinal.of(3), Ordinal.of(0)) == "1"
    assert [F.value(Ordinal.of(t), Ordinal.of(1)) for t in (2, 3, 4)] == ["0", "1", "0"]
    with pytest.raises(LcSyntaxError):
        parse_precomputation("alphabet: #0 #H\nt=1 place=0 sym=#0\n")
    with pytest.raises(LcSyntaxError):
        parse_precomputation("alphabet: #0 #H\nlength: 3\nt=1 place=0 sym=0\n")
