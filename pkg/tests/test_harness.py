from dataclasses import replace

import pytest

from transfinite import corpus
from transfinite.bridge import compile_otm
from transfinite.harness import DEFAULT_BOUND, crosscheck, time_grid
from transfinite.lc_logic import And, Eq, Not, OrdConst, Or, SymConst, Var
from transfinite.ordinal import OMEGA, Ordinal, parse_ordinal

P = parse_ordinal


def corrupted(p, iam_time, place, symbol):
    """The compiled program with one cell forced to ``symbol`` at one time."""
    good = compile_otm(p)
    hit = And((Eq(Var("x"), OrdConst(iam_time)), Eq(Var("y"), OrdConst(place))))
    phi = Or((And((hit, Eq(Var("z"), SymConst(symbol)))), And((Not(hit), good.formula))))
    return replace(good, formula=phi)


def test_time_grid():
    g = time_grid(P("w+3"), per_block=5)
    assert g[:5] == [Ordinal.of(i) for i in range(5)]
    assert OMEGA in g and P("w+3") == g[-1]


def test_clean_program_agrees():
    rep = crosscheck(corpus.get("double_sweep").program, bound=P("w+10"))
    assert rep.ok and rep.divergence is None and all(rep.agreement.values())
    assert rep.limit_certified and all(rep.limit_certified.values())


def test_fault_injection_reports_first_divergence():
    p = corpus.get("sweep_ones").program
    bad = corrupted(p, P("7"), P("3"), "0")  # machine time 6, cell 2
    rep = crosscheck(p, bound=P("20"), compiled=bad)
    assert not rep.ok
    assert rep.divergence.time == P("6")
    assert all(rep.agreement[Ordinal.of(t)] for t in range(6))
    text = rep.divergence.describe()
    assert "machine:" in text and "decoded:" in text


def test_fault_after_a_limit():
    p = corpus.get("blinker").program
    bad = corrupted(p, P("w+2"), P("3"), "1")  # a cell the machine never visits
    rep = crosscheck(p, bound=P("w+6"), compiled=bad)
    # 1 + t == t past omega, so the IAM and machine clocks coincide here
    assert rep.divergence is not None and rep.divergence.time == P("w+2")


def test_broken_head_mark_is_reported_not_raised():
    p = corpus.get("blinker").program
    bad = corrupted(p, P("w+2"), P("1"), "1")  # erases the only head mark
    rep = crosscheck(p, bound=P("w+6"), compiled=bad)
    assert not rep.ok and rep.divergence.time == P("w+2")
    later = crosscheck(p, bound=P("w+6"), compiled=bad, checkpoints=[P("w+4")])
    assert "iam run failed" in later.divergence.describe()


def test_checkpoints_are_honoured():
    cps = [OMEGA, P("w+1"), P("w*2")]
    rep = crosscheck(corpus.get("alternator").program, checkpoints=cps)
    assert list(rep.agreement) == cps and rep.ok


def test_halting_program_halt_times():
    e = corpus.get("successor_big")
    rep = crosscheck(e.program, e.input_ordinal)
    assert rep.ok and rep.halted
    assert rep.halt_time == P("w+4") and rep.iam_halt_time == P("w+5")


def test_report_lines_are_canonical():
    e = corpus.get("successor")
    a = crosscheck(e.program, e.input_ordinal).lines(canonical=True)
    b = crosscheck(e.program, e.input_ordinal).lines(canonical=True)
    assert a == b and not any("wall" in line for line in a)
    assert a[0].startswith("program=successor ok=yes")


def test_tape_comparison_flag():
    rep = crosscheck(corpus.get("four_cycle").program, bound=P("12"), tapes=True)
    assert rep.tape_agreement is True and rep.ok


@pytest.mark.parametrize("name", ["left_eraser", "inverter", "flip_skip"])
def test_input_programs_to_default_bound(name):
    e = corpus.get(name)
    rep = crosscheck(e.program, e.input_ordinal, DEFAULT_BOUND)
    assert rep.ok, "\n".join(rep.lines())
