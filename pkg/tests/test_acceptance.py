"""Acceptance criteria, each timed against its budget.

Every test records one ``PASS``/``FAIL`` line that is printed in the
terminal summary, whatever the outcome of the assertion.
"""

import time

from conftest import ACCEPTANCE_LINES
import oracles
from transfinite import bridge, corpus, iam, lc_logic, otm
from transfinite.lasso import AccelerationFailure
from transfinite.harness import DEFAULT_BOUND, crosscheck
from transfinite.lc_logic import Alphabet, eval_formula
from transfinite.ordinal import (OMEGA, Kind, Ordinal, add, classify, compare, mul,
                                 parse_ordinal)
from transfinite.precomp import EventPrecomputation, ExplicitPrecomputation


class Budget:
    def __init__(self, label, limit):
        self.label, self.limit = label, limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        self.detail = ""
        self.ok = False
        return self

    def __exit__(self, exc_type, exc, tb):
        self.elapsed = time.perf_counter() - self.t0
        within = self.elapsed < self.limit
        passed = self.ok and within and exc_type is None
        why = self.detail
        if exc_type is not None:
            why = f"{exc_type.__name__}: {exc}"
        elif not within:
            why += " (over time)"
        ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'} {self.label}: "
                                f"{self.elapsed:.2f}s / {self.limit}s {why}".rstrip())
        if exc_type is None:
            assert within, f"{self.label} took {self.elapsed:.2f}s, limit {self.limit}s"
        return False


def test_phi_lim_on_limit_ordinals():
    taus = [Ordinal.of(n) for n in range(1, 51)]
    taus += [parse_ordinal(s) for s in ["w", "w+1", "w*2", "w^2", "w^2+w", "w^2+1"]]
    phi = bridge.build_phi_lim()
    A = Alphabet.of("0", "1", "H")
    with Budget("phi_lim is exactly the limit test", 5) as b:
        bad = []
        for tau in taus:
            F = EventPrecomputation(A, tau)
            r = eval_formula(phi, F, tau)
            want = 1 if classify(tau)[0] is Kind.LIMIT else 0
            if r.value != want or not r.certified:
                bad.append(str(tau))
        b.detail = f"{len(taus)} ordinals, mismatches: {bad or 'none'}"
        b.ok = not bad
    assert not bad


def test_phi_liminf_on_periodic_histories():
    rng = oracles.rng_for(2024)
    A = Alphabet.of("0", "1", "H")
    order = list(A.symbols)
    phi = bridge.build_phi_liminf(A)
    with Budget("phi_liminf agrees with the direct liminf", 30) as b:
        n = bad = 0
        while n < 200:
            pre = [rng.choice(order) for _ in range(rng.randint(0, 20))]
            cyc = [rng.choice(order) for _ in range(rng.randint(1, 6))]
            place = Ordinal.of(rng.randint(0, 4))
            F = EventPrecomputation.from_history(A, place, pre, cyc)
            want = oracles.liminf_of(pre, cyc, order)
            for s in order:
                r = eval_formula(phi, F, OMEGA, {"a": place, "b": s})
                if r.value != (s == want) or not r.certified:
                    bad += 1
            n += 1
        b.detail = f"{n} histories, {bad} wrong answers"
        b.ok = bad == 0
    assert bad == 0


def test_compiled_iam_tracks_machine_on_corpus():
    assert len(corpus.ENTRIES) >= 20
    with Budget("compiled IAM decodes to the machine run up to min(halt, w*2+50)", 120) as b:
        failed = []
        for e in corpus.ENTRIES:
            rep = crosscheck(e.program, e.input_ordinal, DEFAULT_BOUND)
            if not rep.ok or not rep.agreement:
                failed.append(e.name)
        b.detail = f"{len(corpus.ENTRIES)} programs, failing: {failed or 'none'}"
        b.ok = not failed
    assert not failed


def test_tape_transcript_matches_iam_run():
    bound = parse_ordinal("w+20")
    with Budget("three-tape transcript equals iam.run up to w+20", 120) as b:
        failed = []
        for e in corpus.ENTRIES:
            prog = bridge.compile_otm(e.program)
            opts = lambda: iam.IamRunOptions(input=e.input_ordinal, bound=bound)
            ref = iam.run(prog, opts())
            tr = bridge.simulate_iam_on_tapes(prog, opts())
            recs = tr.transcript()
            same = (tr.report.final_time == ref.final_time and len(recs) > 0
                    and all(m.same_as(ref.state_at(t)) for t, m in recs))
            if not same:
                failed.append(e.name)
        b.detail = f"{len(corpus.ENTRIES)} programs, failing: {failed or 'none'}"
        b.ok = not failed
    assert not failed


def test_successor_machine_through_iam():
    prog = bridge.compile_otm(otm.parse_program(corpus.SUCCESSOR, "successor"))
    alphas = [parse_ordinal(s) for s in ["0", "1", "5", "w", "w+3", "w*2"]]
    with Budget("compiled successor machine returns alpha+1", 60) as b:
        got = {}
        for a in alphas:
            rep = iam.run(prog, iam.IamRunOptions(input=a, bound=a + OMEGA))
            got[str(a)] = str(iam.decode_function_answer(rep))
        wrong = {k: v for k, v in got.items() if parse_ordinal(v) != parse_ordinal(k).succ()}
        b.detail = f"answers {got}"
        b.ok = not wrong
    assert not wrong


def test_eval_matches_brute_force():
    rng = oracles.rng_for(77)
    A = Alphabet.of("0", "1", "H")
    syms = list(A.symbols)
    with Budget("eval equals the brute-force evaluator", 60) as b:
        n = bad = 0
        while n < 500:
            tau = rng.randint(0, 20)
            f = oracles.random_formula(rng, 4, ["u"], ["s"], syms, 22)
            hist = oracles.random_history(rng, tau, syms)
            env_u, env_s = rng.randint(0, tau), rng.choice(syms)
            semantics = "literal" if n % 2 else "blank-default"
            phi = lc_logic.parse(oracles.render(f))
            free = lc_logic.free_vars(phi)
            env = {k: v for k, v in (("u", Ordinal.of(env_u)), ("s", env_s)) if k in free}
            got = eval_formula(phi, ExplicitPrecomputation(A, hist), tau, env, semantics=semantics)
            want = oracles.brute_eval(f, hist, tau, {"u": ("ord", env_u), "s": ("sym", env_s)},
                                      A.blank, literal=semantics == "literal")
            if got.value != int(want):
                bad += 1
            n += 1
        b.detail = f"{n} instances, {bad} disagreements"
        b.ok = bad == 0
    assert bad == 0


def _lead(x):
    return 2 if x[0] else (1 if x[1] else 0)


def test_ordinal_arithmetic_against_tuples():
    rng = oracles.rng_for(5)
    with Budget("ordinal compare/add/mul match the tuple oracle", 5) as b:
        n = bad = 0
        while n < 1000:
            x, y = oracles.random_triple(rng), oracles.random_triple(rng)
            X, Y = parse_ordinal(oracles.o_text(x)), parse_ordinal(oracles.o_text(y))
            op = n % 3
            if op == 0:
                ok = int(compare(X, Y)) == oracles.o_cmp(x, y)
            elif op == 1:
                ok = add(X, Y) == parse_ordinal(oracles.o_text(oracles.o_add(x, y)))
            else:
                if y != (0, 0, 0) and _lead(y) > 0 and _lead(x) + _lead(y) > 2:
                    continue
                ok = mul(X, Y) == parse_ordinal(oracles.o_text(oracles.o_mul(x, y)))
            bad += not ok
            n += 1
        b.detail = f"{n} instances, {bad} wrong"
        b.ok = bad == 0
    assert bad == 0


def _random_machine(rng):
    states = rng.randint(3, 4)
    halt = states - 1
    rules = {}
    lines = [f"states: {states}", f"halt: {halt}"]
    for s in range(states - 1):
        for bit in (0, 1):
            w, m, nxt = rng.randint(0, 1), rng.choice("LR"), rng.randrange(states)
            rules[(s, bit)] = (w, m, nxt)
            lines.append(f"{s} {bit} -> {w} {m} {nxt}")
    return rules, halt, "\n".join(lines) + "\n"


def test_acceleration_matches_brute_liminf():
    rng = oracles.rng_for(11)
    with Budget("accelerated limit equals a 10-period brute-force liminf", 60) as b:
        found = bad = tries = 0
        kinds = {"cycle": 0, "translation": 0}
        uncertified = 0
        while found < 20:
            tries += 1
            assert tries < 2000, "could not find enough machines reaching w"
            rules, halt, text = _random_machine(rng)
            p = otm.parse_program(text)
            try:
                rep = otm.run(p, bound=OMEGA, step_budget=300)
            except AccelerationFailure:
                uncertified += 1  # e.g. counters: no lasso, so no limit is claimed
                continue
            if rep.halted:
                continue
            cert = rep.segments[0].cert
            if cert.q == 1 and cert.n <= 1:
                continue  # keep the sample to runs with some structure
            found += 1
            kinds[cert.kind] += 1
            snaps = oracles.tm_run(rules, halt, cert.n + 12 * cert.q)
            state, head, cells, frozen = oracles.tm_liminf(snaps, cert.n, cert.q, 10)
            lim = rep.final
            ok = lim.state == state
            ok &= lim.heads[0] == (OMEGA if head is None else Ordinal.of(head))
            ok &= all(lim.cell(Ordinal.of(q)) == v for q, v in cells.items())
            bad += not ok
        b.detail = f"{found} machines ({tries} sampled, {kinds}, {uncertified} without a lasso), {bad} mismatches"
        b.ok = bad == 0
    assert bad == 0
