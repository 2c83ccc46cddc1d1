"""Idealized agent machines: the state operator and the run recursion.

The state at time ``tau`` assigns to each place ``y`` of its domain the unique
symbol ``z`` with ``phi(tau, y, z)`` true over the history so far.  The
history is kept as a :class:`RunPrecomputation`: one lasso segment per
omega-block of time, so limit stages are reached by acceleration exactly as
for ordinal Turing machines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from . import lasso
from .lasso import AccelerationFailure, Frame, Segment
from .lc_logic import (HALT, ORD, SYM, Alphabet, Evaluator, LcError, LcSyntaxError, SortError,
                       UncertifiedLimitEvaluation, check_sorts, format_formula, free_vars,
                       ordinal_constants, parse_formula, subformulas, SymConst)
from .ordinal import (OMEGA, ONE, ZERO, Ordinal, OrdinalSyntaxError, format_ordinal, is_limit,
                      parse_ordinal)
from .precomp import RunPrecomputation  # noqa: F401  (re-exported)
from .tape import Memory, PSeq, Tape

TIME, PLACE, SYMBOL = "x", "y", "z"


class IamError(Exception):
    pass


class ProgramNotFunctional(IamError):
    def __init__(self, place, time, symbols):
        self.place, self.time, self.symbols = place, time, tuple(symbols)
        super().__init__(f"{len(self.symbols)} symbols satisfy the program at place {place} "
                         f"(time {time}): {', '.join('#' + s for s in self.symbols) or 'none'}")


class NotHalted(IamError):
    pass


class MalformedOutput(IamError):
    pass


class BoundReached(IamError):
    """Raised only on request; normally recorded in the report."""


@dataclass(frozen=True)
class IamProgram:
    """A formula ``phi(x, y, z)`` (time, place, symbol) over an alphabet.

    ``semantics`` selects the reading of ``C``; ``slack`` widens every
    state's domain by that many places; ``markov`` declares that each state
    depends only on the previous one, which makes lasso acceleration exact.
    """

    formula: object
    alphabet: Alphabet
    params: tuple = ()  # ((place, symbol), ...)
    semantics: str = "literal"
    slack: int = 0
    markov: bool = False
    fragment: bool = False
    name: str = ""

    def __post_init__(self):
        extra = free_vars(self.formula) - {TIME, PLACE, SYMBOL}
        if extra:
            raise SortError(f"unexpected free variables: {', '.join(sorted(extra))}")
        check_sorts(self.formula, {TIME: ORD, PLACE: ORD, SYMBOL: SYM})
        for sub in subformulas(self.formula):
            for t in getattr(sub, "__dict__", {}).values():
                if isinstance(t, SymConst) and t.name not in self.alphabet.symbols:
                    raise SortError(f"symbol #{t.name} is not in the alphabet")
        places = [p for p, _ in self.params]
        if len(set(places)) != len(places):
            raise IamError("parameter places must be distinct")
        for _, s in self.params:
            if s not in self.alphabet.symbols:
                raise IamError(f"parameter symbol #{s} is not in the alphabet")

    def format(self) -> str:
        lines = [f"alphabet: {self.alphabet.format()}"]
        if self.params:
            lines.append("params: " + " ".join(
                f"(place={format_ordinal(p, True)}, symbol=#{s})" for p, s in self.params))
        if self.semantics != "literal":
            lines.append(f"semantics: {self.semantics}")
        if self.slack:
            lines.append(f"slack: {self.slack}")
        if self.markov:
            lines.append("markov: yes")
        if self.fragment:
            lines.append("fragment: yes")
        lines.append(format_formula(self.formula))
        return "\n".join(lines) + "\n"


_PARAM = re.compile(r"\(\s*(?:place\s*=\s*)?([^,()=]+?)\s*,\s*(?:symbol\s*=\s*)?#(\w+)\s*\)")


def parse_program(text: str, name: str = "") -> IamProgram:
    """Read an IAM program file: ``key: value`` headers, then the formula."""
    headers = {}
    body = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        m = re.match(r"^([a-z]+):\s*(.*)$", line)
        if m and not body and m.group(1) in ("alphabet", "params", "semantics", "slack",
                                             "markov", "fragment", "name"):
            headers[m.group(1)] = m.group(2)
        else:
            body.append(line)
    if "alphabet" not in headers:
        raise LcSyntaxError("IAM program needs an 'alphabet:' header")
    alphabet = Alphabet.parse(headers["alphabet"])
    params = []
    if headers.get("params"):
        rest = _PARAM.sub("", headers["params"]).strip()
        if rest:
            raise LcSyntaxError(f"cannot read params: {rest!r}")
        for p, s in _PARAM.findall(headers["params"]):
            try:
                params.append((parse_ordinal(p), s))
            except OrdinalSyntaxError as e:
                raise LcSyntaxError(f"params: {e}") from None
    phi = parse_formula(" ".join(body), {TIME: ORD, PLACE: ORD, SYMBOL: SYM})
    yes = ("yes", "true", "1")
    return IamProgram(phi, alphabet, tuple(params), headers.get("semantics", "literal"),
                      int(headers.get("slack", "0")), headers.get("markov", "no") in yes,
                      headers.get("fragment", "no") in yes, headers.get("name", name))


def encode_input(alpha, alphabet: Optional[Alphabet] = None) -> Memory:
    """``chi_alpha`` truncated to ``alpha + 1``: ones below alpha, a zero at alpha."""
    alpha = Ordinal.of(alpha)
    if alphabet is not None and not {"0", "1"} <= set(alphabet.symbols):
        raise IamError("input encoding needs symbols #0 and #1")
    return Memory(Tape.interval(ZERO, alpha, "1", "0"), alpha.succ())


@dataclass
class IamRunOptions:
    input: Optional[Ordinal] = None
    memory: Optional[Memory] = None
    params: tuple = ()
    bound: Ordinal = OMEGA * 2
    strict: bool = False
    checkpoints: tuple = ()
    max_period: int = 64
    step_budget: int = 600
    max_blocks: int = 16


@dataclass
class RunReport:
    program: IamProgram
    halted: bool
    final_time: Ordinal
    bound: Ordinal
    history: RunPrecomputation
    certified: dict = field(default_factory=dict)  # infinite time -> bool
    checkpoints: dict = field(default_factory=dict)

    @property
    def halt_time(self) -> Optional[Ordinal]:
        return self.final_time if self.halted else None

    @property
    def status(self) -> str:
        return "halted" if self.halted else "bound-reached"

    @property
    def final(self) -> Memory:
        return self.history.memory(self.final_time)

    def state_at(self, t) -> Memory:
        t = Ordinal.of(t)
        if t > self.final_time:
            raise ValueError(f"{t} is past the end of the run ({self.final_time})")
        return self.history.memory(t)

    @property
    def all_certified(self) -> bool:
        return all(self.certified.values())

    def times(self):
        """Explicitly computed times after the input, then the final time."""
        last = None
        for t in self.history.times():
            if ZERO < t <= self.final_time:
                last = t
                yield t
        if last != self.final_time and self.final_time > ZERO:
            yield self.final_time


def _fit_pseq(vals, max_prefix):
    n = len(vals)
    for c in range(1, n // 3 + 1):
        pre = n - c
        while pre > 0 and vals[pre - 1] == vals[pre - 1 + c]:
            pre -= 1
        if pre <= max_prefix and n - pre >= 3 * c:
            return PSeq.make(vals[:pre], vals[pre:pre + c])
    raise AccelerationFailure("state is not eventually periodic within the sampled window")


class _Stage:
    """State computation at one time against a fixed history."""

    def __init__(self, program, F, tau, strict):
        self.p = program
        self.F = F
        self.tau = tau
        self.ev = Evaluator(F, tau, program.semantics, fragment=program.fragment)
        self.ev._consts = tuple(ordinal_constants(program.formula))
        self.strict = strict

    def symbol_at(self, y):
        env = {TIME: self.tau, PLACE: y}
        hits = []
        for s in self.p.alphabet.symbols:
            env[SYMBOL] = s
            if self.ev.truth(self.p.formula, env):
                hits.append(s)
        if len(hits) != 1:
            raise ProgramNotFunctional(y, self.tau, hits)
        return hits[0]

    @property
    def certified(self):
        return not self.ev.used_candidates or self.p.fragment


def next_state(program: IamProgram, F, tau: Optional[Ordinal] = None,
               domain: Optional[Ordinal] = None, strict: bool = False,
               params=None) -> Memory:
    """The state at time ``tau`` (default: the history's length)."""
    m, _ = _next_state(program, F, F.length if tau is None else Ordinal.of(tau), domain,
                       strict, params)
    return m


def _next_state(program, F, tau, domain, strict, params, stage_cls=None):
    if domain is None:
        domain = tau.plus_finite(program.slack) if tau.is_finite else tau + Ordinal.of(program.slack)
    st = (stage_cls or _Stage)(program, F, tau, strict)
    blank = program.alphabet.blank
    blocks = {}
    mem_blocks = Memory(Tape(blank), domain).blocks_in_domain()
    if domain.is_finite:
        vals = [st.symbol_at(Ordinal.of(i)) for i in range(domain.finite_value())]
        blocks[ZERO] = PSeq.make(vals, (blank,))
    else:
        anchors = F.anchors() | {tau, domain}
        per = max(F.max_period(), 1)
        for b in mem_blocks:
            if b == domain.block():
                vals = [st.symbol_at(b.plus_finite(i)) for i in range(domain.offset())]
                blocks[b] = PSeq.make(vals, (blank,))
                continue
            top = max([a.offset() for a in anchors if a.block() == b] + [0])
            n = top + 6 * per + 12
            vals = [st.symbol_at(b.plus_finite(i)) for i in range(n)]
            blocks[b] = _fit_pseq(vals, top + 3 * per + 4)
    tape = Tape(blank, blocks=blocks)
    for p, s in params or ():
        tape = tape.set(p, s)
        if p >= domain:
            domain = p.succ()
    if strict and not st.certified:
        raise UncertifiedLimitEvaluation(f"state at time {format_ordinal(tau)} relies on "
                                         "heuristic limit-stage evaluation")
    return Memory(tape, domain), st.certified


def run(program: IamProgram, opts: Optional[IamRunOptions] = None, *, history_cls=None,
        stage_cls=None, **kw) -> RunReport:
    """Apply the state operator from the input up to halting or ``opts.bound``.

    ``history_cls`` and ``stage_cls`` let another storage scheme (such as the
    block-coded tape of :mod:`bridge`) stand in for the history and the
    per-place evaluation.
    """
    opts = opts or IamRunOptions(**kw)
    bound = Ordinal.of(opts.bound)
    A = program.alphabet
    params = tuple(opts.params) or tuple(program.params)
    if opts.memory is not None:
        m0 = opts.memory
    elif opts.input is not None:
        m0 = encode_input(opts.input, A)
    else:
        m0 = Memory(Tape(A.blank), ZERO)
    tape0 = m0.tape
    dom0 = m0.domain
    for p, s in params:
        tape0 = tape0.set(p, s)
        if p >= dom0:
            dom0 = p.succ()
    ppad = max([p.succ() for p, _ in params] + [ZERO])

    def domain_of(t):
        if t == ZERO:
            return dom0
        d = max(t, m0.domain, ppad)
        return d.plus_finite(program.slack) if program.slack else d

    F = (history_cls or RunPrecomputation)(A, domain_of)
    consts = ordinal_constants(program.formula)
    const_start = max([c.offset() for c in consts] + [0]) + 2
    fixed_domain = max(m0.domain, ppad)

    def min_start_for(block):
        # a lasso may only start once the domain grows in step with the clock
        if fixed_domain.block() == block:
            return max(const_start, fixed_domain.offset() + 2)
        return const_start
    const_offsets = {}
    for c in consts:
        const_offsets[c.block()] = max(const_offsets.get(c.block(), 0), c.offset())

    def min_offset(block):
        return max(const_offsets.get(block, 0) + 1, 1)

    cert_flags = {}
    start = ZERO
    seg = Segment(ZERO)
    seg.frames.append(Frame((), (tape0,), (None,)))
    F.segments[ZERO] = seg
    F.touch(ONE)
    halted = False
    final_time = ZERO
    blocks_done = 0
    while True:
        needs_limit = bound.block() != seg.start
        t = seg.start.plus_finite(len(seg.frames) - 1)
        final_time = t
        cert = None
        while t < bound:
            if needs_limit and len(seg.frames) > opts.step_budget:
                raise AccelerationFailure(
                    f"no certificate within {opts.step_budget} steps from {format_ordinal(seg.start)}")
            t = t.succ()
            m, ok = _next_state(program, F, t, domain_of(t), opts.strict, params, stage_cls)
            if not t.is_finite:
                cert_flags[t] = ok
            seg.frames.append(Frame((), (m.tape,), (None,)))
            F.touch(t.succ())
            final_time = t
            if m.get(ZERO) == HALT:
                halted = True
                break
            min_start = min_start_for(seg.start)
            if needs_limit or len(seg.frames) > 2 * min_start + 8:
                cert = lasso.find_certificate(seg.frames, max_period=opts.max_period,
                                              min_start=min_start, min_offset=min_offset)
                if cert is not None:
                    seg.cert = cert
                    break
        if halted:
            break
        if cert is None:
            break  # reached the bound explicitly
        lam = seg.start + OMEGA
        if bound < lam:
            final_time = bound
            break
        blocks_done += 1
        if blocks_done > opts.max_blocks:
            raise AccelerationFailure("bound requires limits of limits; not supported")
        F.touch(lam)
        m, ok = _next_state(program, F, lam, domain_of(lam), opts.strict, params, stage_cls)
        cert_flags[lam] = ok and (program.markov or False)
        seg = Segment(lam)
        seg.frames.append(Frame((), (m.tape,), (None,)))
        F.segments[lam] = seg
        F.touch(lam.succ())
        final_time = lam
        if m.get(ZERO) == HALT:
            halted = True
            break
        if lam == bound:
            break
    F.touch(final_time.succ())
    rep = RunReport(program, halted, final_time, bound, F, cert_flags)
    for c in opts.checkpoints:
        c = Ordinal.of(c)
        if c <= final_time:
            rep.checkpoints[c] = rep.state_at(c)
    return rep


# output conventions ----------------------------------------------------

def decode_set_answer(rep: RunReport) -> int:
    if not rep.halted:
        raise NotHalted("the run did not halt")
    v = rep.final.get(ONE)
    if v not in ("0", "1"):
        raise MalformedOutput(f"place 1 holds {v!r}, expected #0 or #1")
    return int(v)


def decode_function_answer(rep: RunReport) -> Ordinal:
    """The unique beta >= 1 holding #1, minus one."""
    if not rep.halted:
        raise NotHalted("the run did not halt")
    return decode_function_memory(rep.final)


def decode_function_memory(m: Memory) -> Ordinal:
    ones = []
    for b in m.blocks_in_domain():
        seq = m.tape.block_seq(b)
        end = m.domain.offset() if b == m.domain.block() else None
        if end is None:
            bad = [v for v in seq.cycle if v != "0"]
            if bad:
                raise MalformedOutput(f"infinitely many non-zero places in block {format_ordinal(b)}")
            end = seq.span
        for i in range(end):
            p = b.plus_finite(i)
            v = seq.get(i)
            if p == ZERO or v == "0":
                continue
            if v != "1":
                raise MalformedOutput(f"stray symbol #{v} at place {format_ordinal(p)}")
            ones.append(p)
    if len(ones) != 1:
        raise MalformedOutput(f"expected exactly one output mark, found {len(ones)}")
    beta = ones[0]
    if not beta.offset():
        raise MalformedOutput(f"output mark at limit place {format_ordinal(beta)}")
    return beta.pred()


# trace format ----------------------------------------------------------

def _memory_changes(prev: Optional[Memory], cur: Memory) -> str:
    old = prev.tape if prev is not None else Tape(cur.tape.default)
    finite, infinite = old.diff(cur.tape)
    out = [f"{format_ordinal(p, True)}:{cur.get(p)}" for p in finite if p < cur.domain]
    for b in infinite:
        if b < cur.domain.block():
            seq = cur.tape.block_seq(b)
            out.append(f"{format_ordinal(b, True)}..:{''.join(seq.prefix)}({''.join(seq.cycle)})")
    return ",".join(out)


def trace_records(rep: RunReport) -> list:
    """``clock=... domain=... changed=place:sym,...`` per computed time, then an end line."""
    lines = []
    prev = None
    for t in [ZERO] + list(rep.times()):
        cur = rep.state_at(t)
        lines.append(f"clock={format_ordinal(t, True)} domain={format_ordinal(cur.domain, True)} "
                     f"changed={_memory_changes(prev, cur)}")
        prev = cur
    status = "halt" if rep.halted else "bound"
    lines.append(f"end={status} clock={format_ordinal(rep.final_time, True)}")
    return lines
