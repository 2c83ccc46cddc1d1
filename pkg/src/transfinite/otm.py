"""Ordinal Turing machines with liminf limit rules.

Limit rules: the state, every head position and every cell take the liminf
of their histories.  A Left move from position 0 or from a limit position
sends the head to 0.  Limits are reached through lasso certificates found by
:func:`accelerate`; if no certificate is found the run stops with
:class:`AccelerationFailure` instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import lasso
from .lasso import AccelerationFailure, Certificate, Frame, Segment
from .ordinal import OMEGA, ZERO, Ordinal, format_ordinal, is_limit, parse_ordinal
from .tape import Tape


class OtmError(Exception):
    pass


class OtmSyntaxError(OtmError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line else msg)


class AlreadyHalted(OtmError):
    pass


@dataclass(frozen=True)
class Transition:
    write: tuple
    moves: str
    next_state: int


@dataclass(frozen=True)
class OtmProgram:
    state_count: int
    tape_count: int
    halt_state: int
    transitions: dict  # (state, read tuple) -> Transition
    start_state: int = 0
    name: str = ""

    def __post_init__(self):
        s, k = self.state_count, self.tape_count
        if s < 2 or k < 1:
            raise OtmError("need at least two states and one tape")
        if not 0 <= self.halt_state < s:
            raise OtmError("halt state out of range")
        for (st, read), tr in self.transitions.items():
            if st == self.halt_state:
                raise OtmError("halt state must have no transitions")
            if not 0 <= st < s or not 0 <= tr.next_state < s:
                raise OtmError(f"state out of range in {(st, read)}")
            if len(read) != k or len(tr.write) != k or len(tr.moves) != k:
                raise OtmError(f"tape count mismatch in {(st, read)}")
        for st in range(s):
            if st == self.halt_state:
                continue
            for read in _all_reads(k):
                if (st, read) not in self.transitions:
                    raise OtmError(f"missing transition for state {st} reading {read}")

    def __hash__(self):
        return hash((self.state_count, self.tape_count, self.halt_state,
                     tuple(sorted(self.transitions.items()))))


def _all_reads(k):
    if k == 0:
        return [()]
    return [r + (b,) for r in _all_reads(k - 1) for b in (0, 1)]


def parse_program(text: str, name: str = "") -> OtmProgram:
    header = {}
    trans = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" in line and "->" not in line:
            key, _, val = line.partition(":")
            key = key.strip()
            if key not in ("states", "tapes", "halt", "start", "name"):
                raise OtmSyntaxError(f"unknown header {key!r}", lineno)
            header[key] = val.strip()
            continue
        lhs, arrow, rhs = line.partition("->")
        if not arrow:
            raise OtmSyntaxError(f"expected '->' in {line!r}", lineno)
        left, right = lhs.split(), rhs.split()
        if len(left) != 2 or len(right) != 3:
            raise OtmSyntaxError("transition must be 'STATE READ -> WRITE MOVE NEXT'", lineno)
        try:
            st, nxt = int(left[0]), int(right[2])
        except ValueError:
            raise OtmSyntaxError("states must be integers", lineno) from None
        read, write, moves = left[1], right[0], right[1]
        if set(read) - {"0", "1"} or set(write) - {"0", "1"}:
            raise OtmSyntaxError("READ/WRITE must be bit strings", lineno)
        if set(moves) - {"L", "R"}:
            raise OtmSyntaxError("MOVE must be a string over {L,R}", lineno)
        key = (st, tuple(int(c) for c in read))
        if key in trans:
            raise OtmSyntaxError(f"duplicate transition {key}", lineno)
        trans[key] = Transition(tuple(int(c) for c in write), moves, nxt)
    for required in ("states", "halt"):
        if required not in header:
            raise OtmSyntaxError(f"missing header '{required}:'")
    try:
        return OtmProgram(int(header["states"]), int(header.get("tapes", "1")),
                          int(header["halt"]), trans, int(header.get("start", "0")),
                          header.get("name", name))
    except OtmError as e:
        raise OtmSyntaxError(str(e)) from None


def format_program(p: OtmProgram) -> str:
    lines = []
    if p.name:
        lines.append(f"name: {p.name}")
    lines += [f"states: {p.state_count}", f"tapes: {p.tape_count}", f"halt: {p.halt_state}"]
    if p.start_state:
        lines.append(f"start: {p.start_state}")
    for (st, read), tr in sorted(p.transitions.items()):
        r = "".join(map(str, read))
        w = "".join(map(str, tr.write))
        lines.append(f"{st} {r} -> {w} {tr.moves} {tr.next_state}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class OtmConfig:
    state: int
    heads: tuple
    tapes: tuple
    clock: Ordinal = ZERO

    def frame(self) -> Frame:
        return Frame((self.state,), self.tapes, self.heads)

    @classmethod
    def from_frame(cls, f: Frame, clock: Ordinal) -> "OtmConfig":
        return cls(f.scalars[0], f.heads, f.tapes, clock)

    def cell(self, p, tape: int = 0) -> int:
        return self.tapes[tape].get(Ordinal.of(p))


def initial_config(p: OtmProgram, inputs=None) -> OtmConfig:
    tapes = list(inputs or [])
    if isinstance(inputs, Tape):
        tapes = [inputs]
    tapes += [Tape(0)] * (p.tape_count - len(tapes))
    return OtmConfig(p.start_state, (ZERO,) * p.tape_count, tuple(tapes), ZERO)


def encode_input_ordinal(alpha: Ordinal) -> Tape:
    return Tape.interval(ZERO, Ordinal.of(alpha), 1, default=0)


def _move(h: Ordinal, m: str) -> Ordinal:
    if m == "R":
        return h.plus_finite(1)
    if h.offset() == 0:
        return ZERO
    return h.pred()


def step(p: OtmProgram, c: OtmConfig) -> OtmConfig:
    if c.state == p.halt_state:
        raise AlreadyHalted(f"state {c.state} is the halt state")
    read = tuple(t.get(h) for t, h in zip(c.tapes, c.heads))
    tr = p.transitions[(c.state, read)]
    tapes = tuple(t.set(h, w) for t, h, w in zip(c.tapes, c.heads, tr.write))
    heads = tuple(_move(h, m) for h, m in zip(c.heads, tr.moves))
    return OtmConfig(tr.next_state, heads, tapes, c.clock.plus_finite(1))


# limits --------------------------------------------------------------

@dataclass(frozen=True)
class LimitHistory:
    """Per-quantity summaries of a run cofinally below a limit."""

    state: object
    heads: tuple
    tapes: tuple  # liminf tapes


@dataclass
class Acceleration:
    start: Ordinal
    frames: list
    cert: Certificate

    def history(self) -> LimitHistory:
        lim = lasso.limit_frame(self.frames, self.cert)
        st = lasso.scalar_summary(self.frames, self.cert, 0, self.start)
        heads = tuple(lasso.head_summary(self.frames, self.cert, t, self.start)
                      for t in range(len(self.cert.shifts)))
        return LimitHistory(st, heads, lim.tapes)

    def cell_summary(self, p: Ordinal, tape: int = 0):
        return lasso.cell_summary(self.frames, self.cert, tape, p, self.start)


def _liminf(summary):
    if isinstance(summary, lasso.EventuallyConstant):
        return summary.value
    return summary.liminf


def limit_config(history: LimitHistory, lam: Ordinal) -> OtmConfig:
    if not is_limit(lam):
        raise ValueError(f"{lam} is not a limit")
    heads = []
    for h in history.heads:
        v = _liminf(h)
        heads.append(v if v <= lam else lam)
    return OtmConfig(_liminf(history.state), tuple(heads), tuple(history.tapes), lam)


def accelerate(p: OtmProgram, c: OtmConfig, lam: Ordinal, step_budget: int = 2000,
               max_period: int = 64) -> Acceleration:
    if not is_limit(lam):
        raise ValueError(f"{lam} is not a limit")
    start = c.clock
    frames = [c.frame()]
    for _ in range(step_budget):
        if c.state == p.halt_state:
            raise AccelerationFailure(f"machine halts at {c.clock}, before {lam}")
        c = step(p, c)
        frames.append(c.frame())
        cert = lasso.find_certificate(frames, max_period=max_period)
        if cert is not None:
            return Acceleration(start, frames, cert)
    raise AccelerationFailure(
        f"no cycle or translation certificate within {step_budget} steps from {start}")


# runs ----------------------------------------------------------------

class BoundReached(Exception):
    """Raised only on request; normally recorded in the report."""


@dataclass
class RunReport:
    program: OtmProgram
    halted: bool
    final: OtmConfig
    bound: Ordinal
    segments: list = field(default_factory=list)
    checkpoints: dict = field(default_factory=dict)

    @property
    def halt_time(self) -> Optional[Ordinal]:
        return self.final.clock if self.halted else None

    @property
    def status(self) -> str:
        return "halted" if self.halted else "bound-reached"

    def config_at(self, t: Ordinal) -> OtmConfig:
        t = Ordinal.of(t)
        if t > self.final.clock:
            raise ValueError(f"{t} is past the end of the run ({self.final.clock})")
        b, o = t.split()
        for seg in self.segments:
            if seg.start == b:
                return OtmConfig.from_frame(seg.frame(o), t)
        raise ValueError(f"no segment covers {t}")

    def trace_lines(self, max_explicit: Optional[int] = None) -> list:
        return trace_records(self)


def run(p: OtmProgram, inputs=None, bound: Ordinal = OMEGA * 2, checkpoints=(),
        step_budget: int = 2000, max_period: int = 64, max_blocks: int = 64) -> RunReport:
    bound = Ordinal.of(bound)
    c = initial_config(p, inputs)
    segments = []
    while True:
        seg = Segment(c.clock)
        segments.append(seg)
        if len(segments) > max_blocks:
            raise AccelerationFailure("bound requires limits of limits; not supported")
        seg.frames.append(c.frame())
        needs_limit = bound.block() != seg.start
        while True:
            if c.clock == bound or c.state == p.halt_state:
                return _finish(p, c.state == p.halt_state, c, bound, segments, checkpoints)
            if needs_limit and len(seg.frames) > step_budget:
                raise AccelerationFailure(
                    f"no cycle or translation certificate within {step_budget} steps from {seg.start}")
            c = step(p, c)
            seg.frames.append(c.frame())
            if needs_limit:
                cert = lasso.find_certificate(seg.frames, max_period=max_period)
                if cert is not None:
                    seg.cert = cert
                    break
        lam = seg.start + OMEGA
        if bound < lam:
            o = bound.offset()
            final = OtmConfig.from_frame(seg.frame(o), bound)
            return _finish(p, False, final, bound, segments, checkpoints)
        acc = Acceleration(seg.start, seg.frames, seg.cert)
        c = limit_config(acc.history(), lam)


def _finish(p, halted, final, bound, segments, checkpoints) -> RunReport:
    rep = RunReport(p, halted, final, bound, segments)
    for t in checkpoints:
        t = Ordinal.of(t)
        if t <= final.clock:
            rep.checkpoints[t] = rep.config_at(t)
    return rep


# trace format ----------------------------------------------------------

def _changes(prev: Optional[OtmConfig], cur: OtmConfig) -> str:
    out = []
    for ti, tape in enumerate(cur.tapes):
        tag = f"{ti}/" if len(cur.tapes) > 1 else ""
        if prev is None:
            old = Tape(tape.default)
        else:
            old = prev.tapes[ti]
        finite, infinite = old.diff(tape)
        for pos in finite:
            out.append(f"{tag}{format_ordinal(pos, True)}:{tape.get(pos)}")
        for b in infinite:
            seq = tape.block_seq(b)
            pre = "".join(map(str, seq.prefix))
            cyc = "".join(map(str, seq.cycle))
            out.append(f"{tag}{format_ordinal(b, True)}..:{pre}({cyc})")
    return ",".join(out)


def trace_record(cur: OtmConfig, prev: Optional[OtmConfig]) -> str:
    heads = ",".join(format_ordinal(h, True) for h in cur.heads)
    return (f"clock={format_ordinal(cur.clock, True)} state={cur.state} "
            f"heads={heads} changed={_changes(prev, cur)}")


def trace_records(rep: RunReport) -> list:
    """One record per explicitly simulated configuration, then the final one."""
    lines = []
    prev = None
    last_clock = None
    for seg in rep.segments:
        for i, f in enumerate(seg.frames):
            t = seg.start.plus_finite(i)
            if t > rep.final.clock:
                break
            cur = OtmConfig.from_frame(f, t)
            lines.append(trace_record(cur, prev))
            prev, last_clock = cur, t
    if last_clock != rep.final.clock:
        lines.append(trace_record(rep.final, prev))
    status = "halt" if rep.halted else "bound"
    lines.append(f"end={status} clock={format_ordinal(rep.final.clock, True)}")
    return lines


def parse_trace_record(line: str) -> dict:
    out = {}
    for part in line.split(" "):
        k, _, v = part.partition("=")
        out[k] = v
    if "clock" in out:
        out["clock"] = parse_ordinal(out["clock"])
    return out
