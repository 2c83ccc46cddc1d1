"""Cross-checks between a machine, its compiled IAM and the three-tape simulation."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from . import iam, otm
from .lasso import AccelerationFailure
from .bridge import (MalformedEncoding, compile_otm, configs_equal, decode_iam_state,
                     encoding_for, simulate_iam_on_tapes)
from .ordinal import OMEGA, ZERO, Ordinal, format_ordinal, parse_ordinal

DEFAULT_BOUND = parse_ordinal("w*2+50")


def time_grid(final: Ordinal, per_block: int = 64) -> list:
    """Every time up to ``final`` whose offset in its omega-block is below
    ``per_block``, plus every time of the last block."""
    out = []
    b = ZERO
    while b <= final:
        last = final.offset() if b == final.block() else per_block - 1
        out.extend(b.plus_finite(i) for i in range(last + 1))
        if b == final.block():
            break
        b = b + OMEGA
    return out


@dataclass
class Divergence:
    time: Ordinal
    side: str
    expected: object
    got: object

    def describe(self) -> str:
        return (f"divergence at machine time {format_ordinal(self.time)} ({self.side}):\n"
                f"  machine: {_cfg(self.expected)}\n  decoded: {_cfg(self.got)}")


def _cfg(c):
    if not isinstance(c, otm.OtmConfig):
        return repr(c)
    tape = c.tapes[0]
    blocks = tape.interesting_blocks() or [ZERO]
    cells = " ".join(f"{format_ordinal(b, True)}:{''.join(map(str, tape.block_seq(b).prefix))}"
                     f"({''.join(map(str, tape.block_seq(b).cycle))})" for b in blocks)
    return f"state={c.state} head={format_ordinal(c.heads[0], True)} cells={cells}"


@dataclass
class CrossCheckReport:
    program: str
    agreement: dict = field(default_factory=dict)  # machine time -> bool
    divergence: Optional[Divergence] = None
    halted: bool = False
    halt_time: Optional[Ordinal] = None
    iam_halt_time: Optional[Ordinal] = None
    limit_certified: dict = field(default_factory=dict)
    tape_agreement: Optional[bool] = None
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return (self.divergence is None and all(self.agreement.values())
                and self.tape_agreement is not False)

    def lines(self, canonical: bool = True) -> list:
        out = [f"program={self.program} ok={'yes' if self.ok else 'no'} "
               f"checkpoints={len(self.agreement)} "
               f"agree={sum(self.agreement.values())}"]
        if self.halted:
            out.append(f"halt machine={format_ordinal(self.halt_time, True)} "
                       f"iam={format_ordinal(self.iam_halt_time, True)}")
        if self.limit_certified:
            cert = all(self.limit_certified.values())
            out.append(f"limit-stages={len(self.limit_certified)} "
                       f"certified={'yes' if cert else 'no'}")
        if self.tape_agreement is not None:
            out.append(f"tape-transcript={'agree' if self.tape_agreement else 'differ'}")
        if self.divergence is not None:
            out.append(self.divergence.describe())
        if not canonical:
            out.append(f"wall={self.wall_time:.3f}s")
        return out


def crosscheck(p: otm.OtmProgram, alpha: Optional[Ordinal] = None, bound: Ordinal = DEFAULT_BOUND,
               checkpoints=None, compiled: Optional[iam.IamProgram] = None,
               tapes: bool = False, tape_bound: Optional[Ordinal] = None) -> CrossCheckReport:
    """Compare the machine with its compiled IAM at every checkpoint.

    Checkpoints are machine times; the IAM is read at the matching time
    ``1 + t``.  With ``tapes`` the three-tape simulation is run too (up to
    ``tape_bound``) and its decoded transcript compared with the IAM run.
    """
    t0 = time.perf_counter()
    bound = Ordinal.of(bound)
    enc = encoding_for(p)
    prog = compiled or compile_otm(p)
    inputs = [otm.encode_input_ordinal(alpha)] if alpha is not None else None
    orun = otm.run(p, inputs, bound=bound)
    rep = CrossCheckReport(p.name or "otm", halted=orun.halted, halt_time=orun.halt_time)
    last = orun.final.clock
    iam_bound = enc.iam_halt_time(last) if orun.halted else enc.iam_time(bound)
    failure = None
    try:
        irun = iam.run(prog, iam.IamRunOptions(input=alpha, bound=iam_bound))
    except (iam.IamError, AccelerationFailure) as e:
        # keep what was computed before the failure so earlier divergences still show
        failure = e
        at = getattr(e, "time", None)
        short = at.pred() if at is not None and at.offset() else ZERO
        irun = iam.run(prog, iam.IamRunOptions(input=alpha, bound=short))
    rep.iam_halt_time = irun.halt_time
    rep.limit_certified = {t: ok for t, ok in irun.certified.items() if t.offset() == 0}
    times = time_grid(last) if checkpoints is None else [Ordinal.of(t) for t in checkpoints]
    for t in times:
        if t > last:
            continue
        want = orun.config_at(t)
        tau = enc.iam_time(t)
        if tau > irun.final_time:
            rep.agreement[t] = False
            side = f"iam run failed: {failure}" if failure else "iam run ended early"
            rep.divergence = rep.divergence or Divergence(t, side, want, None)
            continue
        try:
            got = decode_iam_state(enc, irun.state_at(tau), tau)
        except MalformedEncoding as e:
            got = e
        same = isinstance(got, otm.OtmConfig) and configs_equal(got, want)
        rep.agreement[t] = same
        if not same and rep.divergence is None:
            rep.divergence = Divergence(t, "iam", want, got)
    if orun.halted and irun.halt_time != enc.iam_halt_time(last):
        rep.divergence = rep.divergence or Divergence(last, "halting", enc.iam_halt_time(last),
                                                      irun.halt_time)
    if failure is not None:
        rep.divergence = rep.divergence or Divergence(irun.final_time, f"iam run failed: {failure}",
                                                      None, None)
        rep.wall_time = time.perf_counter() - t0
        return rep
    if tapes:
        tb = Ordinal.of(tape_bound) if tape_bound is not None else iam_bound
        tb = min(tb, iam_bound)
        trun = simulate_iam_on_tapes(prog, iam.IamRunOptions(input=alpha, bound=tb))
        ref = irun if tb == iam_bound else iam.run(prog, iam.IamRunOptions(input=alpha, bound=tb))
        rep.tape_agreement = all(m.same_as(ref.state_at(t)) for t, m in trun.transcript())
    rep.wall_time = time.perf_counter() - t0
    return rep
