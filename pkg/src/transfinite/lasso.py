"""Lasso certificates for omega-long runs.

A run inside one omega-block of time is a list of frames.  A certificate
``(n, q, shifts)`` states that from frame ``n`` on the run repeats with
period ``q``: tapes without a shift cycle exactly, a tape with a shift
``Shift(block, w0, k)`` moves its active region ``[block + w0, block + w)``
right by ``k`` places per period while everything below ``w0`` cycles.
From a certificate every later frame and the liminf frame at the end of the
block are computed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .ordinal import OMEGA, Ordinal
from .tape import PSeq, Tape, pointwise


class AccelerationFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class Frame:
    scalars: tuple
    tapes: tuple
    heads: tuple  # per tape: Ordinal or None

    def key(self):
        return (self.scalars, self.tapes, self.heads)


@dataclass(frozen=True)
class Shift:
    block: Ordinal
    w0: int
    k: int


@dataclass(frozen=True)
class Certificate:
    n: int
    q: int
    shifts: tuple  # per tape: Shift or None

    @property
    def kind(self) -> str:
        return "translation" if any(self.shifts) else "cycle"


# history summaries ----------------------------------------------------

@dataclass(frozen=True)
class EventuallyConstant:
    value: object
    since: Ordinal


@dataclass(frozen=True)
class Oscillating:
    values: frozenset
    liminf: object


@dataclass(frozen=True)
class Unbounded:
    """A head whose positions are cofinal in ``supremum``."""
    supremum: Ordinal

    @property
    def liminf(self):
        return self.supremum


def _activity(prev: Frame, cur: Frame, t: int):
    finite, infinite = prev.tapes[t].diff(cur.tapes[t])
    pos = list(finite)
    for h in (prev.heads[t], cur.heads[t]):
        if h is not None:
            pos.append(h)
    return pos, infinite


def find_certificate(frames: Sequence[Frame], *, max_period: int = 64,
                     min_start: int = 0,
                     min_offset: Callable[[Ordinal], int] = lambda b: 0,
                     max_shift: Optional[int] = None) -> Optional[Certificate]:
    """Look for a certificate whose second endpoint is the last frame."""
    j = len(frames) - 1
    last = frames[j]
    for q in range(1, min(max_period, j - min_start) + 1):
        n = j - q
        first = frames[n]
        if first.scalars != last.scalars:
            continue
        shifts = []
        ok = True
        for t in range(len(last.tapes)):
            if first.tapes[t] == last.tapes[t] and first.heads[t] == last.heads[t]:
                shifts.append(None)
                continue
            s = _try_shift(frames, n, q, t, min_offset, max_shift)
            if s is None:
                ok = False
                break
            shifts.append(s)
        if ok:
            return Certificate(n, q, tuple(shifts))
    return None


def _try_shift(frames, n, q, t, min_offset, max_shift) -> Optional[Shift]:
    first, last = frames[n], frames[n + q]
    h0, h1 = first.heads[t], last.heads[t]
    activity = []
    for i in range(n + 1, n + q + 1):
        pos, infinite = _activity(frames[i - 1], frames[i], t)
        if infinite:
            return None
        activity.extend(pos)
    if not activity:
        return None
    if h0 is not None:
        b, o0 = h0.split()
        b1, o1 = h1.split()
        if b1 != b or o1 <= o0:
            return None
        heads = [frames[i].heads[t] for i in range(n, n + q + 1)]
        if any(h.block() != b for h in heads):
            return None
        w0 = min(h.offset() for h in heads)
        ks = [o1 - o0]
    else:
        b = max(activity).block()
        d_fin, d_inf = first.tapes[t].diff(last.tapes[t])
        if d_inf:
            return None
        in_b = [p.offset() for p in d_fin if p.block() == b]
        if not in_b or any(p.block() != b for p in d_fin):
            return None
        w0 = min(in_b)
        limit = max_shift if max_shift is not None else q
        ks = range(1, limit + 1)
    if w0 < max(1, min_offset(b)):
        return None
    if h0 is None:
        # every activity below w0 must sit at places that agree at both ends
        for p in activity:
            if p.block() == b and p.offset() >= w0:
                continue
            if first.tapes[t].get(p) != last.tapes[t].get(p):
                return None
    else:
        if any(p.block() != b or p.offset() < w0 for p in activity):
            return None
    s0 = first.tapes[t].block_seq(b)
    s1 = last.tapes[t].block_seq(b)
    for k in ks:
        if s1.drop(w0 + k) != s0.drop(w0):
            continue
        if s1.head(w0) != s0.head(w0):
            continue
        if not _other_blocks_equal(first.tapes[t], last.tapes[t], b):
            continue
        return Shift(b, w0, k)
    return None


def _other_blocks_equal(a: Tape, b: Tape, skip: Ordinal) -> bool:
    keys = set(a.interesting_blocks()) | set(b.interesting_blocks())
    return all(a.block_seq(k) == b.block_seq(k) for k in keys if k != skip)


# expansion -----------------------------------------------------------

def frozen_pattern(frames, cert: Certificate, t: int) -> tuple:
    s = cert.shifts[t]
    seq = frames[cert.n + cert.q].tapes[t].block_seq(s.block)
    return tuple(seq.get(s.w0 + i) for i in range(s.k))


def frame_at(frames: Sequence[Frame], cert: Certificate, i: int) -> Frame:
    if i < len(frames):
        return frames[i]
    m, r = divmod(i - cert.n, cert.q)
    base = frames[cert.n + r]
    tapes = list(base.tapes)
    heads = list(base.heads)
    for t, s in enumerate(cert.shifts):
        if s is None:
            continue
        seq = base.tapes[t].block_seq(s.block)
        pat = frozen_pattern(frames, cert, t)
        new = seq.drop(s.w0).concat_before(seq.head(s.w0) + list(pat) * m)
        tapes[t] = base.tapes[t].with_block(s.block, new)
        if heads[t] is not None:
            heads[t] = heads[t].plus_finite(m * s.k)
    return Frame(base.scalars, tuple(tapes), tuple(heads))


def _min(values, key):
    return min(values, key=key) if key else min(values)


def limit_frame(frames: Sequence[Frame], cert: Certificate, key=None) -> Frame:
    """The liminf of the run at the end of its omega-block."""
    cyc = [frames[i] for i in range(cert.n, cert.n + cert.q)]
    scalars = tuple(_min([f.scalars[i] for f in cyc], key)
                    for i in range(len(cyc[0].scalars)))
    tapes, heads = [], []
    for t, s in enumerate(cert.shifts):
        tps = [f.tapes[t] for f in cyc]
        keys = set()
        for tp in tps:
            keys.update(tp.interesting_blocks())
        blocks = {}
        for b in keys:
            blocks[b] = pointwise(lambda vs: _min(vs, key), [tp.block_seq(b) for tp in tps])
        if s is not None:
            mins = blocks.get(s.block) or pointwise(
                lambda vs: _min(vs, key), [tp.block_seq(s.block) for tp in tps])
            blocks[s.block] = PSeq.make(mins.head(s.w0), frozen_pattern(frames, cert, t))
        tapes.append(Tape(tps[0].default, tps[0].base, blocks))
        hs = [f.heads[t] for f in cyc]
        if hs[0] is None:
            heads.append(None)
        elif s is not None:
            heads.append(s.block + OMEGA)
        else:
            heads.append(min(hs))
    return Frame(scalars, tuple(tapes), tuple(heads))


def cell_summary(frames, cert: Certificate, t: int, p: Ordinal, start: Ordinal, key=None):
    """History of one cell over the block of time beginning at ``start``."""
    s = cert.shifts[t]
    b, o = p.split()
    if s is not None and b == s.block and o >= s.w0:
        m = (o - s.w0) // s.k
        since = cert.n + cert.q * (m + 1)
        return EventuallyConstant(frame_at(frames, cert, since).tapes[t].get(p),
                                  start.plus_finite(since))
    vals = [frames[i].tapes[t].get(p) for i in range(cert.n, cert.n + cert.q)]
    if len(set(vals)) == 1:
        return EventuallyConstant(vals[0], start.plus_finite(cert.n))
    return Oscillating(frozenset(vals), _min(vals, key))


def scalar_summary(frames, cert: Certificate, idx: int, start: Ordinal, key=None):
    vals = [frames[i].scalars[idx] for i in range(cert.n, cert.n + cert.q)]
    if len(set(vals)) == 1:
        return EventuallyConstant(vals[0], start.plus_finite(cert.n))
    return Oscillating(frozenset(vals), _min(vals, key))


def head_summary(frames, cert: Certificate, t: int, start: Ordinal):
    s = cert.shifts[t]
    if s is not None:
        return Unbounded(s.block + OMEGA)
    vals = [frames[i].heads[t] for i in range(cert.n, cert.n + cert.q)]
    if len(set(vals)) == 1:
        return EventuallyConstant(vals[0], start.plus_finite(cert.n))
    return Oscillating(frozenset(vals), min(vals))


@dataclass
class Segment:
    """Frames of one omega-block of time, plus an optional certificate."""

    start: Ordinal
    frames: list = field(default_factory=list)
    cert: Optional[Certificate] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def frame(self, i: int) -> Frame:
        if i < len(self.frames):
            return self.frames[i]
        if self.cert is None:
            raise IndexError(i)
        f = self._cache.get(i)
        if f is None:
            f = frame_at(self.frames, self.cert, i)
            if len(self._cache) > 4096:
                self._cache.clear()
            self._cache[i] = f
        return f

    def known(self, i: int) -> bool:
        return i < len(self.frames) or self.cert is not None
