"""Finite descriptions of precomputations (computation histories).

Every precomputation answers ``memory(t)`` for ``t < length`` and exposes the
ordinals at which something happens (``anchors``); the evaluator builds its
limit-stage candidate sets from those.
"""

from __future__ import annotations

import bisect
import random
import re
from dataclasses import dataclass, field

from .lasso import Segment
from .lc_logic import Alphabet, LcSyntaxError
from .ordinal import OMEGA, ZERO, Ordinal, OrdinalSyntaxError, parse_ordinal
from .tape import Memory, PSeq, Tape


class Precomputation:
    alphabet: Alphabet
    length: Ordinal

    def memory(self, t: Ordinal) -> Memory:
        raise NotImplementedError

    def value(self, t: Ordinal, p: Ordinal):
        return self.memory(t).get(p)

    def domain(self, t: Ordinal) -> Ordinal:
        return self.memory(t).domain

    def anchors(self) -> set:
        return set()

    def place_anchors(self, p: Ordinal) -> set:
        return set()

    def max_period(self) -> int:
        return 1


def memory_from_list(values, blank) -> Memory:
    values = list(values)
    tape = Tape(blank, blocks={ZERO: PSeq.make(values, (blank,))})
    return Memory(tape, Ordinal.of(len(values)))


class ExplicitPrecomputation(Precomputation):
    """Finite history given state by state."""

    def __init__(self, alphabet: Alphabet, states):
        self.alphabet = alphabet
        self.states = [s if isinstance(s, Memory) else memory_from_list(s, alphabet.blank)
                       for s in states]
        self.length = Ordinal.of(len(self.states))

    def memory(self, t):
        return self.states[Ordinal.of(t).finite_value()]

    def anchors(self):
        return {Ordinal.of(i) for i in range(len(self.states))}

    @classmethod
    def random(cls, alphabet: Alphabet, n: int, rng: random.Random) -> "ExplicitPrecomputation":
        syms = list(alphabet.symbols)
        states = []
        for t in range(n):
            d = rng.randint(0, t)
            states.append([rng.choice(syms) for _ in range(d)])
        return cls(alphabet, states)


@dataclass(frozen=True)
class PlaceSummary:
    """History of one place from time ``since`` on: constant or cyclic."""

    since: Ordinal
    values: tuple

    @property
    def kind(self):
        return "const" if len(self.values) == 1 else "cycle"

    def at(self, t: Ordinal):
        d = t.offset() - self.since.offset() if t.block() == self.since.block() else t.offset()
        return self.values[d % len(self.values)]


class EventPrecomputation(Precomputation):
    """Per-place event lists plus optional periodic tails.

    ``value(t, p)`` is the last symbol written to ``p`` at a time ``<= t``, or
    the summary's value once ``t`` passes its start.  The domain at ``t`` is
    ``max(t, 1 + largest place written so far)``; unwritten places in the
    domain hold the blank (first) symbol.
    """

    def __init__(self, alphabet: Alphabet, length: Ordinal, events=(), summaries=None):
        self.alphabet = alphabet
        self.length = Ordinal.of(length)
        self.events = {}
        for t, p, s in sorted(events, key=lambda e: (e[1], e[0])):
            self.events.setdefault(Ordinal.of(p), []).append((Ordinal.of(t), s))
        self.summaries = {Ordinal.of(p): v for p, v in (summaries or {}).items()}
        used = [v for sm in self.summaries.values() for v in sm.values]
        for s in used + [s for ev in self.events.values() for _, s in ev]:
            if s not in alphabet.symbols:
                raise LcSyntaxError(f"symbol #{s} not in alphabet")
        firsts = [(ev[0][0], p) for p, ev in self.events.items()]
        firsts += [(s.since, p) for p, s in self.summaries.items()]
        firsts.sort()
        self._first_times = [t for t, _ in firsts]
        self._running_max = []
        m = None
        for _, p in firsts:
            m = p if m is None or p > m else m
            self._running_max.append(m)
        self._cache = {}

    def domain(self, t):
        t = Ordinal.of(t)
        i = bisect.bisect_right(self._first_times, t)
        if i == 0:
            return t
        return max(t, self._running_max[i - 1].plus_finite(1))

    def value(self, t, p):
        t, p = Ordinal.of(t), Ordinal.of(p)
        if p >= self.domain(t):
            return None
        return self._raw(t, p)

    def _raw(self, t, p):
        s = self.summaries.get(p)
        if s is not None and t >= s.since:
            return s.at(t)
        ev = self.events.get(p)
        if ev:
            i = bisect.bisect_right(ev, (t, "￿"))
            if i:
                return ev[i - 1][1]
        return self.alphabet.blank

    def memory(self, t):
        t = Ordinal.of(t)
        m = self._cache.get(t)
        if m is None:
            tape = Tape(self.alphabet.blank)
            for p in set(self.events) | set(self.summaries):
                tape = tape.set(p, self._raw(t, p))
            m = self._cache[t] = Memory(tape, self.domain(t))
        return m

    def anchors(self):
        out = set()
        for p, ev in self.events.items():
            out.add(p)
            for t, _ in ev:
                out.add(t)
                out.add(t.plus_finite(1))
        for p, s in self.summaries.items():
            out.add(p)
            out.add(s.since)
        return out

    def place_anchors(self, p):
        out = {t for t, _ in self.events.get(p, ())}
        if p in self.summaries:
            out.add(self.summaries[p].since)
        return out

    def max_period(self):
        return max((len(s.values) for s in self.summaries.values()), default=1)

    @classmethod
    def from_history(cls, alphabet, place, prefix, cycle, block=ZERO):
        """One place whose history over ``[block, block + w)`` is ``prefix`` then ``cycle`` forever."""
        events = [(block.plus_finite(i), place, v) for i, v in enumerate(prefix)]
        summ = {place: PlaceSummary(block.plus_finite(len(prefix)), tuple(cycle))}
        return cls(alphabet, block + OMEGA, events, summ)

    @classmethod
    def random(cls, alphabet, rng: random.Random, places=6, max_pre=20, max_period=6):
        syms = list(alphabet.symbols)
        events, summ = [], {}
        for p in range(places):
            pre = rng.randint(0, max_pre)
            events += [(t, p, rng.choice(syms)) for t in range(pre)]
            cyc = tuple(rng.choice(syms) for _ in range(rng.randint(1, max_period)))
            summ[p] = PlaceSummary(Ordinal.of(pre), cyc)
        return cls(alphabet, OMEGA, events, summ)

    def format(self) -> str:
        from .ordinal import format_ordinal
        lines = [f"alphabet: {self.alphabet.format()}", f"length: {format_ordinal(self.length)}"]
        for p in sorted(self.events):
            for t, s in self.events[p]:
                lines.append(f"t={format_ordinal(t, compact=True)} "
                             f"place={format_ordinal(p, compact=True)} sym=#{s}")
        for p in sorted(self.summaries):
            s = self.summaries[p]
            head = f"summary place={format_ordinal(p, compact=True)} kind={s.kind} " \
                   f"since={format_ordinal(s.since, compact=True)}"
            if s.kind == "const":
                lines.append(f"{head} sym=#{s.values[0]}")
            else:
                lines.append(f"{head} syms=" + ",".join("#" + v for v in s.values))
        return "\n".join(lines) + "\n"


_KV = re.compile(r"(\w+)=(\S+)")


def parse_precomputation(text: str) -> EventPrecomputation:
    """Read the event-list format (see :meth:`EventPrecomputation.format`)."""
    alphabet = length = None
    events, summ = [], {}

    def ordv(s, line):
        try:
            return parse_ordinal(s)
        except OrdinalSyntaxError as e:
            raise LcSyntaxError(f"line {line}: {e}") from None

    def symv(s, line):
        if not s.startswith("#"):
            raise LcSyntaxError(f"line {line}: symbol must look like #k, got {s!r}")
        return s[1:]

    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%")[0].strip()
        if not line or line.startswith("//"):
            continue
        if line.startswith("alphabet:"):
            alphabet = Alphabet.parse(line[len("alphabet:"):])
            continue
        if line.startswith("length:"):
            length = ordv(line[len("length:"):].strip(), no)
            continue
        kv = dict(_KV.findall(line))
        if line.startswith("summary"):
            p = ordv(kv.get("place", ""), no)
            since = ordv(kv.get("since", "0"), no)
            kind = kv.get("kind")
            if kind == "const":
                vals = (symv(kv.get("sym", ""), no),)
            elif kind == "cycle":
                vals = tuple(symv(v, no) for v in kv.get("syms", "").split(","))
            else:
                raise LcSyntaxError(f"line {no}: summary kind must be const or cycle")
            summ[p] = PlaceSummary(since, vals)
            continue
        if not {"t", "place", "sym"} <= set(kv):
            raise LcSyntaxError(f"line {no}: expected t=... place=... sym=#k")
        events.append((ordv(kv["t"], no), ordv(kv["place"], no), symv(kv["sym"], no)))
    if alphabet is None or length is None:
        raise LcSyntaxError("precomputation needs 'alphabet:' and 'length:' headers")
    return EventPrecomputation(alphabet, length, events, summ)


class RunPrecomputation(Precomputation):
    """History of an IAM run: one lasso segment per omega-block of time.

    ``segments`` maps a block start to a :class:`Segment` whose frames hold the
    memory tape; ``domain_of`` gives the domain of the state at a time.  The
    run owner appends frames and raises ``length`` as it goes.
    """

    def __init__(self, alphabet, domain_of):
        self.alphabet = alphabet
        self.domain_of = domain_of
        self.segments = {}
        self.length = ZERO
        self._anchor_cache = None
        self._place_cache = {}

    def touch(self, length):
        self.length = length
        self._anchor_cache = None
        self._place_cache = {}

    def segment(self, b):
        return self.segments[b]

    def tape(self, t: Ordinal) -> Tape:
        b, o = t.split()
        return self.segments[b].frame(o).tapes[0]

    def memory(self, t):
        t = Ordinal.of(t)
        return Memory(self.tape(t), self.domain_of(t))

    def value(self, t, p):
        if p >= self.domain_of(t):
            return None
        return self.tape(t).get(p)

    def times(self):
        """Explicitly recorded times, in order."""
        for b in sorted(self.segments):
            seg = self.segments[b]
            for i in range(len(seg.frames)):
                t = b.plus_finite(i)
                if t < self.length:
                    yield t

    def anchors(self):
        if self._anchor_cache is not None:
            return self._anchor_cache
        out = {ZERO}
        for b, seg in self.segments.items():
            out.add(b)
            nf = len(seg.frames)
            out.add(b.plus_finite(max(nf - 1, 0)))
            if seg.cert is not None:
                c = seg.cert
                for j in range(3):
                    out.add(b.plus_finite(c.n + j * c.q))
                for sh in c.shifts:
                    if sh is not None:
                        out.add(sh.block.plus_finite(sh.w0))
                        out.add(sh.block.plus_finite(sh.w0 + sh.k))
            last = seg.frames[-1].tapes[0] if seg.frames else None
            if last is not None:
                for blk in last.interesting_blocks():
                    out.add(blk)
                    out.add(blk.plus_finite(last.block_seq(blk).span))
                for lo, hi, _ in last.base:
                    out.add(lo)
                    out.add(hi)
        self._anchor_cache = {a for a in out if a <= self.length or a.is_finite}
        return self._anchor_cache

    def place_anchors(self, p):
        hit = self._place_cache.get(p)
        if hit is not None:
            return hit
        out = set()
        for b, seg in self.segments.items():
            prev = None
            for i, fr in enumerate(seg.frames):
                v = fr.tapes[0].get(p)
                if i and v != prev:
                    out.add(b.plus_finite(i))
                prev = v
            c = seg.cert
            if c is not None:
                for sh in c.shifts:
                    if sh is not None and p.block() == sh.block and p.offset() >= sh.w0:
                        j = (p.offset() - sh.w0) // sh.k + 1
                        out.add(b.plus_finite(c.n + c.q * j))
                        out.add(b.plus_finite(c.n + c.q * (j + 1)))
        self._place_cache[p] = out
        return out

    def max_period(self):
        m = 1
        for seg in self.segments.values():
            if seg.cert is not None:
                m = max(m, seg.cert.q, *[sh.k for sh in seg.cert.shifts if sh is not None])
        return m
