"""Sparse ordinal-indexed tapes.

A tape assigns a symbol to every ordinal position.  Positions are grouped
into omega-blocks ``[b, b + w)`` where ``b`` is zero or a limit; inside a
block the content is an eventually periodic sequence (:class:`PSeq`).  Blocks
that were never written fall back to a list of base intervals, which is how
``chi_alpha``-style inputs are stored exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Hashable, Optional

from .ordinal import ZERO, Ordinal


@dataclass(frozen=True)
class PSeq:
    """Eventually periodic sequence ``prefix + cycle + cycle + ...``."""

    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("cycle must be non-empty")

    @classmethod
    def make(cls, prefix, cycle) -> "PSeq":
        prefix, cycle = tuple(prefix), tuple(cycle)
        n = len(cycle)
        for p in range(1, n + 1):
            if n % p == 0 and cycle == cycle[:p] * (n // p):
                cycle = cycle[:p]
                break
        while prefix and prefix[-1] == cycle[-1]:
            cycle = (prefix[-1],) + cycle[:-1]
            prefix = prefix[:-1]
        return cls(prefix, cycle)

    @classmethod
    def const(cls, v) -> "PSeq":
        return cls((), (v,))

    def get(self, i: int):
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def head(self, n: int) -> list:
        return [self.get(i) for i in range(n)]

    def set(self, i: int, v) -> "PSeq":
        if self.get(i) == v:
            return self
        n = max(len(self.prefix), i + 1)
        vals = self.head(n)
        vals[i] = v
        return PSeq.make(vals, self._cycle_from(n))

    def _cycle_from(self, n: int) -> tuple:
        r = (n - len(self.prefix)) % len(self.cycle) if n >= len(self.prefix) else 0
        return self.cycle[r:] + self.cycle[:r]

    def drop(self, m: int) -> "PSeq":
        if m <= len(self.prefix):
            return PSeq.make(self.prefix[m:], self.cycle)
        return PSeq.make((), self._cycle_from(m))

    def concat_before(self, items) -> "PSeq":
        return PSeq.make(tuple(items) + self.prefix, self.cycle)

    @property
    def span(self) -> int:
        """Length after which the sequence is purely periodic."""
        return len(self.prefix)

    def is_constant_tail(self) -> bool:
        return len(self.cycle) == 1

    def diff(self, other: "PSeq"):
        """Offsets where the two sequences differ as ``(finite list, infinite?)``."""
        n = max(self.span, other.span)
        c = lcm(len(self.cycle), len(other.cycle))
        out = [i for i in range(n) if self.get(i) != other.get(i)]
        tail = [i for i in range(n, n + c) if self.get(i) != other.get(i)]
        return out, bool(tail)


def pointwise(fn, seqs) -> PSeq:
    n = max(s.span for s in seqs)
    c = 1
    for s in seqs:
        c = lcm(c, len(s.cycle))
    vals = [fn([s.get(i) for s in seqs]) for i in range(n + c)]
    return PSeq.make(vals[:n], vals[n:])


def _interval_block_seq(base, b: Ordinal, default) -> PSeq:
    pts = {}
    tail = default
    items = []
    for lo, hi, v in base:
        if hi <= b:
            continue
        lb, lo_off = lo.split()
        if lb > b:
            continue
        start = 0 if lb < b else lo_off
        hb, hi_off = hi.split()
        if hb > b:
            end = None
        else:
            end = hi_off
        items.append((start, end, v))
    if not items:
        return PSeq.const(default)
    n = max([s for s, _, _ in items] + [e for _, e, _ in items if e is not None])
    vals = [default] * n
    for s, e, v in items:
        if e is None:
            tail = v
            for i in range(s, n):
                vals[i] = v
        else:
            for i in range(s, e):
                vals[i] = v
    return PSeq.make(vals, (tail,))


class Tape:
    """Immutable sparse tape with value ``default`` wherever nothing is stored."""

    __slots__ = ("default", "base", "blocks", "_hash")

    def __init__(self, default=0, base=(), blocks=None):
        self.default = default
        self.base = tuple(base)
        cleaned = {}
        for b, seq in (blocks or {}).items():
            if seq != _interval_block_seq(self.base, b, default):
                cleaned[b] = seq
        self.blocks = cleaned
        self._hash = None

    @classmethod
    def interval(cls, lo: Ordinal, hi: Ordinal, value, default=0) -> "Tape":
        if hi <= lo:
            return cls(default)
        return cls(default, ((lo, hi, value),))

    def block_seq(self, b: Ordinal) -> PSeq:
        seq = self.blocks.get(b)
        if seq is not None:
            return seq
        return _interval_block_seq(self.base, b, self.default)

    def get(self, p: Ordinal):
        b, o = p.split()
        seq = self.blocks.get(b)
        if seq is not None:
            return seq.get(o)
        for lo, hi, v in self.base:
            if lo <= p < hi:
                return v
        return self.default

    def set(self, p: Ordinal, v) -> "Tape":
        b, o = p.split()
        seq = self.block_seq(b)
        new = seq.set(o, v)
        if new is seq:
            return self
        return self.with_block(b, new)

    def with_block(self, b: Ordinal, seq: PSeq) -> "Tape":
        blocks = dict(self.blocks)
        blocks[b] = seq
        return Tape(self.default, self.base, blocks)

    def interesting_blocks(self) -> list:
        """Blocks holding overrides or base-interval boundaries, sorted."""
        keys = set(self.blocks)
        for lo, hi, _ in self.base:
            keys.add(lo.block())
            keys.add(hi.block())
        return sorted(keys)

    def __eq__(self, other):
        if not isinstance(other, Tape):
            return NotImplemented
        return (self.default == other.default and self.base == other.base
                and self.blocks == other.blocks)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.default, self.base,
                               frozenset(self.blocks.items())))
        return self._hash

    def diff(self, other: "Tape"):
        """Changed positions as ``(list of ordinals, list of blocks changed infinitely)``."""
        finite, infinite = [], []
        keys = sorted(set(self.interesting_blocks()) | set(other.interesting_blocks()))
        for b in keys:
            offs, inf = self.block_seq(b).diff(other.block_seq(b))
            finite.extend(b.plus_finite(o) for o in offs)
            if inf:
                infinite.append(b)
        return finite, infinite

    def __repr__(self):
        return f"Tape(default={self.default!r}, base={self.base!r}, blocks={self.blocks!r})"


@dataclass(frozen=True)
class Memory:
    """A memory state: a tape read only below ``domain``."""

    tape: Tape
    domain: Ordinal

    def get(self, p: Ordinal) -> Optional[Hashable]:
        if p >= self.domain:
            return None
        return self.tape.get(p)

    def read(self, p: Ordinal, blank):
        v = self.get(p)
        return blank if v is None else v

    def block_seq(self, b: Ordinal) -> PSeq:
        return self.tape.block_seq(b)

    def blocks_in_domain(self) -> list:
        """Blocks that intersect the domain; requires domain < w^2."""
        d = self.domain
        if d.leading_exponent() >= 2:
            raise ValueError(f"domain {d} has infinitely many blocks")
        n_full = d.terms[0][1] if d.leading_exponent() == 1 else 0
        out = [Ordinal.omega_power(1, i) if i else ZERO for i in range(n_full)]
        if d.offset() and d.block() not in out:
            out.append(d.block())
        return out

    def same_as(self, other: "Memory") -> bool:
        """Equality of the readable content (tapes may differ past the domain)."""
        if self.domain != other.domain:
            return False
        d = self.domain
        for b in self.blocks_in_domain():
            if b == d.block():
                a, c = self.tape.block_seq(b), other.tape.block_seq(b)
                if any(a.get(i) != c.get(i) for i in range(d.offset())):
                    return False
            elif self.tape.block_seq(b) != other.tape.block_seq(b):
                return False
        return True

    def finite_items(self):
        """(place, symbol) pairs when the domain is finite."""
        n = self.domain.finite_value()
        return [(i, self.tape.get(Ordinal.of(i))) for i in range(n)]

    def preimage(self, sym) -> Optional[list]:
        """Places below the domain holding ``sym``, or None if there are infinitely many."""
        d = self.domain
        if d.is_finite:
            n = d.finite_value()
            seq = self.tape.block_seq(ZERO)
            return [Ordinal.of(i) for i in range(n) if seq.get(i) == sym]
        if d.leading_exponent() >= 2:
            return None
        out = []
        for b in self.blocks_in_domain():
            seq = self.tape.block_seq(b)
            if b < d.block():
                if sym in seq.cycle:
                    return None
                out.extend(b.plus_finite(i) for i in range(seq.span) if seq.get(i) == sym)
            else:
                out.extend(b.plus_finite(i) for i in range(d.offset()) if seq.get(i) == sym)
        return out
