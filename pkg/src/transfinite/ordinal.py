"""Ordinals below omega^omega in Cantor normal form.

An ordinal is stored as a tuple of ``(exponent, coefficient)`` pairs with
strictly decreasing exponents and positive coefficients.  Because the tuple
is canonical, plain tuple comparison coincides with the ordinal order.
"""

from __future__ import annotations

import enum
import re
from typing import Iterator, Union


class OrdinalError(ValueError):
    pass


class OrdinalSyntaxError(OrdinalError):
    pass


class NotALimit(OrdinalError):
    pass


class NotFinite(OrdinalError):
    pass


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class Kind(enum.Enum):
    ZERO = "zero"
    SUCCESSOR = "successor"
    LIMIT = "limit"


class Ordinal:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms=()):
        terms = tuple((int(e), int(c)) for e, c in terms)
        prev = None
        for e, c in terms:
            if e < 0 or c <= 0:
                raise OrdinalError(f"bad CNF term {(e, c)}")
            if prev is not None and e >= prev:
                raise OrdinalError("exponents must strictly decrease")
            prev = e
        self.terms = terms
        self._hash = hash(terms)

    @classmethod
    def _raw(cls, terms):
        o = cls.__new__(cls)
        o.terms = terms
        o._hash = hash(terms)
        return o

    @classmethod
    def of(cls, n: Union[int, "Ordinal"]) -> "Ordinal":
        if isinstance(n, Ordinal):
            return n
        if n < 0:
            raise OrdinalError("negative ordinal")
        return cls._raw(((0, n),) if n else ())

    @classmethod
    def omega_power(cls, e: int, c: int = 1) -> "Ordinal":
        return cls._raw(((e, c),)) if c else ZERO

    # order -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Ordinal):
            return self.terms == other.terms
        if isinstance(other, int) and not isinstance(other, bool):
            return self.terms == (((0, other),) if other else ())
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.terms < Ordinal.of(other).terms

    def __le__(self, other):
        return self.terms <= Ordinal.of(other).terms

    def __gt__(self, other):
        return self.terms > Ordinal.of(other).terms

    def __ge__(self, other):
        return self.terms >= Ordinal.of(other).terms

    def __bool__(self):
        return bool(self.terms)

    # arithmetic ------------------------------------------------------
    def __add__(self, other):
        return add(self, Ordinal.of(other))

    def __radd__(self, other):
        return add(Ordinal.of(other), self)

    def __mul__(self, other):
        return mul(self, Ordinal.of(other))

    def __rmul__(self, other):
        return mul(Ordinal.of(other), self)

    # structure -------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    def finite_value(self) -> int:
        if not self.is_finite:
            raise NotFinite(str(self))
        return self.terms[0][1] if self.terms else 0

    def block(self) -> "Ordinal":
        """The largest limit (or zero) below or equal to self."""
        if self.terms and self.terms[-1][0] == 0:
            return Ordinal._raw(self.terms[:-1])
        return self

    def offset(self) -> int:
        """Finite part: ``self == self.block() + self.offset()``."""
        if self.terms and self.terms[-1][0] == 0:
            return self.terms[-1][1]
        return 0

    def split(self):
        return self.block(), self.offset()

    def leading_exponent(self) -> int:
        return self.terms[0][0] if self.terms else -1

    def pred(self) -> "Ordinal":
        if not self.terms or self.terms[-1][0] != 0:
            raise OrdinalError(f"{self} is not a successor")
        c = self.terms[-1][1]
        if c == 1:
            return Ordinal._raw(self.terms[:-1])
        return Ordinal._raw(self.terms[:-1] + ((0, c - 1),))

    def succ(self) -> "Ordinal":
        return self.plus_finite(1)

    def plus_finite(self, n: int) -> "Ordinal":
        """``self + n`` for a natural number ``n`` (fast path)."""
        if n == 0:
            return self
        if self.terms and self.terms[-1][0] == 0:
            return Ordinal._raw(self.terms[:-1] + ((0, self.terms[-1][1] + n),))
        return Ordinal._raw(self.terms + ((0, n),))

    def __repr__(self):
        return f"Ordinal({format_ordinal(self)!r})"

    def __str__(self):
        return format_ordinal(self)


ZERO = Ordinal._raw(())
ONE = Ordinal._raw(((0, 1),))
OMEGA = Ordinal._raw(((1, 1),))

OrdinalLike = Union[Ordinal, int]


def compare(a: Ordinal, b: Ordinal) -> Ordering:
    if a.terms == b.terms:
        return Ordering.EQUAL
    return Ordering.LESS if a.terms < b.terms else Ordering.GREATER


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    if not b.terms:
        return a
    if not a.terms:
        return b
    e0, c0 = b.terms[0]
    head = []
    for e, c in a.terms:
        if e > e0:
            head.append((e, c))
        elif e == e0:
            head.append((e, c + c0))
            return Ordinal._raw(tuple(head) + b.terms[1:])
        else:
            break
    return Ordinal._raw(tuple(head) + b.terms)


def subtract(a: Ordinal, b: Ordinal) -> Ordinal:
    """The unique ``d`` with ``b + d == a`` (left subtraction); needs ``b <= a``."""
    if b > a:
        raise OrdinalError(f"cannot subtract {b} from the smaller {a}")
    i = 0
    while i < len(b.terms) and a.terms[i] == b.terms[i]:
        i += 1
    if i == len(b.terms):
        return Ordinal._raw(a.terms[i:])
    (e, c), (e2, c2) = a.terms[i], b.terms[i]
    if e == e2:
        return Ordinal._raw(((e, c - c2),) + a.terms[i + 1:])
    return Ordinal._raw(a.terms[i:])


def mul(a: Ordinal, b: Ordinal) -> Ordinal:
    if not a.terms or not b.terms:
        return ZERO
    lead_e, lead_c = a.terms[0]
    out = ZERO
    for e, c in b.terms:
        if e > 0:
            piece = Ordinal._raw(((lead_e + e, c),))
        else:
            piece = Ordinal._raw(((lead_e, lead_c * c),) + a.terms[1:])
        out = add(out, piece)
    return out


def classify(a: Ordinal):
    """Return ``(Kind, predecessor-or-None)``."""
    if not a.terms:
        return Kind.ZERO, None
    if a.terms[-1][0] == 0:
        return Kind.SUCCESSOR, a.pred()
    return Kind.LIMIT, None


def is_limit(a: Ordinal) -> bool:
    return bool(a.terms) and a.terms[-1][0] > 0


def fundamental_sequence(l: Ordinal, n: int) -> Ordinal:
    if not is_limit(l):
        raise NotALimit(str(l))
    e, c = l.terms[-1]
    gamma = Ordinal._raw(l.terms[:-1])
    if c > 1:
        gamma = add(gamma, Ordinal._raw(((e, c - 1),)))
    return add(gamma, Ordinal.omega_power(e - 1, n))


def enumerate_below(a: Ordinal) -> Iterator[Ordinal]:
    n = a.finite_value()
    for i in range(n):
        yield Ordinal.of(i)


# text syntax -----------------------------------------------------------

_TERM = re.compile(r"^(?:w(?:\^(\d+))?(?:\*(\d+))?|(\d+))$")


def parse_ordinal(text: str) -> Ordinal:
    s = text.strip()
    if s == "0":
        return ZERO
    if not s:
        raise OrdinalSyntaxError("empty ordinal")
    terms = []
    for raw in s.split("+"):
        part = raw.strip()
        m = _TERM.match(part)
        if not m:
            raise OrdinalSyntaxError(f"bad ordinal term {part!r} in {text!r}")
        exp_s, coef_s, nat_s = m.groups()
        if nat_s is not None:
            if len(nat_s) > 1 and nat_s[0] == "0":
                raise OrdinalSyntaxError(f"leading zero in {part!r}")
            e, c = 0, int(nat_s)
        else:
            e = 1 if exp_s is None else int(exp_s)
            if exp_s is not None and e < 2:
                raise OrdinalSyntaxError(f"non-canonical exponent in {part!r}")
            c = 1 if coef_s is None else int(coef_s)
        if c == 0:
            raise OrdinalSyntaxError(f"zero coefficient in {part!r}")
        if terms and e >= terms[-1][0]:
            raise OrdinalSyntaxError(f"exponents not strictly decreasing in {text!r}")
        terms.append((e, c))
    return Ordinal._raw(tuple(terms))


def format_ordinal(a: Ordinal, compact: bool = False) -> str:
    if not a.terms:
        return "0"
    parts = []
    for e, c in a.terms:
        if e == 0:
            parts.append(str(c))
            continue
        base = "w" if e == 1 else f"w^{e}"
        parts.append(base if c == 1 else f"{base}*{c}")
    return ("+" if compact else " + ").join(parts)
