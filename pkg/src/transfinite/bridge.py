"""Both simulation directions between ordinal Turing machines and IAMs.

OTM -> IAM: :func:`compile_otm` writes a formula whose run mirrors a
single-tape machine step for step.  Layout of an IAM state at time ``1 + t``
(the machine's configuration at time ``t``):

* place 0 holds the state code ``c + 1``;
* cell ``i`` sits at place ``i + 1`` for finite ``i`` and at place ``i``
  otherwise;
* a cell under the head holds ``2`` (bit 0) or ``3`` (bit 1), other cells
  hold their bit.

Time 1 translates the raw input; when the machine is in its halt state the
next step writes ``H`` at place 0 and replaces the tape ``chi_f`` by a single
mark at place ``f + 1``.

IAM -> OTM: :func:`simulate_iam_on_tapes` runs the three-tape procedure that
keeps the block-coded state history on tape 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import iam as iam_mod
from .iam import IamProgram, IamRunOptions, TIME, PLACE, SYMBOL
from .lc_logic import (HALT, Alphabet, And, CAtom, Eq, Exists, Forall, Implies, Le, Not, OrdConst,
                       Or, SymConst, Var, conj, disj, format_formula, parse_formula,
                       PHI_LIM_TEXT, SUCC_TEXT, register_certified, substitute,
                       symbol_order_sugar)
from .ordinal import OMEGA, ONE, ZERO, Ordinal, format_ordinal, subtract
from .otm import OtmConfig, OtmProgram
from .tape import Memory, PSeq, Tape


class BridgeError(Exception):
    pass


class UnsupportedProgram(BridgeError):
    pass


class MalformedEncoding(BridgeError):
    pass


class MalformedBlock(BridgeError):
    pass


class TranscriptOverflow(BridgeError):
    pass


# formula building blocks -------------------------------------------

def build_phi_lim():
    """True at time tau iff tau is a limit (or 0, vacuously)."""
    return parse_formula(PHI_LIM_TEXT)


def build_succ():
    """``alpha = beta + 1`` in the free variables ``alpha`` and ``beta``."""
    return parse_formula(SUCC_TEXT)


def build_phi_liminf(alphabet: Alphabet):
    """``b`` is the liminf of the history of place ``a``, in free variables ``a``, ``b``."""
    a, b, x, z = Var("a"), Var("b"), Var("x"), Var("z")
    sle = symbol_order_sugar(alphabet, b, ("C", z, a))
    phi = And((Exists("x", Forall("z", Implies(Le(x, z), sle))),
               Forall("x", Exists("z", And((Le(x, z), CAtom(z, a, b)))))))
    register_certified(phi)
    return phi


def succ(a, b):
    return substitute(build_succ(), {"alpha": a, "beta": b})


# compiler ----------------------------------------------------------------

@dataclass(frozen=True)
class CompiledEncoding:
    source: OtmProgram
    alphabet: Alphabet
    state_codes: int  # s: codes 1..s are available
    head_zero: str = "2"
    head_one: str = "3"
    time_offset: int = 1  # IAM time 1 + t mirrors machine time t
    halt_offset: int = 1  # H appears one step after the halt state is entered

    def iam_time(self, t: Ordinal) -> Ordinal:
        return ONE + Ordinal.of(t)

    def otm_time(self, tau: Ordinal) -> Ordinal:
        tau = Ordinal.of(tau)
        if tau == ZERO:
            raise ValueError("IAM time 0 holds the raw input")
        return tau.pred() if tau.is_finite else tau

    def iam_halt_time(self, otm_halt: Ordinal) -> Ordinal:
        return self.iam_time(otm_halt).plus_finite(self.halt_offset)

    def sidecar(self) -> str:
        lines = [
            f"source={self.source.name or 'otm'}",
            f"alphabet={self.alphabet.format()}",
            "place.state=0",
            "place.cell.finite=i+1",
            "place.cell.infinite=i",
            f"mark.head0=#{self.head_zero}",
            f"mark.head1=#{self.head_one}",
            f"state.code=c+1 (1..{self.state_codes})",
            f"time.offset={self.time_offset}",
            f"halt.offset={self.halt_offset}",
            "semantics=blank-default",
            "slack=1",
        ]
        return "\n".join(lines) + "\n"


def _sym(k) -> SymConst:
    return SymConst(str(k))


def _c(t, p, k):
    return CAtom(t, p, _sym(k) if not isinstance(k, SymConst) else k)


def _bit1(t, p):
    return Or((_c(t, p, 1), _c(t, p, 3)))


def _finite(y):
    return Not(Le(OrdConst(OMEGA), y))


def _lt(a, b):
    return And((Le(a, b), Not(Eq(a, b))))


def _cell_symbol(bit1, mark, z):
    def pick(hi, lo):
        return disj(conj(bit1, Eq(z, _sym(hi))), conj(Not(bit1), Eq(z, _sym(lo))))
    return disj(conj(mark, pick(3, 2)), conj(Not(mark), pick(1, 0)))


def _marked(t, p):
    # place 0 holds the state code, which may coincide with a mark symbol
    return And((Or((_c(t, p, 2), _c(t, p, 3))), Not(Eq(p, OrdConst(ZERO)))))


def compile_otm(p: OtmProgram) -> IamProgram:
    if p.tape_count != 1:
        raise UnsupportedProgram("only single-tape machines can be compiled")
    A = encoding_for(p).alphabet
    x, y, z = Var(TIME), Var(PLACE), Var(SYMBOL)
    g, h, u, v, w = Var("g"), Var("h"), Var("u"), Var("v"), Var("w")
    zero, one = OrdConst(ZERO), OrdConst(ONE)
    is0 = Eq(y, zero)

    def succ_t(a, b):
        # succ is only reliable while b + 1 < tau; the time itself covers b + 1 = tau
        return And((succ(a, b), Implies(_lt(b, x), Le(a, x))))

    # time 1: translate chi_alpha.  Places past the input read as H (the
    # first symbol), so for finite y >= 1 cell y - 1 is 1 iff y <= alpha.
    raw_bit = Or((And((_finite(y), Or((_c(zero, y, 0), _c(zero, y, 1))))),
                  And((Not(_finite(y)), _c(zero, y, 1)))))
    init = Or((And((is0, Eq(z, _sym(p.start_state + 1)))),
               And((Not(is0), _cell_symbol(raw_bit, Eq(y, one), z)))))

    # limits
    liminf = substitute(build_phi_liminf(A), {"a": zero, "b": z})
    lim_head = And((
        Le(y, x),  # the head never runs ahead of the clock
        Forall("w", Implies(_lt(w, y), Exists("u", Forall("v", Implies(
            Le(u, v), Exists("h", And((_marked(v, h), _lt(w, h))))))))),
        Forall("u", Exists("v", And((Le(u, v), Exists("h", And((_marked(v, h), Le(h, y)))))))),
    ))
    lim_bit = Exists("u", Forall("v", Implies(Le(u, v), _bit1(v, y))))
    limit = Or((And((is0, liminf)), And((Not(is0), _cell_symbol(lim_bit, lim_head, z)))))
    phi_lim = parse_formula("A u. E v. (u <= v & !(u = v))")

    # successor steps
    cases = []
    for (st, read), tr in sorted(p.transitions.items()):
        b = read[0]
        wbit, move, nxt = tr.write[0], tr.moves[0], tr.next_state
        if move == "R":
            new_head = succ_t(y, h)
        else:
            is_lim_h = And((Not(Exists("u", succ(h, u))), Not(Eq(h, zero))))
            new_head = Or((And((Eq(y, one), Or((Eq(h, one), is_lim_h)))),
                           And((Not(Eq(h, one)), succ_t(h, y)))))
        if wbit:
            bit = Or((Eq(y, h), And((Not(Eq(y, h)), _bit1(g, y)))))
        else:
            bit = And((Not(Eq(y, h)), _bit1(g, y)))
        out = Or((And((is0, Eq(z, _sym(nxt + 1)))),
                  And((Not(is0), _cell_symbol(bit, new_head, z)))))
        cases.append(And((_c(g, zero, st + 1), Exists("h", And((_c(g, h, 2 + b), Not(Eq(h, zero)), out))))))
    # halt state: H at place 0, output mark after the chi_f prefix
    def first_zero(q):
        return And((Not(Eq(q, zero)), Not(_bit1(g, q)),
                    Forall("w", Implies(And((_lt(w, q), Not(Eq(w, zero)))), _bit1(g, w)))))
    out_place = Or((And((_finite(y), first_zero(y))),
                    Exists("u", And((succ_t(y, u), Not(_finite(u)), first_zero(u))))))
    halted = And((_c(g, zero, p.halt_state + 1),
                  Or((And((is0, Eq(z, SymConst(HALT)))),
                      And((Not(is0), Or((And((out_place, Eq(z, _sym(1)))),
                                         And((Not(out_place), Eq(z, _sym(0))))))))))))
    known = Or(tuple(_c(g, zero, c + 1) for c in range(p.state_count)))
    step = Exists("g", And((succ_t(x, g), Or(tuple(cases) + (halted, And((Not(known), Eq(z, _sym(0))))))
                            )))
    not01 = And((Not(Eq(x, zero)), Not(Eq(x, one))))
    phi = Or((
        And((Eq(x, zero), Eq(z, _sym(0)))),
        And((Eq(x, one), init)),
        And((not01, phi_lim, limit)),
        And((not01, Not(phi_lim), step)),
    ))
    register_certified(phi)
    return IamProgram(phi, A, (), "blank-default", 1, True, True, p.name)


def encoding_for(p: OtmProgram) -> CompiledEncoding:
    s = max(3, p.state_count)
    # H comes first so that places outside a state's domain read as H, not as a bit
    A = Alphabet((HALT,) + tuple(str(i) for i in range(s + 1)))
    return CompiledEncoding(p, A, s)


_BIT = {"0": 0, "2": 0, "1": 1, "3": 1}


def _bit_of(v):
    try:
        return _BIT[v]
    except KeyError:
        raise MalformedEncoding(f"cell symbol #{v} is not a bit or head mark") from None


def _bits_seq(seq: PSeq) -> PSeq:
    return PSeq.make([_bit_of(v) for v in seq.prefix], [_bit_of(v) for v in seq.cycle])


def decode_iam_state(e: CompiledEncoding, m: Memory, clock: Optional[Ordinal] = None) -> OtmConfig:
    """Machine configuration represented by an IAM state of the compiled program.

    ``clock`` is the IAM time of ``m``; the result carries the matching machine time.
    """
    code = m.get(ZERO)
    if code is None or not code.isdigit() or not 1 <= int(code) <= e.source.state_count:
        raise MalformedEncoding(f"place 0 holds {code!r}, not a state code")
    marks = []
    for sym in (e.head_zero, e.head_one):
        pre = m.preimage(sym)
        if pre is None:
            raise MalformedEncoding("infinitely many head marks")
        marks += pre
    if ZERO in marks:
        marks.remove(ZERO)
    if len(marks) != 1:
        raise MalformedEncoding(f"expected one head mark, found {len(marks)}")
    hp = marks[0]
    head = hp.pred() if hp.is_finite else hp
    blocks = {}
    for b in m.blocks_in_domain():
        seq = m.tape.block_seq(b)
        if b == m.domain.block():
            vals = seq.head(m.domain.offset())
            seq = PSeq.make(vals, ("0",))
        if b == ZERO:
            seq = seq.drop(1)
        blocks[b] = _bits_seq(seq)
    tape = Tape(0, blocks=blocks)
    if clock is None:
        clock = ZERO
    else:
        clock = e.otm_time(clock)
    return OtmConfig(int(code) - 1, (head,), (tape,), clock)


def configs_equal(a: OtmConfig, b: OtmConfig) -> bool:
    if a.state != b.state or a.heads != b.heads or len(a.tapes) != len(b.tapes):
        return False
    for ta, tb in zip(a.tapes, b.tapes):
        fin, inf = ta.diff(tb)
        if fin or inf:
            return False
    return True


# block codes and the three-tape simulation ------------------------------------

class BlockCode:
    """Symbol number ``i`` (1-based, in alphabet order) as ``n - i`` zeros then ``i`` ones."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.n = len(alphabet)
        self._enc = {s: (0,) * (self.n - i - 1) + (1,) * (i + 1)
                     for i, s in enumerate(alphabet.symbols)}
        self.separator = (1,) * self.n + (0,) * self.n

    def encode_symbol(self, s) -> tuple:
        return self._enc[s]

    def decode_block(self, bits) -> str:
        bits = tuple(bits)
        if len(bits) != self.n:
            raise MalformedBlock(f"block of length {len(bits)}, expected {self.n}")
        ones = sum(bits)
        if ones == 0 or bits != (0,) * (self.n - ones) + (1,) * ones:
            raise MalformedBlock(f"not a symbol block: {''.join(map(str, bits))}")
        return self.alphabet.symbols[ones - 1]

    def encode(self, word) -> list:
        return [b for s in word for b in self._enc[s]]

    def decode(self, bits) -> list:
        bits = list(bits)
        if len(bits) % self.n:
            raise MalformedBlock(f"length {len(bits)} is not a multiple of {self.n}")
        return [self.decode_block(bits[i:i + self.n]) for i in range(0, len(bits), self.n)]

    def encode_pseq(self, seq: PSeq) -> PSeq:
        return PSeq(tuple(self.encode(seq.prefix)), tuple(self.encode(seq.cycle)))

    def decode_pseq(self, bits: PSeq) -> PSeq:
        n = self.n
        pre = len(bits.prefix) + (-len(bits.prefix)) % n
        cyc = len(bits.cycle)
        while cyc % n:
            cyc += len(bits.cycle)
        return PSeq.make(self.decode(bits.head(pre)), self.decode([bits.get(pre + i) for i in range(cyc)]))


def block_encode(alphabet: Alphabet) -> BlockCode:
    return BlockCode(alphabet)


def block_decode(code: BlockCode, bits) -> list:
    return code.decode(bits)


class RecordTape:
    """Tape 1: the block-coded states ``s_0, s_1, ...`` each followed by the separator.

    Record ``t`` starts at the ordinal sum of the earlier record lengths;
    its place ``p`` occupies bits ``n*p .. n*p + n - 1`` of the record.
    """

    def __init__(self, history, code: BlockCode, max_exponent: int = 32):
        self.h = history
        self.code = code
        self.n = code.n
        self.max_exponent = max_exponent
        self._start = {ZERO: ZERO}

    def domain(self, t: Ordinal) -> Ordinal:
        return self.h.domain_of(t)

    def length(self, t: Ordinal) -> Ordinal:
        return Ordinal.of(self.n) * self.domain(t) + Ordinal.of(2 * self.n)

    def start(self, t: Ordinal) -> Ordinal:
        hit = self._start.get(t)
        if hit is not None:
            return hit
        b, o = t.split()
        if o == 0:
            e, c = b.terms[-1]
            if e != 1:
                raise TranscriptOverflow(f"record start at {t} needs a limit of limits")
            prev = Ordinal._raw(b.terms[:-1] + (((1, c - 1),) if c > 1 else ()))
            far = self.domain(prev.plus_finite(10 ** 9))
            exp = far.leading_exponent() + 1
            if exp > self.max_exponent:
                raise TranscriptOverflow("tape 1 would grow past the supported ordinal range")
            s = self.start(prev) + Ordinal.omega_power(exp)
        else:
            i = o - 1
            while i > 0 and b.plus_finite(i) not in self._start:
                i -= 1
            s = self.start(b.plus_finite(i))
            for k in range(i, o):
                s = s + self.length(b.plus_finite(k))
                self._start[b.plus_finite(k + 1)] = s
        self._start[t] = s
        return s

    def local_bit(self, t: Ordinal, d: Ordinal) -> int:
        n = self.n
        dom = self.domain(t)
        lam, r = d.split()
        p = lam.plus_finite(r // n)
        if p < dom:
            return self.code.encode_symbol(self.h.stored(t, p))[r % n]
        k = subtract(d, Ordinal.of(n) * dom)
        if not k.is_finite or k.finite_value() >= 2 * n:
            raise IndexError(f"offset {d} is past record {t}")
        return self.code.separator[k.finite_value()]

    def bit_at(self, pos: Ordinal, t: Ordinal) -> int:
        """Bit at position ``pos``, which must lie in record ``t``."""
        return self.local_bit(t, subtract(pos, self.start(t)))

    def read_block(self, t: Ordinal, p: Ordinal) -> tuple:
        base = self.start(t) + Ordinal.of(self.n) * p
        return tuple(self.bit_at(base.plus_finite(j), t) for j in range(self.n))

    def decode_record(self, t: Ordinal) -> Memory:
        dom = self.domain(t)
        blank = self.code.alphabet.blank
        blocks = {}
        if dom.is_finite:
            word = [self.code.decode_block(self.read_block(t, Ordinal.of(i)))
                    for i in range(dom.finite_value())]
            if self.read_block(t, dom) != self.code.separator[:self.n]:
                raise MalformedBlock(f"record {t} lacks its separator")
            blocks[ZERO] = PSeq.make(word, (blank,))
        else:
            for b in Memory(Tape(blank), dom).blocks_in_domain():
                if b == dom.block():
                    word = [self.code.decode_block(self.read_block(t, b.plus_finite(i)))
                            for i in range(dom.offset())]
                    blocks[b] = PSeq.make(word, (blank,))
                else:
                    bits = self.code.encode_pseq(self.h.tape(t).block_seq(b))
                    blocks[b] = self.code.decode_pseq(bits)
        return Memory(Tape(blank, blocks=blocks), dom)

    def records(self, upto: Ordinal) -> list:
        """(time, decoded state) for every explicitly stored record up to ``upto``."""
        return [(t, self.decode_record(t)) for t in self.h.times() if t <= upto]


class TapePrecomputation(iam_mod.RunPrecomputation):
    """History whose reads go through the block-coded tape 1."""

    def __init__(self, alphabet, domain_of, code: Optional[BlockCode] = None):
        super().__init__(alphabet, domain_of)
        self.code = code or BlockCode(alphabet)
        self.t1 = RecordTape(self, self.code)
        self._mem = {}

    def stored(self, t, p):
        return super().tape(t).get(p)

    def value(self, t, p):
        if p >= self.t1.domain(t):
            return None
        return self.code.decode_block(self.t1.read_block(t, p))

    def memory(self, t):
        t = Ordinal.of(t)
        m = self._mem.get(t)
        if m is None:
            m = self._mem[t] = self.t1.decode_record(t)
        return m


class TapeStage(iam_mod._Stage):
    """Per-place evaluation that keeps truth bits on tape 3 and the chosen
    block on tape 2, as the three-tape procedure does."""

    evaluations = 0

    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        self.tape2 = {}
        self.tape3 = []

    def symbol_at(self, y):
        env = {TIME: self.tau, PLACE: y}
        self.tape3 = []
        for s in self.p.alphabet.symbols:
            env[SYMBOL] = s
            self.tape3.append(1 if self.ev.truth(self.p.formula, env) else 0)
        TapeStage.evaluations += len(self.tape3)
        hits = [s for s, bit in zip(self.p.alphabet.symbols, self.tape3) if bit]
        if len(hits) != 1:
            raise iam_mod.ProgramNotFunctional(y, self.tau, hits)
        self.tape2[y] = self.F.code.encode_symbol(hits[0])
        return hits[0]


@dataclass
class TapeRun:
    report: iam_mod.RunReport
    code: BlockCode
    evaluations: int

    @property
    def t1(self) -> RecordTape:
        return self.report.history.t1

    def transcript(self) -> list:
        """Decoded tape-1 records; empty when no step was taken."""
        if self.report.final_time == ZERO:
            return []
        return self.t1.records(self.report.final_time)


def simulate_iam_on_tapes(program: IamProgram, opts: Optional[IamRunOptions] = None,
                          **kw) -> TapeRun:
    code = BlockCode(program.alphabet)

    def history(alphabet, domain_of):
        return TapePrecomputation(alphabet, domain_of, code)

    before = TapeStage.evaluations
    rep = iam_mod.run(program, opts, history_cls=history, stage_cls=TapeStage, **kw)
    return TapeRun(rep, code, TapeStage.evaluations - before)
