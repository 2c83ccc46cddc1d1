"""The two-sorted language with ``C(x, y) = z``, ``<=`` and ``=``.

Contents: the AST, a parser and canonical printer for the ASCII grammar, sort
inference, symbol-order sugar and the bounded truth evaluator.

Grammar (binary connectives must be parenthesised unless they form the whole
formula)::

    formula := chain
    chain   := unary (OP unary)*          -- one OP kind per chain; '->' is binary
    unary   := '!' unary | ('E'|'A') VAR '.' unary | '(' chain ')' | atom
    atom    := term '=' term | term '<=' term | 'C' '(' term ',' term ')' '=' term
    term    := VAR | 'o{' ORDINAL '}' | '#' (DIGITS | 'H')
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Optional, Union

from .ordinal import (ZERO, Ordinal, OrdinalSyntaxError, format_ordinal, fundamental_sequence,
                      is_limit, parse_ordinal)

HALT = "H"
ORD, SYM = "ordinal", "symbol"


class LcError(Exception):
    pass


class LcSyntaxError(LcError):
    def __init__(self, msg, pos=None):
        self.pos = pos
        super().__init__(f"{msg} at position {pos}" if pos is not None else msg)


class SortError(LcError):
    pass


class UnboundVariable(LcError):
    pass


class UncertifiedLimitEvaluation(LcError):
    pass


# AST -----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class OrdConst:
    value: Ordinal


@dataclass(frozen=True)
class SymConst:
    name: str


Term = Union[Var, OrdConst, SymConst]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Le:
    left: Term
    right: Term


@dataclass(frozen=True)
class CAtom:
    time: Term
    place: Term
    value: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Eq, Le, CAtom, Not, And, Or, Implies, Exists, Forall]
ATOMS = (Eq, Le, CAtom)


def conj(*items):
    items = tuple(items)
    return items[0] if len(items) == 1 else And(items)


def disj(*items):
    items = tuple(items)
    return items[0] if len(items) == 1 else Or(items)


def V(name):
    return Var(name)


def O(x):
    return OrdConst(Ordinal.of(x))


def S(name):
    return SymConst(str(name))


def subformulas(phi):
    yield phi
    if isinstance(phi, Not):
        yield from subformulas(phi.body)
    elif isinstance(phi, (And, Or)):
        for it in phi.items:
            yield from subformulas(it)
    elif isinstance(phi, Implies):
        yield from subformulas(phi.left)
        yield from subformulas(phi.right)
    elif isinstance(phi, (Exists, Forall)):
        yield from subformulas(phi.body)


def _terms(phi):
    if isinstance(phi, (Eq, Le)):
        return (phi.left, phi.right)
    if isinstance(phi, CAtom):
        return (phi.time, phi.place, phi.value)
    return ()


def free_vars(phi) -> frozenset:
    if isinstance(phi, ATOMS):
        return frozenset(t.name for t in _terms(phi) if isinstance(t, Var))
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, (And, Or)):
        out = frozenset()
        for it in phi.items:
            out |= free_vars(it)
        return out
    if isinstance(phi, Implies):
        return free_vars(phi.left) | free_vars(phi.right)
    return free_vars(phi.body) - {phi.var}


def ordinal_constants(phi) -> set:
    out = set()
    for sub in subformulas(phi):
        for t in _terms(sub):
            if isinstance(t, OrdConst):
                out.add(t.value)
    return out


def _fresh(avoid, base):
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def _sub_term(t, mapping):
    if isinstance(t, Var) and t.name in mapping:
        return mapping[t.name]
    return t


def substitute(phi, mapping: dict):
    """Replace free variables by terms, renaming bound variables that would capture."""
    mapping = {k: (Var(v) if isinstance(v, str) else v) for k, v in mapping.items()}
    if not mapping:
        return phi
    if isinstance(phi, Eq):
        return Eq(_sub_term(phi.left, mapping), _sub_term(phi.right, mapping))
    if isinstance(phi, Le):
        return Le(_sub_term(phi.left, mapping), _sub_term(phi.right, mapping))
    if isinstance(phi, CAtom):
        return CAtom(*(_sub_term(t, mapping) for t in (phi.time, phi.place, phi.value)))
    if isinstance(phi, Not):
        return Not(substitute(phi.body, mapping))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(substitute(i, mapping) for i in phi.items))
    if isinstance(phi, Implies):
        return Implies(substitute(phi.left, mapping), substitute(phi.right, mapping))
    inner = {k: v for k, v in mapping.items() if k != phi.var}
    if not inner:
        return phi
    incoming = {t.name for t in inner.values() if isinstance(t, Var)}
    var, body = phi.var, phi.body
    if var in incoming:
        new = _fresh(incoming | free_vars(body) | set(inner), var)
        body = substitute(body, {var: Var(new)})
        var = new
    return type(phi)(var, substitute(body, inner))


def depth(phi) -> int:
    if isinstance(phi, ATOMS):
        return 0
    if isinstance(phi, Not):
        return 1 + depth(phi.body)
    if isinstance(phi, (And, Or)):
        return 1 + max(depth(i) for i in phi.items)
    if isinstance(phi, Implies):
        return 1 + max(depth(phi.left), depth(phi.right))
    return 1 + depth(phi.body)


# printer -------------------------------------------------------------

def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, OrdConst):
        return "o{" + format_ordinal(t.value) + "}"
    return "#" + t.name


def _fmt(phi, top=False) -> str:
    if isinstance(phi, Eq):
        return f"{format_term(phi.left)} = {format_term(phi.right)}"
    if isinstance(phi, Le):
        return f"{format_term(phi.left)} <= {format_term(phi.right)}"
    if isinstance(phi, CAtom):
        return (f"C({format_term(phi.time)}, {format_term(phi.place)}) = "
                f"{format_term(phi.value)}")
    if isinstance(phi, Not):
        inner = _fmt(phi.body)
        if isinstance(phi.body, ATOMS):
            inner = f"({inner})"
        return "!" + inner
    if isinstance(phi, And):
        return "(" + " & ".join(_fmt(i) for i in phi.items) + ")"
    if isinstance(phi, Or):
        return "(" + " | ".join(_fmt(i) for i in phi.items) + ")"
    if isinstance(phi, Implies):
        return f"({_fmt(phi.left)} -> {_fmt(phi.right)})"
    q = "E" if isinstance(phi, Exists) else "A"
    body = _fmt(phi.body)
    return f"{q} {phi.var}. {body}"


def format_formula(phi) -> str:
    return _fmt(phi, top=True)


# parser --------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<ord>o\{[^}]*\})
  | (?P<sym>\#(?:\d+|H))
  | (?P<kw>[EAC])(?![A-Za-z0-9])
  | (?P<var>[a-z][a-z0-9]*)
  | (?P<op><=|->|[=!&|().,])
""", re.VERBOSE)


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise LcSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", pos))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.next()
        if tok[1] != value:
            raise LcSyntaxError(f"expected {value!r}, got {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def parse(self):
        f = self.chain()
        tok = self.peek()
        if tok[0] != "eof":
            raise LcSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return f

    def chain(self):
        first = self.unary()
        items = [first]
        op = None
        while self.peek()[1] in ("&", "|", "->"):
            tok = self.next()
            if op is None:
                op = tok[1]
            elif op != tok[1] or op == "->":
                raise LcSyntaxError("mixed or chained connectives need parentheses", tok[2])
            items.append(self.unary())
        if op is None:
            return first
        if op == "&":
            return And(tuple(items))
        if op == "|":
            return Or(tuple(items))
        return Implies(items[0], items[1])

    def unary(self):
        tok = self.peek()
        if tok[1] == "!":
            self.next()
            return Not(self.unary())
        if tok[0] == "kw" and tok[1] in "EA":
            self.next()
            v = self.next()
            if v[0] != "var":
                raise LcSyntaxError("expected a variable after quantifier", v[2])
            self.expect(".")
            body = self.unary()
            return Exists(v[1], body) if tok[1] == "E" else Forall(v[1], body)
        if tok[1] == "(":
            self.next()
            f = self.chain()
            self.expect(")")
            return f
        return self.atom()

    def atom(self):
        tok = self.peek()
        if tok[0] == "kw" and tok[1] == "C":
            self.next()
            self.expect("(")
            a = self.term()
            sep = self.next()
            if sep[1] != ",":
                raise LcSyntaxError("C is a binary function symbol", sep[2])
            b = self.term()
            self.expect(")")
            self.expect("=")
            return CAtom(a, b, self.term())
        left = self.term()
        op = self.next()
        if op[1] == "=":
            return Eq(left, self.term())
        if op[1] == "<=":
            return Le(left, self.term())
        raise LcSyntaxError(f"expected '=' or '<=', got {op[1] or 'end of input'!r}", op[2])

    def term(self):
        tok = self.next()
        kind, val, pos = tok
        if kind == "var":
            return Var(val)
        if kind == "sym":
            return SymConst(val[1:])
        if kind == "ord":
            try:
                return OrdConst(parse_ordinal(val[2:-1]))
            except OrdinalSyntaxError as e:
                raise LcSyntaxError(str(e), pos) from None
        raise LcSyntaxError(f"expected a term, got {val or 'end of input'!r}", pos)


def parse_formula(text: str, sorts: Optional[dict] = None):
    phi = _Parser(text).parse()
    check_sorts(phi, sorts or {})
    return phi


parse = parse_formula


# sorts ---------------------------------------------------------------

def check_sorts(phi, fixed: Optional[dict] = None) -> dict:
    """Infer sorts of the free variables; raise SortError on a hard conflict.

    Hard requirements: quantified variables and arguments of ``C`` are
    ordinals, the value side of ``C`` is a symbol.  ``=`` only propagates a
    known sort to an unconstrained variable; comparing across sorts is legal
    and simply false.  Bound variables are scoped, so a quantifier may reuse
    the name of a free variable of another sort.
    """
    hard = {}
    eqs = []
    counter = [0]

    def need(key, sort, where):
        prev = hard.get(key)
        if prev is not None and prev != sort:
            raise SortError(f"variable {key[0]!r} used as both {prev} and {sort} ({where})")
        hard[key] = sort

    for name, sort in (fixed or {}).items():
        need((name, 0), sort, "declared")

    def key(t, scope):
        return (t.name, scope.get(t.name, 0))

    def walk(f, scope):
        if isinstance(f, CAtom):
            for t in (f.time, f.place):
                if isinstance(t, Var):
                    need(key(t, scope), ORD, format_formula(f))
                elif isinstance(t, SymConst):
                    raise SortError(f"symbol constant as argument of C in {format_formula(f)}")
            if isinstance(f.value, Var):
                need(key(f.value, scope), SYM, format_formula(f))
            elif isinstance(f.value, OrdConst):
                raise SortError(f"ordinal constant as value of C in {format_formula(f)}")
        elif isinstance(f, Eq):
            eqs.append(tuple(key(t, scope) if isinstance(t, Var) else t
                             for t in (f.left, f.right)))
        elif isinstance(f, Le):
            for t in (f.left, f.right):
                if isinstance(t, Var):
                    hard.setdefault(key(t, scope), None)
        elif isinstance(f, Not):
            walk(f.body, scope)
        elif isinstance(f, (And, Or)):
            for it in f.items:
                walk(it, scope)
        elif isinstance(f, Implies):
            walk(f.left, scope)
            walk(f.right, scope)
        else:
            counter[0] += 1
            inner = dict(scope)
            inner[f.var] = counter[0]
            need((f.var, counter[0]), ORD, f"quantified in {format_formula(f)}")
            walk(f.body, inner)

    walk(phi, {})
    sorts = {k: v for k, v in hard.items() if v is not None}
    changed = True
    while changed:
        changed = False
        for pair in eqs:
            for a, b in (pair, pair[::-1]):
                if isinstance(a, tuple) and a not in sorts:
                    if isinstance(b, tuple):
                        s_ = sorts.get(b)
                    else:
                        s_ = ORD if isinstance(b, OrdConst) else SYM
                    if s_ is not None:
                        sorts[a] = s_
                        changed = True
    out = {name: sort for (name, scope), sort in sorts.items() if scope == 0}
    for v in free_vars(phi):
        out.setdefault(v, ORD)
    return out


# alphabets -----------------------------------------------------------

@dataclass(frozen=True)
class Alphabet:
    symbols: tuple

    def __post_init__(self):
        if not self.symbols:
            raise LcError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise LcError("duplicate symbols in alphabet")
        if HALT not in self.symbols:
            raise LcError("alphabet must contain the halting symbol H")

    @classmethod
    def of(cls, *names) -> "Alphabet":
        return cls(tuple(str(n) for n in names))

    @classmethod
    def parse(cls, text: str) -> "Alphabet":
        toks = text.split()
        if any(not t.startswith("#") for t in toks):
            raise LcSyntaxError(f"alphabet symbols must look like #k: {text!r}")
        return cls(tuple(t[1:] for t in toks))

    def format(self) -> str:
        return " ".join("#" + s for s in self.symbols)

    @property
    def blank(self):
        return self.symbols[0]

    def index(self, s) -> int:
        return self.symbols.index(s)

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def key(self, s) -> int:
        return self.symbols.index(s)


def symbol_order_sugar(alphabet: Alphabet, s: Term, t: Term):
    """``s <= t`` in the declared symbol order, as a finite disjunction."""
    syms = alphabet.symbols

    def eq(term, name):
        if isinstance(term, tuple):  # ('C', a, b)
            return CAtom(term[1], term[2], SymConst(name))
        return Eq(SymConst(name), term)

    if isinstance(t, SymConst):
        k = syms.index(t.name)
        return disj(*[eq(s, a) for a in syms[:k + 1]])
    return disj(*[conj(eq(t, b), disj(*[eq(s, a) for a in syms[:j + 1]]))
                  for j, b in enumerate(syms)])


# evaluation ----------------------------------------------------------

@dataclass(frozen=True)
class EvalResult:
    value: int
    certified: bool

    def __int__(self):
        return self.value

    def __str__(self):
        return f"{self.value} {'certified' if self.certified else 'heuristic'}"


_CERTIFIED = set()


def register_certified(phi) -> None:
    """Mark a formula as belonging to the fragment whose limit-stage
    evaluation is witness-complete for the candidate procedure."""
    _CERTIFIED.add(format_formula(phi))


def is_certified_fragment(phi) -> bool:
    return format_formula(phi) in _CERTIFIED


PHI_LIM_TEXT = "A x. E y. (x <= y & !(x = y))"
SUCC_TEXT = "(beta <= alpha & !(alpha = beta) & A z. (z <= beta | alpha <= z))"


def _succ_shape(node):
    """Recognise ``(b <= a) & !(a = b) & A z.((z <= b) | (a <= z))``."""
    if not isinstance(node, And) or len(node.items) != 3:
        return None
    le, ne, fa = node.items
    if not (isinstance(le, Le) and isinstance(ne, Not) and isinstance(ne.body, Eq)
            and isinstance(fa, Forall) and isinstance(fa.body, Or) and len(fa.body.items) == 2):
        return None
    b, a = le.left, le.right
    if ne.body != Eq(a, b):
        return None
    z = Var(fa.var)
    if fa.body.items != (Le(z, b), Le(a, z)) or z in (a, b):
        return None
    return a, b


class Evaluator:
    """Bounded truth ``[phi]_tau^F`` with memoised quantifier nodes.

    ``semantics`` is ``"literal"`` (``C(a, b) = x`` holds whenever ``a < b``)
    or ``"blank-default"`` (unwritten cells read as the first symbol).  Below
    a finite ``tau`` every quantifier is decided exhaustively.  Above it,
    exact generators are used where a conjunct pins the variable down, and
    otherwise a finite candidate set built from the structure of ``F``; the
    latter makes the answer certified only inside the registered fragment.
    """

    def __init__(self, F, tau: Ordinal, semantics: str = "literal",
                 shortcuts: bool = True, fragment: bool = False):
        if semantics not in ("literal", "blank-default"):
            raise ValueError(f"unknown semantics {semantics!r}")
        self.F = F
        self.tau = Ordinal.of(tau)
        self.literal = semantics == "literal"
        self.shortcuts = shortcuts
        self.fragment = fragment
        self.blank = F.alphabet.blank
        self.finite_tau = self.tau.is_finite
        self.used_candidates = False
        self._memo = {}
        self._fv = {}
        self._succ = {}
        self._cands = {}
        self._base = None
        self._window = None

    # helpers
    def fv(self, node):
        k = id(node)
        r = self._fv.get(k)
        if r is None:
            r = self._fv[k] = (node, tuple(sorted(free_vars(node))))
        return r[1]

    def term(self, t, env):
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise UnboundVariable(t.name) from None
        if isinstance(t, OrdConst):
            return t.value
        return t.name

    def _succ_of(self, node):
        k = id(node)
        if k not in self._succ:
            self._succ[k] = (node, _succ_shape(node) if self.shortcuts else None)
        return self._succ[k][1]

    def _succ_holds(self, a, b) -> bool:
        if not (isinstance(a, Ordinal) and isinstance(b, Ordinal)) or not b < a:
            return False
        b1 = b.plus_finite(1)
        return not (b1 < a and b1 < self.tau)

    def cell(self, a, b):
        """Value read by ``C(a, b)`` or None when no state exists."""
        if a >= self.tau:
            return None
        v = self.F.value(a, b)
        return self.blank if v is None else v

    # truth
    def truth(self, phi, env) -> bool:
        t = type(phi)
        if t is Eq:
            return self.term(phi.left, env) == self.term(phi.right, env)
        if t is Le:
            a, b = self.term(phi.left, env), self.term(phi.right, env)
            return isinstance(a, Ordinal) and isinstance(b, Ordinal) and a <= b
        if t is CAtom:
            a, b = self.term(phi.time, env), self.term(phi.place, env)
            x = self.term(phi.value, env)
            if not (isinstance(a, Ordinal) and isinstance(b, Ordinal)):
                return False
            if self.literal and a < b:
                return True
            v = self.cell(a, b)
            return v is not None and v == x
        if t is Not:
            return not self.truth(phi.body, env)
        if t is And:
            s = self._succ_of(phi)
            if s is not None:
                return self._succ_holds(self.term(s[0], env), self.term(s[1], env))
            for it in phi.items:
                if not self.truth(it, env):
                    return False
            return True
        if t is Or:
            for it in phi.items:
                if self.truth(it, env):
                    return True
            return False
        if t is Implies:
            return (not self.truth(phi.left, env)) or self.truth(phi.right, env)
        if t is Exists or t is Forall:
            return self._quant(phi, env, t is Exists)
        raise TypeError(f"not a formula: {phi!r}")

    def _quant(self, phi, env, existential):
        fvs = self.fv(phi)
        try:
            key = (id(phi),) + tuple(env[v] for v in fvs)
        except KeyError as e:
            raise UnboundVariable(e.args[0]) from None
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        x = phi.var
        cands = self.gen(phi.body, x, env, existential)
        if cands is None:
            if self.finite_tau:
                cands = (Ordinal.of(i) for i in range(self.tau.finite_value()))
            else:
                self.used_candidates = True
                cands = self.candidates([env[v] for v in fvs])
        saved = env.get(x, _MISSING)
        result = not existential
        seen = set()
        try:
            for c in cands:
                if not c < self.tau or c in seen:
                    continue
                seen.add(c)
                env[x] = c
                if self.truth(phi.body, env) == existential:
                    result = existential
                    break
        finally:
            if saved is _MISSING:
                env.pop(x, None)
            else:
                env[x] = saved
        self._memo[key] = result
        return result

    # exact witness generators
    def _evaluable(self, t, x, env):
        if isinstance(t, Var):
            if t.name == x or t.name not in env:
                return _MISSING
            return env[t.name]
        return self.term(t, env)

    def gen(self, phi, x, env, positive):
        """A finite superset of the witnesses of ``phi`` (or of ``not phi``
        when ``positive`` is false) for variable ``x``; None if unknown."""
        if not self.shortcuts:
            return None
        t = type(phi)
        if t is Not:
            return self.gen(phi.body, x, env, not positive)
        if t is And:
            s = self._succ_of(phi)
            if s is not None:
                return self._gen_succ(s, x, env) if positive else None
            if positive:
                return self._pick(phi.items, x, env, True)
            return self._union(phi.items, x, env, False)
        if t is Or:
            if positive:
                return self._union(phi.items, x, env, True)
            return self._pick(phi.items, x, env, False)
        if t is Implies:
            if positive:
                a = self.gen(phi.left, x, env, False)
                b = self.gen(phi.right, x, env, True) if a is not None else None
                return None if b is None else a + b
            return self._pick_pairs([(phi.left, True), (phi.right, False)], x, env)
        if not positive:
            return None
        if t is Eq:
            for a, b in ((phi.left, phi.right), (phi.right, phi.left)):
                if a == Var(x):
                    v = self._evaluable(b, x, env)
                    if v is not _MISSING:
                        return [v] if isinstance(v, Ordinal) else []
            return None
        if t is Le:
            if phi.left == Var(x):
                v = self._evaluable(phi.right, x, env)
                if isinstance(v, Ordinal) and v.is_finite:
                    return [Ordinal.of(i) for i in range(v.finite_value() + 1)]
            return None
        if t is CAtom:
            if self.literal or phi.place != Var(x):
                return None
            a = self._evaluable(phi.time, x, env)
            s = self._evaluable(phi.value, x, env)
            if not isinstance(a, Ordinal) or s is _MISSING or isinstance(s, Ordinal):
                return None
            if s == self.blank:
                return None
            if a >= self.tau:
                return []
            return self.F.memory(a).preimage(s)
        return None

    def _pick(self, items, x, env, positive):
        best = None
        for it in items:
            g = self.gen(it, x, env, positive)
            if g is not None and (best is None or len(g) < len(best)):
                best = g
                if not best:
                    break
        return best

    def _pick_pairs(self, pairs, x, env):
        best = None
        for it, pos in pairs:
            g = self.gen(it, x, env, pos)
            if g is not None and (best is None or len(g) < len(best)):
                best = g
        return best

    def _union(self, items, x, env, positive):
        out = []
        for it in items:
            g = self.gen(it, x, env, positive)
            if g is None:
                return None
            out.extend(g)
        return out

    def _gen_succ(self, s, x, env):
        a_t, b_t = s
        tau = self.tau
        if a_t == Var(x):
            b = self._evaluable(b_t, x, env)
            if not isinstance(b, Ordinal):
                return None if b is _MISSING else []
            b1 = b.plus_finite(1)
            return [b1] if b1 < tau else []
        if b_t == Var(x):
            a = self._evaluable(a_t, x, env)
            if not isinstance(a, Ordinal):
                return None if a is _MISSING else []
            out = []
            if a.offset():
                out.append(a.pred())
            if tau.offset() and tau.pred() < a:
                out.append(tau.pred())
            return out
        return None

    # candidate sets above infinite tau
    def base_points(self):
        if self._base is None:
            pts = {ZERO, self.tau}
            pts.update(self.F.anchors())
            pts.update(self._consts)
            W = self.window
            top = max((p.offset() for p in pts), default=0) + 2 * W + 2
            lims = {p.block() for p in pts if p.block() <= self.tau}
            if is_limit(self.tau):
                lims.add(self.tau)
            for lam in lims:
                if lam and is_limit(lam):
                    for n in (1, 2, 3, top, top + W):
                        pts.add(fundamental_sequence(lam, n))
            self._base = pts
        return self._base

    @property
    def window(self):
        if self._window is None:
            self._window = max(4, 2 * self.F.max_period() + 2)
        return self._window

    _consts = ()

    def _window_of(self, c):
        W = self.window
        b, o = c.split()
        out = []
        for d in range(max(0, o - W), o + W + 1):
            p = b.plus_finite(d)
            if p < self.tau:
                out.append(p)
        return out

    def candidates(self, free_values):
        """Base windows (shared by every quantifier at this stage) followed by
        windows around the free values and the times their places changed."""
        base = self._cands.get(None)
        if base is None:
            pts = set()
            for c in self.base_points():
                pts.update(self._window_of(c))
            base = self._cands[None] = sorted(pts)
        extra = []
        for v in free_values:
            if not isinstance(v, Ordinal):
                continue
            hit = self._cands.get(v)
            if hit is None:
                pts = set(self._window_of(v))
                for a in self.F.place_anchors(v):
                    pts.update(self._window_of(a))
                hit = self._cands[v] = sorted(pts)
            extra.append(hit)
        if not extra:
            return base
        return _chain(base, extra)


def _chain(base, extra):
    yield from base
    for e in extra:
        yield from e


_MISSING = object()


def eval_formula(phi, F, tau, env=None, semantics: str = "literal", strict: bool = False,
                 shortcuts: bool = True, fragment: Optional[bool] = None) -> EvalResult:
    tau = Ordinal.of(tau)
    env = dict(env or {})
    for k, v in env.items():
        if isinstance(v, int):
            env[k] = Ordinal.of(v)
    ev = Evaluator(F, tau, semantics, shortcuts,
                   fragment if fragment is not None else is_certified_fragment(phi))
    ev._consts = tuple(ordinal_constants(phi))
    value = ev.truth(phi, env)
    certified = (not ev.used_candidates) or ev.fragment
    if strict and not certified:
        raise UncertifiedLimitEvaluation(
            f"limit-stage evaluation of {format_formula(phi)} at {tau} is heuristic")
    return EvalResult(int(value), certified)


evaluate = eval_formula

for _text in (PHI_LIM_TEXT, SUCC_TEXT):
    register_certified(parse_formula(_text))


# program sampler -----------------------------------------------------

@dataclass
class ProgramCheck:
    samples: int
    counterexamples: list

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def check_program(phi, alphabet: Alphabet, tau_max: Ordinal, samples: int = 200,
                  seed: int = 0, semantics: str = "literal",
                  names=("x", "y", "z")) -> ProgramCheck:
    """Falsifier for the exactly-one-symbol condition on random histories.

    Finite times ``1 <= tau`` (the state at time 0 has no places) are sampled
    with random explicit histories; when ``tau_max >= w`` histories of length
    ``w`` with random eventually periodic places are sampled as well.
    """
    from .precomp import EventPrecomputation, ExplicitPrecomputation

    rng = random.Random(seed)
    tau_max = Ordinal.of(tau_max)
    fin_max = tau_max.finite_value() if tau_max.is_finite else 8
    tx, ty, tz = names
    bad = []
    syms = list(alphabet.symbols)
    for i in range(samples):
        use_limit = not tau_max.is_finite and i % 4 == 3
        if use_limit:
            F = EventPrecomputation.random(alphabet, rng)
            tau = F.length
            places = [Ordinal.of(rng.randrange(6)) for _ in range(2)]
        else:
            if fin_max < 1:
                break
            n = rng.randint(1, fin_max)
            F = ExplicitPrecomputation.random(alphabet, n, rng)
            tau = Ordinal.of(n)
            places = [Ordinal.of(rng.randint(0, n))]
        for a in places:
            hits = [s for s in syms
                    if eval_formula(phi, F, tau, {tx: tau, ty: a, tz: s}, semantics).value]
            if len(hits) != 1:
                bad.append((tau, a, tuple(hits), F))
    return ProgramCheck(samples, bad)
