"""Formal classes in K_n F / p^m K_n F, elementary relation moves and the
certificate checker.

An expression is an ordered list of ``(coefficient, entries)`` terms.  Nothing
is ever simplified behind the caller's back: every rewrite is a recorded
``MoveStep`` that the checker replays.

Rules and their parameter conventions
-------------------------------------
BilinSplit
    ``slots=[i], params=[u]``: c{..a..} -> c{..u..} (at k) + c{..a/u..} (at dest).
    ``slots=[i], params=[u, e]``: c{..u^e..} -> (c*e){..u..}.
    ``slots=[], params=[e]``: c{S} -> e{S} (at k) + (c-e){S} (at dest).
    ``terms=[k]`` or ``[k, dest]``; dest defaults to k+1.
BilinMerge
    ``terms=[k, l], slots=[i]``: equal coefficients, entries equal off slot i.
    ``terms=[k, l], slots=[]``: identical entries, coefficients add.
    ``terms=[k], slots=[i]``: c{..a..} -> 1{..a^c..}.
Steinberg / MinusAlpha / UnitSlot
    with empty params, delete term k whose slots hold (a, 1-a) / (a, -a) / 1;
    with params = a full entry list, insert 1{params} at position k.
Swap
    ``slots=[i]``: transpose slots i, i+1 and negate the coefficient.
CoeffMod
    ``params=[]``: c -> c mod p^m; ``params=[e]``: c -> e with e = c mod p^m.
    A term whose coefficient becomes 0 is removed.
SumIdentity
    ``slots=[i, j], params=[]``: c{..a..b..} -> c{..a+b..-b/a..} for c = +-1;
    ``params=[a]``: the inverse rewrite.  Carries its primitive ``expansion``.
Integer parameters are encoded as integer-valued field elements.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import (
    FieldNotRationals,
    IndexOutOfRange,
    ModulusMismatch,
    ParseError,
    SideConditionViolated,
)
from .fields import QQ, Elem, Field, parse_element

RULES = (
    "BilinSplit",
    "BilinMerge",
    "Steinberg",
    "MinusAlpha",
    "UnitSlot",
    "Swap",
    "CoeffMod",
    "SumIdentity",
)
PRIMITIVE_RULES = RULES[:-1]


@dataclass(frozen=True)
class Modulus:
    p: int
    m: int

    def __post_init__(self):
        if self.p < 2 or any(self.p % d == 0 for d in range(2, self.p)):
            raise ValueError(f"p={self.p} is not prime")
        if self.m < 1:
            raise ValueError("exponent m must be positive")

    @property
    def value(self) -> int:
        return self.p**self.m

    def raised(self) -> "Modulus":
        return Modulus(self.p, self.m + 1)

    def lowered(self) -> "Modulus":
        return Modulus(self.p, self.m - 1)

    def __str__(self):
        return f"{self.p}^{self.m}"


@dataclass(frozen=True)
class Symbol:
    modulus: Modulus
    entries: tuple

    def __post_init__(self):
        if not self.entries:
            raise ValueError("a symbol needs at least one entry")
        if any(e.is_zero() for e in self.entries):
            raise ValueError("symbol entries must be nonzero")
        if len({e.field for e in self.entries}) != 1:
            raise ValueError("symbol entries must share one field")

    @property
    def grade(self):
        return len(self.entries)

    @property
    def field(self) -> Field:
        return self.entries[0].field

    def expr(self, coeff: int = 1) -> "KClassExpr":
        return KClassExpr(self.modulus, ((coeff, self.entries),))

    def __str__(self):
        return "{" + ",".join(str(e) for e in self.entries) + "}@" + str(self.modulus)


@dataclass(frozen=True)
class KClassExpr:
    """Ordered, unsimplified integer combination of symbols of one grade."""

    modulus: Modulus
    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((int(c), tuple(es)) for c, es in self.terms)
        object.__setattr__(self, "terms", terms)
        grades = {len(es) for _, es in terms}
        if len(grades) > 1:
            raise ValueError("expression is not grade-uniform")

    @property
    def grade(self):
        return len(self.terms[0][1]) if self.terms else None

    @property
    def field(self):
        return self.terms[0][1][0].field if self.terms else None

    def __len__(self):
        return len(self.terms)

    def symbols(self):
        return [Symbol(self.modulus, es) for _, es in self.terms]

    def __add__(self, other: "KClassExpr") -> "KClassExpr":
        if other.modulus != self.modulus:
            raise ModulusMismatch(f"{self.modulus} vs {other.modulus}")
        return KClassExpr(self.modulus, self.terms + other.terms)

    def scaled(self, k: int) -> "KClassExpr":
        return KClassExpr(self.modulus, tuple((c * k, es) for c, es in self.terms))

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for idx, (c, es) in enumerate(self.terms):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = ("" if mag == 1 else f"{mag}*") + "{" + ",".join(map(str, es)) + "}@" + str(self.modulus)
            out.append((sign if idx or c < 0 else "") + body)
        return " ".join(out)


@dataclass(frozen=True)
class MoveStep:
    rule: str
    terms: tuple = ()
    slots: tuple = ()
    params: tuple = ()
    expansion: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "slots", tuple(self.slots))
        object.__setattr__(self, "params", tuple(self.params))
        if self.expansion is not None:
            object.__setattr__(self, "expansion", tuple(self.expansion))


@dataclass(frozen=True)
class Certificate:
    modulus: Modulus
    field: Field
    start: KClassExpr
    end: KClassExpr
    steps: tuple = ()


@dataclass(frozen=True)
class CheckResult:
    valid: bool
    step: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.valid


# --- move semantics ---------------------------------------------------------

def _int_param(x: Elem, rule: str) -> int:
    if x.field.characteristic != 0 or not x.is_rational() or x.to_fraction().denominator != 1:
        raise SideConditionViolated(rule, f"parameter {x} is not an integer")
    return int(x.to_fraction())


def _need(cond, rule, detail):
    if not cond:
        raise SideConditionViolated(rule, detail)


def _term(terms, k):
    if not isinstance(k, int) or not 0 <= k < len(terms):
        raise IndexOutOfRange(f"term index {k} out of range for {len(terms)} terms")
    return terms[k]


def _slot(entries, i):
    if not isinstance(i, int) or not 0 <= i < len(entries):
        raise IndexOutOfRange(f"slot index {i} out of range for grade {len(entries)}")
    return entries[i]


def _dest(step, k, length):
    dest = step.terms[1] if len(step.terms) > 1 else k + 1
    if not 0 <= dest <= length:
        raise IndexOutOfRange(f"destination {dest} out of range")
    return dest


def _with(entries, i, value):
    es = list(entries)
    es[i] = value
    return tuple(es)


def _relation_holds(rule, entries, slots):
    if rule == "UnitSlot":
        _need(len(slots) == 1, rule, "expects one slot")
        return _slot(entries, slots[0]) == 1
    _need(len(slots) == 2 and slots[0] != slots[1], rule, "expects two distinct slots")
    a, b = _slot(entries, slots[0]), _slot(entries, slots[1])
    if rule == "Steinberg":
        return b == 1 - a
    return b == -a


def apply_move(e: KClassExpr, s: MoveStep) -> KClassExpr:
    """Apply one move; raises SideConditionViolated or IndexOutOfRange."""
    terms = list(e.terms)
    rule = s.rule
    if rule not in RULES:
        raise SideConditionViolated(rule, "unknown rule")
    if not s.terms:
        raise IndexOutOfRange("step names no term")
    k = s.terms[0]

    if rule in ("Steinberg", "MinusAlpha", "UnitSlot"):
        if s.params:
            _need(len(s.terms) == 1, rule, "insertion takes one position")
            _need(0 <= k <= len(terms), rule, "insertion position out of range")
            es = tuple(s.params)
            _need(all(not x.is_zero() for x in es), rule, "zero entry")
            _need(not terms or len(es) == len(terms[0][1]), rule, "grade mismatch")
            _need(_relation_holds(rule, es, s.slots), rule, "relation does not hold")
            terms.insert(k, (1, es))
        else:
            _need(len(s.terms) == 1, rule, "deletion takes one term")
            c, es = _term(terms, k)
            _need(_relation_holds(rule, es, s.slots), rule, "relation does not hold")
            del terms[k]
        return KClassExpr(e.modulus, terms)

    if rule == "Swap":
        c, es = _term(terms, k)
        _need(len(s.slots) == 1 and not s.params and len(s.terms) == 1, rule, "malformed")
        i = s.slots[0]
        _slot(es, i), _slot(es, i + 1)
        es = list(es)
        es[i], es[i + 1] = es[i + 1], es[i]
        terms[k] = (-c, tuple(es))
        return KClassExpr(e.modulus, terms)

    if rule == "CoeffMod":
        c, es = _term(terms, k)
        _need(not s.slots and len(s.terms) == 1, rule, "malformed")
        M = e.modulus.value
        if not s.params:
            new = c % M
        else:
            _need(len(s.params) == 1, rule, "malformed")
            new = _int_param(s.params[0], rule)
            _need((new - c) % M == 0, rule, f"{new} is not congruent to {c} mod {M}")
        if new == 0:
            del terms[k]
        else:
            terms[k] = (new, es)
        return KClassExpr(e.modulus, terms)

    if rule == "BilinSplit":
        c, es = _term(terms, k)
        if not s.slots:
            _need(len(s.params) == 1, rule, "coefficient split takes one parameter")
            e1 = _int_param(s.params[0], rule)
            dest = _dest(s, k, len(terms))
            terms[k] = (e1, es)
            terms.insert(dest, (c - e1, es))
            return KClassExpr(e.modulus, terms)
        _need(len(s.slots) == 1, rule, "one slot expected")
        i = s.slots[0]
        a = _slot(es, i)
        if len(s.params) == 2:
            _need(len(s.terms) == 1, rule, "malformed")
            u = s.params[0]
            ex = _int_param(s.params[1], rule)
            _need(not u.is_zero(), rule, "zero base")
            _need(a == u**ex, rule, f"entry {a} is not ({u})^{ex}")
            terms[k] = (c * ex, _with(es, i, u))
            return KClassExpr(e.modulus, terms)
        _need(len(s.params) == 1, rule, "split takes one factor")
        u = s.params[0]
        _need(not u.is_zero(), rule, "zero factor")
        dest = _dest(s, k, len(terms))
        terms[k] = (c, _with(es, i, u))
        terms.insert(dest, (c, _with(es, i, a / u)))
        return KClassExpr(e.modulus, terms)

    if rule == "BilinMerge":
        _need(not s.params, rule, "merge takes no parameters")
        if len(s.terms) == 1:
            c, es = _term(terms, k)
            _need(len(s.slots) == 1, rule, "power absorption takes one slot")
            i = s.slots[0]
            terms[k] = (1, _with(es, i, _slot(es, i) ** c))
            return KClassExpr(e.modulus, terms)
        _need(len(s.terms) == 2 and s.terms[0] != s.terms[1], rule, "two distinct terms expected")
        ck, ek = _term(terms, k)
        l = s.terms[1]
        cl, el = _term(terms, l)
        if not s.slots:
            _need(ek == el, rule, "entries differ")
            terms[k] = (ck + cl, ek)
        else:
            _need(len(s.slots) == 1, rule, "one slot expected")
            i = s.slots[0]
            _need(ck == cl, rule, "coefficients differ")
            _slot(ek, i)
            _need(all(x == y for j, (x, y) in enumerate(zip(ek, el)) if j != i), rule,
                  "entries differ outside the merge slot")
            terms[k] = (ck, _with(ek, i, ek[i] * el[i]))
        del terms[l]
        return KClassExpr(e.modulus, terms)

    # SumIdentity
    c, es = _term(terms, k)
    _need(len(s.terms) == 1 and len(s.slots) == 2 and s.slots[0] != s.slots[1], rule, "malformed")
    _need(c in (1, -1), rule, "coefficient must be +1 or -1")
    i, j = s.slots
    target = sum_identity_result(es, i, j, s.params)
    _need(s.expansion is not None, rule, "missing expansion")
    sub = KClassExpr(e.modulus, ((c, es),))
    for st in s.expansion:
        _need(st.rule in PRIMITIVE_RULES, rule, "expansion must use primitive moves only")
        sub = apply_move(sub, st)
    _need(sub.terms == ((c, target),), rule, "expansion does not reach the stated result")
    terms[k] = (c, target)
    return KClassExpr(e.modulus, terms)


def sum_identity_result(entries, i, j, params=()):
    """Entries after the SumIdentity rewrite (forward, or inverse when params=[a])."""
    rule = "SumIdentity"
    A, B = _slot(entries, i), _slot(entries, j)
    if not params:
        _need(not (A + B).is_zero(), rule, "a + b = 0")
        return _with(_with(entries, i, A + B), j, -B / A)
    _need(len(params) == 1, rule, "inverse takes one parameter")
    a = params[0]
    b = A - a
    _need(not a.is_zero() and not b.is_zero(), rule, "degenerate inverse")
    _need(B == -b / a, rule, "inverse parameter inconsistent with entries")
    return _with(_with(entries, i, a), j, b)


def replay(start: KClassExpr, steps) -> KClassExpr:
    e = start
    for s in steps:
        e = apply_move(e, s)
    return e


def check_certificate(cert: Certificate) -> CheckResult:
    """Valid iff every step applies and the replay ends exactly at ``cert.end``."""
    if cert.start.modulus != cert.modulus or cert.end.modulus != cert.modulus:
        return CheckResult(False, None, "modulus mismatch")
    for ex in (cert.start, cert.end):
        for _, es in ex.terms:
            if any(x.field != cert.field or x.is_zero() for x in es):
                return CheckResult(False, None, "entry outside the declared field or zero")
    e = cert.start
    for idx, s in enumerate(cert.steps):
        try:
            e = apply_move(e, s)
        except (SideConditionViolated, IndexOutOfRange, ArithmeticError, ValueError) as exc:
            return CheckResult(False, idx, str(exc))
    if e.terms != cert.end.terms:
        return CheckResult(False, len(cert.steps), "replay does not reach the stated end")
    return CheckResult(True)


# --- maps -------------------------------------------------------------------

def shift_map(e: KClassExpr) -> KClassExpr:
    p = e.modulus.p
    return KClassExpr(e.modulus.raised(), tuple((c * p, es) for c, es in e.terms))


def exp_map(e: KClassExpr) -> KClassExpr:
    p = e.modulus.p
    return KClassExpr(Modulus(p, 1), tuple((c % p, es) for c, es in e.terms if c % p))


def cup(e1: KClassExpr, e2: KClassExpr) -> KClassExpr:
    if e1.modulus != e2.modulus:
        raise ModulusMismatch(f"{e1.modulus} vs {e2.modulus}")
    if e1.field is not None and e2.field is not None and e1.field != e2.field:
        raise ModulusMismatch("cup of classes over different fields")
    return KClassExpr(e1.modulus, tuple((c1 * c2, a + b) for c1, a in e1.terms for c2, b in e2.terms))


def _factor_rational(x: Fraction) -> dict:
    from sympy import factorint

    out = {}
    if x < 0:
        out[-1] = 1
    for p, k in factorint(abs(x.numerator)).items():
        out[p] = out.get(p, 0) + k
    for p, k in factorint(x.denominator).items():
        out[p] = out.get(p, 0) - k
    return out


def normalize_over_Q(e: KClassExpr) -> KClassExpr:
    """Multilinear normal form over the basis {-1, 2, 3, 5, ...} of Q^x.

    Sound but incomplete: it uses bilinearity, graded commutativity and the
    torsion relation, never Steinberg.
    """
    acc: dict = {}
    for c, es in e.terms:
        if any(x.field != QQ for x in es):
            raise FieldNotRationals("normal form is only defined over Q")
        partial = {(): c}
        for x in es:
            fac = _factor_rational(x.to_fraction())
            nxt = {}
            for key, coeff in partial.items():
                for base, k in fac.items():
                    if base == -1:
                        k %= 2
                    if k:
                        nk = key + (base,)
                        nxt[nk] = nxt.get(nk, 0) + coeff * k
            partial = nxt
        for key, coeff in partial.items():
            # sort with sign bookkeeping: each transposition negates
            key = list(key)
            sign = 1
            for a in range(len(key)):
                for b in range(len(key) - 1 - a):
                    if key[b] > key[b + 1]:
                        key[b], key[b + 1] = key[b + 1], key[b]
                        sign = -sign
            acc[tuple(key)] = acc.get(tuple(key), 0) + sign * coeff
    M = e.modulus.value
    terms = tuple(
        (v % M, tuple(QQ(b) for b in key)) for key, v in sorted(acc.items()) if v % M
    )
    return KClassExpr(e.modulus, terms)


# --- SumIdentity derivation -------------------------------------------------

def transposition_swaps(k, p, q):
    """Adjacent Swap moves exchanging slots p and q of term k (odd count, so one net sign)."""
    if p == q:
        raise ValueError("cannot transpose a slot with itself")
    p, q = min(p, q), max(p, q)
    return [MoveStep("Swap", (k,), (s,)) for s in range(p, q)] + [
        MoveStep("Swap", (k,), (s,)) for s in range(q - 2, p - 1, -1)
    ]


def _forward_expansion_unit(entries, i, j):
    """Primitive derivation [1{..a..b..}] -> [1{..a+b..-b/a..}]."""
    a, b = entries[i], entries[j]
    d = a + b
    E = lambda x, y: _with(_with(entries, i, x), j, y)  # noqa: E731
    steps = [MoveStep("Steinberg", (1,), (i, j), E(b / d, a / d))]
    steps += [
        MoveStep("BilinSplit", (1,), (i,), (b,)),
        MoveStep("BilinSplit", (1,), (j,), (a,)),
        MoveStep("BilinSplit", (3,), (j,), (a,)),
    ]
    # E(a,b) + E(b,a) -> 0
    steps += transposition_swaps(1, i, j)
    steps += [
        MoveStep("BilinMerge", (1,), (i,)),
        MoveStep("BilinMerge", (0, 1), (i,)),
        MoveStep("UnitSlot", (0,), (i,)),
    ]
    # E(1/d,1/d) -> E(1/d,-1)
    minus_one = -entries[0].field.one()
    steps += [
        MoveStep("BilinSplit", (2,), (j,), (minus_one,)),
        MoveStep("MinusAlpha", (3,), (i, j)),
    ]
    # E(b,1/d) -> E(1/d, 1/b)
    steps += transposition_swaps(0, i, j)
    steps += [MoveStep("BilinMerge", (0,), (j,))]
    steps += [MoveStep("BilinMerge", (0, 1), (j,)), MoveStep("BilinMerge", (0, 1), (j,))]
    # E(1/d, -a/b) -> E(d, -b/a)
    steps += [
        MoveStep("BilinSplit", (0,), (i,), (d, entries[0].field(-1))),
        MoveStep("BilinMerge", (0,), (j,)),
    ]
    return steps


def sum_identity_expansion(coeff, entries, i, j):
    if coeff == 1:
        return _forward_expansion_unit(entries, i, j)
    if coeff != -1:
        raise SideConditionViolated("SumIdentity", "coefficient must be +1 or -1")
    swapped = _with(_with(entries, i, entries[j]), j, entries[i])
    steps = transposition_swaps(0, i, j)
    steps += _forward_expansion_unit(swapped, j, i)
    steps += transposition_swaps(0, i, j)
    return steps


def invert_steps(start: KClassExpr, steps) -> list:
    """Steps leading from replay(start, steps) back to start.

    Supported: every move whose inverse is again a primitive move (deletions of
    coefficient-1 terms, power absorption, splits/merges, swaps, reverse powers
    of coefficient-1 terms).
    """
    exprs = [start]
    for s in steps:
        exprs.append(apply_move(exprs[-1], s))
    out = []
    for s, before, after in reversed(list(zip(steps, exprs, exprs[1:]))):
        out.extend(_inverse_step(s, before, after))
    return out


def _inverse_step(s: MoveStep, before: KClassExpr, after: KClassExpr) -> list:
    k = s.terms[0]
    rule = s.rule
    if rule == "Swap":
        return [s]
    if rule in ("Steinberg", "MinusAlpha", "UnitSlot"):
        if s.params:
            return [MoveStep(rule, (k,), s.slots)]
        c, es = before.terms[k]
        out = [MoveStep(rule, (k,), s.slots, es)]
        if c != 1:
            # re-create 1{es}, then split off the surplus and delete it again
            out += [
                MoveStep("BilinSplit", (k,), (), (es[0].field(c),)),
                MoveStep(rule, (k + 1,), s.slots),
            ]
        return out
    if rule == "BilinSplit":
        dest = s.terms[1] if len(s.terms) > 1 else k + 1
        first = k + 1 if dest <= k else k
        if not s.slots:
            return [MoveStep("BilinMerge", (first, dest), ())]
        if len(s.params) == 2:
            c, _ = before.terms[k]
            if c == 1:
                return [MoveStep("BilinMerge", (k,), s.slots)]
            e = _int_param(s.params[1], rule)
            if e == -1:
                u = s.params[0]
                return [MoveStep("BilinSplit", (k,), s.slots, (u.inverse(), s.params[1]))]
            if e < 1:
                raise ValueError("cannot invert a reverse power with exponent < 1 on a coefficient != 1")
            fld = s.params[0].field
            out = []
            for r in range(e - 1, 0, -1):
                out.append(MoveStep("BilinSplit", (k,), (), (fld(c * r),)))
            out += [MoveStep("BilinMerge", (k, k + 1), s.slots) for _ in range(e - 1)]
            return out
        return [MoveStep("BilinMerge", (first, dest), s.slots)]
    if rule == "BilinMerge":
        if len(s.terms) == 1:
            c, es = before.terms[k]
            fld = es[0].field
            return [MoveStep("BilinSplit", (k,), s.slots, (es[s.slots[0]], fld(c)))]
        l = s.terms[1]
        final = k - 1 if l < k else k
        ck, ek = before.terms[k]
        if not s.slots:
            return [MoveStep("BilinSplit", (final, l), (), (ek[0].field(ck),))]
        return [MoveStep("BilinSplit", (final, l), s.slots, (ek[s.slots[0]],))]
    if rule == "SumIdentity":
        c, es = before.terms[k]
        i, j = s.slots
        if s.params:
            return [make_sum_identity(c, after.terms[k][1], i, j, term=k)]
        return [make_sum_identity(c, after.terms[k][1], i, j, inverse_of=es, term=k)]
    if rule == "CoeffMod":
        c, es = before.terms[k]
        fld = es[0].field
        if len(after.terms) == len(before.terms):
            return [MoveStep("CoeffMod", (k,), (), (fld(c),))]
        return _recreate_zero_term(k, c, es)
    raise ValueError(f"no inverse available for {rule}")


def _recreate_zero_term(k, c, es) -> list:
    """Primitive moves producing c{es} (c = 0 mod p^m) at position k from nothing."""
    fld = es[0].field
    e0 = es[0]
    unit = _with(es, 0, fld.one())
    if e0 == 1:
        return [
            MoveStep("UnitSlot", (k,), (0,), es),
            MoveStep("BilinSplit", (k,), (), (fld(c),)),
            MoveStep("UnitSlot", (k + 1,), (0,)),
        ]
    return [
        MoveStep("UnitSlot", (k,), (0,), unit),
        MoveStep("BilinSplit", (k,), (0,), (e0,)),
        MoveStep("BilinSplit", (k + 1,), (0,), (e0, fld(-1))),
        MoveStep("CoeffMod", (k,), (), (fld(1 + c),)),
        MoveStep("BilinMerge", (k, k + 1), ()),
    ]


def make_sum_identity(coeff, entries, i, j, inverse_of=None, term=0) -> MoveStep:
    """A SumIdentity step with its expansion, applied to a term holding ``entries``.

    With ``inverse_of`` given, the step rewrites ``entries`` back to those
    original entries (the inverse rewrite).
    """
    if inverse_of is None:
        exp = sum_identity_expansion(coeff, entries, i, j)
        return MoveStep("SumIdentity", (term,), (i, j), (), exp)
    a = inverse_of[i]
    fwd = sum_identity_expansion(coeff, inverse_of, i, j)
    start = KClassExpr(Modulus(2, 1), ((coeff, tuple(inverse_of)),))
    exp = invert_steps(start, fwd)
    return MoveStep("SumIdentity", (term,), (i, j), (a,), exp)


# --- certificate construction -----------------------------------------------

@dataclass(frozen=True)
class Embedding:
    """Places a sub-symbol's slots at ``positions`` of a longer symbol whose
    remaining slots hold ``rest`` (in order)."""

    grade: int
    positions: tuple
    rest: tuple

    @classmethod
    def append(cls, sub_grade, rest):
        return cls(sub_grade + len(rest), tuple(range(sub_grade)), tuple(rest))

    @classmethod
    def prepend(cls, prefix, sub_grade):
        n = len(prefix)
        return cls(sub_grade + n, tuple(range(n, n + sub_grade)), tuple(prefix))

    def entries(self, sub):
        out = [None] * self.grade
        for s, pos in enumerate(self.positions):
            out[pos] = sub[s]
        it = iter(self.rest)
        return tuple(x if x is not None else next(it) for x in out)

    def compose(self, inner: "Embedding") -> "Embedding":
        """self after inner: inner embeds into self's sub-symbol."""
        positions = tuple(self.positions[p] for p in inner.positions)
        mid = [None] * len(self.positions)
        it = iter(inner.rest)
        inner_pos = set(inner.positions)
        for s in range(len(self.positions)):
            if s not in inner_pos:
                mid[s] = next(it)
        out = [None] * self.grade
        for s, pos in enumerate(self.positions):
            out[pos] = mid[s]
        it2 = iter(self.rest)
        for pos in range(self.grade):
            if pos not in self.positions:
                out[pos] = next(it2)
        rest = tuple(out[pos] for pos in range(self.grade) if pos not in positions)
        return Embedding(self.grade, positions, rest)


class Builder:
    """Records moves while tracking the current expression."""

    def __init__(self, start: KClassExpr):
        self.start = start
        self.expr = start
        self.steps: list = []

    def apply(self, step: MoveStep):
        if step.rule == "SumIdentity":
            k = step.terms[0]
            c, es = _term(self.expr.terms, k)
            i, j = step.slots
            if step.params:
                orig = sum_identity_result(es, i, j, step.params)
                step = make_sum_identity(c, es, i, j, inverse_of=orig, term=k)
            else:
                step = make_sum_identity(c, es, i, j, term=k)
        self.expr = apply_move(self.expr, step)
        self.steps.append(step)
        return self

    def extend(self, steps):
        for s in steps:
            self.apply(s)
        return self

    # convenience moves
    def find(self, coeff, entries, start=0):
        entries = tuple(entries)
        for idx in range(start, len(self.expr.terms)):
            if self.expr.terms[idx] == (coeff, entries):
                return idx
        raise KeyError(f"term {coeff}*{entries} not present")

    def term(self, k):
        return self.expr.terms[k]

    def sum_identity(self, k, i, j):
        return self.apply(MoveStep("SumIdentity", (k,), (i, j)))

    def sum_identity_inverse(self, k, i, j, a):
        return self.apply(MoveStep("SumIdentity", (k,), (i, j), (a,)))

    def transpose(self, k, p, q):
        return self.extend(transposition_swaps(k, p, q))

    def move_slot(self, k, src, dst):
        """Move slot src to position dst by adjacent swaps (one sign per swap)."""
        if src < dst:
            for s in range(src, dst):
                self.apply(MoveStep("Swap", (k,), (s,)))
        else:
            for s in range(src - 1, dst - 1, -1):
                self.apply(MoveStep("Swap", (k,), (s,)))
        return self

    def power(self, k, i):
        return self.apply(MoveStep("BilinMerge", (k,), (i,)))

    def reverse_power(self, k, i, base, exponent: int):
        fld = base.field
        return self.apply(MoveStep("BilinSplit", (k,), (i,), (base, fld(exponent))))

    def invert_slot(self, k, i):
        """c{..a..} -> (-c){..1/a..}."""
        a = self.expr.terms[k][1][i]
        return self.apply(MoveStep("BilinSplit", (k,), (i,), (a.inverse(), a.field(-1))))

    def split(self, k, i, u, dest=None):
        terms = (k,) if dest is None else (k, dest)
        return self.apply(MoveStep("BilinSplit", terms, (i,), (u,)))

    def merge(self, k, l, i=None):
        return self.apply(MoveStep("BilinMerge", (k, l), () if i is None else (i,)))

    def insert(self, rule, pos, slots, entries):
        return self.apply(MoveStep(rule, (pos,), tuple(slots), tuple(entries)))

    def delete(self, rule, k, slots):
        return self.apply(MoveStep(rule, (k,), tuple(slots)))

    def coeff_mod(self, k, value=None):
        params = () if value is None else (self.expr.terms[k][1][0].field(value),)
        return self.apply(MoveStep("CoeffMod", (k,), (), params))

    def replay(self, steps, offset=0, embedding: Embedding | None = None):
        """Re-apply a sub-derivation to a block starting at ``offset``,
        optionally lifted into longer symbols."""
        for s in steps:
            for t in transform_step(s, offset, embedding):
                self.apply(t)
        return self

    def certificate(self, field, end=None) -> Certificate:
        if end is not None and end.terms != self.expr.terms:
            raise ValueError("builder did not reach the requested end expression")
        return Certificate(self.start.modulus, field, self.start, self.expr, tuple(self.steps))


def transform_step(s: MoveStep, offset=0, emb: Embedding | None = None):
    terms = tuple(t + offset for t in s.terms)
    if emb is None:
        if s.rule == "SumIdentity":
            return [MoveStep(s.rule, terms, s.slots, s.params)]
        return [MoveStep(s.rule, terms, s.slots, s.params, s.expansion)]
    pos = emb.positions
    if s.rule == "Swap":
        i = s.slots[0]
        p, q = pos[i], pos[i + 1]
        if q == p + 1:
            return [MoveStep("Swap", terms, (p,))]
        return transposition_swaps(terms[0], p, q)
    slots = tuple(pos[i] for i in s.slots)
    params = s.params
    if s.rule in ("Steinberg", "MinusAlpha", "UnitSlot") and params:
        params = emb.entries(params)
    return [MoveStep(s.rule, terms, slots, params)]


# --- serialization ----------------------------------------------------------

def _expr_to_json(e: KClassExpr):
    return [[c, [str(x) for x in es]] for c, es in e.terms]


def _expr_from_json(data, modulus, field):
    return KClassExpr(modulus, tuple((int(c), tuple(parse_element(x, field) for x in es)) for c, es in data))


def step_to_json(s: MoveStep) -> dict:
    d = {
        "rule": s.rule,
        "terms": list(s.terms),
        "slots": list(s.slots),
        "params": [str(x) for x in s.params],
    }
    if s.expansion is not None:
        d["expansion"] = [step_to_json(t) for t in s.expansion]
    return d


def step_from_json(d: dict, field) -> MoveStep:
    exp = d.get("expansion")
    return MoveStep(
        d["rule"],
        tuple(int(t) for t in d["terms"]),
        tuple(int(t) for t in d["slots"]),
        tuple(parse_element(x, field) for x in d["params"]),
        None if exp is None else tuple(step_from_json(t, field) for t in exp),
    )


def certificate_to_json(c: Certificate) -> dict:
    return {
        "version": 1,
        "modulus": {"p": c.modulus.p, "m": c.modulus.m},
        "field": str(c.field),
        "start": _expr_to_json(c.start),
        "end": _expr_to_json(c.end),
        "steps": [step_to_json(s) for s in c.steps],
    }


def certificate_from_json(d: dict) -> Certificate:
    if d.get("version") != 1:
        raise ParseError("unsupported certificate version")
    modulus = Modulus(int(d["modulus"]["p"]), int(d["modulus"]["m"]))
    fld = Field.parse(d["field"])
    return Certificate(
        modulus,
        fld,
        _expr_from_json(d["start"], modulus, fld),
        _expr_from_json(d["end"], modulus, fld),
        tuple(step_from_json(s, fld) for s in d["steps"]),
    )


def expr_to_json(e: KClassExpr) -> dict:
    return {"modulus": {"p": e.modulus.p, "m": e.modulus.m}, "terms": _expr_to_json(e)}


def expr_from_json(d: dict, field) -> KClassExpr:
    modulus = Modulus(int(d["modulus"]["p"]), int(d["modulus"]["m"]))
    return _expr_from_json(d["terms"], modulus, field)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# --- class-expression grammar -----------------------------------------------

_TERM_RE = re.compile(r"\s*(?:(\d+)\s*\*\s*)?\{(.*?)\}\s*@\s*(\d+)\s*\^\s*(\d+)\s*")


def _split_elems(body: str):
    out, depth, cur = [], 0, ""
    for ch in body:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [x.strip() for x in out]


def parse_class(text: str, field: Field | None = None) -> KClassExpr:
    """Parse ``class := term (("+"|"-") term)*`` with
    ``term := [int "*"] "{" elem ("," elem)* "}" "@" p "^" m``."""
    pos, terms, modulus = 0, [], None
    text = text.strip()
    sign = 1
    if text.startswith("-"):
        sign, pos = -1, 1
    elif text.startswith("+"):
        pos = 1
    while True:
        m = _TERM_RE.match(text, pos)
        if not m:
            raise ParseError(f"cannot parse class expression at offset {pos}: {text[pos:]!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        es = tuple(parse_element(x, field) for x in _split_elems(m.group(2)))
        mod = Modulus(int(m.group(3)), int(m.group(4)))
        if modulus is not None and mod != modulus:
            raise ParseError("mixed moduli in one class expression")
        modulus = mod
        if field is None:
            field = es[0].field
            es = tuple(parse_element(str(x), field) for x in es)
        terms.append((sign * coeff, es))
        pos = m.end()
        if pos >= len(text):
            break
        if text[pos] not in "+-":
            raise ParseError(f"expected '+' or '-' at offset {pos}")
        sign = 1 if text[pos] == "+" else -1
        pos += 1
    try:
        return KClassExpr(modulus, tuple(terms))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
