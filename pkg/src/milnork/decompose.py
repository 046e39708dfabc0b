"""Certificate-emitting decompositions of Shift pre-images mod 2^m.

Every engine starts from the target class in K_n/2^(m+1), rewrites it with
recorded moves until every coefficient is a multiple of 2, and reports the
halved terms as the pre-image.  The emitted certificate runs the other way:
from 2*terms to the target.  Injectivity of Shift (roots of unity of order
2^(m+1) in the field) is recorded as an assumption, never checked.

Engines share one ``Builder`` and address slots by their physical position,
so a sub-decomposition can act on some slots of a longer symbol while the
other slots ride along unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DegenerateWitness,
    MissingWitness,
    OutOfRange,
    SubDecompositionInvalid,
    WitnessInvalid,
)
from .forms import is_zero_vector, pfister_value
from .milnor import (
    Builder,
    Certificate,
    KClassExpr,
    Modulus,
    Symbol,
    certificate_from_json,
    certificate_to_json,
    check_certificate,
    expr_from_json,
    expr_to_json,
    invert_steps,
)
from .fields import Field
from .witness import (
    WitnessBundle,
    WitnessRequest,
    derive_recursion_witness,
    norm_from_isotropy,
    resolve,
    t2_level,
    telescope,
)

THEOREMS = ("t1", "t2", "corollary", "t3", "t4", "t5")


@dataclass(frozen=True)
class CertifiedDecomposition:
    theorem: str
    target: KClassExpr
    terms: KClassExpr
    certificate: Certificate
    bound: int
    assumptions: tuple = ()
    notes: tuple = ()

    def __len__(self):
        return len(self.terms)

    def to_json(self):
        d = {
            "theorem": self.theorem,
            "target": expr_to_json(self.target),
            "terms": expr_to_json(self.terms),
            "bound": self.bound,
            "certificate": certificate_to_json(self.certificate),
            "assumptions": list(self.assumptions),
        }
        if self.notes:
            d["notes"] = list(self.notes)
        return d

    @classmethod
    def from_json(cls, d):
        cert = certificate_from_json(d["certificate"])
        return cls(
            d["theorem"],
            expr_from_json(d["target"], cert.field),
            expr_from_json(d["terms"], cert.field),
            cert,
            int(d["bound"]),
            tuple(d.get("assumptions", ())),
            tuple(d.get("notes", ())),
        )


def lift(terms: KClassExpr) -> KClassExpr:
    """p * terms, read at the raised modulus."""
    p = terms.modulus.p
    return KClassExpr(terms.modulus.raised(), tuple((c * p, es) for c, es in terms.terms))


def validate_decomposition(d: CertifiedDecomposition) -> None:
    """Raise SubDecompositionInvalid unless d is internally consistent and certified."""
    cert = d.certificate
    if len(d.terms) > d.bound:
        raise SubDecompositionInvalid(f"{len(d.terms)} terms exceed the bound {d.bound}")
    if cert.start.terms != lift(d.terms).terms or cert.start.modulus != d.terms.modulus.raised():
        raise SubDecompositionInvalid("certificate does not start at p * terms")
    if cert.end.terms != d.target.terms or cert.end.modulus != d.target.modulus:
        raise SubDecompositionInvalid("certificate does not end at the target")
    res = check_certificate(cert)
    if not res:
        raise SubDecompositionInvalid(f"certificate invalid at step {res.step}: {res.reason}")


def _assumption(modulus: Modulus):
    return (f"mu_{{{modulus.p}^{modulus.m}}} in F",)


def _finish(theorem, target: KClassExpr, b: Builder, bound: int, notes=()) -> CertifiedDecomposition:
    p = target.modulus.p
    out = b.expr
    if any(c % p for c, _ in out.terms):
        raise AssertionError(f"derivation ended with a coefficient not divisible by {p}")
    terms = KClassExpr(target.modulus.lowered(), tuple((c // p, es) for c, es in out.terms))
    steps = invert_steps(target, b.steps)
    cert = Certificate(target.modulus, target.field, out, target, tuple(steps))
    return CertifiedDecomposition(theorem, target, terms, cert, bound, _assumption(target.modulus), tuple(notes))


# --- T1 witnesses ---------------------------------------------------------------

def resolve_t1(bundle: WitnessBundle, entries):
    """("square"|"norm"|"rep"|"iso", data) for a grade-g Shift-image symbol."""
    entries = tuple(entries)
    g = len(entries)
    if g == 2:
        req = WitnessRequest("NormRepresentation", entries)
        data = bundle.lookup(req)
        if data is not None:
            return "norm", data
        rep = bundle.lookup(WitnessRequest("T1Representation", entries))
        if rep is not None:
            return "norm", rep[0]
        iso = bundle.lookup(WitnessRequest("Isotropy", entries))
        if iso is not None:
            xy = norm_from_isotropy(entries[0], iso)
            if xy is not None:
                return "norm", xy
        return "norm", resolve(bundle, req)
    iso = bundle.lookup(WitnessRequest("Isotropy", entries[:-1]))
    if iso is not None:
        return "iso", iso
    return "rep", resolve(bundle, WitnessRequest("T1Representation", entries))


def _derived(slots, t):
    """Witness for the symbol (slots..., phi(t)^{-1}) with phi = <<slots>>."""
    try:
        entries, ts = derive_recursion_witness(tuple(slots) + (None,), t)
    except ValueError as exc:
        raise DegenerateWitness(str(exc)) from exc
    g = len(entries)
    kind = "square" if g == 1 else "norm" if g == 2 else "rep"
    return entries, (kind, ts[0] if g <= 2 else tuple(ts))


def _t1_base(b: Builder, k, pos, xy):
    """{a, x^2 - a y^2} at slots pos of term k -> 2*(one or two symbols); returns the count."""
    p0, p1 = pos
    x, y = xy
    if x.is_zero() and y.is_zero():
        from .errors import BothZero

        raise BothZero("x and y are both zero")
    alpha = b.term(k)[1][p0]
    beta = b.term(k)[1][p1]
    if beta != x * x - alpha * y * y:
        raise WitnessInvalid("norm representation does not match the symbol")
    if y.is_zero():
        b.reverse_power(k, p1, x, 2)
        return 1
    if x.is_zero():
        b.split(k, p1, -alpha)
        b.delete("MinusAlpha", k, (p0, p1))
        b.reverse_power(k, p1, y, 2)
        return 1
    b.split(k, p1, y * y)
    b.reverse_power(k, p1, y, 2)
    b.sum_identity(k + 1, p0, p1)
    b.reverse_power(k + 1, p0, x / y, 2)
    return 2


def _t1_apply(b: Builder, k, pos, wit, bundle=None):
    """Rewrite the sub-symbol at slots ``pos`` of term k; returns the number of output terms."""
    pos = tuple(pos)
    entries = tuple(b.term(k)[1][p] for p in pos)
    if wit is None:
        wit = resolve_t1(bundle, entries)
    kind, data = wit
    g = len(pos)
    if kind == "square":
        (w,) = data
        b.reverse_power(k, pos[0], w, 2)
        return 1
    if kind == "norm":
        return _t1_base(b, k, pos, data)
    if kind == "iso":
        if bundle is None:
            raise MissingWitness(WitnessRequest("T1Representation", entries[:-1]))
        return _t1_apply(b, k, pos[:-1], None, bundle)
    ts = data
    if g == 2:
        return _t1_base(b, k, pos, ts[0])
    alphas = entries
    betas = {}
    support = []
    for i in range(2, g):
        t = ts[i - 1]
        if is_zero_vector(t):
            betas[i] = alphas[i - 1]
            continue
        phi = pfister_value(alphas[: i - 1], t)
        if phi.is_zero():
            raise DegenerateWitness(f"phi_{i - 1}(t_{i - 1}) = 0")
        betas[i] = phi * alphas[i - 1]
        support.append(i)
    t0 = ts[0]
    # check the telescoping before recording any move
    slot_vals = [betas[i] for i in support] + [alphas[-1]]
    acc = len(support)
    try:
        if is_zero_vector(t0):
            if not support:
                raise DegenerateWitness("empty partial sum")
            vals = telescope(slot_vals, acc, list(range(len(support) - 1)))
            if vals[acc] != -vals[len(support) - 1]:
                raise WitnessInvalid("partial sum does not cancel the last slot")
        else:
            vals = telescope(slot_vals, acc, list(range(len(support))))
            if vals[acc] != pfister_value(alphas[:1], t0):
                raise WitnessInvalid("telescoped slot differs from phi_1(t_0)")
    except WitnessInvalid as exc:
        raise DegenerateWitness(str(exc)) from exc

    for i in reversed(support):
        b.split(k, pos[i - 1], betas[i])
    count = 0
    # pieces sit at k+1.. in increasing i; rewrite them from the back
    for idx in range(len(support) - 1, -1, -1):
        i = support[idx]
        sub_entries, sub_wit = _derived(alphas[: i - 1], ts[i - 1])
        count += _t1_apply(b, k + 1 + idx, pos[:i], sub_wit)
    last = pos[-1]
    if is_zero_vector(t0):
        for i in support[:-1]:
            b.sum_identity(k, last, pos[i - 1])
        b.delete("MinusAlpha", k, (pos[support[-1] - 1], last))
        return count
    for i in support:
        b.sum_identity(k, last, pos[i - 1])
    return count + _t1_base(b, k, (pos[0], last), t0)


# --- T2 ---------------------------------------------------------------------------

def _common_tail(x, y):
    """Smallest i with x[i:] == y[i:]."""
    i = len(x)
    while i > 0 and x[i - 1] == y[i - 1]:
        i -= 1
    return i


def _try_t1(bundle, entries):
    try:
        return resolve_t1(bundle, entries)
    except MissingWitness:
        return None


def _t2_apply(b: Builder, k, sigma, alphas, betas, bundle, inverted=False):
    """Rewrite the block [sigma{alphas}, -sigma{betas, alphas[i:]}] at terms k, k+1.

    ``inverted`` means term k+1 already carries the opposite sign with its first
    entry inverted (only used when i = 1).
    """
    alphas, betas = tuple(alphas), tuple(betas)
    i = len(betas)
    n = len(alphas)
    if i == 0:
        b.merge(k, k + 1)
        b.coeff_mod(k)
        return 0
    if i == 1:
        if not inverted:
            b.invert_slot(k + 1, 0)
        b.merge(k, k + 1, 0)
        if b.term(k)[1][0] == 1:
            b.delete("UnitSlot", k, (0,))
            return 0
        return _t1_apply(b, k, range(n), None, bundle)
    first = alphas
    second = betas + alphas[i:]
    w1 = _try_t1(bundle, first)
    w2 = _try_t1(bundle, second) if w1 is not None else None
    if w1 is not None and w2 is not None:
        c2 = _t1_apply(b, k + 1, range(n), w2, bundle)
        return _t1_apply(b, k, range(n), w1, bundle) + c2
    ts = resolve(bundle, WitnessRequest("T2Representation", (alphas, betas)))
    try:
        gammas, support, deltas, (acc, others, transposed) = t2_level(alphas, betas, ts)
    except WitnessInvalid as exc:
        raise DegenerateWitness(str(exc)) from exc
    for r in support:
        b.split(k + 1, r - 1, gammas[r - 1])
    count = 0
    # pieces sit at k+2.. in decreasing r
    order = list(reversed(support))
    for idx in range(len(order) - 1, -1, -1):
        r = order[idx]
        slots = betas[r:] + alphas[i:]
        _, wit = _derived(slots, ts[r - 1])
        pos = tuple(range(r, n)) + (r - 1,)
        count += _t1_apply(b, k + 2 + idx, pos, wit)
    for j in others:
        b.sum_identity(k + 1, acc, j)
    # an inversion right before the i = 1 step would cancel against it
    skip = transposed and len(deltas) == 1
    if transposed:
        b.transpose(k + 1, acc, i - 1)
        if not skip:
            b.invert_slot(k + 1, 0)
    head = b.term(k + 1)[1]
    if skip:
        head = (head[0].inverse(),) + head[1:]
    if head != tuple(deltas) + alphas[i - 1:]:
        raise AssertionError("telescoping did not reach the next level")
    return count + _t2_apply(b, k, sigma, alphas, deltas, bundle, inverted=skip)


def _modulus(m, p=2):
    if m < 1:
        raise OutOfRange("m must be at least 1")
    return Modulus(p, m + 1)


def _entries(x, fld=None):
    if isinstance(x, Symbol):
        return tuple(x.entries)
    return tuple(fld(e) if fld is not None else e for e in x)


def t1(symbol, bundle: WitnessBundle, m=None) -> CertifiedDecomposition:
    """Pre-image of the Shift image {a_1..a_n} in K_n/2^(m+1) with at most 2^(n-1) terms.

    ``symbol`` is a Symbol (whose modulus fixes m) or a tuple of entries with m given.
    """
    if isinstance(symbol, Symbol):
        entries = symbol.entries
        if m is None:
            m = symbol.modulus.m - 1
    else:
        entries = tuple(symbol)
    n = len(entries)
    target = KClassExpr(_modulus(m), ((1, tuple(entries)),))
    b = Builder(target)
    _t1_apply(b, 0, range(n), None, bundle)
    return _finish("t1", target, b, bound("t1", n))


def t2(alphas, betas, i, bundle: WitnessBundle, m=1) -> CertifiedDecomposition:
    """Pre-image of {alphas} - {betas, alphas[i:]} with at most T2(n, i) terms."""
    alphas, betas = tuple(alphas), tuple(betas)
    n = len(alphas)
    if len(betas) != i or not 1 <= i <= n:
        raise OutOfRange(f"need 1 <= i <= n and {i} betas")
    target = KClassExpr(_modulus(m), ((1, alphas), (-1, betas + alphas[i:])))
    b = Builder(target)
    _t2_apply(b, 0, 1, alphas, betas, bundle)
    return _finish("t2", target, b, bound("t2", n, i))


def corollary_length2(x, y, bundle: WitnessBundle, m=1) -> CertifiedDecomposition:
    """Pre-image of {x} - {y}, both grade n, with at most (n-1)2^n + 1 terms."""
    x, y = _entries(x), _entries(y)
    d = t2(x, y, len(x), bundle, m)
    return CertifiedDecomposition("corollary", d.target, d.terms, d.certificate,
                                  bound("corollary", len(x)), d.assumptions)


# --- bounds and plans ----------------------------------------------------------------

def _t2_bound(n, i):
    return sum((i - j + 1) * 2 ** (n - j) for j in range(1, i + 1))


def bound(theorem, n=None, i=None, *, extension=False) -> int:
    """Closed-form term bounds."""
    if theorem in ("t4", "t5"):
        return 46 if theorem == "t4" else (30 if extension else 15)
    if n is None or n < 1:
        raise OutOfRange("grade must be at least 1")
    if theorem == "t1":
        return 2 ** (n - 1)
    if theorem == "t2":
        if i is None or not 1 <= i <= n:
            raise OutOfRange(f"need 1 <= i <= {n}")
        return _t2_bound(n, i)
    if theorem == "corollary":
        return (n - 1) * 2**n + 1
    if theorem == "t3":
        return 3 * ((n - 1) * 2**n + 1)
    raise OutOfRange(f"unknown theorem {theorem!r}")


@dataclass(frozen=True)
class PlanNode:
    tag: str
    params: tuple
    contribution: int = 0
    children: tuple = ()

    @property
    def total(self) -> int:
        return self.contribution + sum(c.total for c in self.children)

    def lines(self, depth=0):
        yield "  " * depth + f"{self.tag}{self.params} -> {self.total}"
        for c in self.children:
            yield from c.lines(depth + 1)

    def __str__(self):
        return "\n".join(self.lines())


def plan(theorem, n=None, i=None) -> PlanNode:
    """Recursion tree of an engine; every node's total is its worst-case term count."""
    if theorem == "t1":
        if n == 1:
            return PlanNode("square", (1,), 1)
        if n == 2:
            return PlanNode("base", (2,), 2)
        kids = (PlanNode("base", (2,), 2),) + tuple(plan("t1", j) for j in range(2, n))
        return PlanNode("t1", (n,), 0, kids)
    if theorem == "t2":
        bound("t2", n, i)
        if i == 1:
            return PlanNode("t2", (n, 1), 0, (plan("t1", n),))
        kids = (plan("t2", n, i - 1),) + tuple(plan("t1", n - r + 1) for r in range(1, i + 1))
        return PlanNode("t2", (n, i), 0, kids)
    if theorem == "corollary":
        return PlanNode("corollary", (n,), 0, (plan("t2", n, n),))
    if theorem == "t3":
        return PlanNode("t3", (n,), 0, tuple(plan("corollary", n) for _ in range(3)))
    if theorem == "t4":
        kids = tuple(plan("t2", 2, 2) for _ in range(8)) + tuple(plan("t1", 2) for _ in range(3))
        return PlanNode("t4", (2,), 0, kids)
    if theorem == "t5":
        return PlanNode("t5", (3,), 0, tuple(PlanNode("difference", (3,), 3) for _ in range(5)))
    raise OutOfRange(f"unknown theorem {theorem!r}")


# --- T3 and T4 --------------------------------------------------------------------

def _neg(es):
    return ("-", tuple(es))


def _make_pairs(b: Builder, layout, present, pairs):
    """Insert +X and -X for each X in ``pairs`` at their places in ``layout``.

    ``present`` holds the layout indices already in the expression.
    """
    present = set(present)
    for x in pairs:
        ip, ineg = layout.index(("+", x)), layout.index(("-", x))
        p = sum(1 for j in present if j < ip)
        b.insert("UnitSlot", p, (0,), (x[0].field.one(),) + x[1:])
        present.add(ip)
        q = sum(1 for j in present if j < ineg)
        b.split(p, 0, x[0], dest=q)
        present.add(ineg)
        b.invert_slot(q, 0)


def _difference(b: Builder, k, first, second, bundle):
    """Block [sign{first}, -sign{second}] -> T2 on the slots where they differ."""
    (s1, x), (s2, y) = first, second
    if s1 == s2:
        raise AssertionError("difference block with equal signs")
    i = _common_tail(x, y)
    return _t2_apply(b, k, 1 if s1 == "+" else -1, x, y[:i], bundle)


def t3(symbols, link, bundle: WitnessBundle, m=1) -> CertifiedDecomposition:
    """Pre-image of S1 + S2 + S3 from a linkage {a}, {b}, {(ab)^-1} sharing slots c_2..c_n."""
    symbols = tuple(_entries(s) for s in symbols)
    if len(symbols) != 3 or len({len(s) for s in symbols}) != 1:
        raise OutOfRange("t3 takes three symbols of one grade")
    n = len(symbols[0])
    req = WitnessRequest("Linkage", symbols)
    if link is None:
        link = resolve(bundle, req)
    else:
        from .witness import verify_witness

        verify_witness(req, link)
    a, bb, cs = link["a"], link["b"], tuple(link["c"])
    one = a.field.one()
    target = KClassExpr(_modulus(m), tuple((1, s) for s in symbols))
    b = Builder(target)
    b.insert("UnitSlot", 1, (0,), (one,) + cs)
    b.apply(_coeff_split(1, one.field(-1)))
    b.delete("UnitSlot", 2, (0,))
    b.split(1, 0, a, dest=3)
    b.split(3, 0, bb, dest=5)
    links = [(a,) + cs, (bb,) + cs, ((a * bb).inverse(),) + cs]
    for j in (2, 1, 0):
        _difference(b, 2 * j, ("+", symbols[j]), ("-", links[j]), bundle)
    return _finish("t3", target, b, bound("t3", n))


def _coeff_split(k, e):
    from .milnor import MoveStep

    return MoveStep("BilinSplit", (k,), (), (e,))


def t4(symbols, chain, bundle: WitnessBundle, m=1) -> CertifiedDecomposition:
    """Pre-image of S1 + S2 - S3 - S4 (grade 2) through a chain of one-slot changes."""
    from .witness import sivatski_symbols, verify_witness

    symbols = tuple(_entries(s) for s in symbols)
    if len(symbols) != 4 or any(len(s) != 2 for s in symbols):
        raise OutOfRange("t4 takes four grade-2 symbols")
    req = WitnessRequest("SivatskiChain", symbols)
    if chain is None:
        chain = resolve(bundle, req)
    else:
        verify_witness(req, chain)
    L = sivatski_symbols(chain)
    S1, S2, S3, S4 = symbols

    def e(sign, key):
        return (sign, L[key])

    blocks = [
        [("+", S1), e("-", "A1")],
        [e("-", "A2"), e("+", "A1'")],
        [e("-", "A3"), e("+", "A2'")],
        [("+", S2), e("-", "C1")],
        [e("-", "C2"), e("+", "C1'")],
        [e("-", "C3"), e("+", "C2'")],
    ]
    blocks += [[e("+", f"A{k}"), e("+", f"C{k}"), e("-", f"A{k}'"), e("-", f"C{k}'")] for k in (1, 2, 3)]
    blocks += [[("-", S3), e("+", "A3'")], [("-", S4), e("+", "C3'")]]
    layout = [item for blk in blocks for item in blk]
    starts = []
    for blk in blocks:
        starts.append(sum(len(x) for x in blocks[: len(starts)]))
    originals = [("+", S1), ("+", S2), ("-", S3), ("-", S4)]
    present = [layout.index(o) for o in originals]
    target = KClassExpr(_modulus(m), tuple((1 if s == "+" else -1, x) for s, x in originals))
    b = Builder(target)
    pairs = [L[key] for key in ("A1", "A1'", "A2", "A2'", "A3", "A3'", "C1", "C1'", "C2", "C2'", "C3", "C3'")]
    _make_pairs(b, layout, present, pairs)
    if [(1 if s == "+" else -1, x) for s, x in layout] != list(b.expr.terms):
        raise AssertionError("pair insertion did not reach the block layout")
    for bi in reversed(range(len(blocks))):
        blk, s = blocks[bi], starts[bi]
        if len(blk) == 2:
            _difference(b, s, blk[0], blk[1], bundle)
            continue
        a, c = blk[0][1][0], blk[1][1][0]
        b.invert_slot(s + 2, 1)
        b.merge(s, s + 2, 1)
        b.invert_slot(s + 2, 1)
        b.merge(s + 1, s + 2, 1)
        b.merge(s, s + 1, 0)
        # F_k merges to {a_k c_k, phi_k^-1}
        _, wit = _derived((a * c,), chain["t"][bi - 6])
        _t1_apply(b, s, (0, 1), wit)
    return _finish("t4", target, b, bound("t4"))
