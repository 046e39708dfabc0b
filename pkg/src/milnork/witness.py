"""Witness storage and resolution, plus generators of constructed instances.

A witness is arithmetic data whose existence is guaranteed by theory but
which the algorithms cannot find on their own (isotropy vectors,
representation vectors, chain data).  Every witness is re-verified when it
is inserted into a bundle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import DegenerateSample, MissingWitness, WitnessInvalid, ZeroVector
from .fields import QQ, Elem, Field, parse_element
from .forms import (
    NOT_FOUND,
    DiagonalForm,
    PfisterForm,
    expand,
    hilbert_symbol_Q,
    is_zero_vector,
    isotropy_witness_search,
    pfister_value,
    relevant_places,
    split_t1,
    verify_representation_t1,
)

KINDS = (
    "NormRepresentation",
    "T1Representation",
    "Isotropy",
    "T2Representation",
    "SlotExchange",
    "Linkage",
    "SivatskiChain",
    "RostChain",
    "AlgebraElement",
    "SubDecomposition",
)
SEARCHABLE = ("NormRepresentation", "Isotropy")


@dataclass(frozen=True)
class WitnessRequest:
    """``payload`` identifies the object: entry tuples, or tuples of them."""

    kind: str
    payload: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown witness kind {self.kind!r}")
        object.__setattr__(self, "payload", _freeze(self.payload))

    def to_json(self):
        return {"kind": self.kind, "payload": to_jsonable(self.payload)}

    def __str__(self):
        return f"{self.kind}{to_jsonable(self.payload)}"


def _freeze(x):
    if isinstance(x, (list, tuple)):
        return tuple(_freeze(y) for y in x)
    return x


def to_jsonable(x):
    if isinstance(x, Elem):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [to_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {k: to_jsonable(v) for k, v in x.items()}
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


def from_jsonable(x):
    if isinstance(x, str):
        return parse_element(x)
    if isinstance(x, list):
        return tuple(from_jsonable(y) for y in x)
    if isinstance(x, dict):
        return {k: from_jsonable(v) for k, v in x.items()}
    return x


# --- verification predicates ------------------------------------------------

def _nonzero(xs, what):
    if any(x.is_zero() for x in xs):
        raise WitnessInvalid(f"{what}: zero entry")


def t2_form_slots(alphas, betas, r):
    """Slots of phi_r = <<b_{r+1},...,b_i, a_{i+1},...,a_n>> (r counted from 1)."""
    i = len(betas)
    return tuple(betas[r:]) + tuple(alphas[i:])


def t2_value(alphas, betas, ts):
    return sum(
        (pfister_value(t2_form_slots(alphas, betas, r), t) * betas[r - 1]
         for r, t in enumerate(ts, start=1)),
        alphas[0].field.zero(),
    )


def verify_witness(req: WitnessRequest, data) -> None:
    """Raise WitnessInvalid unless ``data`` is a valid witness for ``req``."""
    k, p = req.kind, req.payload
    try:
        if k == "NormRepresentation":
            alpha, beta = p
            x, y = data
            if x.is_zero() and y.is_zero():
                raise WitnessInvalid("x and y both zero")
            if beta != x * x - alpha * y * y:
                raise WitnessInvalid("beta != x^2 - alpha y^2")
        elif k == "T1Representation":
            _nonzero(p, k)
            if not verify_representation_t1(p, data):
                raise WitnessInvalid("representation identity fails")
        elif k == "Isotropy":
            _nonzero(p, k)
            if is_zero_vector(data):
                raise WitnessInvalid("zero vector")
            if not pfister_value(p, data).is_zero():
                raise WitnessInvalid("vector is not isotropic")
        elif k == "T2Representation":
            alphas, betas = p
            i = len(betas)
            if len(data) != i:
                raise WitnessInvalid(f"expected {i} vectors")
            for r, t in enumerate(data, start=1):
                if len(t) != 2 ** len(t2_form_slots(alphas, betas, r)):
                    raise WitnessInvalid(f"t_{r} has the wrong dimension")
            if alphas[i - 1] != t2_value(alphas, betas, data):
                raise WitnessInvalid("alpha_i is not the stated combination")
        elif k == "SlotExchange":
            _nonzero(data, k)
        elif k == "Linkage":
            a, b, cs = data["a"], data["b"], data["c"]
            _nonzero((a, b) + tuple(cs), k)
            if len(cs) != len(p[0]) - 1:
                raise WitnessInvalid("linkage needs n-1 common slots")
        elif k == "SivatskiChain":
            for key in ("a", "b", "c", "d"):
                if len(data[key]) != 3:
                    raise WitnessInvalid(f"chain needs three values of {key}")
                _nonzero(data[key], k)
            for j in range(3):
                t = data["t"][j]
                phi = pfister_value((data["a"][j] * data["c"][j],), t)
                if phi.is_zero():
                    raise WitnessInvalid(f"phi_{j + 1}(t_{j + 1}) = 0")
        elif k == "RostChain":
            if len(data) != 3:
                raise WitnessInvalid("Rost chain needs c1, c2, c3")
            _nonzero(data, k)
        elif k == "AlgebraElement":
            from .mod3 import SymbolAlgebra, verify_t5_witness

            alpha, beta, gamma = p
            A = SymbolAlgebra(alpha, beta)
            verify_t5_witness(A, data["z"], data["coeffs"], gamma)
        elif k == "SubDecomposition":
            from .decompose import validate_decomposition

            validate_decomposition(data)
    except (ValueError, TypeError, KeyError, IndexError) as exc:
        raise WitnessInvalid(f"{k}: malformed witness ({exc})") from exc


# --- bundles ----------------------------------------------------------------

@dataclass(frozen=True)
class Policy:
    mode: str = "lookup-only"
    height: int | None = None

    def __post_init__(self):
        if self.mode not in ("lookup-only", "bounded-search"):
            raise ValueError(f"unknown policy {self.mode!r}")
        if self.mode == "bounded-search" and not self.height:
            raise ValueError("bounded search needs a height")

    def to_json(self):
        d = {"mode": self.mode}
        if self.height is not None:
            d["height"] = self.height
        return d


@dataclass(frozen=True)
class WitnessBundle:
    entries: tuple = ()
    policy: Policy = dc_field(default_factory=Policy)

    @classmethod
    def of(cls, items=(), policy=None):
        b = cls((), policy or Policy())
        for req, data in items:
            b = b.with_witness(req, data)
        return b

    def with_witness(self, req: WitnessRequest, data) -> "WitnessBundle":
        data = _freeze(data) if not isinstance(data, dict) else data
        verify_witness(req, data)
        kept = tuple((r, d) for r, d in self.entries if r != req)
        return WitnessBundle(kept + ((req, data),), self.policy)

    def merged(self, other: "WitnessBundle") -> "WitnessBundle":
        out = self
        for r, d in other.entries:
            out = out.with_witness(r, d)
        return out

    def with_policy(self, policy: Policy) -> "WitnessBundle":
        return WitnessBundle(self.entries, policy)

    def lookup(self, req: WitnessRequest):
        for r, d in self.entries:
            if r == req:
                return d
        return None

    def __contains__(self, req):
        return self.lookup(req) is not None

    def __len__(self):
        return len(self.entries)

    def to_json(self):
        return {
            "witnesses": [
                {"kind": r.kind, "payload": to_jsonable(r.payload), "data": _data_to_json(r.kind, d)}
                for r, d in self.entries
            ],
            "policy": self.policy.to_json(),
        }

    @classmethod
    def from_json(cls, doc):
        pol = doc.get("policy", {"mode": "lookup-only"})
        policy = Policy(pol["mode"], pol.get("height"))
        items = []
        for w in doc["witnesses"]:
            req = WitnessRequest(w["kind"], from_jsonable(w["payload"]))
            items.append((req, _data_from_json(w["kind"], w["data"])))
        return cls.of(items, policy)


def _data_to_json(kind, data):
    if kind == "SubDecomposition":
        return data.to_json()
    if kind == "AlgebraElement":
        from .mod3 import element_to_json

        return {"z": element_to_json(data["z"]), "coeffs": to_jsonable(data["coeffs"])}
    return to_jsonable(data)


def _data_from_json(kind, data):
    if kind == "SubDecomposition":
        from .decompose import CertifiedDecomposition

        return CertifiedDecomposition.from_json(data)
    if kind == "AlgebraElement":
        from .mod3 import element_from_json

        return {"z": element_from_json(data["z"]), "coeffs": from_jsonable(data["coeffs"])}
    return from_jsonable(data)


def resolve(bundle: WitnessBundle, req: WitnessRequest):
    """Stored witness, else bounded search when allowed, else MissingWitness."""
    data = bundle.lookup(req)
    if data is not None:
        return data
    if bundle.policy.mode == "bounded-search" and req.kind in SEARCHABLE:
        found = _search(req, bundle.policy.height)
        if found is not None:
            verify_witness(req, found)
            return found
    raise MissingWitness(req)


def _search(req, height):
    if req.kind == "NormRepresentation":
        alpha, beta = req.payload
        if alpha.field != QQ:
            return None
        res = norm_equation_Q(alpha, beta, height)
        return res if isinstance(res, tuple) else None
    v = isotropy_witness_search(expand(PfisterForm(req.payload)), height)
    return v if isinstance(v, tuple) else None


# --- norm equations over Q --------------------------------------------------

class ProvablyUnsolvable:
    def __repr__(self):
        return "ProvablyUnsolvable"

    def __bool__(self):
        return False


PROVABLY_UNSOLVABLE = ProvablyUnsolvable()


def norm_equation_Q(alpha, beta, height_bound: int):
    """(x, y) with beta = x^2 - alpha y^2 and height <= bound, NotFound, or ProvablyUnsolvable."""
    alpha, beta = QQ(alpha), QQ(beta)
    if alpha.is_zero() or beta.is_zero():
        raise ValueError("alpha and beta must be nonzero")
    for place in relevant_places(alpha, beta):
        if hilbert_symbol_Q(alpha, beta, place) == -1:
            return PROVABLY_UNSOLVABLE
    v = isotropy_witness_search(DiagonalForm((QQ(1), -alpha, -beta)), height_bound)
    if not isinstance(v, tuple):
        return NOT_FOUND
    x, y, w = v
    if w.is_zero():
        # alpha is a square: beta = ((beta+1)/2)^2 - ((beta-1)/2)^2 after rescaling y
        s = x / y
        return ((beta + 1) / 2, (beta - 1) / (2 * s))
    return (x / w, y / w)


# --- recursion witnesses ----------------------------------------------------

def derive_recursion_witness(alphas, t):
    """Witness for {a_1,...,a_{i-1}, phi_{i-1}(t)^{-1}} from t in V_{phi_{i-1}}.

    Returns (entries, ts) where ts is the T1 representation of the new symbol
    (for grade 2 the single vector (x, y) of a norm representation).
    """
    alphas = tuple(alphas)
    if is_zero_vector(t):
        raise ZeroVector("t must be nonzero")
    slots = alphas[:-1]
    val = pfister_value(slots, t)
    if val.is_zero():
        raise ZeroVector("phi(t) = 0: the form is isotropic at t")
    tp = tuple(x / val for x in t)
    entries = slots + (val.inverse(),)
    return entries, split_t1(tp, len(entries))


def norm_from_isotropy(alpha, v):
    """(x, y) with beta = x^2 - alpha y^2 from an isotropic vector of <<alpha, beta>>."""
    v0, v1, v2, v3 = v
    den = v2 * v2 - alpha * v3 * v3
    if den.is_zero():
        return None
    return ((v0 * v2 - alpha * v1 * v3) / den, (v1 * v2 - v0 * v3) / den)


# --- sampling -----------------------------------------------------------------

SAMPLE_HEIGHT = 9
MAX_ATTEMPTS = 200


def sample_element(fld: Field, rng: random.Random, nonzero=True, height=SAMPLE_HEIGHT) -> Elem:
    while True:
        if fld.kind == "prime-field":
            x = fld(rng.randrange(fld.order))
        else:
            coords = [Fraction(rng.randint(-height, height), rng.randint(1, height)) for _ in range(fld.degree)]
            if fld.degree > 1:
                # sparse coordinates keep cyclotomic numbers small
                coords = [c if rng.random() < 0.5 else Fraction(0) for c in coords]
            x = fld(coords) if fld.degree > 1 else fld(coords[0])
        if not (nonzero and x.is_zero()):
            return x


def sample_vector(fld, rng, dim, zero_prob=0.0):
    if rng.random() < zero_prob:
        return tuple(fld.zero() for _ in range(dim))
    while True:
        v = tuple(sample_element(fld, rng, nonzero=rng.random() < 0.7) for _ in range(dim))
        if not is_zero_vector(v):
            return v


def _retry(build, seed, validate):
    rng = random.Random(seed)
    last = None
    for _ in range(MAX_ATTEMPTS):
        try:
            out = build(rng)
            if validate is not None:
                validate(out)
            return out
        except (ZeroDivisionError, ValueError, WitnessInvalid) as exc:
            last = exc
            continue
    raise DegenerateSample(f"no nondegenerate sample after {MAX_ATTEMPTS} attempts ({last})")


# --- T1 instances ---------------------------------------------------------------

def _t1_sample(n, fld, rng, zero_prob, force=None):
    """(entries, [(request, data), ...]) for a grade-n Shift-image symbol."""
    if n == 2:
        alpha = sample_element(fld, rng)
        roll = rng.random()
        x = fld.zero() if force == "x0" or (force is None and roll < 0.125) else sample_element(fld, rng)
        y = fld.zero() if force == "y0" or (force is None and 0.125 <= roll < 0.25) else sample_element(fld, rng)
        if force == "generic" and (x.is_zero() or y.is_zero()):
            raise ValueError("resample")
        beta = x * x - alpha * y * y
        if beta.is_zero():
            raise ValueError("beta = 0")
        return (alpha, beta), [(WitnessRequest("NormRepresentation", (alpha, beta)), (x, y))]
    head = tuple(sample_element(fld, rng) for _ in range(n - 1))
    ts = [sample_vector(fld, rng, 2, zero_prob)]
    ts += [sample_vector(fld, rng, 2**j, zero_prob) for j in range(1, n - 1)]
    from .forms import t1_rhs

    last = -t1_rhs(head + (fld.one(),), ts)
    if last.is_zero():
        raise ValueError("alpha_n = 0")
    entries = head + (last,)
    return entries, [(WitnessRequest("T1Representation", entries), tuple(ts))]


def isotropy_from_t1(entries, req, data):
    """Isotropic vector of <<entries>> from the T1 witness of that symbol."""
    if req.kind == "NormRepresentation":
        x, y = data
        one, zero = entries[0].field.one(), entries[0].field.zero()
        return (x, y, one, zero)
    w = tuple(c for t in data for c in t)
    e1 = (entries[0].field.one(),) + (entries[0].field.zero(),) * (len(w) - 1)
    return w + e1


def _validate_t1(modulus_m):
    def check(out):
        from .decompose import t1

        sym, bundle = out
        t1(sym, bundle)

    return check


def make_constructed_instance_t1(n, m, fld=QQ, seed=0, *, branch="anisotropic",
                                 zero_prob=0.25, force=None, validate=True):
    """A grade-n symbol at 2^(m+1) that is a Shift image by construction, with its witnesses.

    ``branch`` selects which witness the decomposition will see: a T1
    representation ("anisotropic") or an isotropic vector of the form on the
    first n-1 slots ("isotropic", n >= 3).  ``force`` pins the grade-2 shape:
    "x0", "y0" or "generic".
    """
    from .milnor import Modulus, Symbol

    if n < 2:
        raise ValueError("grade must be at least 2")
    if fld.characteristic == 2:
        raise ValueError("characteristic 2 is not supported")
    modulus = Modulus(2, m + 1)

    def build(rng):
        if branch == "isotropic" and n >= 3:
            sub, items = _t1_sample(n - 1, fld, rng, zero_prob)
            last = sample_element(fld, rng)
            entries = sub + (last,)
            v = isotropy_from_t1(sub, *items[0])
            items = items + [(WitnessRequest("Isotropy", sub), v)]
        else:
            entries, items = _t1_sample(n, fld, rng, zero_prob, force)
        return Symbol(modulus, entries), WitnessBundle.of(items)

    return _retry(build, seed, _validate_t1(m) if validate else None)


# --- T2 instances ---------------------------------------------------------------

def telescope(values, acc, others):
    """Slot values after SumIdentity(acc, j) for j in ``others``, in order."""
    vals = list(values)
    for j in others:
        a, b = vals[acc], vals[j]
        if (a + b).is_zero():
            raise WitnessInvalid("vanishing partial sum")
        vals[acc] = a + b
        vals[j] = -b / a
    return vals


def t2_level(alphas, betas, ts):
    """Per-level data of the isomorphic branch.

    Returns (gammas, support, deltas, plan) where ``support`` lists the r with
    t_r != 0 and ``plan`` = (acc, others, transposed) describes how the gamma
    slots are telescoped into alpha_i.
    """
    i = len(betas)
    gammas, support = [], []
    for r, t in enumerate(ts, start=1):
        if is_zero_vector(t):
            gammas.append(betas[r - 1])
            continue
        val = pfister_value(t2_form_slots(alphas, betas, r), t)
        if val.is_zero():
            raise WitnessInvalid(f"phi_{r}(t_{r}) = 0")
        gammas.append(val * betas[r - 1])
        support.append(r)
    if not support:
        raise WitnessInvalid("all t_r vanish")
    if support[-1] == i:
        acc, others, transposed = i - 1, [r - 1 for r in support[:-1]], False
    else:
        acc, others, transposed = support[-1] - 1, [r - 1 for r in support[:-1]], True
    vals = telescope(gammas, acc, others)
    if transposed:
        vals[acc], vals[i - 1] = vals[i - 1], vals[acc]
        vals[0] = vals[0].inverse()
    if vals[i - 1] != alphas[i - 1]:
        raise WitnessInvalid("telescoped slot differs from alpha_i")
    return gammas, support, tuple(vals[: i - 1]), (acc, others, transposed)


def _t2_sample(n, i, fld, rng, zero_prob, betas=None, tail=None):
    """alphas, betas and witness items for sigma({alphas} - {betas, alphas[i:]})."""
    betas = tuple(betas) if betas is not None else tuple(sample_element(fld, rng) for _ in range(i))
    tail = tuple(tail) if tail is not None else tuple(sample_element(fld, rng) for _ in range(n - i))
    known = {}  # position (1-based) -> alpha value
    for q, a in enumerate(tail, start=i + 1):
        known[q] = a
    levels = []
    cur = betas
    for L in range(i, 1, -1):
        rest = tuple(known[q] for q in range(L + 1, n + 1))
        fake = (fld.one(),) * L + rest  # only slots beyond L matter for the forms
        ts = tuple(sample_vector(fld, rng, 2 ** len(t2_form_slots(fake, cur, r)), zero_prob)
                   for r in range(1, L + 1))
        aL = t2_value(fake, cur, ts)
        if aL.is_zero():
            raise ValueError("alpha_L = 0")
        known[L] = aL
        fake = fake[: L - 1] + (aL,) + rest
        _, _, deltas, _ = t2_level(fake, cur, ts)
        levels.append((L, cur, ts))
        cur = deltas
    # level 1: {alpha_1 / cur_1, alpha_2, ..., alpha_n} must be a Shift image
    rest = tuple(known[q] for q in range(2, n + 1))
    w = sample_vector(fld, rng, 2 ** (n - 1))
    psi = rest[:-1]
    num = pfister_value(psi, w[0::2]) - rest[-1]
    den = pfister_value(psi, w[1::2])
    if den.is_zero() or num.is_zero():
        raise ValueError("degenerate level-1 sample")
    u = num / den
    alphas = (u * cur[0],) + rest
    sub = (u,) + rest
    if n == 2:
        items = [(WitnessRequest("NormRepresentation", sub), w)]
    else:
        items = [(WitnessRequest("T1Representation", sub), tuple(split_t1(w, n)))]
    for L, bs, ts in levels:
        items.append((WitnessRequest("T2Representation", (alphas, bs)), ts))
    return alphas, betas, items


def _validate_t2(out):
    from .decompose import t2

    alphas, betas, modulus, bundle = out
    t2(alphas, betas, len(betas), bundle, m=modulus.m - 1)


def make_constructed_instance_t2(n, i, m, fld=QQ, seed=0, *, betas=None, hyperbolic=False,
                                 zero_prob=0.25, validate=True):
    """(alphas, betas, modulus 2^(m+1), bundle) with {alphas} - {betas, alphas[i:]} a Shift image.

    The hyperbolic variant (i = n only) makes both symbols Shift images on their own.
    """
    from .milnor import Modulus

    if not 1 <= i <= n:
        raise ValueError("need 1 <= i <= n")
    modulus = Modulus(2, m + 1)

    def build(rng):
        if hyperbolic:
            if i != n or betas is not None:
                raise ValueError("hyperbolic instances are generated for i = n without fixed betas")
            a, items_a = _t1_sample(n, fld, rng, zero_prob)
            b, items_b = _t1_sample(n, fld, rng, zero_prob)
            return a, b, modulus, WitnessBundle.of(items_a + items_b)
        a, b, items = _t2_sample(n, i, fld, rng, zero_prob, betas=betas)
        return a, b, modulus, WitnessBundle.of(items)

    return _retry(build, seed, _validate_t2 if validate else None)


# --- linkage and chain instances --------------------------------------------------

def _validate_with(name):
    def check(out):
        from . import decompose

        symbols, data, modulus, bundle = out
        getattr(decompose, name)(symbols, data, bundle, m=modulus.m - 1)

    return check


def make_constructed_linkage(n, m, fld=QQ, seed=0, *, zero_prob=0.25, validate=True):
    """Three grade-n symbols summing to a Shift image, with a linkage and per-difference witnesses.

    Returns (symbols, link, modulus 2^(m+1), bundle); ``link`` = {"a", "b", "c"}.
    """
    from .milnor import Modulus

    if n < 2:
        raise ValueError("grade must be at least 2")
    modulus = Modulus(2, m + 1)

    def build(rng):
        a, b = sample_element(fld, rng), sample_element(fld, rng)
        cs = tuple(sample_element(fld, rng) for _ in range(n - 1))
        link_syms = [(a,) + cs, (b,) + cs, ((a * b).inverse(),) + cs]
        symbols, items = [], []
        for L in link_syms:
            s, _, its = _t2_sample(n, n, fld, rng, zero_prob, betas=L)
            symbols.append(s)
            items += its
        symbols = tuple(symbols)
        link = {"a": a, "b": b, "c": cs}
        items.append((WitnessRequest("Linkage", symbols), link))
        return symbols, link, modulus, WitnessBundle.of(items)

    return _retry(build, seed, _validate_with("t3") if validate else None)


def sivatski_symbols(chain):
    """The labelled grade-2 symbols A_k, A'_k, C_k, C'_k of a chain."""
    out = {}
    for k in range(3):
        a, b, c, d = (chain[key][k] for key in "abcd")
        phi = pfister_value((a * c,), chain["t"][k])
        out[f"A{k + 1}"] = (a, b)
        out[f"A{k + 1}'"] = (a, b * phi)
        out[f"C{k + 1}"] = (c, d)
        out[f"C{k + 1}'"] = (c, d * phi)
    return out


def make_constructed_sivatski(m, fld=QQ, seed=0, *, zero_prob=0.25, validate=True):
    """Four grade-2 symbols with S1 + S2 - S3 - S4 a Shift image, plus a chain and its witnesses.

    Returns (symbols, chain, modulus 2^(m+1), bundle).
    """
    from .milnor import Modulus

    modulus = Modulus(2, m + 1)

    def gen(rng, betas, items):
        s, _, its = _t2_sample(2, 2, fld, rng, zero_prob, betas=betas)
        items += its
        return s

    def build(rng):
        items = []
        A = [(sample_element(fld, rng), sample_element(fld, rng))]
        C = [(sample_element(fld, rng), sample_element(fld, rng))]
        ts, Ap, Cp = [], [], []
        for k in range(3):
            t = sample_vector(fld, rng, 2)
            phi = pfister_value((A[k][0] * C[k][0],), t)
            if phi.is_zero():
                raise ValueError("phi = 0")
            ts.append(t)
            Ap.append((A[k][0], A[k][1] * phi))
            Cp.append((C[k][0], C[k][1] * phi))
            if k < 2:
                A.append(gen(rng, Ap[k], items))
                C.append(gen(rng, Cp[k], items))
        s1 = gen(rng, A[0], items)
        s2 = gen(rng, C[0], items)
        s3 = gen(rng, Ap[2], items)
        s4 = gen(rng, Cp[2], items)
        chain = {
            "a": tuple(x[0] for x in A), "b": tuple(x[1] for x in A),
            "c": tuple(x[0] for x in C), "d": tuple(x[1] for x in C),
            "t": tuple(ts),
        }
        symbols = (s1, s2, s3, s4)
        items.append((WitnessRequest("SivatskiChain", symbols), chain))
        return symbols, chain, modulus, WitnessBundle.of(items)

    return _retry(build, seed, _validate_with("t4") if validate else None)
