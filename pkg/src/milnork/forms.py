"""Bilinear Pfister forms, diagonal forms, and local-global oracles over Q.

Sign convention: <<a>> = <1, -a>, so <<a1,...,an>> expands to the 2^n
coefficients (-1)^|S| prod_{i in S} a_i, with subsets S in binary counting
order where a1 is the lowest bit.  Hence <<a1..an>> = phi ⊥ -an*phi for
phi = <<a1..a(n-1)>>, and a vector of the larger form splits as (u, v).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint, legendre_symbol

from .errors import DimensionMismatch, FieldNotRationals
from .fields import QQ, Elem, enumerate_elements

INF = "inf"


@dataclass(frozen=True)
class PfisterForm:
    slots: tuple

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        if any(a.is_zero() for a in self.slots):
            raise ValueError("Pfister slots must be nonzero")

    @property
    def fold(self):
        return len(self.slots)

    @property
    def dim(self):
        return 2 ** len(self.slots)


@dataclass(frozen=True)
class DiagonalForm:
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if any(c.is_zero() for c in self.coeffs):
            raise ValueError("diagonal coefficients must be nonzero")

    @property
    def dim(self):
        return len(self.coeffs)

    def __str__(self):
        return ",".join(str(c) for c in self.coeffs)


class NotFound:
    def __repr__(self):
        return "NotFound"

    def __bool__(self):
        return False


class ProvablyAnisotropic:
    def __repr__(self):
        return "ProvablyAnisotropic"

    def __bool__(self):
        return False


NOT_FOUND = NotFound()
PROVABLY_ANISOTROPIC = ProvablyAnisotropic()


def expand(f: PfisterForm, field=None) -> DiagonalForm:
    if not f.slots:
        if field is None:
            raise ValueError("the 0-fold form needs an explicit field")
        return DiagonalForm((field.one(),))
    coeffs = [f.slots[0].field.one()]
    for a in f.slots:
        coeffs = coeffs + [-a * c for c in coeffs]
    return DiagonalForm(coeffs)


def evaluate(f: DiagonalForm, v) -> Elem:
    v = tuple(v)
    if len(v) != f.dim:
        raise DimensionMismatch(f"vector of length {len(v)} for a form of dimension {f.dim}")
    total = f.coeffs[0].field.zero()
    for c, x in zip(f.coeffs, v):
        if not x.is_zero():
            total = total + c * x * x
    return total


def pfister_value(slots, v, field=None) -> Elem:
    """phi(v) for phi = <<slots>>, by the recursive split (cheaper than expanding)."""
    v = tuple(v)
    if len(v) != 2 ** len(slots):
        raise DimensionMismatch(f"vector of length {len(v)} for a {len(slots)}-fold form")
    if not slots:
        return v[0] * v[0]
    h = len(v) // 2
    return pfister_value(slots[:-1], v[:h]) - slots[-1] * pfister_value(slots[:-1], v[h:])


def is_zero_vector(v) -> bool:
    return all(x.is_zero() for x in v)


# --- T1 representation vectors ---------------------------------------------

def concat_t1(ts):
    """Concatenate t0 (dim 2), t1 (dim 2), t2 (dim 4), ... into one vector."""
    return tuple(itertools.chain.from_iterable(ts))


def split_t1(v, n):
    """Inverse of concat_t1 for a grade-n symbol (vector of dimension 2^(n-1))."""
    v = tuple(v)
    if len(v) != 2 ** (n - 1):
        raise DimensionMismatch(f"expected dimension {2 ** (n - 1)}, got {len(v)}")
    if n == 1:
        return [v]
    ts = [v[:2]]
    lo = 2
    while lo < len(v):
        ts.append(v[lo:2 * lo])
        lo *= 2
    return ts


def t1_rhs(alphas, ts) -> Elem:
    """phi_{n-2}(t_{n-2}) a_{n-1} + ... + phi_1(t_1) a_2 - phi_1(t_0)."""
    n = len(alphas)
    total = -pfister_value(alphas[:1], ts[0])
    for i in range(2, n):
        total = total + pfister_value(alphas[: i - 1], ts[i - 1]) * alphas[i - 1]
    return total


def verify_representation_t1(alphas, ts) -> bool:
    alphas = tuple(alphas)
    n = len(alphas)
    if n < 2 or len(ts) != n - 1:
        raise DimensionMismatch(f"grade {n} needs {n - 1} vectors, got {len(ts)}")
    for i, t in enumerate(ts):
        want = 2 if i == 0 else 2**i
        if len(t) != want:
            raise DimensionMismatch(f"t_{i} should have dimension {want}")
    return -alphas[-1] == t1_rhs(alphas, ts)


# --- Hilbert symbols over Q -------------------------------------------------

def _q(a) -> Fraction:
    if isinstance(a, Elem):
        if a.field != QQ:
            raise FieldNotRationals(f"{a.field} is not Q")
        return a.to_fraction()
    return Fraction(a)


def _squarefree_int(a: Fraction) -> int:
    """An integer in the same square class as a."""
    return a.numerator * a.denominator


def _split_p(x: int, p: int):
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k, x


def hilbert_symbol_Q(a, b, place) -> int:
    a, b = _q(a), _q(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of zero")
    if place in (INF, "oo", "infinity", 0):
        return -1 if a < 0 and b < 0 else 1
    p = int(place)
    x, y = _squarefree_int(a), _squarefree_int(b)
    s, u = _split_p(x, p)
    t, v = _split_p(y, p)
    if p == 2:
        eps = lambda z: ((z - 1) // 2) % 2  # noqa: E731
        omega = lambda z: ((z * z - 1) // 8) % 2  # noqa: E731
        e = eps(u) * eps(v) + s * omega(v) + t * omega(u)
        return -1 if e % 2 else 1
    sign = -1 if (s * t * ((p - 1) // 2)) % 2 else 1
    return sign * legendre_symbol(u % p, p) ** t * legendre_symbol(v % p, p) ** s


def relevant_places(*values):
    primes = {2}
    for a in values:
        a = _q(a)
        for n in (a.numerator, a.denominator):
            primes.update(factorint(abs(n)).keys())
    primes.discard(1)
    return [INF] + sorted(primes)


def _is_local_square(d: Fraction, place) -> bool:
    if place == INF:
        return d > 0
    x = _squarefree_int(d)
    k, u = _split_p(x, place)
    if k % 2:
        return False
    if place == 2:
        return u % 8 == 1
    return legendre_symbol(u % place, place) == 1


def _hasse(coeffs, place) -> int:
    out = 1
    for i, j in itertools.combinations(range(len(coeffs)), 2):
        out *= hilbert_symbol_Q(coeffs[i], coeffs[j], place)
    return out


def is_isotropic_Q(f: DiagonalForm) -> bool:
    """Hasse-Minkowski decision for a nondegenerate diagonal form over Q."""
    cs = [_q(c) for c in f.coeffs]
    n = len(cs)
    if n <= 1:
        return False
    if n == 2:
        r = -cs[0] * cs[1]
        return r > 0 and _is_local_square(r, INF) and all(
            _is_local_square(r, p) for p in relevant_places(r)[1:]
        )
    if n >= 5:
        return any(c > 0 for c in cs) and any(c < 0 for c in cs)
    d = Fraction(1)
    for c in cs:
        d *= c
    for place in relevant_places(*cs):
        eps = _hasse(cs, place)
        if n == 3:
            if eps != hilbert_symbol_Q(-1, -d, place):
                return False
        elif _is_local_square(d, place) and eps != hilbert_symbol_Q(-1, -1, place):
            return False
    return True


def isotropy_witness_search(f: DiagonalForm, height_bound: int):
    """A nonzero isotropic vector of height <= bound, NotFound, or ProvablyAnisotropic."""
    field = f.coeffs[0].field
    if field == QQ and not is_isotropic_Q(f):
        return PROVABLY_ANISOTROPIC
    for h in range(1, height_bound + 1):
        for v in _vectors_of_height(field, f.dim, h):
            if evaluate(f, v).is_zero():
                return v
    return NOT_FOUND


def _coord_key(e):
    text = str(e)
    return (e.height(), text.startswith("-"), text)


def _vectors_of_height(field, dim, h):
    """Nonzero vectors of exact height h in a fixed order; positive, small entries first."""
    coords = sorted(enumerate_elements(field, h), key=_coord_key)
    for v in itertools.product(coords, repeat=dim):
        if max(x.height() for x in v) == h and not is_zero_vector(v):
            yield v
