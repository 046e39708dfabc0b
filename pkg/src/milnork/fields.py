"""Exact base fields: the rationals, cyclotomic fields Q(zeta_{2^k}) and
Q(zeta_9) presented as Q[z]/Phi, and prime fields GF(q).

Elements are immutable and hashable.  Two elements compare equal exactly when
their canonical serializations coincide.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import DescriptorMismatch, DivisionByZero, ParseError, RootNotAvailable

RATIONALS = "rationals"
CYCLOTOMIC = "cyclotomic"
PRIME_FIELD = "prime-field"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# --- dense polynomials over Q, lowest degree first -------------------------

def _ptrim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ptrim(out)


def _pdivmod(a, b):
    a = _ptrim(a)
    b = _ptrim(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = a[-1] / b[-1]
        s = len(a) - len(b)
        q[s] = c
        for i, y in enumerate(b):
            a[s + i] -= c * y
        a = _ptrim(a)
    return _ptrim(q), a


def _psub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _ptrim([x - y for x, y in zip(a, b)])


def _pinvmod(a, m):
    """Inverse of a modulo m over Q via the extended Euclidean algorithm."""
    r0, r1 = _ptrim(m), _ptrim(a)
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _psub(s0, _pmul(q, s1))
    if len(r0) != 1:
        raise DivisionByZero("element is not invertible modulo the defining polynomial")
    c = r0[0]
    return [x / c for x in s0]


def cyclotomic_polynomial(order: int) -> list[int]:
    """Phi_order for order a power of two (>= 4) or 9, lowest degree first."""
    if order == 9:
        return [1, 0, 0, 1, 0, 0, 1]
    if order >= 4 and order & (order - 1) == 0:
        half = order // 2
        return [1] + [0] * (half - 1) + [1]
    raise ValueError(f"unsupported cyclotomic order {order}")


@dataclass(frozen=True)
class Field:
    """Descriptor of a base field.

    ``order`` is the cyclotomic order (2^k or 9) for cyclotomic fields and the
    prime q for prime fields; it is unused for the rationals.
    """

    kind: str
    order: int = 0

    def __post_init__(self):
        if self.kind == CYCLOTOMIC:
            cyclotomic_polynomial(self.order)
        elif self.kind == PRIME_FIELD:
            if not _is_prime(self.order):
                raise ValueError(f"GF({self.order}): not a prime")
        elif self.kind != RATIONALS:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @property
    def characteristic(self) -> int:
        return self.order if self.kind == PRIME_FIELD else 0

    @property
    def modulus_polynomial(self):
        return cyclotomic_polynomial(self.order) if self.kind == CYCLOTOMIC else None

    @property
    def degree(self) -> int:
        if self.kind == CYCLOTOMIC:
            return len(self.modulus_polynomial) - 1
        return 1

    @cached_property
    def available_roots_of_unity(self) -> tuple[int, ...]:
        if self.kind == RATIONALS:
            return (1, 2)
        if self.kind == PRIME_FIELD:
            return tuple(_divisors(self.order - 1))
        # Q(zeta_9) also contains -zeta_9, of order 18.
        return tuple(_divisors(self.order if self.order % 2 == 0 else 2 * self.order))

    def __str__(self):
        if self.kind == RATIONALS:
            return "Q"
        if self.kind == CYCLOTOMIC:
            return f"cyclo({self.order})"
        return f"GF({self.order})"

    @staticmethod
    def parse(text: str) -> "Field":
        text = text.strip()
        if text in ("Q", "QQ", "rationals"):
            return QQ
        m = re.fullmatch(r"(?:cyclo|Q\(zeta_?)\(?(\d+)\)?", text)
        if m:
            return Field(CYCLOTOMIC, int(m.group(1)))
        m = re.fullmatch(r"(?:GF|F)\(?(\d+)\)?", text)
        if m:
            return Field(PRIME_FIELD, int(m.group(1)))
        raise ParseError(f"unknown field descriptor {text!r}")

    # element construction ------------------------------------------------

    def __call__(self, value=0) -> "Elem":
        if isinstance(value, Elem):
            if value.field == self:
                return value
            if value.field == QQ:
                return self(value.c[0])
            raise DescriptorMismatch(f"cannot coerce {value.field} element into {self}")
        if isinstance(value, str):
            return parse_element(value, self)
        if self.kind == PRIME_FIELD:
            if isinstance(value, Fraction):
                num = value.numerator % self.order
                den = value.denominator % self.order
                if den == 0:
                    raise DivisionByZero(f"denominator vanishes in {self}")
                return Elem(self, (num * pow(den, -1, self.order) % self.order,))
            return Elem(self, (int(value) % self.order,))
        if isinstance(value, (list, tuple)):
            if self.kind != CYCLOTOMIC or len(value) != self.degree:
                raise ValueError("coefficient vector has the wrong length")
            return Elem(self, tuple(Fraction(x) for x in value))
        v = Fraction(value)
        return Elem(self, (v,) + (Fraction(0),) * (self.degree - 1))

    def zero(self) -> "Elem":
        return self(0)

    def one(self) -> "Elem":
        return self(1)

    def gen(self) -> "Elem":
        """The class of z in Q[z]/Phi."""
        if self.kind != CYCLOTOMIC:
            raise ValueError("only cyclotomic fields have a distinguished generator")
        return self([0, 1] + [0] * (self.degree - 2))


QQ = Field(RATIONALS)


def cyclo(order: int) -> Field:
    return Field(CYCLOTOMIC, order)


def GF(q: int) -> Field:
    return Field(PRIME_FIELD, q)


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Elem:
    field: Field
    c: tuple

    # arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> "Elem":
        if isinstance(other, Elem):
            if other.field != self.field:
                raise DescriptorMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.field.kind == PRIME_FIELD:
            return Elem(self.field, ((self.c[0] + other.c[0]) % self.field.order,))
        return Elem(self.field, tuple(a + b for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        if self.field.kind == PRIME_FIELD:
            return Elem(self.field, ((-self.c[0]) % self.field.order,))
        return Elem(self.field, tuple(-a for a in self.c))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self.field
        if f.kind == PRIME_FIELD:
            return Elem(f, ((self.c[0] * other.c[0]) % f.order,))
        if f.kind == RATIONALS:
            return Elem(f, (self.c[0] * other.c[0],))
        _, r = _pdivmod(_pmul(_ptrim(self.c), _ptrim(other.c)), f.modulus_polynomial)
        return Elem(f, tuple(r) + (Fraction(0),) * (f.degree - len(r)))

    __rmul__ = __mul__

    def inverse(self) -> "Elem":
        if self.is_zero():
            raise DivisionByZero(f"inverse of zero in {self.field}")
        f = self.field
        if f.kind == PRIME_FIELD:
            return Elem(f, (pow(self.c[0], -1, f.order),))
        if f.kind == RATIONALS:
            return Elem(f, (1 / self.c[0],))
        inv = _pinvmod(_ptrim(self.c), f.modulus_polynomial)
        _, r = _pdivmod(inv, f.modulus_polynomial)
        return Elem(f, tuple(r) + (Fraction(0),) * (f.degree - len(r)))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        out = self.field.one()
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field(other)
        if not isinstance(other, Elem):
            return NotImplemented
        return self.field == other.field and self.c == other.c

    def __hash__(self):
        return hash((self.field, self.c))

    # predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return self.field.kind != PRIME_FIELD and not any(self.c[1:])

    def to_fraction(self) -> Fraction:
        if self.field.kind == PRIME_FIELD or not self.is_rational():
            raise ValueError(f"{self} is not a rational number")
        return self.c[0]

    def height(self) -> int:
        if self.field.kind == PRIME_FIELD:
            return self.c[0]
        return max(max(abs(x.numerator), x.denominator) for x in self.c)

    # serialization -------------------------------------------------------

    def __str__(self):
        f = self.field
        if f.kind == RATIONALS:
            return _frac_str(self.c[0])
        if f.kind == PRIME_FIELD:
            return f"{self.c[0]} mod {f.order}"
        return "[" + ",".join(_frac_str(x) for x in self.c) + f"]@cyclo({f.order})"

    def __repr__(self):
        return f"Elem({self})"


_CYCLO_RE = re.compile(r"\[([^\]]*)\]@cyclo\((\d+)\)")
_PRIME_RE = re.compile(r"(-?\d+)\s+mod\s+(\d+)")
_RAT_RE = re.compile(r"[+-]?\d+(?:/\d+)?")


def parse_element(text: str, field: Field | None = None) -> Elem:
    """Parse the canonical serialization; plain rationals are embedded into ``field``."""
    text = text.strip()
    m = _CYCLO_RE.fullmatch(text)
    if m:
        f = cyclo(int(m.group(2)))
        parts = [p for p in m.group(1).split(",")]
        if not all(_RAT_RE.fullmatch(p.strip()) for p in parts):
            raise ParseError(f"bad cyclotomic coefficients in {text!r}")
        e = f([Fraction(p.strip()) for p in parts]) if len(parts) == f.degree else None
        if e is None:
            raise ParseError(f"expected {f.degree} coefficients in {text!r}")
        if field is not None and field != f:
            raise DescriptorMismatch(f"{text!r} is not an element of {field}")
        return e
    m = _PRIME_RE.fullmatch(text)
    if m:
        f = GF(int(m.group(2)))
        if field is not None and field != f:
            raise DescriptorMismatch(f"{text!r} is not an element of {field}")
        return f(int(m.group(1)))
    if _RAT_RE.fullmatch(text):
        return (field or QQ)(Fraction(text))
    raise ParseError(f"cannot parse field element {text!r}")


def primitive_root_of_unity(field: Field, r: int) -> Elem:
    """A root of unity of exact order r; RootNotAvailable if mu_r is not in the field."""
    if r not in field.available_roots_of_unity:
        raise RootNotAvailable(f"{field} does not contain a primitive {r}-th root of unity")
    if field.kind == RATIONALS:
        return field(1 if r == 1 else -1)
    if field.kind == PRIME_FIELD:
        q = field.order
        for g in range(1, q):
            if all(pow(g, (q - 1) // p, q) != 1 for p in _divisors(q - 1) if _is_prime(p)):
                return field(pow(g, (q - 1) // r, q))
    z = field.gen()
    if field.order % 2 == 0:
        return z ** (field.order // r)
    return (-z) ** (2 * field.order // r)


def is_square_Q(a: Elem) -> bool:
    """Square test for rational elements (numerator and denominator separately)."""
    x = a.to_fraction()
    if x < 0:
        return False
    n, d = x.numerator, x.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


def sqrt_Q(a: Elem) -> Elem:
    if not is_square_Q(a):
        raise ValueError(f"{a} is not a rational square")
    x = a.to_fraction()
    return a.field(Fraction(math.isqrt(x.numerator), math.isqrt(x.denominator)))


def _rationals_up_to(bound: int) -> list[Fraction]:
    vals = {Fraction(0)}
    for d in range(1, bound + 1):
        for n in range(1, bound + 1):
            if math.gcd(n, d) == 1:
                vals.add(Fraction(n, d))
                vals.add(Fraction(-n, d))
    return sorted(vals)


def enumerate_elements(field: Field, height_bound: int):
    """Yield every element of height <= height_bound exactly once, deterministically.

    Rationals come out in increasing order; cyclotomic elements as the
    coordinatewise product of that list.
    """
    if field.kind == PRIME_FIELD:
        raise ValueError("enumeration is defined for rationals and cyclotomic fields")
    rats = _rationals_up_to(height_bound)
    if field.kind == RATIONALS:
        for x in rats:
            yield Elem(field, (x,))
        return
    for coords in itertools.product(rats, repeat=field.degree):
        yield Elem(field, tuple(coords))
