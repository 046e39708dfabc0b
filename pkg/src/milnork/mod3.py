"""Degree-3 symbol algebras and the mod-3 recombination of length-15 decompositions.

Elements of A = (alpha, beta)_3 are 3x3 coordinate arrays c[i][j] of
sum c_ij x^i y^j with x^3 = alpha, y^3 = beta and yx = rho xy.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import CheckFailed, DescriptorMismatch, DivisionByZero, SubDecompositionInvalid
from .fields import Elem, Field, primitive_root_of_unity


class SymbolAlgebra:
    def __init__(self, alpha: Elem, beta: Elem, rho: Elem | None = None):
        if alpha.is_zero() or beta.is_zero():
            raise ValueError("alpha and beta must be nonzero")
        self.field = alpha.field
        self.alpha = alpha
        self.beta = self.field(beta)
        self.rho = primitive_root_of_unity(self.field, 3) if rho is None else self.field(rho)
        if self.rho ** 3 != 1 or self.rho == 1:
            raise ValueError("rho must be a primitive cube root of unity")

    def _key(self):
        return (self.field, self.alpha, self.beta, self.rho)

    def __eq__(self, other):
        return isinstance(other, SymbolAlgebra) and self._key() == other._key()

    def __hash__(self):
        return hash(str(self._key()))

    def __repr__(self):
        return f"SymbolAlgebra({self.alpha}, {self.beta}; rho={self.rho})"

    def element(self, coords) -> "AlgebraElement":
        return AlgebraElement(self, coords)

    def scalar(self, s) -> "AlgebraElement":
        z = self.field.zero()
        c = [[z] * 3 for _ in range(3)]
        c[0][0] = self.field(s)
        return AlgebraElement(self, c)

    def monomial(self, i, j, s=1) -> "AlgebraElement":
        z = self.field.zero()
        c = [[z] * 3 for _ in range(3)]
        c[i][j] = self.field(s)
        return AlgebraElement(self, c)

    def one(self):
        return self.scalar(1)

    def x(self):
        return self.monomial(1, 0)

    def y(self):
        return self.monomial(0, 1)

    def in_x(self, a, b, c) -> "AlgebraElement":
        """a + b x + c x^2."""
        return self.monomial(0, 0, a) + self.monomial(1, 0, b) + self.monomial(2, 0, c)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: SymbolAlgebra
    c: tuple

    def __post_init__(self):
        fld = self.algebra.field
        rows = tuple(tuple(fld(v) for v in row) for row in self.c)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("an algebra element has a 3x3 coordinate array")
        object.__setattr__(self, "c", rows)

    def _same(self, other):
        if not isinstance(other, AlgebraElement):
            return self.algebra.scalar(other)
        if other.algebra != self.algebra:
            raise DescriptorMismatch("elements of different algebras")
        return other

    def __add__(self, other):
        o = self._same(other)
        return AlgebraElement(self.algebra, [[a + b for a, b in zip(r, s)] for r, s in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, [[-a for a in r] for r in self.c])

    def __sub__(self, other):
        return self + (-self._same(other))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return algebra_mul(self.algebra, self, other)
        s = self.algebra.field(other)
        return AlgebraElement(self.algebra, [[a * s for a in r] for r in self.c])

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        if k < 0:
            return inverse(self.algebra, self) ** (-k)
        out = self.algebra.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return self.algebra == other.algebra and self.c == other.c
        try:
            return self == self.algebra.scalar(other)
        except (TypeError, ValueError):
            return False

    def __hash__(self):
        return hash(str(self.c))

    def is_zero(self):
        return all(a.is_zero() for r in self.c for a in r)

    def scalar_part(self):
        """The F-value if this is a scalar, else None."""
        if all(a.is_zero() for i, r in enumerate(self.c) for j, a in enumerate(r) if (i, j) != (0, 0)):
            return self.c[0][0]
        return None

    def __repr__(self):
        parts = []
        for i in range(3):
            for j in range(3):
                if not self.c[i][j].is_zero():
                    mono = "".join(s for s in (("x" if i == 1 else f"x^{i}") if i else "",
                                               ("y" if j == 1 else f"y^{j}") if j else ""))
                    parts.append(f"({self.c[i][j]}){mono}")
        return " + ".join(parts) or "0"


def algebra_mul(A: SymbolAlgebra, u: AlgebraElement, v: AlgebraElement) -> AlgebraElement:
    """x^i y^j * x^k y^l = rho^(jk) x^(i+k) y^(j+l), then x^3 = alpha, y^3 = beta."""
    if u.algebra != A or v.algebra != A:
        raise DescriptorMismatch("elements do not belong to this algebra")
    fld = A.field
    rho_pow = [fld.one(), A.rho, A.rho * A.rho]
    out = [[fld.zero()] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            a = u.c[i][j]
            if a.is_zero():
                continue
            for k in range(3):
                for l in range(3):
                    b = v.c[k][l]
                    if b.is_zero():
                        continue
                    s = a * b * rho_pow[(j * k) % 3]
                    p, q = i + k, j + l
                    if p >= 3:
                        s, p = s * A.alpha, p - 3
                    if q >= 3:
                        s, q = s * A.beta, q - 3
                    out[p][q] = out[p][q] + s
    return AlgebraElement(A, out)


def reduced_trace(A: SymbolAlgebra, u: AlgebraElement) -> Elem:
    """A third of the trace of left multiplication; only the 1-coordinate contributes."""
    return u.c[0][0] * 3


# --- the cubic subfield K = F[x]/(x^3 - alpha) --------------------------------

def _kmul(alpha, p, q):
    out = [p[0].field.zero()] * 5
    for i in range(3):
        for j in range(3):
            out[i + j] = out[i + j] + p[i] * q[j]
    return (out[0] + alpha * out[3], out[1] + alpha * out[4], out[2])


def _kadd(p, q):
    return tuple(a + b for a, b in zip(p, q))


def _ktwist(p, r):
    """p(r x)."""
    return (p[0], p[1] * r, p[2] * r * r)


def cubic_norm(alpha, a, b, c) -> Elem:
    """N(a + b x + c x^2) for x^3 = alpha."""
    return a**3 + alpha * b**3 + alpha * alpha * c**3 - 3 * alpha * a * b * c


def reduced_norm(A: SymbolAlgebra, u: AlgebraElement) -> Elem:
    """Determinant of left multiplication by u on A as a right K-module with basis 1, y, y^2.

    With u = sum_j a_j(x) y^j, column l holds a_j(rho^-(j+l) x) in row j+l mod 3,
    times beta when j+l wraps around.
    """
    fld = A.field
    rinv = A.rho.inverse()
    a = [tuple(u.c[i][j] for i in range(3)) for j in range(3)]
    zero = (fld.zero(),) * 3
    M = [[zero] * 3 for _ in range(3)]
    for l in range(3):
        for j in range(3):
            e = _ktwist(a[j], rinv ** (j + l))
            if j + l >= 3:
                e = tuple(v * A.beta for v in e)
            M[(j + l) % 3][l] = e
    mul = lambda p, q: _kmul(A.alpha, p, q)  # noqa: E731
    det = zero
    for perm, sign in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                       ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        t = mul(mul(M[0][perm[0]], M[1][perm[1]]), M[2][perm[2]])
        det = _kadd(det, t if sign > 0 else tuple(-v for v in t))
    if not (det[1].is_zero() and det[2].is_zero()):
        raise AssertionError("reduced norm left the base field")
    return det[0]


def inverse(A: SymbolAlgebra, u: AlgebraElement) -> AlgebraElement:
    """u^-1 = (u^2 - T u + S) / N from the reduced characteristic polynomial."""
    N = reduced_norm(A, u)
    if N.is_zero():
        raise DivisionByZero("element has reduced norm 0")
    T = reduced_trace(A, u)
    u2 = u * u
    S = (T * T - reduced_trace(A, u2)) / 2
    return (u2 - u * T + S) * N.inverse()


def element_to_json(u: AlgebraElement):
    A = u.algebra
    return {
        "field": str(A.field),
        "alpha": str(A.alpha),
        "beta": str(A.beta),
        "rho": str(A.rho),
        "coords": [[str(v) for v in row] for row in u.c],
    }


def element_from_json(d) -> AlgebraElement:
    fld = Field.parse(d["field"])
    alpha = fld(d["alpha"])
    A = SymbolAlgebra(alpha, fld(d["beta"]), fld(d["rho"]))
    return A.element([[fld(v) for v in row] for row in d["coords"]])


# --- witnesses -------------------------------------------------------------------

def verify_t5_witness(A: SymbolAlgebra, z: AlgebraElement, coeffs, gamma):
    """Check z and (a0, b0, c0); returns (delta, report).

    Checks run in the order norm, trace, trace_square, cube, norm_ratio and
    the first failure raises CheckFailed naming it.
    """
    fld = A.field
    a0, b0, c0 = (fld(v) for v in coeffs)
    gamma = fld(gamma)
    report = {}

    def need(name, ok, detail):
        if not ok:
            raise CheckFailed(name, detail)
        report[name] = True

    need("norm", reduced_norm(A, z) == gamma, "Nrd(z) != gamma")
    w = A.in_x(a0, b0, c0) * z
    need("trace", reduced_trace(A, w).is_zero(), "Trd(w) != 0")
    need("trace_square", reduced_trace(A, w * w).is_zero(), "Trd(w^2) != 0")
    delta = (w * w * w).scalar_part()
    need("cube", delta is not None and not delta.is_zero(), "w^3 is not a nonzero scalar")
    need("norm_ratio", delta == gamma * cubic_norm(A.alpha, a0, b0, c0), "delta/gamma != N(a0+b0x+c0x^2)")
    return delta, report


_W_SUPPORT = ((1, 0), (0, 1), (1, 1), (1, 2))


def make_t5_witness(A: SymbolAlgebra, seed=0, height=5):
    """(z, coeffs, gamma, delta) with both trace conditions holding by construction.

    w is supported on monomials no two of which multiply into the 1-coordinate,
    so Trd(w) = Trd(w^2) = 0; then z = v^-1 w for a random v in F[x].
    """
    fld = A.field
    rng = random.Random(seed)

    def elt():
        return fld(rng.randint(-height, height)) if fld.degree == 1 else fld(
            [rng.randint(-height, height) if rng.random() < 0.5 else 0 for _ in range(fld.degree)])

    for _ in range(200):
        c = [[fld.zero()] * 3 for _ in range(3)]
        for i, j in _W_SUPPORT:
            c[i][j] = elt()
        if c[1][0].is_zero():
            continue
        w = A.element(c)
        coeffs = (elt(), elt(), elt())
        if coeffs[0].is_zero() or cubic_norm(A.alpha, *coeffs).is_zero():
            continue
        if reduced_norm(A, w).is_zero():
            continue
        z = inverse(A, A.in_x(*coeffs)) * w
        gamma = reduced_norm(A, z)
        delta, _ = verify_t5_witness(A, z, coeffs, gamma)
        return z, coeffs, gamma, delta
    raise ValueError("no nondegenerate t5 witness found")


def corrupt_t5_witness(A: SymbolAlgebra, z, coeffs, gamma, kind, s=1):
    """A deliberately broken witness failing exactly the check ``kind``."""
    v = A.in_x(*coeffs)
    if kind == "norm":
        return z, coeffs, gamma + s
    if kind == "trace":
        z2 = z + s
        return z2, coeffs, reduced_norm(A, z2)
    if kind == "trace_square":
        w = v * z + A.monomial(2, 0, s)
        z2 = inverse(A, v) * w
        return z2, coeffs, reduced_norm(A, z2)
    raise ValueError(f"no corruption for {kind!r}")


# --- recombination -----------------------------------------------------------------

def chain_symbols(alpha, beta, gamma, delta, cs):
    """X_0 .. X_5: each consecutive pair shares two slots."""
    c1, c2, c3 = cs
    return [
        (alpha, beta, gamma),
        (alpha, beta, delta),
        (alpha, c1, delta),
        (c2, c1, delta),
        (c2, c3, delta),
        (delta, c3, delta),
    ]


def trivial_difference(X, m):
    """The certified empty pre-image of {X} - {X} at 3^(m+1)."""
    from .decompose import CertifiedDecomposition, _assumption
    from .milnor import Builder, Certificate, KClassExpr, Modulus

    X = tuple(X)
    mod = Modulus(3, m + 1)
    b = Builder(KClassExpr(mod, ()))
    b.insert("UnitSlot", 0, (0,), (X[0].field.one(),) + X[1:])
    b.split(0, 0, X[0])
    b.invert_slot(1, 0)
    target = b.expr
    cert = Certificate(mod, X[0].field, KClassExpr(mod, ()), target, tuple(b.steps))
    return CertifiedDecomposition("difference", target, KClassExpr(Modulus(3, m), ()), cert, 3,
                                  _assumption(mod))


def t5_recombine(alpha, beta, gamma, m, bundle, *, extension=False):
    """Pre-image of {alpha, beta, gamma} in K_3/3^(m+1) from five certified differences.

    ``extension`` marks the computation as carried out over a quadratic
    extension; the term count is then reported against the doubled bound
    without building the transfer.
    """
    from .decompose import _finish, _modulus, bound, validate_decomposition
    from .milnor import Builder, KClassExpr, invert_steps
    from .witness import WitnessRequest, resolve

    fld = alpha.field
    alpha, beta, gamma = fld(alpha), fld(beta), fld(gamma)
    key = (alpha, beta, gamma)
    A = SymbolAlgebra(alpha, beta)
    alg = resolve(bundle, WitnessRequest("AlgebraElement", key))
    delta, _ = verify_t5_witness(A, alg["z"], alg["coeffs"], gamma)
    cs = tuple(resolve(bundle, WitnessRequest("RostChain", key)))
    X = chain_symbols(alpha, beta, gamma, delta, cs)
    subs = []
    for j in range(5):
        sub = resolve(bundle, WitnessRequest("SubDecomposition", (X[j], X[j + 1])))
        validate_decomposition(sub)
        want = ((1, X[j]), (-1, X[j + 1]))
        if sub.target.terms != want or sub.target.modulus.p != 3 or sub.target.modulus.m != m + 1:
            raise SubDecompositionInvalid(f"difference {j + 1} certifies the wrong class")
        if len(sub.terms) > 3:
            raise SubDecompositionInvalid(f"difference {j + 1} has {len(sub.terms)} > 3 symbols")
        subs.append(sub)

    target = KClassExpr(_modulus(m, 3), ((1, X[0]),))
    b = Builder(target)
    for j in range(1, 6):
        k = 2 * j - 1
        b.insert("UnitSlot", k, (0,), (fld.one(),) + X[j][1:])
        b.split(k, 0, X[j][0].inverse())
        b.invert_slot(k, 0)
    # {delta, c3, delta} = {delta, c3, -1} dies mod an odd modulus
    b.split(10, 2, -delta)
    b.delete("MinusAlpha", 10, (0, 2))
    b.reverse_power(10, 2, fld(-1), target.modulus.value)
    b.coeff_mod(10)
    for j in range(4, -1, -1):
        cert = subs[j].certificate
        b.replay(invert_steps(cert.start, cert.steps), offset=2 * j)
    notes = ("over a quadratic extension E; bound over F: 30",) if extension else ()
    return _finish("t5", target, b, bound("t5"), notes)


def make_t5_degenerate(m, fld=None, alpha=2, beta=5):
    """(alpha, beta, gamma, bundle) with z = x, gamma = delta = alpha and c = (beta, alpha, beta)."""
    from .fields import cyclo
    from .witness import WitnessBundle, WitnessRequest

    fld = fld or cyclo(9)
    alpha, beta = fld(alpha), fld(beta)
    A = SymbolAlgebra(alpha, beta)
    gamma = alpha
    key = (alpha, beta, gamma)
    items = [
        (WitnessRequest("AlgebraElement", key), {"z": A.x(), "coeffs": (fld.one(), fld.zero(), fld.zero())}),
        (WitnessRequest("RostChain", key), (beta, alpha, beta)),
    ]
    X = chain_symbols(alpha, beta, gamma, alpha, (beta, alpha, beta))
    for j in range(5):
        items.append((WitnessRequest("SubDecomposition", (X[j], X[j + 1])), trivial_difference(X[j], m)))
    return alpha, beta, gamma, WitnessBundle.of(items)


def plan_t5():
    from .decompose import plan

    return plan("t5")
