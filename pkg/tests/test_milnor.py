import random

import pytest
from hypothesis import given, strategies as st

from milnork.errors import ModulusMismatch, ParseError, SideConditionViolated
from milnork.fields import QQ, cyclo
from milnork.milnor import (
    Builder,
    Certificate,
    KClassExpr,
    Modulus,
    MoveStep,
    apply_move,
    certificate_from_json,
    certificate_to_json,
    check_certificate,
    cup,
    exp_map,
    invert_steps,
    normalize_over_Q,
    parse_class,
    replay,
    shift_map,
    step_from_json,
    step_to_json,
    sum_identity_result,
    transposition_swaps,
)

M4 = Modulus(2, 2)


def cls(text):
    return parse_class(text, QQ)


def one(*es):
    return KClassExpr(M4, ((1, tuple(QQ(e) for e in es)),))


def test_steinberg_deletion():
    out = apply_move(one(3, -2), MoveStep("Steinberg", (0,), (0, 1)))
    assert out.terms == ()


def test_minus_alpha_deletion():
    assert apply_move(one(5, -5), MoveStep("MinusAlpha", (0,), (0, 1))).terms == ()


def test_bilin_split():
    out = apply_move(one(4, 3), MoveStep("BilinSplit", (0,), (0,), (QQ(2),)))
    assert out.terms == ((1, (QQ(2), QQ(3))), (1, (QQ(2), QQ(3))))


def test_steinberg_side_condition():
    with pytest.raises(SideConditionViolated):
        apply_move(one(3, 2), MoveStep("Steinberg", (0,), (0, 1)))


def test_coeff_mod_drops_zero():
    e = KClassExpr(M4, ((4, (QQ(2), QQ(3))),))
    assert apply_move(e, MoveStep("CoeffMod", (0,))).terms == ()


def test_empty_certificate_valid():
    e = one(2, 3)
    assert check_certificate(Certificate(M4, QQ, e, e, ()))


def test_wrong_endpoint_rejected():
    e = one(2, 3)
    res = check_certificate(Certificate(M4, QQ, e, one(2, 5), ()))
    assert not res


def test_shift_examples():
    assert shift_map(cls("{2,3}@2^1")).terms == cls("2*{2,3}@2^2").terms
    assert shift_map(cls("{2,3}@2^1")).modulus == M4
    assert shift_map(KClassExpr(Modulus(2, 1), ())).terms == ()
    assert shift_map(cls("3*{5,7}@2^1")).terms == cls("6*{5,7}@2^2").terms


def test_exp_examples():
    out = exp_map(cls("{2,7}@2^2"))
    assert out.modulus == Modulus(2, 1) and out.terms == cls("{2,7}@2^1").terms
    assert exp_map(cls("2*{2,3}@2^2")).terms == ()


def test_cup_examples():
    assert cup(cls("{2}@2^1"), cls("{3}@2^1")).terms == cls("{2,3}@2^1").terms
    out = cup(cls("{2}@2^1 + {5}@2^1"), cls("{3}@2^1"))
    assert out.terms == cls("{2,3}@2^1 + {5,3}@2^1").terms
    assert cup(cls("{2}@2^1"), KClassExpr(Modulus(2, 1), ())).terms == ()


def test_cup_modulus_mismatch():
    with pytest.raises(ModulusMismatch):
        cup(cls("{2}@2^1"), cls("{3}@2^2"))


def test_normalize_examples():
    assert normalize_over_Q(cls("{4,3}@2^2")).terms == cls("2*{2,3}@2^2").terms
    assert normalize_over_Q(cls("{8,3}@2^2 - 3*{2,3}@2^2")).terms == ()
    assert normalize_over_Q(cls("{1,5}@2^2")).terms == ()


def test_parse_errors():
    for bad in ("{2,3", "{2,x}@2^2", "{2,3}@2^2 + {2}@2^2"):
        with pytest.raises((ParseError, ValueError)):
            cls(bad)


def test_parse_cyclotomic_entries():
    e = parse_class("{[0,1]@cyclo(4),2}@2^2", cyclo(4))
    assert e.terms[0][1][0] == cyclo(4).gen()


def test_transposition_swaps_odd():
    for p in range(4):
        for q in range(4):
            if p == q:
                continue
            steps = transposition_swaps(0, p, q)
            assert len(steps) % 2 == 1
            es = tuple(QQ(v) for v in (2, 3, 5, 7))
            out = replay(KClassExpr(M4, ((1, es),)), steps)
            want = list(es)
            want[p], want[q] = want[q], want[p]
            assert out.terms == ((-1, tuple(want)),)


def test_sum_identity_result_values():
    es = (QQ(3), QQ(5))
    assert sum_identity_result(es, 0, 1) == (QQ(8), QQ(-5) / 3)


# --- properties -------------------------------------------------------------

nonzero = st.integers(-30, 30).filter(bool).map(QQ)
ints = st.integers(-6, 6)


@st.composite
def expressions(draw, grade=2, p=2, m=1, max_terms=4):
    n = draw(st.integers(0, max_terms))
    terms = tuple((draw(ints), tuple(draw(nonzero) for _ in range(grade))) for _ in range(n))
    return KClassExpr(Modulus(p, m), terms)


@given(expressions(p=2, m=1), st.sampled_from([2, 3, 5]))
def test_exp_after_shift_is_empty(e, p):
    e = KClassExpr(Modulus(p, 1), e.terms)
    assert exp_map(shift_map(e)).terms == ()


@given(expressions(), expressions(grade=1))
def test_cup_distributes(a, b):
    ab = cup(a, b)
    assert len(ab) == len(a) * len(b)


def random_steps(start, rng, k):
    """A random chain of legal moves (mixed rules) from ``start``."""
    b = Builder(start)
    for _ in range(k):
        e = b.expr
        if not e.terms:
            b.insert("UnitSlot", 0, (0,), (QQ(1), QQ(rng.randint(2, 9))))
            continue
        t = rng.randrange(len(e.terms))
        c, es = e.terms[t]
        r = rng.random()
        if r < 0.25:
            b.split(t, rng.randrange(2), QQ(rng.choice([2, 3, -1, 5])))
        elif r < 0.4:
            b.apply(MoveStep("Swap", (t,), (0,)))
        elif r < 0.55 and c in (1, -1) and not (es[0] + es[1]).is_zero():
            b.sum_identity(t, 0, 1)
        elif r < 0.7:
            b.apply(MoveStep("BilinSplit", (t,), (), (QQ(rng.randint(-3, 3)),)))
        elif r < 0.8:
            b.insert("Steinberg", t, (0, 1), (QQ(3), QQ(-2)))
        elif r < 0.9:
            b.coeff_mod(t)
        else:
            b.invert_slot(t, rng.randrange(2))
    return b.steps, b.expr


@given(st.integers(0, 10**6))
def test_invert_steps_returns_to_start(seed):
    rng = random.Random(seed)
    start = KClassExpr(M4, ((1, (QQ(rng.randint(2, 20)), QQ(rng.randint(-9, -2)))),))
    steps, end = random_steps(start, rng, 8)
    back = invert_steps(start, steps)
    assert replay(end, back).terms == start.terms
    assert check_certificate(Certificate(M4, QQ, end, start, tuple(back)))


@given(st.integers(0, 10**6))
def test_certificate_json_roundtrip(seed):
    rng = random.Random(seed)
    start = one(rng.randint(2, 20), rng.randint(2, 20))
    steps, end = random_steps(start, rng, 6)
    cert = Certificate(M4, QQ, start, end, tuple(steps))
    doc = certificate_to_json(cert)
    again = certificate_from_json(doc)
    assert certificate_to_json(again) == doc
    assert check_certificate(again)


def test_step_json_roundtrip():
    s = MoveStep("BilinSplit", (0, 2), (1,), (QQ(3),))
    assert step_from_json(step_to_json(s), QQ) == s
