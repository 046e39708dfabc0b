import pytest
from hypothesis import given, strategies as st

from milnork.errors import MissingWitness, WitnessInvalid, ZeroVector
from milnork.fields import QQ, cyclo
from milnork.forms import INF, hilbert_symbol_Q, pfister_value, relevant_places, verify_representation_t1
from milnork.witness import (
    PROVABLY_UNSOLVABLE,
    Policy,
    WitnessBundle,
    WitnessRequest,
    derive_recursion_witness,
    make_constructed_instance_t1,
    make_constructed_instance_t2,
    make_constructed_linkage,
    make_constructed_sivatski,
    norm_equation_Q,
    resolve,
    t2_value,
)


def Q(*xs):
    return tuple(QQ(x) for x in xs)


def norm_req(a, b):
    return WitnessRequest("NormRepresentation", Q(a, b))


def test_norm_equation_examples():
    assert norm_equation_Q(QQ(2), QQ(7), 5) == Q(3, 1)
    assert norm_equation_Q(QQ(-1), QQ(-1), 4) is PROVABLY_UNSOLVABLE


@given(st.integers(-9, 9).filter(bool), st.integers(-5, 5), st.integers(-5, 5))
def test_norm_equation_solves_constructed(a, x, y):
    beta = QQ(x * x - a * y * y)
    if beta.is_zero():
        return
    res = norm_equation_Q(QQ(a), beta, 6)
    u, v = res
    assert u * u - QQ(a) * v * v == beta


def test_bundle_rejects_bad_witness():
    with pytest.raises(WitnessInvalid):
        WitnessBundle.of([(norm_req(2, 7), Q(3, 2))])


def test_resolve_lookup_and_search():
    b = WitnessBundle.of([(norm_req(3, -23), Q(2, 3))])
    assert resolve(b, norm_req(3, -23)) == Q(2, 3)
    with pytest.raises(MissingWitness) as exc:
        resolve(b, norm_req(2, 7))
    assert exc.value.request == norm_req(2, 7)
    found = resolve(b.with_policy(Policy("bounded-search", 5)), norm_req(2, 7))
    assert found == Q(3, 1)


def test_missing_linkage():
    req = WitnessRequest("Linkage", (Q(2, 3), Q(5, 7), Q(11, 13)))
    with pytest.raises(MissingWitness) as exc:
        resolve(WitnessBundle.of(), req)
    assert exc.value.request.kind == "Linkage"


def test_derive_recursion_example():
    entries, ts = derive_recursion_witness(Q(2, 5), Q(1, 1))
    assert entries == Q(2, -1)
    assert ts == [Q(-1, -1)]


def test_derive_recursion_fixed_point():
    # <<2>>(3, 2) = 9 - 8 = 1
    entries, ts = derive_recursion_witness(Q(2, 5), Q(3, 2))
    assert ts == [Q(3, 2)] and entries[-1] == 1


def test_derive_recursion_zero_vector():
    with pytest.raises(ZeroVector):
        derive_recursion_witness(Q(2, 5), Q(0, 0))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_recursion_witnesses_verify_at_every_depth(n):
    for seed in range(5):
        sym, bundle = make_constructed_instance_t1(n, 1, seed=seed, validate=False)
        ts = bundle.lookup(WitnessRequest("T1Representation", sym.entries))
        alphas = sym.entries
        # every nonzero t_i yields a checked representation of the next level down
        for i in range(2, n):
            t = ts[i - 1]
            if all(x.is_zero() for x in t) or pfister_value(alphas[: i - 1], t).is_zero():
                continue
            entries, sub = derive_recursion_witness(alphas[:i], t)
            if len(entries) >= 2:
                assert verify_representation_t1(entries, sub)


@given(st.integers(0, 10**6))
def test_t1_instances_are_hilbert_trivial(seed):
    sym, bundle = make_constructed_instance_t1(2, 1, seed=seed, validate=False)
    a, b = sym.entries
    for v in relevant_places(a, b):
        assert hilbert_symbol_Q(a, b, v) == 1


@given(st.integers(0, 10**6))
def test_t1_generation_deterministic(seed):
    a = make_constructed_instance_t1(3, 1, seed=seed, validate=False)
    b = make_constructed_instance_t1(3, 1, seed=seed, validate=False)
    assert a[0] == b[0] and a[1].to_json() == b[1].to_json()


def test_t2_instances_satisfy_representation():
    for n, i in [(2, 2), (3, 2), (3, 3), (4, 3)]:
        al, be, _, bundle = make_constructed_instance_t2(n, i, 1, seed=n + i, validate=False)
        ts = bundle.lookup(WitnessRequest("T2Representation", (al, be)))
        assert al[i - 1] == t2_value(al, be, ts)


def test_bundle_json_roundtrip():
    _, bundle = make_constructed_instance_t1(4, 1, seed=3)
    again = WitnessBundle.from_json(bundle.to_json())
    assert again.to_json() == bundle.to_json()
    syms, _, _, b2 = make_constructed_sivatski(1, seed=1)
    assert WitnessBundle.from_json(b2.to_json()).to_json() == b2.to_json()


def test_generators_over_cyclotomic_field():
    sym, _ = make_constructed_instance_t1(3, 1, cyclo(4), seed=2)
    assert sym.entries[0].field == cyclo(4)
    syms, link, _, _ = make_constructed_linkage(2, 1, cyclo(4), seed=0)
    assert len(syms) == 3
