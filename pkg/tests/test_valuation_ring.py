from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import carry, digits_of_int, equal_mul, mixed_add, mixed_mul, order
from wildhurwitz.errors import IncompatibleRamification, NotAUnit, SchemaError
from wildhurwitz.valuation_ring import (INF, Mode, RingElement, RingSpec, add, invert_unit,
                                        make, mul, p_power, parse_rational, valuation)

SPECS = [RingSpec(3, Mode.MIXED, 1, 8), RingSpec(3, Mode.MIXED, 2, 8), RingSpec(5, Mode.MIXED, 2, 7),
         RingSpec(3, Mode.EQUAL, 1, 8), RingSpec(5, Mode.EQUAL, 2, 6)]


@st.composite
def spec_and_digits(draw, count=1, unit=False):
    spec = draw(st.sampled_from(SPECS))
    out = []
    for _ in range(count):
        ds = draw(st.lists(st.integers(0, spec.p - 1), min_size=spec.M, max_size=spec.M))
        if unit and ds[0] == 0:
            ds[0] = 1
        out.append(ds)
    return spec, out


def oracle_mul(spec, a, b):
    if spec.is_mixed:
        return mixed_mul(a, b, spec.p, spec.N, spec.M)
    return equal_mul(a, b, spec.p, spec.M)


def test_make_examples():
    assert make(RingSpec(3, Mode.MIXED, 1, 4), [4]).digits == (1, 1, 0, 0)
    assert make(RingSpec(3, Mode.MIXED, 2, 4), [0, 0, 3, 0]).is_zero()
    assert make(RingSpec(5, Mode.EQUAL, 1, 3), [7, 0, 0]).digits == (2, 0, 0)


def test_make_negative_and_large_digits():
    spec = RingSpec(3, Mode.MIXED, 2, 6)
    raw = [-1, 7, 12, -5]
    assert make(spec, raw).digits == carry(raw, 3, 2, 6)


def test_mul_examples():
    for spec in SPECS:
        pi = RingElement.uniformizer(spec)
        one = RingElement.one(spec)
        assert (one + pi) * (one - pi) == one - pi * pi
    s1 = RingSpec(3, Mode.MIXED, 1, 4)
    assert (RingElement.from_int(s1, 2) * 2).digits[:2] == (1, 1)
    s2 = RingSpec(3, Mode.MIXED, 2, 4)
    pi = RingElement.uniformizer(s2)
    assert (pi * pi).digits == (0, 0, 1, 0)
    assert pi * pi == RingElement.from_int(s2, 3)


def test_valuation_examples():
    for spec in SPECS:
        if spec.is_mixed:
            assert valuation(RingElement.from_int(spec, spec.p)) == 1
        assert valuation(RingElement.zero(spec)) is None
    assert valuation(RingElement.uniformizer(RingSpec(3, Mode.MIXED, 2, 8))) == Fraction(1, 2)


def test_equal_char_p_is_zero():
    spec = RingSpec(3, Mode.EQUAL, 1, 8)
    assert RingElement.from_int(spec, 3).is_zero()
    assert p_power(spec, 1).is_zero()
    assert p_power(spec, 0) == RingElement.one(spec)


def test_invert_examples():
    spec = RingSpec(3, Mode.MIXED, 1, 3)
    assert invert_unit(RingElement.from_int(spec, 2)).digits == (2, 1, 1)
    assert invert_unit(RingElement.one(spec)) == RingElement.one(spec)
    s = RingSpec(3, Mode.MIXED, 1, 6)
    geometric = sum((3 ** k for k in range(6)))
    assert invert_unit(RingElement.from_int(s, 1 - 3)) == RingElement.from_int(s, geometric)
    with pytest.raises(NotAUnit):
        invert_unit(RingElement.uniformizer(s))
    with pytest.raises(NotAUnit):
        invert_unit(RingElement.zero(s))


def test_p_power():
    s = RingSpec(3, Mode.MIXED, 2, 8)
    assert p_power(s, 0) == RingElement.one(s)
    assert p_power(s, 1) == RingElement.from_int(s, 3)
    assert p_power(s, Fraction(1, 2)) == RingElement.uniformizer(s)
    assert p_power(s, INF).is_zero()
    with pytest.raises(IncompatibleRamification):
        p_power(s, Fraction(1, 3))


def test_spec_mismatch():
    from wildhurwitz.errors import SpecMismatch
    a = RingElement.one(SPECS[0])
    b = RingElement.one(SPECS[1])
    with pytest.raises(SpecMismatch):
        add(a, b)


@settings(max_examples=150, deadline=None)
@given(spec_and_digits(count=2))
def test_mul_matches_oracle(data):
    spec, (a, b) = data
    assert mul(make(spec, a), make(spec, b)).digits == oracle_mul(spec, a, b)


@settings(max_examples=150, deadline=None)
@given(spec_and_digits(count=2))
def test_add_matches_oracle(data):
    spec, (a, b) = data
    got = add(make(spec, a), make(spec, b)).digits
    if spec.is_mixed:
        assert got == mixed_add(a, b, spec.p, spec.N, spec.M)
    else:
        assert got == tuple((x + y) % spec.p for x, y in zip(a, b))


@settings(max_examples=100, deadline=None)
@given(spec_and_digits(count=3))
def test_ring_laws(data):
    spec, (a, b, c) = data
    x, y, z = (make(spec, d) for d in (a, b, c))
    assert x * y == y * x and x + y == y + x
    assert (x * y) * z == x * (y * z)
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x - x == RingElement.zero(spec)


@settings(max_examples=100, deadline=None)
@given(spec_and_digits(count=1))
def test_make_idempotent(data):
    spec, (a,) = data
    x = make(spec, a)
    assert make(spec, x.digits) == x
    assert x.digits == make(spec, list(x.digits)).digits


@settings(max_examples=100, deadline=None)
@given(spec_and_digits(count=2))
def test_valuation_additive(data):
    spec, (a, b) = data
    x, y = make(spec, a), make(spec, b)
    vx, vy = x.valuation(), y.valuation()
    if vx is not None and vy is not None and vx + vy < Fraction(spec.M, spec.N):
        assert (x * y).valuation() == vx + vy
    if vx is not None:
        assert vx == Fraction(order(x.digits), spec.N)


@settings(max_examples=200, deadline=None)
@given(spec_and_digits(count=1, unit=True))
def test_invert_roundtrip(data):
    spec, (a,) = data
    x = make(spec, a)
    assert x * invert_unit(x) == RingElement.one(spec)


def test_from_int_matches_base_p():
    for spec in SPECS[:3]:
        for n in (0, 1, 2, 7, 80, 12345, -1):
            assert RingElement.from_int(spec, n).digits == digits_of_int(n, spec.p, spec.N, spec.M)


def test_json_roundtrip():
    spec = RingSpec(3, Mode.MIXED, 2, 8)
    x = make(spec, [1, 2, 0, 1])
    data = x.to_json()
    assert data["digits"] == list(x.digits) and len(data["digits"]) == 8
    assert RingElement.from_json(data) == x
    assert RingSpec.from_json(spec.to_json()) == spec
    with pytest.raises(SchemaError):
        RingElement.from_json([1, 2])


def test_parse_rational():
    assert parse_rational("1/2") == Fraction(1, 2)
    assert parse_rational("inf") == INF
    assert parse_rational(3) == 3
    with pytest.raises(SchemaError):
        parse_rational("half")
    with pytest.raises(SchemaError):
        parse_rational(0.5)


def test_spec_validation():
    with pytest.raises(ValueError):
        RingSpec(4, Mode.MIXED, 1, 4)
    with pytest.raises(ValueError):
        RingSpec(3, Mode.MIXED, 0, 4)
