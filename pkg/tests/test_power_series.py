import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wildhurwitz.errors import (IncompatibleRamification, NotABasis, NotConjugate, NotExact,
                                WrongCharacteristic)
from wildhurwitz.power_series import (DifferentialForm, Series, antiderivative, augment_delta,
                                      derivative, frobenius_conjugator, global_frobenius_form,
                                      is_exact, is_pinf_earnest, is_pr_earnest, lift_earnest)
from wildhurwitz.valuation_ring import Mode, RingElement, RingSpec, p_power

MIXED1 = RingSpec(3, Mode.MIXED, 1, 8)
MIXED2 = RingSpec(3, Mode.MIXED, 2, 8)
EQUAL = RingSpec(3, Mode.EQUAL, 1, 8)


def el(spec, digits):
    return RingElement.make(spec, digits)


def test_derivative_examples():
    for spec in (MIXED1, EQUAL):
        d = derivative(Series.from_terms(spec, 5, {2: 1}))
        assert d == DifferentialForm.from_b(spec, 5, {2: 2})
        assert derivative(Series.from_ints(spec, [7], 5)).is_zero()
    assert derivative(Series.from_terms(EQUAL, 5, {3: 1})).is_zero()
    assert not derivative(Series.from_terms(MIXED1, 5, {3: 1})).is_zero()


def test_earnest_r0_is_derivative():
    f = Series.from_terms(MIXED1, 6, {2: 1})
    assert is_pr_earnest(f, DifferentialForm.from_b(MIXED1, 6, {2: 2}), 0).ok
    assert not is_pr_earnest(f, DifferentialForm.from_b(MIXED1, 6, {2: 1}), 0).ok


def test_earnest_half_example():
    pi = RingElement.uniformizer(MIXED2)
    f = Series.from_terms(MIXED2, 4, {1: pi, 3: 1})
    delta = DifferentialForm.from_b(MIXED2, 4, {1: 1, 3: pi})
    assert is_pr_earnest(f, delta, "1/2").ok


def test_earnest_failure_reports_branch_and_index():
    f = Series.from_terms(MIXED1, 4, {1: 1})
    verdict = is_pr_earnest(f, DifferentialForm.from_b(MIXED1, 4, {1: 1}), 1)
    assert not verdict.ok
    assert verdict.first_failure.index == 1
    assert verdict.first_failure.describe().startswith("branch-1 failure at i=1")


def test_earnest_branch2_failure():
    f = Series.from_terms(MIXED1, 5, {3: 1})
    verdict = is_pr_earnest(f, DifferentialForm.from_b(MIXED1, 5, {3: 0}), 0)
    assert not verdict.ok and verdict.first_failure.branch == "branch-2"


def test_earnest_rejects_bad_r():
    f = Series.zero(MIXED1, 4)
    with pytest.raises(IncompatibleRamification):
        is_pr_earnest(f, derivative(f), "1/2")


def test_pinf_examples():
    t = RingElement.uniformizer(EQUAL)
    f = Series.from_terms(EQUAL, 5, {3: 1, 1: t})
    assert is_pinf_earnest(f, DifferentialForm.from_b(EQUAL, 5, {1: 1}), t).ok
    one = RingElement.one(EQUAL)
    u = Series.from_terms(EQUAL, 5, {1: 1})
    assert is_pinf_earnest(u, DifferentialForm.from_b(EQUAL, 5, {1: 1}), one).ok
    bad = DifferentialForm.from_b(EQUAL, 5, {3: 1})
    assert not is_pinf_earnest(Series.zero(EQUAL, 5), bad, one).ok
    um = Series.from_terms(MIXED1, 5, {1: 1})
    with pytest.raises(WrongCharacteristic):
        is_pinf_earnest(um, derivative(um), RingElement.one(MIXED1))


def test_lift_examples():
    f = lift_earnest(DifferentialForm.from_b(MIXED1, 5, {1: 1}), None, 1)
    assert f == Series.from_terms(MIXED1, 5, {1: 3})
    delta = DifferentialForm(Series.zero(MIXED1, 5))
    f = lift_earnest(delta, {3: 1}, 1)
    assert f == Series.from_terms(MIXED1, 5, {3: 1})
    assert is_pr_earnest(f, augment_delta(delta, f, 1), 1).ok
    assert not is_pr_earnest(f, delta, 1).ok


def test_lift_rejects_p_part_off_multiples():
    with pytest.raises(ValueError):
        lift_earnest(DifferentialForm(Series.zero(MIXED1, 5)), {2: 1}, 0)


digit_lists = st.lists(st.lists(st.integers(0, 2), min_size=8, max_size=8), min_size=10, max_size=10)


@settings(max_examples=60, deadline=None)
@given(digit_lists, st.sampled_from([0, "1/2", 1]))
def test_lift_derivative_is_scaled_delta(rows, r):
    spec = MIXED2
    delta = DifferentialForm(Series(spec, tuple(el(spec, d) for d in rows)))
    f = lift_earnest(delta, None, r)
    df = derivative(f)
    pr = p_power(spec, r)
    for i in range(1, f.T):
        if i % 3:
            assert df.b(i) == pr * delta.b(i)


@settings(max_examples=60, deadline=None)
@given(digit_lists, st.integers(1, 2))
def test_earnestness_unit_invariance(rows, unit):
    spec = MIXED1
    delta = DifferentialForm(Series(spec, tuple(el(spec, d) for d in rows)))
    f = lift_earnest(delta, {3: 1, 6: 2}, 1)
    full = augment_delta(delta, f, 1)
    scaled_f = Series(spec, tuple(c * unit if i % 3 else c for i, c in enumerate(f.coeffs)))
    scaled_b = Series(spec, tuple(c * unit if (k + 1) % 3 else c
                                  for k, c in enumerate(full.coefficient_series.coeffs)))
    assert is_pr_earnest(scaled_f, DifferentialForm(scaled_b), 1).ok


def test_exactness_examples():
    assert not is_exact(DifferentialForm.from_b(EQUAL, 6, {3: 1}))
    omega = DifferentialForm.from_b(EQUAL, 6, {2: 1})
    assert is_exact(omega)
    assert antiderivative(omega) == Series.from_terms(EQUAL, 6, {2: 2})
    zero = DifferentialForm(Series.zero(EQUAL, 6))
    assert is_exact(zero) and antiderivative(zero).is_zero()
    with pytest.raises(NotExact):
        antiderivative(DifferentialForm.from_b(EQUAL, 6, {3: 1}))
    with pytest.raises(WrongCharacteristic):
        is_exact(DifferentialForm(Series.zero(MIXED1, 4)))


@pytest.mark.parametrize("p", [3, 5])
def test_antiderivative_inverts_derivative(p):
    spec = RingSpec(p, Mode.EQUAL, 1, 4)
    for values in itertools.islice(itertools.product(range(p), repeat=5), 0, None, 7):
        f = Series.from_ints(spec, (0,) + values)
        omega = derivative(f)
        assert is_exact(omega)
        assert derivative(antiderivative(omega)) == omega


def test_frobenius_conjugator():
    pi = RingElement.uniformizer(EQUAL)
    f1 = Series.from_terms(EQUAL, 6, {3: 1})
    f2 = Series.from_terms(EQUAL, 6, {3: RingElement.one(EQUAL) + pi})
    mu = frobenius_conjugator(f1, f2, 1)
    assert mu == Series.from_terms(EQUAL, 6, {3: -1})
    shifted = Series(EQUAL, tuple(c.shift(1) for c in mu.coeffs))
    assert f1 == f2 + shifted
    assert frobenius_conjugator(f1, f1, 1).is_zero()
    f3 = f1 + Series.from_terms(EQUAL, 6, {1: pi})
    with pytest.raises(NotConjugate):
        frobenius_conjugator(f3, f1, 1)


def test_global_frobenius_form():
    u = Series.from_terms(EQUAL, 6, {1: 1})
    x, y, chart = global_frobenius_form(u)
    assert chart.identity
    assert x == "B[u]/(u^3 - v)" and y == "B[x]/(x - v)"
    assert chart.check(u, derivative(u), 0).ok
    with pytest.raises(NotABasis):
        global_frobenius_form(Series.from_terms(EQUAL, 6, {1: RingElement.uniformizer(EQUAL)}))


def test_series_json_roundtrip():
    f = Series.from_terms(MIXED2, 4, {1: RingElement.uniformizer(MIXED2), 3: 2})
    assert Series.from_json(f.to_json()) == f
