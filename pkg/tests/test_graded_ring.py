from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from charclass.errors import (
    DegreeMismatch,
    InvalidRingSpec,
    RingMismatch,
    UnknownGenerator,
)
from charclass.graded_ring import GradedClass, RingSpec, add, component, mul, pair, substitute

from conftest import ABC, CP3, classes, rationals

CP2 = RingSpec.create([("h", 1)], truncation=2, relations=[{"h": 3}], integrate={"h": 2})
C123 = RingSpec.create([("c1", 1), ("c2", 2), ("c3", 3)], truncation=3)


def h(ring=CP2):
    return ring.gen("h")


class TestExamples:
    def test_add(self):
        assert (h() + (-h())).is_zero()
        assert str(add(h(), h())) == "2*h"
        c1, c2 = C123.gen("c1"), C123.gen("c2")
        assert add(c1 + c2, c1) == 2 * c1 + c2

    def test_mul_kills_relation(self):
        assert mul(h(), h()) == CP2.monomial({"h": 2})
        assert mul(h() * h(), h()).is_zero()
        assert str((1 + h()) ** 2) == "1 + 2*h + h^2"

    def test_whitney_pattern(self):
        R = RingSpec.create([("x", 1), ("y", 1)], truncation=2)
        x, y = R.gen("x"), R.gen("y")
        assert str((1 + x) * (1 + y)) == "1 + x + y + x*y"

    def test_component(self):
        f = (1 + h()) ** 2
        assert str(component(f, 1)) == "2*h"
        assert str(component(f, 0)) == "1"
        c1, c2, c3 = (C123.gen(n) for n in ("c1", "c2", "c3"))
        assert component(c1 * c2 + c3, 3) == c1 * c2 + c3
        assert component(f, 7).is_zero()

    def test_pair(self):
        assert pair(5 * h() ** 2) == 5
        assert pair(1 + h()) == 0
        assert pair(component((1 + h()) ** 3, 2)) == 3

    def test_pair_normalization(self):
        R = RingSpec.create([("h", 1)], truncation=2, integrate={"h": 2}, normalization=Fraction(1, 2))
        assert pair(4 * R.gen("h") ** 2) == 2

    def test_canonical_text(self):
        assert str(1 + 2 * h() + Fraction(1, 2) * h() ** 2) == "1 + 2*h + 1/2*h^2"
        c1, c2, c3 = (C123.gen(n) for n in ("c1", "c2", "c3"))
        assert str(4 * c1 * c2 - 4 * c3) == "4*c1*c2 - 4*c3"
        assert str(c3 + c1 ** 3 + c1 * c2) == "c1^3 + c1*c2 + c3"
        assert str(-Fraction(3, 6) * c1) == "-1/2*c1"
        assert str(C123.zero()) == "0"


class TestErrors:
    def test_ring_mismatch(self):
        with pytest.raises(RingMismatch):
            add(h(), CP3.gen("h"))
        with pytest.raises(RingMismatch):
            mul(h(), CP3.gen("h"))

    def test_spec_validation(self):
        with pytest.raises(InvalidRingSpec):
            RingSpec.create([("h", 1), ("h", 2)], truncation=2)
        with pytest.raises(InvalidRingSpec):
            RingSpec.create([("h", 0)], truncation=2)
        with pytest.raises(InvalidRingSpec):
            RingSpec.create([("h", 1)], truncation=2, integrate={"h": 1})
        with pytest.raises(InvalidRingSpec):  # relation far above the truncation
            RingSpec.create([("h", 1)], truncation=2, relations=[{"h": 9}])
        with pytest.raises(InvalidRingSpec):  # integration monomial killed by a relation
            RingSpec.create([("h", 1)], truncation=2, relations=[{"h": 2}], integrate={"h": 2})

    def test_unknown_generator(self):
        with pytest.raises(UnknownGenerator):
            CP2.gen("k")
        with pytest.raises(UnknownGenerator):
            RingSpec.create([("h", 1)], truncation=1, relations=[{"k": 1}])

    def test_pair_needs_integration(self):
        with pytest.raises(InvalidRingSpec):
            pair(C123.gen("c1"))

    def test_exponent_length(self):
        with pytest.raises(ValueError):
            GradedClass(CP2, {(1, 2): 1})

    def test_divide_by_class(self):
        with pytest.raises(DegreeMismatch):
            h() / h()
        assert h() / CP2.constant(2) == Fraction(1, 2) * h()


class TestNormalForm:
    def test_invariants_after_construction(self):
        f = GradedClass(ABC, {(0, 0, 0): 0, (5, 0, 0): 3, (0, 2, 0): 1, (1, 0, 1): 2})
        assert dict(f.terms) == {(1, 0, 1): 2}

    def test_immutable_terms(self):
        with pytest.raises(TypeError):
            h().terms[(0,)] = 1

    def test_hash_and_equality(self):
        assert hash(1 + h()) == hash(h() + 1)
        assert (1 + h()) == (h() + 1)
        assert CP2.constant(3) == 3


class TestSubstitute:
    def test_ring_map(self):
        x = C123.gen("c1")
        values = {"c1": 2 * h(), "c2": h() ** 2, "c3": 0}
        assert substitute(x * x + C123.gen("c2"), values, CP2) == 5 * h() ** 2

    def test_missing_value(self):
        with pytest.raises(UnknownGenerator):
            substitute(C123.gen("c2"), {"c1": h()}, CP2)


ring_choice = st.sampled_from([CP3, ABC])


@given(st.data())
def test_ring_axioms(data):
    R = data.draw(ring_choice)
    a, b, c = (data.draw(classes(R)) for _ in range(3))
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) + c == a + (b + c)
    assert a - a == R.zero()
    assert a * R.one() == a


@given(st.data())
def test_truncation_convolution(data):
    R = data.draw(ring_choice)
    a, b = data.draw(classes(R)), data.draw(classes(R))
    prod = a * b
    for d in range(R.truncation + 1):
        conv = R.zero()
        for i in range(d + 1):
            conv = conv + a.component(i) * b.component(d - i)
        assert prod.component(d) == conv


@given(st.data())
def test_pair_linear(data):
    R = data.draw(ring_choice)
    a, b = data.draw(classes(R)), data.draw(classes(R))
    al, be = data.draw(rationals), data.draw(rationals)
    assert pair(al * a + be * b) == al * pair(a) + be * pair(b)


@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 3), st.integers(0, 2)), max_size=6),
       st.permutations([0, 1, 2]))
def test_relation_reduction_confluent(monos, order):
    """Killing relation monomials one relation at a time, in any order, gives the same normal form."""
    rels = [(0, 2, 0), (3, 0, 0), (1, 0, 1)]
    R = RingSpec.create([("a", 1), ("b", 2), ("c", 3)], truncation=6,
                        relations=[dict(zip("abc", r)) for r in rels])
    free = RingSpec.create([("a", 1), ("b", 2), ("c", 3)], truncation=6)
    raw = {m: Fraction(i + 1) for i, m in enumerate(monos)}
    direct = GradedClass(R, raw)
    stepwise = dict(GradedClass(free, raw).terms)
    for k in order:
        rel = rels[k]
        stepwise = {e: c for e, c in stepwise.items()
                    if not all(x >= r for x, r in zip(e, rel))}
    assert dict(direct.terms) == stepwise
