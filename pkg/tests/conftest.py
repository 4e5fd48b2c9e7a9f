import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from charclass.graded_ring import GradedClass, RingSpec

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# a CP^3-shaped ring and a three-generator ring with a relation and a mixed top monomial
CP3 = RingSpec.create([("h", 1)], truncation=3, relations=[{"h": 4}], integrate={"h": 3})
ABC = RingSpec.create([("a", 1), ("b", 2), ("c", 3)], truncation=4,
                      relations=[{"b": 2}], integrate={"a": 1, "c": 1})
RINGS = [CP3, ABC]

rationals = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4))


@st.composite
def classes(draw, ring):
    n = len(ring.generators)
    terms = {}
    for _ in range(draw(st.integers(0, 6))):
        exps = tuple(draw(st.integers(0, 4)) for _ in range(n))
        terms[exps] = draw(rationals)
    return GradedClass(ring, terms)


def random_class(rng: random.Random, ring: RingSpec, size: int = 6) -> GradedClass:
    n = len(ring.generators)
    terms = {}
    for _ in range(rng.randint(0, size)):
        exps = tuple(rng.randint(0, 4) for _ in range(n))
        terms[exps] = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
    return GradedClass(ring, terms)


@pytest.fixture
def rng():
    return random.Random(20240611)
