"""
Truncated graded polynomial rings over the rationals.

A :class:`RingSpec` fixes named generators with (complex) degrees, a list of
monomials declared zero, a truncation degree ``n`` and optionally the top
monomial read off by the pairing with the fundamental class.  Elements are
:class:`GradedClass` values: sparse maps from exponent vectors to exact
:class:`~fractions.Fraction` coefficients, always kept in normal form.

>>> R = RingSpec.create([("h", 1)], truncation=2, relations=[{"h": 3}],
...                     integrate={"h": 2})
>>> h = R.gen("h")
>>> print((1 + h) ** 3)
1 + 3*h + 3*h^2
>>> pair(((1 + h) ** 3).component(2))
Fraction(3, 1)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import (
    DegreeMismatch,
    InvalidRingSpec,
    RingMismatch,
    UnknownGenerator,
)

__all__ = [
    "Generator", "RingSpec", "GradedClass",
    "add", "mul", "component", "pair", "substitute", "format_rational",
]

Exponents = tuple[int, ...]


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int


@dataclass(frozen=True)
class RingSpec:
    """
    Shape of the ring ``Q[g_1..g_k] / (relations, degree > truncation)``.

    Build instances through :meth:`create`; the raw constructor takes
    exponent tuples and still validates every invariant.
    """

    generators: tuple[Generator, ...]
    truncation: int
    relations: tuple[Exponents, ...] = ()
    integration: Exponents | None = None
    normalization: Fraction = Fraction(1)

    def __post_init__(self):
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise InvalidRingSpec(f"duplicate generator names in {names}")
        for g in self.generators:
            if not isinstance(g.degree, int) or g.degree < 1:
                raise InvalidRingSpec(f"generator {g.name} has degree {g.degree}; must be >= 1")
        if self.truncation < 0:
            raise InvalidRingSpec("truncation must be >= 0")
        k = len(self.generators)
        max_deg = max((g.degree for g in self.generators), default=0)
        for rel in self.relations:
            if len(rel) != k or min(rel, default=0) < 0 or not any(rel):
                raise InvalidRingSpec(f"malformed relation monomial {rel}")
            d = self.degree_of(rel)
            if d > self.truncation + max_deg:
                raise InvalidRingSpec(
                    f"relation {self.format_monomial(rel)} has degree {d} > "
                    f"truncation + max generator degree = {self.truncation + max_deg}; "
                    "it is already implied by truncation")
        if self.integration is not None:
            if len(self.integration) != k or min(self.integration, default=0) < 0:
                raise InvalidRingSpec(f"malformed integration monomial {self.integration}")
            if self.degree_of(self.integration) != self.truncation:
                raise InvalidRingSpec(
                    f"integration monomial {self.format_monomial(self.integration)} has "
                    f"degree {self.degree_of(self.integration)}, expected {self.truncation}")
            if self.is_killed(self.integration):
                raise InvalidRingSpec("integration monomial is killed by a relation")
        object.__setattr__(self, "normalization", Fraction(self.normalization))

    @classmethod
    def create(
        cls,
        generators: Iterable[tuple[str, int]],
        truncation: int,
        relations: Iterable[Mapping[str, int]] = (),
        integrate: Mapping[str, int] | None = None,
        normalization: Rational | int = 1,
    ) -> RingSpec:
        gens = tuple(Generator(name, deg) for name, deg in generators)
        index = {g.name: i for i, g in enumerate(gens)}

        def vec(mono: Mapping[str, int]) -> Exponents:
            out = [0] * len(gens)
            for name, e in mono.items():
                if name not in index:
                    raise UnknownGenerator(f"unknown generator {name!r}")
                out[index[name]] += e
            return tuple(out)

        return cls(
            generators=gens,
            truncation=truncation,
            relations=tuple(vec(m) for m in relations),
            integration=None if integrate is None else vec(integrate),
            normalization=Fraction(normalization),
        )

    # -- helpers -----------------------------------------------------------

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def index(self, name: str) -> int:
        for i, g in enumerate(self.generators):
            if g.name == name:
                return i
        raise UnknownGenerator(f"ring has no generator {name!r}")

    def degree_of(self, exps: Exponents) -> int:
        return sum(e * g.degree for e, g in zip(exps, self.generators))

    def is_killed(self, exps: Exponents) -> bool:
        """True when the monomial vanishes by truncation or a relation."""
        if self.degree_of(exps) > self.truncation:
            return True
        return any(all(e >= r for e, r in zip(exps, rel)) for rel in self.relations)

    def format_monomial(self, exps: Exponents) -> str:
        parts = []
        for e, g in zip(exps, self.generators):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts) if parts else "1"

    def sort_key(self, exps: Exponents):
        # graded-lex: ascending degree, then larger powers of earlier generators first
        return (self.degree_of(exps), tuple(-e for e in exps))

    # -- element constructors ---------------------------------------------

    def zero(self) -> GradedClass:
        return GradedClass(self, {})

    def one(self) -> GradedClass:
        return self.constant(1)

    def constant(self, q) -> GradedClass:
        return GradedClass(self, {(0,) * len(self.generators): Fraction(q)})

    def gen(self, name: str) -> GradedClass:
        exps = [0] * len(self.generators)
        exps[self.index(name)] = 1
        return GradedClass(self, {tuple(exps): Fraction(1)})

    def monomial(self, powers: Mapping[str, int], coeff=1) -> GradedClass:
        exps = [0] * len(self.generators)
        for name, e in powers.items():
            exps[self.index(name)] += e
        return GradedClass(self, {tuple(exps): Fraction(coeff)})


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class GradedClass:
    """
    An element of a :class:`RingSpec`, stored in normal form.

    Instances are immutable; arithmetic returns new objects.  Python
    numbers are promoted to constants, so ``1 + h`` and ``h / 2`` work.
    """

    __slots__ = ("_ring", "_terms", "_hash")

    def __init__(self, ring: RingSpec, terms: Mapping[Exponents, object]):
        clean = {}
        k = len(ring.generators)
        for exps, c in terms.items():
            if len(exps) != k:
                raise ValueError(f"exponent vector {exps} does not match {k} generators")
            c = Fraction(c)
            if c and not ring.is_killed(exps):
                clean[exps] = clean.get(exps, 0) + c
        self._ring = ring
        self._terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _trusted(cls, ring: RingSpec, terms: dict) -> GradedClass:
        obj = cls.__new__(cls)
        obj._ring = ring
        obj._terms = terms
        obj._hash = None
        return obj

    @property
    def ring(self) -> RingSpec:
        return self._ring

    @property
    def terms(self) -> Mapping[Exponents, Fraction]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degrees(self) -> set[int]:
        return {self._ring.degree_of(e) for e in self._terms}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        ds = self.degrees()
        if degree is None:
            return len(ds) <= 1
        return ds <= {degree}

    def coefficient(self, powers: Mapping[str, int] | Exponents) -> Fraction:
        if not isinstance(powers, tuple):
            exps = [0] * len(self._ring.generators)
            for name, e in powers.items():
                exps[self._ring.index(name)] += e
            powers = tuple(exps)
        return self._terms.get(powers, Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * len(self._ring.generators), Fraction(0))

    def component(self, d: int) -> GradedClass:
        deg = self._ring.degree_of
        return GradedClass._trusted(
            self._ring, {e: c for e, c in self._terms.items() if deg(e) == d})

    def pair(self) -> Fraction:
        return pair(self)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> GradedClass:
        if isinstance(other, GradedClass):
            if other._ring != self._ring:
                raise RingMismatch("operands live in different rings")
            return other
        if isinstance(other, (int, Rational)):
            return self._ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for e, c in other._terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return GradedClass._trusted(self._ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return GradedClass._trusted(self._ring, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            q = Fraction(other)
            if not q:
                return self._ring.zero()
            return GradedClass._trusted(self._ring, {e: c * q for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ring = self._ring
        trunc = ring.truncation
        rels = ring.relations
        deg_a = {e: ring.degree_of(e) for e in self._terms}
        deg_b = {e: ring.degree_of(e) for e in other._terms}
        out: dict[Exponents, Fraction] = {}
        for ea, ca in self._terms.items():
            da = deg_a[ea]
            for eb, cb in other._terms.items():
                if da + deg_b[eb] > trunc:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                if rels and any(all(x >= r for x, r in zip(e, rel)) for rel in rels):
                    continue
                s = out.get(e, 0) + ca * cb
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return GradedClass._trusted(ring, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GradedClass):
            if not other.is_homogeneous(0) or other.is_zero():
                raise DegreeMismatch("can only divide by a nonzero constant")
            other = other.constant_term()
        if not isinstance(other, (int, Rational)):
            return NotImplemented
        return self * (1 / Fraction(other))

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self._ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, GradedClass):
            return self._ring == other._ring and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self._terms == self._ring.constant(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._ring, frozenset(self._terms.items())))
        return self._hash

    # -- text ---------------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        return sorted(self._terms.items(), key=lambda item: self._ring.sort_key(item[0]))

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for i, (exps, c) in enumerate(self.sorted_terms()):
            mono = self._ring.format_monomial(exps)
            neg = c < 0
            a = -c if neg else c
            if mono == "1":
                body = format_rational(a)
            elif a == 1:
                body = mono
            else:
                body = f"{format_rational(a)}*{mono}"
            if i == 0:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f" - {body}" if neg else f" + {body}")
        return "".join(out)

    def __repr__(self):
        return f"GradedClass({str(self)!r})"


def add(a: GradedClass, b: GradedClass) -> GradedClass:
    if a.ring != b.ring:
        raise RingMismatch("add: operands live in different rings")
    return a + b


def mul(a: GradedClass, b: GradedClass) -> GradedClass:
    if a.ring != b.ring:
        raise RingMismatch("mul: operands live in different rings")
    return a * b


def component(a: GradedClass, d: int) -> GradedClass:
    return a.component(d)


def pair(a: GradedClass) -> Fraction:
    """Kronecker pairing with the fundamental class; 0 without a top term."""
    ring = a.ring
    if ring.integration is None:
        raise InvalidRingSpec("ring has no integration monomial")
    return ring.normalization * a._terms.get(ring.integration, Fraction(0))


def substitute(
    a: GradedClass,
    values: Mapping[str, GradedClass],
    target: RingSpec,
) -> GradedClass:
    """
    Ring map sending each generator of ``a.ring`` to a class of ``target``.

    Generators absent from ``values`` raise :class:`UnknownGenerator` unless
    ``a`` does not involve them.
    """
    ring = a.ring
    powers: dict[tuple[int, int], GradedClass] = {}

    def power(i: int, e: int) -> GradedClass:
        key = (i, e)
        if key not in powers:
            name = ring.generators[i].name
            if name not in values:
                raise UnknownGenerator(f"no value supplied for generator {name!r}")
            v = values[name]
            if isinstance(v, GradedClass):
                if v.ring != target:
                    raise RingMismatch(f"value for {name!r} lives in another ring")
            else:
                v = target.constant(v)
            powers[key] = v if e == 1 else power(i, e - 1) * v
        return powers[key]

    result = target.zero()
    for exps, c in a.terms.items():
        term = target.constant(c)
        for i, e in enumerate(exps):
            if e:
                term = term * power(i, e)
                if term.is_zero():
                    break
        result = result + term
    return result
