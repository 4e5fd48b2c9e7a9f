"""
Permutations and double Schubert polynomials.

Permutations are 1-based one-line tuples.  ``w * s_i`` swaps positions
``i, i+1``; a reduced word ``(a_1, ..., a_k)`` of ``w`` means
``w = s_{a_1} ... s_{a_k}``.

Double Schubert polynomials live in ``Q[x_1..x_m, y_1..y_m]`` and are
obtained from ``S_{w0} = prod_{i+j<=m} (x_i - y_j)`` by divided differences:
``S_{w s_i} = d_i S_w`` whenever ``w(i) > w(i+1)``.

>>> print(schubert_poly(Permutation((1, 3, 2))))
x1 + x2 - y1 - y2
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations as _itperms
from typing import Iterator, Sequence

from .errors import (
    DegreeMismatch,
    IndexOutOfRange,
    InvalidPermutation,
    RingMismatch,
    UnknownGenerator,
)
from .graded_ring import GradedClass, RingSpec, substitute

__all__ = [
    "Permutation", "all_permutations", "length", "rank_function", "schubert_ring",
    "divided_difference", "schubert_poly", "schubert_poly_along", "specialize_y_zero",
    "flag_class",
]


@dataclass(frozen=True)
class Permutation:
    w: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(x) for x in self.w)
        if sorted(w) != list(range(1, len(w) + 1)):
            raise InvalidPermutation(f"{w} is not a permutation of 1..{len(w)}")
        object.__setattr__(self, "w", w)

    @classmethod
    def parse(cls, text: str) -> Permutation:
        try:
            return cls(tuple(int(t) for t in text.replace(" ", "").split(",") if t))
        except ValueError:
            raise InvalidPermutation(f"cannot read a permutation from {text!r}") from None

    @classmethod
    def identity(cls, m: int) -> Permutation:
        return cls(tuple(range(1, m + 1)))

    @classmethod
    def longest(cls, m: int) -> Permutation:
        return cls(tuple(range(m, 0, -1)))

    @classmethod
    def from_word(cls, word: Sequence[int], m: int) -> Permutation:
        w = list(range(1, m + 1))
        for i in word:
            w[i - 1], w[i] = w[i], w[i - 1]
        return cls(tuple(w))

    @property
    def m(self) -> int:
        return len(self.w)

    def __len__(self):
        return len(self.w)

    def __call__(self, i: int) -> int:
        return self.w[i - 1]

    def __mul__(self, other: Permutation) -> Permutation:
        """Composition ``(self * other)(i) = self(other(i))``."""
        if other.m != self.m:
            raise InvalidPermutation("permutations of different sizes")
        return Permutation(tuple(self.w[j - 1] for j in other.w))

    def inverse(self) -> Permutation:
        inv = [0] * self.m
        for i, v in enumerate(self.w, start=1):
            inv[v - 1] = i
        return Permutation(tuple(inv))

    def times_s(self, i: int) -> Permutation:
        w = list(self.w)
        w[i - 1], w[i] = w[i], w[i - 1]
        return Permutation(tuple(w))

    def length(self) -> int:
        w = self.w
        return sum(1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j])

    def descents(self) -> list[int]:
        return [i for i in range(1, self.m) if self.w[i - 1] > self.w[i]]

    def reduced_word(self) -> tuple[int, ...]:
        """Peel the smallest descent each time; deterministic."""
        word: list[int] = []
        w = self
        while True:
            ds = w.descents()
            if not ds:
                break
            word.append(ds[0])
            w = w.times_s(ds[0])
        return tuple(reversed(word))

    def reduced_words(self) -> Iterator[tuple[int, ...]]:
        """Every reduced word, in lexicographic order."""
        return iter(_reduced_words(self.w))

    def __str__(self):
        return ",".join(map(str, self.w))


@lru_cache(maxsize=None)
def _reduced_words(w: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    p = Permutation(w)
    ds = p.descents()
    if not ds:
        return ((),)
    out = []
    for i in ds:
        for u in _reduced_words(p.times_s(i).w):
            out.append(u + (i,))
    return tuple(sorted(out))


def all_permutations(m: int) -> list[Permutation]:
    return [Permutation(p) for p in _itperms(range(1, m + 1))]


def length(w: Permutation) -> int:
    return w.length()


def rank_function(w: Permutation, beta: int, alpha: int) -> int:
    """``s_w(beta, alpha) = #{i <= beta : w(i) <= alpha}``."""
    m = w.m
    if not (1 <= beta <= m and 1 <= alpha <= m):
        raise IndexOutOfRange(f"(beta, alpha) = ({beta}, {alpha}) outside 1..{m}")
    return sum(1 for i in range(1, beta + 1) if w(i) <= alpha)


@lru_cache(maxsize=None)
def schubert_ring(m: int) -> RingSpec:
    gens = [(f"x{i}", 1) for i in range(1, m + 1)] + [(f"y{i}", 1) for i in range(1, m + 1)]
    return RingSpec.create(gens, truncation=max(m * (m - 1) // 2, 1))


def divided_difference(i: int, f: GradedClass) -> GradedClass:
    """
    ``(f - s_i f) / (x_i - x_{i+1})`` computed term by term.

    For ``a > b``, ``x_i^a x_{i+1}^b - x_i^b x_{i+1}^a`` divided by
    ``x_i - x_{i+1}`` is ``x_i^b x_{i+1}^b * sum_{t<a-b} x_i^t x_{i+1}^{a-b-1-t}``.
    """
    ring = f.ring
    try:
        p, q = ring.index(f"x{i}"), ring.index(f"x{i + 1}")
    except UnknownGenerator:
        raise IndexOutOfRange(f"no variables x{i}, x{i + 1} in the ring") from None
    out: dict[tuple[int, ...], Fraction] = {}
    for exps, c in f.terms.items():
        a, b = exps[p], exps[q]
        if a == b:
            continue
        sign = 1 if a > b else -1
        hi, lo = max(a, b), min(a, b)
        for t in range(hi - lo):
            e = list(exps)
            e[p] = lo + t
            e[q] = lo + (hi - lo - 1 - t)
            e = tuple(e)
            out[e] = out.get(e, 0) + sign * c
    return GradedClass(ring, out)


def _top(m: int) -> GradedClass:
    ring = schubert_ring(m)
    out = ring.one()
    for i in range(1, m + 1):
        for j in range(1, m + 1 - i):
            out = out * (ring.gen(f"x{i}") - ring.gen(f"y{j}"))
    return out


def schubert_poly_along(w: Permutation, word: Sequence[int]) -> GradedClass:
    """Apply ``d_{a_1} ... d_{a_k}`` to the top polynomial for a word of ``w^-1 w0``."""
    m = w.m
    if Permutation.from_word(word, m) != w.inverse() * Permutation.longest(m):
        raise InvalidPermutation(f"{tuple(word)} is not a word for w^-1 w0")
    f = _top(m)
    for i in reversed(word):
        f = divided_difference(i, f)
    return f


@lru_cache(maxsize=None)
def _schubert_cached(w: tuple[int, ...]) -> GradedClass:
    p = Permutation(w)
    m = p.m
    if p == Permutation.longest(m):
        return _top(m)
    # climb one step towards w0: pick the smallest ascent i, then S_w = d_i S_{w s_i}
    for i in range(1, m):
        if p.w[i - 1] < p.w[i]:
            return divided_difference(i, _schubert_cached(p.times_s(i).w))
    raise AssertionError("unreachable")


def schubert_poly(w: Permutation) -> GradedClass:
    return _schubert_cached(w.w)


def specialize_y_zero(f: GradedClass) -> GradedClass:
    ring = f.ring
    values = {g.name: (ring.zero() if g.name.startswith("y") else ring.gen(g.name))
              for g in ring.generators}
    return substitute(f, values, ring)


def flag_class(
    w: Permutation,
    x_values: Sequence[GradedClass],
    y_values: Sequence[GradedClass],
) -> tuple[GradedClass, int]:
    """``{Omega(w)}`` with ``x_i, y_i`` replaced by degree-one classes, and its codimension."""
    m = w.m
    if len(x_values) != m or len(y_values) != m:
        raise InvalidPermutation(f"need {m} x-values and {m} y-values")
    values = list(x_values) + list(y_values)
    target = values[0].ring
    for v in values:
        if v.ring != target:
            raise RingMismatch("flag classes live in different rings")
        if not v.is_homogeneous(1):
            raise DegreeMismatch(f"flag class {v} is not homogeneous of degree 1")
    mapping = {f"x{i}": x for i, x in enumerate(x_values, start=1)}
    mapping.update({f"y{i}": y for i, y in enumerate(y_values, start=1)})
    return substitute(schubert_poly(w), mapping, target), w.length()
