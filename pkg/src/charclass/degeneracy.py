"""
Degeneracy loci of general symmetric bundle maps ``E -> E* (⊗ L)``.

The class of ``Omega(s) = {rank <= s}`` is ``2^(l-s)`` times the determinant
of the ``(l-s) x (l-s)`` matrix whose ``(i, j)`` entry (1-based) is
``c_{l-s+j-2i+1}``, with ``c_0 = 1`` and out-of-range indices zero.  The
entries are Chern classes of ``E*``, or of ``E* ⊗ sqrt(L)`` in the twisted
case.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .bundles import Abstract, Dual, HalfTwist, Line, TensorLine, Sym, total_chern
from .errors import BoundViolated, InvalidRankBound
from .graded_ring import GradedClass, RingSpec, substitute

__all__ = [
    "SymmetricMapSpec", "TruncationWarning", "harris_tu_indices", "harris_tu_class",
    "degeneracy_codim", "ParityResult", "parity_constraint", "HodgeReport",
    "hodge_enumeration", "hodge_pipeline_value", "hodge_bound_pipeline",
]


class TruncationWarning(UserWarning):
    """The ring is too small to hold the locus class, which truncates to 0."""


@dataclass(frozen=True)
class SymmetricMapSpec:
    ell: int
    s: int
    chern_source: GradedClass

    def __post_init__(self):
        if not 0 <= self.s <= self.ell:
            raise InvalidRankBound(f"need 0 <= s <= ell, got s={self.s}, ell={self.ell}")
        if self.chern_source.component(0) != 1:
            raise ValueError("chern_source must have degree-0 part 1")


def harris_tu_indices(ell: int, s: int) -> list[list[int]]:
    """Chern index of every matrix entry, before the out-of-range convention."""
    d = ell - s
    return [[d + j - 2 * i + 1 for j in range(1, d + 1)] for i in range(1, d + 1)]


def _det(matrix: list[list[GradedClass]], ring: RingSpec) -> GradedClass:
    """Laplace expansion along rows, memoised on the remaining column set."""
    size = len(matrix)
    memo: dict[tuple[int, frozenset], GradedClass] = {}

    def minor(row: int, cols: frozenset) -> GradedClass:
        if row == size:
            return ring.one()
        key = (row, cols)
        if key not in memo:
            total = ring.zero()
            ordered = sorted(cols)
            for pos, j in enumerate(ordered):
                entry = matrix[row][j]
                if entry.is_zero():
                    continue
                sub = minor(row + 1, cols - {j})
                if sub.is_zero():
                    continue
                term = entry * sub
                total = total - term if pos % 2 else total + term
            memo[key] = total
        return memo[key]

    return minor(0, frozenset(range(size)))


def harris_tu_class(spec: SymmetricMapSpec) -> GradedClass:
    ell, s, src = spec.ell, spec.s, spec.chern_source
    ring = src.ring
    d = ell - s
    if d == 0:
        return ring.one()
    codim = degeneracy_codim(ell, s)
    if codim > ring.truncation:
        warnings.warn(
            f"locus class has degree {codim} > truncation {ring.truncation}; it truncates to 0",
            TruncationWarning, stacklevel=2)

    def c(k: int) -> GradedClass:
        if k == 0:
            return ring.one()
        if k < 0 or k > ell:
            return ring.zero()
        return src.component(k)

    matrix = [[c(k) for k in row] for row in harris_tu_indices(ell, s)]
    return _det(matrix, ring) * (2 ** d)


def degeneracy_codim(ell: int, s: int) -> int:
    if not 0 <= s <= ell:
        raise InvalidRankBound(f"need 0 <= s <= ell, got s={s}, ell={ell}")
    return comb(ell - s + 1, 2)


@dataclass(frozen=True)
class ParityResult:
    p: int
    factor: int
    required_rhs: Fraction

    @property
    def trivial(self) -> bool:
        """For even ``p`` the clutched class in degree ``p`` vanishes."""
        return self.factor == 0


def parity_constraint(p: int, lhs_pairing) -> ParityResult:
    """Right-hand pairing forced by ``c_p(E*) = (-1)^p c_p(E)``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    factor = 1 + (-1) ** (p + 1)
    return ParityResult(p, factor, factor * Fraction(lhs_pairing))


@dataclass(frozen=True)
class HodgeReport:
    g: int
    g_base: int
    c1E: Fraction
    value: Fraction          # pairing of the locus class Omega(g-1) with [X]
    locus: GradedClass       # the same class in the point ring of the base curve
    bound: Fraction          # g (g_X - 1), required to dominate c1(E)
    bound_holds: bool
    k_const: Fraction = Fraction(-1, 2)
    codim: int = 1


def _curve_ring() -> RingSpec:
    return RingSpec.create([("pt", 1)], truncation=1, integrate={"pt": 1})


def hodge_enumeration(g: int, gX: int, c1E, check_bound: bool = True) -> HodgeReport:
    """
    Degeneracy class of the period map of a family of genus-``g`` curves
    over a curve of genus ``gX``, from the closed form
    ``-2 (c1(E) - g (gX - 1))``.
    """
    if g < 1 or gX < 0:
        raise ValueError("need g >= 1 and gX >= 0")
    c1E = Fraction(c1E)
    bound = Fraction(g * (gX - 1))
    holds = bound >= c1E
    if check_bound and not holds:
        raise BoundViolated(f"g(gX-1) = {bound} < c1(E) = {c1E}")
    value = -2 * (c1E - bound)
    ring = _curve_ring()
    return HodgeReport(g, gX, c1E, value, ring.gen("pt") * value, bound, holds)


def _hodge_symbols(g: int):
    E = Abstract("E", g, gens=tuple(f"e{i}" for i in range(1, g + 1)))
    # twisting line of the symmetric map E -> E* ⊗ L; on the base curve L = K_X
    L = Line("L", gen="l")
    ring = RingSpec.create([(f"e{i}", i) for i in range(1, g + 1)] + [("l", 1)], truncation=1)
    return E, L, ring


def _to_curve(cls: GradedClass, g: int, gX: int, c1E: Fraction) -> Fraction:
    curve = _curve_ring()
    pt = curve.gen("pt")
    values = {f"e{i}": curve.zero() for i in range(2, g + 1)}
    values["e1"] = pt * c1E
    values["l"] = pt * (2 * gX - 2)
    return substitute(cls, values, curve).pair()


def hodge_pipeline_value(g: int, gX: int, c1E) -> Fraction:
    """The same number through the determinant with a half-twisted source."""
    E, L, ring = _hodge_symbols(g)
    source = total_chern(HalfTwist(Dual(E), L), ring)
    cls = harris_tu_class(SymmetricMapSpec(g, g - 1, source))
    return _to_curve(cls, g, gX, Fraction(c1E))


def hodge_bound_pipeline(g: int, gX: int, c1E) -> Fraction:
    """``c1(det(Sym^2 E* ⊗ L))`` on the base curve; nonnegative iff the bound holds."""
    E, L, ring = _hodge_symbols(g)
    c = total_chern(TensorLine(Sym(2, Dual(E)), L), ring)
    return _to_curve(c.component(1), g, gX, Fraction(c1E))
