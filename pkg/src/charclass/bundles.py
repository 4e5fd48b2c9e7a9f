"""
Total Chern classes of bundle expressions.

Expressions are trees of frozen dataclasses.  :func:`total_chern` evaluates
them with the closed formulas (Whitney product, sign flip under duals, the
line-twist formula) and falls back on formal Chern roots for symmetric powers
and tensor products of two higher-rank bundles.  :func:`splitting_oracle`
never uses a closed formula: every leaf is split into roots up front, which
makes it an independent check of :func:`total_chern`.

>>> from charclass.graded_ring import RingSpec
>>> E = Abstract("E", 2, gens=("a1", "a2"))
>>> R = RingSpec.create([("a1", 1), ("a2", 2)], truncation=2)
>>> print(total_chern(Sym(2, Dual(E)), R))
1 - 3*a1 + 2*a1^2 + 4*a2
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterator

from . import _roots
from .errors import (
    BundleError,
    DegreeMismatch,
    RankViolation,
    RingMismatch,
    SymRankTooLarge,
    UnknownGenerator,
)
from .graded_ring import GradedClass, RingSpec

__all__ = [
    "BundleExpr", "Abstract", "Line", "Trivial", "Dual", "Sum", "TensorLine",
    "HalfTwist", "Sym", "Tensor", "line_power", "free_ring", "leaves",
    "total_chern", "splitting_oracle", "clutched_sum_class",
    "default_rank_bound", "DEFAULT_RANK_BOUND",
]

DEFAULT_RANK_BOUND = 6


def default_rank_bound() -> int:
    """Root-expansion bound; ``CHARCLASS_RANK_BOUND`` overrides the default."""
    raw = os.environ.get("CHARCLASS_RANK_BOUND")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise BundleError(f"CHARCLASS_RANK_BOUND={raw!r} is not an integer") from None
    return DEFAULT_RANK_BOUND


class BundleExpr:
    """Common base of the expression node types."""

    @property
    def rank(self) -> int:
        raise NotImplementedError

    def children(self) -> tuple[BundleExpr, ...]:
        return ()


@dataclass(frozen=True)
class Abstract(BundleExpr):
    """A bundle with free Chern classes ``gens[i-1] = c_i`` (degree i)."""

    label: str
    rank_: int
    gens: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.rank_ < 1:
            raise BundleError(f"bundle {self.label} must have rank >= 1")
        if not self.gens:
            object.__setattr__(self, "gens", tuple(f"c{i}_{self.label}" for i in range(1, self.rank_ + 1)))
        elif len(self.gens) != self.rank_:
            raise BundleError(f"bundle {self.label} of rank {self.rank_} needs {self.rank_} generators")
        object.__setattr__(self, "gens", tuple(self.gens))

    @property
    def rank(self) -> int:
        return self.rank_


@dataclass(frozen=True)
class Line(BundleExpr):
    label: str
    gen: str = ""

    def __post_init__(self):
        if not self.gen:
            object.__setattr__(self, "gen", f"c1_{self.label}")

    @property
    def rank(self) -> int:
        return 1


@dataclass(frozen=True)
class Trivial(BundleExpr):
    rank_: int = 1

    @property
    def rank(self) -> int:
        return self.rank_


@dataclass(frozen=True)
class Dual(BundleExpr):
    child: BundleExpr

    @property
    def rank(self) -> int:
        return self.child.rank

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Sum(BundleExpr):
    parts: tuple[BundleExpr, ...]

    def __init__(self, *parts: BundleExpr):
        if len(parts) == 1 and isinstance(parts[0], tuple):
            parts = parts[0]
        object.__setattr__(self, "parts", tuple(parts))

    @property
    def rank(self) -> int:
        return sum(p.rank for p in self.parts)

    def children(self):
        return self.parts


@dataclass(frozen=True)
class TensorLine(BundleExpr):
    """``child ⊗ line`` with ``line`` any rank-one expression."""

    child: BundleExpr
    line: BundleExpr

    def __post_init__(self):
        if self.line.rank != 1:
            raise BundleError(f"twist needs a rank-1 line, got rank {self.line.rank}")

    @property
    def rank(self) -> int:
        return self.child.rank

    def children(self):
        return (self.child, self.line)


@dataclass(frozen=True)
class HalfTwist(BundleExpr):
    """``child ⊗ sqrt(line)``, i.e. a twist by a line with ``c1 = c1(line)/2``."""

    child: BundleExpr
    line: BundleExpr

    def __post_init__(self):
        if self.line.rank != 1:
            raise BundleError(f"half twist needs a rank-1 line, got rank {self.line.rank}")

    @property
    def rank(self) -> int:
        return self.child.rank

    def children(self):
        return (self.child, self.line)


@dataclass(frozen=True)
class Sym(BundleExpr):
    k: int
    child: BundleExpr

    def __post_init__(self):
        if self.k < 0:
            raise BundleError("symmetric power must be >= 0")

    @property
    def rank(self) -> int:
        return comb(self.child.rank + self.k - 1, self.k)

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Tensor(BundleExpr):
    left: BundleExpr
    right: BundleExpr

    @property
    def rank(self) -> int:
        return self.left.rank * self.right.rank

    def children(self):
        return (self.left, self.right)


def line_power(line: BundleExpr, nu: int) -> BundleExpr:
    """``line^{⊗nu}`` as twists of a trivial line; ``c1 = nu * c1(line)``."""
    if nu < 0:
        raise BundleError("tensor power must be >= 0")
    out: BundleExpr = Trivial(1)
    for _ in range(nu):
        out = TensorLine(out, line)
    return out


def leaves(e: BundleExpr) -> Iterator[Abstract | Line]:
    """Abstract and line leaves in first-appearance order, without repeats."""
    seen = set()
    stack = [e]
    order = []
    while stack:
        node = stack.pop()
        if isinstance(node, (Abstract, Line)):
            if node not in seen:
                seen.add(node)
                order.append(node)
        stack.extend(reversed(node.children()))
    return iter(order)


def _leaf_gens(leaf: Abstract | Line) -> tuple[str, ...]:
    return leaf.gens if isinstance(leaf, Abstract) else (leaf.gen,)


def _check_leaves(e: BundleExpr) -> list[Abstract | Line]:
    by_label: dict[str, Abstract | Line] = {}
    owner: dict[str, str] = {}
    out = list(leaves(e))
    for leaf in out:
        if leaf.label in by_label and by_label[leaf.label] != leaf:
            raise BundleError(f"label {leaf.label!r} used for two different bundles")
        by_label[leaf.label] = leaf
        for g in _leaf_gens(leaf):
            if owner.setdefault(g, leaf.label) != leaf.label:
                raise BundleError(f"generator {g!r} shared by {owner[g]!r} and {leaf.label!r}")
    return out


def free_ring(*exprs: BundleExpr, truncation: int, extra=()) -> RingSpec:
    """A relation-free ring holding the generators of every leaf."""
    gens: list[tuple[str, int]] = []
    seen = set()
    for e in exprs:
        for leaf in _check_leaves(e):
            for i, g in enumerate(_leaf_gens(leaf), start=1):
                if g not in seen:
                    seen.add(g)
                    gens.append((g, i))
    for g, d in extra:
        if g not in seen:
            seen.add(g)
            gens.append((g, d))
    return RingSpec.create(gens, truncation=truncation)


def _leaf_chern(leaf: Abstract | Line, ring: RingSpec) -> list[GradedClass]:
    """[c_1, ..., c_rank] of a leaf as ring generators."""
    out = []
    for i, name in enumerate(_leaf_gens(leaf), start=1):
        try:
            idx = ring.index(name)
        except UnknownGenerator:
            raise UnknownGenerator(
                f"bundle {leaf.label!r} needs generator {name!r}, absent from the ring") from None
        if ring.generators[idx].degree != i:
            raise DegreeMismatch(
                f"generator {name!r} stands for c_{i}({leaf.label}) but has degree "
                f"{ring.generators[idx].degree}")
        out.append(ring.gen(name))
    return out


def _twist_formula(c: GradedClass, rank: int, m: GradedClass) -> GradedClass:
    """c_k(E ⊗ L) = sum_i binom(rank - i, k - i) c_i(E) m^(k - i)."""
    ring = c.ring
    parts = [c.component(i) for i in range(rank + 1)]
    mpow = [ring.one()]
    for _ in range(rank):
        mpow.append(mpow[-1] * m)
    total = ring.zero()
    for k in range(min(rank, ring.truncation) + 1):
        for i in range(k + 1):
            coeff = comb(rank - i, k - i)
            if coeff and not parts[i].is_zero():
                total = total + parts[i] * mpow[k - i] * coeff
    return total


def _roots_of_class(c: GradedClass, rank: int, k: int | None, other=None) -> GradedClass:
    """
    Chern class of Sym^k (or, with ``other=(c', rank')``, of a tensor product)
    by expanding over formal roots of the given total classes.
    """
    ring = c.ring
    trunc = ring.truncation
    if other is None:
        nvars = rank
        forms = [{v: 1} for v in range(rank)]
        product = _roots.sym_power_forms(forms, k)
        blocks = [list(range(rank))]
        values = [[c.component(j) for j in range(1, rank + 1)]]
    else:
        c2, rank2 = other
        nvars = rank + rank2
        product = [{i: 1, rank + j: 1} for i in range(rank) for j in range(rank2)]
        blocks = [list(range(rank)), list(range(rank, rank + rank2))]
        values = [[c.component(j) for j in range(1, rank + 1)],
                  [c2.component(j) for j in range(1, rank2 + 1)]]
    poly = _roots.chern_product(product, nvars, trunc)
    reduced = _roots.multisymmetric_reduce(poly, blocks, nvars)
    return _roots.reduced_to_class(reduced, values, ring)


def total_chern(e: BundleExpr, ring: RingSpec, rank_bound: int | None = None) -> GradedClass:
    """Total Chern class ``1 + c_1(e) + c_2(e) + ...`` truncated by ``ring``."""
    bound = default_rank_bound() if rank_bound is None else rank_bound
    _check_leaves(e)
    memo: dict[BundleExpr, GradedClass] = {}

    def ev(node: BundleExpr) -> GradedClass:
        if node in memo:
            return memo[node]
        if isinstance(node, (Abstract, Line)):
            out = ring.one()
            for ci in _leaf_chern(node, ring):
                out = out + ci
        elif isinstance(node, Trivial):
            out = ring.one()
        elif isinstance(node, Dual):
            c = ev(node.child)
            out = ring.zero()
            for d in range(ring.truncation + 1):
                part = c.component(d)
                out = out + (-part if d % 2 else part)
        elif isinstance(node, Sum):
            out = ring.one()
            for p in node.parts:
                out = out * ev(p)
        elif isinstance(node, (TensorLine, HalfTwist)):
            m = ev(node.line).component(1)
            if isinstance(node, HalfTwist):
                m = m / 2
            out = _twist_formula(ev(node.child), node.child.rank, m)
        elif isinstance(node, Sym):
            r = node.child.rank
            if r > bound:
                raise SymRankTooLarge(f"Sym of a rank-{r} bundle exceeds the root bound {bound}")
            if node.k == 0:
                out = ring.one()
            elif r == 1:
                # the single root of Sym^k(L) is k*c1(L)
                out = ring.one() + ev(node.child).component(1) * node.k
            else:
                out = _roots_of_class(ev(node.child), r, node.k)
        elif isinstance(node, Tensor):
            a, b = node.left, node.right
            if b.rank == 1:
                out = _twist_formula(ev(a), a.rank, ev(b).component(1))
            elif a.rank == 1:
                out = _twist_formula(ev(b), b.rank, ev(a).component(1))
            else:
                if max(a.rank, b.rank) > bound:
                    raise SymRankTooLarge(
                        f"tensor of ranks {a.rank} and {b.rank} exceeds the root bound {bound}")
                out = _roots_of_class(ev(a), a.rank, None, other=(ev(b), b.rank))
        else:
            raise BundleError(f"unknown expression node {node!r}")
        memo[node] = out
        return out

    return ev(e)


def splitting_oracle(e: BundleExpr, ring: RingSpec, rank_bound: int | None = None) -> GradedClass:
    """Total Chern class computed purely from formal roots of the leaves."""
    bound = default_rank_bound() if rank_bound is None else rank_bound
    leaf_list = _check_leaves(e)
    blocks: list[list[int]] = []
    start = {}
    nvars = 0
    for leaf in leaf_list:
        r = leaf.rank
        if r > bound:
            raise SymRankTooLarge(f"leaf {leaf.label!r} of rank {r} exceeds the root bound {bound}")
        start[leaf] = nvars
        blocks.append(list(range(nvars, nvars + r)))
        nvars += r

    def roots(node: BundleExpr) -> list[_roots.LinearForm]:
        if isinstance(node, (Abstract, Line)):
            return [{start[node] + i: 1} for i in range(node.rank)]
        if isinstance(node, Trivial):
            return [{} for _ in range(node.rank)]
        if isinstance(node, Dual):
            return [_roots.scale_form(f, -1) for f in roots(node.child)]
        if isinstance(node, Sum):
            return [f for p in node.parts for f in roots(p)]
        if isinstance(node, (TensorLine, HalfTwist)):
            (m,) = roots(node.line)
            if isinstance(node, HalfTwist):
                m = _roots.scale_form(m, Fraction(1, 2))
            return [_roots.add_forms(f, m) for f in roots(node.child)]
        if isinstance(node, Tensor):
            return [_roots.add_forms(f, g) for f in roots(node.left) for g in roots(node.right)]
        if isinstance(node, Sym):
            if node.child.rank > bound:
                raise SymRankTooLarge(
                    f"Sym of a rank-{node.child.rank} bundle exceeds the root bound {bound}")
            return _roots.sym_power_forms(roots(node.child), node.k)
        raise BundleError(f"unknown expression node {node!r}")

    poly = _roots.chern_product(roots(e), nvars, ring.truncation)
    reduced = _roots.multisymmetric_reduce(poly, blocks, nvars)
    values = [_leaf_chern(leaf, ring) for leaf in leaf_list]
    return _roots.reduced_to_class(reduced, values, ring)



def clutched_sum_class(
    K_class: GradedClass, L_class: GradedClass, r: int, n: int
) -> list[GradedClass]:
    """
    ``[c_1, ..., c_n]`` of ``K ⊕ q*L`` for a rank-``r`` clutched bundle ``K``.

    Entry ``k`` is ``sum_{v=1..r} c_v(K) c_{k-v}(L)`` plus ``c_k(L)`` when
    ``k <= n - 1``; at ``k = n`` the lone ``c_n(L)`` term is absent.
    """
    if K_class.ring != L_class.ring:
        raise RingMismatch("K and L classes live in different rings")
    for d in K_class.degrees():
        if d > r and not K_class.component(d).is_zero():
            raise RankViolation(f"K has a nonzero degree-{d} part but rank {r}")
    ring = K_class.ring
    L = [L_class.component(j) for j in range(n + 1)]
    out = []
    for k in range(1, n + 1):
        total = ring.zero()
        for nu in range(1, r + 1):
            if k - nu >= 0:
                total = total + K_class.component(nu) * L[k - nu]
        if k <= n - 1:
            total = total + L[k]
        out.append(total)
    return out
