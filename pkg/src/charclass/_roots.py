"""
Formal Chern-root algebra.

Polynomials here live in ``Q[r_0..r_{N-1}]`` with every root of degree 1,
truncated in total degree.  The variables are partitioned into blocks (one
block per bundle whose roots are formal) and :func:`multisymmetric_reduce`
rewrites a polynomial that is symmetric within each block as a polynomial in
the blockwise elementary symmetric functions.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Sequence

from .graded_ring import GradedClass, RingSpec

Poly = dict[tuple[int, ...], Fraction]
LinearForm = dict[int, Fraction]


def add_forms(*forms: LinearForm) -> LinearForm:
    out: LinearForm = {}
    for f in forms:
        for v, c in f.items():
            out[v] = out.get(v, 0) + c
    return {v: c for v, c in out.items() if c}


def scale_form(f: LinearForm, q) -> LinearForm:
    q = Fraction(q)
    return {v: c * q for v, c in f.items() if c * q}


def sym_power_forms(forms: Sequence[LinearForm], k: int) -> list[LinearForm]:
    """Roots of ``Sym^k`` given the roots of the bundle."""
    return [add_forms(*choice) for choice in combinations_with_replacement(forms, k)]


def chern_product(forms: Sequence[LinearForm], nvars: int, trunc: int) -> Poly:
    """Expand ``prod(1 + f)`` over ``forms``, dropping total degree > trunc."""
    poly: Poly = {(0,) * nvars: Fraction(1)}
    for f in forms:
        if not f:
            continue
        new = dict(poly)
        for exps, c in poly.items():
            if sum(exps) >= trunc:
                continue
            for v, a in f.items():
                e = list(exps)
                e[v] += 1
                e = tuple(e)
                s = new.get(e, 0) + c * a
                if s:
                    new[e] = s
                else:
                    new.pop(e, None)
        poly = new
    return poly


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            s = out.get(e, 0) + ca * cb
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def _elementary(block: Sequence[int], j: int, nvars: int) -> Poly:
    out: Poly = {}
    for subset in combinations(block, j):
        e = [0] * nvars
        for v in subset:
            e[v] = 1
        out[tuple(e)] = Fraction(1)
    return out


def multisymmetric_reduce(
    poly: Poly, blocks: Sequence[Sequence[int]], nvars: int
) -> dict[tuple[tuple[int, ...], ...], Fraction]:
    """
    Express ``poly`` through elementary symmetric functions of each block.

    Returns ``{(b_0, b_1, ...): coeff}`` where ``b_i[j-1]`` is the exponent
    of ``e_j`` of block ``i``.  Blocks must list contiguous variable indices in
    increasing order so that the lex-leading monomial is partition shaped.
    """
    elem = {}
    cache: dict[tuple, Poly] = {}

    def expansion(key) -> Poly:
        if key not in cache:
            prod: Poly = {(0,) * nvars: Fraction(1)}
            for bi, bexp in enumerate(key):
                for j, m in enumerate(bexp, start=1):
                    if m and (bi, j) not in elem:
                        elem[(bi, j)] = _elementary(blocks[bi], j, nvars)
                    for _ in range(m):
                        prod = _poly_mul(prod, elem[(bi, j)])
            cache[key] = prod
        return cache[key]

    work = dict(poly)
    result: dict[tuple, Fraction] = {}
    while work:
        lead = max(work)
        coeff = work[lead]
        key = []
        for block in blocks:
            a = [lead[v] for v in block]
            if any(x < y for x, y in zip(a, a[1:])):
                raise ValueError("polynomial is not symmetric within a root block")
            a.append(0)
            key.append(tuple(a[j] - a[j + 1] for j in range(len(block))))
        key = tuple(key)
        result[key] = result.get(key, 0) + coeff
        for e, c in expansion(key).items():
            s = work.get(e, 0) - coeff * c
            if s:
                work[e] = s
            else:
                work.pop(e, None)
    return {k: c for k, c in result.items() if c}


def reduced_to_class(
    reduced: dict[tuple[tuple[int, ...], ...], Fraction],
    block_values: Sequence[Sequence[GradedClass]],
    ring: RingSpec,
) -> GradedClass:
    """Substitute ``e_j`` of block ``i`` by ``block_values[i][j-1]``."""
    powers: dict[tuple[int, int, int], GradedClass] = {}

    def power(i, j, m):
        if (i, j, m) not in powers:
            base = block_values[i][j - 1]
            powers[(i, j, m)] = base if m == 1 else power(i, j, m - 1) * base
        return powers[(i, j, m)]

    total = ring.zero()
    for key, coeff in reduced.items():
        term = ring.constant(coeff)
        for i, bexp in enumerate(key):
            for j, m in enumerate(bexp, start=1):
                if m:
                    term = term * power(i, j, m)
        total = total + term
    return total
