"""
Acceptance suite.  Every test prints one ``[ACCEPTANCE] criterion N`` line
with PASS or FAIL before asserting.  All comparisons are exact (Fraction
arithmetic, tolerance 0); the wall-clock limits are part of the criteria.
"""

import random
import subprocess
import sys
import time
from fractions import Fraction
from itertools import islice
from pathlib import Path

import pytest

from charclass.bundles import Abstract, Dual, HalfTwist, Line, Sum, Sym, TensorLine, free_ring
from charclass.bundles import splitting_oracle, total_chern
from charclass.catalog import golden_scenarios
from charclass.degeneracy import (
    SymmetricMapSpec, degeneracy_codim, harris_tu_class, hodge_bound_pipeline, hodge_enumeration,
    hodge_pipeline_value, parity_constraint,
)
from charclass.errors import BoundViolated
from charclass.graded_ring import GradedClass, RingSpec
from charclass.parser import parse_class
from charclass.rh_check import RHScenario, Variant, check
from charclass.schubert import (
    Permutation, all_permutations, divided_difference, schubert_poly, schubert_poly_along,
    schubert_ring,
)

from bundle_helpers import numeric_check
from conftest import ABC, CP3, random_class

TOLERANCE = Fraction(0)     # exact equality everywhere
LIMIT_1 = 1.0               # seconds
LIMIT_2 = 1.0
LIMIT_5 = 10.0
FIXTURE = Path(__file__).parent / "fixtures" / "harris_tu_hand.txt"


@pytest.fixture
def report(capsys):
    def emit(n, title, ok, detail):
        with capsys.disabled():
            print(f"\n[ACCEPTANCE] criterion {n} {title}: {'PASS' if ok else 'FAIL'} ({detail})")
    return emit


def _values(verdict):
    out = dict(verdict.derived)
    if verdict.slot:
        out[verdict.slot] = verdict.value
    return out


def test_criterion_1_k3_golden(report):
    t0 = time.perf_counter()
    solved = check(golden_scenarios()["k3_cover"])
    # the same cover typed in directly, solved for the genus instead
    direct = check(RHScenario(Variant.BRANCHED_COVER, n=2, p=2, c_x=24, c_y=3, delta=4, mu=4,
                              unknown="genus"))
    elapsed = time.perf_counter() - t0
    c_l, genus = _values(solved).get("c_l"), _values(solved).get("genus")
    ok = (solved.status == "SOLVED" and c_l == -4 and genus == 3
          and _values(direct).get("genus") == 3 and elapsed < LIMIT_1)
    report(1, "K3 golden", ok, f"c_l={c_l} genus={genus}, {elapsed:.3f}s < {LIMIT_1}s")
    assert ok


def test_criterion_2_iterated_infeasible(report):
    t0 = time.perf_counter()
    bad = []
    for d in range(2, 51):
        sc = RHScenario(Variant.ITERATED, cpn=True, n=2, delta_k=d, mu=d, genus=0)
        if check(sc).status != "INFEASIBLE":
            bad.append(("verdict", d))
        # exhaustive search: no genus in [0, 100] balances the equation,
        # once as plain arithmetic and once through the generic checker
        for g in range(0, 101):
            c_x, c_fy, c_l = 3, 3 * d, 2 - 2 * g
            if c_fy - c_x == (d - 1) * c_l:
                bad.append(("arith", d, g))
            gen = RHScenario(Variant.GENERIC, c_x=c_x, c_fy=c_fy, c_l=c_l, k_const=d - 1,
                             orientation="fy_minus_x")
            if check(gen).status == "HOLDS":
                bad.append(("generic", d, g))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < LIMIT_2
    report(2, "iterated-map infeasibility", ok,
           f"d=2..50, g=0..100, {len(bad)} counterexamples, {elapsed:.3f}s < {LIMIT_2}s")
    assert ok, bad[:5]


def _chern_source(ell, trunc):
    R = RingSpec.create([(f"c{i}", i) for i in range(1, ell + 1)], truncation=max(trunc, 1))
    src = R.one()
    for i in range(1, ell + 1):
        src = src + R.gen(f"c{i}")
    return R, src


def test_criterion_3_harris_tu(report):
    problems = []
    for ell, s, want in (l.split(maxsplit=2) for l in FIXTURE.read_text().splitlines()
                         if l.strip() and not l.startswith("#")):
        ell, s = int(ell), int(s)
        R, src = _chern_source(ell, degeneracy_codim(ell, s))
        if harris_tu_class(SymmetricMapSpec(ell, s, src)) != parse_class(want, R):
            problems.append((ell, s))
    R2, src2 = _chern_source(2, 1)
    R3, src3 = _chern_source(3, 3)
    small = (str(harris_tu_class(SymmetricMapSpec(2, 1, src2))),
             str(harris_tu_class(SymmetricMapSpec(3, 1, src3))))
    if small != ("2*c1", "4*c1*c2 - 4*c3"):
        problems.append(small)
    checked = 0
    for ell in range(1, 9):
        for s in range(ell):
            codim = degeneracy_codim(ell, s)
            assert codim == (ell - s + 1) * (ell - s) // 2
            R, src = _chern_source(ell, codim)
            cls = harris_tu_class(SymmetricMapSpec(ell, s, src))
            if cls.is_zero() or cls.degrees() != {codim}:
                problems.append(("degree", ell, s, cls.degrees()))
            checked += 1
    ok = not problems
    report(3, "Harris-Tu smalls", ok, f"{small[0]}, {small[1]}; {checked} (l,s) degree checks")
    assert ok, problems


def test_criterion_4_hodge(report):
    problems, enforced = [], 0
    for g in range(1, 6):
        for gx in range(0, 5):
            for c1 in range(-2, 3):
                closed = -2 * (Fraction(c1) - g * (gx - 1))
                report_ = hodge_enumeration(g, gx, c1, check_bound=False)
                if report_.value != closed or hodge_pipeline_value(g, gx, c1) != closed:
                    problems.append(("value", g, gx, c1))
                holds = g * (gx - 1) >= c1
                if (hodge_bound_pipeline(g, gx, c1) >= 0) != holds:
                    problems.append(("bound route", g, gx, c1))
                try:
                    hodge_enumeration(g, gx, c1)
                    raised = False
                except BoundViolated:
                    raised = True
                    enforced += 1
                if raised == holds:
                    problems.append(("enforcement", g, gx, c1))
    ok = not problems
    report(4, "Hodge enumeration", ok, f"125 grid points, bound enforced at {enforced}")
    assert ok, problems[:5]


def _random_poly(rnd, ring, m, terms=5, max_deg=5):
    out = {}
    n = len(ring.generators)
    for _ in range(rnd.randint(1, terms)):
        e = [0] * n
        for _ in range(rnd.randint(0, max_deg)):
            e[rnd.randrange(m)] += 1        # mostly x variables
        if rnd.random() < 0.5:
            e[m + rnd.randrange(m)] += 1
        if sum(e) <= ring.truncation:
            out[tuple(e)] = out.get(tuple(e), 0) + Fraction(rnd.randint(-6, 6), rnd.randint(1, 3))
    return GradedClass(ring, out)


def _closed_top(m):
    ring = schubert_ring(m)
    out = ring.one()
    for i in range(1, m):
        for j in range(1, m + 1 - i):
            out = out * (ring.gen(f"x{i}") - ring.gen(f"y{j}"))
    return out


def test_criterion_5_schubert(report):
    t0 = time.perf_counter()
    problems, words_checked = [], 0
    perms = all_permutations(4)
    assert len(perms) == 24
    w0 = Permutation.longest(4)
    for w in perms:
        f = schubert_poly(w)
        if f.is_zero() or f.degrees() != {w.length()}:
            problems.append(("degree", str(w)))
        target = w.inverse() * w0
        words = list(islice(target.reduced_words(), 6))
        if len(words) < min(3, len(list(target.reduced_words()))):
            problems.append(("words", str(w)))
        for word in words:
            words_checked += 1
            if schubert_poly_along(w, word) != f:
                problems.append(("word", str(w), word))
    rnd = random.Random(5)
    R = schubert_ring(4)
    d = divided_difference
    for _ in range(100):
        f = _random_poly(rnd, R, 4)
        for i in (1, 2, 3):
            if not d(i, d(i, f)).is_zero():
                problems.append(("square", i))
        if d(1, d(3, f)) != d(3, d(1, f)):
            problems.append(("commute",))
        for i in (1, 2):
            if d(i, d(i + 1, d(i, f))) != d(i + 1, d(i, d(i + 1, f))):
                problems.append(("braid", i))
    for m in (2, 3):
        if schubert_poly(Permutation.longest(m)) != _closed_top(m):
            problems.append(("w0", m))
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed < LIMIT_5
    report(5, "Schubert property suite", ok,
           f"24 permutations, {words_checked} reduced words, 100 random polynomials, "
           f"{elapsed:.3f}s < {LIMIT_5}s")
    assert ok, problems[:5]


SHAPES = ("dual", "sum", "tensorline", "halftwist2", "sym2")


def _shape(kind, rnd, case):
    r = rnd.randint(1, 4)
    E = Abstract(f"E{case}", r, gens=tuple(f"e{case}_{i}" for i in range(1, r + 1)))
    L = Line(f"L{case}", gen=f"l{case}")
    if kind == "dual":
        return Dual(E)
    if kind == "sum":
        s = rnd.randint(1, 4 - r) if r < 4 else 0
        if not s:
            return Sum(E, Dual(E))
        F = Abstract(f"F{case}", s, gens=tuple(f"f{case}_{i}" for i in range(1, s + 1)))
        return Sum(E, F)
    if kind == "tensorline":
        return TensorLine(E, L)
    if kind == "halftwist2":
        return HalfTwist(HalfTwist(E, L), L)
    return Sym(2, E if r <= 3 else Abstract(f"E{case}", 3, gens=E.gens[:3]))


def test_criterion_6_oracle_and_parity(report):
    rnd = random.Random(6)
    problems = []
    for case in range(200):
        kind = SHAPES[case % len(SHAPES)]
        e = _shape(kind, rnd, case)
        ring = free_ring(e, truncation=min(e.rank, 6))
        closed = total_chern(e, ring)
        if closed != splitting_oracle(e, ring) or not numeric_check(e, ring, closed, rnd):
            problems.append((kind, case))
        if kind == "halftwist2":
            if closed != total_chern(TensorLine(e.child.child, e.line), ring):
                problems.append(("halftwist twice", case))
    parity_bad = 0
    for case in range(50):
        p = rnd.choice((2, 4, 6))
        lhs = Fraction(rnd.randint(-50, 50), rnd.randint(1, 7))
        res = parity_constraint(p, lhs)
        # the other route: c_p(E) - c_p(E*) vanishes identically for even p
        E = Abstract("E", rnd.randint(p, 6))
        ring = free_ring(E, truncation=p)
        diff = total_chern(E, ring).component(p) - total_chern(Dual(E), ring).component(p)
        if res.required_rhs != 0 or not res.trivial or not diff.is_zero():
            parity_bad += 1
    ok = not problems and parity_bad == 0
    report(6, "bundle oracle equivalence", ok,
           f"200 cases over {len(SHAPES)} shapes, {len(problems)} mismatches; "
           f"parity 50 cases, {parity_bad} nonzero")
    assert ok, problems[:5]


def test_criterion_7_ring_and_cli(report):
    rnd = random.Random(7)
    problems = []
    for i in range(1000):
        R = (CP3, ABC)[i % 2]
        a, b, c = (random_class(rnd, R) for _ in range(3))
        if not (a * b == b * a and (a * b) * c == a * (b * c) and a * (b + c) == a * b + a * c
                and (a + b) + c == a + (b + c) and a - a == R.zero() and a * R.one() == a):
            problems.append(("axioms", i))
    for i in range(500):
        R = (CP3, ABC)[i % 2]
        a = random_class(rnd, R)
        if parse_class(str(a), R) != a or str(parse_class(str(a), R)) != str(a):
            problems.append(("round trip", str(a)))
    runs = [subprocess.run([sys.executable, "-m", "charclass", "examples", "--run", "all"],
                           capture_output=True) for _ in range(2)]
    codes = [r.returncode for r in runs]
    identical = runs[0].stdout == runs[1].stdout
    lines = runs[0].stdout.decode().splitlines()
    all_pass = bool(lines) and all(": PASS (" in l for l in lines[:-1])
    ok = not problems and codes == [0, 0] and identical and all_pass
    report(7, "ring and CLI contracts", ok,
           f"1000 triples, 500 round trips, examples exit {codes}, {lines[-1] if lines else '-'}, "
           f"byte-identical={identical}")
    assert ok, problems[:5]
