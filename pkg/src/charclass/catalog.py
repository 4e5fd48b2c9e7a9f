"""
Built-in spaces and the worked-example suite.

Presets are declarations in ``data/presets.ccl`` written in the charclass
language; :func:`preset` instantiates one.  The example suite re-derives the
classical numbers (Euler characteristics, the K3 branch curve, Harris-Tu
classes, ...) and reports PASS or FAIL for each.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Callable

from .bundles import Abstract, Dual, HalfTwist, Line, Sum, Sym, free_ring, splitting_oracle, total_chern
from .degeneracy import SymmetricMapSpec, harris_tu_class, hodge_enumeration, hodge_pipeline_value
from .errors import CharclassError, UnknownPreset
from .graded_ring import RingSpec, format_rational
from .parser import PresetDef, Session, SpacePreset, instantiate_preset, parse_program
from .rh_check import RHScenario, check_many, plane_curve_genus
from .schubert import Permutation, schubert_poly, schubert_ring

__all__ = [
    "preset", "preset_names", "builtin_preset_defs", "golden_scenarios", "Example",
    "EXAMPLES", "example_names", "run_example", "run_examples",
]


def _read(name: str) -> str:
    return resources.files("charclass").joinpath("data", name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def _preset_session() -> Session:
    return parse_program(_read("presets.ccl"), with_presets=False)


def builtin_preset_defs() -> dict[str, PresetDef]:
    return dict(_preset_session().presets)


def preset_names() -> list[str]:
    return list(_preset_session().presets)


_CALL_RE = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*$")

_PARAM_CHECKS: dict[str, Callable[[list[int]], str | None]] = {
    "CPn": lambda a: None if a[0] >= 1 else "CPn needs n >= 1",
    "Curve": lambda a: None if a[0] >= 0 else "Curve needs g >= 0",
    "PlaneCurve": lambda a: None if a[0] >= 1 else "PlaneCurve needs d >= 1",
}


def check_preset_params(name: str, params) -> None:
    """Range checks for the built-in presets; user presets are taken as written."""
    if name not in _PARAM_CHECKS:
        return
    if any(Fraction(p).denominator != 1 for p in params):
        raise UnknownPreset(f"preset {name} takes integer parameters")
    problem = _PARAM_CHECKS[name]([int(p) for p in params]) if params else None
    if problem:
        raise UnknownPreset(problem)


@lru_cache(maxsize=None)
def _preset_cached(name: str, params: tuple[int, ...]) -> SpacePreset:
    defs = _preset_session().presets
    if name not in defs:
        raise UnknownPreset(f"unknown preset {name!r}; known: {', '.join(defs)}")
    if len(params) != len(defs[name].params):
        raise UnknownPreset(f"preset {name} takes {len(defs[name].params)} parameter(s)")
    check_preset_params(name, params)
    return instantiate_preset(defs[name], [Fraction(p) for p in params], _preset_session())


def preset(name: str, *params: int) -> SpacePreset:
    """``preset("CPn", 2)`` or ``preset("CPn(2)")``."""
    m = _CALL_RE.match(name)
    if m and m.group(2) is not None and not params:
        name = m.group(1)
        try:
            params = tuple(int(t) for t in m.group(2).split(",") if t.strip())
        except ValueError:
            raise UnknownPreset(f"cannot read preset parameters from {m.group(0)!r}") from None
    return _preset_cached(name.strip(), tuple(int(p) for p in params))


@lru_cache(maxsize=None)
def _scenario_session() -> Session:
    return parse_program(_read("scenarios.ccl"))


def golden_scenarios() -> dict[str, RHScenario]:
    return dict(_scenario_session().scenarios)


def golden_scenario_source() -> str:
    return _read("scenarios.ccl")


# -- example suite -------------------------------------------------------------

@dataclass(frozen=True)
class Example:
    name: str
    description: str
    run: Callable[[], tuple[bool, str]]


def _show(x) -> str:
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_show(v) for v in x) + "]"
    if isinstance(x, Fraction):
        return format_rational(x)
    return str(x)


def _expect(got, want) -> tuple[bool, str]:
    if got == want:
        return True, _show(got)
    return False, f"got {_show(got)}, expected {_show(want)}"


def _scenario_line(name: str) -> str:
    [(_, line, _)] = check_many([golden_scenarios()[name]])
    return line


def _ex_cpn_euler():
    got = [preset("CPn", n).euler for n in range(1, 7)]
    return _expect(got, [n + 1 for n in range(1, 7)])


def _ex_k3():
    k3 = preset("K3")
    return _expect((k3.euler, str(k3.tangent.component(1))), (24, "0"))


def _ex_plane_quartic():
    c = preset("PlaneCurve", 4)
    return _expect((c.value("genus"), c.euler), (3, -4))


def _ex_line(name: str, want_prefix: str):
    def run():
        line = _scenario_line(name)
        return line.startswith(want_prefix), line
    return run


def _ex_iterated_family():
    lines = []
    for d in range(2, 7):
        src = (f"scenario s {{ variant = iterated; cpn = true; n = 2; "
               f"delta_k = {d}; mu = {d}; genus = 0; }}")
        sc = parse_program(src, with_presets=False).scenarios["s"]
        lines.append(check_many([sc])[0][1])
    ok = all(x.startswith("INFEASIBLE") for x in lines)
    return ok, "d=2..6 all INFEASIBLE" if ok else "; ".join(lines)


def _ex_hodge():
    worst = []
    for g in range(1, 4):
        for gx in range(0, 4):
            for c1 in range(-2, 3):
                closed = hodge_enumeration(g, gx, c1, check_bound=False).value
                if hodge_pipeline_value(g, gx, c1) != closed:
                    worst.append((g, gx, c1))
    value = hodge_enumeration(2, 2, 1).value
    ok = not worst and value == 2
    return ok, "value(g=2, gX=2, c1E=1) = 2" if ok else f"mismatch at {worst[:3]}, value {value}"


def _ex_harris_tu():
    out = []
    for ell, s in ((2, 1), (3, 1)):
        codim = (ell - s + 1) * (ell - s) // 2
        ring = RingSpec.create([(f"c{i}", i) for i in range(1, ell + 1)], truncation=codim)
        src = ring.one()
        for i in range(1, ell + 1):
            src = src + ring.gen(f"c{i}")
        out.append(str(harris_tu_class(SymmetricMapSpec(ell, s, src))))
    return _expect(out, ["2*c1", "4*c1*c2 - 4*c3"])


def _ex_sym2_dual():
    E = Abstract("E", 3)
    L = Line("L")
    exprs = [Sym(2, Dual(E)), HalfTwist(HalfTwist(E, L), L), Sum(E, Dual(E))]
    ring = free_ring(*exprs, truncation=4)
    ok = all(total_chern(e, ring) == splitting_oracle(e, ring) for e in exprs)
    return ok, str(total_chern(Sym(2, Dual(E)), ring).component(1))


def _ex_schubert():
    got = []
    for m in (2, 3):
        ring = schubert_ring(m)
        top = ring.one()
        for i in range(1, m + 1):
            for j in range(1, m + 1 - i):
                top = top * (ring.gen(f"x{i}") - ring.gen(f"y{j}"))
        got.append(schubert_poly(Permutation.longest(m)) == top)
    got.append(str(schubert_poly(Permutation((2, 1)))))
    return _expect(got, [True, True, "x1 - y1"])


def _ex_plane_curve_genus():
    bad = [d for d in range(1, 11)
           if preset("PlaneCurve", d).euler != 2 - 2 * plane_curve_genus(d)]
    return (not bad), "d=1..10 consistent" if not bad else f"mismatch for d in {bad}"


EXAMPLES: tuple[Example, ...] = (
    Example("cpn-euler", "Euler number of CP^n is n+1 for n <= 6", _ex_cpn_euler),
    Example("k3-preset", "K3: Euler number 24 and c1 = 0", _ex_k3),
    Example("plane-quartic", "plane quartic: genus 3, Euler number -4", _ex_plane_quartic),
    Example("plane-curve-genus", "adjunction genus matches the tangent class, d <= 10",
            _ex_plane_curve_genus),
    Example("k3-cover", "branch curve of a K3 over CP2 has Euler number -4, genus 3",
            _ex_line("k3_cover", "SOLVED c_l=-4 genus=3")),
    Example("k3-cover-genus", "same cover solved for the genus",
            _ex_line("k3_cover_genus", "SOLVED genus=3")),
    Example("elliptic-double-cover", "an elliptic double cover of CP1 has 4 branch points",
            _ex_line("elliptic_double_cover", "SOLVED c_l=4")),
    Example("cp2-iterated-infeasible", "equal global and local degree is impossible on CP2",
            _ex_line("cp2_iterated_equal_degrees", "INFEASIBLE")),
    Example("cp2-iterated-family", "the same for d = 2..6", _ex_iterated_family),
    Example("cp2-iterated-nonintegral", "delta=2, k=2 over a rational curve forces mu=11/2",
            _ex_line("cp2_iterated_mu", "NONINTEGRAL mu=11/2")),
    Example("degree-lowering-tight", "delta_k = delta^k violates the strict inequality",
            _ex_line("degree_lowering_tight", "INEQUALITY_VIOLATED")),
    Example("degree-lowering-ok", "delta=3, k=1, delta_k=2 needs pairing term -3",
            _ex_line("degree_lowering_ok", "SOLVED term=-3")),
    Example("hodge-enumeration", "period-map degeneracy: closed form equals the determinant",
            _ex_hodge),
    Example("harris-tu-smalls", "symmetric degeneracy classes for (l,s) = (2,1), (3,1)",
            _ex_harris_tu),
    Example("sym2-dual", "closed formulas agree with the splitting principle", _ex_sym2_dual),
    Example("schubert-w0", "top double Schubert polynomials for S2, S3", _ex_schubert),
)


def example_names() -> list[str]:
    return [e.name for e in EXAMPLES]


def run_example(name: str) -> tuple[bool, str]:
    for e in EXAMPLES:
        if e.name == name:
            try:
                return e.run()
            except CharclassError as exc:
                return False, f"{type(exc).__name__} [{exc.module}]: {exc}"
    raise UnknownPreset(f"unknown example {name!r}; see 'examples --list'")


def run_examples(names: list[str] | None = None) -> list[tuple[str, bool, str]]:
    names = example_names() if names is None else names
    return [(n, *run_example(n)) for n in names]
