"""
Riemann-Hurwitz type pairing identities: verify a scenario or solve for one
unknown slot.

Every variant reduces to ``lhs == rhs`` with both sides affine in any single
numeric slot, so a scenario with one unknown is solved by probing the
residual at three points.

Slots (all rationals, ``None`` when not supplied):

======== ==================================================================
c_x      <c_p(X), [M]>
c_fy     <f* c_p(Y), [M]>  (``(f^k)* c_p(X)`` for iterated maps)
c_y      <c_p(Y), [Y]>; gives ``c_fy = delta * c_y`` when ``c_fy`` is absent
c_l      <c_{p-r}(L), [N]>
genus    genus of N when it is declared a smooth curve; ``c_l = 2 - 2 genus``
delta    global degree of f
delta_k  global degree of the k-th iterate
mu       local degree along the ramification locus (``mu_k`` for iterates)
k_iter   iterate index k
k_const  the constant k of the generic identity
term     ``k_const * c_l`` in the degree-lowering formula
nu       contact order nu_f of a fixed-point set
c_os     <c_1(O_S), [M]>
c_q      <c_p(Q_S^nu), [M]> supplied directly when r > 1
======== ==================================================================
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    InequalityViolated,
    InvalidScenario,
    NonIntegral,
    OutOfRange,
    ScenarioError,
    Unsolvable,
)
from .graded_ring import format_rational

__all__ = [
    "Variant", "RHScenario", "Verdict", "check", "check_branched_cover", "check_iterated",
    "check_degree_lowering", "check_fixed_point", "check_generic", "check_many",
    "plane_curve_genus", "euler_characteristic_of_genus", "NUMERIC_SLOTS",
    "verdict_line", "as_generic", "flip_orientation",
]


class Variant(str, Enum):
    BRANCHED_COVER = "branched_cover"
    ITERATED = "iterated"
    DEGREE_LOWERING = "degree_lowering"
    FIXED_POINT = "fixed_point"
    GENERIC = "generic"


NUMERIC_SLOTS = (
    "n", "p", "r", "c_x", "c_fy", "c_y", "c_l", "genus", "delta", "delta_k", "mu",
    "k_iter", "k_const", "term", "nu", "c_os", "c_q",
)
STRUCTURAL = frozenset({"n", "p", "r"})
INTEGRAL = frozenset({"n", "p", "r", "genus", "delta", "delta_k", "mu", "k_iter", "nu"})
ORIENTATIONS = ("x_minus_fy", "fy_minus_x")


def plane_curve_genus(d: int) -> int:
    """Adjunction: a smooth plane curve of degree d has genus (d-1)(d-2)/2."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    return (d - 1) * (d - 2) // 2


def euler_characteristic_of_genus(g) -> Fraction:
    return 2 - 2 * Fraction(g)


@dataclass(frozen=True)
class RHScenario:
    variant: Variant
    n: Fraction | None = None
    p: Fraction | None = None
    r: Fraction | None = None
    c_x: Fraction | None = None
    c_fy: Fraction | None = None
    c_y: Fraction | None = None
    c_l: Fraction | None = None
    genus: Fraction | None = None
    delta: Fraction | None = None
    delta_k: Fraction | None = None
    mu: Fraction | None = None
    k_iter: Fraction | None = None
    k_const: Fraction | None = None
    term: Fraction | None = None
    nu: Fraction | None = None
    c_os: Fraction | None = None
    c_q: Fraction | None = None
    unknown: str | None = None
    curve: bool = False
    cpn: bool = False
    orientation: str = "x_minus_fy"
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        for slot in NUMERIC_SLOTS:
            v = getattr(self, slot)
            if v is None:
                continue
            v = Fraction(v)
            if slot in INTEGRAL and v.denominator != 1:
                raise InvalidScenario(f"slot {slot}={format_rational(v)} must be an integer")
            object.__setattr__(self, slot, v)
        if self.unknown is not None:
            if self.unknown not in NUMERIC_SLOTS:
                raise InvalidScenario(f"unknown slot {self.unknown!r}")
            if self.unknown in STRUCTURAL:
                raise InvalidScenario(f"structural slot {self.unknown!r} cannot be solved for")
            if getattr(self, self.unknown) is not None:
                raise InvalidScenario(f"slot {self.unknown!r} is both given and unknown")
        if self.orientation not in ORIENTATIONS:
            raise InvalidScenario(f"orientation must be one of {ORIENTATIONS}")
        if self.p is not None and self.r is not None and self.p < self.r:
            raise InvalidScenario("need p >= r")
        if self.genus is not None and self.genus < 0:
            raise InvalidScenario("genus must be >= 0")
        uses_genus = self.genus is not None or self.unknown == "genus"
        if uses_genus and not self.on_curve:
            raise InvalidScenario("genus is only meaningful when the locus is declared a curve")
        if uses_genus and (self.c_l is not None or self.unknown == "c_l"):
            raise InvalidScenario("give either genus or c_l, not both")
        if self.curve and self.p is not None and self.r is not None and self.p - self.r != 1:
            raise InvalidScenario("a curve locus needs p - r = 1")

    @property
    def on_curve(self) -> bool:
        """Declared a curve, or a ramification locus with ``p - r = 1``."""
        if self.curve:
            return True
        if self.variant not in (Variant.BRANCHED_COVER, Variant.ITERATED):
            return False  # L need not be the tangent bundle of N here
        p = self.p
        if p is None and self.variant is Variant.ITERATED and self.cpn:
            p = self.n
        r = self.r if self.r is not None else Fraction(1)
        return p is not None and r is not None and p - r == 1

    @property
    def given(self) -> dict[str, Fraction]:
        return {s: getattr(self, s) for s in NUMERIC_SLOTS if getattr(self, s) is not None}


@dataclass(frozen=True)
class Verdict:
    status: str                      # HOLDS, SOLVED, FAILS or INFEASIBLE
    slot: str | None = None
    value: Fraction | None = None
    residual: Fraction = Fraction(0)
    derived: tuple[tuple[str, Fraction], ...] = ()

    @property
    def ok(self) -> bool:
        return self.status in ("HOLDS", "SOLVED")

    def line(self) -> str:
        extra = "".join(f" {k}={format_rational(v)}" for k, v in self.derived)
        if self.status == "SOLVED":
            return f"SOLVED {self.slot}={format_rational(self.value)}{extra}"
        if self.status in ("FAILS", "INFEASIBLE"):
            return f"{self.status} residual={format_rational(self.residual)}{extra}"
        return f"HOLDS{extra}"


# -- equations ----------------------------------------------------------------

def _need(v: dict, *slots: str) -> list[Fraction]:
    missing = [s for s in slots if v.get(s) is None]
    if missing:
        raise InvalidScenario(f"missing slot(s): {', '.join(missing)}")
    return [v[s] for s in slots]


def _fill(sc: RHScenario, v: dict) -> dict:
    """Derived slots from the supplied ones."""
    v = dict(v)
    if sc.on_curve and v.get("genus") is not None and v.get("c_l") is None:
        v["c_l"] = 2 - 2 * v["genus"]
    if sc.variant is Variant.BRANCHED_COVER and v.get("r") is None:
        v["r"] = Fraction(1)
    if sc.variant is Variant.ITERATED and sc.cpn:
        n, = _need(v, "n")
        if v.get("p") is not None and v["p"] != n:
            raise InvalidScenario("the projective-space regime needs p = n")
        if v.get("delta_k") is None and v.get("delta") is not None and v.get("k_iter") is not None:
            v["delta_k"] = v["delta"] ** int(v["k_iter"])
        if v.get("c_x") is None:
            v["c_x"] = n + 1
        if v.get("c_fy") is None and v.get("delta_k") is not None:
            v["c_fy"] = v["delta_k"] * (n + 1)
    if v.get("c_fy") is None and v.get("c_y") is not None and v.get("delta") is not None:
        v["c_fy"] = v["delta"] * v["c_y"]
    if sc.variant is Variant.DEGREE_LOWERING and v.get("term") is None:
        if v.get("k_const") is not None and v.get("c_l") is not None:
            v["term"] = v["k_const"] * v["c_l"]
    return v


def _sides(sc: RHScenario, raw: dict) -> tuple[Fraction, Fraction]:
    v = _fill(sc, raw)
    kind = sc.variant
    if kind in (Variant.BRANCHED_COVER, Variant.ITERATED):
        if v.get("r") is not None and v["r"] != 1:
            raise InvalidScenario("ramification loci have codimension r = 1")
        c_x, c_fy, mu, c_l = _need(v, "c_x", "c_fy", "mu", "c_l")
        return c_fy - c_x, (mu - 1) * c_l
    if kind is Variant.DEGREE_LOWERING:
        n, delta_k, term = _need(v, "n", "delta_k", "term")
        return delta_k, 1 - term / (n + 1)
    if kind is Variant.FIXED_POINT:
        p, r, c_x, k, c_l = _need(v, "p", "r", "c_x", "k_const", "c_l")
        if r == 1:
            if p == 1:
                nu, c_os = _need(v, "nu", "c_os")
                c_q = nu * c_os
            else:
                c_q = Fraction(0)  # Q_S is a line bundle
        else:
            c_q, = _need(v, "c_q")
        return c_q - c_x, k * c_l
    if kind is Variant.GENERIC:
        c_x, c_fy, k, c_l = _need(v, "c_x", "c_fy", "k_const", "c_l")
        lhs = c_x - c_fy if sc.orientation == "x_minus_fy" else c_fy - c_x
        return lhs, k * c_l
    raise InvalidScenario(f"unhandled variant {kind}")


def _residual(sc: RHScenario, values: dict) -> Fraction:
    lhs, rhs = _sides(sc, values)
    return lhs - rhs


def _check_value(slot: str, value: Fraction) -> None:
    if slot in INTEGRAL and value.denominator != 1:
        raise NonIntegral(slot, format_rational(value))
    if slot == "genus" and value < 0:
        raise OutOfRange(f"genus={format_rational(value)} is negative")
    if slot in ("delta", "delta_k", "mu", "k_iter", "nu") and value < 1:
        raise OutOfRange(f"{slot}={format_rational(value)} must be >= 1")


def _curve_genus(sc: RHScenario, values: dict) -> list[tuple[str, Fraction]]:
    if sc.on_curve and values.get("genus") is None and values.get("c_l") is not None:
        g = (2 - values["c_l"]) / 2
        _check_value("genus", g)
        return [("genus", g)]
    return []


def _solve(sc: RHScenario) -> Verdict:
    base = sc.given
    if sc.unknown is None:
        res = _residual(sc, base)
        return Verdict("HOLDS" if res == 0 else "FAILS", residual=res,
                       derived=tuple(_curve_genus(sc, base)) if res == 0 else ())
    slot = sc.unknown

    def at(t) -> Fraction:
        return _residual(sc, {**base, slot: Fraction(t)})

    r0, r1, r2 = at(0), at(1), at(2)
    slope = r1 - r0
    if r2 - r1 != slope:
        raise Unsolvable(f"identity is not affine in {slot}")
    if slope == 0:
        raise Unsolvable(f"{slot} does not enter the identity (coefficient 0)")
    value = -r0 / slope
    _check_value(slot, value)
    full = {**base, slot: value}
    if _residual(sc, full) != 0:
        raise AssertionError("solved value does not satisfy the identity")
    return Verdict("SOLVED", slot=slot, value=value, derived=tuple(_curve_genus(sc, full)))


def _expect(sc: RHScenario, variant: Variant) -> None:
    if sc.variant is not variant:
        raise InvalidScenario(f"expected a {variant.value} scenario, got {sc.variant.value}")


# -- public checks -------------------------------------------------------------

def check_branched_cover(sc: RHScenario) -> Verdict:
    """``<f*c_p(Y) - c_p(X), [M]> = (mu - 1) <c_{p-1}(X_1), [N]>``."""
    _expect(sc, Variant.BRANCHED_COVER)
    return _solve(sc)


def check_iterated(sc: RHScenario) -> Verdict:
    """
    Iterated holomorphic branched covers.  With ``cpn`` set the left side is
    ``(n+1)(delta_k - 1)`` and ``delta_k`` defaults to ``delta^k_iter``.

    When ``delta_k == mu > 1`` and the locus is a curve, the identity forces
    ``2 - 2g = (c_fy - c_x) / (mu - 1)``; if no genus ``g >= 0`` fits, the
    scenario is INFEASIBLE whatever genus was supplied.
    """
    _expect(sc, Variant.ITERATED)
    v = _fill(sc, sc.given)
    dk, mu = v.get("delta_k"), v.get("mu")
    if (sc.on_curve and dk is not None and mu is not None and dk == mu and mu > 1
            and v.get("c_x") is not None and v.get("c_fy") is not None):
        chi = (v["c_fy"] - v["c_x"]) / (mu - 1)
        g = (2 - chi) / 2
        if g.denominator != 1 or g < 0:
            probe = dict(sc.given)
            if probe.get("genus") is None and probe.get("c_l") is None:
                probe["genus"] = Fraction(0)
            return Verdict("INFEASIBLE", residual=_residual(sc, probe))
    return _solve(sc)


def check_degree_lowering(sc: RHScenario) -> Verdict:
    """``delta_k = 1 - term / (n+1)`` together with ``delta_k < delta^k_iter``."""
    _expect(sc, Variant.DEGREE_LOWERING)
    verdict = _solve(sc)
    if not verdict.ok:
        return verdict
    v = _fill(sc, {**sc.given, **({verdict.slot: verdict.value} if verdict.slot else {})})
    delta, k_iter = _need(v, "delta", "k_iter")
    bound = delta ** int(k_iter)
    if not v["delta_k"] < bound:
        raise InequalityViolated(
            f"delta_k={format_rational(v['delta_k'])} is not < delta^k={format_rational(bound)}")
    return verdict


def check_fixed_point(sc: RHScenario) -> Verdict:
    """``<c_p(Q_S^nu) - c_p(X), [M]> = k <c_{p-r}(L), [N]>``."""
    _expect(sc, Variant.FIXED_POINT)
    return _solve(sc)


def check_generic(sc: RHScenario) -> Verdict:
    """``<c_p(X) - f*c_p(Y), [M]> = k <c_{p-r}(L), [N]>`` (or the flipped orientation)."""
    _expect(sc, Variant.GENERIC)
    return _solve(sc)


_DISPATCH = {
    Variant.BRANCHED_COVER: check_branched_cover,
    Variant.ITERATED: check_iterated,
    Variant.DEGREE_LOWERING: check_degree_lowering,
    Variant.FIXED_POINT: check_fixed_point,
    Variant.GENERIC: check_generic,
}


def check(sc: RHScenario) -> Verdict:
    return _DISPATCH[sc.variant](sc)


def as_generic(sc: RHScenario) -> RHScenario:
    """Re-express a branched-cover scenario with ``k_const = mu - 1``."""
    _expect(sc, Variant.BRANCHED_COVER)
    v = _fill(sc, sc.given)
    k = None if v.get("mu") is None else v["mu"] - 1
    kw = {f.name: getattr(sc, f.name) for f in fields(sc)}
    kw.update(variant=Variant.GENERIC, orientation="fy_minus_x", mu=None, k_const=k,
              c_fy=v.get("c_fy"), c_y=None, delta=None, r=v.get("r"))
    if sc.unknown == "mu":
        kw["unknown"] = "k_const"
    return RHScenario(**kw)


def flip_orientation(sc: RHScenario) -> RHScenario:
    other = "fy_minus_x" if sc.orientation == "x_minus_fy" else "x_minus_fy"
    return replace(sc, orientation=other)


def verdict_line(sc: RHScenario) -> tuple[str, bool]:
    """The CLI line for one scenario and whether it counts as success."""
    try:
        v = check(sc)
    except NonIntegral as e:
        return f"{e.tag} {e.slot}={e.value}", False
    except ScenarioError as e:
        return f"{e.tag} {e}", False
    return v.line(), v.ok


def check_many(scenarios: Sequence[RHScenario] | Iterable[RHScenario], jobs: int = 1):
    """``[(name, line, ok)]`` in input order; scenarios may run in threads."""
    scenarios = list(scenarios)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            lines = list(pool.map(verdict_line, scenarios))
    else:
        lines = [verdict_line(sc) for sc in scenarios]
    return [(sc.name, line, ok) for sc, (line, ok) in zip(scenarios, lines)]
