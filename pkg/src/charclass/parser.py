"""
The charclass declaration language.

A program is a sequence of ``;``-terminated statements::

    ring R gens h:1 trunc 2 relations h^3 integrate h^2;
    bundle E rank 2 in R gens a1 a2;
    line L gen l;                  # no ``in``: lives in an automatic free ring
    space X = K3;                  # instantiate a preset
    eval c(sum(E, dual(E)));
    scenario k3 { variant = branched_cover; n = 2; p = 2; c_l = ?; }
    preset Curve(g) { ring gens pt:1 trunc 1 integrate pt; tangent 1 + (2 - 2*g)*pt; }

Expressions mix rationals, ring classes and bundle expressions.  Bundle
constructors are ``dual``, ``sum``, ``twist``, ``halftwist``, ``sym``,
``tensor`` and ``trivial``; ``c(B)`` / ``c(k, B)`` take Chern classes,
``part(k, x)`` a graded piece, ``pair(x)`` the integral, ``tangent(X)`` and
``euler(X)`` read a space.  ``#`` starts a comment.

Parsing and evaluation are separate: statements become small AST records
which :func:`parse_program` then resolves into a :class:`Session`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .bundles import (
    Abstract,
    BundleExpr,
    Dual,
    HalfTwist,
    Line,
    Sum,
    Sym,
    Tensor,
    TensorLine,
    Trivial,
    leaves,
    total_chern,
)
from .errors import (
    CharclassError,
    DuplicateIdentifier,
    EvalError,
    InvalidRingSpec,
    NonMonomialRelation,
    ParseError,
    SourceSyntaxError,
    UnresolvedReference,
)
from .graded_ring import GradedClass, RingSpec
from .rh_check import NUMERIC_SLOTS, ORIENTATIONS, RHScenario, Variant

__all__ = [
    "Token", "tokenize", "Session", "Command", "Config", "BundleDecl", "PresetDef",
    "SpacePreset", "parse_program", "parse_expression", "parse_class", "evaluate",
    "instantiate_preset", "FREE_RING",
]

FREE_RING = "free"

# -- lexer ---------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()\[\]{},;:=?])"
)


@dataclass(frozen=True)
class Token:
    kind: str      # num, name, op, eof
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    out: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if not m:
            raise SourceSyntaxError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind in ("num", "name", "op"):
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


# -- AST -------------------------------------------------------------------------

Pos = tuple[int, int]


@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: Pos


@dataclass(frozen=True)
class Name:
    ident: str
    pos: Pos


@dataclass(frozen=True)
class Unary:
    op: str
    arg: Any
    pos: Pos


@dataclass(frozen=True)
class Binary:
    op: str
    left: Any
    right: Any
    pos: Pos


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple
    pos: Pos


@dataclass(frozen=True)
class RingStmt:
    name: str | None
    gens: tuple[tuple[str, Any, Pos], ...]
    trunc: Any
    relations: tuple
    integrate: Any
    scale: Any
    pos: Pos


@dataclass(frozen=True)
class LetStmt:
    name: str
    expr: Any
    pos: Pos


@dataclass(frozen=True)
class TangentStmt:
    expr: Any
    pos: Pos


# -- session records ---------------------------------------------------------------

@dataclass(frozen=True)
class BundleDecl:
    expr: Abstract | Line
    ring: str          # a declared ring name, or FREE_RING
    pos: Pos


@dataclass(frozen=True)
class PresetDef:
    name: str
    params: tuple[str, ...]
    body: tuple        # LetStmt / RingStmt / TangentStmt
    pos: Pos


@dataclass(frozen=True)
class SpacePreset:
    """A named space: its cohomology ring, total tangent class and Euler number."""

    name: str
    ring: RingSpec
    tangent: GradedClass
    euler: Fraction
    values: tuple[tuple[str, Fraction], ...] = ()

    def value(self, key: str) -> Fraction:
        return dict(self.values)[key]


@dataclass
class Config:
    rank_bound: int | None = None
    format: str = "text"


@dataclass(frozen=True)
class Command:
    verb: str
    args: dict
    pos: Pos = (0, 0)


@dataclass
class Session:
    rings: dict[str, RingSpec] = field(default_factory=dict)
    bundles: dict[str, BundleDecl] = field(default_factory=dict)
    lines: dict[str, BundleDecl] = field(default_factory=dict)
    scenarios: dict[str, RHScenario] = field(default_factory=dict)
    spaces: dict[str, SpacePreset] = field(default_factory=dict)
    presets: dict[str, PresetDef] = field(default_factory=dict)
    commands: list[Command] = field(default_factory=list)
    config: Config = field(default_factory=Config)

    def free_ring(self, truncation: int) -> RingSpec:
        """Relation-free ring holding every free bundle's generators."""
        gens = []
        for table in (self.bundles, self.lines):
            for decl in table.values():
                if decl.ring == FREE_RING:
                    for leaf in leaves(decl.expr):
                        names = leaf.gens if isinstance(leaf, Abstract) else (leaf.gen,)
                        gens.extend((g, i) for i, g in enumerate(names, start=1))
        return RingSpec.create(gens, truncation=max(truncation, 1))

    def ring_of(self, name: str) -> str | None:
        """Ring name of a bundle, line or space."""
        for table in (self.bundles, self.lines):
            if name in table:
                return table[name].ring
        if name in self.spaces:
            return f"space:{name}"
        return None


# -- parser ----------------------------------------------------------------------

_RING_KEYS = ("trunc", "relations", "integrate", "scale")


class _Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "name") and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def fail(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise SourceSyntaxError(f"{msg}, found {found}", t.line, t.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "name":
            self.fail(f"expected {what}")
        return self.advance()

    def end_statement(self):
        if not self.accept(";") and self.tok.kind != "eof":
            self.fail("expected ';'")

    # expressions
    def expr(self):
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance()
            left = Binary(op.text, left, self.term(), (op.line, op.col))
        return left

    def term(self):
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance()
            left = Binary(op.text, left, self.unary(), (op.line, op.col))
        return left

    def unary(self):
        if self.at("-") or self.at("+"):
            op = self.advance()
            return Unary(op.text, self.unary(), (op.line, op.col))
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            op = self.advance()
            return Binary("^", base, self.unary(), (op.line, op.col))
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(Fraction(int(t.text)), (t.line, t.col))
        if t.kind == "name":
            self.advance()
            if self.accept("("):
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
                return Call(t.text, tuple(args), (t.line, t.col))
            return Name(t.text, (t.line, t.col))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expected an expression")

    # statements
    def ring_body(self, name: str | None, pos: Pos) -> RingStmt:
        self.expect("gens")
        gens = []
        while self.tok.kind == "name" and self.tok.text not in _RING_KEYS:
            g = self.advance()
            self.expect(":")
            gens.append((g.text, self.expr(), (g.line, g.col)))
        if not gens:
            self.fail("expected at least one generator 'name:degree'")
        trunc = relations = integrate = scale = None
        while True:
            if self.accept("trunc"):
                trunc = self.expr()
            elif self.accept("relations"):
                rels = [self.expr()]
                while self.accept(","):
                    rels.append(self.expr())
                relations = tuple(rels)
            elif self.accept("integrate"):
                integrate = self.expr()
            elif self.accept("scale"):
                scale = self.expr()
            else:
                break
        if trunc is None:
            self.fail("ring needs 'trunc'")
        self.end_statement()
        return RingStmt(name, tuple(gens), trunc, relations or (), integrate, scale, pos)

    def scenario_body(self) -> list[tuple[str, Any, Pos]]:
        self.expect("{")
        items = []
        while not self.accept("}"):
            key = self.ident("scenario field")
            self.expect("=")
            if self.at("?"):
                self.advance()
                value: Any = "?"
            elif key.text in ("variant", "orientation") or self.at("true") or self.at("false"):
                value = self.ident("value").text
            else:
                value = self.expr()
            items.append((key.text, value, (key.line, key.col)))
            if not self.accept(";") and not self.at("}"):
                self.fail("expected ';' or '}'")
        self.accept(";")
        return items

    def preset_body(self) -> list:
        self.expect("{")
        body = []
        while not self.accept("}"):
            t = self.tok
            pos = (t.line, t.col)
            if self.accept("let"):
                name = self.ident().text
                self.expect("=")
                body.append(LetStmt(name, self.expr(), pos))
                self.expect(";")
            elif self.accept("ring"):
                body.append(self.ring_body(None, pos))
            elif self.accept("tangent"):
                body.append(TangentStmt(self.expr(), pos))
                self.expect(";")
            else:
                self.fail("expected 'let', 'ring' or 'tangent' in a preset")
        self.accept(";")
        return body

    def statements(self):
        while self.tok.kind != "eof":
            if self.accept(";"):
                continue
            t = self.tok
            pos = (t.line, t.col)
            kw = self.ident("a statement keyword").text
            if kw == "ring":
                name = self.ident("ring name")
                yield ("ring", name.text, self.ring_body(name.text, (name.line, name.col)), pos)
            elif kw in ("bundle", "line"):
                name = self.ident(f"{kw} name")
                rank = ring = None
                gens: list[str] = []
                while True:
                    if kw == "bundle" and self.accept("rank"):
                        rank = self.expr()
                    elif self.accept("in"):
                        ring = self.ident("ring name")
                    elif self.accept("gens" if kw == "bundle" else "gen"):
                        while self.tok.kind == "name" and self.tok.text not in ("in", "rank"):
                            gens.append(self.advance().text)
                    else:
                        break
                if kw == "bundle" and rank is None:
                    self.fail("bundle needs 'rank'")
                self.end_statement()
                yield (kw, name.text, (rank, ring, tuple(gens)), (name.line, name.col))
            elif kw == "space":
                name = self.ident("space name")
                self.expect("=")
                target = self.atom()
                if not isinstance(target, (Name, Call)):
                    self.fail("expected a preset such as CPn(2)")
                self.end_statement()
                yield ("space", name.text, target, (name.line, name.col))
            elif kw == "eval":
                e = self.expr()
                ring = self.ident("ring name") if self.accept("in") else None
                self.end_statement()
                yield ("eval", None, (e, ring), pos)
            elif kw == "scenario":
                name = self.ident("scenario name")
                yield ("scenario", name.text, self.scenario_body(), (name.line, name.col))
            elif kw == "preset":
                name = self.ident("preset name")
                params = []
                if self.accept("("):
                    if not self.at(")"):
                        params.append(self.ident("parameter").text)
                        while self.accept(","):
                            params.append(self.ident("parameter").text)
                    self.expect(")")
                yield ("preset", name.text, (tuple(params), tuple(self.preset_body())),
                       (name.line, name.col))
            else:
                self.fail("expected ring, bundle, line, space, eval, scenario or preset",
                          self.toks[self.i - 1])


def parse_expression(text: str):
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.fail("unexpected trailing input")
    return e


# -- evaluation ------------------------------------------------------------------

@dataclass
class _Env:
    session: Session
    ring: RingSpec | None = None
    scalars: dict[str, Fraction] = field(default_factory=dict)

    @property
    def rank_bound(self):
        return self.session.config.rank_bound


def _err(msg: str, pos: Pos) -> EvalError:
    return EvalError(msg, *pos)


def _scalar(v, pos: Pos, what: str = "value") -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, GradedClass) and v.is_homogeneous(0):
        return v.constant_term()
    raise _err(f"{what} must be a number", pos)


def _int(v, pos: Pos, what: str = "value") -> int:
    q = _scalar(v, pos, what)
    if q.denominator != 1:
        raise _err(f"{what} must be an integer, got {q}", pos)
    return int(q)


def _bundle(v, pos: Pos) -> BundleExpr:
    if not isinstance(v, BundleExpr):
        raise _err("expected a bundle expression", pos)
    return v


def _need_ring(env: _Env, pos: Pos) -> RingSpec:
    if env.ring is None:
        raise _err("this expression needs a ring; add 'in <ring>'", pos)
    return env.ring


def _class_of(env: _Env, v, pos: Pos) -> GradedClass:
    if isinstance(v, GradedClass):
        return v
    if isinstance(v, BundleExpr):
        return _chern(env, v, pos)
    if isinstance(v, Fraction):
        return _need_ring(env, pos).constant(v)
    raise _err("expected a class", pos)


def _chern(env: _Env, b: BundleExpr, pos: Pos) -> GradedClass:
    ring = _need_ring(env, pos)
    try:
        return total_chern(b, ring, env.rank_bound)
    except CharclassError as e:
        if isinstance(e, ParseError):
            raise
        e.pos = pos
        raise


def _arith(op: str, a, b, pos: Pos):
    if isinstance(a, (BundleExpr, SpacePreset)) or isinstance(b, (BundleExpr, SpacePreset)):
        raise _err(f"operator {op!r} needs classes or numbers; wrap bundles in c(...)", pos)
    try:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            d = _scalar(b, pos, "divisor")
            if d == 0:
                raise _err("division by zero", pos)
            return a / d
        k = _int(b, pos, "exponent")
        if isinstance(a, Fraction):
            if k < 0 and a == 0:
                raise _err("division by zero", pos)
            return a ** k
        if k < 0:
            raise _err("a class can only be raised to a nonnegative power", pos)
        return a ** k
    except CharclassError as e:
        if isinstance(e, ParseError):
            raise
        raise _err(str(e), pos) from e


def _call(env: _Env, node: Call):
    fn, pos = node.fn, node.pos
    args = [evaluate(a, env) for a in node.args]

    def arity(*ok):
        if len(args) not in ok:
            want = " or ".join(map(str, ok))
            raise _err(f"{fn}() takes {want} argument(s), got {len(args)}", pos)

    if fn == "c":
        arity(1, 2)
        cls = _class_of(env, _bundle(args[-1], pos), pos)
        return cls if len(args) == 1 else cls.component(_int(args[0], pos, "degree"))
    if fn == "part":
        arity(2)
        return _class_of(env, args[1], pos).component(_int(args[0], pos, "degree"))
    if fn == "pair":
        arity(1)
        try:
            return _class_of(env, args[0], pos).pair()
        except InvalidRingSpec as e:
            raise _err(str(e), pos) from None
    if fn in ("tangent", "euler"):
        arity(1)
        sp = args[0]
        if not isinstance(sp, SpacePreset):
            raise _err(f"{fn}() needs a space", pos)
        return sp.tangent if fn == "tangent" else sp.euler
    if fn == "dual":
        arity(1)
        return Dual(_bundle(args[0], pos))
    if fn == "sum":
        if not args:
            raise _err("sum() needs at least one bundle", pos)
        return Sum(*(_bundle(a, pos) for a in args))
    if fn in ("twist", "halftwist"):
        arity(2)
        b, ln = _bundle(args[0], pos), _bundle(args[1], pos)
        if ln.rank != 1:
            raise _err(f"{fn}() needs a line bundle as second argument", pos)
        return TensorLine(b, ln) if fn == "twist" else HalfTwist(b, ln)
    if fn == "sym":
        arity(2)
        k = _int(args[0], pos, "symmetric power")
        if k < 0:
            raise _err("symmetric power must be >= 0", pos)
        return Sym(k, _bundle(args[1], pos))
    if fn == "tensor":
        arity(2)
        return Tensor(_bundle(args[0], pos), _bundle(args[1], pos))
    if fn == "trivial":
        arity(0, 1)
        k = _int(args[0], pos, "rank") if args else 1
        if k < 1:
            raise _err("trivial bundles have rank >= 1", pos)
        return Trivial(k)
    raise UnresolvedReference(f"unknown function {fn!r}", *pos)


def _lookup(env: _Env, node: Name):
    name = node.ident
    if name in env.scalars:
        return env.scalars[name]
    if env.ring is not None and name in env.ring.names:
        return env.ring.gen(name)
    s = env.session
    for table in (s.bundles, s.lines):
        if name in table:
            return table[name].expr
    if name in s.spaces:
        return s.spaces[name]
    raise UnresolvedReference(f"unknown name {name!r}", *node.pos)


def evaluate(node, env: _Env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        return _lookup(env, node)
    if isinstance(node, Unary):
        v = evaluate(node.arg, env)
        if node.op == "+":
            return v
        return _arith("*", Fraction(-1), v, node.pos)
    if isinstance(node, Binary):
        return _arith(node.op, evaluate(node.left, env), evaluate(node.right, env), node.pos)
    if isinstance(node, Call):
        return _call(env, node)
    raise TypeError(node)


def _names_in(node, skip_scalar: bool = False) -> list[Name]:
    """Names referenced by ``node``; with ``skip_scalar`` the arguments of euler() are left out."""
    if isinstance(node, Name):
        return [node]
    if isinstance(node, (Unary,)):
        return _names_in(node.arg, skip_scalar)
    if isinstance(node, Binary):
        return _names_in(node.left, skip_scalar) + _names_in(node.right, skip_scalar)
    if isinstance(node, Call):
        if skip_scalar and node.fn == "euler":
            return []
        return [n for a in node.args for n in _names_in(a, skip_scalar)]
    return []


def _has_call(node) -> bool:
    if isinstance(node, Call):
        return node.fn != "euler" or any(_has_call(a) for a in node.args)
    if isinstance(node, Unary):
        return _has_call(node.arg)
    if isinstance(node, Binary):
        return _has_call(node.left) or _has_call(node.right)
    return False


def _chern_budget(node, env: _Env) -> int:
    """Upper bound on the degree an expression can reach, from the ranks under c()."""
    if isinstance(node, Call):
        inner = sum(_chern_budget(a, env) for a in node.args)
        if node.fn == "c" and node.args:
            try:
                b = evaluate(node.args[-1], env)
            except CharclassError:
                return inner
            if isinstance(b, BundleExpr):
                return inner + b.rank
        return inner
    if isinstance(node, Binary):
        if node.op == "^" and isinstance(node.right, Num):
            return _chern_budget(node.left, env) * int(node.right.value)
        return _chern_budget(node.left, env) + _chern_budget(node.right, env)
    if isinstance(node, Unary):
        return _chern_budget(node.arg, env)
    if isinstance(node, Name):
        b = _lookup_quiet(env, node.ident)
        return b.rank if isinstance(b, BundleExpr) else 0
    return 0


def _lookup_quiet(env: _Env, name: str):
    try:
        return _lookup(env, Name(name, (0, 0)))
    except UnresolvedReference:
        return None


def infer_ring(session: Session, node, ring_name: str | None = None, pos: Pos = (0, 0)):
    """The ring an expression is evaluated in: explicit, inferred from its bundles, or none."""
    if ring_name is not None:
        if ring_name not in session.rings:
            raise UnresolvedReference(f"unknown ring {ring_name!r}", *pos)
        return session.rings[ring_name]
    homes = set()
    for n in _names_in(node, skip_scalar=True):
        home = session.ring_of(n.ident)
        if home is not None:
            homes.add(home)
    if not homes:
        # bare generator names: the one declared ring that has them all
        names = {n.ident for n in _names_in(node, skip_scalar=True)}
        if not names:
            # trivial bundles and the like live in the free ring
            return session.free_ring(_chern_budget(node, _Env(session))) if _has_call(node) else None
        rings = [r for r in session.rings.values() if names <= set(r.names)]
        if len(rings) == 1:
            return rings[0]
        if rings:
            raise _err("several rings have these generators; add 'in <ring>'", pos)
        return None
    if len(homes) > 1:
        raise _err(f"expression mixes rings {', '.join(sorted(homes))}; add 'in <ring>'", pos)
    home = homes.pop()
    if home.startswith("space:"):
        return session.spaces[home[6:]].ring
    if home != FREE_RING:
        return session.rings[home]
    return session.free_ring(_chern_budget(node, _Env(session)))


def eval_in_session(session: Session, node, ring_name: str | None = None, pos: Pos = (0, 0)):
    ring = infer_ring(session, node, ring_name, pos)
    value = evaluate(node, _Env(session, ring))
    if isinstance(value, BundleExpr):
        value = _chern(_Env(session, ring), value, pos)
    return value


def parse_class(text: str, ring: RingSpec) -> GradedClass:
    """Read canonical (or any) polynomial text back into ``ring``."""
    value = evaluate(parse_expression(text), _Env(Session(), ring))
    if isinstance(value, Fraction):
        return ring.constant(value)
    if not isinstance(value, GradedClass):
        raise EvalError(f"{text!r} is not a class")
    return value


# -- statement resolution ------------------------------------------------------------

def _monomial(cls: GradedClass, ring: RingSpec, pos: Pos, kind: str) -> dict[str, int]:
    items = list(cls.terms.items())
    if len(items) != 1 or items[0][1] != 1:
        exc = NonMonomialRelation if kind == "relation" else InvalidRingSpec
        e = exc(f"{kind} {cls} is not a monomial with coefficient 1")
        e.pos = pos
        raise e
    return {g.name: x for g, x in zip(ring.generators, items[0][0]) if x}


def build_ring(stmt: RingStmt, env: _Env) -> RingSpec:
    gens = []
    seen = set()
    for name, deg, pos in stmt.gens:
        if name in seen:
            raise DuplicateIdentifier(f"generator {name!r} declared twice", *pos)
        seen.add(name)
        gens.append((name, _int(evaluate(deg, env), pos, "degree")))
    trunc = _int(evaluate(stmt.trunc, env), stmt.pos, "truncation")
    # relations and the integration monomial are read in a roomy relation-free ring
    loose = RingSpec.create(gens, truncation=max(trunc, 0) + max(d for _, d in gens) + 64)
    inner = _Env(env.session, loose, env.scalars)

    def mono(node, kind):
        v = evaluate(node, inner)
        if isinstance(v, Fraction):
            v = loose.constant(v)
        if not isinstance(v, GradedClass):
            raise _err(f"{kind} must be a monomial", stmt.pos)
        return _monomial(v, loose, stmt.pos, kind)

    relations = [mono(r, "relation") for r in stmt.relations]
    integrate = mono(stmt.integrate, "integration monomial") if stmt.integrate is not None else None
    scale = _scalar(evaluate(stmt.scale, env), stmt.pos, "scale") if stmt.scale is not None else 1
    try:
        return RingSpec.create(gens, trunc, relations, integrate, scale)
    except CharclassError as e:
        e.pos = stmt.pos
        raise


def instantiate_preset(defn: PresetDef, args: list[Fraction], session: Session,
                       label: str | None = None) -> SpacePreset:
    if len(args) != len(defn.params):
        raise EvalError(f"preset {defn.name} takes {len(defn.params)} parameter(s), got {len(args)}",
                        *defn.pos)
    env = _Env(session, None, dict(zip(defn.params, args)))
    ring = tangent = None
    for stmt in defn.body:
        if isinstance(stmt, LetStmt):
            env.scalars[stmt.name] = _scalar(evaluate(stmt.expr, env), stmt.pos, stmt.name)
        elif isinstance(stmt, RingStmt):
            ring = build_ring(stmt, env)
            env = _Env(session, ring, env.scalars)
        else:
            tangent = _class_of(env, evaluate(stmt.expr, env), stmt.pos)
    if ring is None or tangent is None:
        raise EvalError(f"preset {defn.name} needs both a ring and a tangent class", *defn.pos)
    top = ring.truncation
    euler = tangent.component(top).pair() if ring.integration is not None else Fraction(0)
    label = label or (f"{defn.name}({','.join(str(a) for a in args)})" if args else defn.name)
    values = tuple(sorted(env.scalars.items()))
    return SpacePreset(label, ring, tangent, euler, values)


_BOOL = {"true": True, "false": False}


def _scenario(session: Session, name: str, items, pos: Pos) -> RHScenario:
    kw: dict[str, Any] = {"name": name}
    unknown = None
    for key, value, kpos in items:
        if key in kw or key == unknown:
            raise DuplicateIdentifier(f"field {key!r} given twice", *kpos)
        if key == "variant":
            variant = {"generic_rational": "generic"}.get(value, value)
            if variant not in {v.value for v in Variant}:
                raise EvalError(f"unknown variant {value!r}", *kpos)
            kw[key] = Variant(variant)
        elif key == "orientation":
            if value not in ORIENTATIONS:
                raise EvalError(f"orientation must be one of {', '.join(ORIENTATIONS)}", *kpos)
            kw[key] = value
        elif key in ("curve", "cpn"):
            if value not in _BOOL:
                raise EvalError(f"{key} must be true or false", *kpos)
            kw[key] = _BOOL[value]
        elif key in NUMERIC_SLOTS:
            if value == "?":
                if unknown is not None:
                    raise EvalError(f"second unknown {key!r}; at most one slot may be '?'", *kpos)
                unknown = key
                kw[key] = None
            elif isinstance(value, str):
                raise EvalError(f"{key} needs a number", *kpos)
            else:
                kw[key] = _scalar(eval_in_session(session, value, None, kpos), kpos, key)
        else:
            raise EvalError(f"unknown scenario field {key!r}", *kpos)
    if "variant" not in kw:
        raise EvalError(f"scenario {name} needs a variant", *pos)
    kw["unknown"] = unknown
    try:
        return RHScenario(**kw)
    except CharclassError as e:
        e.pos = pos
        raise


def _builtin_presets() -> dict[str, PresetDef]:
    from .catalog import builtin_preset_defs  # the catalog itself parses this language

    return builtin_preset_defs()


def parse_program(source: str, session: Session | None = None,
                  with_presets: bool = True) -> Session:
    """Parse and resolve ``source``; declarations extend ``session`` if given."""
    if session is None:
        session = Session()
        if with_presets:
            session.presets.update(_builtin_presets())
    parser = _Parser(source)

    def taken(name: str, pos: Pos, *tables):
        for t in tables:
            if name in t:
                raise DuplicateIdentifier(f"{name!r} is already declared", *pos)

    def on_ring(name, stmt, pos):
        taken(name, pos, session.rings)
        if name == FREE_RING:
            raise DuplicateIdentifier(f"ring name {FREE_RING!r} is reserved", *pos)
        session.rings[name] = build_ring(stmt, _Env(session))

    def on_leaf(kind, name, data, pos):
        rank_node, ring_tok, gens = data
        taken(name, pos, session.bundles, session.lines, session.spaces)
        ring_name = FREE_RING
        if ring_tok is not None:
            ring_name = ring_tok.text
            if ring_name not in session.rings:
                raise UnresolvedReference(f"unknown ring {ring_name!r}", ring_tok.line, ring_tok.col)
        try:
            if kind == "bundle":
                rank = _int(evaluate(rank_node, _Env(session)), pos, "rank")
                leaf = Abstract(name, rank, gens=gens)
            else:
                if len(gens) > 1:
                    raise EvalError("a line has a single generator", *pos)
                leaf = Line(name, gen=gens[0] if gens else "")
        except CharclassError as e:
            if isinstance(e, ParseError):
                raise
            raise EvalError(str(e), *pos) from None
        if ring_name != FREE_RING:
            ring = session.rings[ring_name]
            names = leaf.gens if isinstance(leaf, Abstract) else (leaf.gen,)
            for i, g in enumerate(names, start=1):
                if g not in ring.names:
                    raise UnresolvedReference(
                        f"ring {ring_name} has no generator {g!r} for c_{i}({name})", *pos)
                if ring.generators[ring.index(g)].degree != i:
                    raise EvalError(f"generator {g!r} must have degree {i} to stand for c_{i}({name})", *pos)
        else:
            names = leaf.gens if isinstance(leaf, Abstract) else (leaf.gen,)
            for table in (session.bundles, session.lines):
                for other in table.values():
                    if other.ring != FREE_RING:
                        continue
                    theirs = other.expr.gens if isinstance(other.expr, Abstract) else (other.expr.gen,)
                    clash = set(names) & set(theirs)
                    if clash:
                        raise DuplicateIdentifier(
                            f"generator {sorted(clash)[0]!r} already belongs to {other.expr.label}", *pos)
        table = session.bundles if kind == "bundle" else session.lines
        table[name] = BundleDecl(leaf, ring_name, pos)

    def on_space(name, target, pos):
        taken(name, pos, session.bundles, session.lines, session.spaces)
        preset_name = target.ident if isinstance(target, Name) else target.fn
        if preset_name not in session.presets:
            raise UnresolvedReference(f"unknown preset {preset_name!r}", *target.pos)
        args = [] if isinstance(target, Name) else [
            _scalar(evaluate(a, _Env(session)), target.pos, "preset parameter") for a in target.args]
        if preset_name in _builtin_presets() and session.presets[preset_name] is _builtin_presets()[preset_name]:
            from .catalog import check_preset_params

            check_preset_params(preset_name, args)
        session.spaces[name] = instantiate_preset(session.presets[preset_name], args, session, name)

    def on_eval(_, data, pos):
        node, ring_tok = data
        ring_name = None
        if ring_tok is not None:
            ring_name = ring_tok.text
            if ring_name not in session.rings:
                raise UnresolvedReference(f"unknown ring {ring_name!r}", ring_tok.line, ring_tok.col)
        _check_names(session, node)
        session.commands.append(Command("eval", {"expr": node, "ring": ring_name}, pos))

    def on_scenario(name, items, pos):
        taken(name, pos, session.scenarios)
        session.scenarios[name] = _scenario(session, name, items, pos)

    def on_preset(name, data, pos):
        taken(name, pos, session.presets)
        params, body = data
        session.presets[name] = PresetDef(name, params, body, pos)

    handlers = dict(ring=on_ring, space=on_space, eval=on_eval, scenario=on_scenario,
                    preset=on_preset)
    for kind, name, data, pos in parser.statements():
        try:
            if kind in ("bundle", "line"):
                on_leaf(kind, name, data, pos)
            else:
                handlers[kind](name, data, pos)
        except ParseError:
            raise
        except CharclassError as e:
            # keep the originating module's error; just anchor it in the source
            if getattr(e, "pos", None) is None:
                e.pos = pos
            raise
    return session


_FUNCTIONS = frozenset({"c", "part", "pair", "tangent", "euler", "dual", "sum", "twist",
                        "halftwist", "sym", "tensor", "trivial"})


def _check_names(session: Session, node):
    """Report unknown names and functions at parse time, before anything runs."""
    for sub in _calls_in(node):
        if sub.fn not in _FUNCTIONS:
            raise UnresolvedReference(f"unknown function {sub.fn!r}", *sub.pos)
    for n in _names_in(node):
        known = (session.ring_of(n.ident) is not None
                 or any(n.ident in r.names for r in session.rings.values()))
        if not known:
            raise UnresolvedReference(f"unknown name {n.ident!r}", *n.pos)


def _calls_in(node) -> list[Call]:
    if isinstance(node, Call):
        return [node] + [c for a in node.args for c in _calls_in(a)]
    if isinstance(node, Unary):
        return _calls_in(node.arg)
    if isinstance(node, Binary):
        return _calls_in(node.left) + _calls_in(node.right)
    return []
