from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from charclass.bundles import Dual, Sum
from charclass.errors import (
    DuplicateIdentifier, EvalError, UnknownGenerator, InvalidRingSpec, NonMonomialRelation, SourceSyntaxError,
    UnresolvedReference,
)
from charclass.graded_ring import GradedClass, RingSpec
from charclass.parser import (
    FREE_RING, eval_in_session, parse_class, parse_expression, parse_program, tokenize,
)
from charclass.rh_check import Variant

from conftest import ABC, CP3, classes


def ev(session, text, ring=None):
    return eval_in_session(session, parse_expression(text), ring)


class TestDeclarations:
    def test_ring(self):
        s = parse_program("ring R gens h:1 trunc 2 relations h^3 integrate h^2;")
        R = s.rings["R"]
        assert R.truncation == 2 and R.names == ("h",)
        assert R.relations == ((3,),) and R.integration == (2,)

    def test_ring_options(self):
        s = parse_program("ring S gens a:1 b:2 trunc 4 relations b^2, a^5 integrate a*b^1*a scale 1/2")
        S = s.rings["S"]
        assert S.relations == ((0, 2), (5, 0))
        assert S.integration == (2, 1) and S.normalization == Fraction(1, 2)

    def test_bundles_and_lines(self):
        s = parse_program("""
            ring R gens a1:1 a2:2 l:1 trunc 3;
            bundle E rank 2 in R gens a1 a2;
            line L in R gen l;
            bundle F rank 3;        # free ring
            line M;
        """)
        assert s.bundles["E"].ring == "R" and s.bundles["F"].ring == FREE_RING
        assert s.lines["L"].expr.gen == "l" and s.lines["M"].expr.gen == "c1_M"

    def test_eval_command(self):
        s = parse_program("bundle E rank 2; eval c(sum(E, dual(E)))")
        [cmd] = s.commands
        assert cmd.verb == "eval"
        assert str(eval_in_session(s, cmd.args["expr"])) == "1 - c1_E^2 + 2*c2_E + c2_E^2"

    def test_scenario(self):
        s = parse_program("""
            scenario k3 {
              variant = branched_cover;
              n = 2; p = 2; c_x = 24; c_y = 3; delta = 4; mu = 4;
              c_l = ?;
            }
            scenario g { variant = generic; orientation = fy_minus_x; c_x = -1/2; c_fy = 1; c_l = 2; k_const = ? }
        """)
        k3 = s.scenarios["k3"]
        assert k3.variant is Variant.BRANCHED_COVER and k3.unknown == "c_l" and k3.c_x == 24
        assert s.scenarios["g"].c_x == Fraction(-1, 2)
        assert s.scenarios["g"].orientation == "fy_minus_x"

    def test_spaces(self):
        s = parse_program("space P = CPn(2); space X = K3; space C = PlaneCurve(4);")
        assert s.spaces["P"].euler == 3
        assert ev(s, "pair(c(2, trivial(1)) + part(2, tangent(P)))") == 3
        assert ev(s, "euler(X) + euler(C)") == 20

    def test_user_preset(self):
        s = parse_program("""
            preset P1xP1 { ring gens a:1 b:1 trunc 2 relations a^2, b^2 integrate a*b;
                           tangent (1 + 2*a)*(1 + 2*b); }
            space Q = P1xP1;
        """)
        assert s.spaces["Q"].euler == 4


class TestExpressions:
    def setup_method(self):
        self.s = parse_program("""
            ring R gens h:1 trunc 2 relations h^3 integrate h^2;
            bundle E rank 2;
            line L;
        """)

    def test_arithmetic(self):
        assert str(ev(self.s, "(1 + h)^3 - 1/2*h^2")) == "1 + 3*h + 5/2*h^2"
        assert str(ev(self.s, "-h^2")) == "-h^2"
        assert ev(self.s, "2^-1 + 1/3") == Fraction(5, 6)
        assert ev(self.s, "pair((1+h)^3)") == 3

    def test_bundle_calls(self):
        assert str(ev(self.s, "c(1, sym(2, dual(E)))")) == "-3*c1_E"
        assert str(ev(self.s, "c(twist(E, L))")) == str(ev(self.s, "c(halftwist(halftwist(E, L), L))"))
        assert str(ev(self.s, "c(tensor(E, E))").component(1)) == str(ev(self.s, "4*c(1, E)"))
        assert str(ev(self.s, "dual(L)")) == "1 - c1_L"

    def test_ring_inference_errors(self):
        with pytest.raises(UnresolvedReference):
            ev(self.s, "h * c(1, E)")     # E lives in the free ring, which has no h
        with pytest.raises(UnknownGenerator):
            ev(self.s, "h * c(1, E)", "R")
        with pytest.raises(EvalError):
            ev(self.s, "c(E) + E")
        with pytest.raises(EvalError):
            ev(self.s, "h^(1/2)")
        with pytest.raises(EvalError):
            ev(self.s, "h / 0")
        with pytest.raises(EvalError):
            ev(self.s, "c(1, 2, E)")
        with pytest.raises(EvalError):
            ev(self.s, "twist(E, E)")

    def test_unresolved(self):
        with pytest.raises(UnresolvedReference):
            ev(self.s, "c(G)")
        with pytest.raises(UnresolvedReference):
            ev(self.s, "frob(E)")


class TestDiagnostics:
    def test_duplicate_at_second(self):
        with pytest.raises(DuplicateIdentifier) as e:
            parse_program("bundle E rank 2;\n  bundle E rank 3;")
        assert (e.value.line, e.value.col) == (2, 10)

    def test_syntax_position(self):
        with pytest.raises(SourceSyntaxError) as e:
            parse_program("ring R gens h:1 trunc 2\nbundle E rank 2;")
        assert (e.value.line, e.value.col) == (2, 1)
        with pytest.raises(SourceSyntaxError) as e:
            parse_program("eval (1 + ;")
        assert e.value.col == 11

    def test_bad_character(self):
        with pytest.raises(SourceSyntaxError) as e:
            tokenize("ring R gens h:1 $")
        assert e.value.col == 17

    def test_unresolved_positions(self):
        with pytest.raises(UnresolvedReference) as e:
            parse_program("bundle E rank 2 in Q;")
        assert (e.value.line, e.value.col) == (1, 20)
        with pytest.raises(UnresolvedReference) as e:
            parse_program("bundle E rank 2;\neval c(F);")
        assert (e.value.line, e.value.col) == (2, 8)
        with pytest.raises(UnresolvedReference):
            parse_program("space P = Grassmannian(2);")

    def test_non_monomial_relation(self):
        with pytest.raises(NonMonomialRelation):
            parse_program("ring R gens h:1 trunc 2 relations h^3 + h;")
        with pytest.raises(NonMonomialRelation):
            parse_program("ring R gens h:1 trunc 2 relations 2*h^3;")
        with pytest.raises(InvalidRingSpec):
            parse_program("ring R gens h:1 trunc 2 integrate h;")

    def test_bundle_generators_checked(self):
        with pytest.raises(UnresolvedReference):
            parse_program("ring R gens h:1 trunc 2; bundle E rank 1 in R;")
        with pytest.raises(EvalError):
            parse_program("ring R gens a:2 trunc 2; bundle E rank 1 in R gens a;")
        with pytest.raises(DuplicateIdentifier):
            parse_program("bundle E rank 1 gens x; line L gen x;")

    def test_scenario_errors(self):
        with pytest.raises(EvalError):
            parse_program("scenario s { n = 1; }")
        with pytest.raises(EvalError):
            parse_program("scenario s { variant = spiral; }")
        with pytest.raises(EvalError):
            parse_program("scenario s { variant = generic; c_x = ?; c_l = ?; }")
        with pytest.raises(DuplicateIdentifier):
            parse_program("scenario s { variant = generic; c_x = 1; c_x = 2; }")
        with pytest.raises(EvalError):
            parse_program("scenario s { variant = generic; wibble = 2; }")

    def test_preset_parameter_ranges(self):
        from charclass.errors import UnknownPreset
        with pytest.raises(UnknownPreset):
            parse_program("space P = CPn(0);")


@given(st.data())
def test_canonical_text_round_trip(data):
    R = data.draw(st.sampled_from([CP3, ABC]))
    a = data.draw(classes(R))
    assert parse_class(str(a), R) == a
    assert str(parse_class(str(a), R)) == str(a)


def test_round_trip_free_ring_names():
    R = RingSpec.create([("c1_E", 1), ("c2_E", 2), ("x10", 1)], truncation=4)
    a = GradedClass(R, {(1, 1, 1): Fraction(-7, 3), (0, 0, 0): 2, (4, 0, 0): Fraction(1, 9)})
    assert parse_class(str(a), R) == a
