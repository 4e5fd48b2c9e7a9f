"""Exception hierarchy shared by every charclass module."""


class CharclassError(Exception):
    """Base class; ``module`` names the subsystem that raised it."""

    module = "charclass"


# graded_ring

class RingError(CharclassError):
    module = "graded_ring"


class RingMismatch(RingError):
    pass


class InvalidRingSpec(RingError):
    pass


class NonMonomialRelation(InvalidRingSpec):
    pass


class UnknownGenerator(RingError):
    pass


class DegreeMismatch(RingError):
    pass


# bundles

class BundleError(CharclassError):
    module = "bundles"


class SymRankTooLarge(BundleError):
    pass


class RankViolation(BundleError):
    pass


# degeneracy

class DegeneracyError(CharclassError):
    module = "degeneracy"


class InvalidRankBound(DegeneracyError):
    pass


class BoundViolated(DegeneracyError):
    pass


# schubert

class SchubertError(CharclassError):
    module = "schubert"


class InvalidPermutation(SchubertError):
    pass


class IndexOutOfRange(SchubertError):
    pass


# rh_check

class ScenarioError(CharclassError):
    module = "rh_check"
    tag = "ERROR"


class InvalidScenario(ScenarioError):
    tag = "INVALID"


class Unsolvable(ScenarioError):
    tag = "UNSOLVABLE"


class NonIntegral(ScenarioError):
    tag = "NONINTEGRAL"

    def __init__(self, slot, value):
        super().__init__(f"{slot}={value} must be integral")
        self.slot = slot
        self.value = value


class OutOfRange(ScenarioError):
    tag = "OUT_OF_RANGE"


class InequalityViolated(ScenarioError):
    tag = "INEQUALITY_VIOLATED"


# cli / catalog

class ParseError(CharclassError):
    """Diagnostic anchored at a 1-based ``line``/``col`` of the source text."""

    module = "cli"

    def __init__(self, message, line=0, col=0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}" if line else message)


class SourceSyntaxError(ParseError):
    pass


class DuplicateIdentifier(ParseError):
    pass


class UnresolvedReference(ParseError):
    pass


class EvalError(ParseError):
    pass


class UnknownPreset(CharclassError):
    module = "examples_catalog"


class UsageError(CharclassError):
    """Bad command-line arguments."""

    module = "cli"
