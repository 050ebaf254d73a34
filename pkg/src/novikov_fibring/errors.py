"""Exception hierarchy shared by all modules.

Every error carries a short machine-readable ``code`` so the command line
driver can report failures without parsing messages.
"""


class NovikovError(Exception):
    code = "error"


class PresentationSyntaxError(NovikovError):
    code = "syntax"

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class DuplicateGenerator(NovikovError):
    code = "duplicate-generator"


class UndeclaredGenerator(NovikovError):
    code = "undeclared-generator"


class NonzeroOnRelator(NovikovError):
    code = "nonzero-on-relator"

    def __init__(self, relator, value):
        self.relator = relator
        self.value = value
        super().__init__(f"character takes value {value} on relator {relator}")


class ZeroCharacter(NovikovError):
    code = "zero-character"


class BudgetExhausted(NovikovError):
    code = "budget-exhausted"


class NotConfluent(NovikovError):
    code = "not-confluent"


class NotAUnit(NovikovError):
    code = "not-a-unit"


class DenominatorDivisible(NovikovError):
    code = "denominator-divisible"


class InsufficientPrecision(NovikovError):
    code = "insufficient-precision"

    def __init__(self, required, available):
        self.required = required
        self.available = available
        super().__init__(f"need precision {required}, inputs only support {available}")


class NonMonomialLeadingTerm(NovikovError):
    code = "non-monomial-leading-term"


class NotPositiveSupport(NovikovError):
    code = "not-positive-support"


class NotAComplex(NovikovError):
    code = "not-a-complex"


class ResolutionFormatError(NovikovError):
    code = "resolution-format"


class ShapeMismatch(NovikovError):
    code = "shape-mismatch"


class NotACocycle(NovikovError):
    code = "not-a-cocycle"


class UnverifiedInput(NovikovError):
    code = "unverified-input"


class NoCharacters(NovikovError):
    code = "no-characters"


class OracleNotApplicable(NovikovError):
    code = "oracle-not-applicable"


class NotOneRelator(OracleNotApplicable):
    code = "not-one-relator"


class NotFreeAbelian(OracleNotApplicable):
    code = "not-free-abelian"


class AssumptionMissing(NovikovError):
    code = "assumption-missing"
