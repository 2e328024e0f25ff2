"""Exception hierarchy.

Validation problems (bad input, violated preconditions) derive from
:class:`ValidationError`; failures of the numerics themselves derive from
:class:`NumericError`. The CLI maps the two families to exit codes 1 and 2.
"""


class QWalkError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(QWalkError, ValueError):
    pass


class NumericError(QWalkError, ArithmeticError):
    pass


class NonSquare(ValidationError):
    pass


class NonUnitary(ValidationError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(
            f"coin is not unitary: residual max|A^H A - I| = {residual:.3e} (tolerance 1e-12)"
        )


class UnknownFamily(ValidationError):
    pass


class ParamOutOfRange(ValidationError):
    pass


class NormError(ValidationError):
    pass


class DimMismatch(ValidationError):
    pass


class NegativeSteps(ValidationError):
    pass


class GridTooSmall(ValidationError):
    pass


class WrongCoinDim(ValidationError):
    pass


class EvalOutsideSupport(ValidationError):
    pass


class SolverFailure(NumericError):
    pass


class DegenerateBranch(NumericError):
    pass


class AllNodesDegenerate(NumericError):
    pass
