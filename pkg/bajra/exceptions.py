"""Error hierarchy of the verification library.

Every error belongs to one of two families that the CLI maps onto exit
codes: inputs that cannot describe a valid mean or family (exit 2) and
numerical procedures that did not reach their tolerance (exit 1).
"""


class BajraError(Exception):
    exit_code = 1


class InputRejected(BajraError):
    exit_code = 2


class NumericFailure(BajraError):
    exit_code = 1


class InvalidInterval(InputRejected):
    pass


class OutOfDomain(InputRejected):
    pass


class NotIndependent(InputRejected):
    pass


class NotPositive(InputRejected):
    pass


class AnchorNotPositive(InputRejected):
    pass


class NotMonotone(InputRejected):
    pass


class DomainEmpty(InputRejected):
    pass


class DegeneratePair(InputRejected):
    pass


class IncompatibleSolutions(InputRejected):
    pass


class UnknownBuiltin(InputRejected):
    pass


class SpecRejected(InputRejected):
    """A family spec file that does not describe a valid SolutionFamily."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class InversionFailure(NumericFailure):
    pass


class VanishingDerivative(NumericFailure):
    pass


class DenominatorUnderflow(NumericFailure):
    pass


class StencilOutOfDomain(NumericFailure):
    pass


class NonConstantSchwarzian(NumericFailure):
    pass
