"""Exception hierarchy. Each error carries the CLI exit code it maps to."""


class RelkError(Exception):
    exit_code = 1


class NotHermitian(RelkError):
    pass


class NoConvergence(RelkError):
    pass


class SingularOnSupport(RelkError):
    pass


class NotIdempotent(RelkError):
    pass


class NotProjection(RelkError):
    pass


class NotUnitary(RelkError):
    pass


class NotPartialIsometry(RelkError):
    pass


class AlgebraMismatch(RelkError):
    pass


class DomainMismatch(RelkError):
    pass


class EndpointMismatch(RelkError):
    pass


class HomMismatch(RelkError):
    pass


class LadderInvalid(RelkError):
    pass


class Overflow(RelkError):
    pass


class NotComposable(RelkError):
    pass


class HypothesisViolated(RelkError):
    pass


class NotZeroHom(RelkError):
    pass


class ScalarClassMismatch(RelkError):
    pass


class StepTooCoarse(RelkError):
    pass


class NotInKernel(RelkError):
    pass


class ResolutionError(RelkError):
    exit_code = 2


class NotComputable(RelkError):
    exit_code = 3


class NotFiniteDimensional(NotComputable):
    pass


class LiftInvalid(RelkError):
    exit_code = 4


class CertificateInvalid(RelkError):
    exit_code = 4
