"""Exception hierarchy shared by all modules."""


class SymwaveError(Exception):
    """Base class for every error raised by the package."""


# lattice
class NotExpanding(SymwaveError):
    pass


class Unimodular(SymwaveError):
    pass


class NotAxialAdmissible(SymwaveError):
    pass


class NotAGroup(SymwaveError):
    pass


class NotCompatibleWithM(SymwaveError):
    pass


class DigitNotStable(SymwaveError):
    def __init__(self, E, j, msg=None):
        self.E = E
        self.j = j
        super().__init__(msg or f"digit {j} is not stable under {E}")


# laurent
class DimMismatch(SymwaveError):
    pass


class OffsetMismatch(SymwaveError):
    pass


class SurdMismatch(SymwaveError):
    pass


class IrrationalValue(SymwaveError):
    pass


class OffsetNotRepresentable(SymwaveError):
    pass


# theta
class FlavorParityViolation(SymwaveError):
    pass


class SingularSupport(SymwaveError):
    pass


# polyphase
class NonIntegerOffset(SymwaveError):
    pass


# maskgen / dualgen
class ParityViolation(SymwaveError):
    pass


class GeneratorOffsetMismatch(SymwaveError):
    pass


class PerturbationParityViolation(SymwaveError):
    pass


class OrderViolation(SymwaveError):
    pass


class OffsetNotPreserved(SymwaveError):
    pass


class NotNormalized(SymwaveError):
    pass


class TrivialDualInvalid(SymwaveError):
    pass


class VerificationFailed(SymwaveError):
    """A builder produced an object that failed its own exact re-check."""


# extension
class ContextMismatch(SymwaveError):
    pass


class SymmetryPreconditionFailed(SymwaveError):
    pass


# verify
class Singular(SymwaveError):
    pass


# transform / io
class BankInvalid(SymwaveError):
    pass


class NonFiniteSamples(SymwaveError):
    pass
