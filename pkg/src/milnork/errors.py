"""Exception hierarchy shared by every module of the package."""


class MilnorError(Exception):
    """Base class for all package errors."""


class DescriptorMismatch(MilnorError):
    pass


class DivisionByZero(MilnorError, ZeroDivisionError):
    pass


class RootNotAvailable(MilnorError):
    pass


class ParseError(MilnorError, ValueError):
    pass


class SideConditionViolated(MilnorError):
    def __init__(self, rule, detail):
        super().__init__(f"{rule}: {detail}")
        self.rule = rule
        self.detail = detail


class IndexOutOfRange(MilnorError, IndexError):
    pass


class ModulusMismatch(MilnorError):
    pass


class FieldNotRationals(MilnorError):
    pass


class DimensionMismatch(MilnorError, ValueError):
    pass


class DegenerateSample(MilnorError):
    pass


class ZeroVector(MilnorError, ValueError):
    pass


class WitnessInvalid(MilnorError):
    pass


class DegenerateWitness(WitnessInvalid):
    """A witness is valid but hits a zero partial sum or zero value mid-algorithm."""


class BothZero(WitnessInvalid):
    pass


class MissingWitness(MilnorError):
    def __init__(self, request):
        super().__init__(f"missing witness: {request}")
        self.request = request


class OutOfRange(MilnorError, ValueError):
    pass


class CheckFailed(MilnorError):
    def __init__(self, which, detail=""):
        super().__init__(f"check failed: {which}" + (f" ({detail})" if detail else ""))
        self.which = which


class SubDecompositionInvalid(MilnorError):
    pass
