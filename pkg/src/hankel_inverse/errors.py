"""Exception hierarchy.

Everything raised on purpose by this package derives from ``HankelInverseError``.
Input problems with the target spectra derive from ``SpectrumValidationError``
so callers (and the CLI exit-code mapping) can tell bad data apart from
numerical failures further down the pipeline.
"""

from __future__ import annotations


class HankelInverseError(Exception):
    pass


class SpectrumValidationError(HankelInverseError, ValueError):
    pass


class LengthMismatch(SpectrumValidationError):
    pass


class NonFiniteValue(SpectrumValidationError):
    pass


class ZeroLambda(SpectrumValidationError):
    pass


class ZeroMuInInfiniteMode(SpectrumValidationError):
    pass


class InterlacingViolation(SpectrumValidationError):
    def __init__(self, index: int, message: str):
        super().__init__(message)
        self.index = index


class BadDecayParameters(SpectrumValidationError):
    pass


class DegenerateGap(HankelInverseError, ArithmeticError):
    pass


class PoleEvaluation(HankelInverseError, ZeroDivisionError):
    pass


class DivisionDegenerate(HankelInverseError, ZeroDivisionError):
    pass


class EigenvalueMismatch(HankelInverseError, ArithmeticError):
    def __init__(self, index: int, deviation: float, message: str):
        super().__init__(message)
        self.index = index
        self.deviation = deviation


class NotSymmetric(HankelInverseError, ValueError):
    pass


class ConvergenceFailure(HankelInverseError, ArithmeticError):
    pass


class TailNotCertified(HankelInverseError, ArithmeticError):
    pass


class InsufficientCoefficients(HankelInverseError, ValueError):
    pass


class TooSmall(HankelInverseError, ValueError):
    pass
