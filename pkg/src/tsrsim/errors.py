"""Exception types raised by the simulator."""


class TsrError(Exception):
    """Base class for all model errors."""


class InvalidParameterError(TsrError, ValueError):
    pass


class DegenerateError(TsrError):
    """A cavity resonance denominator vanished (unit reflectivities on resonance)."""

    def __init__(self, message, frequency=None):
        if frequency is not None:
            message = f"{message} (at {frequency:.9g} Hz)"
        super().__init__(message)
        self.frequency = frequency


class NonPassiveError(TsrError):
    pass


class IsotropicError(TsrError):
    pass


class NoDoubletError(TsrError):
    pass


class NoPeaksError(TsrError):
    pass


class UnidentifiableError(TsrError):
    pass
