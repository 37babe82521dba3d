class DomainError(ValueError):
    """A parameter lies outside the domain of the requested quantity.

    ``param`` names the offending argument so front ends can report it.
    """

    def __init__(self, param, message):
        super().__init__(f"{param}: {message}")
        self.param = param


class NumericalError(ArithmeticError):
    """A numerical consistency check failed (pairing, radicand sign, ...)."""


class SingularBlockError(NumericalError):
    pass


class NonMonotoneError(NumericalError):
    pass
