class GVDError(Exception):
    """Base class for all errors raised by gvd."""


class InvalidInputError(GVDError, ValueError):
    pass


class ParseError(InvalidInputError):
    pass


class InfeasibleSystemError(GVDError):
    """The admissible sphere family is empty."""


class DegenerateInputError(GVDError):
    pass


class UnsupportedError(GVDError):
    pass
