"""Exception types raised by the metrology pipeline."""


class MetrologyError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(MetrologyError, ValueError):
    pass


class CouplingOutOfRange(MetrologyError, ValueError):
    """The effective coupling came out >= 1, outside the perturbative formula's range."""


class DegenerateTemperature(MetrologyError, ValueError):
    pass


class NotHermitian(MetrologyError, ValueError):
    pass


class InvalidDensityMatrix(MetrologyError, ValueError):
    pass


class StepTooLarge(MetrologyError, ValueError):
    pass


class InvalidPovm(MetrologyError, ValueError):
    pass


class NotXState(MetrologyError, ValueError):
    pass
