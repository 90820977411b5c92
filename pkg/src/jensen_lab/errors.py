"""Exception types raised by jensen_lab."""


class JensenLabError(ValueError):
    """Base class for all library errors."""


class NotHermitian(JensenLabError):
    pass


class DimensionMismatch(JensenLabError):
    pass


class SpectrumOutsideDomain(JensenLabError):
    def __init__(self, eigenvalue, domain):
        self.eigenvalue = float(eigenvalue)
        self.domain = domain
        super().__init__(f"eigenvalue {self.eigenvalue!r} lies outside {domain}")


class SpectrumOutsideUnitInterval(SpectrumOutsideDomain):
    pass


class UnboundedInterval(JensenLabError):
    pass


class NotProjection(JensenLabError):
    pass


class NotCommuting(JensenLabError):
    pass


class NotUnitary(JensenLabError):
    pass


class NotIsometry(JensenLabError):
    pass


class NotContractive(JensenLabError):
    pass


class NotUnital(JensenLabError):
    pass


class NotUnitalOrContractive(JensenLabError):
    pass


class ZeroNotInDomain(JensenLabError):
    pass


class NotInCentralizer(JensenLabError):
    pass


class AllMassZero(JensenLabError):
    pass


class NotUnitalField(JensenLabError):
    pass


class EvaluationFailure(JensenLabError):
    pass


class FormatError(JensenLabError):
    """Malformed JSON input; ``field`` names the offending entry."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
