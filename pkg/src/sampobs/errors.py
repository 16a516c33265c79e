"""Exception types shared across the package.

Scheme precondition failures derive from :class:`SchemeError` so callers
(and the CLI exit-code mapping) can catch them as one family.
"""


class SampobsError(Exception):
    """Base class for all package errors."""


class ValidationError(SampobsError):
    """A system violates a standing assumption."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class DegeneratePair(SampobsError, ValueError):
    """Two eigenvalues handed to pair analysis are the same number."""


class DimensionMismatch(SampobsError, ValueError):
    pass


class InconsistentSamples(SampobsError):
    """Samples cannot come from the system: residual too large at full rank."""


class NotApplicable(SampobsError):
    """A check was requested on a system outside its hypotheses."""


class SchemeError(SampobsError):
    """A sampling scheme's precondition does not hold."""


class WrongDimension(SchemeError):
    pass


class NotRealSpectrum(SchemeError):
    pass


class InsufficientCandidates(SchemeError):
    pass


class PathologicalSpacing(SchemeError):
    pass


class PathologicalDelta(SchemeError):
    pass


class ConditionCCAViolated(SchemeError):
    pass


class NotWorstCaseSystem(SchemeError, NotApplicable):
    pass
