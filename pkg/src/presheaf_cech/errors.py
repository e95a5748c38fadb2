"""Exception hierarchy shared across the package."""


class PresheafCechError(Exception):
    """Base class for all errors raised by this package."""


class WellDefinednessError(PresheafCechError):
    """A map on quotients was requested but the relations are not respected."""


class InconsistentDiagramError(PresheafCechError):
    """Two paths through a diagram compose to different matrices."""


class InvalidSiteError(PresheafCechError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid site")


class FunctorialityError(PresheafCechError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class NaturalityError(PresheafCechError):
    pass


class PreconditionError(PresheafCechError):
    """Hypotheses of a claim do not hold for the given instance."""


class BudgetExceeded(PresheafCechError):
    def __init__(self, message, stats=None):
        self.stats = dict(stats or {})
        super().__init__(message)
