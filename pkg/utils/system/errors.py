# ===== Error Types =====
# Validation errors map to exit code 2, everything else to exit code 3.


class PairOrbitsError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(PairOrbitsError, ValueError):
    pass


class ConfigError(ValidationError):
    pass


class DegenerateMomentum(ValidationError):
    """x0 = y0 = 0, i.e. a = 0, which the elliptic reduction cannot handle."""


class NonPositiveCoupling(ValidationError):
    pass


class CoulombSingularity(PairOrbitsError):
    """The two particles (or the relative particle and the Coulomb centre) coincide."""


class OutsideAllowedRegion(PairOrbitsError):
    pass


class ForbiddenRegion(PairOrbitsError):
    pass


class StepFailure(PairOrbitsError):
    pass


class EmptyPlot(PairOrbitsError):
    pass


EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def exit_code_for(error):
    if isinstance(error, ValidationError):
        return EXIT_VALIDATION
    return EXIT_RUNTIME
