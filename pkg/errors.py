"""Exception hierarchy shared by the solvers and the CLI."""


class QLZError(Exception):
    """Base exception for all solver errors."""

    exit_code = 1
    kind = "error"


class ConfigError(QLZError):
    """Invalid run configuration."""

    exit_code = 2
    kind = "config"


class NumericalError(QLZError):
    """A numerical procedure failed to meet its accuracy contract."""

    exit_code = 3
    kind = "numerical"


class PoleError(NumericalError):
    """Gamma function evaluated at a non-positive integer."""
    pass


class SeriesConvergenceError(NumericalError):
    """Maclaurin series hit the term cap before meeting its tolerance."""
    pass


class AsymptoticDomainError(NumericalError):
    """Large-argument expansion requested below its radius of validity."""
    pass


class DegenerateNormalizationError(NumericalError):
    """Sector propagator normalization collapsed."""
    pass


class StepSizeError(NumericalError):
    """Adaptive step controller underflowed or exhausted its step budget."""
    pass


class NormDriftError(NumericalError):
    """Evolution lost normalization beyond tolerance."""
    pass


class OracleConvergenceError(NumericalError):
    """Reference propagation did not converge under step halving."""
    pass


class TruncationError(QLZError):
    """Amplitude left the retained Fock space."""

    exit_code = 4
    kind = "truncation"
