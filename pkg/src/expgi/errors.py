"""Exception hierarchy for the expgi package."""


class ExpgiError(Exception):
    """Base class for all package-specific errors."""


class TableLoadError(ExpgiError):
    """Index table file is missing, malformed, or violates an invariant."""


class TableQueryError(ExpgiError):
    """Index lookup outside the tabulated domain (discount or count)."""


class ConfigError(ExpgiError):
    """Scenario configuration file is invalid; message names the field."""


class DegenerateDataError(ExpgiError):
    """Data cannot support the requested computation (e.g. zero-sum control
    group in a ratio test, or an arm that received no participants)."""


class OracleConvergenceError(ExpgiError):
    """Index bisection failed to bracket or converge within its caps."""
