"""A Python module for managing any nearid errors."""


class NearIdError(Exception):
    """Base class for nearid errors"""


class DimensionError(NearIdError):
    """Error raised when a point or matrix does not match the map's dimension."""

    pass


class InversionError(NearIdError):
    """Error raised when an inverse solver does not reach its tolerance."""

    def __init__(self, message, residual):
        msg = ("{m}\nThe final residual was: {r:.3e}").format(m=message, r=residual)
        self.residual = residual
        super(InversionError, self).__init__(msg)


class LayerError(NearIdError):
    """Error raised when a layer of a composition fails to evaluate."""

    def __init__(self, message, index):
        msg = ("{m}\nThe failing layer was: {i}").format(m=message, i=index)
        self.index = index
        super(LayerError, self).__init__(msg)


class ConditioningError(NearIdError):
    """Error raised when a matrix is singular or too badly conditioned to factor."""

    pass


class ConstantsError(NearIdError):
    """Error raised when smoothness or inverse-Lipschitz constants are invalid
    or cannot be derived for a map family.
    """

    pass


class ScheduleError(NearIdError):
    """Error raised when decomposition schedule parameters are out of range."""

    pass


class RegimeError(NearIdError):
    """Error raised when an operation needs near-identity layers (deviation < 1)
    and does not get them.
    """

    pass


class DatasetError(NearIdError):
    """Error raised when a dataset is empty or malformed."""

    pass


class ConfigError(NearIdError):
    """Error raised when an experiment config fails schema validation."""

    pass


class RejectionError(NearIdError):
    """Base class for mathematically expected rejections of an input."""


class OrientationError(RejectionError):
    """Error raised when a Jacobian has a non-positive determinant."""

    pass


class InfeasibleScheduleError(RejectionError):
    """Error raised when no feasible schedule exists for the requested m and epsilon."""

    def __init__(self, message, schedule):
        msg = ("{m}\nThe smallest feasible layer count is: {n}").format(
            m=message, n=schedule.min_feasible_m
        )
        self.schedule = schedule
        super(InfeasibleScheduleError, self).__init__(msg)


class IdentityTargetError(RejectionError):
    """Error raised when a target network computes the identity function."""

    pass


class VerdictError(NearIdError):
    """Error raised when an experiment report fails its own checks."""

    def __init__(self, message, report):
        msg = ("{m}\nThe failed checks were: {r}").format(m=message, r=report.failures())
        self.report = report
        super(VerdictError, self).__init__(msg)
