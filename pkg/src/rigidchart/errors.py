"""Exception types raised across the package."""


class RigidChartError(Exception):
    pass


class InvalidInputError(RigidChartError, ValueError):
    pass


class ChartBoundaryError(RigidChartError):
    """The rotation angle is at (or too close to) pi, where the chart ends.

    ``axis`` carries the rotation axis when it could be determined; at the
    boundary its sign is ambiguous.
    """

    def __init__(self, message, axis=None):
        super().__init__(message)
        self.axis = axis


class DegenerateMapError(RigidChartError):
    pass


class StiffnessError(RigidChartError):
    pass


class SeriesDivergenceWarning(RuntimeWarning):
    pass
