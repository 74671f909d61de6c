"""Free rigid-body dynamics in the rotation-vector chart of SO(3)."""
from .chart import (AxisAngle, a_matrix, a_tilde, axis_angle_from_rotation,
                    body_angular_velocity, inverse_metric, metric, rotation_from_axis_angle,
                    rotation_matrix, rotation_vector, rotation_vector_from_axis_angle)
from .dynamics import (BodyRateState, CanonicalState, EulerPoissonState, InertiaTensor,
                       MomentumState, convert)
from .errors import (ChartBoundaryError, DegenerateMapError, InvalidInputError,
                     RigidChartError, SeriesDivergenceWarning, StiffnessError)
from .flows import (LieSeriesConfig, StepControl, Trajectory, compare_formulations,
                    integrate, lie_series_flow)

__version__ = "0.1.0"
