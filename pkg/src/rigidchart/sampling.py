"""Random sample points for property sweeps.

Chart points are uniform in the ball |n| <= 3, momenta and body rates
uniform in [-2, 2]^3, inertia moments uniform in [0.5, 3] (redrawn until the
triangle inequality holds) with a uniformly random orientation.
"""
import numpy as np
from scipy.spatial.transform import Rotation

from .dynamics import InertiaTensor

N_RADIUS = 3.0
MOMENTUM_BOX = 2.0
MOMENT_RANGE = (0.5, 3.0)


def rotation_vector_in_ball(rng, radius=N_RADIUS):
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    return radius * rng.uniform() ** (1.0 / 3.0) * d


def rotation_vector_log_radius(rng, rmin=1e-6, rmax=1e3):
    """Uniform direction, log-uniform |n| in [rmin, rmax]."""
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    return np.exp(rng.uniform(np.log(rmin), np.log(rmax))) * d


def momentum_in_box(rng, half_width=MOMENTUM_BOX):
    return rng.uniform(-half_width, half_width, size=3)


def principal_moments(rng, low=MOMENT_RANGE[0], high=MOMENT_RANGE[1]):
    while True:
        a, b, c = np.sort(rng.uniform(low, high, size=3))
        if a + b >= c:
            return np.array([a, b, c])


def inertia(rng, diagonal=False):
    moments = principal_moments(rng)
    if diagonal:
        return InertiaTensor.from_principal(moments)
    Q = Rotation.random(random_state=rng).as_matrix()
    return InertiaTensor.from_principal(moments, Q)
