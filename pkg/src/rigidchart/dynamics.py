"""Free rigid body in four phase-space coordinate systems.

``n-pi``           chart coordinate n and its canonical momentum pi
``n-m``            n and the (spatial) angular momentum m
``n-omega``        n and the angular velocity in the body Omega
``euler-poisson``  the rotation matrix R and Omega
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

from .chart import (EPS, _mat3, _vec3, a_matrix, a_tilde, hat,
                    rotation_matrix, rotation_vector)
from .errors import InvalidInputError

SYSTEMS = ("n-pi", "n-m", "n-omega", "euler-poisson")


class InertiaTensor:
    """Symmetric positive-definite inertia with physical principal moments.

    Build it from a full matrix, or with :meth:`from_principal` from
    principal moments and an optional orientation (columns are the principal
    axes). The full matrix is what gets stored.
    """

    def __init__(self, matrix):
        I = _mat3(matrix, "inertia")
        scale = max(1.0, np.abs(I).max())
        if np.abs(I - I.T).max() > 1e-12 * scale:
            raise InvalidInputError("inertia tensor is not symmetric")
        I = 0.5 * (I + I.T)
        moments = np.linalg.eigvalsh(I)
        if moments.min() <= 0.0:
            raise InvalidInputError(f"inertia tensor is not positive definite: {moments}")
        a, b, c = moments
        if a + b < c - 1e-12 * scale:
            raise InvalidInputError(
                f"principal moments {moments} violate the triangle inequality")
        self.matrix = I
        self.inverse = np.linalg.inv(I)
        self.moments = moments

    @classmethod
    def from_principal(cls, moments, orientation=None):
        moments = _vec3(moments, "principal moments")
        if orientation is None:
            return cls(np.diag(moments))
        Q = _mat3(orientation, "orientation")
        if np.abs(Q.T @ Q - np.eye(3)).max() > 1e-9:
            raise InvalidInputError("orientation is not orthogonal")
        return cls(Q @ np.diag(moments) @ Q.T)

    def __repr__(self):
        return f"InertiaTensor({self.matrix.tolist()!r})"


def _inertia(I) -> InertiaTensor:
    return I if isinstance(I, InertiaTensor) else InertiaTensor(I)


@dataclass(frozen=True)
class CanonicalState:
    n: np.ndarray
    pi: np.ndarray
    system: ClassVar[str] = "n-pi"
    field_names: ClassVar[tuple] = ("n1", "n2", "n3", "pi1", "pi2", "pi3")

    def __post_init__(self):
        object.__setattr__(self, "n", _vec3(self.n, "n"))
        object.__setattr__(self, "pi", _vec3(self.pi, "pi"))

    def to_array(self):
        return np.concatenate([self.n, self.pi])

    @classmethod
    def from_array(cls, z):
        return cls(z[:3], z[3:6])


@dataclass(frozen=True)
class MomentumState:
    n: np.ndarray
    m: np.ndarray
    system: ClassVar[str] = "n-m"
    field_names: ClassVar[tuple] = ("n1", "n2", "n3", "m1", "m2", "m3")

    def __post_init__(self):
        object.__setattr__(self, "n", _vec3(self.n, "n"))
        object.__setattr__(self, "m", _vec3(self.m, "m"))

    def to_array(self):
        return np.concatenate([self.n, self.m])

    @classmethod
    def from_array(cls, z):
        return cls(z[:3], z[3:6])


@dataclass(frozen=True)
class BodyRateState:
    n: np.ndarray
    omega: np.ndarray
    system: ClassVar[str] = "n-omega"
    field_names: ClassVar[tuple] = ("n1", "n2", "n3", "omega1", "omega2", "omega3")

    def __post_init__(self):
        object.__setattr__(self, "n", _vec3(self.n, "n"))
        object.__setattr__(self, "omega", _vec3(self.omega, "omega"))

    def to_array(self):
        return np.concatenate([self.n, self.omega])

    @classmethod
    def from_array(cls, z):
        return cls(z[:3], z[3:6])


@dataclass(frozen=True)
class EulerPoissonState:
    R: np.ndarray
    omega: np.ndarray
    system: ClassVar[str] = "euler-poisson"
    field_names: ClassVar[tuple] = tuple(
        f"R{i}{j}" for i in range(1, 4) for j in range(1, 4)) + ("omega1", "omega2", "omega3")

    def __post_init__(self):
        object.__setattr__(self, "R", _mat3(self.R, "R"))
        object.__setattr__(self, "omega", _vec3(self.omega, "omega"))

    def to_array(self):
        return np.concatenate([self.R.ravel(), self.omega])

    @classmethod
    def from_array(cls, z):
        return cls(np.reshape(z[:9], (3, 3)), z[9:12])


PhaseState = Union[CanonicalState, MomentumState, BodyRateState, EulerPoissonState]

STATE_TYPES = {cls.system: cls for cls in
               (CanonicalState, MomentumState, BodyRateState, EulerPoissonState)}


# ---------------------------------------------------------------- (n, pi)

def hamiltonian_canonical(s: CanonicalState, I) -> float:
    """H = 1/8 (At pi)^T I^{-1} (At pi)."""
    I = _inertia(I)
    v = a_tilde(s.n) @ s.pi
    return 0.125 * float(v @ I.inverse @ v)


def canonical_field(s: CanonicalState, I):
    """Hamilton's equations for (n, pi); returns ``(ndot, pidot)``."""
    I = _inertia(I)
    n, pi = s.n, s.pi
    At = a_tilde(n)
    u = I.inverse @ (At @ pi)
    ndot = 0.25 * At.T @ u
    # -dH/dn_i = -1/4 [delta_ij (n.pi) + pi_i n_j + eps_ijk pi_k] u_j
    pidot = -0.25 * ((n @ pi) * u + (n @ u) * pi + np.cross(u, pi))
    return ndot, pidot


def hamiltonian_canonical_gradient(s: CanonicalState, I):
    """(dH/dn, dH/dpi) as one 6-vector."""
    ndot, pidot = canonical_field(s, I)
    return np.concatenate([-pidot, ndot])


def momentum_map(s: CanonicalState) -> np.ndarray:
    """m = 1/2 At^T pi = 1/2 (pi + (n.pi) n - pi x n). Never reads the inertia."""
    n, pi = s.n, s.pi
    return 0.5 * (pi + (n @ pi) * n - np.cross(pi, n))


def momentum_inverse(n, m) -> np.ndarray:
    """pi = 2 A^T m."""
    return 2.0 * a_matrix(n).T @ _vec3(m, "m")


# ----------------------------------------------------------------- (n, m)

def hamiltonian_momentum(s: MomentumState, I) -> float:
    """H = 1/2 m^T R I^{-1} R^T m."""
    I = _inertia(I)
    M = rotation_matrix(s.n).T @ s.m
    return 0.5 * float(M @ I.inverse @ M)


def momentum_field(s: MomentumState, I):
    I = _inertia(I)
    ndot = 0.5 * a_tilde(s.n).T @ I.inverse @ rotation_matrix(s.n).T @ s.m
    return ndot, np.zeros(3)


# ------------------------------------------------------------- (n, Omega)

def hamiltonian_body(s, I) -> float:
    """H = 1/2 Omega^T I Omega; accepts any state carrying ``omega``."""
    I = _inertia(I)
    return 0.5 * float(s.omega @ I.matrix @ s.omega)


def euler_rate(omega, I) -> np.ndarray:
    """Solve I Omegadot = (I Omega) x Omega."""
    I = _inertia(I)
    return I.inverse @ np.cross(I.matrix @ omega, omega)


def body_field(s: BodyRateState, I):
    return 0.5 * a_tilde(s.n).T @ s.omega, euler_rate(s.omega, I)


# --------------------------------------------------------- (R, Omega)

def euler_poisson_field(s: EulerPoissonState, I):
    """Rdot_ij = -eps_jkm Omega_k R_im, i.e. Rdot = R hat(Omega)."""
    return s.R @ hat(s.omega), euler_rate(s.omega, I)


def euler_poisson_field_indexed(s: EulerPoissonState, I):
    """Same as :func:`euler_poisson_field`, written index by index."""
    Rdot = -np.einsum("jkm,k,im->ij", EPS, s.omega, s.R)
    return Rdot, euler_rate(s.omega, I)


# ------------------------------------------------------------ conversions

def attitude(s: PhaseState) -> np.ndarray:
    return s.R if isinstance(s, EulerPoissonState) else rotation_matrix(s.n)


def body_rate(s: PhaseState, I) -> np.ndarray:
    """Omega for any state."""
    if isinstance(s, (BodyRateState, EulerPoissonState)):
        return s.omega
    I = _inertia(I)
    if isinstance(s, CanonicalState):
        return 0.5 * I.inverse @ (a_tilde(s.n) @ s.pi)
    if isinstance(s, MomentumState):
        return I.inverse @ rotation_matrix(s.n).T @ s.m
    raise TypeError(f"not a phase state: {s!r}")


def spatial_momentum(s: PhaseState, I) -> np.ndarray:
    """m = R I Omega."""
    if isinstance(s, MomentumState):
        return s.m
    if isinstance(s, CanonicalState):
        return momentum_map(s)
    I = _inertia(I)
    return attitude(s) @ I.matrix @ body_rate(s, I)


def energy(s: PhaseState, I) -> float:
    if isinstance(s, CanonicalState):
        return hamiltonian_canonical(s, I)
    if isinstance(s, MomentumState):
        return hamiltonian_momentum(s, I)
    return hamiltonian_body(s, I)


def energy_forms(R, omega, I):
    """The kinetic energy written through Omega, m, spatial omega and M."""
    I = _inertia(I)
    m = R @ I.matrix @ omega
    w = R @ omega
    M = I.matrix @ omega
    return (0.5 * omega @ I.matrix @ omega,
            0.5 * m @ R @ I.inverse @ R.T @ m,
            0.5 * w @ R @ I.matrix @ R.T @ w,
            0.5 * M @ I.inverse @ M)


def from_body_rate(n_or_R, omega, target: str, I) -> PhaseState:
    """Build a state of system ``target`` from attitude data and Omega."""
    omega = _vec3(omega, "omega")
    if target == "euler-poisson":
        R = n_or_R if np.ndim(n_or_R) == 2 else rotation_matrix(n_or_R)
        return EulerPoissonState(R, omega)
    n = rotation_vector(n_or_R) if np.ndim(n_or_R) == 2 else _vec3(n_or_R, "n")
    if target == "n-omega":
        return BodyRateState(n, omega)
    I = _inertia(I)
    if target == "n-pi":
        return CanonicalState(n, 2.0 * a_matrix(n) @ I.matrix @ omega)
    if target == "n-m":
        return MomentumState(n, rotation_matrix(n) @ I.matrix @ omega)
    raise InvalidInputError(f"unknown coordinate system {target!r}; expected one of {SYSTEMS}")


def convert(s: PhaseState, target: str, I=None) -> PhaseState:
    """Explicit change of phase-space coordinates.

    Going from ``euler-poisson`` to a chart system computes n from R and
    raises :class:`ChartBoundaryError` near the angle pi.
    """
    if target not in SYSTEMS:
        raise InvalidInputError(f"unknown coordinate system {target!r}; expected one of {SYSTEMS}")
    if s.system == target:
        return s
    if s.system == "n-pi" and target == "n-m":
        return MomentumState(s.n, momentum_map(s))
    if s.system == "n-m" and target == "n-pi":
        return CanonicalState(s.n, momentum_inverse(s.n, s.m))
    omega = body_rate(s, I)
    base = s.R if isinstance(s, EulerPoissonState) else s.n
    return from_body_rate(base, omega, target, I)
