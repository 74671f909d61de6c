"""Poisson structures of the free rigid body and their numerical checks.

Phase points are 6-vectors ``z = (n, p)`` where ``p`` is pi, m or Omega
depending on the coordinate system. A Poisson matrix ``J`` gives the
brackets ``{z_a, z_b} = J[a, b]`` and ``{f, g} = grad(f) . J . grad(g)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .chart import EPS, a_tilde, hat
from .dynamics import (CanonicalState, _inertia, hamiltonian_canonical,
                       hamiltonian_canonical_gradient, momentum_map)
from .errors import DegenerateMapError, RigidChartError

FD_STEP = 1e-6
JACOBI_STEP = 1e-5
MAX_CONDITION = 1e12


@dataclass
class PoissonMatrix:
    matrix: np.ndarray
    labels: tuple = ("n", "pi")
    cond: Optional[float] = None

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.shape != (6, 6):
            raise ValueError(f"Poisson matrix must be 6x6, got {self.matrix.shape}")

    def antisymmetry_residual(self) -> float:
        return float(np.abs(self.matrix + self.matrix.T).max())


@dataclass
class Observable:
    """Scalar phase-space function, optionally with an analytic gradient."""

    func: Callable[[np.ndarray], float]
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __call__(self, z):
        return self.func(np.asarray(z, dtype=float))

    def gradient(self, z, step=FD_STEP):
        z = np.asarray(z, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(z), dtype=float)
        return finite_difference_gradient(self.func, z, step)


@dataclass
class ResidualRecord:
    """One check outcome.

    ``bound`` is ``"upper"`` (pass if residual < tolerance), ``"lower"``
    (pass if residual >= tolerance) or ``"zero"`` (pass if residual == 0).
    """

    check: str
    point: np.ndarray
    residual: float
    tolerance: float
    bound: str = "upper"
    passed: bool = field(init=False)

    def __post_init__(self):
        r = float(self.residual)
        self.residual = r
        if self.bound == "upper":
            self.passed = r < self.tolerance
        elif self.bound == "lower":
            self.passed = r >= self.tolerance
        elif self.bound == "zero":
            self.passed = r == 0.0
        else:
            raise ValueError(f"unknown bound {self.bound!r}")


def finite_difference_gradient(f, z, step=FD_STEP):
    g = np.empty(len(z))
    for a in range(len(z)):
        e = np.zeros(len(z))
        e[a] = step
        g[a] = (f(z + e) - f(z - e)) / (2.0 * step)
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("finite-difference gradient overflowed")
    return g


def numeric_jacobian(fmap, z, step=FD_STEP):
    """d fmap / dz by central differences; rows index outputs."""
    z = np.asarray(z, dtype=float)
    cols = []
    for a in range(len(z)):
        e = np.zeros(len(z))
        e[a] = step
        cols.append((np.asarray(fmap(z + e)) - np.asarray(fmap(z - e))) / (2.0 * step))
    return np.array(cols).T


def cyclic_tensor(n):
    """T_ijk = nhat_ij n_k + nhat_jk n_i + nhat_ki n_j with nhat_ij = eps_ijp n_p."""
    nh = np.einsum("ijp,p->ij", EPS, n)
    return (np.einsum("ij,k->ijk", nh, n) + np.einsum("jk,i->ijk", nh, n)
            + np.einsum("ki,j->ijk", nh, n))


def _as_field(J):
    if callable(J):
        return J
    return lambda z: J


def _matrix(J):
    return J.matrix if isinstance(J, PoissonMatrix) else np.asarray(J, dtype=float)


# ------------------------------------------------------------- structures

def canonical_poisson(point=None) -> PoissonMatrix:
    J = np.zeros((6, 6))
    J[:3, 3:] = np.eye(3)
    J[3:, :3] = -np.eye(3)
    return PoissonMatrix(J, ("n", "pi"))


def poisson_matrix_nm(n, m) -> PoissonMatrix:
    n = np.asarray(n, dtype=float)
    m = np.asarray(m, dtype=float)
    J = np.zeros((6, 6))
    nm = 0.5 * a_tilde(n)
    J[:3, 3:] = nm
    J[3:, :3] = -nm.T
    J[3:, 3:] = np.einsum("ijk,k->ij", EPS + cyclic_tensor(n), m) / (1.0 + n @ n)
    return PoissonMatrix(J, ("n", "m"))


def poisson_matrix_nomega(n, omega, I) -> PoissonMatrix:
    I = _inertia(I)
    n = np.asarray(n, dtype=float)
    omega = np.asarray(omega, dtype=float)
    J = np.zeros((6, 6))
    nw = 0.5 * a_tilde(n).T @ I.inverse
    J[:3, 3:] = nw
    J[3:, :3] = -nw.T
    core = np.einsum("abc,c->ab", EPS + cyclic_tensor(n), I.matrix @ omega)
    J[3:, 3:] = -I.inverse @ core @ I.inverse.T / (1.0 + n @ n)
    return PoissonMatrix(J, ("n", "omega"))


def e3_poisson(x, m) -> PoissonMatrix:
    """Lie-Poisson structure of e(3): {x_i,x_j}=0, {m_i,x_j}=eps_ijk x_k, {m_i,m_j}=eps_ijk m_k.

    Degenerate everywhere; used as the contrast fixture.
    """
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    J = np.zeros((6, 6))
    mx = np.einsum("ijk,k->ij", EPS, x)  # {m_i, x_j}
    J[3:, :3] = mx
    J[:3, 3:] = -mx.T
    J[3:, 3:] = np.einsum("ijk,k->ij", EPS, m)
    return PoissonMatrix(J, ("x", "m"))


def nm_field(z):
    return poisson_matrix_nm(z[:3], z[3:])


def nomega_field(I):
    I = _inertia(I)
    return lambda z: poisson_matrix_nomega(z[:3], z[3:], I)


# ------------------------------------------------------ coordinate changes

def to_nm(z):
    return np.concatenate([z[:3], momentum_map(CanonicalState(z[:3], z[3:]))])


def to_nomega(I):
    I = _inertia(I)
    return lambda z: np.concatenate([z[:3], 0.5 * I.inverse @ a_tilde(z[:3]) @ z[3:]])


def jacobian_nm(n, pi):
    """d(n, m)/d(n, pi)."""
    n = np.asarray(n, dtype=float)
    pi = np.asarray(pi, dtype=float)
    Jac = np.zeros((6, 6))
    Jac[:3, :3] = np.eye(3)
    Jac[3:, :3] = 0.5 * ((n @ pi) * np.eye(3) + np.outer(n, pi) - hat(pi))
    Jac[3:, 3:] = 0.5 * a_tilde(n).T
    return Jac


def jacobian_nomega(n, pi, I):
    """d(n, Omega)/d(n, pi)."""
    I = _inertia(I)
    n = np.asarray(n, dtype=float)
    pi = np.asarray(pi, dtype=float)
    Jac = np.zeros((6, 6))
    Jac[:3, :3] = np.eye(3)
    Jac[3:, :3] = 0.5 * I.inverse @ ((n @ pi) * np.eye(3) + np.outer(n, pi) + hat(pi))
    Jac[3:, 3:] = 0.5 * I.inverse @ a_tilde(n)
    return Jac


def pushforward_poisson(jacobian, J, labels=None) -> PoissonMatrix:
    """J' = Jac J Jac^T at one point."""
    jacobian = np.asarray(jacobian, dtype=float)
    cond = float(np.linalg.cond(jacobian))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise DegenerateMapError(f"coordinate change is singular (condition number {cond:.3g})")
    Jp = jacobian @ _matrix(J) @ jacobian.T
    if labels is None:
        labels = J.labels if isinstance(J, PoissonMatrix) else ("z", "z")
    return PoissonMatrix(Jp, labels, cond=cond)


# ---------------------------------------------------------------- brackets

def bracket(f: Observable, g: Observable, J, point) -> float:
    point = np.asarray(point, dtype=float)
    Jm = _matrix(_as_field(J)(point))
    return float(f.gradient(point) @ Jm @ g.gradient(point))


def jacobi_residual(J, point, step=JACOBI_STEP) -> float:
    """max |J^al d_l J^bc + J^bl d_l J^ca + J^cl d_l J^ab| over index triples."""
    field_ = _as_field(J)
    z = np.asarray(point, dtype=float)
    J0 = _matrix(field_(z))
    dJ = np.empty((6, 6, 6))
    for l in range(6):
        e = np.zeros(6)
        e[l] = step
        dJ[l] = (_matrix(field_(z + e)) - _matrix(field_(z - e))) / (2.0 * step)
    t = np.einsum("al,lbc->abc", J0, dJ)
    res = t + t.transpose(1, 2, 0) + t.transpose(2, 0, 1)
    return float(np.abs(res).max())


def pfaffian(M) -> Fraction:
    """Exact Pfaffian of an antisymmetric matrix of floats."""
    A = [[Fraction(float(x)) for x in row] for row in np.asarray(M)]
    return _pf(A, list(range(len(A))))


def _pf(A, idx):
    if not idx:
        return Fraction(1)
    if len(idx) % 2:
        return Fraction(0)
    i, rest = idx[0], idx[1:]
    total = Fraction(0)
    for pos, j in enumerate(rest):
        if A[i][j] != 0:
            sign = -1 if pos % 2 else 1
            total += sign * A[i][j] * _pf(A, rest[:pos] + rest[pos + 1:])
    return total


def nondegeneracy_check(J) -> float:
    """|det J|, evaluated exactly as Pf(J)^2 on the float entries."""
    M = _matrix(J)
    if np.abs(M + M.T).max() != 0.0:
        M = 0.5 * (M - M.T)
    return float(pfaffian(M) ** 2)


def pfaffian_sign(J) -> int:
    pf = pfaffian(_matrix(J))
    return (pf > 0) - (pf < 0)


def linear_coefficient_nm(step=FD_STEP):
    """C[i, j, k] = d{n_i, m_j}/dn_k at the origin."""
    C = np.empty((3, 3, 3))
    m = np.zeros(3)
    for k in range(3):
        e = np.zeros(3)
        e[k] = step
        C[:, :, k] = (poisson_matrix_nm(e, m).matrix[:3, 3:]
                      - poisson_matrix_nm(-e, m).matrix[:3, 3:]) / (2.0 * step)
    return C


# ------------------------------------------------------ algebraic identities

def identity_contraction_nm(n, m) -> float:
    """max_i |(nhat_ij n_k + cycle(ijk)) m_k m_j|."""
    v = np.einsum("ijk,k,j->i", cyclic_tensor(np.asarray(n, float)), m, m)
    return float(np.abs(v).max())


def identity_contraction_nomega(n, omega, I) -> float:
    """max_a |(nhat_ab n_c + cycle(abc)) (I Omega)_c Omega_b|."""
    I = _inertia(I)
    omega = np.asarray(omega, dtype=float)
    v = np.einsum("abc,c,b->a", cyclic_tensor(np.asarray(n, float)), I.matrix @ omega, omega)
    return float(np.abs(v).max())


def cyclic_tensor_residual(n) -> float:
    """max |T_ijk - n^2 eps_ijk|; the cyclic sum is totally antisymmetric."""
    n = np.asarray(n, dtype=float)
    return float(np.abs(cyclic_tensor(n) - (n @ n) * EPS).max())


# ---------------------------------------------------------------- involution

def canonical_observables(I):
    """H, m_1..m_3, m^2 (key ``m^2``) and Omega_1..Omega_3 on (n, pi) with analytic gradients."""
    I = _inertia(I)

    def state(z):
        return CanonicalState(z[:3], z[3:])

    def m_of(z):
        return momentum_map(state(z))

    obs = {"H": Observable(lambda z: hamiltonian_canonical(state(z), I),
                           lambda z: hamiltonian_canonical_gradient(state(z), I), "H")}
    for i in range(3):
        obs[f"m{i + 1}"] = Observable(lambda z, i=i: m_of(z)[i],
                                      lambda z, i=i: jacobian_nm(z[:3], z[3:])[3 + i], f"m{i + 1}")
        obs[f"omega{i + 1}"] = Observable(
            lambda z, i=i: to_nomega(I)(z)[3 + i],
            lambda z, i=i: jacobian_nomega(z[:3], z[3:], I)[3 + i], f"omega{i + 1}")
    obs["m^2"] = Observable(lambda z: float(m_of(z) @ m_of(z)),
                            lambda z: 2.0 * m_of(z) @ jacobian_nm(z[:3], z[3:])[3:], "m^2")
    return obs


def involution_suite(point: CanonicalState, I, tolerance=1e-9):
    """Canonical brackets among the integrals H, m_i and m^2."""
    obs = canonical_observables(I)
    z = point.to_array()
    J = canonical_poisson()
    pairs = [(f"m{i}", "H") for i in (1, 2, 3)]
    pairs += [(f"m{i}", "m^2") for i in (1, 2, 3)]
    pairs += [("H", "m^2"), ("H", "m3")]
    return [ResidualRecord(f"{{{a},{b}}}", z, abs(bracket(obs[a], obs[b], J, z)), tolerance)
            for a, b in pairs]


def check_poisson_matrix(J, point, antisym_tol=1e-12, jacobi_tol=1e-6):
    """Antisymmetry and Jacobi residual records for a structure field at a point."""
    Jp = _as_field(J)(np.asarray(point, dtype=float))
    if not isinstance(Jp, PoissonMatrix):
        raise RigidChartError("structure field must return a PoissonMatrix")
    return [ResidualRecord("antisymmetry", point, Jp.antisymmetry_residual(), antisym_tol),
            ResidualRecord("jacobi", point, jacobi_residual(J, point), jacobi_tol)]
