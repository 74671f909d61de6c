"""Trajectory propagation.

Chart systems keep the attitude as ``R_anchor @ R(n)`` and move the rotation
accumulated in ``n`` into ``R_anchor`` whenever ``|n|^2`` passes the
re-anchor threshold, so the coordinate never approaches the angle pi.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .chart import a_tilde, rotation_matrix
from .dynamics import (STATE_TYPES, SYSTEMS, CanonicalState, _inertia, attitude,
                       body_rate, canonical_field, convert, energy, euler_rate,
                       from_body_rate)
from .errors import (ChartBoundaryError, InvalidInputError,
                     SeriesDivergenceWarning, StiffnessError)

REANCHOR_THRESHOLD = 9.0
CHART_LIMIT = 1e8
CHART_SYSTEMS = ("n-pi", "n-m", "n-omega")


@dataclass
class StepControl:
    rtol: float = 1e-10
    atol: float = 1e-10
    h0: float = 1e-2
    h_min: float = 1e-12
    h_max: float = 0.5
    fixed_step: Optional[float] = None


@dataclass(frozen=True)
class AnchoredAttitude:
    R_anchor: np.ndarray
    n_rel: np.ndarray

    @property
    def matrix(self):
        return self.R_anchor @ rotation_matrix(self.n_rel)


def reanchor(a: AnchoredAttitude) -> AnchoredAttitude:
    return AnchoredAttitude(a.R_anchor @ rotation_matrix(a.n_rel), np.zeros(3))


@dataclass
class LieSeriesConfig:
    order: int = 8
    cap: float = 1.0
    tol: Optional[float] = None

    def __post_init__(self):
        if int(self.order) < 1:
            raise InvalidInputError("Lie series order must be at least 1")
        self.order = int(self.order)


@dataclass
class Trajectory:
    system: str
    times: np.ndarray
    states: np.ndarray
    anchor_index: np.ndarray
    anchors: list = field(default_factory=list)  # [(t, R_anchor)]
    continuity: float = 0.0  # worst jump of R or Omega across a re-anchor
    steps: int = 0
    rejected: int = 0

    def __len__(self):
        return len(self.times)

    def state(self, i):
        return STATE_TYPES[self.system].from_array(self.states[i])

    def attitude(self, i):
        R = attitude(self.state(i))
        if self.system == "euler-poisson":
            return R
        return self.anchors[self.anchor_index[i]][1] @ R

    def attitudes(self):
        return np.array([self.attitude(i) for i in range(len(self))])

    def body_rates(self, I):
        return np.array([body_rate(self.state(i), I) for i in range(len(self))])

    def energies(self, I):
        return np.array([energy(self.state(i), I) for i in range(len(self))])

    def momenta(self, I):
        """Spatial angular momentum R I Omega in the inertial frame."""
        I = _inertia(I)
        return np.array([self.attitude(i) @ I.matrix @ body_rate(self.state(i), I)
                         for i in range(len(self))])

    def orthogonality(self):
        return np.array([np.abs(R.T @ R - np.eye(3)).max() for R in self.attitudes()])

    def drift(self, I):
        """Max relative energy drift and max |m(t) - m(0)|."""
        H = self.energies(I)
        m = self.momenta(I)
        scale = abs(H[0]) if H[0] != 0 else 1.0
        return (float(np.abs(H - H[0]).max() / scale),
                float(np.linalg.norm(m - m[0], axis=1).max()))

    def records(self, I):
        """Export rows: t, system, state fields, H, m1..m3, orthogonality residual."""
        H = self.energies(I)
        m = self.momenta(I)
        orth = self.orthogonality()
        for i, t in enumerate(self.times):
            yield [float(t), self.system, *map(float, self.states[i]), float(H[i]),
                   *map(float, m[i]), float(orth[i])]

    def header(self):
        return ["t", "system", *STATE_TYPES[self.system].field_names,
                "H", "m1", "m2", "m3", "orthogonality"]


def vector_field(system, I):
    """Flat right-hand side ``f(z)`` for one coordinate system."""
    I = _inertia(I)
    Iinv = I.inverse

    if system == "n-pi":
        def f(z):
            nd, pd = canonical_field(CanonicalState(z[:3], z[3:]), I)
            return np.concatenate([nd, pd])
    elif system == "n-m":
        def f(z):
            n, m = z[:3], z[3:]
            nd = 0.5 * a_tilde(n).T @ Iinv @ rotation_matrix(n).T @ m
            return np.concatenate([nd, np.zeros(3)])
    elif system == "n-omega":
        def f(z):
            n, w = z[:3], z[3:]
            return np.concatenate([0.5 * a_tilde(n).T @ w, euler_rate(w, I)])
    elif system == "euler-poisson":
        def f(z):
            R = z[:9].reshape(3, 3)
            w = z[9:]
            x, y, c = w
            W = np.array([[0.0, -c, y], [c, 0.0, -x], [-y, x, 0.0]])
            return np.concatenate([(R @ W).ravel(), euler_rate(w, I)])
    else:
        raise InvalidInputError(f"unknown coordinate system {system!r}; expected one of {SYSTEMS}")
    return f


def rk4_step(f, z, h):
    k1 = f(z)
    k2 = f(z + 0.5 * h * k1)
    k3 = f(z + 0.5 * h * k2)
    k4 = f(z + h * k3)
    return z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _project(z):
    U, _, Vt = np.linalg.svd(z[:9].reshape(3, 3))
    out = z.copy()
    out[:9] = (U @ Vt).ravel()
    return out


def _reanchor_flat(system, z, I):
    """Return (R_rel, z_new) with the chart coordinate reset to the origin."""
    n, p = z[:3], z[3:]
    R_rel = rotation_matrix(n)
    if system == "n-pi":
        p = a_tilde(n) @ p
    elif system == "n-m":
        p = R_rel.T @ p
    return R_rel, np.concatenate([np.zeros(3), p])


def output_grid(t_end, dt_out=None, t0=0.0):
    if dt_out is None:
        return np.array([t0, t_end], dtype=float)
    count = int(round(abs(t_end - t0) / dt_out))
    grid = t0 + np.sign(t_end - t0) * dt_out * np.arange(count + 1)
    if abs(grid[-1] - t_end) > 1e-12 * max(1.0, abs(t_end)):
        grid = np.append(grid, t_end)
    grid[-1] = t_end
    return grid


def integrate(system, state0, I, t_end, control: Optional[StepControl] = None, *,
              t_out=None, dt_out=None, t0=0.0, reanchor_threshold=REANCHOR_THRESHOLD,
              reanchor_enabled=True, project=False, chart_limit=CHART_LIMIT,
              R_anchor=None) -> Trajectory:
    """Classic RK4 with step-doubling error control (or a fixed step).

    Steps are shortened to land exactly on the output times. ``state0`` is
    converted to ``system`` when it belongs to another one. Runs backward
    in time when ``t_end < t0``.
    """
    I = _inertia(I)
    control = control or StepControl()
    if state0.system != system:
        state0 = convert(state0, system, I)
    if t_end == t0:
        raise InvalidInputError("t_end must differ from the start time")
    grid = np.asarray(t_out, dtype=float) if t_out is not None else output_grid(t_end, dt_out, t0)
    direction = 1.0 if grid[-1] > grid[0] else -1.0
    f = vector_field(system, I)
    chart = system in CHART_SYSTEMS

    z = state0.to_array().astype(float)
    anchors = [(float(grid[0]), np.eye(3) if R_anchor is None else np.asarray(R_anchor, float))]
    states = [z.copy()]
    anchor_index = [0]
    t = float(grid[0])
    h = control.fixed_step or control.h0
    steps = rejected = 0
    continuity = 0.0

    for target in grid[1:]:
        while direction * (target - t) > 0.0:
            step = min(abs(h), control.h_max, abs(target - t))
            if control.fixed_step:
                z_new = rk4_step(f, z, direction * step)
                accepted = True
            else:
                if step < control.h_min:
                    raise StiffnessError(f"step size {step:.3g} underflow at t={t:.17g}")
                hs = direction * step
                y1 = rk4_step(f, z, hs)
                y2 = rk4_step(f, rk4_step(f, z, 0.5 * hs), 0.5 * hs)
                diff = (y2 - y1) / 15.0
                scale = control.atol + control.rtol * np.maximum(np.abs(z), np.abs(y2))
                err = float(np.abs(diff / scale).max())
                accepted = err <= 1.0
                factor = 4.0 if err == 0.0 else min(4.0, max(0.1, 0.9 * err ** -0.2))
                if not accepted:
                    rejected += 1
                    h = step * factor
                    continue
                z_new = y2 + diff
                if step == abs(h) or factor < 1.0:
                    h = step * factor
            if not np.all(np.isfinite(z_new)):
                raise StiffnessError(f"non-finite state at t={t:.17g}")
            steps += 1
            t = float(target) if step == abs(target - t) else t + direction * step
            z = z_new
            if project:
                z = _project(z)
            if chart and z[:3] @ z[:3] > reanchor_threshold:
                if not reanchor_enabled:
                    if z[:3] @ z[:3] > chart_limit:
                        raise ChartBoundaryError(
                            f"chart coordinate reached |n|^2 = {z[:3] @ z[:3]:.3g} at t={t:.17g}",
                            axis=z[:3] / np.linalg.norm(z[:3]))
                    continue
                R_before = anchors[-1][1] @ rotation_matrix(z[:3])
                w_before = body_rate(STATE_TYPES[system].from_array(z), I)
                R_rel, z = _reanchor_flat(system, z, I)
                anchors.append((t, anchors[-1][1] @ R_rel))
                w_after = body_rate(STATE_TYPES[system].from_array(z), I)
                continuity = max(continuity, float(np.abs(anchors[-1][1] - R_before).max()),
                                 float(np.abs(w_after - w_before).max()))
        states.append(z.copy())
        anchor_index.append(len(anchors) - 1)

    return Trajectory(system, grid.copy(), np.array(states), np.array(anchor_index),
                      anchors, continuity, steps, rejected)


# --------------------------------------------------------------- Lie series

def _conv(a, b, k, op):
    return sum(op(a[j], b[k - j]) for j in range(k + 1))


def lie_series_coefficients(z0: CanonicalState, I, order):
    """Taylor coefficients z_j = (L_H)^j z / j! of the (n, pi) flow, j = 0..order.

    The canonical field is polynomial in (n, pi), so the coefficients follow
    from a recurrence on truncated power series (Cauchy products).
    """
    I = _inertia(I)
    Iinv = I.inverse
    K = int(order)
    N = np.zeros((K + 1, 3))
    P = np.zeros((K + 1, 3))
    N[0], P[0] = z0.n, z0.pi
    # running series of the intermediate quantities, filled one degree at a time
    npi = np.zeros(K + 1)
    v = np.zeros((K + 1, 3))
    u = np.zeros((K + 1, 3))
    nu = np.zeros(K + 1)
    dot, mul, cross = np.dot, lambda s, x: s * x, np.cross
    for k in range(K):
        npi[k] = _conv(N, P, k, dot)
        v[k] = P[k] + _conv(npi, N, k, mul) - _conv(N, P, k, cross)
        u[k] = Iinv @ v[k]
        nu[k] = _conv(N, u, k, dot)
        ndot = u[k] + _conv(nu, N, k, mul) + _conv(N, u, k, cross)
        pdot = _conv(npi, u, k, mul) + _conv(nu, P, k, mul) + _conv(u, P, k, cross)
        N[k + 1] = 0.25 * ndot / (k + 1)
        P[k + 1] = -0.25 * pdot / (k + 1)
    return np.hstack([N, P])


def lie_series_flow(z0: CanonicalState, I, t, cfg: Optional[LieSeriesConfig] = None) -> CanonicalState:
    """Truncated exponential of the Hamiltonian vector field applied to z0.

    Emits :class:`SeriesDivergenceWarning` when the last retained term
    exceeds ``cfg.tol``; the partial sum is returned regardless.
    """
    cfg = cfg or LieSeriesConfig()
    if abs(t) > cfg.cap:
        raise InvalidInputError(f"|t| = {abs(t)} exceeds the Lie series cap {cfg.cap}")
    if t == 0:
        return CanonicalState(z0.n.copy(), z0.pi.copy())
    C = lie_series_coefficients(z0, I, cfg.order)
    z = C[-1].copy()
    for c in C[-2::-1]:
        z = z * t + c
    last = float(np.abs(C[-1]).max() * abs(t) ** cfg.order)
    if cfg.tol is not None and last > cfg.tol:
        warnings.warn(f"Lie series last term {last:.3g} exceeds tolerance {cfg.tol:.3g} at t={t}",
                      SeriesDivergenceWarning, stacklevel=2)
    return CanonicalState(z[:3], z[3:])


def lie_series_propagate(z0: CanonicalState, I, t, cfg: Optional[LieSeriesConfig] = None,
                         substeps=None) -> CanonicalState:
    """Compose Lie series sub-steps, each within the configured cap."""
    cfg = cfg or LieSeriesConfig()
    count = substeps or max(1, math.ceil(abs(t) / cfg.cap))
    z = z0
    for _ in range(count):
        z = lie_series_flow(z, I, t / count, cfg)
    return z


# ------------------------------------------------------------------ oracles

def symmetric_top_oracle(I1, I3, omega0, t):
    """Omega(t) for I = diag(I1, I1, I3): Omega_3 fixed, (Omega_1, Omega_2)
    turning at rate (I3 - I1) Omega_3 / I1."""
    w = np.asarray(omega0, dtype=float)
    phase = (I3 - I1) * w[2] / I1 * t
    c, s = np.cos(phase), np.sin(phase)
    return np.array([c * w[0] - s * w[1], s * w[0] + c * w[1], w[2]])


def fixed_axis_attitude(axis, rate, t):
    """Rotation by angle rate*t about a fixed unit axis."""
    k = np.asarray(axis, dtype=float)
    a = rate * t
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(a) * K + (1.0 - np.cos(a)) * K @ K


# --------------------------------------------------------- lane comparison

@dataclass
class ComparisonReport:
    times: np.ndarray
    lanes: dict
    divergence: dict  # (lane_a, lane_b) -> max Frobenius distance
    drift: dict  # lane -> (relative H drift, |m| drift)
    failed: dict  # lane -> error message
    reanchors: dict

    @property
    def max_divergence(self):
        return max(self.divergence.values(), default=0.0)


def compare_formulations(omega0, I, t_end, control: Optional[StepControl] = None, *,
                         dt_out=0.1, reanchor_threshold=REANCHOR_THRESHOLD,
                         lane_omega=None) -> ComparisonReport:
    """Propagate R(0) = 1, Omega(0) = omega0 in all four systems and compare R(t).

    ``lane_omega`` overrides the initial Omega of individual lanes; it exists
    to build deliberately mismatched runs.
    """
    I = _inertia(I)
    lane_omega = lane_omega or {}
    grid = output_grid(t_end, dt_out)
    lanes, failed, drift, attitudes, reanchors = {}, {}, {}, {}, {}
    for system in SYSTEMS:
        w0 = np.asarray(lane_omega.get(system, omega0), dtype=float)
        base = np.eye(3) if system == "euler-poisson" else np.zeros(3)
        state0 = from_body_rate(base, w0, system, I)
        try:
            traj = integrate(system, state0, I, t_end, control, t_out=grid,
                             reanchor_threshold=reanchor_threshold)
        except Exception as exc:  # a failing lane is reported, not fatal
            failed[system] = f"{type(exc).__name__}: {exc}"
            continue
        lanes[system] = traj
        attitudes[system] = traj.attitudes()
        drift[system] = traj.drift(I)
        reanchors[system] = len(traj.anchors) - 1
    divergence = {}
    for a, b in itertools.combinations(attitudes, 2):
        d = attitudes[a] - attitudes[b]
        divergence[(a, b)] = float(np.sqrt((d ** 2).sum(axis=(1, 2))).max())
    return ComparisonReport(grid, lanes, divergence, drift, failed, reanchors)

