"""Verification suites run by ``rigidchart verify``.

Each suite takes a :class:`~rigidchart.config.RunConfig` and a numpy
``Generator`` and returns a list of :class:`~rigidchart.poisson.ResidualRecord`.
"""
from __future__ import annotations

import numpy as np

from . import chart, flows, poisson, sampling
from .dynamics import (BodyRateState, CanonicalState, InertiaTensor,
                       from_body_rate)


def _rel(a, b):
    return float(np.abs(a - b).max())


def chart_suite(cfg, rng):
    tol = cfg.tolerances
    out = []
    for _ in range(cfg.samples):
        n = sampling.rotation_vector_log_radius(rng)
        R = chart.rotation_matrix(n)
        A, At = chart.a_matrix(n), chart.a_tilde(n)
        aa = chart.axis_angle_from_rotation(R)
        r = np.linalg.norm(n)
        out += [
            poisson.ResidualRecord("chart:orthogonality", n, _rel(R.T @ R, np.eye(3)), tol.chart),
            poisson.ResidualRecord("chart:det", n, abs(np.linalg.det(R) - 1.0), tol.chart),
            poisson.ResidualRecord("chart:A*At", n, _rel(A @ At, np.eye(3)), tol.chart_product),
            poisson.ResidualRecord("chart:A*At^T-R", n, _rel(A @ At.T, R), tol.chart_product),
            poisson.ResidualRecord(
                "chart:roundtrip", n,
                max(_rel(aa.axis, n / r), abs(aa.angle - 2.0 * np.arctan(r))), tol.roundtrip),
        ]
    return out


def fd_convergence_order(n, ndot, steps=(1e-2, 5e-3, 2.5e-3, 1.25e-3)):
    """Observed order of central differences of R(n(t)) against Omega = 2 A^T ndot."""
    omega = chart.body_angular_velocity(n, ndot)
    R = chart.rotation_matrix(n)
    errs = []
    for h in steps:
        Rdot = (chart.rotation_matrix(n + h * ndot) - chart.rotation_matrix(n - h * ndot)) / (2 * h)
        errs.append(np.abs(chart.angular_velocity_from_rdot(R, Rdot) - omega).max())
    errs = np.array(errs)
    return np.log2(errs[:-1] / errs[1:]), errs


def angular_velocity_suite(cfg, rng):
    out = []
    for _ in range(min(cfg.samples, 20)):
        n = sampling.rotation_vector_in_ball(rng)
        ndot = sampling.momentum_in_box(rng)
        orders, _ = fd_convergence_order(n, ndot)
        out.append(poisson.ResidualRecord("angular-velocity:fd-order", np.r_[n, ndot],
                                          float(orders.min()), cfg.tolerances.fd_order, "lower"))
    return out


def _sample(rng):
    n = sampling.rotation_vector_in_ball(rng)
    pi = sampling.momentum_in_box(rng)
    return n, pi, sampling.inertia(rng)


def pushforward_suite(cfg, rng):
    tol = cfg.tolerances
    out = []
    J0 = poisson.canonical_poisson()
    for _ in range(cfg.samples):
        n, pi, I = _sample(rng)
        z = np.r_[n, pi]
        m = poisson.to_nm(z)[3:]
        w = poisson.to_nomega(I)(z)[3:]
        Jnm = poisson.poisson_matrix_nm(n, m)
        Jnw = poisson.poisson_matrix_nomega(n, w, I)
        out += [
            poisson.ResidualRecord("pushforward:n-m", z, _rel(
                poisson.pushforward_poisson(poisson.jacobian_nm(n, pi), J0).matrix, Jnm.matrix),
                tol.pushforward),
            poisson.ResidualRecord("pushforward:n-omega", z, _rel(
                poisson.pushforward_poisson(poisson.jacobian_nomega(n, pi, I), J0).matrix, Jnw.matrix),
                tol.pushforward),
            poisson.ResidualRecord("antisymmetry:n-m", z, Jnm.antisymmetry_residual(), tol.antisymmetry),
            poisson.ResidualRecord("antisymmetry:n-omega", z, Jnw.antisymmetry_residual(),
                                   tol.antisymmetry),
        ]
    return out


def jacobi_suite(cfg, rng):
    tol = cfg.tolerances.jacobi
    out = []
    for _ in range(cfg.samples):
        n, pi, I = _sample(rng)
        z = np.r_[n, pi]
        out += [
            poisson.ResidualRecord("jacobi:canonical", z,
                                   poisson.jacobi_residual(poisson.canonical_poisson(), z), tol),
            poisson.ResidualRecord("jacobi:n-m", poisson.to_nm(z),
                                   poisson.jacobi_residual(poisson.nm_field, poisson.to_nm(z)), tol),
            poisson.ResidualRecord("jacobi:n-omega", poisson.to_nomega(I)(z),
                                   poisson.jacobi_residual(poisson.nomega_field(I),
                                                           poisson.to_nomega(I)(z)), tol),
        ]
    return out


def involution_suite(cfg, rng):
    out = []
    for _ in range(cfg.samples):
        n, pi, I = _sample(rng)
        for rec in poisson.involution_suite(CanonicalState(n, pi), I, cfg.tolerances.involution):
            rec.check = "involution:" + rec.check
            out.append(rec)
    return out


def nondegeneracy_suite(cfg, rng):
    tol = cfg.tolerances.nondegeneracy
    out = []
    for _ in range(cfg.samples):
        n, pi, I = _sample(rng)
        z = np.r_[n, pi]
        m = poisson.to_nm(z)[3:]
        w = poisson.to_nomega(I)(z)[3:]
        out += [
            poisson.ResidualRecord("nondegeneracy:n-m", np.r_[n, m], poisson.nondegeneracy_check(
                poisson.poisson_matrix_nm(n, m)), tol, "lower"),
            poisson.ResidualRecord("nondegeneracy:n-omega", np.r_[n, w], poisson.nondegeneracy_check(
                poisson.poisson_matrix_nomega(n, w, I)), tol, "lower"),
        ]
    return out


def identity_nm_suite(cfg, rng):
    out = []
    for _ in range(cfg.samples):
        n = sampling.rotation_vector_in_ball(rng)
        m = sampling.momentum_in_box(rng)
        out.append(poisson.ResidualRecord("identity-nm", np.r_[n, m],
                                          poisson.identity_contraction_nm(n, m),
                                          cfg.tolerances.identity))
    return out


def identity_nomega_suite(cfg, rng):
    """The contraction with (I Omega)_c Omega_b, evaluated as written."""
    out = []
    for k in range(cfg.samples):
        n = sampling.rotation_vector_in_ball(rng)
        w = sampling.momentum_in_box(rng)
        I = sampling.inertia(rng, diagonal=k % 2 == 0)
        out.append(poisson.ResidualRecord("identity-nomega", np.r_[n, w],
                                          poisson.identity_contraction_nomega(n, w, I),
                                          cfg.tolerances.identity))
    return out


def cyclic_tensor_suite(cfg, rng):
    """The cyclic sum nhat_ij n_k + cycle equals n^2 eps_ijk."""
    out = []
    for _ in range(cfg.samples):
        n = sampling.rotation_vector_in_ball(rng)
        out.append(poisson.ResidualRecord("cyclic-tensor", n, poisson.cyclic_tensor_residual(n),
                                          cfg.tolerances.identity))
    return out


def e3_contrast_suite(cfg, rng):
    tol = cfg.tolerances
    C = poisson.linear_coefficient_nm()
    half_eps = 0.5 * chart.EPS
    out = [
        poisson.ResidualRecord("e3-contrast:linear-term-vs-half-eps", np.zeros(6),
                               _rel(C, half_eps), tol.linear_term),
        poisson.ResidualRecord("e3-contrast:linear-term-vs-eps", np.zeros(6),
                               _rel(C, chart.EPS), 0.25, "lower"),
    ]
    for _ in range(cfg.samples):
        x = sampling.rotation_vector_in_ball(rng)
        m = sampling.momentum_in_box(rng)
        out.append(poisson.ResidualRecord("e3-contrast:e3-det", np.r_[x, m],
                                          poisson.nondegeneracy_check(poisson.e3_poisson(x, m)),
                                          0.0, "zero"))
    return out


def oracle_suite(cfg, rng):
    tol = cfg.tolerances
    control = cfg.step_control()
    Itop = InertiaTensor.from_principal([2.0, 2.0, 1.0])
    w0 = np.array([1.0, 0.0, 1.0])
    traj = flows.integrate("n-omega", BodyRateState(np.zeros(3), w0), Itop, 10.0, control)
    top = _rel(traj.body_rates(Itop)[-1], flows.symmetric_top_oracle(2.0, 1.0, w0, 10.0))

    Isph = InertiaTensor(np.eye(3))
    rate = 1.0
    t_end = 10.0 * np.pi / rate
    traj = flows.integrate("n-omega", BodyRateState(np.zeros(3), [0.0, 0.0, rate]), Isph, t_end,
                           control, dt_out=t_end / 50, reanchor_threshold=cfg.reanchor_threshold)
    exact = np.array([flows.fixed_axis_attitude([0, 0, 1], rate, t) for t in traj.times])
    sph = float(np.abs(traj.attitudes() - exact).max())
    return [
        poisson.ResidualRecord("oracle:symmetric-top", np.r_[0, 0, 0, w0], top, tol.oracle),
        poisson.ResidualRecord("oracle:spherical-attitude", np.r_[0, 0, 0, 0, 0, rate], sph,
                               tol.oracle),
        poisson.ResidualRecord("oracle:spherical-reanchors", np.r_[0, 0, 0, 0, 0, rate],
                               len(traj.anchors) - 1, 5, "lower"),
    ]


def conservation_suite(cfg, rng):
    tol = cfg.tolerances
    I = InertiaTensor.from_principal([1.0, 2.0, 3.0])
    w0 = np.array([1.0, 1.0, 1.0])
    out = []
    for system in ("n-pi", "n-m", "n-omega", "euler-poisson"):
        base = np.eye(3) if system == "euler-poisson" else np.zeros(3)
        traj = flows.integrate(system, from_body_rate(base, w0, system, I), I, 20.0,
                               cfg.step_control(), dt_out=0.5)
        dH, dm = traj.drift(I)
        point = np.r_[0, 0, 0, w0]
        out += [poisson.ResidualRecord(f"conservation:{system}:H", point, dH, tol.conservation),
                poisson.ResidualRecord(f"conservation:{system}:m", point, dm, tol.conservation)]
    # through the identity m(0) = I Omega(0), so 2H = m.I^-1.m for all t;
    # 1e-10 sits below what the default step control delivers, hence the tighter run
    fine = flows.StepControl(rtol=1e-12, atol=1e-12)
    for system in ("n-pi", "n-m", "n-omega", "euler-poisson"):
        base = np.eye(3) if system == "euler-poisson" else np.zeros(3)
        traj = flows.integrate(system, from_body_rate(base, w0, system, I), I, 20.0, fine,
                               dt_out=0.5)
        H, m = traj.energies(I), traj.momenta(I)
        gap = np.abs(2.0 * H - np.einsum("ti,ij,tj->t", m, I.inverse, m)).max() / (2.0 * H[0])
        out.append(poisson.ResidualRecord(f"conservation:{system}:2H=m.Iinv.m", np.r_[0, 0, 0, w0],
                                          gap, tol.energy_identity))
    return out


def lie_series_orders(z0, I, orders=range(2, 7), ladder=(0.4, 0.2, 0.1)):
    """Observed convergence order of the truncated Lie series, per order K."""
    ref_control = flows.StepControl(rtol=1e-12, atol=1e-12)
    refs = {t: flows.integrate("n-pi", z0, I, t, ref_control).states[-1] for t in ladder}
    result = {}
    for K in orders:
        cfg = flows.LieSeriesConfig(order=K)
        errs = np.array([np.abs(flows.lie_series_flow(z0, I, t, cfg).to_array() - refs[t]).max()
                         for t in ladder])
        result[K] = float(np.log2(errs[-2] / errs[-1]))
    return result


def lie_series_suite(cfg, rng):
    z0 = CanonicalState([0.3, -0.2, 0.5], [1.0, -0.5, 0.8])
    out = []
    for label, I in (("spherical", InertiaTensor(np.eye(3))),
                     ("asymmetric", InertiaTensor.from_principal([1.0, 2.0, 3.0]))):
        for K, order in lie_series_orders(z0, I).items():
            out.append(poisson.ResidualRecord(f"lie-series:{label}:K={K}", z0.to_array(),
                                              abs(order - (K + 1)), cfg.tolerances.lie_order))
    return out


def compare_suite(cfg, rng):
    out = []
    for label, moments, w0 in (("symmetric", [2.0, 2.0, 1.0], [1.0, 0.0, 1.0]),
                               ("asymmetric", [1.0, 2.0, 3.0], [1.0, 1.0, 1.0])):
        report = flows.compare_formulations(w0, InertiaTensor.from_principal(moments), 5.0,
                                            cfg.step_control(),
                                            reanchor_threshold=cfg.reanchor_threshold)
        out.append(poisson.ResidualRecord(f"compare:{label}", np.r_[0, 0, 0, w0],
                                          report.max_divergence if not report.failed else np.inf,
                                          cfg.tolerances.divergence))
    return out


SUITES = {
    "chart": chart_suite,
    "angular-velocity": angular_velocity_suite,
    "pushforward": pushforward_suite,
    "jacobi": jacobi_suite,
    "involution": involution_suite,
    "nondegeneracy": nondegeneracy_suite,
    "identity-nm": identity_nm_suite,
    "identity-nomega": identity_nomega_suite,
    "cyclic-tensor": cyclic_tensor_suite,
    "e3-contrast": e3_contrast_suite,
    "oracle": oracle_suite,
    "conservation": conservation_suite,
    "lie-series": lie_series_suite,
    "compare": compare_suite,
}


def run(names, cfg, seed=None):
    """Run suites in order with one seeded generator per suite."""
    seed = cfg.seed if seed is None else seed
    records = []
    order = list(SUITES)
    for name in names:
        rng = np.random.default_rng([seed, order.index(name)])
        records += SUITES[name](cfg, rng)
    return records
