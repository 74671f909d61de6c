import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from rigidchart import chart
from rigidchart.chart import AxisAngle
from rigidchart.dynamics import InertiaTensor
from rigidchart.errors import ChartBoundaryError, InvalidInputError
from rigidchart import sampling

QUARTER_TURN_Z = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])

vec3 = st.tuples(*[st.floats(-100.0, 100.0, allow_nan=False)] * 3).map(np.array)


def random_axis(rng):
    k = rng.normal(size=3)
    return k / np.linalg.norm(k)


class TestAxisAngle:
    def test_zero_angle_is_identity(self):
        R = chart.rotation_from_axis_angle(AxisAngle([0, 0, 1], 0.0))
        np.testing.assert_array_equal(R, np.eye(3))

    def test_quarter_turn(self):
        R = chart.rotation_from_axis_angle(AxisAngle([0, 0, 1], np.pi / 2))
        np.testing.assert_allclose(R, QUARTER_TURN_Z, atol=1e-15)

    def test_random_axis_is_fixed_and_orthogonal(self, rng):
        for _ in range(50):
            k = random_axis(rng)
            R = chart.rotation_from_axis_angle(AxisAngle(k, rng.uniform(0, np.pi)))
            assert np.abs(R @ k - k).max() < 1e-14
            assert np.abs(R.T @ R - np.eye(3)).max() < 1e-12
            assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)

    def test_matches_scipy_rotvec(self, rng):
        for _ in range(20):
            k, a = random_axis(rng), rng.uniform(0, np.pi)
            R = chart.rotation_from_axis_angle(AxisAngle(k, a))
            np.testing.assert_allclose(R, Rotation.from_rotvec(a * k).as_matrix(), atol=1e-14)

    def test_non_unit_axis_rejected(self):
        with pytest.raises(InvalidInputError):
            AxisAngle([0, 0, 1.1], 0.3)


class TestRotationVector:
    def test_from_axis_angle(self):
        np.testing.assert_array_equal(
            chart.rotation_vector_from_axis_angle(AxisAngle([0, 0, 1], 0.0)), np.zeros(3))
        np.testing.assert_allclose(
            chart.rotation_vector_from_axis_angle(AxisAngle([0, 0, 1], np.pi / 2)), [0, 0, 1],
            atol=1e-15)

    def test_angle_pi_is_outside_chart(self):
        with pytest.raises(ChartBoundaryError):
            chart.rotation_vector_from_axis_angle(AxisAngle([1, 0, 0], np.pi))

    def test_rotation_matrix_special_values(self):
        np.testing.assert_array_equal(chart.rotation_matrix([0, 0, 0]), np.eye(3))
        np.testing.assert_allclose(chart.rotation_matrix([0, 0, 1]), QUARTER_TURN_Z, atol=1e-15)

    def test_rotation_matrix_against_axis_angle_form(self, rng):
        for _ in range(100):
            n = sampling.rotation_vector_in_ball(rng, 10.0)
            r = np.linalg.norm(n)
            oracle = chart.rotation_from_axis_angle(AxisAngle(n / r, 2 * np.arctan(r)))
            assert np.abs(chart.rotation_matrix(n) - oracle).max() < 1e-12

    def test_roundtrip_through_matrix(self, rng):
        for _ in range(200):
            k, a = random_axis(rng), rng.uniform(0, np.pi - 1e-6)
            aa = chart.axis_angle_from_rotation(chart.rotation_from_axis_angle(AxisAngle(k, a)))
            assert np.abs(aa.axis - k).max() < 1e-9
            assert abs(aa.angle - a) < 1e-9
            n = chart.rotation_vector_from_axis_angle(AxisAngle(k, a))
            back = chart.axis_angle_from_rotation(chart.rotation_matrix(n))
            np.testing.assert_allclose(chart.rotation_vector_from_axis_angle(back), n,
                                       rtol=1e-10, atol=1e-10)

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidInputError):
            chart.rotation_matrix([np.nan, 0, 0])


class TestInverse:
    def test_identity_uses_z_axis(self):
        aa = chart.axis_angle_from_rotation(np.eye(3))
        assert aa.angle == 0.0
        np.testing.assert_array_equal(aa.axis, [0, 0, 1])

    def test_quarter_turn(self):
        aa = chart.axis_angle_from_rotation(QUARTER_TURN_Z)
        np.testing.assert_allclose(aa.axis, [0, 0, 1], atol=1e-15)
        assert aa.angle == pytest.approx(np.pi / 2, abs=1e-15)

    def test_composition_roundtrip(self, rng):
        for _ in range(200):
            R = Rotation.random(random_state=rng).as_matrix() @ Rotation.random(random_state=rng).as_matrix()
            aa = chart.axis_angle_from_rotation(R)
            assert np.abs(chart.rotation_from_axis_angle(aa) - R).max() < 1e-9

    @pytest.mark.parametrize("gap", [1e-3, 1e-5, 1e-7])
    def test_near_pi_uses_symmetric_part(self, gap):
        k = np.array([1.0, 2.0, -2.0]) / 3.0
        aa = chart.axis_angle_from_rotation(chart.rotation_from_axis_angle(AxisAngle(k, np.pi - gap)))
        np.testing.assert_allclose(aa.axis, k, atol=1e-9)
        assert aa.angle == pytest.approx(np.pi - gap, abs=1e-12)

    def test_small_angles_keep_axis_accuracy(self):
        k = np.array([2.0, -1.0, 2.0]) / 3.0
        for a in (1e-4, 1e-6, 1e-9):
            aa = chart.axis_angle_from_rotation(chart.rotation_from_axis_angle(AxisAngle(k, a)))
            assert np.abs(aa.axis - k).max() < 1e-6
            assert aa.angle == pytest.approx(a, rel=1e-6)

    def test_boundary_reports_axis(self):
        R = chart.rotation_from_axis_angle(AxisAngle([0, 1, 0], np.pi))
        with pytest.raises(ChartBoundaryError) as exc:
            chart.axis_angle_from_rotation(R)
        np.testing.assert_allclose(np.abs(exc.value.axis), [0, 1, 0], atol=1e-12)

    def test_non_orthogonal_rejected(self):
        with pytest.raises(InvalidInputError):
            chart.axis_angle_from_rotation(np.eye(3) * 1.001)
        with pytest.raises(InvalidInputError):
            chart.axis_angle_from_rotation(-np.eye(3))

    def test_slightly_off_orthogonal_is_accepted(self):
        R = QUARTER_TURN_Z + 1e-11
        assert chart.axis_angle_from_rotation(R).angle == pytest.approx(np.pi / 2, abs=1e-9)


class TestAMatrices:
    def test_origin(self):
        np.testing.assert_array_equal(chart.a_matrix(np.zeros(3)), np.eye(3))
        np.testing.assert_array_equal(chart.a_tilde(np.zeros(3)), np.eye(3))

    def test_index_form(self, rng):
        n = rng.normal(size=3)
        eps_n = np.einsum("ijk,k->ij", chart.EPS, n)
        np.testing.assert_allclose(chart.a_matrix(n), (np.eye(3) - eps_n) / (1 + n @ n), atol=1e-15)
        np.testing.assert_allclose(chart.a_tilde(n), np.eye(3) + np.outer(n, n) + eps_n, atol=1e-15)

    def test_products(self, rng):
        for _ in range(100):
            n = sampling.rotation_vector_in_ball(rng, 10.0)
            A, At = chart.a_matrix(n), chart.a_tilde(n)
            assert np.abs(A @ At - np.eye(3)).max() < 1e-13
            assert np.abs(A @ At.T - chart.rotation_matrix(n)).max() < 1e-13

    @settings(max_examples=200, deadline=None)
    @given(vec3)
    def test_chart_invariants(self, n):
        R = chart.rotation_matrix(n)
        A, At = chart.a_matrix(n), chart.a_tilde(n)
        assert np.abs(R.T @ R - np.eye(3)).max() < 1e-12
        assert abs(np.linalg.det(R) - 1.0) < 1e-12
        assert np.abs(A @ At - np.eye(3)).max() < 1e-13
        assert np.abs(A @ At.T - R).max() < 1e-13
        assert np.abs(R @ n - n).max() <= 1e-13 * max(1.0, np.linalg.norm(n))


class TestAngularVelocity:
    def test_origin(self):
        v = np.array([0.3, -1.0, 2.0])
        np.testing.assert_array_equal(chart.body_angular_velocity(np.zeros(3), v), 2 * v)

    def test_fixed_axis_curve(self):
        k = np.array([1.0, 2.0, 2.0]) / 3.0
        w = 1.7
        for t in np.linspace(0, 1.5, 7):
            n = k * np.tan(w * t / 2)
            ndot = k * w / (2 * np.cos(w * t / 2) ** 2)
            np.testing.assert_allclose(chart.body_angular_velocity(n, ndot), w * k, atol=1e-13)

    def test_finite_difference_definition(self, rng):
        h = 1e-6
        for _ in range(20):
            n = sampling.rotation_vector_in_ball(rng)
            ndot = sampling.momentum_in_box(rng)
            Rdot = (chart.rotation_matrix(n + h * ndot) - chart.rotation_matrix(n - h * ndot)) / (2 * h)
            fd = chart.angular_velocity_from_rdot(chart.rotation_matrix(n), Rdot)
            assert np.abs(fd - chart.body_angular_velocity(n, ndot)).max() < 1e-7


class TestMetric:
    def test_origin_unit_inertia(self):
        np.testing.assert_array_equal(chart.metric(np.zeros(3), np.eye(3)), 4 * np.eye(3))

    def test_inverse_and_definiteness(self, rng):
        for _ in range(50):
            n = sampling.rotation_vector_in_ball(rng)
            I = sampling.inertia(rng)
            G, Gi = chart.metric(n, I), chart.inverse_metric(n, I)
            assert np.abs(G @ Gi - np.eye(3)).max() < 1e-12
            assert np.abs(G - G.T).max() < 1e-15
            assert np.linalg.eigvalsh(G).min() > 0

    def test_vanishes_at_infinity(self, rng):
        # brute force: spectral norm of G stays below 4 |I| / (1 + n^2), i.e. c = 1
        for _ in range(50):
            I = sampling.inertia(rng)
            n = 1e3 * random_axis(rng)
            bound = 4 * np.linalg.norm(I.matrix, 2) / (1 + n @ n)
            assert np.linalg.norm(chart.metric(n, I), 2) <= bound * (1 + 1e-12)
            assert bound < 4 * np.linalg.norm(I.matrix, 2) * 1e-6

    def test_kinetic_energy(self, rng):
        # 1/2 ndot^T G ndot equals 1/2 Omega^T I Omega
        n, ndot = rng.normal(size=3), rng.normal(size=3)
        I = sampling.inertia(rng)
        w = chart.body_angular_velocity(n, ndot)
        assert 0.5 * ndot @ chart.metric(n, I) @ ndot == pytest.approx(0.5 * w @ I.matrix @ w, rel=1e-13)

    def test_rejects_indefinite_inertia(self):
        with pytest.raises(InvalidInputError):
            chart.metric(np.zeros(3), np.diag([1.0, -1.0, 1.0]))


def test_format_matrix_is_row_major_full_precision():
    s = chart.format_matrix([[1, 2, 3], [4, 5, 6], [7, 8, 0.1]])
    assert s.split(",")[:3] == ["1", "2", "3"]
    assert float(s.split(",")[-1]) == 0.1
    assert s.split(",")[-1] == "0.10000000000000001"


def test_inertia_accepts_full_matrix_too():
    I = InertiaTensor(np.diag([1.0, 2.0, 2.5]))
    np.testing.assert_allclose(chart.metric(np.zeros(3), I), chart.metric(np.zeros(3), I.matrix))
