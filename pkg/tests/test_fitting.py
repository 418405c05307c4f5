"""Relativistic worldline predictions and the trajectory fits."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lattice_airy.errors import DomainError, FitInstabilityWarning
from lattice_airy.diagnostics import PeakTrajectory
from lattice_airy.fitting import (
    RelativisticFit,
    _linearized_start,
    bloch_com_reference,
    fit_hyperbolic,
    fit_parabola,
    fit_scaling,
    predict_relativistic,
)

# reference fit values for the four lattice spacings
TABLE_ALPHA = {0.2: 0.0153, 0.15: 0.0065, 0.1: 0.0020, 0.05: 0.00025}


def model_trajectory(alpha, c, t_max=300.0, dt=0.25):
    t = np.arange(0.0, t_max + 1e-9, dt)
    x = predict_relativistic(alpha, c, t)[0]
    return PeakTrajectory(t, x)


class TestPredict:
    def test_initial_conditions(self):
        x, v, a = predict_relativistic(0.0153, 1.9, 0.0)
        assert (x, v) == (0.0, 0.0)
        assert a == pytest.approx(0.0153)

    def test_characteristic_time(self):
        # at t = c/alpha the velocity is c/sqrt(2)
        alpha, c = 0.01, 1.9
        _, v, _ = predict_relativistic(alpha, c, c / alpha)
        assert v == pytest.approx(c / math.sqrt(2.0))

    def test_nonrelativistic_limit(self):
        alpha, c = 0.01, 1.9
        t = 0.1 * c / alpha  # alpha t / c = 0.1
        x, _, _ = predict_relativistic(alpha, c, t)
        assert x == pytest.approx(0.5 * alpha * t * t, rel=0.01)

    def test_velocity_below_c_and_monotone(self):
        t = np.linspace(0.0, 2000.0, 400)
        _, v, a = predict_relativistic(0.0153, 1.9, t)
        assert np.all(v < 1.9)
        assert np.all(np.diff(v) > 0.0)
        assert np.all(np.diff(a) < 0.0)

    def test_velocity_is_derivative_of_position(self):
        dt = 1e-4
        for t in (3.0, 50.0, 400.0):
            xm = predict_relativistic(0.0153, 1.9, t - dt)[0]
            xp = predict_relativistic(0.0153, 1.9, t + dt)[0]
            v = predict_relativistic(0.0153, 1.9, t)[1]
            assert (xp - xm) / (2 * dt) == pytest.approx(v, abs=1e-6)

    def test_bad_parameters(self):
        with pytest.raises(DomainError):
            predict_relativistic(-1.0, 1.9, 0.0)
        with pytest.raises(DomainError):
            predict_relativistic(0.01, 0.0, 0.0)


@given(
    st.floats(min_value=1e-3, max_value=0.1),
    st.floats(min_value=0.5, max_value=3.0),
    st.floats(min_value=0.0, max_value=300.0),
)
@settings(max_examples=200, deadline=None, derandomize=True)
def test_worldline_hyperbola_identity(alpha, c, t):
    # (alpha x/c^2 + 1)^2 - (alpha t/c)^2 = 1, sampled where alpha*t/c <= 20
    if alpha * t / c > 20.0:
        t = 20.0 * c / alpha
    x = predict_relativistic(alpha, c, t)[0]
    residual = (alpha * x / c**2 + 1.0) ** 2 - (alpha * t / c) ** 2 - 1.0
    assert abs(residual) < 1e-12


class TestFitHyperbolic:
    def test_round_trip_on_exact_model(self):
        alpha, c = 0.0153, 1.90
        fit = fit_hyperbolic(model_trajectory(alpha, c))
        assert fit.method == "refined"
        assert fit.alpha == pytest.approx(alpha, rel=1e-8)
        assert fit.c == pytest.approx(c, rel=1e-8)
        assert fit.rms_residual < 1e-9

    def test_invariant_under_re_origin(self):
        alpha, c = 0.008, 1.8
        base = model_trajectory(alpha, c)
        shifted = PeakTrajectory(base.times + 17.5, base.positions - 230.0)
        fit = fit_hyperbolic(shifted)
        assert fit.alpha == pytest.approx(alpha, rel=1e-8)
        assert fit.c == pytest.approx(c, rel=1e-8)

    def test_refinement_never_worse_than_linearized_start(self):
        rng_t = np.arange(0.0, 300.0 + 1e-9, 0.5)
        x = predict_relativistic(0.0153, 1.9, rng_t)[0]
        x = x + 0.3 * np.sin(0.7 * rng_t)  # deterministic disturbance
        traj = PeakTrajectory(rng_t, x)
        a0, c0 = _linearized_start(rng_t, x - x[0])
        stage1 = x - x[0] - predict_relativistic(a0, c0, rng_t)[0]
        stage1_rms = math.sqrt(float(stage1 @ stage1) / rng_t.size)
        fit = fit_hyperbolic(traj)
        assert fit.rms_residual <= stage1_rms + 1e-15

    def test_fallback_when_barely_relativistic(self):
        alpha, c = 0.001, 1.9
        traj = model_trajectory(alpha, c, t_max=100.0)  # alpha t/c ~ 0.05
        with pytest.warns(FitInstabilityWarning):
            fit = fit_hyperbolic(traj)
        assert fit.method == "parabola-fallback"
        assert math.isnan(fit.c)
        assert fit.alpha == pytest.approx(alpha, rel=1e-3)

    def test_needs_ten_points(self):
        t = np.arange(0.0, 2.0, 0.25)
        with pytest.raises(DomainError):
            fit_hyperbolic(PeakTrajectory(t, t * t))

    def test_report_fields(self):
        fit = fit_hyperbolic(model_trajectory(0.0153, 1.9))
        assert fit.n_points == 1201
        assert fit.t_range == (0.0, 300.0)
        text = fit.summary()
        for key in ("alpha", "c", "rms_residual", "method", "n_points", "t_range"):
            assert key in text

    def test_fallback_summary_hides_c(self):
        with pytest.warns(FitInstabilityWarning):
            fit = fit_hyperbolic(model_trajectory(0.001, 1.9, t_max=100.0))
        assert "c = --" in fit.summary()


class TestFitParabola:
    def test_exact_parabola(self):
        t = np.arange(0.0, 30.0, 0.25)
        assert fit_parabola(PeakTrajectory(t, 0.5 * 0.002 * t * t)) == pytest.approx(
            0.002, abs=1e-12
        )

    def test_linear_data_zero_curvature(self):
        t = np.arange(0.0, 30.0, 0.25)
        assert abs(fit_parabola(PeakTrajectory(t, 3.0 * t))) < 1e-10

    def test_needs_three_points(self):
        with pytest.raises(DomainError):
            fit_parabola(PeakTrajectory([0.0, 1.0], [0.0, 1.0]))


class TestFitScaling:
    def test_exact_power_law(self):
        points = [(dx, 2.0 * dx**3) for dx in (0.05, 0.1, 0.15, 0.2)]
        exponent, prefactor = fit_scaling(points)
        assert exponent == pytest.approx(3.0, abs=1e-10)
        assert prefactor == pytest.approx(2.0, abs=1e-10)

    def test_reference_alpha_values(self):
        exponent, prefactor = fit_scaling(list(TABLE_ALPHA.items()))
        assert exponent == pytest.approx(3.0, abs=0.15)
        assert prefactor == pytest.approx(2.0, rel=0.20)

    def test_degenerate_inputs(self):
        with pytest.raises(DomainError):
            fit_scaling([(0.1, 0.002)])
        with pytest.raises(DomainError):
            fit_scaling([(0.1, 0.002), (0.1, 0.002), (0.1, 0.002)])
        with pytest.raises(DomainError):
            fit_scaling([(0.1, 0.002), (0.2, -0.01), (0.3, 0.05)])


class TestBlochReference:
    def test_starts_at_zero(self):
        assert bloch_com_reference(0.01, 0.0) == 0.0

    def test_amplitude_maximum(self):
        v0 = 2.0 * math.pi / 1000.0
        assert bloch_com_reference(v0, math.pi / v0) == pytest.approx(
            4.0 / v0
        )  # 2000/pi ~ 636.6 sites
        assert 4.0 / v0 == pytest.approx(2000.0 / math.pi)

    def test_initial_acceleration_from_taylor(self):
        # x ~ J V0 t^2 for small t, i.e. acceleration 2 J V0
        v0 = 0.01
        h = 1e-3
        accel = (
            bloch_com_reference(v0, 2 * h)
            - 2 * bloch_com_reference(v0, h)
            + bloch_com_reference(v0, 0.0)
        ) / h**2
        assert accel == pytest.approx(2.0 * v0, rel=1e-4)

    def test_zero_tilt_rejected(self):
        with pytest.raises(DomainError):
            bloch_com_reference(0.0, 1.0)


class TestFitContainer:
    def test_dataclass_fields(self):
        fit = RelativisticFit(0.0153, 1.9, 0.1, "refined", 100, (0.0, 300.0))
        assert fit.alpha > 0 and fit.c > 0
        assert math.isfinite(fit.rms_residual)
