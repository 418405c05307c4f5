"""Relativistic kinematics: forward predictions for uniform proper
acceleration, the two-parameter trajectory fit, the single-parameter parabola
fallback, and the power-law regression of alpha against the lattice spacing.

A wavepacket with constant proper acceleration alpha and light speed c,
starting from rest at the origin, follows the hyperbolic worldline

    x(t) = (c^2/alpha) (sqrt(1 + (alpha t / c)^2) - 1)
    v(t) = alpha t / sqrt(1 + (alpha t / c)^2)
    a(t) = alpha / (1 + (alpha t / c)^2)^(3/2)

equivalently (alpha x / c^2 + 1)^2 - (alpha t / c)^2 = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FitInstabilityWarning
from .lattice import J
from .diagnostics import PeakTrajectory

RELATIVISTIC_GATE = 0.3  # accept the two-parameter fit when alpha*t_max/c >= this
_LM_MAX_ITER = 100
_LM_REL_TOL = 1e-10


@dataclass
class RelativisticFit:
    """Fitted proper acceleration and effective light speed, with residual
    diagnostics.  For the parabola fallback only alpha is meaningful and c is
    NaN."""

    alpha: float
    c: float
    rms_residual: float
    method: str  # "linearized" | "refined" | "parabola-fallback"
    n_points: int = 0
    t_range: tuple[float, float] = (0.0, 0.0)

    def summary(self) -> str:
        c_txt = f"{self.c:.9g}" if math.isfinite(self.c) else "--"
        return (
            f"alpha = {self.alpha:.9g}\n"
            f"c = {c_txt}\n"
            f"rms_residual = {self.rms_residual:.9g}\n"
            f"method = {self.method}\n"
            f"n_points = {self.n_points}\n"
            f"t_range = {self.t_range[0]:.9g} {self.t_range[1]:.9g}\n"
        )


def predict_relativistic(alpha: float, c: float, t):
    """(x, v, a) in the lattice rest frame at time t; x(0) = v(0) = 0, a(0) = alpha."""
    if not (alpha > 0 and c > 0):
        raise DomainError("alpha and c must be positive")
    t = np.asarray(t, dtype=float)
    s = np.sqrt(1.0 + (alpha * t / c) ** 2)
    x = (c * c / alpha) * (s - 1.0)
    v = alpha * t / s
    a = alpha / s**3
    if t.ndim == 0:
        return float(x), float(v), float(a)
    return x, v, a


def _shifted(trajectory: PeakTrajectory) -> tuple[np.ndarray, np.ndarray]:
    t = trajectory.times - trajectory.times[0]
    x = trajectory.positions - trajectory.positions[0]
    return t, x


def _linearized_start(t: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    """The worldline identity rearranges exactly to x = (alpha/2) t^2
    - (alpha/(2 c^2)) x^2, linear in {t^2, x^2}: ordinary least squares gives
    a deterministic, derivative-free starting point."""
    basis = np.column_stack([t * t, x * x])
    coef, *_ = np.linalg.lstsq(basis, x, rcond=None)
    alpha = 2.0 * coef[0]
    if alpha <= 0 or coef[1] >= 0:
        return alpha, math.nan
    return alpha, math.sqrt(-coef[0] / coef[1])


def _refine(
    t: np.ndarray, x: np.ndarray, alpha: float, c: float
) -> tuple[float, float, float, str]:
    """Damped Gauss-Newton on the worldline model; steps are only accepted when
    they lower the residual, so refinement never ends worse than the start."""
    p = np.array([alpha, c])
    r = x - predict_relativistic(p[0], p[1], t)[0]
    cost = float(r @ r)
    lam = 1e-3
    method = "linearized"
    for _ in range(_LM_MAX_ITER):
        a, cc = p
        s = np.sqrt(1.0 + (a * t / cc) ** 2)
        d_alpha = -(cc * cc / (a * a)) * (s - 1.0) + t * t / s
        d_c = (2.0 * cc / a) * (s - 1.0) - a * t * t / (cc * s)
        jac = np.column_stack([d_alpha, d_c])
        jtj = jac.T @ jac
        try:
            step = np.linalg.solve(jtj + lam * np.diag(np.diag(jtj)), jac.T @ r)
        except np.linalg.LinAlgError:
            break
        cand = p + step
        if not (cand[0] > 0 and cand[1] > 0):
            lam *= 10.0
            continue
        r_cand = x - predict_relativistic(cand[0], cand[1], t)[0]
        cost_cand = float(r_cand @ r_cand)
        if cost_cand < cost:
            rel = float(np.max(np.abs(step) / np.abs(cand)))
            p, r, cost = cand, r_cand, cost_cand
            lam = max(lam * 0.1, 1e-14)
            method = "refined"
            if rel < _LM_REL_TOL:
                break
        else:
            lam *= 10.0
            if lam > 1e12:
                break
    return float(p[0]), float(p[1]), math.sqrt(cost / t.size), method


def fit_parabola(trajectory: PeakTrajectory) -> float:
    """Least-squares x = (a/2) t^2 + v0 t with the origin pinned; only the
    curvature a is reported.  The drift term keeps the curvature estimate
    unbiased (exactly zero for linear data)."""
    if len(trajectory) < 3:
        raise DomainError("need at least 3 points")
    t, x = _shifted(trajectory)
    basis = np.column_stack([0.5 * t * t, t])
    coef, _, rank, _ = np.linalg.lstsq(basis, x, rcond=None)
    if rank < 2:
        raise DomainError("degenerate time grid")
    return float(coef[0])


def fit_hyperbolic(trajectory: PeakTrajectory) -> RelativisticFit:
    """Two-parameter fit of the peak trajectory to the hyperbolic worldline.

    Stage 1 seeds (alpha, c) from the linearized rearrangement; stage 2 refines
    by damped least squares.  If the data barely enter the relativistic regime
    (fitted alpha*t_max/c < 0.3) the two-parameter fit is unreliable: a
    FitInstabilityWarning is emitted and only alpha from the parabola fit is
    reported.
    """
    if len(trajectory) < 10:
        raise DomainError("need at least 10 points")
    t, x = _shifted(trajectory)
    t_range = (float(trajectory.times[0]), float(trajectory.times[-1]))

    def fallback(reason: str) -> RelativisticFit:
        warnings.warn(
            f"two-parameter fit unstable ({reason}); falling back to a parabola",
            FitInstabilityWarning,
            stacklevel=3,
        )
        alpha = fit_parabola(trajectory)
        resid = x - 0.5 * alpha * t * t
        return RelativisticFit(
            alpha,
            math.nan,
            math.sqrt(float(resid @ resid) / t.size),
            "parabola-fallback",
            n_points=t.size,
            t_range=t_range,
        )

    alpha0, c0 = _linearized_start(t, x)
    if not (alpha0 > 0 and math.isfinite(c0) and c0 > 0):
        return fallback("linearized initializer found no hyperbola")
    alpha, c, rms, method = _refine(t, x, alpha0, c0)
    if alpha * t[-1] / c < RELATIVISTIC_GATE:
        return fallback(
            f"alpha*t_max/c = {alpha * t[-1] / c:.3f} < {RELATIVISTIC_GATE}"
        )
    return RelativisticFit(alpha, c, rms, method, n_points=t.size, t_range=t_range)


def fit_scaling(points: list[tuple[float, float]]) -> tuple[float, float]:
    """log-log regression of alpha against delta_x; returns (exponent,
    prefactor) of alpha = prefactor * delta_x^exponent."""
    if len(points) < 3:
        raise DomainError("need at least 3 (delta_x, alpha) points")
    dx = np.array([p[0] for p in points], dtype=float)
    alpha = np.array([p[1] for p in points], dtype=float)
    if np.any(dx <= 0) or np.any(alpha <= 0):
        raise DomainError("delta_x and alpha must all be positive")
    if np.unique(dx).size < 2:
        raise DomainError("regression is rank-deficient: all delta_x identical")
    slope, intercept = np.polyfit(np.log(dx), np.log(alpha), 1)
    return float(slope), float(math.exp(intercept))


def bloch_com_reference(V0: float, t):
    """Centre-of-mass worldline in a tilted lattice, 2 (J/V0) (1 - cos V0 t).

    Its Taylor expansion gives x ~ J*V0*t^2, i.e. an initial uniform
    acceleration of 2*J*V0.
    """
    if V0 == 0:
        raise DomainError("V0 = 0 has no Bloch oscillation; use free propagation")
    return 2.0 * (J / V0) * (1.0 - np.cos(V0 * np.asarray(t, dtype=float)))
