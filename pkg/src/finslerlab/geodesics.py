"""Sprays and fixed-step RK4 geodesics of real metrics, with a straightness measure.

The geodesic equation is ``x'' + 2 G(x, x') = 0`` with spray coefficients

    G^a = 1/4 g^{ab} ((F^2)_{x^c u^b} u^c - (F^2)_{x^b}),   g = 1/2 (F^2)_{uu}.
"""

from dataclasses import dataclass, field

import numpy as np

from . import calculus
from .errors import DomainError, FinslerError, SingularMetric, UsageError
from .metrics import REAL, MetricField, RealTangentSample

DOMAIN_MARGIN = 1e-3

COMPLETED = "completed"
LEFT_DOMAIN = "left-domain"
STEP_FAILURE = "step-failure"


def _real_metric(metric):
    if metric.kind != REAL:
        raise UsageError("geodesics are integrated for real metrics; use to_real() first")
    return metric


def spray_coefficients(metric: MetricField, s: RealTangentSample) -> np.ndarray:
    _real_metric(metric)
    b = calculus.real_jet(metric, s).f2
    g = 0.5 * b.uu
    try:
        chol = np.linalg.cholesky(0.5 * (g + g.T))
    except np.linalg.LinAlgError:
        raise SingularMetric(f"fundamental tensor not positive definite at x={s.x}") from None
    rhs = b.xu @ s.u - b.x
    y = np.linalg.solve(chol, rhs)
    return 0.25 * np.linalg.solve(chol.T, y)


def projective_factor(metric: MetricField, s: RealTangentSample) -> tuple[float, float]:
    """Best ``P`` with ``G ~ P u`` and the size of the remainder ``|G - P u|``.

    A vanishing remainder is the spray-side signature of projective flatness.
    """
    G = spray_coefficients(metric, s)
    P = float(G @ s.u / (s.u @ s.u))
    return P, float(np.linalg.norm(G - P * s.u))


@dataclass
class GeodesicTrace:
    t: np.ndarray
    x: np.ndarray
    u: np.ndarray
    termination: str
    deviation: float = 0.0
    length: float = 0.0
    message: str = field(default="")

    def rows(self):
        return np.column_stack([self.t, self.x, self.u])


def _inside(metric, x, margin):
    if not metric.contains(x):
        return False
    for k in range(x.size):
        for sign in (1.0, -1.0):
            probe = x.copy()
            probe[k] += sign * margin
            if not metric.contains(probe):
                return False
    return True


def straightness_deviation(x: np.ndarray, direction: np.ndarray) -> tuple[float, float]:
    """(max distance of the points to the line x[0] + s·direction) / path length, and the length."""
    d = direction / np.linalg.norm(direction)
    rel = x - x[0]
    perp = rel - np.outer(rel @ d, d)
    length = float(np.sum(np.linalg.norm(np.diff(x, axis=0), axis=1)))
    if length == 0.0:
        return 0.0, 0.0
    return float(np.max(np.linalg.norm(perp, axis=1)) / length), length


def integrate_geodesic(metric: MetricField, x0, u0, T: float = 1.0, N: int = 1000,
                       margin: float = DOMAIN_MARGIN) -> GeodesicTrace:
    """Classical RK4 with step T/N on (x, x'); stops early near the domain boundary."""
    _real_metric(metric)
    x = np.asarray(x0, dtype=float).copy()
    u = np.asarray(u0, dtype=float).copy()
    if x.size != metric.dim or u.size != metric.dim:
        raise UsageError("x0 and u0 must match the metric dimension")
    if not np.any(u != 0):
        raise UsageError("initial velocity must be nonzero")
    if not metric.contains(x):
        raise DomainError("initial point outside the domain")
    N = int(N)
    if N < 1 or not T > 0:
        raise UsageError("need T > 0 and N >= 1")
    dt = T / N

    def rhs(y):
        xx, uu = y[:metric.dim], y[metric.dim:]
        return np.concatenate([uu, -2.0 * spray_coefficients(metric, RealTangentSample(xx, uu))])

    ts, xs, us = [0.0], [x.copy()], [u.copy()]
    y = np.concatenate([x, u])
    status, message = COMPLETED, ""
    for step in range(N):
        try:
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * dt * k1)
            k3 = rhs(y + 0.5 * dt * k2)
            k4 = rhs(y + dt * k3)
        except DomainError as exc:
            status, message = LEFT_DOMAIN, str(exc)
            break
        except FinslerError as exc:
            status, message = STEP_FAILURE, str(exc)
            break
        y_next = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not _inside(metric, y_next[:metric.dim], margin):
            status = LEFT_DOMAIN
            message = f"trajectory reached the domain margin at t={(step + 1) * dt:.6g}"
            break
        y = y_next
        ts.append((step + 1) * dt)
        xs.append(y[:metric.dim].copy())
        us.append(y[metric.dim:].copy())
    X = np.array(xs)
    dev, length = straightness_deviation(X, np.asarray(u0, dtype=float))
    return GeodesicTrace(np.array(ts), X, np.array(us), status, dev, length, message)


def rk4_convergence_ratio(metric: MetricField, x0, u0, T: float, N: int,
                          N_ref: int = 8192) -> float:
    """Endpoint error against an N_ref-step reference at N steps divided by that at 2N."""
    ref = integrate_geodesic(metric, x0, u0, T, N_ref)
    coarse = integrate_geodesic(metric, x0, u0, T, N)
    fine = integrate_geodesic(metric, x0, u0, T, 2 * N)
    for tr in (ref, coarse, fine):
        if tr.termination != COMPLETED:
            raise UsageError("convergence check needs trajectories that stay in the domain")
    e1 = np.linalg.norm(coarse.x[-1] - ref.x[-1])
    e2 = np.linalg.norm(fine.x[-1] - ref.x[-1])
    return float(e1 / e2)
