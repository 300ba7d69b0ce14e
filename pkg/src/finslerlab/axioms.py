"""Definitional checks: homogeneity, strong convexity, strong pseudoconvexity."""

from dataclasses import dataclass, field

import numpy as np

from . import calculus
from .errors import FinslerError, NumericsError, UsageError
from .metrics import (COMPLEX, REAL, ComplexTangentSample, MetricField, RealTangentSample,
                      check_sample, evaluate, to_real)
from .sampling import SampleSpec, draw_samples

REAL_SCALARS = (2.0, -1.0, 0.5)
COMPLEX_SCALARS = (1j, np.exp(1j * np.pi / 4), 2.0 * np.exp(2j))
TOL_HOMOG = 1e-9
TOL_POSDEF = 1e-12
SYMMETRY_TOL = 1e-10


def scale_sample(s, lam):
    """The sample with its tangent vector multiplied by ``lam``; base point fixed."""
    if isinstance(s, RealTangentSample):
        if np.iscomplexobj(lam) or isinstance(lam, complex):
            raise UsageError("real samples only scale by real lambda")
        return RealTangentSample(s.x, lam * s.u)
    return ComplexTangentSample(s.z, lam * s.v)


def homogeneity_residual(metric: MetricField, s, scalars=None) -> float:
    """max over lambda of |F(x, lam u) - |lam| F(x, u)|."""
    if scalars is None:
        scalars = REAL_SCALARS if metric.kind == REAL else REAL_SCALARS + COMPLEX_SCALARS
    scalars = list(scalars)
    if any(lam == 0 for lam in scalars):
        raise UsageError("homogeneity scalars must be nonzero")
    f = evaluate(metric, s)
    return max(abs(evaluate(metric, scale_sample(s, lam)) - abs(lam) * f) for lam in scalars)


def homogeneity_profile(metric: MetricField, s) -> dict:
    """Residuals for absolute (all real lambda), positive and complex homogeneity.

    The Funk metric is positively but not absolutely homogeneous, so both
    real variants are reported rather than one verdict.
    """
    out = {
        "absolute": homogeneity_residual(metric, s, REAL_SCALARS),
        "positive": homogeneity_residual(metric, s, [lam for lam in REAL_SCALARS if lam > 0]),
    }
    if metric.kind == COMPLEX:
        out["complex"] = homogeneity_residual(metric, s, REAL_SCALARS + COMPLEX_SCALARS)
    return out


def is_positive_definite(A) -> bool:
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        return False
    return True


def min_eigenvalue(A, hermitian_tol=SYMMETRY_TOL) -> float:
    A = np.asarray(A)
    scale = 1.0 + np.max(np.abs(A))
    if np.max(np.abs(A - A.conj().T)) > hermitian_tol * scale:
        raise NumericsError("matrix is not symmetric/Hermitian within tolerance")
    return float(np.linalg.eigvalsh(0.5 * (A + A.conj().T)).min())


@dataclass(frozen=True)
class FundamentalTensors:
    g: np.ndarray
    min_eig_g: float
    G: np.ndarray | None = None
    min_eig_G: float | None = None
    g_cholesky: bool = field(default=False)
    G_cholesky: bool | None = None


def fundamental_tensors(metric: MetricField, s) -> FundamentalTensors:
    """g = 1/2 d2F^2/du du (of F° for complex metrics) and G = d2F^2/dv dvbar."""
    check_sample(metric, s)
    if metric.kind == REAL:
        rj = calculus.real_jet(metric, s)
        g = 0.5 * rj.f2.uu
        return FundamentalTensors(g, min_eigenvalue(g), g_cholesky=is_positive_definite(g))
    rj = calculus.real_jet(to_real(metric), s.to_real())
    g = 0.5 * rj.f2.uu
    G = calculus.wirtinger_blocks(rj.f2, metric.dim).vvbar
    return FundamentalTensors(g, min_eigenvalue(g), G, min_eigenvalue(G),
                              is_positive_definite(g), is_positive_definite(G))


@dataclass
class ConvexityReport:
    metric: str
    samples: int
    min_eig_g: float
    min_eig_G: float | None
    strongly_convex: bool
    strongly_pseudoconvex: bool | None
    implication_holds: bool
    failures: list = field(default_factory=list)


def strong_convexity_report(metric: MetricField, spec: SampleSpec,
                            tol: float = TOL_POSDEF) -> ConvexityReport:
    """Sampled strong convexity of F (via F° for complex metrics) and pseudoconvexity.

    Also checks, sample by sample, that a positive definite g comes with a
    positive definite G; the converse is never asserted.
    """
    min_g = np.inf
    min_G = np.inf if metric.kind == COMPLEX else None
    implication = True
    failures = []
    for k, s in enumerate(draw_samples(metric, spec)):
        try:
            ft = fundamental_tensors(metric, s)
        except FinslerError as exc:
            failures.append((k, str(exc)))
            continue
        min_g = min(min_g, ft.min_eig_g)
        if ft.min_eig_G is not None:
            min_G = min(min_G, ft.min_eig_G)
            if ft.min_eig_g > tol and not ft.min_eig_G > tol:
                implication = False
    return ConvexityReport(
        metric=metric.name,
        samples=spec.count,
        min_eig_g=float(min_g),
        min_eig_G=None if min_G is None else float(min_G),
        strongly_convex=bool(min_g > tol) and not failures,
        strongly_pseudoconvex=None if min_G is None else bool(min_G > tol) and not failures,
        implication_holds=implication,
        failures=failures,
    )
