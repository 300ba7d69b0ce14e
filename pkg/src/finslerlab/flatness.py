"""Projective/dual flatness residuals (real and complex), the identities used to
prove the rigidity theorem, and the rigidity scan.

Residuals (Einstein summation over repeated indices):

* Hamel, real:    R_a = F_{x^b u^a} u^b - F_{x^a}
* dual, real:     D_a = (F^2)_{x^b u^a} u^b - 2 (F^2)_{x^a}
* projective, complex:
      P_i = F_{z^j v^i} v^j + F_{zbar^j v^i} conj(v^j) - F_{z^i}
* dual, complex:
      Q_i = (F^2)_{z^j v^i} v^j + (F^2)_{zbar^j v^i} conj(v^j) - 2 (F^2)_{z^i}

For a complex metric with real form F°, ``P_i = (R_i - i R_{i+n}) / 2`` and
``Q_i = (D_i - i D_{i+n}) / 2``.

Raw residuals are reported with relative versions divided by
``1 + |F| + max|blocks used|``; verdicts use the relative numbers.
"""

from dataclasses import dataclass, field

import numpy as np

from . import calculus
from .axioms import COMPLEX_SCALARS, REAL_SCALARS, homogeneity_residual
from .errors import FinslerError, UsageError
from .metrics import COMPLEX, REAL, MetricField
from .sampling import SampleSpec, draw_samples

FLAT_TOL = 1e-8
NONFLAT_TOL = 1e-4
HOMOG_TOL = 1e-9

FLAT = "FLAT"
NON_FLAT = "NON-FLAT"
INCONCLUSIVE = "INCONCLUSIVE"

MINKOWSKI = "MINKOWSKI"
EXCLUDED = "EXCLUDED"
ANOMALY = "ANOMALY"


def verdict(rel: float, flat_tol: float = FLAT_TOL, nonflat_tol: float = NONFLAT_TOL) -> str:
    if rel <= flat_tol:
        return FLAT
    if rel >= nonflat_tol:
        return NON_FLAT
    return INCONCLUSIVE


@dataclass(frozen=True)
class ResidualVector:
    kind: str  # hamel | dualflat | complex-pf | complex-df
    components: np.ndarray
    scale: float = 1.0

    @property
    def norm(self) -> float:
        return float(np.max(np.abs(self.components)))

    @property
    def rel(self) -> float:
        return self.norm / self.scale


def _scale(value, *blocks):
    return 1.0 + abs(value) + max(float(np.max(np.abs(b))) for b in blocks)


def _real_jet(metric, s, jet):
    if metric.kind != REAL:
        raise UsageError("expected a real metric")
    return jet if jet is not None else calculus.real_jet(metric, s)


def _complex_jet(metric, s, jet):
    if metric.kind != COMPLEX:
        raise UsageError("expected a complex metric")
    return jet if jet is not None else calculus.complex_jet(metric, s)


def hamel_residual(metric: MetricField, s, jet=None) -> ResidualVector:
    b = _real_jet(metric, s, jet).f
    r = b.xu @ s.u - b.x
    return ResidualVector("hamel", r, _scale(b.value, b.x, b.xu))


def dualflat_residual(metric: MetricField, s, jet=None) -> ResidualVector:
    b = _real_jet(metric, s, jet).f2
    r = b.xu @ s.u - 2.0 * b.x
    return ResidualVector("dualflat", r, _scale(b.value, b.x, b.xu))


def _complex_flat(b, v, factor):
    return b.zv @ v + b.zbarv @ v.conj() - factor * b.z


def complex_pf_residual(metric: MetricField, s, jet=None) -> ResidualVector:
    b = _complex_jet(metric, s, jet).f
    return ResidualVector("complex-pf", _complex_flat(b, s.v, 1.0),
                          _scale(b.value, b.z, b.zv, b.zbarv))


def complex_df_residual(metric: MetricField, s, jet=None) -> ResidualVector:
    b = _complex_jet(metric, s, jet).f2
    return ResidualVector("complex-df", _complex_flat(b, s.v, 2.0),
                          _scale(b.value, b.z, b.zv, b.zbarv))


# ---------------------------------------------------------------- proof chain

PROOF_CHAIN_F = ("e", "d", "c", "r", "ff", "v", "zgrad")
PROOF_CHAIN_F2 = ("e1", "d1", "c1", "r1", "r2", "f1", "v1", "zgrad2")


@dataclass(frozen=True)
class ProofChainReport:
    """Each intermediate identity of the rigidity argument as a standalone residual.

    For F:  e = |F_{z^i} v^i - F_{zbar^i} vbar^i|,
            d = max_i |F_{z^i} + F_{z^j v^i} v^j - F_{zbar^j v^i} vbar^j|,
            c = max_i |F_{z^j v^i} v^j|,  r = |F_{z^j} v^j|,
            ff = max_i |F_{z^j vbar^i} v^j|,  v = max_i |F_{zbar^j v^i} vbar^j|,
            zgrad = max_i |F_{z^i}|.
    For F^2 the analogues e1, d1, v1, zgrad2 and the factor-3 relations
    c1 = max_i |(F^2)_{zbar^j v^i} vbar^j - 3 (F^2)_{z^j v^i} v^j|,
    r1 = |(F^2)_{zbar^j} vbar^j - 3 (F^2)_{z^j} v^j|, r2 (roles swapped),
    f1 = max(|(F^2)_{z^j} v^j|, |(F^2)_{zbar^j} vbar^j|).
    """

    entries: dict

    def __getitem__(self, key):
        return self.entries[key]


def proof_chain(metric: MetricField, s, jet=None) -> ProofChainReport:
    j = _complex_jet(metric, s, jet)
    v, vb = s.v, s.v.conj()
    a, b = j.f, j.f2

    zv_v = a.zv @ v
    zbv_vb = a.zbarv @ vb
    # d2F/dz^j dvbar^i = conj(d2F/dzbar^j dv^i) since F is real
    zvbar_v = a.zbarv.conj() @ v
    out = {
        "e": abs(a.z @ v - a.zbar @ vb),
        "d": np.max(np.abs(a.z + zv_v - zbv_vb)),
        "c": np.max(np.abs(zv_v)),
        "r": abs(a.z @ v),
        "ff": np.max(np.abs(zvbar_v)),
        "v": np.max(np.abs(zbv_vb)),
        "zgrad": np.max(np.abs(a.z)),
    }
    zv2 = b.zv @ v
    zbv2 = b.zbarv @ vb
    rz, rzb = b.z @ v, b.zbar @ vb
    out.update({
        "e1": abs(rz - rzb),
        "d1": np.max(np.abs(b.z + zv2 - zbv2)),
        "c1": np.max(np.abs(zbv2 - 3.0 * zv2)),
        "r1": abs(rzb - 3.0 * rz),
        "r2": abs(rz - 3.0 * rzb),
        "f1": max(abs(rz), abs(rzb)),
        "v1": np.max(np.abs(zbv2)),
        "zgrad2": np.max(np.abs(b.z)),
    })
    return ProofChainReport({k: float(val) for k, val in out.items()})


def homogeneity_contraction_gap(metric: MetricField, s, jet=None) -> float:
    """|sum_i v^i P_i - (1/2 (F_{z^j} v^j + F_{zbar^j} vbar^j) - F_{z^i} v^i)|.

    Zero for every complex-homogeneous metric, flat or not.
    """
    j = _complex_jet(metric, s, jet)
    P = _complex_flat(j.f, s.v, 1.0)
    a = j.f
    rhs = 0.5 * (a.z @ s.v + a.zbar @ s.v.conj()) - a.z @ s.v
    return float(abs(s.v @ P - rhs))


# ---------------------------------------------------------------- rigidity scan

@dataclass
class RigidityScan:
    metric: str
    params: dict
    samples: int
    max_pf: float = 0.0
    max_df: float = 0.0
    max_zgrad: float = 0.0
    max_zgrad2: float = 0.0
    max_pf_rel: float = 0.0
    max_df_rel: float = 0.0
    max_zgrad_rel: float = 0.0
    max_homogeneity: float = 0.0
    pf_verdict: str = ""
    df_verdict: str = ""
    zgrad_verdict: str = ""
    classification: str = ""
    failures: list = field(default_factory=list)

    @property
    def corollary_consistent(self) -> bool:
        """The projective and dual verdicts never split into FLAT vs NON-FLAT."""
        return {self.pf_verdict, self.df_verdict} != {FLAT, NON_FLAT}

    def to_dict(self):
        out = {k: getattr(self, k) for k in (
            "metric", "params", "samples", "max_pf", "max_df", "max_zgrad", "max_zgrad2",
            "max_pf_rel", "max_df_rel", "max_zgrad_rel", "max_homogeneity",
            "pf_verdict", "df_verdict", "zgrad_verdict", "classification")}
        out["corollary_consistent"] = self.corollary_consistent
        out["failures"] = [list(f) for f in self.failures]
        return out


def classify(pf_verdict, df_verdict, zgrad_verdict) -> str:
    if pf_verdict == df_verdict == zgrad_verdict == FLAT:
        return MINKOWSKI
    if NON_FLAT in (pf_verdict, df_verdict):
        return NON_FLAT
    if pf_verdict == df_verdict == FLAT and zgrad_verdict == NON_FLAT:
        # flat yet base-point dependent: would contradict the theorem
        return ANOMALY
    return INCONCLUSIVE


def rigidity_scan(metric: MetricField, spec: SampleSpec, flat_tol: float = FLAT_TOL,
                  nonflat_tol: float = NONFLAT_TOL, homog_tol: float = HOMOG_TOL,
                  samples=None) -> RigidityScan:
    """Maxima of the complex flatness residuals and of the z-gradients over seeded samples.

    Metrics failing complex homogeneity are EXCLUDED: the theorem's
    hypotheses do not hold for them.
    """
    if metric.kind != COMPLEX:
        raise UsageError("rigidity_scan expects a complex metric")
    scan = RigidityScan(metric.name, dict(metric.params), spec.count)
    if samples is None:
        samples = draw_samples(metric, spec)
    for k, s in enumerate(samples):
        try:
            j = calculus.complex_jet(metric, s)
            hom = homogeneity_residual(metric, s, REAL_SCALARS + COMPLEX_SCALARS)
        except FinslerError as exc:
            scan.failures.append((k, str(exc)))
            continue
        pf = complex_pf_residual(metric, s, j)
        df = complex_df_residual(metric, s, j)
        zg = float(np.max(np.abs(j.f.z)))
        scan.max_pf = max(scan.max_pf, pf.norm)
        scan.max_df = max(scan.max_df, df.norm)
        scan.max_zgrad = max(scan.max_zgrad, zg)
        scan.max_zgrad2 = max(scan.max_zgrad2, float(np.max(np.abs(j.f2.z))))
        scan.max_pf_rel = max(scan.max_pf_rel, pf.rel)
        scan.max_df_rel = max(scan.max_df_rel, df.rel)
        scan.max_zgrad_rel = max(scan.max_zgrad_rel, zg / (1.0 + j.f.value + zg))
        scan.max_homogeneity = max(scan.max_homogeneity, hom / (1.0 + j.f.value))
    scan.pf_verdict = verdict(scan.max_pf_rel, flat_tol, nonflat_tol)
    scan.df_verdict = verdict(scan.max_df_rel, flat_tol, nonflat_tol)
    scan.zgrad_verdict = verdict(scan.max_zgrad_rel, flat_tol, nonflat_tol)
    if scan.failures:
        scan.classification = INCONCLUSIVE
    elif scan.max_homogeneity > homog_tol:
        scan.classification = EXCLUDED
    else:
        scan.classification = classify(scan.pf_verdict, scan.df_verdict, scan.zgrad_verdict)
    return scan
