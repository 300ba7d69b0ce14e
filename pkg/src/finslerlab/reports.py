"""Build the check / rigidity reports the CLI serialises.

Reports are plain dicts with a fixed key order so that ``json.dumps`` gives
byte-identical output for identical inputs.
"""

from dataclasses import dataclass

import numpy as np

from . import __version__, axioms, calculus, flatness
from .errors import FinslerError
from .metrics import COMPLEX, MetricField, to_real
from .sampling import SampleSpec, draw_samples

PASS = "PASS"
FAIL = "FAIL"
SKIPPED = "SKIPPED"
INFO = "INFO"  # reported, never counted towards pass/fail
INCONCLUSIVE = "INCONCLUSIVE"

FD_TOL = 1e-5


@dataclass(frozen=True)
class Tolerances:
    homog: float = axioms.TOL_HOMOG
    posdef: float = axioms.TOL_POSDEF
    flat: float = flatness.FLAT_TOL
    nonflat: float = flatness.NONFLAT_TOL
    fd: float = FD_TOL


def _entry(name, max_abs, max_rel, tol, verdict, reason=None):
    out = {"name": name, "max_abs": _num(max_abs), "max_rel": _num(max_rel),
           "tolerance": tol, "verdict": verdict}
    if reason:
        out["reason"] = reason
    return out


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if np.isfinite(x) else None


def _skipped(name, tol, reason):
    return _entry(name, None, None, tol, SKIPPED, reason)


def _upper(name, max_abs, max_rel, tol):
    return _entry(name, max_abs, max_rel, tol, PASS if max_rel <= tol else FAIL)


def _flat(name, max_abs, max_rel, tol):
    v = flatness.verdict(max_rel, tol.flat, tol.nonflat)
    mapped = {flatness.FLAT: PASS, flatness.NON_FLAT: FAIL}.get(v, INCONCLUSIVE)
    return _entry(name, max_abs, max_rel, tol.flat, mapped)


def _posdef(name, min_eig, tol):
    return _entry(name, min_eig, min_eig, tol, PASS if min_eig > tol else FAIL)


class _Max:
    """Running maxima of absolute and relative values keyed by check name."""

    def __init__(self):
        self.abs = {}
        self.rel = {}

    def add(self, key, a, r):
        self.abs[key] = max(self.abs.get(key, 0.0), float(a))
        self.rel[key] = max(self.rel.get(key, 0.0), float(r))

    def get(self, key):
        return self.abs[key], self.rel[key]


def _header(metric, spec, command):
    return {
        "tool": "finslerlab",
        "version": __version__,
        "command": command,
        "metric": metric.name,
        "params": {k: metric.params[k] for k in sorted(metric.params)},
        "expression": metric.expression,
        "kind": metric.kind,
        "dim": metric.dim,
        "seed": spec.seed,
        "samples": spec.count,
        "sample_spec": spec.to_dict(),
    }


def check_report(metric: MetricField, spec: SampleSpec, tol: Tolerances = Tolerances(),
                 fd_check: bool = False) -> dict:
    """Run every applicable axiom and flatness check over seeded samples."""
    samples = draw_samples(metric, spec)
    acc = _Max()
    min_g = np.inf
    min_G = np.inf
    implication = True
    failures = []
    real_metric = to_real(metric) if metric.kind == COMPLEX else metric
    for k, s in enumerate(samples):
        try:
            rs = s.to_real() if metric.kind == COMPLEX else s
            rj = calculus.real_jet(real_metric, rs)
            f = rj.f.value
            prof = axioms.homogeneity_profile(metric, s)
            acc.add("homogeneity-absolute", prof["absolute"], prof["absolute"] / (1 + f))
            acc.add("homogeneity-positive", prof["positive"], prof["positive"] / (1 + f))
            euler = abs(rj.f.u @ rs.u - f)
            acc.add("euler-real", euler, euler / (1 + f))
            g = 0.5 * rj.f2.uu
            eig_g = axioms.min_eigenvalue(g)
            min_g = min(min_g, eig_g)
            h = flatness.hamel_residual(real_metric, rs, rj)
            d = flatness.dualflat_residual(real_metric, rs, rj)
            if metric.kind == COMPLEX:
                acc.add("hamel-real-form", h.norm, h.rel)
                acc.add("dualflat-real-form", d.norm, d.rel)
                acc.add("homogeneity-complex", prof["complex"], prof["complex"] / (1 + f))
                cj = calculus.ComplexJet2(calculus.wirtinger_blocks(rj.f, metric.dim),
                                          calculus.wirtinger_blocks(rj.f2, metric.dim))
                G = cj.f2.vvbar
                eig_G = axioms.min_eigenvalue(G)
                min_G = min(min_G, eig_G)
                if eig_g > tol.posdef and not eig_G > tol.posdef:
                    implication = False
                e1 = abs(cj.f.v @ s.v - 0.5 * f)
                acc.add("euler-complex", e1, e1 / (1 + f))
                e2 = float(np.max(np.abs(cj.f.zv.T @ s.v - 0.5 * cj.f.z)))
                acc.add("euler-mixed", e2, e2 / (1 + f + np.max(np.abs(cj.f.z))))
                p = flatness.complex_pf_residual(metric, s, cj)
                q = flatness.complex_df_residual(metric, s, cj)
                acc.add("complex-pf", p.norm, p.rel)
                acc.add("complex-df", q.norm, q.rel)
            else:
                acc.add("hamel", h.norm, h.rel)
                acc.add("dualflat", d.norm, d.rel)
            if fd_check:
                fd = calculus.fd_jet(real_metric, rs)
                disc = max(calculus.block_discrepancy(rj, fd).values())
                acc.add("fd-oracle", disc, disc)
        except FinslerError as exc:
            failures.append({"sample": k, "error": f"{type(exc).__name__}: {exc}"})

    checks = []
    if len(failures) == len(samples):
        report = _header(metric, spec, "check")
        report.update({"residuals": [], "classification": INCONCLUSIVE, "failures": failures})
        return report

    absolute = acc.get("homogeneity-absolute")
    positive = acc.get("homogeneity-positive")
    # |lambda|-homogeneity for negative real lambda is reported, not required: the
    # Funk metric is only positively homogeneous
    checks.append(_entry("homogeneity-absolute", *absolute, tol.homog, INFO,
                         "informational; positive homogeneity is the requirement"))
    checks.append(_upper("homogeneity-positive", *positive, tol.homog))
    if positive[1] <= tol.homog:
        checks.append(_upper("euler-real", *acc.get("euler-real"), tol.homog))
    else:
        checks.append(_skipped("euler-real", tol.homog, "metric is not positively homogeneous"))
    checks.append(_posdef("strong-convexity-min-eig-g", min_g, tol.posdef))

    if metric.kind == COMPLEX:
        hom_c = acc.get("homogeneity-complex")
        complex_homogeneous = hom_c[1] <= tol.homog
        checks.append(_upper("homogeneity-complex", *hom_c, tol.homog))
        if complex_homogeneous:
            checks.append(_upper("euler-complex", *acc.get("euler-complex"), tol.homog))
            checks.append(_upper("euler-mixed", *acc.get("euler-mixed"), tol.homog))
        else:
            for name in ("euler-complex", "euler-mixed"):
                checks.append(_skipped(name, tol.homog, "metric is not complex-homogeneous"))
        checks.append(_posdef("strong-pseudoconvexity-min-eig-G", min_G, tol.posdef))
        checks.append(_entry("convexity-implies-pseudoconvexity", None, None, tol.posdef,
                             PASS if implication else FAIL))
        checks.append(_flat("complex-pf", *acc.get("complex-pf"), tol))
        checks.append(_flat("complex-df", *acc.get("complex-df"), tol))
        checks.append(_flat("hamel-real-form", *acc.get("hamel-real-form"), tol))
        checks.append(_flat("dualflat-real-form", *acc.get("dualflat-real-form"), tol))
        if not complex_homogeneous:
            classification = flatness.EXCLUDED
        else:
            scan = flatness.rigidity_scan(metric, spec, tol.flat, tol.nonflat, tol.homog,
                                          samples=samples)
            classification = scan.classification
    else:
        checks.append(_flat("hamel", *acc.get("hamel"), tol))
        checks.append(_flat("dualflat", *acc.get("dualflat"), tol))
        verdicts = {c["verdict"] for c in checks if c["name"] in ("hamel", "dualflat")}
        classification = ("PROJECTIVELY-AND-DUALLY-FLAT" if verdicts == {PASS}
                          else "NON-FLAT" if FAIL in verdicts else INCONCLUSIVE)
    if fd_check:
        checks.append(_upper("fd-oracle", *acc.get("fd-oracle"), tol.fd))
    else:
        checks.append(_skipped("fd-oracle", tol.fd, "enable with --fd-check"))

    report = _header(metric, spec, "check")
    report.update({"residuals": checks, "classification": classification, "failures": failures})
    return report


def report_passes(report: dict) -> bool:
    return all(c["verdict"] in (PASS, SKIPPED, INFO) for c in report["residuals"]) \
        and not report["failures"]


def rigidity_row(metric: MetricField, spec: SampleSpec, tol: Tolerances = Tolerances()) -> dict:
    samples = draw_samples(metric, spec)
    scan = flatness.rigidity_scan(metric, spec, tol.flat, tol.nonflat, tol.homog, samples=samples)
    chain = {}
    for s in samples:
        try:
            entries = flatness.proof_chain(metric, s).entries
        except FinslerError:
            continue
        for key, val in entries.items():
            chain[key] = max(chain.get(key, 0.0), val)
    row = scan.to_dict()
    row["proof_chain_max"] = chain
    return row


def rigidity_report(rows: list[dict], metric: MetricField, spec: SampleSpec,
                    sweep: dict) -> dict:
    report = _header(metric, spec, "rigidity")
    report["sweep"] = {k: list(v) for k, v in sweep.items()}
    report["rows"] = rows
    return report


DECISIVE = (flatness.MINKOWSKI, flatness.NON_FLAT, flatness.EXCLUDED)


def rigidity_passes(report: dict) -> bool:
    """Every row decisive and the projective/dual verdicts never disagree."""
    return all(r["classification"] in DECISIVE and r["corollary_consistent"] and not r["failures"]
               for r in report["rows"])
