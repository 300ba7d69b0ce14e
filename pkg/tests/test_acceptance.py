"""Exit criteria, one test per criterion, each printing a PASS/FAIL line.

Tolerances are the ones the criteria state; nothing here is tuned.
"""

import math
import subprocess
import sys

import numpy as np
import pytest

from finslerlab import axioms, calculus, dsl, flatness, geodesics
from finslerlab.metrics import (ComplexTangentSample, RealTangentSample, evaluate, make_metric,
                                to_real, zoo_list)
from finslerlab.sampling import SampleSpec, draw_samples

from .conftest import ACCEPTANCE_LINES

ANCHOR = ComplexTangentSample([0, 0], [0, 1])
SPEC_200 = SampleSpec(seed=2024, count=200, radius=0.8)
T_VALUES = (0.05, 0.1, 0.2)
C_VALUES = (0.1, 0.3, 1.0)


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    assert ok, line


def test_01_funk_flatness():
    worst_h = worst_d = 0.0
    for m in (2, 3):
        funk = make_metric("funk-real", m)
        samples = draw_samples(funk, SPEC_200)
        assert all(np.linalg.norm(s.x) <= 0.8 for s in samples)
        for s in samples:
            j = calculus.real_jet(funk, s)
            worst_h = max(worst_h, flatness.hamel_residual(funk, s, j).rel)
            worst_d = max(worst_d, flatness.dualflat_residual(funk, s, j).rel)
    record(1, "Funk projectively and dually flat", max(worst_h, worst_d) <= 1e-7,
           f"max rel hamel {worst_h:.2e}, dualflat {worst_d:.2e} (tol 1e-7)")


def test_02_funk_complex_homogeneity_failure():
    metric = make_metric("funk-complex-form")
    s = ComplexTangentSample([0.5, 0], [1, 0])
    res = axioms.homogeneity_residual(metric, s, [1j])
    # independent direct evaluation of the complex Funk formula
    z, v = np.array([0.5, 0]), np.array([1j, 0])
    re_zv = np.real(z @ v.conj())
    d = 1 - np.real(z @ z.conj())
    f_iv = (math.sqrt(d * np.real(v @ v.conj()) + re_zv ** 2) + re_zv) / d
    direct = abs(f_iv - 2.0)
    ok = abs(res - 0.845299) <= 1e-5 and abs(direct - 0.845299) <= 1e-5
    record(2, "Funk complex form fails complex homogeneity", ok,
           f"residual {res:.6f}, direct {direct:.6f} (expected 0.845299 +- 1e-5)")


def test_03_theorem_forward_direction():
    cases = [("complex-euclidean", {}), ("complex-hermitian-const", {}),
             ("complex-minkowski-phi", {"eps": 0.0}), ("complex-minkowski-phi", {"eps": 0.1})]
    details, ok = [], True
    for name, params in cases:
        scan = flatness.rigidity_scan(make_metric(name, **params), SPEC_200)
        worst = max(scan.max_pf, scan.max_df, scan.max_zgrad, scan.max_zgrad2)
        ok &= scan.classification == flatness.MINKOWSKI and worst <= 1e-9
        details.append(f"{name}{params or ''}: {scan.classification} max {worst:.1e}")
    record(3, "z-independent metrics are MINKOWSKI", ok, "; ".join(details))


def test_04_theorem_converse_evidence():
    ok = True
    classes = []
    for t in T_VALUES:
        metric = make_metric("perturbed-family", t=t)
        scan = flatness.rigidity_scan(metric, SPEC_200)
        classes.append(scan.classification)
        P = flatness.complex_pf_residual(metric, ANCHOR).components[0]
        Q = flatness.complex_df_residual(metric, ANCHOR).components[0]
        fd = calculus.fd_jet(metric, ANCHOR)
        P_fd = flatness.complex_pf_residual(metric, ANCHOR, fd).components[0]
        Q_fd = flatness.complex_df_residual(metric, ANCHOR, fd).components[0]
        ok &= abs(P + t / 4) <= 1e-6 and abs(Q + t) <= 1e-6
        ok &= abs(P_fd + t / 4) <= 1e-6 and abs(Q_fd + t) <= 1e-6
    for c in C_VALUES:
        classes.append(flatness.rigidity_scan(make_metric("hermitian-z-dependent", c=c),
                                              SPEC_200).classification)
    ok &= all(c == flatness.NON_FLAT for c in classes)
    record(4, "z-dependent metrics are NON-FLAT with anchor P1 = -t/4, Q1 = -t", ok,
           f"classifications {classes}; anchor values match autodiff and FD to 1e-6")


def test_05_corollary_projective_iff_dual():
    metrics = [e.build() for e in zoo_list() if e.kind == "complex"]
    metrics += [make_metric("perturbed-family", t=t) for t in T_VALUES]
    metrics += [make_metric("hermitian-z-dependent", c=c) for c in C_VALUES]
    metrics += [make_metric("complex-minkowski-phi", eps=e) for e in (0.0, -0.2, 0.2)]
    bad = []
    for metric in metrics:
        scan = flatness.rigidity_scan(metric, SPEC_200)
        if not scan.corollary_consistent:
            bad.append((metric.name, scan.pf_verdict, scan.df_verdict))
    record(5, "projective and dual verdicts agree", not bad,
           f"{len(metrics)} metrics scanned, disagreements: {bad or 'none'}")


def test_06_hermitian_specialisation():
    const = flatness.rigidity_scan(make_metric("complex-hermitian-const", a=1.0, b=0.4), SPEC_200)
    dep_metric = make_metric("hermitian-z-dependent", c=0.3)
    dep = flatness.rigidity_scan(dep_metric, SPEC_200)
    errs = []
    for v in ([0, 1], [1 + 1j, 0.5], [0.2j, -0.7]):
        s = ComplexTangentSample([0, 0], v)
        grad = calculus.complex_jet(dep_metric, s).f2.z[0]
        errs.append(abs(grad - 0.3 * np.real(np.vdot(v, v)) / 2))
    ok = const.classification == flatness.MINKOWSKI and dep.classification == flatness.NON_FLAT \
        and max(errs) <= 1e-6
    record(6, "Hermitian metrics: constant passes, z-dependent fails", ok,
           f"{const.classification} / {dep.classification}; "
           f"|(F^2)_z1 - 0.3|v|^2/2| max {max(errs):.1e}")


def test_07_homogeneity_identities():
    worst = {"real": 0.0, "complex": 0.0, "mixed": 0.0}
    spec = SampleSpec(seed=7, count=100)
    for entry in zoo_list():
        metric = entry.build()
        if entry.kind == "real" and entry.flag("positively-homogeneous-real"):
            for s in draw_samples(metric, spec):
                j = calculus.real_jet(metric, s)
                worst["real"] = max(worst["real"], abs(j.f.u @ s.u - j.f.value) / j.f.value)
        if entry.kind == "complex" and entry.flag("homogeneous-complex"):
            real = to_real(metric)
            for s in draw_samples(metric, spec):
                rs = s.to_real()
                rj = calculus.real_jet(real, rs)
                worst["real"] = max(worst["real"], abs(rj.f.u @ rs.u - rj.f.value) / rj.f.value)
                j = calculus.complex_jet(metric, s)
                a = j.f
                worst["complex"] = max(worst["complex"], abs(a.v @ s.v - a.value / 2) / a.value)
                gap = np.max(np.abs(a.zv.T @ s.v - 0.5 * a.z))
                worst["mixed"] = max(worst["mixed"], gap / (a.value + np.max(np.abs(a.z))))
    record(7, "Euler identities", max(worst.values()) <= 1e-9,
           ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " (tol 1e-9 relative)")


def test_08_derivative_oracle():
    worst, where = 0.0, ""
    for entry in zoo_list():
        metric = entry.build()
        for s in draw_samples(metric, SPEC_200):
            disc = calculus.block_discrepancy(calculus.jet(metric, s), calculus.fd_jet(metric, s))
            key = max(disc, key=disc.get)
            if disc[key] > worst:
                worst, where = disc[key], f"{entry.name} {key}"
    record(8, "autodiff agrees with central differences", worst <= 1e-5,
           f"max relative block discrepancy {worst:.2e} at {where} (tol 1e-5)")


def test_09_convexity_chain():
    violations = 0
    checked = 0
    for entry in zoo_list():
        if entry.kind != "complex":
            continue
        metric = entry.build()
        for s in draw_samples(metric, SPEC_200):
            ft = axioms.fundamental_tensors(metric, s)
            if ft.min_eig_g > 0:
                checked += 1
                violations += not ft.min_eig_G > 0
    funk = make_metric("funk-real")
    funk_min = min(axioms.fundamental_tensors(funk, s).min_eig_g
                   for s in draw_samples(funk, SPEC_200))
    record(9, "strong convexity implies pseudoconvexity; Funk g positive",
           violations == 0 and funk_min > 0,
           f"{checked} convex samples, {violations} violations; Funk min eig g {funk_min:.3f}")


def test_10_geodesic_straightness():
    funk = make_metric("funk-real")
    rng = np.random.Generator(np.random.PCG64(10))
    devs = []
    for _ in range(20):
        d = rng.standard_normal(2)
        x0 = d / np.linalg.norm(d) * 0.5 * rng.random()
        w = rng.standard_normal(2)
        u0 = w / np.linalg.norm(w)
        tr = geodesics.integrate_geodesic(funk, x0, u0, 1.0, 200)
        assert tr.termination in (geodesics.COMPLETED, geodesics.LEFT_DOMAIN)
        devs.append(tr.deviation)
    control = geodesics.integrate_geodesic(make_metric("scaled-euclidean-real", c=0.5),
                                           [0, 0], [0, 1], 1.0, 1000).deviation
    ratio = geodesics.rk4_convergence_ratio(make_metric("scaled-euclidean-real", c=0.5),
                                            [0, 0], [0, 1], 1.0, 16, N_ref=8192)
    ok = max(devs) <= 1e-6 and control > 1e-3 and ratio >= 8
    record(10, "geodesic straightness and RK4 order", ok,
           f"Funk max deviation {max(devs):.1e}, control {control:.2e}, "
           f"step-halving error ratio {ratio:.1f}")


def test_11_parser():
    worst = 0.0
    for name in ("funk-complex-form", "complex-euclidean"):
        metric = make_metric(name)
        expr = dsl.parse(metric.expression, "complex", metric.dim)
        for s in draw_samples(metric, SampleSpec(seed=11, count=500)):
            b = evaluate(metric, s)
            val = dsl.evaluate(expr, {"z": list(s.z), "v": list(s.v)})
            worst = max(worst, abs(b - val) / (1 + abs(b)))
    positioned = True
    for bad in ("sqrt(normsq(v", "1 + * 2", "herm(z)", "v9", "nope(v1)"):
        try:
            dsl.parse(bad, "complex", 2)
            positioned = False
        except dsl.DslError as exc:
            positioned &= exc.position >= 1
    cmd = [sys.executable, "-m", "finslerlab", "rigidity", "perturbed-family", "--t", "0.05,0.2",
           "--samples", "40", "--seed", "11"]
    runs = [subprocess.run(cmd, capture_output=True, check=False).stdout for _ in range(2)]
    identical = runs[0] == runs[1] and len(runs[0]) > 0
    record(11, "parser round-trip, positioned errors, CLI determinism",
           worst <= 1e-12 and positioned and identical,
           f"max round-trip gap {worst:.1e}; errors positioned: {positioned}; "
           f"byte-identical: {identical}")
