import math

import numpy as np
import pytest

from finslerlab import axioms, calculus
from finslerlab.errors import NumericsError, UsageError
from finslerlab.metrics import ComplexTangentSample, RealTangentSample, make_metric, zoo_entry
from finslerlab.sampling import SampleSpec, draw_samples

from .conftest import COMPLEX_NAMES, ZOO_NAMES


def test_complex_euclidean_is_homogeneous():
    metric = make_metric("complex-euclidean")
    for s in draw_samples(metric, SampleSpec(seed=2, count=20)):
        assert axioms.homogeneity_residual(metric, s) <= 1e-12


def test_funk_complex_form_fails_complex_homogeneity():
    metric = make_metric("funk-complex-form")
    s = ComplexTangentSample([0.5, 0], [1, 0])
    by_hand = 2.0 - math.sqrt(0.75) / 0.75  # F(z, v) - F(z, i v)
    assert by_hand == pytest.approx(0.845299, abs=1e-6)
    assert axioms.homogeneity_residual(metric, s, [1j]) == pytest.approx(by_hand, abs=1e-12)


def test_funk_real_positive_but_not_absolute_homogeneity():
    funk = make_metric("funk-real")
    assert axioms.homogeneity_residual(funk, RealTangentSample([0, 0], [1, 0]), [-1.0]) <= 1e-15
    s = RealTangentSample([0.5, 0], [1, 0])
    # F(x, -u) = (1 - 0.5) / 0.75
    assert axioms.homogeneity_residual(funk, s, [-1.0]) == pytest.approx(2.0 - 0.5 / 0.75)
    prof = axioms.homogeneity_profile(funk, s)
    assert prof["positive"] <= 1e-15 and prof["absolute"] > 1


def test_homogeneity_argument_checks():
    funk = make_metric("funk-real")
    s = RealTangentSample([0, 0], [1, 0])
    with pytest.raises(UsageError):
        axioms.homogeneity_residual(funk, s, [1j])
    with pytest.raises(UsageError):
        axioms.homogeneity_residual(funk, s, [0.0])


@pytest.mark.parametrize("name", [n for n in ZOO_NAMES if zoo_entry(n).flag("homogeneous-complex")
                                  or (zoo_entry(n).kind == "real"
                                      and zoo_entry(n).flag("homogeneous-real"))])
def test_flagged_homogeneous_metrics(name):
    metric = make_metric(name)
    for s in draw_samples(metric, SampleSpec(seed=10, count=100)):
        assert axioms.homogeneity_residual(metric, s) <= 1e-12


def test_fundamental_tensor_examples():
    ft = axioms.fundamental_tensors(make_metric("euclidean-real"), RealTangentSample([0, 0], [1, 0]))
    np.testing.assert_allclose(ft.g, np.eye(2), atol=1e-15)
    assert ft.min_eig_g == pytest.approx(1.0) and ft.g_cholesky
    h = make_metric("complex-hermitian-const")
    for s in draw_samples(h, SampleSpec(seed=1, count=10)):
        ft = axioms.fundamental_tensors(h, s)
        np.testing.assert_allclose(ft.G, np.diag([1, 2]), atol=1e-13)
        assert ft.min_eig_G == pytest.approx(1.0)


def test_minkowski_phi_pseudoconvex_with_fd_oracle():
    metric = make_metric("complex-minkowski-phi", eps=0.1)
    s = ComplexTangentSample([0, 0], [1, 0])
    ft = axioms.fundamental_tensors(metric, s)
    fd_G = calculus.fd_jet(metric, s).f2.vvbar
    assert ft.min_eig_G > 0
    assert np.linalg.eigvalsh(0.5 * (fd_G + fd_G.conj().T)).min() == pytest.approx(ft.min_eig_G,
                                                                                   rel=1e-6)


def test_min_eigenvalue_and_cholesky():
    assert not axioms.is_positive_definite(np.diag([1.0, -1e-3]))
    assert axioms.min_eigenvalue(np.diag([1.0, -1e-3])) == pytest.approx(-1e-3)
    with pytest.raises(NumericsError):
        axioms.min_eigenvalue(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_convexity_reports():
    spec = SampleSpec(seed=3, count=50)
    rep = axioms.strong_convexity_report(make_metric("complex-euclidean"), spec)
    assert rep.strongly_convex and rep.strongly_pseudoconvex
    assert rep.min_eig_g == pytest.approx(1.0) and rep.min_eig_G == pytest.approx(1.0)
    rep = axioms.strong_convexity_report(make_metric("perturbed-family", t=0.2),
                                         SampleSpec(seed=3, count=50, box=(-0.9, 0.9)))
    assert rep.strongly_convex and rep.implication_holds


def test_perturbed_real_tensor_is_conformal():
    # g = (1 + t x1) I on the real chart
    metric = make_metric("perturbed-family", t=0.2)
    s = ComplexTangentSample([0.5 - 0.1j, 0.2j], [0.3 + 1j, -0.4])
    ft = axioms.fundamental_tensors(metric, s)
    np.testing.assert_allclose(ft.g, 1.1 * np.eye(4), atol=1e-14)


@pytest.mark.parametrize("name", COMPLEX_NAMES)
def test_convexity_implies_pseudoconvexity(name):
    rep = axioms.strong_convexity_report(make_metric(name), SampleSpec(seed=9, count=200))
    assert rep.implication_holds
    assert not rep.failures


@pytest.mark.parametrize("name", [n for n in COMPLEX_NAMES if n != "funk-complex-form"])
def test_G_invariant_under_complex_rescaling(name):
    metric = make_metric(name)
    for s in draw_samples(metric, SampleSpec(seed=12, count=20)):
        G = axioms.fundamental_tensors(metric, s).G
        for lam in (2j, 0.5 * np.exp(1j)):
            G2 = axioms.fundamental_tensors(metric, ComplexTangentSample(s.z, lam * s.v)).G
            np.testing.assert_allclose(G2, G, rtol=1e-9, atol=1e-12)
