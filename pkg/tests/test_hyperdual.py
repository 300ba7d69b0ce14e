import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finslerlab import hyperdual as hd
from finslerlab.errors import DivisionNearZero, NumericsError, SqrtOfNegativeReal


def seeded(f, a, b):
    """f evaluated with x seeded in e1 and y seeded in e2."""
    return f(hd.HyperDual(a, 1.0, 0.0, 0.0), hd.HyperDual(b, 0.0, 1.0, 0.0))


def central(f, a, b, h=1e-4):
    fx = (f(a + h, b) - f(a - h, b)) / (2 * h)
    fy = (f(a, b + h) - f(a, b - h)) / (2 * h)
    fxy = (f(a + h, b + h) - f(a + h, b - h) - f(a - h, b + h) + f(a - h, b - h)) / (4 * h * h)
    return fx, fy, fxy


FUNCS = {
    "product": (lambda x, y: x * y * x, lambda x, y: x * y * x),
    "quotient": (lambda x, y: (x + 2.0) / (y * y + 1.0), lambda x, y: (x + 2.0) / (y * y + 1.0)),
    "sqrt": (lambda x, y: hd.sqrt(x * x + y * y + 1.0), lambda x, y: math.sqrt(x * x + y * y + 1.0)),
    "exp": (lambda x, y: hd.exp(x * y), lambda x, y: math.exp(x * y)),
    "power": (lambda x, y: (x + y) ** 3 - x ** -2, lambda x, y: (x + y) ** 3 - x ** -2),
    "rsub": (lambda x, y: 1.0 - x / y, lambda x, y: 1.0 - x / y),
    "rdiv": (lambda x, y: 3.0 / (x + y), lambda x, y: 3.0 / (x + y)),
}


@pytest.mark.parametrize("name", sorted(FUNCS))
def test_matches_finite_differences(name):
    f_hd, f_plain = FUNCS[name]
    a, b = 0.7, 1.3
    r = seeded(f_hd, a, b)
    fx, fy, fxy = central(f_plain, a, b)
    assert r.value == pytest.approx(f_plain(a, b), rel=1e-14)
    assert r.d1 == pytest.approx(fx, rel=1e-7)
    assert r.d2 == pytest.approx(fy, rel=1e-7)
    assert r.d12 == pytest.approx(fxy, rel=1e-5, abs=1e-7)


@given(st.lists(st.floats(-3, 3), min_size=8, max_size=8))
@settings(max_examples=100, deadline=None)
def test_truncated_taylor_product_rule(c):
    f = hd.HyperDual(*c[:4])
    g = hd.HyperDual(*c[4:])
    p = f * g
    assert p.d12 == pytest.approx(f.value * g.d12 + f.d1 * g.d2 + f.d2 * g.d1 + f.d12 * g.value,
                                  abs=1e-12)


def test_complex_coefficients_and_conjugation():
    # |w|^2 for w = x + i y: d/dx = 2x, d/dy = 2y, d2/dxdy = 0
    x = hd.HyperDual(0.3, 1.0, 0.0, 0.0)
    y = hd.HyperDual(-0.4, 0.0, 1.0, 0.0)
    w = x + 1j * y
    q = (w * hd.conj(w)).real
    assert q.value == pytest.approx(0.25)
    assert q.d1 == pytest.approx(0.6)
    assert q.d2 == pytest.approx(-0.8)
    assert q.d12 == pytest.approx(0.0)
    a = abs(w)
    assert a.value == pytest.approx(0.5)
    assert a.d1 == pytest.approx(0.6)  # x / |w|
    assert a.d12 == pytest.approx(-(0.3 * -0.4) / 0.125)  # -xy / |w|^3


def test_vectorised_components():
    x = hd.HyperDual(np.array([1.0, 2.0]), np.array([1.0, 0.0]), np.array([0.0, 1.0]), 0.0)
    r = hd.sqrt(x * x + 1.0)
    np.testing.assert_allclose(r.value, np.sqrt([2.0, 5.0]))
    np.testing.assert_allclose(r.d1, [1 / np.sqrt(2), 0.0])


def test_sqrt_rejects_zero_and_negative():
    with pytest.raises(NumericsError):
        hd.sqrt(hd.HyperDual(0.0, 1.0))
    with pytest.raises(SqrtOfNegativeReal):
        hd.sqrt(hd.HyperDual(-1.0, 1.0))
    with pytest.raises(SqrtOfNegativeReal):
        hd.sqrt(-2.0)
    with pytest.raises(DivisionNearZero):
        hd.HyperDual(1.0, 1.0) / hd.HyperDual(0.0, 1.0)


def test_plain_scalars_pass_through():
    assert hd.sqrt(4.0) == 2.0
    assert hd.re(3 + 4j) == 3.0
    assert hd.im(3 + 4j) == 4.0
    assert hd.cabs(3 + 4j) == 5.0
    assert hd.conj(1j) == -1j
