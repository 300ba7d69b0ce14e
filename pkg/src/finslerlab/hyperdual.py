"""Hyper-dual numbers for exact first and second mixed partial derivatives.

A hyper-dual number ``a + b e1 + c e2 + d e1e2`` with ``e1**2 = e2**2 = 0``
carries a value, two independent first-order tangents and the mixed
second-order coefficient.  Seeding variable ``i`` in ``e1`` and variable ``j``
in ``e2`` yields ``f``, ``df/dw_i``, ``df/dw_j`` and ``d2f/dw_i dw_j`` from a
single evaluation, with no truncation error.

Components may be numpy arrays (real or complex).  An array of hyper-duals
is used to evaluate every variable pair in one vectorised pass; complex
components give complex arithmetic over the hyper-dual coefficients, which
is exact for the field operations and for ``conj``/``real``/``imag`` because
all derivative directions are real variables.
"""

import numpy as np

from .errors import DivisionNearZero, NumericsError, SqrtOfNegativeReal

# sqrt/abs refuse to differentiate this close to the non-smooth point
TINY = 1e-30


class HyperDual:
    __slots__ = ("value", "d1", "d2", "d12")
    __array_priority__ = 1000  # make numpy defer to our reflected operators

    def __init__(self, value, d1=0.0, d2=0.0, d12=0.0):
        self.value = value
        self.d1 = d1
        self.d2 = d2
        self.d12 = d12

    def __repr__(self):
        return f"HyperDual({self.value!r}, {self.d1!r}, {self.d2!r}, {self.d12!r})"

    # -- chain rule for scalar functions: f(a) given f, f', f'' at a.value
    def _apply(self, f0, f1, f2):
        return HyperDual(
            f0,
            f1 * self.d1,
            f1 * self.d2,
            f1 * self.d12 + f2 * self.d1 * self.d2,
        )

    def __add__(self, other):
        if isinstance(other, HyperDual):
            return HyperDual(self.value + other.value, self.d1 + other.d1,
                             self.d2 + other.d2, self.d12 + other.d12)
        return HyperDual(self.value + other, self.d1, self.d2, self.d12)

    __radd__ = __add__

    def __neg__(self):
        return HyperDual(-self.value, -self.d1, -self.d2, -self.d12)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, HyperDual):
            return HyperDual(
                self.value * other.value,
                self.value * other.d1 + self.d1 * other.value,
                self.value * other.d2 + self.d2 * other.value,
                self.value * other.d12 + self.d1 * other.d2
                + self.d2 * other.d1 + self.d12 * other.value,
            )
        return HyperDual(self.value * other, self.d1 * other,
                         self.d2 * other, self.d12 * other)

    __rmul__ = __mul__

    def reciprocal(self):
        _check_nonzero(self.value)
        inv = 1.0 / self.value
        return self._apply(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if isinstance(other, HyperDual):
            return self * other.reciprocal()
        _check_nonzero(other)
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("HyperDual supports integer powers only")
        n = int(n)
        if n == 0:
            return HyperDual(np.ones_like(self.value), 0.0 * self.d1, 0.0 * self.d2, 0.0 * self.d12)
        if n < 0:
            return (self ** (-n)).reciprocal()
        a = self.value
        return self._apply(a ** n, n * a ** (n - 1), n * (n - 1) * a ** (n - 2) if n > 1 else 0.0 * a)

    def conjugate(self):
        return HyperDual(np.conj(self.value), np.conj(self.d1), np.conj(self.d2), np.conj(self.d12))

    @property
    def real(self):
        return HyperDual(np.real(self.value), np.real(self.d1), np.real(self.d2), np.real(self.d12))

    @property
    def imag(self):
        return HyperDual(np.imag(self.value), np.imag(self.d1), np.imag(self.d2), np.imag(self.d12))

    def sqrt(self):
        a = _sqrt_argument(self.value)
        if np.any(np.abs(a) < TINY):
            raise NumericsError("sqrt differentiated at zero")
        r = np.sqrt(a)
        return self._apply(r, 0.5 / r, -0.25 / (r * a))

    def exp(self):
        e = np.exp(self.value)
        return self._apply(e, e, e)

    def __abs__(self):
        # |w| = sqrt(w conj(w)); smooth in the real variables away from w = 0
        return (self * self.conjugate()).real.sqrt()

    def components(self):
        return self.value, self.d1, self.d2, self.d12


def _check_nonzero(a):
    if np.any(np.abs(a) < TINY):
        raise DivisionNearZero("division by a value within 1e-30 of zero")


def _sqrt_argument(a):
    """Validate a sqrt argument; return it unchanged (real or complex)."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        nearly_real = np.abs(a.imag) <= 1e-12 * (1.0 + np.abs(a.real))
        if np.any(nearly_real & (a.real < 0) & (np.abs(a.real) > 1e-14)):
            raise SqrtOfNegativeReal("sqrt of a negative real value")
        return a
    if np.any(a < 0):
        raise SqrtOfNegativeReal("sqrt of a negative real value")
    return a


# Generic scalar functions: accept floats, complex numbers, numpy arrays and HyperDuals.

def sqrt(a):
    if isinstance(a, HyperDual):
        return a.sqrt()
    return np.sqrt(_sqrt_argument(a))


def exp(a):
    if isinstance(a, HyperDual):
        return a.exp()
    return np.exp(a)


def conj(a):
    if isinstance(a, HyperDual):
        return a.conjugate()
    return np.conj(a)


def re(a):
    if isinstance(a, HyperDual):
        return a.real
    return np.real(a)


def im(a):
    if isinstance(a, HyperDual):
        return a.imag
    return np.imag(a)


def cabs(a):
    if isinstance(a, HyperDual):
        return abs(a)
    return np.sqrt(np.real(a * np.conj(a)))


def value_of(a):
    """Plain value of a scalar that may or may not be a HyperDual."""
    return a.value if isinstance(a, HyperDual) else a
