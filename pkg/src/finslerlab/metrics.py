"""Metric abstraction, tangent samples, the built-in metric zoo and F -> F°.

Coordinate conventions
----------------------
A complex metric of dimension ``n`` lives on ``(z, v)`` with
``z^i = x^i + i x^{i+n}`` and ``v^i = u^i + i u^{i+n}``; its real form is a
real metric of dimension ``m = 2n`` on ``(x, u)``.  Real index ``a <= n``
is the real part of the ``a``-th complex coordinate and ``a > n`` the
imaginary part of coordinate ``a - n``, so :func:`to_real` is a pure
re-indexing.

The Hermitian pairing is ``<z, v> = sum_i z^i conj(v^i)``.

Evaluators are written against the generic scalar functions of
:mod:`finslerlab.hyperdual`, so one closure serves plain floats, complex
numbers, numpy arrays (vectorised stencils) and hyper-dual numbers.
"""

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping, Sequence

import numpy as np

from . import hyperdual as hd
from .errors import DomainError, NumericsError, UsageError

REAL = "real"
COMPLEX = "complex"

# safety margin for ball domains so differentiation stencils stay inside
BALL_MARGIN = 1e-6

# jets cost O(m^2) evaluations per sample; keep to desk scale unless asked
DEFAULT_MAX_COMPLEX_DIM = 4


@dataclass(frozen=True)
class RealTangentSample:
    x: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))
        if self.x.shape != self.u.shape or self.x.ndim != 1:
            raise UsageError("x and u must be 1-d arrays of equal length")

    @property
    def kind(self):
        return REAL

    @property
    def base(self):
        return self.x

    @property
    def tangent(self):
        return self.u


@dataclass(frozen=True)
class ComplexTangentSample:
    z: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", np.asarray(self.z, dtype=complex))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=complex))
        if self.z.shape != self.v.shape or self.z.ndim != 1:
            raise UsageError("z and v must be 1-d arrays of equal length")

    @property
    def kind(self):
        return COMPLEX

    @property
    def base(self):
        return self.z

    @property
    def tangent(self):
        return self.v

    def to_real(self):
        """Real image (x, u) under the packing z^i = x^i + i x^{i+n}."""
        return RealTangentSample(np.concatenate([self.z.real, self.z.imag]),
                                 np.concatenate([self.v.real, self.v.imag]))


def complex_sample_from_real(s: RealTangentSample) -> ComplexTangentSample:
    n = s.x.size // 2
    return ComplexTangentSample(s.x[:n] + 1j * s.x[n:], s.u[:n] + 1j * s.u[n:])


def _everywhere(base):
    return True


@dataclass(frozen=True)
class MetricField:
    """A Finsler-type function on one coordinate chart.

    ``evaluator(base, tangent)`` receives two sequences of scalars of length
    ``dim`` and returns a scalar; ``domain(base)`` receives the base point as a
    numpy array (real for real metrics, complex for complex ones).
    """

    name: str
    kind: str
    dim: int
    evaluator: Callable = field(repr=False, compare=False)
    params: Mapping[str, float] = field(default_factory=dict)
    domain: Callable = field(default=_everywhere, repr=False, compare=False)
    expression: str | None = None

    def __post_init__(self):
        if self.kind not in (REAL, COMPLEX):
            raise UsageError(f"unknown metric kind {self.kind!r}")
        if int(self.dim) < 1:
            raise UsageError("dimension must be a positive integer")
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    @property
    def real_dim(self):
        return self.dim if self.kind == REAL else 2 * self.dim

    def contains(self, base) -> bool:
        return bool(self.domain(np.asarray(base)))

    def __call__(self, base, tangent):
        return self.evaluator(list(base), list(tangent))


def check_sample(metric: MetricField, sample) -> None:
    if sample.kind != metric.kind:
        raise UsageError(f"{sample.kind} sample given to {metric.kind} metric {metric.name!r}")
    if sample.base.size != metric.dim:
        raise UsageError(f"sample dimension {sample.base.size} != metric dimension {metric.dim}")
    if not np.any(sample.tangent != 0):
        raise UsageError("tangent vector must be nonzero (slit tangent bundle)")
    if not metric.contains(sample.base):
        raise DomainError(f"base point {sample.base} outside the domain of {metric.name!r}")


def evaluate(metric: MetricField, sample) -> float:
    """Value of the metric at a tangent sample, with kind and domain checks."""
    check_sample(metric, sample)
    val = metric(sample.base, sample.tangent)
    val = complex(np.asarray(val).item())
    if not (np.isfinite(val.real) and np.isfinite(val.imag)):
        raise NumericsError(f"{metric.name!r} evaluated to a non-finite value")
    if abs(val.imag) > 1e-12 * (1.0 + abs(val.real)):
        raise NumericsError(f"{metric.name!r} evaluated to a non-real value {val}")
    return val.real


def to_real(metric: MetricField) -> MetricField:
    """The real form F°(x, u) = F(z, v) of a complex metric on R^{2n}."""
    if metric.kind != COMPLEX:
        raise UsageError("to_real expects a complex metric")
    n = metric.dim
    evaluator = metric.evaluator
    domain = metric.domain

    def real_form(x, u):
        z = [x[i] + 1j * x[i + n] for i in range(n)]
        v = [u[i] + 1j * u[i + n] for i in range(n)]
        return hd.re(evaluator(z, v))

    def real_domain(x):
        x = np.asarray(x)
        return domain(x[:n] + 1j * x[n:])

    return MetricField(name=metric.name + "°", kind=REAL, dim=2 * n, evaluator=real_form,
                       params=metric.params, domain=real_domain)


def scaled(metric: MetricField, c: float) -> MetricField:
    """The metric c·F, for c > 0."""
    if not c > 0:
        raise UsageError("scale factor must be positive")
    evaluator = metric.evaluator
    return MetricField(name=f"{c}*{metric.name}", kind=metric.kind, dim=metric.dim,
                       evaluator=lambda b, t: c * evaluator(b, t),
                       params=metric.params, domain=metric.domain)


# ---------------------------------------------------------------- helpers

def normsq(vec: Sequence):
    """sum |w_i|^2, real-valued for real or complex entries."""
    total = 0.0
    for w in vec:
        total = total + hd.re(w * hd.conj(w))
    return total


def herm(a: Sequence, b: Sequence):
    """sum a_i conj(b_i); the Euclidean inner product for real entries."""
    total = 0.0
    for p, q in zip(a, b):
        total = total + p * hd.conj(q)
    return total


def _ball_domain(radius=1.0 - BALL_MARGIN):
    def inside(base):
        return float(np.sum(np.abs(np.asarray(base)) ** 2)) < radius ** 2
    return inside


def _positive_factor_domain(t):
    # 1 + t·Re(first coordinate) > 0
    def inside(base):
        return 1.0 + t * float(np.real(np.asarray(base)[0])) > 0.0
    return inside


def funk_value(x: Sequence, u: Sequence):
    """Funk metric of the unit ball; works for real or complex coordinates."""
    nx = normsq(x)
    s = hd.re(herm(x, u))
    d = 1.0 - nx
    return (hd.sqrt(d * normsq(u) + s * s) + s) / d


# ---------------------------------------------------------------- zoo

FLAG_NAMES = (
    "homogeneous-real",
    "positively-homogeneous-real",
    "homogeneous-complex",
    "strongly-convex",
    "strongly-pseudoconvex",
    "projectively-flat-real",
    "dually-flat-real",
    "complex-pf",
    "complex-df",
    "z-independent",
)


@dataclass(frozen=True)
class ZooEntry:
    name: str
    kind: str
    doc: str
    constructor: Callable = field(repr=False)
    defaults: Mapping[str, float] = field(default_factory=dict)
    flags: Mapping[str, bool] = field(default_factory=dict)
    rendering: Callable | None = field(default=None, repr=False)
    families: Sequence[str] = ()

    def build(self, dim: int | None = None, **params) -> MetricField:
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise UsageError(f"{self.name}: unknown parameter(s) {sorted(unknown)}")
        bound = {**self.defaults, **{k: float(v) for k, v in params.items()}}
        dim = 2 if dim is None else int(dim)
        return self.constructor(dim, **bound)

    def flag(self, name: str) -> bool:
        return bool(self.flags.get(name, False))


def _flags(**kw):
    out = {name: False for name in FLAG_NAMES}
    for k, val in kw.items():
        key = k.replace("_", "-")
        if key not in out:
            raise KeyError(key)
        out[key] = val
    return MappingProxyType(out)


def _euclidean_real(m):
    return MetricField("euclidean-real", REAL, m, lambda x, u: hd.sqrt(normsq(u)),
                       expression="sqrt(normsq(u))")


def _scaled_euclidean_real(m, c):
    def f(x, u):
        return (1.0 + c * x[0]) * hd.sqrt(normsq(u))

    def inside(x):
        return 1.0 + c * float(x[0]) > 0.0

    return MetricField("scaled-euclidean-real", REAL, m, f, {"c": c}, inside,
                       expression="(1+c*x1)*sqrt(normsq(u))")


FUNK_RENDERING = ("(sqrt((1-normsq({b}))*normsq({t})+re(herm({b},{t}))^2)"
                  "+re(herm({b},{t})))/(1-normsq({b}))")


def _funk_real(m):
    return MetricField("funk-real", REAL, m, funk_value, domain=_ball_domain(),
                       expression=FUNK_RENDERING.format(b="x", t="u"))


def _funk_complex_form(n):
    return MetricField("funk-complex-form", COMPLEX, n, funk_value, domain=_ball_domain(),
                       expression=FUNK_RENDERING.format(b="z", t="v"))


def _complex_euclidean(n):
    return MetricField("complex-euclidean", COMPLEX, n, lambda z, v: hd.sqrt(normsq(v)),
                       expression="sqrt(normsq(v))")


def hermitian_matrix(n, a, b):
    """h = diag(1, 1+a, ..., 1+(n-1)a) with i·b / -i·b on the (1,2) off-diagonal."""
    h = np.diag([1.0 + k * a for k in range(n)]).astype(complex)
    if n > 1:
        h[0, 1] = 1j * b
        h[1, 0] = -1j * b
    return h


def _complex_hermitian_const(n, a, b):
    h = hermitian_matrix(n, a, b)
    if np.linalg.eigvalsh(h).min() <= 0:
        raise UsageError("complex-hermitian-const: parameters give a non-positive matrix")

    def f(z, v):
        total = 0.0
        for al in range(n):
            for be in range(n):
                if h[al, be] != 0:
                    total = total + h[al, be] * v[al] * hd.conj(v[be])
        return hd.sqrt(hd.re(total))

    terms = []
    for al in range(n):
        for be in range(n):
            if h[al, be] != 0:
                coef = h[al, be]
                c = f"{coef.real:g}" if coef.imag == 0 else f"({coef.imag:g}*i)"
                terms.append(f"{c}*v{al + 1}*conj(v{be + 1})")
    return MetricField("complex-hermitian-const", COMPLEX, n, f, {"a": a, "b": b},
                       expression=f"sqrt(re({' + '.join(terms)}))")


def _complex_minkowski_phi(n, eps):
    if abs(eps) > 0.2:
        raise UsageError("complex-minkowski-phi requires |eps| <= 0.2")

    def f(z, v):
        q = normsq(v)
        w = hd.re(v[0] * hd.conj(v[0]))
        return hd.sqrt(q + eps * w * w / q)

    return MetricField("complex-minkowski-phi", COMPLEX, n, f, {"eps": eps},
                       expression="sqrt(normsq(v)+eps*re(v1*conj(v1))^2/normsq(v))")


def _perturbed_family(n, t):
    def f(z, v):
        return hd.sqrt((1.0 + t * hd.re(z[0])) * normsq(v))

    return MetricField("perturbed-family", COMPLEX, n, f, {"t": t}, _positive_factor_domain(t),
                       expression="sqrt((1+t*re(z1))*normsq(v))")


def _hermitian_z_dependent(n, c):
    def f(z, v):
        return hd.sqrt(hd.exp(c * hd.re(z[0])) * normsq(v))

    return MetricField("hermitian-z-dependent", COMPLEX, n, f, {"c": c},
                       expression="sqrt(exp(c*re(z1))*normsq(v))")


_REAL_FLAT = dict(homogeneous_real=True, positively_homogeneous_real=True, strongly_convex=True)
_COMPLEX_GOOD = dict(homogeneous_real=True, positively_homogeneous_real=True,
                     homogeneous_complex=True, strongly_convex=True, strongly_pseudoconvex=True)
_ALL_FLAT = dict(projectively_flat_real=True, dually_flat_real=True, complex_pf=True,
                 complex_df=True, z_independent=True)

_ZOO = (
    ZooEntry("euclidean-real", REAL, "F = |u| on R^m.", _euclidean_real,
             flags=_flags(**_REAL_FLAT, projectively_flat_real=True, dually_flat_real=True,
                          z_independent=True)),
    ZooEntry("scaled-euclidean-real", REAL,
             "F = (1 + c x^1)|u|; conformal and neither projectively nor dually flat (control).",
             _scaled_euclidean_real, {"c": 0.1}, _flags(**_REAL_FLAT), families=("c",)),
    ZooEntry("funk-real", REAL,
             "Funk metric of the unit ball; positively (not absolutely) homogeneous, "
             "projectively and dually flat.",
             _funk_real,
             flags=_flags(positively_homogeneous_real=True, strongly_convex=True,
                          projectively_flat_real=True, dually_flat_real=True)),
    ZooEntry("funk-complex-form", COMPLEX,
             "The Funk metric of B^{2n} rewritten in z, v; fails complex homogeneity.",
             _funk_complex_form,
             flags=_flags(positively_homogeneous_real=True, strongly_convex=True,
                          strongly_pseudoconvex=True, projectively_flat_real=True,
                          dually_flat_real=True, complex_pf=True, complex_df=True)),
    ZooEntry("complex-euclidean", COMPLEX, "F = ||v||.", _complex_euclidean,
             flags=_flags(**_COMPLEX_GOOD, **_ALL_FLAT)),
    ZooEntry("complex-hermitian-const", COMPLEX,
             "F^2 = h(v, v) for a constant positive Hermitian h = diag(1, 1+a, ...) "
             "with i·b on the (1,2) entry.",
             _complex_hermitian_const, {"a": 1.0, "b": 0.0},
             _flags(**_COMPLEX_GOOD, **_ALL_FLAT), families=("a", "b")),
    ZooEntry("complex-minkowski-phi", COMPLEX,
             "F^2 = ||v||^2 + eps |v^1|^4 / ||v||^2, |eps| <= 0.2; non-Hermitian Minkowski.",
             _complex_minkowski_phi, {"eps": 0.1},
             _flags(**_COMPLEX_GOOD, **_ALL_FLAT), families=("eps",)),
    ZooEntry("perturbed-family", COMPLEX, "F^2 = (1 + t Re z^1) ||v||^2.",
             _perturbed_family, {"t": 0.2}, _flags(**_COMPLEX_GOOD), families=("t",)),
    ZooEntry("hermitian-z-dependent", COMPLEX, "F^2 = exp(c Re z^1) ||v||^2.",
             _hermitian_z_dependent, {"c": 0.3}, _flags(**_COMPLEX_GOOD), families=("c",)),
)

_BY_NAME = {entry.name: entry for entry in _ZOO}


def zoo_list() -> list[ZooEntry]:
    return list(_ZOO)


def zoo_entry(name: str) -> ZooEntry:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UsageError(f"unknown metric {name!r}; known: {', '.join(_BY_NAME)}") from None


def make_metric(name: str, dim: int | None = None, **params) -> MetricField:
    """Build a zoo metric by name with optional parameter overrides."""
    return zoo_entry(name).build(dim, **params)


def parse_overrides(pairs: Sequence[str]) -> dict[str, float]:
    """``["t=0.2", "c=1"]`` -> ``{"t": 0.2, "c": 1.0}``."""
    out = {}
    for pair in pairs:
        key, sep, val = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"parameter override must look like name=value, got {pair!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"parameter {key!r}: {val!r} is not a number") from None
    return out
