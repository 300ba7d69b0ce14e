"""Seeded, platform-independent tangent-vector sampling.

Streams come from numpy's PCG64 bit generator (``numpy.random.Generator``),
seeded with the 64-bit ``seed`` of the :class:`SampleSpec`.  Base points are
uniform in the ball of radius ``radius`` (or the box ``box``) of the real
base coordinates, rejected until they satisfy the metric's domain
predicate; tangent vectors are uniform on the unit sphere of the real
tangent space (homogeneity makes their length irrelevant).
"""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError, UsageError
from .metrics import COMPLEX, ComplexTangentSample, MetricField, RealTangentSample

MAX_REJECTIONS = 10000


@dataclass(frozen=True)
class SampleSpec:
    seed: int = 0
    count: int = 100
    radius: float = 0.8
    box: tuple[float, float] | None = None

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise UsageError("seed must be an unsigned 64-bit integer")
        if int(self.count) < 1:
            raise UsageError("sample count must be positive")
        if self.box is not None and not self.box[0] < self.box[1]:
            raise UsageError("box must be an interval (lo, hi) with lo < hi")

    def to_dict(self):
        d = asdict(self)
        d["box"] = list(self.box) if self.box is not None else None
        d["vector_distribution"] = "unit-sphere"
        d["prng"] = "PCG64"
        return d


def _base_point(rng, d, spec):
    if spec.box is not None:
        return rng.uniform(spec.box[0], spec.box[1], size=d)
    direction = rng.standard_normal(d)
    direction /= np.linalg.norm(direction)
    return direction * spec.radius * rng.random() ** (1.0 / d)


def _unit_vector(rng, d):
    while True:
        w = rng.standard_normal(d)
        norm = np.linalg.norm(w)
        if norm > 1e-12:
            return w / norm


def draw_samples(metric: MetricField, spec: SampleSpec) -> list:
    """``spec.count`` samples inside ``metric``'s domain, identical for identical specs."""
    rng = np.random.Generator(np.random.PCG64(int(spec.seed)))
    d = metric.real_dim
    n = metric.dim
    out = []
    for _ in range(int(spec.count)):
        for _attempt in range(MAX_REJECTIONS):
            x = _base_point(rng, d, spec)
            base = x[:n] + 1j * x[n:] if metric.kind == COMPLEX else x
            if metric.contains(base):
                break
        else:
            raise DomainError(f"could not draw a base point inside the domain of {metric.name!r}")
        u = _unit_vector(rng, d)
        if metric.kind == COMPLEX:
            out.append(ComplexTangentSample(base, u[:n] + 1j * u[n:]))
        else:
            out.append(RealTangentSample(x, u))
    return out
