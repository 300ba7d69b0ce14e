"""Jets of F and F^2: hyper-dual autodiff, Wirtinger assembly, finite differences.

Real jets are taken over the ``2m`` real variables ``(x^1..x^m, u^1..u^m)``.
Every unordered variable pair ``(i, j)`` gets its own hyper-dual seed
(``e1`` on ``i``, ``e2`` on ``j``); all pairs are evaluated in a single
vectorised call, so the jet is exact to rounding and costs one evaluation
per pair.

Complex jets are assembled from the real jet of the real form F° with

    d/dz^j = (d/dx^j - i d/dx^{j+n}) / 2,   d/dzbar^j = conj of that,

and likewise for ``v``.  Block index conventions follow the formulas they
feed: ``xu[a, b] = d2F/dx^b du^a``, ``zv[i, j] = d2F/dz^j dv^i``,
``zbarv[i, j] = d2F/dzbar^j dv^i``, ``vvbar[a, b] = d2F/dv^a dvbar^b``.
"""

from dataclasses import dataclass

import numpy as np

from . import hyperdual as hd
from .errors import DomainError, NumericsError, UsageError
from .metrics import (COMPLEX, DEFAULT_MAX_COMPLEX_DIM, REAL, MetricField, check_sample,
                      to_real)

FD_STEP = 1e-5


@dataclass(frozen=True)
class RealBlocks:
    value: float
    x: np.ndarray
    u: np.ndarray
    xu: np.ndarray
    uu: np.ndarray

    def blocks(self):
        return {"value": np.atleast_1d(self.value), "x": self.x, "u": self.u,
                "xu": self.xu, "uu": self.uu}


@dataclass(frozen=True)
class RealJet2:
    f: RealBlocks
    f2: RealBlocks


@dataclass(frozen=True)
class ComplexBlocks:
    value: float
    z: np.ndarray
    zbar: np.ndarray
    v: np.ndarray
    vbar: np.ndarray
    zv: np.ndarray
    zbarv: np.ndarray
    vvbar: np.ndarray

    def blocks(self):
        return {"value": np.atleast_1d(self.value), "z": self.z, "zbar": self.zbar,
                "v": self.v, "vbar": self.vbar, "zv": self.zv, "zbarv": self.zbarv,
                "vvbar": self.vvbar}


@dataclass(frozen=True)
class ComplexJet2:
    f: ComplexBlocks
    f2: ComplexBlocks


def _check_dim(metric, max_dim):
    cap = DEFAULT_MAX_COMPLEX_DIM if max_dim is None else max_dim
    if metric.real_dim > 2 * cap:
        raise UsageError(f"real dimension {metric.real_dim} exceeds the cap 2*{cap}; "
                         "raise max_dim to allow it")


def _blocks_from_hessian(value, grad, hess, m):
    return RealBlocks(
        value=float(value),
        x=grad[:m].copy(),
        u=grad[m:].copy(),
        xu=hess[m:, :m].copy(),
        uu=hess[m:, m:].copy(),
    )


def _finite(name, *arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NumericsError(f"non-finite derivative of {name!r}")


def _as_real_hyperdual(val, like):
    if not isinstance(val, hd.HyperDual):
        zero = np.zeros_like(like)
        return hd.HyperDual(np.real(val) + zero, zero, zero, zero)
    head = np.asarray(val.value)
    if np.iscomplexobj(head) and np.any(np.abs(head.imag) > 1e-12 * (1 + np.abs(head.real))):
        raise NumericsError("metric returned a non-real value")
    return val.real


def real_jet(metric: MetricField, s, max_dim: int | None = None) -> RealJet2:
    """Value, first and second partials of F and F^2 at a real tangent sample."""
    if metric.kind != REAL:
        raise UsageError("real_jet expects a real metric")
    check_sample(metric, s)
    _check_dim(metric, max_dim)
    m = metric.dim
    w = np.concatenate([s.x, s.u])
    nvar = 2 * m
    ii, jj = np.triu_indices(nvar)
    zero = np.zeros(ii.size)
    seeds = [hd.HyperDual(w[k] + zero, (ii == k).astype(float), (jj == k).astype(float), zero)
             for k in range(nvar)]
    try:
        f = metric.evaluator(seeds[:m], seeds[m:])
    except (ZeroDivisionError, FloatingPointError) as exc:
        raise NumericsError(str(exc)) from exc
    f = _as_real_hyperdual(f, zero)
    f2 = f * f

    out = []
    for h in (f, f2):
        value, d1, d12 = (np.broadcast_to(np.asarray(c, dtype=float), ii.shape)
                          for c in (h.value, h.d1, h.d12))
        diag = ii == jj
        grad = np.empty(nvar)
        grad[ii[diag]] = d1[diag]
        hess = np.empty((nvar, nvar))
        hess[ii, jj] = d12
        hess[jj, ii] = d12
        _finite(metric.name, value, grad, hess)
        out.append(_blocks_from_hessian(value[0], grad, hess, m))
    return RealJet2(*out)


def _wirtinger(n):
    """Rows map real gradients on R^{2n} to d/dz (W) and d/dzbar (conj W)."""
    eye = np.eye(n)
    return 0.5 * np.hstack([eye, -1j * eye])


def wirtinger_blocks(rb: RealBlocks, n: int) -> ComplexBlocks:
    W = _wirtinger(n)
    Wb = W.conj()
    return ComplexBlocks(
        value=rb.value,
        z=W @ rb.x,
        zbar=Wb @ rb.x,
        v=W @ rb.u,
        vbar=Wb @ rb.u,
        zv=W @ rb.xu @ W.T,
        zbarv=W @ rb.xu @ Wb.T,
        vvbar=W @ rb.uu @ Wb.T,
    )


def complex_jet(metric: MetricField, s, max_dim: int | None = None) -> ComplexJet2:
    """Wirtinger jet of F and F^2 at a complex tangent sample."""
    if metric.kind != COMPLEX:
        raise UsageError("complex_jet expects a complex metric")
    check_sample(metric, s)
    rj = real_jet(to_real(metric), s.to_real(), max_dim)
    return ComplexJet2(wirtinger_blocks(rj.f, metric.dim), wirtinger_blocks(rj.f2, metric.dim))


def jet(metric: MetricField, s, max_dim: int | None = None):
    return real_jet(metric, s, max_dim) if metric.kind == REAL else complex_jet(metric, s, max_dim)


# ---------------------------------------------------------------- finite differences

def _fd_real(metric: MetricField, s, h, richardson):
    m = metric.dim
    w = np.concatenate([s.x, s.u])
    nvar = 2 * m
    steps = h * (1.0 + np.abs(w)) if h is not None else FD_STEP * (1.0 + np.abs(w))
    for k in range(m):
        for sign in (1, -1):
            probe = s.x.copy()
            probe[k] += sign * 2.0 * steps[k]
            if not metric.contains(probe):
                raise DomainError("finite-difference stencil leaves the domain")

    def evaluate_points(points):
        # points: (nvar, P); evaluated as one vectorised call
        val = metric.evaluator(list(points[:m]), list(points[m:]))
        val = np.asarray(val)
        if np.iscomplexobj(val):
            val = val.real
        return np.broadcast_to(val, points.shape[1:]).astype(float)

    def estimate(hs):
        e = np.eye(nvar)
        ii, jj = np.triu_indices(nvar)
        di = (e[:, ii] * hs[ii])
        dj = (e[:, jj] * hs[jj])
        base = w[:, None]
        pts = np.concatenate([
            base,
            base + e * hs, base - e * hs,
            base + di + dj, base + di - dj, base - di + dj, base - di - dj,
        ], axis=1)
        vals = evaluate_points(pts)
        results = []
        for g in (vals, vals * vals):
            f0 = g[0]
            fp, fm = g[1:1 + nvar], g[1 + nvar:1 + 2 * nvar]
            P = ii.size
            o = 1 + 2 * nvar
            fpp, fpm, fmp, fmm = (g[o + q * P:o + (q + 1) * P] for q in range(4))
            grad = (fp - fm) / (2.0 * hs)
            mixed = (fpp - fpm - fmp + fmm) / (4.0 * hs[ii] * hs[jj])
            hess = np.empty((nvar, nvar))
            hess[ii, jj] = mixed
            hess[jj, ii] = mixed
            results.append((f0, grad, hess))
        return results

    coarse = estimate(steps)
    if richardson:
        fine = estimate(steps / 2.0)
        coarse = [(f0, (4 * gf - gc) / 3, (4 * hf - hc) / 3)
                  for (f0, gc, hc), (_, gf, hf) in zip(coarse, fine)]
    blocks = [_blocks_from_hessian(f0, grad, hess, m) for f0, grad, hess in coarse]
    for b in blocks:
        _finite(metric.name, b.x, b.u, b.xu, b.uu)
    return RealJet2(*blocks)


def fd_jet(metric: MetricField, s, h: float | None = None, richardson: bool = False):
    """Central-difference jet; an oracle independent of the hyper-dual path.

    First derivatives use ``(f(+h) - f(-h)) / 2h``; second derivatives (mixed
    and diagonal) use the 4-point stencil ``f(++) - f(+-) - f(-+) + f(--)``
    over ``4 h_i h_j``.  The step for variable ``k`` is
    ``h * (1 + |w_k|)``.  F^2 is differentiated from squared F samples.
    """
    check_sample(metric, s)
    if metric.kind == REAL:
        return _fd_real(metric, s, h, richardson)
    rj = _fd_real(to_real(metric), s.to_real(), h, richardson)
    return ComplexJet2(wirtinger_blocks(rj.f, metric.dim), wirtinger_blocks(rj.f2, metric.dim))


def block_discrepancy(a, b) -> dict:
    """Per-block relative discrepancy ``max|A - B| / (1 + max|A|)`` between two jets."""
    out = {}
    for label, x, y in (("F", a.f, b.f), ("F2", a.f2, b.f2)):
        bx, by = x.blocks(), y.blocks()
        for key in bx:
            A, B = np.asarray(bx[key]), np.asarray(by[key])
            out[f"{label}.{key}"] = float(np.max(np.abs(A - B)) / (1.0 + np.max(np.abs(A))))
    return out
