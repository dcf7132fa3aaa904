"""Spectral verdicts for ``B - lambda I``.

Two independent decision procedures live here:

* :func:`classify` works on any fixed-point graph: it splits the vertices by
  comparing ``|a(F)|`` with ``|lambda|`` and reads one-sided invertibility off
  the direction of the crossing edges.
* :func:`classify_simplex` is the closed-form rule for the simplex model,
  phrased through the permutation sorting the corner weights.

Both depend on ``|lambda|`` only.  The module also provides the reduced
coefficient ``a = |a0| rho^(-1/2)`` and an orbit-window estimate of the
spectral radius.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import expr as _expr
from .dynamics import SimplexModel, as_coefficient, sample_points
from .errors import ValidationError
from .graph import CIRCLE_TOL, MSGraph, Orientation, decompose, orientation
from .verdicts import Annulus, Classification, Kernel, Provenance, Range, Status


class SimplexAssumptionError(ValidationError):
    """Weights violate the standing assumptions of :func:`classify_simplex`."""


class ClassifierDisagreement(RuntimeError):
    def __init__(self, general: Classification, simplex: Classification):
        self.general = general
        self.simplex = simplex
        super().__init__(
            f"classifiers disagree: graph rule gives {general.to_dict()}, "
            f"simplex rule gives {simplex.to_dict()}")


def _positive(weights) -> list[float]:
    w = [float(abs(x)) if isinstance(x, complex) else float(x) for x in weights]
    if not w:
        raise ValidationError("at least one weight is required")
    bad = [x for x in w if not x > 0 or not np.isfinite(x)]
    if bad:
        raise ValidationError(f"weights must be positive and finite, got {bad[0]}")
    return w


def annulus(weights) -> Annulus:
    """Spectrum ring ``{r <= |lambda| <= R}`` from the fixed-point weights."""
    w = _positive(weights)
    return Annulus(min(w), max(w))


def circles(weights) -> list[float]:
    """Distinct weights in increasing order: the circles splitting the ring."""
    return sorted(set(_positive(weights)))


def _hits(weights, modulus: float, tol: float) -> tuple[int, ...]:
    return tuple(i for i, w in enumerate(weights) if abs(w - modulus) <= tol * max(w, modulus))


def _outside(lam) -> tuple[Status, Kernel, Range]:
    return Status.OUTSIDE_SPECTRUM, Kernel.ZERO, Range.CLOSED


def _dense_kernel(graph: MSGraph, modulus: float) -> Kernel:
    """Kernel of the block carried by the dense edge, when the family allows it."""
    if graph.family != "simplex" or graph.dense_edge is None:
        return Kernel.UNKNOWN
    w = graph.weights
    src, snk = graph.dense_edge
    if not w[src] < w[snk]:
        return Kernel.UNKNOWN
    return Kernel.INFINITE_DIM if w[src] < modulus < w[snk] else Kernel.ZERO


def classify(graph: MSGraph, lam: complex, tol: float = CIRCLE_TOL) -> Classification:
    """Verdict from the orientation of the lambda-decomposition of ``graph``."""
    modulus = abs(complex(lam))
    weights = [v.weight for v in graph.vertices]
    ring = annulus(weights)
    hits = tuple(graph.vertices[i].id for i in _hits(weights, modulus, tol))
    prov = Provenance.MAIN_THEOREM

    if hits:
        rng = Range.NOT_CLOSED if graph.density_flag else Range.UNKNOWN
        return Classification(lam, Status.ON_CIRCLE, Kernel.UNKNOWN, rng, prov, hits)
    if not ring.contains(modulus):
        return Classification(lam, *_outside(lam), prov)

    dec = decompose(graph, modulus, tol)
    orient = orientation(graph, dec)
    if orient is Orientation.RIGHT:
        return Classification(lam, Status.RIGHT_INVERTIBLE, Kernel.INFINITE_DIM, Range.CLOSED, prov)
    if orient is Orientation.LEFT:
        return Classification(lam, Status.LEFT_INVERTIBLE, Kernel.ZERO, Range.CLOSED_NOT_DENSE, prov)
    if orient is Orientation.NO_CROSS:
        # Every block is invertible; only reachable for disconnected graphs.
        return Classification(lam, Status.RIGHT_INVERTIBLE, Kernel.ZERO, Range.CLOSED, prov)
    if graph.density_flag and graph.family == "simplex":
        rng = Range.DENSE_NOT_CLOSED
    elif graph.density_flag:
        rng = Range.NOT_CLOSED
    else:
        rng = Range.UNKNOWN
    return Classification(lam, Status.NOT_ONE_SIDED, _dense_kernel(graph, modulus), rng, prov)


def block_verdict(w_source: float, w_sink: float, lam: complex, tol: float = CIRCLE_TOL) -> Status:
    """Verdict for the single orbit block running from a vertex of weight
    ``w_source`` to one of weight ``w_sink``."""
    modulus = abs(complex(lam))
    if _hits([w_source, w_sink], modulus, tol):
        return Status.ON_CIRCLE
    if w_source < modulus < w_sink:
        return Status.RIGHT_INVERTIBLE
    if w_sink < modulus < w_source:
        return Status.LEFT_INVERTIBLE
    return Status.OUTSIDE_SPECTRUM


@dataclass(frozen=True)
class SigmaOrder:
    """Permutation ``sigma`` listing vertex ids by increasing weight, and the
    number ``k0`` of weights below ``|lambda|``."""

    sigma: tuple[int, ...]
    k0: int

    @property
    def prefix_invariant(self) -> bool:
        return set(self.sigma[: self.k0]) == set(range(self.k0))


def sigma_order(weights, modulus: float) -> SigmaOrder:
    w = _positive(weights)
    if len(set(w)) != len(w):
        raise SimplexAssumptionError("weights must be pairwise distinct")
    sigma = tuple(int(i) for i in np.argsort(w, kind="stable"))
    return SigmaOrder(sigma, sum(1 for x in w if x < modulus))


def classify_simplex(weights, lam: complex, tol: float = CIRCLE_TOL) -> Classification:
    """Closed-form verdict for the simplex model with corner weights ``weights``.

    Requires distinct weights with ``weights[0] < weights[-1]``.

    Examples
    --------
    >>> classify_simplex([1, 3, 2], 1.5).status.value
    'RightInvertible'
    >>> classify_simplex([1, 3, 2], 2.5).kernel.value
    'Zero'
    """
    w = _positive(weights)
    if len(w) < 2:
        raise SimplexAssumptionError("the simplex model has at least two fixed points")
    if len(set(w)) != len(w):
        raise SimplexAssumptionError("weights must be pairwise distinct")
    if not w[0] < w[-1]:
        raise SimplexAssumptionError("the repelling corner must carry the smaller weight")
    modulus = abs(complex(lam))
    prov = Provenance.SIMPLEX_THEOREM
    hits = _hits(w, modulus, tol)
    inner = w[0] < modulus < w[-1]

    if hits:
        m = len(w) - 1
        if 0 in hits or m in hits:
            kernel = Kernel.UNKNOWN
        else:
            kernel = Kernel.INFINITE_DIM if inner else Kernel.ZERO
        return Classification(lam, Status.ON_CIRCLE, kernel, Range.NOT_CLOSED, prov, hits)
    if not min(w) <= modulus <= max(w):
        return Classification(lam, *_outside(lam), prov)
    if inner:
        if sigma_order(w, modulus).prefix_invariant:
            return Classification(lam, Status.RIGHT_INVERTIBLE, Kernel.INFINITE_DIM, Range.CLOSED, prov)
        return Classification(lam, Status.NOT_ONE_SIDED, Kernel.INFINITE_DIM, Range.DENSE_NOT_CLOSED, prov)
    return Classification(lam, Status.NOT_ONE_SIDED, Kernel.ZERO, Range.DENSE_NOT_CLOSED, prov)


def simplex_applicable(graph: MSGraph) -> bool:
    if graph.family != "simplex":
        return False
    w = [v.weight for v in graph.vertices]
    return len(set(w)) == len(w) and w[0] < w[-1]


def _merge_field(a, b, unknown):
    if a == b:
        return a, True
    if a == unknown:
        return b, True
    if b == unknown:
        return a, True
    return a, False


def combine(general: Classification, simplex: Classification) -> Classification:
    """Merge two verdicts for the same ``lambda``.

    ``Unknown`` fields yield to known ones.  Conflicting known values raise
    :class:`ClassifierDisagreement`.
    """
    if general.status != simplex.status or general.circle_hits != simplex.circle_hits:
        raise ClassifierDisagreement(general, simplex)
    kernel, ok_k = _merge_field(general.kernel, simplex.kernel, Kernel.UNKNOWN)
    rng, ok_r = _merge_field(general.range, simplex.range, Range.UNKNOWN)
    if not (ok_k and ok_r):
        raise ClassifierDisagreement(general, simplex)
    return replace(general, kernel=kernel, range=rng, provenance=Provenance.BOTH)


def classify_full(graph: MSGraph, lam: complex, tol: float = CIRCLE_TOL) -> Classification:
    """:func:`classify`, cross-checked by :func:`classify_simplex` where it applies."""
    general = classify(graph, lam, tol)
    if not simplex_applicable(graph):
        return general
    return combine(general, classify_simplex([v.weight for v in graph.vertices], lam, tol))


# -- coefficients ------------------------------------------------------------

def reduced_coefficient(a0, model: SimplexModel):
    """Return ``a(x) = |a0(x)| * rho(x)^(-1/2)`` for Lebesgue measure.

    ``rho(y) = prod_i (gamma^-1)'(y_i)`` is the density of the pulled-back
    measure.  ``a0`` may be an :class:`~mswso.expr.Expr`, an expression
    string over ``x1..xm``, or a callable on ``(..., m)`` arrays.  The result
    is a vectorized callable on ``(..., m)`` arrays.
    """
    if not isinstance(model, SimplexModel):
        raise ValidationError("the reduced coefficient needs a simplex model with a known interval map")
    if isinstance(a0, str):
        a0 = _expr.parse(a0, model.m)
    coef = as_coefficient(a0)
    gamma = model.gamma

    def a(points):
        pts = np.asarray(points, dtype=float)
        y = pts.reshape(-1, model.m)
        pre = np.asarray(gamma.inverse(y), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            dinv = 1.0 / np.asarray(gamma.deriv(pre), dtype=float)
        rho = np.prod(dinv, axis=-1)
        if not np.all(np.isfinite(rho)):
            raise ValidationError("derivative of the inverse map is not finite")
        if np.any(rho <= 0):
            raise ValidationError("pulled-back measure has zero density")
        vals = np.abs(np.asarray(coef(y), dtype=float)).reshape(-1)
        return (vals / np.sqrt(rho)).reshape(pts.shape[:-1])

    return a


def corner_weights(model: SimplexModel, a) -> list[float]:
    """``|a(F(k))|`` for ``k = 0..m``."""
    a = as_coefficient(a)
    F = np.array(model.declared_fixed_points())
    return [float(v) for v in np.abs(np.asarray(a(F), dtype=float))]


def spectral_radius_estimate(model, a, n: int, samples: int = 200, rng=None) -> float:
    """Largest geometric mean of ``|a|`` over ``n`` consecutive orbit points.

    Orbits of ``samples`` random points (faces included) are followed ``2n``
    steps in each direction and every window of length ``n`` is scored.
    """
    if n < 1:
        raise ValidationError("window length must be positive")
    rng = np.random.default_rng(0) if rng is None else rng
    a = as_coefficient(a)
    X = np.asarray(sample_points(model, samples, rng), dtype=float)
    fwd, bwd = [X], []
    for _ in range(2 * n):
        fwd.append(model.forward(fwd[-1]))
    cur = X
    for _ in range(2 * n):
        cur = model.inverse(cur)
        bwd.append(cur)
    pts = np.stack(bwd[::-1] + fwd, axis=1)  # (samples, 4n+1, dim)
    vals = np.abs(np.asarray(a(pts), dtype=float))
    if np.any(vals <= 0):
        raise ValidationError("coefficient vanishes on a sampled orbit")
    c = np.concatenate([np.zeros((len(X), 1)), np.cumsum(np.log(vals), axis=1)], axis=1)
    best = float(np.max(c[:, n:] - c[:, :-n])) / n
    return float(np.exp(best))
