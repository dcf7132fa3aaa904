"""Morse-Smale maps: the product family on the simplex and black-box maps.

The simplex model acts on ``X = {0 <= x1 <= ... <= xm <= 1}`` by applying a
single increasing interval diffeomorphism ``gamma`` (fixed points 0 and 1,
``gamma(x) > x`` inside) to every coordinate.  Its fixed points are the
corners ``F(k) = (0, ..., 0, 1, ..., 1)`` with ``k`` ones.

Points are numpy arrays of shape ``(dim,)``; batched routines take
``(n, dim)``.  A coefficient evaluator is any callable mapping an array of
shape ``(..., dim)`` to ``(...)``.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import expr as _expr
from .discrete import CoeffSeq
from .errors import NoConvergence, ValidationError

LIMIT_TOL = 1e-9
CONFIRM_STEPS = 5
MAX_ITER = 100_000
BISECTION_STEPS = 60
DEFAULT_SEED = 42
KIND_SAMPLES = 50
KIND_RADIUS = 1e-3


class MapValidationError(ValidationError):
    pass


class WitnessNotFound(RuntimeError):
    """Search budget exhausted; says nothing about existence."""


# -- interval maps ---------------------------------------------------------

@dataclass(frozen=True)
class IntervalMap:
    """Increasing diffeomorphism of [0, 1] with fixed points exactly 0 and 1.

    ``forward``, ``inverse`` and ``derivative`` accept floats or arrays.
    """

    forward: Callable
    inverse: Callable
    derivative: Callable | None = None
    name: str = "gamma"

    def __call__(self, x):
        return self.forward(x)

    def deriv(self, x, h: float = 1e-6):
        """``gamma'(x)``: closed form when known, else central differences."""
        if self.derivative is not None:
            return self.derivative(x)
        x = np.asarray(x, dtype=float)
        lo = np.clip(x - h, 0.0, 1.0)
        hi = np.clip(x + h, 0.0, 1.0)
        return (self.forward(hi) - self.forward(lo)) / (hi - lo)


def mobius(c: float) -> IntervalMap:
    """``gamma(x) = c x / (1 + (c - 1) x)``, ``c > 1``."""
    if not c > 1:
        raise MapValidationError(f"mobius(c) needs c > 1, got {c}")

    def fwd(x):
        return c * x / (1.0 + (c - 1.0) * x)

    def inv(y):
        return y / (c - (c - 1.0) * y)

    def der(x):
        return c / (1.0 + (c - 1.0) * x) ** 2

    return IntervalMap(fwd, inv, der, name=f"mobius({c!r})")


def bisection_inverse(forward: Callable, steps: int = BISECTION_STEPS) -> Callable:
    """Inverse of an increasing map with ``forward(x) > x``.

    Since ``forward^{-1}(y) <= y`` the search bracket is ``[0, y]``, which
    keeps the relative accuracy near the repelling end.
    """

    def inv(y):
        y = np.asarray(y, dtype=float)
        lo = np.zeros_like(y)
        hi = y.copy()
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            below = forward(mid) < y
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return float(out) if out.ndim == 0 else out

    return inv


def _validate(g: IntervalMap, grid: int = 2001) -> IntervalMap:
    if abs(g.forward(0.0)) > 1e-12 or abs(g.forward(1.0) - 1.0) > 1e-12:
        raise MapValidationError(f"{g.name}: endpoints must be fixed (gamma(0)=0, gamma(1)=1)")
    xs = np.linspace(0.0, 1.0, grid)
    try:
        ys = np.asarray(g.forward(xs), dtype=float)
    except _expr.ExprDomainError as exc:
        raise MapValidationError(f"{g.name}: evaluation failed on [0, 1]: {exc}") from exc
    inner = slice(1, -1)
    bad = np.nonzero(ys[inner] <= xs[inner])[0]
    if len(bad):
        raise MapValidationError(f"{g.name}: gamma(x) <= x at x={xs[inner][bad[0]]:.6g}")
    if np.any(np.diff(ys) <= 0):
        raise MapValidationError(f"{g.name}: not strictly increasing on the validation grid")
    if np.any(ys < -1e-12) or np.any(ys > 1 + 1e-12):
        raise MapValidationError(f"{g.name}: does not map [0, 1] into itself")
    return g


_MOBIUS_RE = re.compile(r"\s*mobius\s*\(\s*([^)]+)\)\s*")


def make_interval_map(spec: str, **params) -> IntervalMap:
    """Build and validate an interval map.

    ``spec`` is a named family (``"mobius"`` with ``c=...``, or the call form
    ``"mobius(2)"``) or a formula in ``x`` such as ``"2*x/(1+x)"``.
    """
    m = _MOBIUS_RE.fullmatch(spec)
    if m is not None:
        return _validate(mobius(float(m.group(1))))
    if spec.strip() == "mobius":
        return _validate(mobius(float(params["c"])))
    e = _expr.parse(spec, 1)

    def fwd(x):
        return _expr.evaluate(e, [x])

    return _validate(IntervalMap(fwd, bisection_inverse(fwd), None, name=spec))


# -- fixed points ------------------------------------------------------------

class Kind(str, enum.Enum):
    ATTRACTING = "Attracting"
    REPELLING = "Repelling"
    SADDLE = "Saddle"


@dataclass(frozen=True)
class FixedPoint:
    id: int
    coords: tuple[float, ...]
    kind: Kind

    @property
    def point(self) -> np.ndarray:
        return np.array(self.coords)


# -- models ------------------------------------------------------------------

@dataclass(frozen=True)
class SimplexModel:
    """Coordinatewise ``gamma`` on the ordered simplex of dimension ``m``."""

    m: int
    gamma: IntervalMap

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError("simplex dimension m must be >= 1")

    @property
    def dim(self) -> int:
        return self.m

    def forward(self, x):
        return np.asarray(self.gamma(np.asarray(x, dtype=float)), dtype=float)

    def inverse(self, x):
        return np.asarray(self.gamma.inverse(np.asarray(x, dtype=float)), dtype=float)

    def contains(self, x, tol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= -tol) and np.all(x <= 1 + tol) and np.all(np.diff(x) >= -tol))

    def corner(self, k: int) -> np.ndarray:
        return np.concatenate([np.zeros(self.m - k), np.ones(k)])

    def declared_fixed_points(self) -> list[np.ndarray]:
        return [self.corner(k) for k in range(self.m + 1)]

    def project(self, x):
        return np.sort(np.clip(x, 0.0, 1.0), axis=-1)


@dataclass(frozen=True)
class BlackBoxModel:
    """Arbitrary invertible map given by callables and declared fixed points.

    ``sampler(rng, n)`` draws ``n`` domain points; ``project`` maps nearby
    points back into the domain (used when probing fixed-point kinds).
    """

    forward_map: Callable
    inverse_map: Callable
    fixed: tuple[tuple[float, ...], ...]
    sampler: Callable | None = None
    project_map: Callable | None = None

    @property
    def dim(self) -> int:
        return len(self.fixed[0])

    def forward(self, x):
        return np.asarray(self.forward_map(np.asarray(x, dtype=float)), dtype=float)

    def inverse(self, x):
        return np.asarray(self.inverse_map(np.asarray(x, dtype=float)), dtype=float)

    def declared_fixed_points(self) -> list[np.ndarray]:
        return [np.array(f, dtype=float) for f in self.fixed]

    def project(self, x):
        return self.project_map(x) if self.project_map is not None else x

    def contains(self, x, tol: float = 1e-12) -> bool:
        return True


MapModel = SimplexModel | BlackBoxModel


def _as_point(model, x):
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    if scalar:
        arr = arr.reshape(1)
    if arr.shape[-1] != model.dim:
        raise ValidationError(f"point has {arr.shape[-1]} coordinates, model has {model.dim}")
    return arr, scalar


def iterate(model: MapModel, x, n: int):
    """``alpha^n(x)``: ``n`` forward steps, or ``|n|`` inverse steps if negative."""
    arr, scalar = _as_point(model, x)
    if not model.contains(arr):
        raise ValidationError(f"point {arr} is outside the domain")
    step = model.forward if n >= 0 else model.inverse
    for _ in range(abs(n)):
        arr = step(arr)
    return float(arr[0]) if scalar else arr


def orbit(model: MapModel, x, lo: int, hi: int) -> np.ndarray:
    """Orbit points ``alpha^k(x)`` for ``k`` in ``[lo, hi]``, shape ``(hi-lo+1, dim)``."""
    arr, _ = _as_point(model, x)
    fwd = [arr]
    for _ in range(max(hi, 0)):
        fwd.append(model.forward(fwd[-1]))
    bwd = []
    cur = arr
    for _ in range(max(-lo, 0)):
        cur = model.inverse(cur)
        bwd.append(cur)
    pts = bwd[::-1] + fwd
    start = -len(bwd)
    return np.array(pts[lo - start: hi - start + 1])


def limits(model: MapModel, X, direction: int, fixed: Sequence[np.ndarray] | None = None,
           tol: float = LIMIT_TOL, max_iter: int = MAX_ITER, confirm: int = CONFIRM_STEPS) -> np.ndarray:
    """Batched limit detection.

    Returns the index (into ``fixed``) of the fixed point each row of ``X``
    converges to under forward (``direction=+1``) or backward iteration.  A
    limit is accepted at the first step where the orbit is within ``tol`` of a
    fixed point and stays within ``tol`` of it for ``confirm`` more steps.
    """
    X = np.array(X, dtype=float, ndmin=2)
    F = np.array(fixed if fixed is not None else model.declared_fixed_points(), dtype=float)
    step = model.forward if direction > 0 else model.inverse
    n = X.shape[0]
    result = np.full(n, -1, dtype=int)
    cand = np.full(n, -1, dtype=int)
    streak = np.zeros(n, dtype=int)
    active = np.arange(n)
    cur = X.copy()
    for it in range(max_iter + confirm + 1):
        d = np.linalg.norm(cur[:, None, :] - F[None, :, :], axis=-1)
        nearest = np.argmin(d, axis=1)
        close = d[np.arange(len(cur)), nearest] < tol
        same = close & (nearest == cand[active])
        streak[active] = np.where(same, streak[active] + 1, np.where(close, 1, 0))
        cand[active] = np.where(close, nearest, -1)
        done = streak[active] > confirm
        if np.any(done):
            result[active[done]] = cand[active[done]]
            keep = ~done
            active, cur = active[keep], cur[keep]
            if not len(active):
                break
        if it >= max_iter and np.all(streak[active] == 0):
            break
        cur = step(cur)
    if np.any(result < 0):
        raise NoConvergence(f"{int(np.sum(result < 0))} point(s) did not converge within {max_iter} steps")
    return result


def forward_limit(model: MapModel, x, tol: float = LIMIT_TOL, max_iter: int = MAX_ITER) -> int:
    arr, _ = _as_point(model, x)
    return int(limits(model, arr[None, :], +1, tol=tol, max_iter=max_iter)[0])


def backward_limit(model: MapModel, x, tol: float = LIMIT_TOL, max_iter: int = MAX_ITER) -> int:
    arr, _ = _as_point(model, x)
    return int(limits(model, arr[None, :], -1, tol=tol, max_iter=max_iter)[0])


def _ball(rng, center, radius, count):
    d = len(center)
    v = rng.standard_normal((count, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / d)
    return center + v * r[:, None]


def fixed_points(model: MapModel, rng=None, samples: int = KIND_SAMPLES,
                 radius: float = KIND_RADIUS) -> list[FixedPoint]:
    """Fixed points with their kinds.

    Simplex corners are classified analytically (``F(0)`` repelling, ``F(m)``
    attracting, the rest saddles).  Black-box points are checked against
    ``alpha(F) = F`` and classified by sampling ``samples`` points in a ball
    of ``radius``: attracting if all converge forward to ``F``, repelling if
    all converge backward, saddle otherwise.
    """
    if isinstance(model, SimplexModel):
        out = []
        for k in range(model.m + 1):
            kind = Kind.REPELLING if k == 0 else Kind.ATTRACTING if k == model.m else Kind.SADDLE
            out.append(FixedPoint(k, tuple(model.corner(k)), kind))
        return out
    rng = np.random.default_rng(DEFAULT_SEED) if rng is None else rng
    F = model.declared_fixed_points()
    for i, f in enumerate(F):
        if np.linalg.norm(model.forward(f) - f) > 1e-10:
            raise ValidationError(f"declared fixed point {i} = {tuple(f)} is not fixed by the map")
    out = []
    for i, f in enumerate(F):
        pts = model.project(_ball(rng, f, radius, samples))
        fwd = limits(model, pts, +1, F)
        bwd = limits(model, pts, -1, F)
        if np.all(fwd == i):
            kind = Kind.ATTRACTING
        elif np.all(bwd == i):
            kind = Kind.REPELLING
        else:
            kind = Kind.SADDLE
        out.append(FixedPoint(i, tuple(float(c) for c in f), kind))
    return out


def sample_points(model: MapModel, n: int, rng, faces: bool = True) -> np.ndarray:
    """Domain samples.  For the simplex, faces of every type are included.

    A simplex face type is a pair (``z`` zero coordinates, ``u`` unit
    coordinates) with at least one free coordinate; with ``faces`` the type
    is drawn uniformly, otherwise only interior points are produced.
    """
    if isinstance(model, BlackBoxModel):
        if model.sampler is None:
            raise ValidationError("black-box model has no sampler")
        return np.asarray(model.sampler(rng, n), dtype=float)
    m = model.m
    types = [(z, u) for z in range(m + 1) for u in range(m + 1 - z) if z + u < m] if faces else [(0, 0)]
    pick = rng.integers(len(types), size=n)
    X = np.sort(rng.random((n, m)), axis=1)
    for t, (z, u) in enumerate(types):
        rows = pick == t
        X[rows, :z] = 0.0
        if u:
            X[rows, m - u:] = 1.0
    return X


# -- orbit blocks and fundamental domains ------------------------------------

@dataclass(frozen=True)
class OrbitBlock:
    """Orbits running from fixed point ``source`` (past) to ``sink`` (future)."""

    source: int
    sink: int
    tau: tuple[float, ...] | None = None


def block_point(model: SimplexModel, source: int, sink: int, active) -> np.ndarray:
    """Simplex point with ``m - sink`` zeros, the ``active`` values, ``source`` ones."""
    m = model.m
    if not 0 <= source < sink <= m:
        raise ValidationError(f"no simplex block from F({source}) to F({sink})")
    active = np.broadcast_to(np.asarray(active, dtype=float), (sink - source,))
    return np.concatenate([np.zeros(m - sink), np.sort(active), np.ones(source)])


@dataclass(frozen=True)
class FundamentalDomain:
    """``Theta = {x : lower <= x[coord] < upper}`` with ``upper = gamma(lower)``.

    ``coord`` is the leading active coordinate of the block: the smallest
    coordinate strictly inside (0, 1).  All active coordinates move under the
    same ``gamma``, so one threshold on it is a section of every orbit.
    """

    gamma: IntervalMap
    lower: float
    upper: float
    coord: int
    block: OrbitBlock | None = None

    def contains(self, x) -> bool:
        v = float(np.asarray(x, dtype=float).reshape(-1)[self.coord])
        return self.lower <= v < self.upper

    def iterate_image(self, n: int) -> tuple[float, float]:
        """Bounds of ``alpha^n(Theta)`` on the section coordinate (half-open)."""
        lo, hi = self.lower, self.upper
        step = self.gamma.forward if n >= 0 else self.gamma.inverse
        for _ in range(abs(n)):
            lo, hi = float(step(lo)), float(step(hi))
        return lo, hi


def fundamental_domain(model: SimplexModel, block: OrbitBlock, anchor: float) -> FundamentalDomain:
    if not 0.0 < anchor < 1.0:
        raise ValidationError(f"anchor {anchor} is outside the open basin (0, 1)")
    if not 0 <= block.source < block.sink <= model.m:
        raise ValidationError(f"no simplex block from F({block.source}) to F({block.sink})")
    coord = model.m - block.sink
    return FundamentalDomain(model.gamma, float(anchor), float(model.gamma(anchor)), coord, block)


def entry_index(domain: FundamentalDomain, x, budget: int = 10_000) -> int:
    """The unique ``n`` with ``alpha^n(x)`` in ``domain``."""
    v = float(np.asarray(x, dtype=float).reshape(-1)[domain.coord])
    if not 0.0 < v < 1.0:
        raise ValidationError("point is not in the block (section coordinate is fixed)")
    g = domain.gamma
    n = 0
    if v < domain.lower:
        while v < domain.lower:
            v = float(g(v))
            n += 1
            if n > budget:
                raise NoConvergence("entry_index budget exhausted")
    else:
        while v >= domain.upper:
            v = float(g.inverse(v))
            n -= 1
            if -n > budget:
                raise NoConvergence("entry_index budget exhausted")
    return n


def as_coefficient(a) -> Callable:
    """Wrap an :class:`~mswso.expr.Expr` (or a callable) as a coefficient evaluator."""
    if isinstance(a, _expr.Expr):
        e = a

        def coef(points):
            pts = np.asarray(points, dtype=float)
            return np.asarray(_expr.evaluate(e, [pts[..., i] for i in range(e.arity)]), dtype=float)

        return coef
    return a


def coeff_sequence(model: MapModel, a, tau, K: int) -> CoeffSeq:
    """``a(alpha^k(tau))`` for ``|k| <= K`` with limits ``a(F_source)``, ``a(F_sink)``."""
    a = as_coefficient(a)
    tau_arr, _ = _as_point(model, tau)
    pts = orbit(model, tau_arr, -K, K)
    values = np.asarray(a(pts), dtype=float)
    F = model.declared_fixed_points()
    src = int(limits(model, tau_arr[None, :], -1, F)[0])
    snk = int(limits(model, tau_arr[None, :], +1, F)[0])
    a_minus = float(np.asarray(a(F[src][None, :]))[0])
    a_plus = float(np.asarray(a(F[snk][None, :]))[0])
    return CoeffSeq(values, a_minus, a_plus)


# -- residence and dwell -------------------------------------------------------

def _radii(model, radii) -> np.ndarray:
    n = len(model.declared_fixed_points())
    r = np.broadcast_to(np.asarray(radii, dtype=float), (n,)).copy()
    F = np.array(model.declared_fixed_points())
    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(F[i] - F[j]) < r[i] + r[j]:
                raise ValidationError(f"neighbourhoods of fixed points {i} and {j} overlap")
    return r


def _inside(F, r, pts) -> np.ndarray:
    """``(n_points, n_fixed)`` membership in the open balls ``|x - F_i| < r_i``."""
    d = np.linalg.norm(pts[:, None, :] - F[None, :, :], axis=-1)
    return d < r[None, :]


@dataclass(frozen=True)
class ResidenceBound:
    N: int
    samples: int


def residence_bound(model: MapModel, radii, samples, tol: float = LIMIT_TOL,
                    max_iter: int = MAX_ITER) -> ResidenceBound:
    """Largest number of orbit points outside all fixed-point neighbourhoods.

    Each sample orbit is followed in both directions until it is within
    ``tol`` of a fixed point (and stays there, see :func:`limits`); the
    remaining tails lie inside the neighbourhoods.
    """
    r = _radii(model, radii)
    if np.any(r <= tol):
        raise ValidationError("neighbourhood radii must exceed the limit tolerance")
    F = np.array(model.declared_fixed_points())
    X = np.array(samples, dtype=float)
    if X.ndim == 1:
        X = X[:, None] if model.dim == 1 else X[None, :]
    counts = (~_inside(F, r, X).any(axis=1)).astype(int)
    for step in (model.forward, model.inverse):
        cur = X.copy()
        active = np.arange(len(X))
        streak = np.zeros(len(X), dtype=int)
        for _ in range(max_iter):
            cur = step(cur)
            ins = _inside(F, r, cur).any(axis=1)
            counts[active] += (~ins).astype(int)
            d = np.min(np.linalg.norm(cur[:, None, :] - F[None, :, :], axis=-1), axis=1)
            streak = np.where(d < tol, streak + 1, 0)
            keep = streak <= CONFIRM_STEPS
            active, cur, streak = active[keep], cur[keep], streak[keep]
            if not len(active):
                break
        else:
            raise NoConvergence("residence_bound: orbits did not settle")
    return ResidenceBound(int(counts.max()) if len(counts) else 0, len(X))


@dataclass(frozen=True)
class DwellCounts:
    count_a: int
    count_b: int
    clean: bool
    exit_index: int | None
    entry_index: int | None

    def satisfies(self, S: int) -> bool:
        return self.clean and self.count_a > S and self.count_b > S


def dwell_counts(model: MapModel, x, edge: tuple[int, int], radii, window: int) -> DwellCounts:
    """Dwell of the orbit of ``x`` near ``F_a`` then ``F_b`` for ``edge = (a, b)``.

    Over orbit indices ``[-window, window]``: the passage is the last visit
    to ``V_a`` before the first subsequent visit to ``V_b``.  ``count_a`` is
    the length of the consecutive run in ``V_a`` ending at the exit,
    ``count_b`` the run in ``V_b`` starting at the entry (runs reaching the
    window edge are cut there).  ``clean`` means no other neighbourhood is
    visited strictly between exit and entry.
    """
    a, b = edge
    r = _radii(model, radii)
    F = np.array(model.declared_fixed_points())
    pts = orbit(model, x, -window, window)
    ins = _inside(F, r, pts)
    in_a, in_b = ins[:, a], ins[:, b]
    seen_a = np.maximum.accumulate(in_a)
    cand = np.nonzero(in_b & np.concatenate([[False], seen_a[:-1]]))[0]
    if not len(cand):
        return DwellCounts(0, 0, False, None, None)
    j_b = int(cand[0])
    j_a = int(np.nonzero(in_a[:j_b])[0][-1])
    others = np.delete(ins, [a, b], axis=1)
    clean = not others[j_a + 1:j_b].any()
    i = j_a
    while i >= 0 and in_a[i]:
        i -= 1
    count_a = j_a - i
    i = j_b
    while i < len(in_b) and in_b[i]:
        i += 1
    count_b = i - j_b
    return DwellCounts(count_a, count_b, clean, j_a - window, j_b - window)


def dwell_witness(model: SimplexModel, edge: tuple[int, int], S: int, radii,
                  max_halvings: int = 400) -> np.ndarray:
    """A point whose orbit dwells more than ``S`` steps near each end of ``edge``.

    Start from a point of the edge's face orbit (all active coordinates
    nearly equal, so the passage avoids intermediate corners), push the
    fixed zero and unit coordinates a distance ``eta`` into the interior, and
    shrink ``eta`` until the dwell counts, verified by iteration, exceed
    ``S`` with a clean passage.
    """
    if not isinstance(model, SimplexModel):
        raise ValidationError("dwell witnesses are constructed for the simplex family only")
    a, b = edge
    if not 0 <= a < b <= model.m:
        raise ValidationError(f"F({a}) -> F({b}) is not an edge of the simplex graph")
    r = _radii(model, radii)
    m = model.m
    k = b - a
    active = 0.5 + 1e-6 * np.arange(k)
    eta = 0.25 * float(np.min(r))
    rate = max(float(model.gamma.deriv(0.0)), 1.0 / float(model.gamma.deriv(1.0)), 1.0 + 1e-3)
    for _ in range(max_halvings):
        x = np.concatenate([np.full(m - b, eta), active, np.full(a, 1.0 - eta)])
        dwell = math.log(max(float(np.max(r)), 1e-300) / eta) / math.log(rate) if eta > 0 else 0
        window = int(4 * (S + 1) + 4 * dwell + 200)
        counts = dwell_counts(model, x, edge, r, window)
        if counts.satisfies(S):
            return x
        eta *= 0.5
        if eta < 1e-300:
            break
    raise WitnessNotFound(f"no dwell witness for edge {edge} with S={S} within the search budget")
