"""Weighted shifts ``aW - lambda`` on l2(Z).

``(aW u)(k) = a(k) u(k+1)``, where ``a`` is a two-sided coefficient sequence
with nonzero limits ``a(-inf)`` and ``a(+inf)``.  This module supplies the
exact constructions (kernel vectors, a right inverse, a shooting solver for
the left regime) and the finite-section probes used to check classifier
verdicts numerically.

Vectors on Z are :class:`ZVec` objects: a numpy array plus the integer index
of its first entry.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NoConvergence, ValidationError
from .verdicts import Annulus, Status

CIRCLE_TOL = 1e-12
KERNEL_CUTOFF = 1e-16
DEFAULT_TRUNCATIONS = (50, 100, 200, 400)

# Finite-section ladder thresholds.  On a limit circle sigma_min decays like
# N^-1 for step coefficients and like N^-1/2 when the coefficient reaches the
# circle geometrically; over N = 50..400 that is a ratio of 0.125 or 0.354.
# Bounded-below ladders keep at least BOUNDED_RATIO.  See ladder_signature.
NONCLOSED_RATIO = 0.4
RUNG_RATIO = 0.9
BOUNDED_RATIO = 0.5
PLATEAU_FLOOR = 1e-6
TINY_SIGMA = 1e-8


class RegimeError(ValidationError):
    """``lambda`` is outside the regime an operation requires."""


@dataclass(frozen=True)
class ZVec:
    values: np.ndarray
    start: int

    @property
    def stop(self) -> int:
        return self.start + len(self.values)

    def __getitem__(self, k: int):
        i = k - self.start
        if 0 <= i < len(self.values):
            return self.values[i]
        return 0.0

    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.stop)

    def norm(self, ord=2) -> float:
        return float(np.linalg.norm(self.values, ord)) if len(self.values) else 0.0

    def on(self, lo: int, hi: int) -> np.ndarray:
        """Entries for ``k`` in ``[lo, hi)`` (zero outside the support)."""
        out = np.zeros(hi - lo, dtype=np.result_type(self.values, np.float64))
        a, b = max(lo, self.start), min(hi, self.stop)
        if a < b:
            out[a - lo:b - lo] = self.values[a - self.start:b - self.start]
        return out

    @classmethod
    def delta(cls, k: int = 0) -> "ZVec":
        return cls(np.ones(1), k)

    @classmethod
    def centered(cls, values) -> "ZVec":
        values = np.asarray(values)
        if len(values) % 2 != 1:
            raise ValueError("centered vectors need odd length")
        return cls(values, -(len(values) // 2))


@dataclass(frozen=True)
class CoeffSeq:
    """Coefficients ``a(k)``: stored for ``|k| <= K``, equal to the limits beyond."""

    values: np.ndarray
    a_minus: complex
    a_plus: complex

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 1 or len(vals) % 2 != 1:
            raise ValidationError("coefficient window must have odd length 2K+1")
        if np.any(vals == 0) or self.a_minus == 0 or self.a_plus == 0:
            raise ValidationError("coefficients and limits must be nonzero")

    @property
    def K(self) -> int:
        return len(self.values) // 2

    def on(self, lo: int, hi: int) -> np.ndarray:
        """``a(k)`` for ``k`` in ``[lo, hi)``."""
        k = np.arange(lo, hi)
        out = np.empty(len(k), dtype=np.result_type(self.values, type(self.a_minus), type(self.a_plus)))
        out[k < -self.K] = self.a_minus
        out[k > self.K] = self.a_plus
        inside = (k >= -self.K) & (k <= self.K)
        out[inside] = np.asarray(self.values)[k[inside] + self.K]
        return out

    def __call__(self, k: int):
        return self.on(k, k + 1)[0]

    @classmethod
    def step(cls, a_minus, a_plus, K: int = 0) -> "CoeffSeq":
        """``a(k) = a_minus`` for ``k < 0`` and ``a_plus`` for ``k >= 0``."""
        k = np.arange(-K, K + 1)
        vals = np.where(k < 0, a_minus, a_plus)
        return cls(vals, a_minus, a_plus)

    def to_dict(self) -> dict:
        return {"K": self.K, "values": [abs(v) for v in self.values],
                "a_minus": abs(self.a_minus), "a_plus": abs(self.a_plus)}


def discrete_annulus(seq: CoeffSeq) -> Annulus:
    lo, hi = sorted((abs(seq.a_minus), abs(seq.a_plus)))
    return Annulus(lo, hi)


def _on_circle(x: float, y: float, tol: float = CIRCLE_TOL) -> bool:
    return abs(x - y) <= tol * max(x, y)


def index_of(seq: CoeffSeq, lam: complex) -> int:
    """Fredholm index of ``aW - lambda``: +1, -1 or 0."""
    m, am, ap = abs(lam), abs(seq.a_minus), abs(seq.a_plus)
    if m == 0 or _on_circle(m, am) or _on_circle(m, ap):
        raise RegimeError(f"|lambda|={m} is zero or lies on a limit circle")
    if am < m < ap:
        return 1
    if ap < m < am:
        return -1
    return 0


def apply(seq: CoeffSeq, lam: complex, u: ZVec) -> ZVec:
    """``(aW - lambda) u`` on its full (finite) support."""
    lo, hi = u.start - 1, u.stop
    uu = u.on(lo, hi + 1)
    a = seq.on(lo, hi)
    return ZVec(a * uu[1:] - lam * uu[:-1], lo)


def _tail_length(start_abs: float, peak: float, q: float, cutoff: float) -> int:
    if start_abs == 0.0 or peak == 0.0:
        return 0
    # log space: cutoff * peak may underflow for subnormal data
    gap = math.log(cutoff) + math.log(peak) - math.log(start_abs)
    if gap >= 0.0:
        return 0
    return int(math.ceil(gap / math.log(q))) + 1


def _forward(seq: CoeffSeq, lam: complex, f: ZVec | None, k_end: int, cutoff: float):
    """``u(k+1) = (lambda u(k) + f(k)) / a(k)`` for ``k >= 0`` from ``u(0) = 0``.

    Runs to ``k_end`` then continues the geometric tail until negligible.
    Returns ``u(1..L)``.
    """
    a = seq.on(0, k_end)
    fv = f.on(0, k_end) if f is not None else np.zeros(k_end)
    u = kernels.affine_recurrence(lam / a, fv / a, 0.0)[1:]
    if not len(u):
        return u
    q = abs(lam / seq.a_plus)
    peak = float(np.max(np.abs(u)))
    t = _tail_length(abs(u[-1]), peak, q, cutoff)
    if t:
        tail = kernels.affine_recurrence(np.full(t, lam / seq.a_plus), np.zeros(t), u[-1])[1:]
        u = np.concatenate([u, tail])
    return u


def _backward(seq: CoeffSeq, lam: complex, f: ZVec | None, k_begin: int, cutoff: float, u0=0.0):
    """``u(k) = (a(k) u(k+1) - f(k)) / lambda`` for ``k < 0`` from ``u(0) = u0``.

    Runs down to ``k_begin`` then continues the tail.  Returns ``u(-L..-1)``.
    """
    n = -k_begin
    a = seq.on(k_begin, 0)[::-1]
    fv = (f.on(k_begin, 0) if f is not None else np.zeros(n))[::-1]
    u = kernels.affine_recurrence(a / lam, -fv / lam, u0)[1:]
    if len(u):
        q = abs(seq.a_minus / lam)
        peak = max(float(np.max(np.abs(u))), abs(u0))
        t = _tail_length(abs(u[-1]), peak, q, cutoff)
        if t:
            tail = kernels.affine_recurrence(np.full(t, seq.a_minus / lam), np.zeros(t), u[-1])[1:]
            u = np.concatenate([u, tail])
    return u[::-1]


def kernel_vector(seq: CoeffSeq, lam: complex) -> ZVec | None:
    """Normalized-at-zero kernel vector of ``aW - lambda``, or ``None``.

    A kernel exists in l2 exactly when ``|a(-inf)| < |lambda| < |a(+inf)|``;
    then ``u(0) = 1`` and ``u(k+1) = lambda u(k) / a(k)``.  Entries below
    ``1e-16`` (relative to the peak) are truncated.
    """
    if index_of(seq, lam) != 1:
        return None
    right = _forward_kernel(seq, lam)
    left = _backward(seq, lam, None, -seq.K - 1, KERNEL_CUTOFF, u0=1.0)
    values = np.concatenate([left, [1.0 + 0j], right])
    return ZVec(values, -len(left))


def _forward_kernel(seq: CoeffSeq, lam: complex):
    a = seq.on(0, seq.K + 1)
    u = kernels.affine_recurrence(lam / a, np.zeros(len(a)), 1.0)
    peak = float(np.max(np.abs(u)))
    q = abs(lam / seq.a_plus)
    t = _tail_length(abs(u[-1]), peak, q, KERNEL_CUTOFF)
    if t:
        tail = kernels.affine_recurrence(np.full(t, lam / seq.a_plus), np.zeros(t), u[-1])[1:]
        u = np.concatenate([u, tail])
    return u[1:]


def _require(seq: CoeffSeq, lam: complex, index: int, what: str):
    if index_of(seq, lam) != index:
        raise RegimeError(f"{what} requires index {index:+d} regime; got |lambda|={abs(lam)}, "
                          f"|a(-inf)|={abs(seq.a_minus)}, |a(+inf)|={abs(seq.a_plus)}")


def right_inverse_apply(seq: CoeffSeq, lam: complex, f: ZVec, cutoff: float = 1e-17) -> ZVec:
    """Apply an explicit right inverse of ``aW - lambda`` to ``f``.

    Right regime only (``|a(-inf)| < |lambda| < |a(+inf)|``).  The solution
    is pinned by ``u(0) = 0`` and built by the forward recursion for
    ``k >= 0`` and the backward recursion for ``k < 0``; both are contractive
    beyond the coefficient window.  ``||u|| <= right_inverse_bound(seq, lam) ||f||``.
    """
    _require(seq, lam, 1, "right_inverse_apply")
    hi = max(f.stop, seq.K + 1, 1)
    lo = min(f.start, -seq.K - 1, -1)
    right = _forward(seq, lam, f, hi, cutoff)
    left = _backward(seq, lam, f, lo, cutoff)
    values = np.concatenate([left, [0.0 + 0j], right])
    return ZVec(values, -len(left))


def window_residual(seq: CoeffSeq, lam: complex, u: ZVec, f: ZVec) -> float:
    """``max |((aW - lambda) u - f)(k)|`` over rows whose unknowns lie in ``u``'s window."""
    res = apply(seq, lam, u)
    lo, hi = u.start, u.stop - 1
    if hi <= lo:
        return 0.0
    return float(np.max(np.abs(res.on(lo, hi) - f.on(lo, hi))))


def right_inverse_bound(seq: CoeffSeq, lam: complex) -> float:
    """Explicit bound ``C`` with ``||R f|| <= C ||f||`` for :func:`right_inverse_apply`.

    Schur test on the two triangular solution kernels.  Beyond the stored
    window the per-step ratios are ``q+ = |lambda/a(+inf)|`` and
    ``q- = |a(-inf)/lambda|``; inside it every ratio exceeding ``q`` is
    charged to a window factor ``G = prod max(1, ratio/q)``::

        C+ = sup_{k>=0} 1/|a(k)| * G+ / (1 - q+)
        C- = 1/|lambda| * G- / (1 - q-)
        C  = max(C+, C-)
    """
    _require(seq, lam, 1, "right_inverse_bound")
    m = abs(lam)
    ap = np.abs(seq.on(0, seq.K + 1))
    am = np.abs(seq.on(-seq.K, 0))
    q_plus = m / abs(seq.a_plus)
    q_minus = abs(seq.a_minus) / m
    g_plus = float(np.prod(np.maximum(1.0, (m / ap) / q_plus)))
    g_minus = float(np.prod(np.maximum(1.0, (am / m) / q_minus))) if len(am) else 1.0
    inv_sup = max(float(np.max(1.0 / ap)), 1.0 / abs(seq.a_plus))
    c_plus = inv_sup * g_plus / (1.0 - q_plus)
    c_minus = g_minus / (m * (1.0 - q_minus))
    return max(c_plus, c_minus)


def shoot_solve(seq: CoeffSeq, lam: complex, f: ZVec, N: int = 400) -> tuple[ZVec, float]:
    """Solve ``(aW - lambda) u = f`` in the left regime by two-sided shooting.

    Left regime: ``|a(+inf)| < |lambda| < |a(-inf)|``.  A forward sweep from
    ``u(-N) = 0`` and a backward sweep from ``u(N) = 0`` are each stable in
    their direction; they meet at ``k = 0``.  The mismatch
    ``|u_left(0) - u_right(0)| / (1 + ||f||)`` vanishes (to rounding) iff
    ``f`` lies in the range of the truncated problem.
    """
    _require(seq, lam, -1, "shoot_solve")
    if f.start < -N or f.stop > N:
        raise ValidationError(f"f must be supported in [-N, N-1] for N={N}")
    a_left = seq.on(-N, 0)
    f_left = f.on(-N, 0)
    u_left = kernels.affine_recurrence(lam / a_left, f_left / a_left, 0.0)  # u(-N..0)
    a_right = seq.on(0, N)[::-1]
    f_right = f.on(0, N)[::-1]
    u_right = kernels.affine_recurrence(a_right / lam, -f_right / lam, 0.0)[::-1]  # u(0..N)
    mismatch = abs(u_left[-1] - u_right[0]) / (1.0 + f.norm())
    values = np.concatenate([u_left[:-1], u_right])
    return ZVec(values, -N), float(mismatch)


@dataclass(frozen=True)
class FiniteSection:
    """``(2N+1) x (2N+1)`` section: diagonal ``-lambda``, superdiagonal ``a(i-N)``."""

    lam: complex
    sup: np.ndarray
    N: int

    @property
    def size(self) -> int:
        return 2 * self.N + 1

    def dense(self) -> np.ndarray:
        dtype = np.complex128 if (np.iscomplexobj(self.sup) or complex(self.lam).imag) else np.float64
        n = self.size
        M = np.zeros((n, n), dtype=dtype)
        M[np.arange(n), np.arange(n)] = -self.lam if dtype == np.complex128 else -complex(self.lam).real
        M[np.arange(n - 1), np.arange(1, n)] = self.sup if dtype == np.complex128 else np.real(self.sup)
        return M


def finite_section(seq: CoeffSeq, lam: complex, N: int) -> FiniteSection:
    if N < 4:
        raise ValidationError("finite sections need N >= 4")
    return FiniteSection(lam, seq.on(-N, N), N)


def sigma_min(section: FiniteSection, tol: float = 1e-10, maxiter: int = 10_000) -> float:
    """Smallest singular value by inverse iteration on ``M^H M`` (O(N) per step)."""
    rng = np.random.default_rng(0)
    x0 = 1.0 + 0.1 * rng.standard_normal(section.size)
    sigma, _, _, converged = kernels.inverse_iteration(-complex(section.lam), section.sup, x0, tol, maxiter)
    if not converged:
        raise NoConvergence(f"inverse iteration did not reach tol={tol} in {maxiter} steps")
    return float(sigma)


def singular_values(section: FiniteSection) -> np.ndarray:
    """All singular values, ascending (dense LAPACK route)."""
    return np.linalg.svd(section.dense(), compute_uv=False)[::-1]


def range_residual(seq: CoeffSeq, lam: complex, f: ZVec, N: int) -> float:
    """Relative least-squares distance from ``f`` to ``(aW-lambda)`` of vectors on ``[-N, N]``.

    Uses the full-image section (rows ``-N-1..N``, columns ``-N..N``), which is
    exactly the operator restricted to that subspace, so the result bounds the
    distance to the range from above and converges to it as ``N`` grows.
    """
    n = 2 * N + 1
    a = seq.on(-N - 1, N + 1)
    # row k: a(k) u(k+1) - lam u(k); column c <-> u(c - N)
    A = np.zeros((n + 1, n), dtype=np.complex128)
    for r in range(n + 1):
        k = r - N - 1
        if -N <= k <= N:
            A[r, k + N] = -lam
        if -N <= k + 1 <= N:
            A[r, k + 1 + N] = a[r]
    b = f.on(-N - 1, N + 1).astype(np.complex128)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    return float(np.linalg.norm(A @ sol - b) / max(np.linalg.norm(b), 1e-300))


def fredholm_probe(section: FiniteSection, scale: float | None = None) -> tuple[int, int, np.ndarray]:
    """Count near-null directions of a finite section that live in the interior.

    A singular value below ``TINY_SIGMA * scale`` whose right singular vector
    keeps more than half its mass in ``|k| <= N/2`` witnesses a kernel
    element of the infinite operator; one whose left singular vector does so
    witnesses a cokernel element.  Near-null directions stuck to the
    truncation boundary are artifacts and are ignored.

    Returns ``(kernel_count, cokernel_count, singular_values_ascending)``.
    """
    M = section.dense()
    U, s, Vh = np.linalg.svd(M)
    if scale is None:
        scale = max(abs(section.lam), float(np.max(np.abs(section.sup))) if len(section.sup) else 0.0, 1.0)
    N = section.N
    inner = slice(N - N // 2, N + N // 2 + 1)
    ker = coker = 0
    for i in np.nonzero(s < TINY_SIGMA * scale)[0]:
        v = np.abs(Vh[i]) ** 2
        u = np.abs(U[:, i]) ** 2
        if v[inner].sum() > 0.5:
            ker += 1
        if u[inner].sum() > 0.5:
            coker += 1
    return ker, coker, s[::-1]


def ladder_signature(stat: list[float]) -> str:
    """Classify a finite-section ladder as ``bounded_below``, ``nonclosed`` or ``gray``.

    ``stat`` is the smallest non-artifact singular value at increasing N.
    Bounded below: the last value keeps at least half the first.  Non-closed:
    the last value fell under ``NONCLOSED_RATIO`` of the first and every rung
    falls by ``RUNG_RATIO`` or more (no plateau at or above ``PLATEAU_FLOOR``).
    """
    first, last = stat[0], stat[-1]
    if last >= BOUNDED_RATIO * first:
        return "bounded_below"
    falling = all(b < PLATEAU_FLOOR or b <= RUNG_RATIO * a for a, b in zip(stat, stat[1:]))
    if last < NONCLOSED_RATIO * first and falling:
        return "nonclosed"
    return "gray"


@dataclass
class OracleReport:
    predicted: Status
    modulus: float
    a_minus: float
    a_plus: float
    index_expected: int | None
    kernel_dim_estimate: int
    cokernel_dim_estimate: int
    index_estimate: int
    kernel_vector_found: bool
    ladder: list[tuple[int, float, float]]
    signature: str
    right_inverse_residual: float | None = None
    shooting_mismatch: float | None = None
    recovery_error: float | None = None
    agreement: bool = False
    diagnostics: list[str] = field(default_factory=list)
    edge: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {
            "edge": list(self.edge) if self.edge else None,
            "predicted": self.predicted.value,
            "modulus": self.modulus,
            "a_minus": self.a_minus,
            "a_plus": self.a_plus,
            "index_expected": self.index_expected,
            "observed": {
                "kernel_dim_estimate": self.kernel_dim_estimate,
                "cokernel_dim_estimate": self.cokernel_dim_estimate,
                "index_estimate": self.index_estimate,
                "kernel_vector_found": self.kernel_vector_found,
                "sigma_min": [{"N": n, "sigma_min": s, "second_smallest": s2} for n, s, s2 in self.ladder],
                "signature": self.signature,
                "right_inverse_residual": self.right_inverse_residual,
                "shooting_mismatch": self.shooting_mismatch,
                "recovery_error": self.recovery_error,
            },
            "agreement": self.agreement,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def ladder_csv(self) -> str:
        rows = ["# mswso-ladder v1", "N,sigma_min,second_smallest"]
        rows += [f"{n},{s!r},{s2!r}" for n, s, s2 in self.ladder]
        return "\n".join(rows) + "\n"


_EXPECTED_INDEX = {
    Status.RIGHT_INVERTIBLE: 1,
    Status.LEFT_INVERTIBLE: -1,
    Status.OUTSIDE_SPECTRUM: 0,
}


def block_status(seq: CoeffSeq, lam: complex, tol: float = CIRCLE_TOL) -> Status:
    """Block-level verdict implied by the limits alone."""
    m = abs(lam)
    if _on_circle(m, abs(seq.a_minus), tol) or _on_circle(m, abs(seq.a_plus), tol):
        return Status.ON_CIRCLE
    return {1: Status.RIGHT_INVERTIBLE, -1: Status.LEFT_INVERTIBLE, 0: Status.OUTSIDE_SPECTRUM}[index_of(seq, lam)]


def verify_block(seq: CoeffSeq, lam: complex, predicted: Status,
                 truncations=DEFAULT_TRUNCATIONS, seed: int = 42) -> OracleReport:
    """Check a predicted block verdict against finite-section numerics.

    Runs the kernel construction, a sigma_min ladder over ``truncations``,
    the regime's solver (right inverse or shooting) on a random finitely
    supported input, and an interior near-null count for the index.
    """
    predicted = Status(predicted)
    rng = np.random.default_rng(seed)
    truncations = sorted(truncations)
    diag: list[str] = []
    on_circle = block_status(seq, lam) is Status.ON_CIRCLE
    index_expected = None if on_circle else index_of(seq, lam)

    ker = coker = 0
    ladder = []
    stats = []
    sections = [finite_section(seq, lam, N) for N in truncations]
    ker, coker, s_top = fredholm_probe(sections[-1])
    scale = max(abs(lam), float(np.max(np.abs(sections[-1].sup))), 1.0)
    n_tiny = int(np.sum(s_top < TINY_SIGMA * scale))
    for sec in sections:
        svals = s_top if sec is sections[-1] else singular_values(sec)
        try:
            smin = sigma_min(sec)
        except NoConvergence as exc:
            diag.append(f"N={sec.N}: {exc}")
            smin = float(svals[0])
        second = float(svals[1]) if len(svals) > 1 else math.nan
        ladder.append((sec.N, smin, second))
        stats.append(float(svals[min(n_tiny, len(svals) - 1)]))
    signature = ladder_signature(stats)

    kv = None if on_circle else kernel_vector(seq, lam)
    report = OracleReport(
        predicted=predicted, modulus=abs(lam), a_minus=abs(seq.a_minus), a_plus=abs(seq.a_plus),
        index_expected=index_expected, kernel_dim_estimate=ker, cokernel_dim_estimate=coker,
        index_estimate=ker - coker, kernel_vector_found=kv is not None, ladder=ladder,
        signature=signature, diagnostics=diag)

    f = ZVec(rng.standard_normal(21), -10)
    ok = True
    if index_expected == 1:
        u = right_inverse_apply(seq, lam, f)
        report.right_inverse_residual = window_residual(seq, lam, u, f)
        if report.right_inverse_residual > 1e-12 * (1 + f.norm(np.inf)):
            ok = False
            diag.append(f"right-inverse residual {report.right_inverse_residual:.3e}")
    elif index_expected == -1:
        v = ZVec(rng.standard_normal(21), -10)
        rhs = apply(seq, lam, v)
        u, mism = shoot_solve(seq, lam, rhs, N=truncations[-1])
        report.shooting_mismatch = mism
        err = np.linalg.norm(u.on(-truncations[-1], truncations[-1]) - v.on(-truncations[-1], truncations[-1]))
        report.recovery_error = float(err / v.norm())
        if mism > 1e-10 or report.recovery_error > 1e-8:
            ok = False
            diag.append(f"shooting mismatch {mism:.3e}, recovery error {report.recovery_error:.3e}")

    if predicted is Status.ON_CIRCLE:
        if not on_circle:
            ok = False
            diag.append("predicted a circle hit but |lambda| is off both limit circles")
        if signature != "nonclosed":
            ok = False
            diag.append(f"expected non-closed ladder signature, got {signature}")
    elif predicted in _EXPECTED_INDEX:
        want = _EXPECTED_INDEX[predicted]
        if index_expected != want:
            ok = False
            diag.append(f"limits give index {index_expected}, prediction implies {want}")
        if report.index_estimate != want:
            ok = False
            diag.append(f"finite-section index estimate {report.index_estimate}, expected {want}")
        if (kv is not None) != (want == 1):
            ok = False
            diag.append("kernel vector presence contradicts prediction")
        if signature != "bounded_below":
            ok = False
            diag.append(f"expected bounded-below ladder, got {signature}")
    else:
        ok = False
        diag.append(f"{predicted.value} is not a block-level verdict")
    report.agreement = ok
    return report
