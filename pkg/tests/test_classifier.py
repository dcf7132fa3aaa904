import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mswso.classifier import (ClassifierDisagreement, SimplexAssumptionError, annulus,
                              block_verdict, circles, classify, classify_full, classify_simplex,
                              combine, corner_weights, reduced_coefficient, sigma_order,
                              spectral_radius_estimate)
from mswso.dynamics import SimplexModel, mobius
from mswso.errors import ValidationError
from mswso.expr import parse
from mswso.graph import MSGraph, Vertex, simplex_graph
from mswso.verdicts import Classification, Kernel, Provenance, Range, Status

M1 = SimplexModel(1, mobius(2.0))
M2 = SimplexModel(2, mobius(2.0))


def test_annulus_examples():
    a = annulus([1, 3, 2])
    assert (a.r, a.R) == (1.0, 3.0)
    assert (annulus([5]).r, annulus([5]).R) == (5.0, 5.0)
    assert (annulus([2, 2, 2]).r, annulus([2, 2, 2]).R) == (2.0, 2.0)
    with pytest.raises(ValidationError):
        annulus([1, 0, 2])
    with pytest.raises(ValidationError):
        annulus([])


def test_circles():
    assert circles([1, 3, 2]) == [1.0, 2.0, 3.0]
    assert circles([2, 2, 2]) == [2.0]


def test_subrings_have_constant_verdicts():
    g = simplex_graph(2, [1, 3, 2])
    for lo, hi in zip(circles([1, 3, 2]), circles([1, 3, 2])[1:]):
        verdicts = {classify(g, r).status for r in np.linspace(lo, hi, 23)[1:-1]}
        assert len(verdicts) == 1


def test_classify_examples():
    g = simplex_graph(2, [1, 3, 2])
    c = classify(g, 1.5 * cmath.exp(1j * cmath.pi / 7))
    assert (c.status, c.kernel, c.range) == (Status.RIGHT_INVERTIBLE, Kernel.INFINITE_DIM, Range.CLOSED)
    c = classify(g, 2.0)
    assert c.status is Status.ON_CIRCLE and c.circle_hits == (2,) and c.range is Range.NOT_CLOSED
    assert classify(g, 3.5).status is Status.OUTSIDE_SPECTRUM
    c = classify(simplex_graph(2, [3, 2, 1]), 1.5)
    assert (c.status, c.kernel, c.range) == (Status.LEFT_INVERTIBLE, Kernel.ZERO, Range.CLOSED_NOT_DENSE)


def test_on_circle_without_density_is_unknown():
    g = MSGraph((Vertex(0, "Repelling", 1.0), Vertex(1, "Attracting", 2.0)), frozenset({(0, 1)}))
    assert classify(g, 2.0).range is Range.UNKNOWN
    assert classify(g, 1.5).status is Status.RIGHT_INVERTIBLE


def test_mixed_on_generic_dense_graph_is_not_closed():
    verts = tuple(Vertex(i, "Saddle", w) for i, w in enumerate([1.0, 3.0, 2.0]))
    g = MSGraph(verts, frozenset({(0, 1), (1, 2)}), density_flag=True)
    c = classify(g, 2.5)
    assert (c.status, c.kernel, c.range) == (Status.NOT_ONE_SIDED, Kernel.UNKNOWN, Range.NOT_CLOSED)


def test_disconnected_graph_without_cross_edges_is_invertible():
    verts = tuple(Vertex(i, "Saddle", w) for i, w in enumerate([1.0, 1.2, 3.0, 3.3]))
    g = MSGraph(verts, frozenset({(0, 1), (2, 3)}))
    c = classify(g, 2.0)
    assert (c.status, c.kernel, c.range) == (Status.RIGHT_INVERTIBLE, Kernel.ZERO, Range.CLOSED)


def test_simplex_examples():
    assert sigma_order([1, 3, 2], 1.5).sigma == (0, 2, 1)
    assert sigma_order([1, 3, 2], 1.5).k0 == 1
    c = classify_simplex([1, 3, 2], 1.5)
    assert c.status is Status.RIGHT_INVERTIBLE and c.provenance is Provenance.SIMPLEX_THEOREM
    c = classify_simplex([1, 3, 2], 2.5)
    assert (c.kernel, c.range) == (Kernel.ZERO, Range.DENSE_NOT_CLOSED)
    assert classify_simplex([1, 2, 3], 1).range is Range.NOT_CLOSED


def test_simplex_case_two_without_prefix():
    # weights (1, 3, 0.5, 4) at |lambda| = 2: below are {0, 2}, not a prefix
    c = classify_simplex([1, 3, 0.5, 4], 2.0)
    assert (c.status, c.kernel, c.range) == (Status.NOT_ONE_SIDED, Kernel.INFINITE_DIM, Range.DENSE_NOT_CLOSED)


def test_simplex_assumptions():
    with pytest.raises(SimplexAssumptionError):
        classify_simplex([3, 2, 1], 1.5)
    with pytest.raises(SimplexAssumptionError):
        classify_simplex([1, 1, 2], 1.5)


def test_full_classification_provenance():
    assert classify_full(simplex_graph(2, [1, 3, 2]), 1.5).provenance is Provenance.BOTH
    assert classify_full(simplex_graph(2, [3, 2, 1]), 1.5).provenance is Provenance.MAIN_THEOREM


def test_combine_refines_unknown_and_rejects_conflicts():
    a = Classification(2.0, Status.ON_CIRCLE, Kernel.UNKNOWN, Range.NOT_CLOSED, Provenance.MAIN_THEOREM, (1,))
    b = Classification(2.0, Status.ON_CIRCLE, Kernel.ZERO, Range.NOT_CLOSED, Provenance.SIMPLEX_THEOREM, (1,))
    assert combine(a, b).kernel is Kernel.ZERO
    c = Classification(2.0, Status.NOT_ONE_SIDED, Kernel.ZERO, Range.NOT_CLOSED, Provenance.SIMPLEX_THEOREM)
    with pytest.raises(ClassifierDisagreement):
        combine(a, c)


def test_block_verdict():
    assert block_verdict(1, 3, 1.5) is Status.RIGHT_INVERTIBLE
    assert block_verdict(3, 2, 2.5) is Status.LEFT_INVERTIBLE
    assert block_verdict(1, 2, 2.0) is Status.ON_CIRCLE
    assert block_verdict(1, 2, 3.0) is Status.OUTSIDE_SPECTRUM


# -- reduced coefficient -------------------------------------------------------

def _measure_ratio(y, h=1e-6):
    # Lebesgue measure of alpha^-1([y-h, y+h]) over 2h, by the closed-form inverse.
    inv = lambda t: t / (2 - t)
    lo, hi = max(y - h, 0.0), min(y + h, 1.0)
    return (inv(hi) - inv(lo)) / (hi - lo)


def test_reduced_coefficient_mobius():
    a = reduced_coefficient("1", M1)
    assert _measure_ratio(0.0) == pytest.approx(0.5, rel=1e-5)
    assert a(np.array([[0.0]]))[0] == pytest.approx(_measure_ratio(0.0) ** -0.5, rel=1e-5)
    assert a(np.array([[0.0]]))[0] == pytest.approx(np.sqrt(2), rel=1e-12)
    a0 = parse("3+x1", 1)
    a = reduced_coefficient(a0, M1)
    assert a(np.array([[1.0]]))[0] == pytest.approx(4 / np.sqrt(2), rel=1e-12)


def test_reduced_coefficient_with_numeric_derivative():
    from mswso.dynamics import make_interval_map
    model = SimplexModel(1, make_interval_map("2*x/(1+x)"))
    a = reduced_coefficient("1", model)
    ys = np.array([[0.0], [0.5], [1.0]])
    exact = np.sqrt((2 - ys[:, 0]) ** 2 / 2)
    assert np.allclose(a(ys), exact, rtol=1e-6)


def test_reduced_coefficient_measure_preserving():
    from mswso.dynamics import IntervalMap
    ident = IntervalMap(lambda x: x, lambda x: x, lambda x: np.ones_like(np.asarray(x, dtype=float)))
    a = reduced_coefficient("1", SimplexModel(2, ident))
    assert np.all(a(np.random.default_rng(0).random((10, 2))) == 1.0)


def test_reduced_coefficient_product_density():
    a = reduced_coefficient("1", M2)
    y = np.array([[0.2, 0.7]])
    rho = 2 / (2 - 0.2) ** 2 * 2 / (2 - 0.7) ** 2
    assert a(y)[0] == pytest.approx(rho ** -0.5, rel=1e-12)


def test_spectral_radius_examples():
    est = spectral_radius_estimate(M1, lambda p: 1 + p[..., 0], 200)
    assert abs(est - 2.0) / 2.0 < 0.02
    est = spectral_radius_estimate(M1, lambda p: 3.0 + 0 * p[..., 0], 17)
    assert est == pytest.approx(3.0, rel=1e-15)
    a = parse("1+2*x2-x1", 2)
    assert corner_weights(M2, a) == [1.0, 3.0, 2.0]
    est = spectral_radius_estimate(M2, a, 200)
    assert abs(est - 3.0) / 3.0 < 0.02


def test_spectral_radius_grows_with_window_and_is_bounded():
    a = parse("1+2*x2-x1", 2)
    ests = [spectral_radius_estimate(M2, a, n, samples=100, rng=np.random.default_rng(3))
            for n in (5, 20, 80, 200)]
    assert all(e2 >= e1 - 1e-9 for e1, e2 in zip(ests, ests[1:]))
    assert max(ests) <= 3.0 + 1e-9


# -- invariants ----------------------------------------------------------------

@st.composite
def simplex_instances(draw):
    m = draw(st.integers(1, 4))
    ws = draw(st.lists(st.floats(0.1, 10), min_size=m + 1, max_size=m + 1, unique=True))
    if ws[0] > ws[-1]:
        ws[0], ws[-1] = ws[-1], ws[0]
    modulus = draw(st.floats(0.01, 12))
    phase = draw(st.floats(0, 2 * np.pi))
    return ws, modulus, phase


@settings(max_examples=1000, deadline=None)
@given(simplex_instances())
def test_classifiers_agree(inst):
    ws, modulus, phase = inst
    if any(abs(w - modulus) <= 1e-9 * w for w in ws) or ws[0] == ws[-1]:
        return
    lam = modulus * cmath.exp(1j * phase)
    a = classify(simplex_graph(len(ws) - 1, ws), lam)
    b = classify_simplex(ws, lam)
    assert (a.status, a.kernel, a.range) == (b.status, b.kernel, b.range)


@settings(max_examples=500, deadline=None)
@given(simplex_instances(), st.floats(0, 2 * np.pi), st.floats(0.01, 100))
def test_phase_and_scale(inst, theta, c):
    ws, modulus, phase = inst
    g = simplex_graph(len(ws) - 1, ws)
    base = classify(g, modulus)
    assert classify(g, modulus * cmath.exp(1j * theta)).same_verdict(base)
    hits = [i for i, w in enumerate(ws) if abs(w - modulus) <= 1e-9 * w]
    if not hits:
        scaled = classify(simplex_graph(len(ws) - 1, [c * w for w in ws]), c * modulus)
        assert scaled.same_verdict(base)


@settings(max_examples=500, deadline=None)
@given(simplex_instances())
def test_outside_iff_off_annulus(inst):
    ws, modulus, _ = inst
    c = classify(simplex_graph(len(ws) - 1, ws), modulus)
    outside = modulus < min(ws) or modulus > max(ws)
    assert (c.status is Status.OUTSIDE_SPECTRUM) == outside


@settings(max_examples=500, deadline=None)
@given(simplex_instances())
def test_verdict_invariants(inst):
    ws, modulus, _ = inst
    c = classify_full(simplex_graph(len(ws) - 1, ws), modulus)
    if c.status is Status.OUTSIDE_SPECTRUM:
        assert (c.kernel, c.range) == (Kernel.ZERO, Range.CLOSED)
    if c.status is Status.RIGHT_INVERTIBLE:
        assert (c.kernel, c.range) == (Kernel.INFINITE_DIM, Range.CLOSED)
    if c.status is Status.LEFT_INVERTIBLE:
        assert (c.kernel, c.range) == (Kernel.ZERO, Range.CLOSED_NOT_DENSE)
    if c.status in (Status.NOT_ONE_SIDED, Status.ON_CIRCLE):
        assert c.range in (Range.NOT_CLOSED, Range.DENSE_NOT_CLOSED)
