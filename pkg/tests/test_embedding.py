import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from besovseq.embedding import binding_condition, embedding_cost, embeds, interpolate, min_curve
from besovseq.estimator import CriticalCurve
from besovseq.sequence import BesovParams

P = st.one_of(st.floats(0.2, 20.0), st.just(math.inf))
S = st.floats(-3, 3)
SPACE = st.builds(BesovParams, P, P, S)


def test_embeds_examples():
    assert embeds(BesovParams(1, 1, 2), BesovParams(2, 2, 1))
    assert embeds(BesovParams(2, 2, 1), BesovParams(1, 1, 0.5))
    assert not embeds(BesovParams(1, 1, 1), BesovParams(math.inf, math.inf, 0.0))


def test_embedding_cost():
    assert embedding_cost(BesovParams(1, 1, 0), BesovParams(2, 1, 0)) == pytest.approx(0.5)
    assert embedding_cost(BesovParams(2, 1, 0), BesovParams(1, 1, 0)) == 0.0


def test_binding_condition_text():
    text = binding_condition(BesovParams(1, 1, 2), BesovParams(2, 2, 1))
    assert text.startswith("s_dst = 1 <")
    assert "no integrability cost" in binding_condition(BesovParams(2, 2, 1), BesovParams(1, 1, 0))


def test_interpolate_examples():
    mid = interpolate(BesovParams(1, 1, 0), BesovParams(math.inf, math.inf, 1), 0.5)
    assert (mid.p, mid.q, mid.s) == pytest.approx((2.0, 2.0, 0.5))
    same = BesovParams(0.8, 0.8, 0.0)
    assert interpolate(same, same, 0.3) is same
    with pytest.raises(ValueError):
        interpolate(same, same, 1.0)


@given(SPACE, SPACE, SPACE)
def test_embedding_is_transitive(a, b, c):
    if embeds(a, b) and embeds(b, c):
        assert embeds(a, c)


@given(SPACE, S)
def test_equal_integrability_reduces_to_smoothness(a, s):
    b = BesovParams(a.p, a.q, s)
    assert embeds(a, b) == (s < a.s)


@given(SPACE, SPACE, st.floats(0.01, 0.99))
def test_interpolation_of_inverses_is_affine(a, b, lam):
    assume(a != b)
    c = interpolate(a, b, lam)
    assert c.inv_p == pytest.approx(lam * a.inv_p + (1 - lam) * b.inv_p, abs=1e-12)
    assert c.inv_q == pytest.approx(lam * a.inv_q + (1 - lam) * b.inv_q, abs=1e-12)
    assert c.s == pytest.approx(lam * a.s + (1 - lam) * b.s, abs=1e-12)


@given(SPACE, SPACE, st.floats(1e-9, 1e-6))
def test_interpolation_endpoints(a, b, eps):
    assume(a != b)
    near_a = interpolate(a, b, 1 - eps)
    near_b = interpolate(a, b, eps)
    assert near_a.s == pytest.approx(a.s, abs=1e-5)
    assert near_b.s == pytest.approx(b.s, abs=1e-5)
    assert near_a.inv_p == pytest.approx(a.inv_p, abs=1e-5)
    assert near_b.inv_p == pytest.approx(b.inv_p, abs=1e-5)


def test_min_curve():
    u = [0.0, 1.0, 2.0]
    m = min_curve(CriticalCurve(u, [0.0, 1.0, 2.0]), CriticalCurve(u, [1.0, 1.0, 1.0]))
    assert np.array_equal(m.s_values, [0.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        min_curve(m, CriticalCurve([0.0, 1.0], [0.0, 0.0]))


def test_embeds_reference_examples():
    assert embeds(BesovParams(1, 1, 1), BesovParams(2, 2, 0.4))
    assert embeds(BesovParams(2, 2, 1), BesovParams(1, 1, 0.9))
    same = BesovParams(1.5, 2, 0.3)
    assert not embeds(same, same)


def test_interpolate_quasi_banach_example():
    c = interpolate(BesovParams(0.5, 0.5, -1), BesovParams(2, 2, 1), 0.5)
    assert (c.p, c.q, c.s) == (0.8, 0.8, 0.0)


def test_min_curve_kink_passes_checks():
    from besovseq.estimator import check_curve_properties

    u = np.array([0.0, 0.5, 1.0, 2.0, 4.0])
    m = min_curve(CriticalCurve(u, u), CriticalCurve(u, np.ones_like(u)))
    assert np.array_equal(m.s_values, np.minimum(u, 1))
    assert check_curve_properties(m, tol=1e-12).passed
    assert min_curve(m, m).s_values.tolist() == m.s_values.tolist()


GRID_U = [0.0, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0]


@pytest.fixture(scope="module")
def estimated_curves():
    from besovseq.estimator import estimate_curve
    from besovseq.synthesis import dirac_model, gaussian_cascade, lacunary

    seqs = [dirac_model(14), lacunary(0.5, 0.0, 16), lacunary(0.25, 1.0, 16)]
    seqs += [gaussian_cascade(0.5, 14, seed) for seed in range(3)]
    return [(estimate_curve(s), 2.0 / s.max_scale) for s in seqs]


@settings(deadline=None)
@given(
    st.sampled_from(GRID_U), st.sampled_from(GRID_U), st.floats(-2, 2), st.floats(-3, 3), st.integers(0, 5)
)
def test_embedding_consistent_with_estimated_curves(estimated_curves, u1, u2, s1, s2, which):
    curve, tau = estimated_curves[which]
    src = BesovParams(math.inf if u1 == 0 else 1 / u1, 1.0, s1)
    dst = BesovParams(math.inf if u2 == 0 else 1 / u2, 1.0, s2)
    if embeds(src, dst) and float(curve(u1)) > s1:
        assert float(curve(u2)) >= s2 - tau
