import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from besovseq.estimator import CriticalCurve, estimate_curve
from besovseq.haar import (
    above_haar_range,
    energy,
    haar_forward,
    haar_inverse,
    random_walk_bridge,
    step_signal,
)
from besovseq.synthesis import combine, dirac_model

signals = st.integers(1, 10).flatmap(
    lambda L: st.lists(st.floats(-1e3, 1e3), min_size=2**L, max_size=2**L)
)


def test_two_sample_transform():
    seq = haar_forward([3.0, 1.0])
    assert seq.scales[0].tolist() == [2.0, 1.0]
    assert seq.meta["basis"] == "haar"


def test_four_sample_transform():
    seq = haar_forward([4.0, 2.0, 1.0, 1.0])
    assert seq.scales[0].tolist() == [2.0, 1.0]
    assert seq.scales[1].tolist() == [1.0, 0.0]


@settings(deadline=None)
@given(signals)
def test_round_trip(x):
    back = haar_inverse(haar_forward(x))
    assert np.allclose(back, x, rtol=1e-12, atol=1e-9)


@settings(deadline=None)
@given(signals)
def test_parseval(x):
    x = np.array(x)
    assert energy(haar_forward(x)) == pytest.approx(float(np.mean(x**2)), rel=1e-12, abs=1e-12)


@settings(deadline=None)
@given(signals, st.floats(-10, 10))
def test_linearity(x, lam):
    x = np.array(x)
    y = np.roll(x, 1)
    lhs = haar_forward(x + lam * y)
    rhs = combine([haar_forward(x), haar_forward(y)], [1.0, lam])
    assert np.allclose(lhs.flat(), rhs.flat(), rtol=1e-12, atol=1e-9)


def test_constant_signal_is_infinitely_smooth():
    curve = estimate_curve(haar_forward(np.full(1024, 2.5)))
    assert curve.infinitely_smooth


def test_step_at_one_third_gives_u():
    curve = estimate_curve(haar_forward(step_signal(14)))
    assert np.allclose(curve.s_values, curve.u_grid, atol=1e-9)


def test_dyadic_step_is_invisible():
    curve = estimate_curve(haar_forward(step_signal(12, jump=0.5)))
    assert curve.infinitely_smooth


def test_step_signal_cell_averages():
    x = step_signal(2, jump=1 / 3)
    # [1/4, 1/2) is one third +1 and two thirds -1
    assert np.allclose(x, [1.0, -1 / 3, -1.0, -1.0])


def test_random_walk_close_to_half():
    curve = estimate_curve(haar_forward(random_walk_bridge(14, 0)))
    assert np.all(np.abs(curve.s_values - 0.5) <= 0.2)
    assert random_walk_bridge(6, 3)[-1] == pytest.approx(0.0, abs=1e-15)
    assert np.array_equal(random_walk_bridge(6, 3), random_walk_bridge(6, 3))


def test_bad_lengths():
    for n in (0, 1, 3, 12):
        with pytest.raises(ValueError):
            haar_forward(np.zeros(n))
    with pytest.raises(ValueError):
        haar_forward([0.0, math.nan])


def test_inverse_rejects_other_layout():
    with pytest.raises(ValueError):
        haar_inverse(dirac_model(4))


def test_above_haar_range():
    curve = CriticalCurve([0.0, 0.5, 1.0, 2.0], [0.0, 0.6, 1.0, 1.5])
    assert above_haar_range(curve) == [0.5, 2.0]


def test_sampled_spike_matches_dirac_model():
    # a cell-averaged spike of mass 1 at the origin has Haar details 2^j at k = 0
    levels = 12
    spike = np.zeros(2**levels)
    spike[0] = 2.0**levels
    seq = haar_forward(spike)
    ref = dirac_model(levels - 1)
    for j in range(1, levels):
        assert np.array_equal(seq.scales[j], ref.scales[j])
    assert seq.scales[0].tolist() == [1.0, 1.0]
    curve = estimate_curve(seq)
    assert np.allclose(curve.s_values, curve.u_grid - 1, atol=1e-12)
