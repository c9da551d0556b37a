"""Periodic Haar analysis of piecewise-constant signals.

A signal of ``2^L`` samples is read as the function taking value
``x[k]`` on ``[k 2^-L, (k+1) 2^-L)``.  The forward transform returns the
coefficients ``a_{j,k} = 2^{j/2} <f, Psi_{j,k}>`` for ``j = 0 .. L-1``,
which for Haar reduce to half-differences of neighbouring cell means.
Scale 0 holds ``[<f, phi>, <f, psi>]``.
"""

from __future__ import annotations

import numpy as np

from .estimator import CriticalCurve
from .sequence import WaveletSequence

HAAR_SCALE0_SIZE = 2


def _log2_length(n: int) -> int:
    if n < 2 or n & (n - 1):
        raise ValueError(f"signal length must be a power of two >= 2, got {n}")
    return n.bit_length() - 1


def haar_forward(samples) -> WaveletSequence:
    x = np.asarray(samples, dtype=float).reshape(-1)
    levels = _log2_length(x.size)
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite samples")
    details = [None] * levels
    means = x
    for j in range(levels - 1, -1, -1):
        left, right = means[0::2], means[1::2]
        details[j] = 0.5 * (left - right)
        means = 0.5 * (left + right)
    blocks = [np.array([means[0], details[0][0]])] + details[1:]
    return WaveletSequence(tuple(blocks), meta={"basis": "haar", "n_samples": int(x.size)})


def haar_inverse(seq: WaveletSequence) -> np.ndarray:
    if seq.scales[0].size != HAAR_SCALE0_SIZE:
        raise ValueError("sequence does not use the two-entry Haar scale-0 layout")
    means = seq.scales[0][:1].copy()
    details = [seq.scales[0][1:]] + list(seq.scales[1:])
    for d in details:
        out = np.empty(2 * means.size)
        out[0::2] = means + d
        out[1::2] = means - d
        means = out
    return means


def energy(seq: WaveletSequence) -> float:
    """``sum <f, Psi>^2``, equal to ``||f||_2^2`` for Haar sequences."""
    total = float(np.sum(seq.scales[0] ** 2))
    for j, b in enumerate(seq.scales[1:], start=1):
        total += 2.0**-j * float(np.sum(b**2))
    return total


def above_haar_range(curve: CriticalCurve, slack: float = 1e-9) -> list:
    """Grid points where the estimate exceeds ``min(1, u)``, beyond what Haar can certify."""
    limit = np.minimum(1.0, curve.u_grid)
    flagged = curve.s_values > limit + slack
    return [float(u) for u in curve.u_grid[flagged]]


# -- test signals ----------------------------------------------------------


def step_signal(levels: int, jump: float = 1.0 / 3.0) -> np.ndarray:
    """``1`` on ``[0, jump)`` and ``-1`` on ``[jump, 1)``, cell-averaged at ``2^levels`` samples."""
    n = 1 << levels
    edges = np.arange(n + 1) / n
    below = np.clip(jump - edges[:-1], 0.0, 1.0 / n) * n
    return 2.0 * below - 1.0


def random_walk_bridge(levels: int, seed: int) -> np.ndarray:
    """Periodic random walk: cumulative Gaussian steps of size ``2^(-levels/2)``, endpoint removed linearly."""
    n = 1 << levels
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    walk = np.cumsum(rng.standard_normal(n)) * 2.0 ** (-levels / 2)
    return walk - walk[-1] * (np.arange(1, n + 1) / n)
