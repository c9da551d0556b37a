"""Constructors for coefficient sequences with known critical curves.

Every synthetic sequence uses a single scale-0 coefficient.  Curves are
parametrized by ``u = 1/p`` throughout, so a lacunary sequence with
parameters ``(alpha0, s0)`` has critical curve ``s(u) = s0 + alpha0 * u``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import ShapeMismatch
from .sequence import WaveletSequence, expected_block_size

# Guards the floor in the active count against j*(1 - alpha0) landing a
# hair below an integer, e.g. 0.7 * 10 evaluating to 6.999999999999999.
_FLOOR_GUARD = 1e-9


@dataclass(frozen=True)
class LacunarySpec:
    alpha0: float
    s0: float
    max_scale: int

    def __post_init__(self):
        if not (0.0 <= self.alpha0 <= 1.0):
            raise ValueError(f"alpha0 must lie in [0, 1], got {self.alpha0!r}")
        if not math.isfinite(self.s0):
            raise ValueError(f"s0 must be finite, got {self.s0!r}")
        if int(self.max_scale) != self.max_scale or self.max_scale < 1:
            raise ValueError(f"max_scale must be an integer >= 1, got {self.max_scale!r}")

    def active_count(self, j: int) -> int:
        return active_count(self.alpha0, j)


def active_count(alpha0: float, j: int) -> int:
    """``m_j = 2^floor(j (1 - alpha0))``, the number of non-zero entries at scale j."""
    return 1 << int(math.floor(j * (1.0 - alpha0) + _FLOOR_GUARD))


def lacunary(alpha0: float, s0: float, max_scale: int, *, offset: int = 0) -> WaveletSequence:
    """Lacunary sequence with critical curve ``s0 + alpha0 * u``.

    Scale ``j`` carries ``m_j`` entries equal to ``2^(-j s0)``, evenly spaced
    with stride ``2^j / m_j``.  ``offset`` shifts the starting position inside
    each stride so that several lacunary terms can be given disjoint supports.
    """
    lac = LacunarySpec(float(alpha0), float(s0), int(max_scale))
    blocks = []
    for j in range(lac.max_scale + 1):
        size = 1 if j == 0 else expected_block_size(j)
        m = min(lac.active_count(j), size)
        stride = size // m
        block = np.zeros(size)
        block[offset % stride :: stride] = 2.0 ** (-j * lac.s0)
        blocks.append(block)
    meta = {"model": "lacunary", "alpha0": lac.alpha0, "s0": lac.s0, "offset": int(offset)}
    return WaveletSequence(tuple(blocks), meta=meta)


def dirac_model(max_scale: int) -> WaveletSequence:
    """Haar-type coefficients of a point mass at 0: ``a_{j,0} = 2^j``."""
    if int(max_scale) != max_scale or max_scale < 1:
        raise ValueError(f"max_scale must be an integer >= 1, got {max_scale!r}")
    blocks = []
    for j in range(int(max_scale) + 1):
        block = np.zeros(1 if j == 0 else expected_block_size(j))
        block[0] = 2.0**j
        blocks.append(block)
    return WaveletSequence(tuple(blocks), meta={"model": "dirac"})


def scale_generator(seed: int, j: int) -> np.random.Generator:
    """Counter-based generator for scale ``j``; independent of every other scale."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(j,))))


def gaussian_cascade(H: float, max_scale: int, seed: int) -> WaveletSequence:
    """``a_{j,k} = 2^(-j H) g_{j,k}`` with i.i.d. standard normal ``g``.

    Each scale draws from its own Philox stream keyed by ``(seed, j)``, so
    the value at ``(j, k)`` does not depend on how many scales are built or
    in which order.
    """
    if not (0.0 < H < 1.0):
        raise ValueError(f"H must lie in (0, 1), got {H!r}")
    if int(max_scale) != max_scale or max_scale < 1:
        raise ValueError(f"max_scale must be an integer >= 1, got {max_scale!r}")
    blocks = []
    for j in range(int(max_scale) + 1):
        size = 1 if j == 0 else expected_block_size(j)
        g = scale_generator(int(seed), j).standard_normal(size)
        blocks.append(2.0 ** (-j * H) * g)
    return WaveletSequence(tuple(blocks), meta={"model": "gaussian", "H": H, "seed": int(seed)})


def apply_sobolev(seq: WaveletSequence, gamma: float) -> WaveletSequence:
    """Multiply scale ``j`` by ``2^(j gamma)``; lowers every critical value by ``gamma``."""
    if gamma == 0:
        return seq
    return seq.map_scales(lambda j, b: b * 2.0 ** (j * gamma))


def combine(seqs: Sequence[WaveletSequence], weights: Sequence[float]) -> WaveletSequence:
    """Pointwise weighted sum of sequences sharing one pyramid layout."""
    if len(seqs) == 0:
        raise ValueError("combine needs at least one sequence")
    if len(seqs) != len(weights):
        raise ValueError(f"{len(seqs)} sequences but {len(weights)} weights")
    shape = seqs[0].shape
    for i, s in enumerate(seqs[1:], start=1):
        if s.shape != shape:
            raise ShapeMismatch(f"sequence {i} has layout {s.shape}, expected {shape}")
    blocks = []
    for j in range(len(shape)):
        acc = np.zeros(shape[j])
        for s, w in zip(seqs, weights):
            acc += float(w) * s.scales[j]
        blocks.append(acc)
    return WaveletSequence(tuple(blocks), meta={"model": "combine", "weights": [float(w) for w in weights]})


# -- curve to sequence ---------------------------------------------------


@dataclass(frozen=True)
class TangentTerm:
    """One lacunary summand ``weight * lacunary(alpha_n, s_n)`` of :func:`from_curve`."""

    index: int
    p_n: float
    alpha_n: float
    s_n: float
    epsilon_n: float
    weight: float

    @property
    def u_n(self) -> float:
        return 1.0 / self.p_n

    def line(self, u):
        return self.s_n + self.alpha_n * np.asarray(u, dtype=float)

    def to_dict(self) -> dict:
        return asdict(self)


def gap_for_index(n: int) -> float:
    """``eps_n`` solving ``1 - 2^(-eps_n) = 1/n``."""
    if n < 2:
        raise ValueError("the gap is only finite for n >= 2")
    return -math.log2(1.0 - 1.0 / n)


def first_index_for_gap(max_gap: float) -> int:
    """Smallest ``n >= 2`` whose gap ``eps_n`` does not exceed ``max_gap``."""
    if max_gap <= 0:
        raise ValueError("max_gap must be positive")
    # eps_n <= g  <=>  n >= 1 / (1 - 2^-g)
    n = max(2, math.ceil(1.0 / (1.0 - 2.0**-max_gap)))
    while n > 2 and gap_for_index(n - 1) <= max_gap:
        n -= 1
    while gap_for_index(n) > max_gap:
        n += 1
    return n


def validate_curve_samples(u, s, slack: float = 1e-9) -> None:
    """Reject samples that are not increasing, concave and 1-Lipschitz in ``u``."""
    u = np.asarray(u, dtype=float)
    s = np.asarray(s, dtype=float)
    if u.ndim != 1 or u.shape != s.shape or u.size < 2:
        raise ValueError("need at least two (u, s) samples of matching length")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(s))):
        raise ValueError("curve samples must be finite")
    if u[0] < 0:
        raise ValueError("u = 1/p must be non-negative")
    if np.any(np.diff(u) <= 0):
        raise ValueError("u must be strictly increasing")
    slopes = np.diff(s) / np.diff(u)
    if np.any(slopes < -slack):
        i = int(np.argmin(slopes))
        raise ValueError(f"curve is decreasing between u={u[i]} and u={u[i + 1]} (slope {slopes[i]})")
    if np.any(slopes > 1 + slack):
        i = int(np.argmax(slopes))
        raise ValueError(f"curve is steeper than 1 between u={u[i]} and u={u[i + 1]} (slope {slopes[i]})")
    if slopes.size > 1 and np.any(np.diff(slopes) > slack):
        i = int(np.argmax(np.diff(slopes)))
        raise ValueError(f"curve is not concave around u={u[i + 1]}")


def _anchor_indices(u: np.ndarray, n_terms: int) -> list:
    targets = np.linspace(u[0], u[-1], n_terms)
    picked = []
    for t in targets:
        i = int(np.argmin(np.abs(u - t)))
        if i not in picked:
            picked.append(i)
    return sorted(picked)


def _secant_slope(u: np.ndarray, s: np.ndarray, i: int) -> float:
    lo = max(i - 1, 0)
    hi = min(i + 1, u.size - 1)
    return (s[hi] - s[lo]) / (u[hi] - u[lo])


def from_curve(
    samples,
    n_terms: int,
    max_scale: int,
    *,
    max_gap: float = 0.025,
) -> tuple:
    """Build a sequence whose critical curve approximates the sampled one.

    ``samples`` is a sequence of ``(u, s)`` pairs.  Anchors are spread
    uniformly over the sampled ``u`` range.  At each anchor the curve is
    replaced by a tangent line lifted by the gap ``eps_n`` and realized as a
    lacunary sequence; the terms are added with weights ``2^-n``.  Term
    indices start at the first ``n`` whose gap is at most ``max_gap`` and
    increase with ``u``.

    Returns ``(sequence, terms)``.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("samples must be a list of (u, s) pairs")
    u, s = pts[:, 0], pts[:, 1]
    validate_curve_samples(u, s)
    if int(n_terms) != n_terms or n_terms < 1:
        raise ValueError(f"n_terms must be a positive integer, got {n_terms!r}")
    if int(max_scale) != max_scale or max_scale < 4:
        raise ValueError(f"max_scale must be an integer >= 4, got {max_scale!r}")

    n0 = first_index_for_gap(max_gap)
    terms = []
    for i, idx in enumerate(_anchor_indices(u, int(n_terms))):
        n = n0 + i
        eps = gap_for_index(n)
        alpha = float(np.clip(_secant_slope(u, s, idx), 0.0, 1.0))
        u_n = float(u[idx])
        terms.append(
            TangentTerm(
                index=n,
                p_n=math.inf if u_n == 0 else 1.0 / u_n,
                alpha_n=alpha,
                s_n=float(s[idx]) + eps - alpha * u_n,
                epsilon_n=eps,
                weight=2.0**-n,
            )
        )

    parts = [lacunary(t.alpha_n, t.s_n, int(max_scale), offset=k) for k, t in enumerate(terms)]
    seq = combine(parts, [t.weight for t in terms])
    seq = seq.with_meta(model="from_curve", n_terms=int(n_terms), max_gap=max_gap)
    return seq, terms
