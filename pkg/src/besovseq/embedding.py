"""Parameter calculus for embeddings and interpolation of Besov spaces.

:func:`embeds` encodes a sufficient condition only.  ``False`` means the
inclusion does not follow from it, not that the inclusion fails.
"""

from __future__ import annotations

import math

import numpy as np

from .estimator import CriticalCurve
from .sequence import BesovParams

SpaceId = BesovParams


def embedding_cost(src: SpaceId, dst: SpaceId) -> float:
    """Smoothness lost when moving from ``src`` to ``dst``: ``max(1/p_src - 1/p_dst, 0)``."""
    return max(src.inv_p - dst.inv_p, 0.0)


def embeds(src: SpaceId, dst: SpaceId) -> bool:
    """True when ``s_dst < s_src - max(1/p_src - 1/p_dst, 0)``; ``q`` is ignored."""
    return dst.s < src.s - embedding_cost(src, dst)


def binding_condition(src: SpaceId, dst: SpaceId) -> str:
    """Human-readable form of the inequality :func:`embeds` tests."""
    cost = embedding_cost(src, dst)
    rhs = src.s - cost
    if cost > 0:
        how = f"s_src - (1/p_src - 1/p_dst) = {src.s:g} - {cost:g} = {rhs:g}"
    else:
        how = f"s_src = {src.s:g} (1/p_dst >= 1/p_src, no integrability cost)"
    rel = "<" if dst.s < rhs else ">="
    return f"s_dst = {dst.s:g} {rel} {how}"


def _from_inverse(inv: float) -> float:
    return math.inf if inv == 0 else 1.0 / inv


def interpolate(a: SpaceId, b: SpaceId, lam: float) -> SpaceId:
    """Complex interpolation parameters: ``1/p``, ``1/q`` and ``s`` are affine in ``lam``."""
    if not (0.0 < lam < 1.0):
        raise ValueError(f"lambda must lie in (0, 1), got {lam!r}")
    if a == b:
        return a
    inv_p = lam * a.inv_p + (1 - lam) * b.inv_p
    inv_q = lam * a.inv_q + (1 - lam) * b.inv_q
    s = lam * a.s + (1 - lam) * b.s
    return BesovParams(_from_inverse(inv_p), _from_inverse(inv_q), s)


def min_curve(a: CriticalCurve, b: CriticalCurve) -> CriticalCurve:
    """Pointwise minimum of two curves on a shared grid."""
    if a.u_grid.shape != b.u_grid.shape or not np.array_equal(a.u_grid, b.u_grid):
        raise ValueError("curves are sampled on different u grids")
    return CriticalCurve(a.u_grid, np.minimum(a.s_values, b.s_values))
