"""Coefficient pyramids and Besov sequence (quasi-)norms.

A :class:`WaveletSequence` stores real coefficients ``a[j][k]`` for scales
``j = 0..J`` under the normalization ``a_{j,k} = 2^{j/2} <f, Psi_{j,k}>``.
Scale 0 holds one or two entries (synthetic models use one, the Haar
layout uses two: scaling function and mother wavelet); scale ``j >= 1``
holds exactly ``2^j`` entries.

All norms are evaluated in the log2 domain.  Within a scale the
magnitudes are sorted in decreasing order and accumulated in extended
precision, so a permutation of the coefficients inside a scale cannot
change any result.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

A_CONVENTION = "a2j"
FILE_VERSION = 1

INF = math.inf


def _as_extended(p) -> float:
    p = float(p)
    if math.isnan(p) or p <= 0:
        raise ValueError(f"integrability exponent must lie in (0, inf], got {p!r}")
    return p


@dataclass(frozen=True)
class BesovParams:
    """Index triple ``(p, q, s)`` of the sequence space ``b^s_{p,q}``."""

    p: float
    q: float
    s: float

    def __post_init__(self):
        object.__setattr__(self, "p", _as_extended(self.p))
        object.__setattr__(self, "q", _as_extended(self.q))
        s = float(self.s)
        if not math.isfinite(s):
            raise ValueError(f"smoothness must be finite, got {s!r}")
        object.__setattr__(self, "s", s)

    @property
    def inv_p(self) -> float:
        return 0.0 if math.isinf(self.p) else 1.0 / self.p

    @property
    def inv_q(self) -> float:
        return 0.0 if math.isinf(self.q) else 1.0 / self.q


def expected_block_size(j: int) -> int:
    return 1 << j


@dataclass(frozen=True)
class WaveletSequence:
    """Dyadic pyramid of wavelet coefficients, immutable after construction."""

    scales: tuple
    meta: dict = field(default_factory=dict, compare=False)
    convention: str = A_CONVENTION

    def __post_init__(self):
        if self.convention != A_CONVENTION:
            raise ValueError(f"unsupported coefficient convention {self.convention!r}")
        blocks = []
        for j, block in enumerate(self.scales):
            arr = np.array(block, dtype=float).reshape(-1)
            if j == 0:
                if arr.size not in (1, 2):
                    raise ValueError(f"scale 0 must hold 1 or 2 coefficients, got {arr.size}")
            elif arr.size != expected_block_size(j):
                raise ValueError(
                    f"scale {j} must hold {expected_block_size(j)} coefficients, got {arr.size}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"scale {j} contains non-finite coefficients")
            arr.setflags(write=False)
            blocks.append(arr)
        if not blocks:
            raise ValueError("a sequence needs at least scale 0")
        object.__setattr__(self, "scales", tuple(blocks))
        object.__setattr__(self, "meta", dict(self.meta))

    @classmethod
    def zeros(cls, max_scale: int, scale0_size: int = 1, meta=None) -> "WaveletSequence":
        blocks = [np.zeros(scale0_size)]
        blocks += [np.zeros(expected_block_size(j)) for j in range(1, max_scale + 1)]
        return cls(tuple(blocks), meta=meta or {})

    @property
    def max_scale(self) -> int:
        return len(self.scales) - 1

    @property
    def shape(self) -> tuple:
        return tuple(b.size for b in self.scales)

    @property
    def n_coefficients(self) -> int:
        return sum(self.shape)

    @property
    def n_nonzero(self) -> int:
        return int(sum(np.count_nonzero(b) for b in self.scales))

    def flat(self) -> np.ndarray:
        """All coefficients in (scale, index) order."""
        return np.concatenate(self.scales)

    def scale_indices(self) -> np.ndarray:
        """Scale index of every entry of :meth:`flat`."""
        return np.concatenate([np.full(b.size, j) for j, b in enumerate(self.scales)])

    def map_scales(self, fn, meta=None) -> "WaveletSequence":
        """New sequence whose scale ``j`` block is ``fn(j, block)``."""
        blocks = tuple(fn(j, b) for j, b in enumerate(self.scales))
        return WaveletSequence(blocks, meta=self.meta if meta is None else meta)

    def scaled(self, lam: float) -> "WaveletSequence":
        return self.map_scales(lambda j, b: lam * b)

    def with_meta(self, **extra) -> "WaveletSequence":
        return WaveletSequence(self.scales, meta={**self.meta, **extra})

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "version": FILE_VERSION,
            "convention": self.convention,
            "max_scale": self.max_scale,
            "scales": [b.tolist() for b in self.scales],
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WaveletSequence":
        if data.get("version") != FILE_VERSION:
            raise ValueError(f"unsupported sequence file version {data.get('version')!r}")
        if data.get("convention") != A_CONVENTION:
            raise ValueError(f"unsupported coefficient convention {data.get('convention')!r}")
        scales = data["scales"]
        if data.get("max_scale") != len(scales) - 1:
            raise ValueError(
                f"max_scale={data.get('max_scale')!r} disagrees with {len(scales)} stored scales"
            )
        return cls(tuple(scales), meta=data.get("meta") or {})

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def load(cls, path) -> "WaveletSequence":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ScaleProfile:
    """``log_block_norms[j] = log2 ||a^j||_p``, ``-inf`` for all-zero blocks."""

    p: float
    log_block_norms: np.ndarray


# -- canonical within-scale accumulation ---------------------------------


def sorted_magnitudes(block) -> np.ndarray:
    """Non-zero magnitudes of ``block`` in decreasing order."""
    mags = np.abs(np.asarray(block, dtype=float))
    mags = mags[mags > 0]
    return -np.sort(-mags)


def log2_pnorm_sorted(mags: np.ndarray, p: float) -> float:
    """log2 of the l_p (quasi-)norm of magnitudes already in canonical order."""
    if mags.size == 0:
        return -INF
    top = float(mags[0])
    if math.isinf(p):
        return math.log2(top)
    ratios = (mags / top) ** p
    total = float(np.sum(ratios.astype(np.longdouble)))
    return math.log2(top) + math.log2(total) / p


def log2_block_pnorm(block, p) -> float:
    return log2_pnorm_sorted(sorted_magnitudes(block), _as_extended(p))


def block_pnorm(block, p) -> float:
    """``(sum |a_k|^p)^(1/p)``; the max modulus for ``p = inf``; 0 for empty blocks."""
    return 2.0 ** log2_block_pnorm(block, p)


def log2_sum_exp2(values: Iterable[float]) -> float:
    """``log2(sum 2^v)`` over finite values, canonical order, -inf if empty."""
    vals = sorted((v for v in values if v != -INF), reverse=True)
    if not vals:
        return -INF
    top = vals[0]
    return top + math.log2(math.fsum(2.0 ** (v - top) for v in vals))


# -- per-scale statistics and norms --------------------------------------


def scale_profile(seq: WaveletSequence, p) -> ScaleProfile:
    p = _as_extended(p)
    ys = np.array([log2_pnorm_sorted(sorted_magnitudes(b), p) for b in seq.scales])
    ys.setflags(write=False)
    return ScaleProfile(p=p, log_block_norms=ys)


def besov_log2_terms(seq: WaveletSequence, params: BesovParams) -> np.ndarray:
    """log2 of the per-scale summands ``2^{j(s-1/p)} ||a^j||_p`` raised to ``q``.

    For ``q = inf`` the exponent ``q`` is dropped and the entries are the
    log2 of ``2^{j(s-1/p)} ||a^j||_p`` themselves.
    """
    ys = scale_profile(seq, params.p).log_block_norms
    j = np.arange(ys.size)
    base = j * (params.s - params.inv_p) + ys
    if math.isinf(params.q):
        return base
    return params.q * base


def besov_log2_norm(seq: WaveletSequence, params: BesovParams) -> float:
    terms = besov_log2_terms(seq, params)
    if math.isinf(params.q):
        return float(np.max(terms))
    return log2_sum_exp2(terms.tolist()) / params.q


def besov_norm(seq: WaveletSequence, params: BesovParams) -> float:
    """Finite-depth ``b^s_{p,q}`` quasi-norm.

    Evaluated as ``2 ** besov_log2_norm``; this overflows to ``inf`` only
    when the true value exceeds the double range.
    """
    return 2.0 ** besov_log2_norm(seq, params)


def shapes_match(seqs: Sequence[WaveletSequence]) -> bool:
    return len({s.shape for s in seqs}) <= 1
