"""Critical Besov smoothness of wavelet coefficient sequences.

Synthesis of sequences with prescribed critical curves, finite-scale
estimation of those curves, best N-term compressibility, and a periodic
Haar bridge from sampled signals.
"""

from .compress import CompressReport, KappaPrediction, fit_kappa, greedy_sigma, predict_kappa, report
from .embedding import SpaceId, embeds, interpolate, min_curve
from .errors import (
    BesovSeqError,
    DegenerateWindow,
    GridTooShort,
    HypothesisViolated,
    InsufficientData,
    SeparationTooSmall,
    ShapeMismatch,
)
from .estimator import (
    INFINITELY_SMOOTH,
    CriticalCurve,
    EstimatorConfig,
    check_curve_properties,
    estimate_curve,
    estimate_point,
    sum_rule_check,
)
from .haar import haar_forward, haar_inverse
from .sequence import BesovParams, ScaleProfile, WaveletSequence, besov_norm, block_pnorm, scale_profile
from .synthesis import (
    LacunarySpec,
    TangentTerm,
    apply_sobolev,
    combine,
    dirac_model,
    from_curve,
    gaussian_cascade,
    lacunary,
)

__version__ = "0.1.0"
