"""Best N-term approximation errors and wavelet compressibility.

All errors are measured in the diagonal space ``b^{s0}_{p0,p0}``.  There
the squared-away error is a separable sum over dropped coefficients, so
keeping the ``N`` largest weights ``2^{j(s0 - 1/p0)} |a_{j,k}|`` is optimal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooShort, HypothesisViolated, InsufficientData
from .estimator import CriticalCurve, EstimatorConfig, estimate_curve
from .sequence import WaveletSequence

DEFAULT_KAPPA_CAP = 20.0
DEFAULT_SLOPE_TOL = 0.02
HYPOTHESIS_MARGIN = 1e-6


def _inv(p0: float) -> float:
    p0 = float(p0)
    if math.isnan(p0) or p0 <= 0:
        raise ValueError(f"p0 must lie in (0, inf], got {p0!r}")
    return 0.0 if math.isinf(p0) else 1.0 / p0


def dyadic_ladder(n_coefficients: int) -> np.ndarray:
    """``1, 2, 4, ...`` up to the coefficient count."""
    if n_coefficients < 1:
        return np.zeros(0, dtype=np.int64)
    top = int(math.floor(math.log2(n_coefficients)))
    return np.array([1 << k for k in range(top + 1)], dtype=np.int64)


def sorted_log_weights(seq: WaveletSequence, p0, s0: float) -> np.ndarray:
    """``log2`` of the approximation weights in greedy order (largest first).

    Ties keep the (scale, index) order of the pyramid; zero coefficients
    come last with weight ``-inf``.
    """
    inv_p = _inv(p0)
    a = np.abs(seq.flat())
    j = seq.scale_indices()
    with np.errstate(divide="ignore"):
        lw = j * (s0 - inv_p) + np.log2(a)
    order = np.argsort(-lw, kind="stable")
    return lw[order]


def sigma_all(seq: WaveletSequence, p0, s0: float) -> np.ndarray:
    """``sigma_N`` for every ``N = 0 .. n_coefficients``."""
    lw = sorted_log_weights(seq, p0, s0)
    out = np.zeros(lw.size + 1)
    if math.isinf(float(p0)):
        out[:-1] = np.exp2(lw)
        return out
    p0 = float(p0)
    # log2 of the tail sums, accumulated from the smallest weight upward
    tails = np.logaddexp2.accumulate(p0 * lw[::-1])[::-1]
    out[:-1] = np.exp2(tails / p0)
    return out


def greedy_sigma(seq: WaveletSequence, p0, s0: float, n_values=None) -> np.ndarray:
    """Best N-term errors ``sigma_N`` at the requested ``N`` (default: dyadic ladder)."""
    if n_values is None:
        n_values = dyadic_ladder(seq.n_coefficients)
    n_values = np.asarray(n_values, dtype=np.int64)
    if np.any(n_values < 0):
        raise ValueError("N must be non-negative")
    full = sigma_all(seq, p0, s0)
    return full[np.minimum(n_values, full.size - 1)]


# -- fitting the empirical exponent -------------------------------------


def _fit_window(n_points: int, min_points: int) -> slice:
    third = n_points // 3
    lo, hi = third, n_points - third
    while hi - lo < min_points:
        if lo > 0:
            lo -= 1
        if hi - lo < min_points and hi < n_points:
            hi += 1
    return slice(lo, hi)


def _steepens_geometrically(x: np.ndarray, y: np.ndarray, ratio: float = 1.5) -> bool:
    local = np.diff(y) / np.diff(x)
    if local.size < 3 or np.any(local >= 0):
        return False
    return bool(np.all(local[1:] <= ratio * local[:-1]))


def fit_kappa(
    n_values,
    sigma,
    *,
    cap: float = DEFAULT_KAPPA_CAP,
    min_points: int = 4,
) -> float:
    """Empirical decay exponent of ``sigma_N`` against a dyadic ``N`` ladder.

    Trailing zero errors are trimmed.  The exponent is the negated
    least-squares slope of ``log2 sigma`` against ``log2 N`` over the middle
    third of the remaining ladder (widened to ``min_points``).  The result is
    ``inf`` when that slope exceeds ``cap``, or when the per-octave slopes
    in the fit window steepen geometrically (exponential decay), or when the
    errors vanish with fewer than ``min_points`` positive values.
    """
    n = np.asarray(n_values, dtype=float)
    sig = np.asarray(sigma, dtype=float)
    if n.shape != sig.shape:
        raise ValueError("n_values and sigma must have the same length")
    keep = n > 0
    n, sig = n[keep], sig[keep]
    if np.any(sig < 0):
        raise ValueError("approximation errors must be non-negative")
    if np.any(np.diff(n) <= 0):
        raise ValueError("n_values must be strictly increasing")
    positive = np.nonzero(sig > 0)[0]
    n_pos = 0 if positive.size == 0 else int(positive[-1]) + 1
    exhausted = n_pos < sig.size
    if np.any(sig[:n_pos] == 0):
        raise ValueError("sigma must be non-increasing: zero before a positive value")
    if n_pos < min_points:
        if exhausted:
            return math.inf
        raise InsufficientData(f"only {n_pos} positive errors, need {min_points}")

    x = np.log2(n[:n_pos])
    y = np.log2(sig[:n_pos])
    w = _fit_window(n_pos, min_points)
    xw, yw = x[w], y[w]
    if _steepens_geometrically(xw, yw):
        return math.inf
    xc = xw - xw.mean()
    slope = float(np.dot(xc, yw - yw.mean()) / np.dot(xc, xc))
    kappa = max(-slope, 0.0)
    return math.inf if kappa > cap else kappa


# -- predicting the exponent from a critical curve ----------------------


@dataclass(frozen=True)
class KappaPrediction:
    kappa: float
    p_of_f: float | None
    u_star: float | None

    def __iter__(self):
        # unpacks as (kappa, p_of_f)
        return iter((self.kappa, self.p_of_f))


def predict_kappa(
    curve: CriticalCurve,
    p0,
    s0: float,
    *,
    slope_tol: float = DEFAULT_SLOPE_TOL,
) -> KappaPrediction:
    """Compressibility predicted by where the curve meets ``u - 1/p0 + s0``.

    ``h(u) = s(u) - (u - 1/p0 + s0)`` is concave for a concave curve, and
    positive at ``1/p0`` by hypothesis.  Its first zero ``u*`` beyond
    ``1/p0`` gives ``kappa = u* - 1/p0`` and ``p(f) = 1/u*``.  When ``h`` is
    still positive at the end of the grid, a terminal slope of at least
    ``1 - slope_tol`` means the curve never meets the line (``kappa = inf``);
    otherwise the crossing lies past the grid and :class:`GridTooShort` is
    raised.
    """
    inv_p = _inv(p0)
    if curve.infinitely_smooth:
        return KappaPrediction(math.inf, None, None)
    u, s = curve.u_grid, curve.s_values
    if not (u[0] <= inv_p <= u[-1]):
        raise GridTooShort(f"1/p0 = {inv_p} lies outside the curve grid [{u[0]}, {u[-1]}]")

    def h(x):
        return (np.interp(x, u, s) - s0) - (x - inv_p)

    h0 = float(h(inv_p))
    if h0 <= HYPOTHESIS_MARGIN:
        raise HypothesisViolated(
            f"curve value {h0 + s0:.6g} at u=1/p0={inv_p:.6g} does not exceed s0={s0:.6g}"
        )
    knots = np.concatenate([[inv_p], u[u > inv_p]])
    hk = (np.interp(knots, u, s) - s0) - (knots - inv_p)
    for i in range(knots.size - 1):
        if hk[i + 1] <= 0:
            # h is affine on [knots[i], knots[i + 1]]
            x0, x1, h_0, h_1 = knots[i], knots[i + 1], hk[i], hk[i + 1]
            u_star = float(x0 + h_0 * (x1 - x0) / (h_0 - h_1))
            return KappaPrediction(u_star - inv_p, 1.0 / u_star, u_star)
    if curve.terminal_slope >= 1.0 - slope_tol:
        return KappaPrediction(math.inf, None, None)
    raise GridTooShort(
        f"curve still above the line at u={u[-1]} with terminal slope {curve.terminal_slope:.4g} < 1"
    )


# -- composed report -----------------------------------------------------


@dataclass(frozen=True)
class CompressConfig:
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    kappa_tol: float = 0.1
    kappa_cap: float = DEFAULT_KAPPA_CAP
    slope_tol: float = DEFAULT_SLOPE_TOL


def _json_number(x):
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


@dataclass
class CompressReport:
    p0: float
    s0: float
    n_values: np.ndarray
    sigma: np.ndarray
    kappa_hat: float
    kappa_pred: float
    p_of_f: float | None
    agreement: bool | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "p0": _json_number(self.p0),
            "s0": self.s0,
            "n_values": [int(n) for n in self.n_values],
            "sigma": [float(x) for x in self.sigma],
            "kappa_hat": _json_number(self.kappa_hat),
            "kappa_pred": _json_number(self.kappa_pred),
            "p_of_f": _json_number(self.p_of_f),
            "agreement": self.agreement,
            "note": self.note,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def sigma_csv(self) -> str:
        rows = ["N,sigma"] + [f"{int(n)},{float(x)!r}" for n, x in zip(self.n_values, self.sigma)]
        return "\n".join(rows) + "\n"


def report(seq: WaveletSequence, p0, s0: float, config: CompressConfig | None = None) -> CompressReport:
    """Greedy errors, fitted and predicted exponents for one sequence.

    A disagreement between the fitted and predicted exponents is recorded in
    ``agreement`` and ``note``; it is not an error.
    """
    config = config or CompressConfig()
    p0 = float(p0)
    n_values = dyadic_ladder(seq.n_coefficients)
    sigma = greedy_sigma(seq, p0, s0, n_values)
    kappa_hat = fit_kappa(n_values, sigma, cap=config.kappa_cap)
    curve = estimate_curve(seq, config.estimator)
    pred = predict_kappa(curve, p0, s0, slope_tol=config.slope_tol)

    if math.isinf(kappa_hat) or math.isinf(pred.kappa):
        agreement = math.isinf(kappa_hat) and math.isinf(pred.kappa)
        note = "" if agreement else f"one exponent is infinite: fitted {kappa_hat}, predicted {pred.kappa}"
    else:
        diff = abs(kappa_hat - pred.kappa)
        agreement = diff <= config.kappa_tol
        note = "" if agreement else f"|kappa_hat - kappa_pred| = {diff:.4g} exceeds {config.kappa_tol}"
    return CompressReport(
        p0=p0,
        s0=float(s0),
        n_values=n_values,
        sigma=sigma,
        kappa_hat=kappa_hat,
        kappa_pred=pred.kappa,
        p_of_f=pred.p_of_f,
        agreement=agreement,
        note=note,
    )
