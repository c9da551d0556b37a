"""Finite-scale estimation of the critical smoothness curve ``u -> s(u)``.

With ``y_j(u) = log2 ||a^j||_{1/u}`` the critical value at ``p = 1/u`` is
``u - beta(u)``, where ``beta(u)`` is the asymptotic growth rate of ``y_j``
in ``j``.  Only the tail window ``[ceil(J f), J]`` of scales is used; the
default ``f = 0.4`` keeps a long enough baseline to average out the
count jitter that ``u`` amplifies at small ``p``.

Three growth-rate estimators are available:

``envelope`` (default)
    The window's non-empty scales are split into a lower and an upper
    half.  For each upper scale take the smallest secant slope to any
    lower scale, then the largest of those.  Lattice effects from the floor
    in lacunary sequences cancel exactly and a single outlier scale cannot
    dominate the result.
``secant``
    Largest secant slope measured from the first non-empty scale of the
    window.
``lstsq``
    Least-squares slope of ``y_j`` against ``j``.

By default the curve is then replaced by its least concave majorant on
the grid, which is exact for affine and kinked-affine inputs and removes
sampling noise that would otherwise break concavity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegenerateWindow, SeparationTooSmall
from .sequence import WaveletSequence, log2_pnorm_sorted, sorted_magnitudes
from .synthesis import combine

INFINITELY_SMOOTH = math.inf
"""Returned for sequences whose window holds no non-zero coefficient."""

DEFAULT_U_GRID = (0.0, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0)
METHODS = ("envelope", "secant", "lstsq")


@dataclass(frozen=True)
class EstimatorConfig:
    window_start_fraction: float = 0.4
    u_grid: tuple = DEFAULT_U_GRID
    method: str = "envelope"
    concave_envelope: bool = True

    def __post_init__(self):
        if not (0.0 < self.window_start_fraction < 1.0):
            raise ValueError("window_start_fraction must lie in (0, 1)")
        grid = tuple(float(u) for u in self.u_grid)
        if len(grid) < 2 or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 0:
            raise ValueError("u_grid must be non-negative, strictly increasing, length >= 2")
        object.__setattr__(self, "u_grid", grid)
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")

    def window(self, max_scale: int) -> range:
        start = math.ceil(max_scale * self.window_start_fraction)
        if max_scale - start + 1 < 3:
            raise ValueError(
                f"estimation window [{start}, {max_scale}] must contain at least 3 scales"
            )
        return range(start, max_scale + 1)


def tail_slope_tolerance(max_scale: int, window_start_fraction: float = 0.4) -> float:
    """Slack ``(log2 C + 1) / window length`` for the monotone and Lipschitz checks (C = 1)."""
    start = math.ceil(max_scale * window_start_fraction)
    return 1.0 / (max_scale - start)


@dataclass(frozen=True)
class CriticalCurve:
    u_grid: np.ndarray
    s_values: np.ndarray
    terminal_slope: float = field(default=math.nan)

    def __post_init__(self):
        u = np.array(self.u_grid, dtype=float).reshape(-1)
        s = np.array(self.s_values, dtype=float).reshape(-1)
        if u.shape != s.shape or u.size < 2:
            raise ValueError("u_grid and s_values need equal length >= 2")
        if np.any(np.diff(u) <= 0) or u[0] < 0:
            raise ValueError("u_grid must be non-negative and strictly increasing")
        u.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "u_grid", u)
        object.__setattr__(self, "s_values", s)
        object.__setattr__(self, "terminal_slope", terminal_slope(u, s))

    @property
    def infinitely_smooth(self) -> bool:
        return bool(np.all(np.isposinf(self.s_values)))

    def __call__(self, u):
        """Piecewise-linear interpolation inside the grid."""
        u_arr = np.asarray(u, dtype=float)
        if np.any(u_arr < self.u_grid[0] - 1e-15) or np.any(u_arr > self.u_grid[-1] + 1e-15):
            raise ValueError(f"u outside the sampled range [{self.u_grid[0]}, {self.u_grid[-1]}]")
        return np.interp(u_arr, self.u_grid, self.s_values)

    def shifted(self, delta: float) -> "CriticalCurve":
        return CriticalCurve(self.u_grid, self.s_values + delta)

    def to_csv(self) -> str:
        lines = ["u,s"]
        lines += [f"{u!r},{s!r}" for u, s in zip(self.u_grid.tolist(), self.s_values.tolist())]
        lines.append(f"# terminal_slope={self.terminal_slope!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "CriticalCurve":
        u, s = read_curve_csv(text)
        return cls(u, s)

    def save(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def load(cls, path) -> "CriticalCurve":
        return cls.from_csv(Path(path).read_text())


def read_curve_csv(text: str) -> tuple:
    """Parse ``u,s`` rows, skipping ``#`` comments and the header."""
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.replace(" ", "").lower() == "u,s":
            continue
        a, b = line.split(",")[:2]
        rows.append((float(a), float(b)))
    if not rows:
        raise ValueError("no curve rows found")
    arr = np.array(rows)
    return arr[:, 0], arr[:, 1]


def terminal_slope(u, s) -> float:
    """Secant slope over the last two grid points; NaN when undefined."""
    if not (np.isfinite(s[-1]) and np.isfinite(s[-2])):
        return math.nan
    return float((s[-1] - s[-2]) / (u[-1] - u[-2]))


# -- growth-rate estimators -----------------------------------------------


def _growth_envelope(js: np.ndarray, ys: np.ndarray) -> float:
    half = js.size // 2
    lo_j, lo_y = js[:half], ys[:half]
    hi_j, hi_y = js[half:], ys[half:]
    slopes = (hi_y[:, None] - lo_y[None, :]) / (hi_j[:, None] - lo_j[None, :])
    return float(np.max(np.min(slopes, axis=1)))


def _growth_secant(js: np.ndarray, ys: np.ndarray) -> float:
    return float(np.max((ys[1:] - ys[0]) / (js[1:] - js[0])))


def _growth_lstsq(js: np.ndarray, ys: np.ndarray) -> float:
    jc = js - js.mean()
    return float(np.dot(jc, ys - ys.mean()) / np.dot(jc, jc))


_GROWTH = {"envelope": _growth_envelope, "secant": _growth_secant, "lstsq": _growth_lstsq}


class _WindowData:
    """Sorted magnitudes of the window's non-empty scales, computed once."""

    def __init__(self, seq: WaveletSequence, config: EstimatorConfig):
        self.config = config
        self.js = []
        self.mags = []
        for j in config.window(seq.max_scale):
            m = sorted_magnitudes(seq.scales[j])
            if m.size:
                self.js.append(j)
                self.mags.append(m)
        self.js = np.array(self.js, dtype=float)

    def estimate(self, u: float) -> float:
        if u < 0:
            raise ValueError(f"u = 1/p must be non-negative, got {u}")
        if self.js.size == 0:
            return INFINITELY_SMOOTH
        if self.js.size == 1:
            err = DegenerateWindow(
                f"only scale {int(self.js[0])} is non-zero in the window at u={u}"
            )
            err.u = u
            raise err
        p = math.inf if u == 0 else 1.0 / u
        ys = np.array([log2_pnorm_sorted(m, p) for m in self.mags])
        return u - _GROWTH[self.config.method](self.js, ys)


def _u_of_p(p) -> float:
    p = float(p)
    if math.isnan(p) or p <= 0:
        raise ValueError(f"p must lie in (0, inf], got {p!r}")
    return 0.0 if math.isinf(p) else 1.0 / p


def estimate_point(seq: WaveletSequence, p, config: EstimatorConfig | None = None) -> float:
    """Estimated critical smoothness at integrability ``p`` (``inf`` allowed)."""
    config = config or EstimatorConfig()
    return _WindowData(seq, config).estimate(_u_of_p(p))


def least_concave_majorant(u, s) -> np.ndarray:
    """Smallest concave function above the points ``(u_i, s_i)``, evaluated at ``u``."""
    u = np.asarray(u, dtype=float)
    s = np.asarray(s, dtype=float)
    hull = []
    for i in range(u.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b when it lies on or below the chord a -> i
            if (s[b] - s[a]) * (u[i] - u[a]) <= (s[i] - s[a]) * (u[b] - u[a]):
                hull.pop()
            else:
                break
        hull.append(i)
    out = np.interp(u, u[hull], s[hull])
    out[hull] = s[hull]
    return out


def estimate_curve(seq: WaveletSequence, config: EstimatorConfig | None = None) -> CriticalCurve:
    config = config or EstimatorConfig()
    data = _WindowData(seq, config)
    s = np.array([data.estimate(u) for u in config.u_grid])
    if config.concave_envelope and np.all(np.isfinite(s)):
        s = least_concave_majorant(config.u_grid, s)
    return CriticalCurve(np.array(config.u_grid), s)


# -- property checks -------------------------------------------------------


@dataclass
class PropertyReport:
    monotone: bool
    concave: bool
    lipschitz: bool
    witnesses: list

    @property
    def passed(self) -> bool:
        return self.monotone and self.concave and self.lipschitz

    def to_dict(self) -> dict:
        return {
            "monotone": self.monotone,
            "concave": self.concave,
            "lipschitz": self.lipschitz,
            "witnesses": self.witnesses,
        }


def check_curve_properties(
    curve: CriticalCurve, tol: float, concave_tol: float | None = None
) -> PropertyReport:
    """Check monotonicity, concavity and the 1-Lipschitz bound on the grid.

    ``tol`` is the slack for the monotone and Lipschitz tests;
    ``concave_tol`` (default ``tol``) the slack on successive secant slopes.
    Each failure adds a witness naming the offending grid interval.
    """
    if concave_tol is None:
        concave_tol = tol
    u, s = curve.u_grid, curve.s_values
    if u.size < 3:
        raise ValueError("property checks need at least 3 grid points")
    witnesses = []
    if curve.infinitely_smooth:
        return PropertyReport(True, True, True, [])
    slopes = np.diff(s) / np.diff(u)

    monotone = True
    for i in range(u.size - 1):
        if s[i + 1] < s[i] - tol:
            monotone = False
            witnesses.append({"property": "monotone", "u": [u[i], u[i + 1]], "drop": s[i] - s[i + 1]})

    concave = True
    for i in range(slopes.size - 1):
        if slopes[i + 1] > slopes[i] + concave_tol:
            concave = False
            witnesses.append(
                {"property": "concave", "u": u[i + 1], "slopes": [slopes[i], slopes[i + 1]]}
            )

    lipschitz = True
    for i, sl in enumerate(slopes):
        if sl > 1 + tol or sl < -tol:
            lipschitz = False
            witnesses.append({"property": "lipschitz", "u": [u[i], u[i + 1]], "slope": sl})

    for w in witnesses:
        for k, v in w.items():
            if isinstance(v, list):
                w[k] = [float(x) for x in v]
            elif not isinstance(v, str):
                w[k] = float(v)
    return PropertyReport(monotone, concave, lipschitz, witnesses)


@dataclass
class SumRuleReport:
    tol: float
    points: list

    @property
    def tested(self) -> list:
        return [pt for pt in self.points if pt["status"] != "skipped"]

    @property
    def skipped(self) -> list:
        return [pt for pt in self.points if pt["status"] == "skipped"]

    @property
    def passed(self) -> bool:
        return all(pt["status"] == "pass" for pt in self.tested)

    def to_dict(self) -> dict:
        return {"tol": self.tol, "passed": self.passed, "points": self.points}


def sum_rule_check(
    a: WaveletSequence,
    b: WaveletSequence,
    config: EstimatorConfig | None = None,
    tol: float = 0.1,
    *,
    strict: bool = False,
) -> SumRuleReport:
    """Compare the curve of ``a + b`` with the pointwise minimum of both curves.

    Grid points where the two curves are closer than ``2 tol`` are skipped
    and reported; with ``strict=True`` the first such point raises
    :class:`SeparationTooSmall` instead.
    """
    config = config or EstimatorConfig()
    ca = estimate_curve(a, config)
    cb = estimate_curve(b, config)
    cab = estimate_curve(combine([a, b], [1.0, 1.0]), config)
    points = []
    for u, sa, sb, sab in zip(config.u_grid, ca.s_values, cb.s_values, cab.s_values):
        rec = {"u": float(u), "s_a": float(sa), "s_b": float(sb), "s_sum": float(sab)}
        sep = abs(sa - sb) if not (math.isinf(sa) and math.isinf(sb)) else 0.0
        if sep < 2 * tol:
            if strict:
                raise SeparationTooSmall(f"curves separated by {sep:.3g} < {2 * tol:.3g} at u={u}")
            rec["status"] = "skipped"
        else:
            expected = min(sa, sb)
            rec["status"] = "pass" if abs(sab - expected) <= tol else "fail"
        points.append(rec)
    return SumRuleReport(tol=tol, points=points)
