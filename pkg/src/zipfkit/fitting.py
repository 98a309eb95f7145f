"""Power-law exponent estimation on log-log rank-frequency data.

All fits are unweighted ordinary least squares of ``log10 f(r)`` on
``log10 r``, one point per integer rank. ``alpha`` is reported as the
negated slope so a decaying distribution has positive ``alpha``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import NumericError
from .ranking import RankedDistribution

MIN_DECADES = 0.5


@dataclass(frozen=True)
class FitWindow:
    r_lo: int
    r_hi: int

    def __post_init__(self):
        if not (1 <= self.r_lo < self.r_hi):
            raise NumericError(f"invalid window [{self.r_lo}, {self.r_hi}]: need 1 <= r_lo < r_hi")

    @property
    def decades(self) -> float:
        return math.log10(self.r_hi / self.r_lo)

    def capped(self, vocabulary: int) -> "FitWindow":
        if self.r_lo >= vocabulary:
            raise NumericError(f"window [{self.r_lo}, {self.r_hi}] starts beyond the vocabulary size {vocabulary}")
        return FitWindow(self.r_lo, min(self.r_hi, vocabulary))

    @classmethod
    def parse(cls, spec: str) -> "FitWindow":
        try:
            lo, hi = spec.split(":")
            return cls(int(lo), int(hi))
        except ValueError:
            raise NumericError(f"window must look like r_lo:r_hi, got {spec!r}") from None

    def __str__(self) -> str:
        return f"{self.r_lo}:{self.r_hi}"


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    intercept: float
    r_squared: float
    alpha_stderr: float
    window: FitWindow
    n_points: int
    sse: float

    def predict(self, ranks) -> np.ndarray:
        """Fitted ``log10 f`` at the given ranks."""
        return self.intercept - self.alpha * np.log10(np.asarray(ranks, dtype=float))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = [self.window.r_lo, self.window.r_hi]
        return d


@dataclass(frozen=True)
class SegmentedFit:
    breakpoint: int
    low_fit: PowerLawFit
    high_fit: PowerLawFit
    total_sse: float
    outer: FitWindow

    def to_dict(self) -> dict:
        return {
            "breakpoint": self.breakpoint,
            "outer": [self.outer.r_lo, self.outer.r_hi],
            "total_sse": self.total_sse,
            "low_fit": self.low_fit.to_dict(),
            "high_fit": self.high_fit.to_dict(),
        }


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float, float]:
    n = len(x)
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    slope = float(dx @ dy) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    sse = float(resid @ resid)
    sst = float(dy @ dy)
    r2 = 1.0 - sse / sst if sst > 0 else 1.0
    stderr = math.sqrt(sse / (n - 2) / sxx) if n > 2 else math.nan
    return slope, float(intercept), min(max(r2, 0.0), 1.0), stderr, sse


def _log_points(dist: RankedDistribution, window: FitWindow) -> tuple[np.ndarray, np.ndarray]:
    ranks = np.arange(window.r_lo, window.r_hi + 1, dtype=float)
    freqs = dist.frequencies[window.r_lo - 1: window.r_hi].astype(float)
    return np.log10(ranks), np.log10(freqs)


def fit_power_law(dist: RankedDistribution, window: FitWindow | tuple[int, int], min_decades: float = MIN_DECADES) -> PowerLawFit:
    """Fit ``f(r) ~ r**-alpha`` over the inclusive rank window.

    The upper bound is capped at the vocabulary size. Windows narrower than
    ``min_decades`` (after capping) or with fewer than 3 points are refused.
    """
    if not isinstance(window, FitWindow):
        window = FitWindow(*window)
    window = window.capped(dist.vocabulary)
    n = window.r_hi - window.r_lo + 1
    if n < 3:
        raise NumericError(f"window {window} has {n} points; at least 3 are needed")
    if window.decades < min_decades - 1e-12:
        raise NumericError(
            f"window {window} spans {window.decades:.2f} decades; at least {min_decades} are needed for a meaningful exponent"
        )
    x, y = _log_points(dist, window)
    slope, intercept, r2, stderr, sse = _ols(x, y)
    return PowerLawFit(-slope, intercept, r2, stderr, window, n, sse)


class _PrefixOLS:
    """O(1) residual sums of squares for any contiguous sub-range of points."""

    def __init__(self, x: np.ndarray, y: np.ndarray):
        # centring keeps the prefix-sum cancellation error small
        self.x0, self.y0 = x.mean(), y.mean()
        xc, yc = x - self.x0, y - self.y0
        z = np.zeros(1)
        self.s1 = np.concatenate([z, np.cumsum(np.ones_like(xc))])
        self.sx = np.concatenate([z, np.cumsum(xc)])
        self.sy = np.concatenate([z, np.cumsum(yc)])
        self.sxx = np.concatenate([z, np.cumsum(xc * xc)])
        self.sxy = np.concatenate([z, np.cumsum(xc * yc)])
        self.syy = np.concatenate([z, np.cumsum(yc * yc)])

    def sse(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        """SSE of the line fitted to points ``i..j-1`` (vectorized over pairs)."""
        n = self.s1[j] - self.s1[i]
        sx = self.sx[j] - self.sx[i]
        sy = self.sy[j] - self.sy[i]
        vxx = (self.sxx[j] - self.sxx[i]) - sx * sx / n
        vxy = (self.sxy[j] - self.sxy[i]) - sx * sy / n
        vyy = (self.syy[j] - self.syy[i]) - sy * sy / n
        return np.maximum(vyy - vxy * vxy / vxx, 0.0)


def breakpoint_grid(outer: FitWindow, per_decade: int = 50, min_decades: float = MIN_DECADES) -> np.ndarray:
    """Integer candidate breakpoints, log-spaced, leaving both segments at least ``min_decades`` wide."""
    lo = outer.r_lo * 10**min_decades
    hi = outer.r_hi / 10**min_decades
    if hi < lo:
        return np.empty(0, dtype=int)
    count = max(int(math.ceil(math.log10(hi / lo) * per_decade)) + 1, 2)
    grid = np.unique(np.rint(np.logspace(math.log10(lo), math.log10(hi), count)).astype(int))
    # rounding can push a candidate just outside the admissible range
    ok = (np.log10(grid / outer.r_lo) >= min_decades - 1e-12) & (np.log10(outer.r_hi / grid) >= min_decades - 1e-12)
    return grid[ok]


def detect_crossover(
    dist: RankedDistribution,
    outer: FitWindow | tuple[int, int],
    per_decade: int = 50,
    min_decades: float = MIN_DECADES,
) -> SegmentedFit:
    """Best two-segment power-law fit over ``outer``.

    Every candidate breakpoint ``b`` on a log-spaced grid splits the window
    into ``[r_lo, b]`` and ``[b, r_hi]`` (``b`` belongs to both). The
    candidate with the smallest combined SSE wins; exact ties go to the
    smaller breakpoint.
    """
    if not isinstance(outer, FitWindow):
        outer = FitWindow(*outer)
    outer = outer.capped(dist.vocabulary)
    if outer.decades < 2 * min_decades + 0.5 - 1e-12:
        raise NumericError(f"outer window {outer} spans {outer.decades:.2f} decades; at least {2 * min_decades + 0.5} needed")
    grid = breakpoint_grid(outer, per_decade, min_decades)
    if grid.size == 0:
        raise NumericError(f"no admissible breakpoint inside {outer}")
    x, y = _log_points(dist, outer)
    pre = _PrefixOLS(x, y)
    idx = grid - outer.r_lo  # index of the breakpoint within x
    low = pre.sse(np.zeros_like(idx), idx + 1)
    high = pre.sse(idx, np.full_like(idx, len(x)))
    total = low + high
    best = int(np.flatnonzero(total == total.min())[0])
    b = int(grid[best])
    low_fit = fit_power_law(dist, FitWindow(outer.r_lo, b), min_decades)
    high_fit = fit_power_law(dist, FitWindow(b, outer.r_hi), min_decades)
    return SegmentedFit(b, low_fit, high_fit, low_fit.sse + high_fit.sse, outer)


@dataclass(frozen=True)
class GoodnessReport:
    ranks: np.ndarray
    residuals: np.ndarray
    max_abs_residual: float
    n_runs: int
    longest_run: int
    longest_run_start: int
    longest_run_sign: int

    def to_dict(self) -> dict:
        return {
            "max_abs_residual": self.max_abs_residual,
            "n_runs": self.n_runs,
            "longest_run": self.longest_run,
            "longest_run_start": self.longest_run_start,
            "longest_run_sign": self.longest_run_sign,
        }


def goodness_report(dist: RankedDistribution, fit: PowerLawFit, atol: float = 1e-12) -> GoodnessReport:
    """Residuals of ``fit`` in log10 space and their sign-run structure.

    Residuals within ``atol`` of zero count as sign 0 and break runs. A long
    run of one sign means the data curve away from the fitted line.
    """
    x, y = _log_points(dist, fit.window)
    ranks = np.arange(fit.window.r_lo, fit.window.r_hi + 1)
    resid = y - fit.predict(ranks)
    signs = np.where(np.abs(resid) <= atol, 0, np.sign(resid)).astype(int)
    # run boundaries
    change = np.flatnonzero(np.diff(signs) != 0) + 1
    starts = np.concatenate([[0], change])
    ends = np.concatenate([change, [len(signs)]])
    lengths = ends - starts
    nonzero = signs[starts] != 0
    if nonzero.any():
        cand = np.flatnonzero(nonzero)
        k = cand[np.argmax(lengths[cand])]
        longest, start, sign = int(lengths[k]), int(ranks[starts[k]]), int(signs[starts[k]])
    else:
        longest, start, sign = 0, int(ranks[0]), 0
    return GoodnessReport(ranks, resid, float(np.abs(resid).max()), int(nonzero.sum()), longest, start, sign)


def log_binned(dist: RankedDistribution, bins_per_decade: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Geometric-mean rank and frequency per logarithmic rank bin.

    Smoothing for plots only; fits always use the unbinned points.
    """
    if dist.vocabulary == 0:
        return np.empty(0), np.empty(0)
    edges = np.unique(np.floor(np.logspace(0, math.log10(dist.vocabulary + 1), int(bins_per_decade * math.log10(dist.vocabulary + 1)) + 2)).astype(int))
    logr = np.log10(dist.ranks.astype(float))
    logf = np.log10(dist.frequencies.astype(float))
    centers, values = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        sl = slice(a - 1, min(b - 1, dist.vocabulary))
        if sl.stop <= sl.start:
            continue
        centers.append(10 ** logr[sl].mean())
        values.append(10 ** logf[sl].mean())
    return np.array(centers), np.array(values)
