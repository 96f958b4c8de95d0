"""Statistical protocol: medians with bootstrap CIs, Spearman rank
correlation, exact sign test, Wilcoxon signed-rank, equivalence margin
check, and the two-regression mediation estimate."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass
class SampleSet:
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size == 0:
            raise ConfigError(f"sample {self.label!r} is empty")
        if not np.all(np.isfinite(self.values)):
            raise ConfigError(f"sample {self.label!r} has non-finite values")


_STATS = {"median": np.median, "mean": np.mean}


def bootstrap_ci(sample: SampleSet, statistic: str = "median",
                 n_resamples: int = 2000, level: float = 0.95,
                 rng: np.random.Generator | None = None):
    """Percentile bootstrap interval for the median or mean."""
    if statistic not in _STATS:
        raise ConfigError(f"statistic must be one of {sorted(_STATS)}")
    stat = _STATS[statistic]
    values = sample.values
    if values.size == 1:
        warnings.warn("single-element sample: degenerate interval")
        v = float(values[0])
        return v, v
    if rng is None:
        rng = np.random.default_rng(0)
    idx = rng.integers(0, values.size, size=(n_resamples, values.size))
    stats = stat(values[idx], axis=1)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(stats, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


def _average_ranks(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.size)
    sx = x[order]
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(x, y) -> float:
    """Rank correlation with average ranks for ties; nan when degenerate."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 3:
        raise ConfigError("need equal-length inputs with >= 3 points")
    rx, ry = _average_ranks(x), _average_ranks(y)
    sx, sy = rx.std(), ry.std()
    if sx == 0 or sy == 0:
        warnings.warn("zero rank variance: correlation undefined")
        return float("nan")
    return float(((rx - rx.mean()) * (ry - ry.mean())).mean() / (sx * sy))


def sign_test(paired_diffs) -> tuple[float, float]:
    """Exact binomial sign test; zeros dropped.

    Returns (one_sided_p, two_sided_p) for the observed direction.
    """
    diffs = np.asarray(paired_diffs, dtype=float)
    diffs = diffs[diffs != 0.0]
    n = diffs.size
    if n == 0:
        warnings.warn("all paired differences are zero")
        return float("nan"), float("nan")
    pos = int((diffs > 0).sum())
    k = max(pos, n - pos)
    upper = sum(math.comb(n, i) for i in range(k, n + 1)) / 2.0 ** n
    one_sided = upper
    two_sided = min(1.0, 2.0 * upper)
    return float(one_sided), float(two_sided)


def _signed_rank_exact_p(w: float, weights) -> float:
    """Two-sided exact p for the signed-rank statistic via subset-sum
    enumeration over the rank weights (valid without ties)."""
    total = sum(weights)
    counts = {0.0: 1}
    for r in weights:
        nxt = dict(counts)
        for s, c in counts.items():
            nxt[s + r] = nxt.get(s + r, 0) + c
        counts = nxt
    denom = 2.0 ** len(weights)
    lo = min(w, total - w)
    tail = sum(c for s, c in counts.items() if s <= lo + 1e-9) / denom
    return min(1.0, 2.0 * tail)


def wilcoxon_signed_rank(paired_diffs) -> float:
    """Two-sided Wilcoxon signed-rank p; exact for n <= 25 without ties,
    normal approximation (with tie correction) otherwise."""
    diffs = np.asarray(paired_diffs, dtype=float)
    diffs = diffs[diffs != 0.0]
    n = diffs.size
    if n == 0:
        warnings.warn("all paired differences are zero")
        return 1.0
    ranks = _average_ranks(np.abs(diffs))
    w_pos = float(ranks[diffs > 0].sum())
    has_ties = np.unique(np.abs(diffs)).size < n
    if n <= 25 and not has_ties:
        return _signed_rank_exact_p(w_pos, ranks.tolist())
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    if has_ties:
        _, tie_counts = np.unique(np.abs(diffs), return_counts=True)
        var -= (tie_counts ** 3 - tie_counts).sum() / 48.0
    if var <= 0:
        return 1.0
    z = (w_pos - mean) / math.sqrt(var)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return min(1.0, float(p))


@dataclass
class MediationResult:
    indirect_effect: float     # a*b on standardized variables
    t_statistic: float         # Sobel test
    r_squared: float           # full model y ~ x + m
    collinear: bool = False


def _standardize(v: np.ndarray) -> np.ndarray:
    s = v.std()
    if s == 0:
        raise ConfigError("cannot standardize a constant variable")
    return (v - v.mean()) / s


def mediation_indirect(x, m, y) -> MediationResult:
    """Two-stage OLS mediation estimate on standardized variables.

    Fits m ~ x (path a), then y ~ x + m (path b), and reports the
    indirect effect a*b with its Sobel t statistic plus the full-model
    R squared.
    """
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if not (m.size == n and y.size == n and n >= 10):
        raise ConfigError("need equal-length inputs with >= 10 points")
    xs, ms, ys = _standardize(x), _standardize(m), _standardize(y)

    corr_xm = float((xs * ms).mean())
    if abs(corr_xm) >= 1.0 - 1e-12:
        warnings.warn("mediator collinear with dose; reporting b path only")
        b = float((ms * ys).mean())
        return MediationResult(indirect_effect=b, t_statistic=float("inf"),
                               r_squared=b * b, collinear=True)

    xa = np.column_stack([np.ones(n), xs])
    coef_a, _, _, _ = np.linalg.lstsq(xa, ms, rcond=None)
    resid_a = ms - xa @ coef_a
    a = coef_a[1]
    var_a = (resid_a @ resid_a / (n - 2)) / ((xs - xs.mean()) ** 2).sum()

    xb = np.column_stack([np.ones(n), xs, ms])
    coef_b, _, _, _ = np.linalg.lstsq(xb, ys, rcond=None)
    resid_b = ys - xb @ coef_b
    b = coef_b[2]
    dof = n - 3
    sigma2 = resid_b @ resid_b / dof
    cov = sigma2 * np.linalg.inv(xb.T @ xb)
    var_b = cov[2, 2]

    indirect = float(a * b)
    se = math.sqrt(a * a * var_b + b * b * var_a)
    t = indirect / se if se > 0 else float("inf")
    ss_tot = float((ys ** 2).sum())
    r2 = 1.0 - float(resid_b @ resid_b) / ss_tot if ss_tot > 0 else 0.0
    return MediationResult(indirect_effect=indirect, t_statistic=float(t),
                           r_squared=float(r2))


def equivalence_check(a: SampleSet, b: SampleSet, margin: float,
                      n_resamples: int = 2000,
                      rng: np.random.Generator | None = None) -> bool:
    """True when the bootstrap CI of the median difference sits inside
    [-margin, +margin]. Paired resampling when lengths match."""
    if margin <= 0:
        raise ConfigError("margin must be > 0")
    if rng is None:
        rng = np.random.default_rng(0)
    va, vb = a.values, b.values
    if va.size == vb.size:
        diffs = va - vb
        if diffs.size == 1:
            return abs(float(diffs[0])) <= margin
        lo, hi = bootstrap_ci(SampleSet(diffs, "paired-diff"), "median",
                              n_resamples, 0.95, rng)
    else:
        ia = rng.integers(0, va.size, size=(n_resamples, va.size))
        ib = rng.integers(0, vb.size, size=(n_resamples, vb.size))
        stats = np.median(va[ia], axis=1) - np.median(vb[ib], axis=1)
        lo, hi = (float(q) for q in np.quantile(stats, [0.025, 0.975]))
    return -margin <= lo and hi <= margin
