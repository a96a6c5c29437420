"""Statistical engine: CCDFs, power-law tail fits, correlation, chi-square.

Conventions. A quantity follows a power law with exponent gamma when its
density is proportional to x^(-gamma) beyond a threshold x_min; the CCDF
P(X >= x) then falls as x^(-(gamma-1)). ``gamma`` always names the density
exponent here.

Fitting is maximum likelihood. Continuous mode uses the closed form
gamma = 1 + n / sum(ln(x_i / x_min)). Discrete mode maximizes the
Hurwitz-zeta likelihood exactly (the common (x_min - 1/2) shortcut is badly
biased for x_min near 1, where most of our count data lives). When x_min is
not given, every distinct sample value is a candidate and the one minimizing
the Kolmogorov-Smirnov distance between the empirical tail CCDF and the
fitted CCDF wins; ties go to the smaller x_min (larger tail).

The chi-square p-value is computed from the regularized upper incomplete
gamma function, evaluated by series / continued fraction to well below 1e-10
absolute error; scipy is used only for the Hurwitz zeta function and
root bracketing.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import zeta as hurwitz_zeta

from .errors import (
    DegenerateInput,
    DegenerateTable,
    DomainError,
    EmptyInput,
    InsufficientTail,
)

DISCRETE = "discrete"
CONTINUOUS = "continuous"
FIT_MODES = (DISCRETE, CONTINUOUS)


# --------------------------------------------------------------------------
# Empirical CCDF
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CCDFCurve:
    points: tuple[tuple[float, float], ...]  # (x, P(X >= x)), x strictly increasing

    def __post_init__(self):
        xs = [x for x, _ in self.points]
        ps = [p for _, p in self.points]
        assert all(a < b for a, b in zip(xs, xs[1:])), "x values must be strictly increasing"
        assert all(a >= b for a, b in zip(ps, ps[1:])), "probabilities must be non-increasing"
        assert ps and ps[0] == 1.0, "first CCDF value must be 1"

    @property
    def xs(self) -> np.ndarray:
        return np.array([x for x, _ in self.points])

    @property
    def ps(self) -> np.ndarray:
        return np.array([p for _, p in self.points])


def ccdf(samples) -> CCDFCurve:
    """Empirical complementary CDF: for each distinct x, P(X >= x)."""
    arr = np.asarray(list(samples), dtype=float)
    if arr.size == 0:
        raise EmptyInput("ccdf of an empty sample set")
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise DomainError("samples must be finite and non-negative")
    values, counts = np.unique(arr, return_counts=True)
    at_least = np.cumsum(counts[::-1])[::-1]  # count of samples >= values[i]
    ps = at_least / arr.size
    return CCDFCurve(points=tuple((float(x), float(p)) for x, p in zip(values, ps)))


def loglog_slope(curve: CCDFCurve, x_lo: float | None = None, x_hi: float | None = None) -> float:
    """Least-squares slope of log p against log x over points in [x_lo, x_hi].

    Plain diagnostic for straight-line behavior on a log-log plot; the tail
    estimator itself is the MLE in fit_power_law_tail.
    """
    pts = [
        (x, p)
        for x, p in curve.points
        if x > 0 and p > 0 and (x_lo is None or x >= x_lo) and (x_hi is None or x <= x_hi)
    ]
    if len(pts) < 2:
        raise DegenerateInput("need at least two positive points for a slope")
    lx = np.log([x for x, _ in pts])
    lp = np.log([p for _, p in pts])
    lx -= lx.mean()
    denom = float(np.dot(lx, lx))
    if denom == 0.0:
        raise DegenerateInput("x values collapse to one point on the log axis")
    return float(np.dot(lx, lp - lp.mean()) / denom)


# --------------------------------------------------------------------------
# Power-law tail fit
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TailFit:
    gamma: float  # density exponent, > 1
    x_min: float
    ks: float  # Kolmogorov-Smirnov distance of the accepted fit
    n_tail: int

    def __post_init__(self):
        assert self.gamma > 1.0
        assert self.n_tail >= 2
        assert 0.0 <= self.ks <= 1.0


def _continuous_gamma(tail: np.ndarray, x_min: float) -> float:
    log_sum = float(np.sum(np.log(tail / x_min)))
    if log_sum <= 0.0:
        raise InsufficientTail("tail has no spread above x_min")
    return 1.0 + tail.size / log_sum


def _discrete_gamma(tail: np.ndarray, x_min: int) -> float:
    """Exact discrete MLE: solve d/dgamma [log zeta(gamma, x_min)] = -mean(log x)."""
    mean_log = float(np.mean(np.log(tail)))
    if mean_log <= math.log(x_min) + 1e-12:
        raise InsufficientTail("tail has no spread above x_min")

    h = 1e-6

    def g(gamma: float) -> float:
        dlog = (
            math.log(hurwitz_zeta(gamma + h, x_min)) - math.log(hurwitz_zeta(gamma - h, x_min))
        ) / (2 * h)
        return dlog + mean_log

    lo = 1.0 + 1e-4
    if g(lo) >= 0.0:
        # the model's mean log diverges as gamma -> 1, so this needs a mean
        # log beyond anything a finite double sample can produce
        raise InsufficientTail("tail too heavy for a power-law exponent above 1")
    hi = 2.0
    while g(hi) < 0.0:
        hi *= 2.0
        if hi > 2.0**20:
            raise InsufficientTail("tail too concentrated at x_min for a discrete fit")
    return float(brentq(g, lo, hi, xtol=1e-12, rtol=8.9e-16))


def _fitted_ccdf(values: np.ndarray, gamma: float, x_min: float, mode: str) -> np.ndarray:
    if mode == CONTINUOUS:
        return (values / x_min) ** (-(gamma - 1.0))
    return hurwitz_zeta(gamma, values) / hurwitz_zeta(gamma, x_min)


def _ks_distance(tail: np.ndarray, gamma: float, x_min: float, mode: str) -> float:
    values, counts = np.unique(tail, return_counts=True)
    emp = np.cumsum(counts[::-1])[::-1] / tail.size  # P(X >= v) at observed values
    fit = _fitted_ccdf(values, gamma, x_min, mode)
    d_at = float(np.max(np.abs(emp - fit)))
    if mode == DISCRETE:
        # both curves are step functions jumping at integers; the observed
        # support points carry the supremum
        return d_at
    # continuous fit: just above each observed value the empirical CCDF has
    # already dropped to the next level while the fitted curve moves smoothly
    emp_after = np.concatenate([emp[1:], [0.0]])
    d_between = float(np.max(np.abs(emp_after - fit)))
    return max(d_at, d_between)


def _fit_at(tail: np.ndarray, x_min: float, mode: str) -> TailFit:
    if np.unique(tail).size < 2:
        raise InsufficientTail("constant tail has no usable spread")
    if mode == CONTINUOUS:
        gamma = _continuous_gamma(tail, x_min)
    else:
        gamma = _discrete_gamma(tail, int(x_min))
    return TailFit(
        gamma=gamma,
        x_min=float(x_min),
        ks=_ks_distance(tail, gamma, x_min, mode),
        n_tail=int(tail.size),
    )


def fit_power_law_tail(
    samples,
    mode: str = DISCRETE,
    x_min: float | None = None,
    min_tail: int = 50,
    max_candidates: int | None = None,
) -> TailFit:
    """Fit the right tail of ``samples`` with a power law.

    With ``x_min`` given, fits the tail of samples >= x_min directly; raises
    InsufficientTail when fewer than ``min_tail`` samples qualify or the tail
    is constant. Without ``x_min``, scans distinct sample values as
    candidates and keeps the fit with the smallest KS distance (ties toward
    the smaller x_min). ``max_candidates`` bounds the scan deterministically
    by taking evenly spaced candidates, for very large inputs.
    """
    if mode not in FIT_MODES:
        raise DomainError(f"mode must be one of {FIT_MODES}")
    min_tail = max(int(min_tail), 2)
    arr = np.sort(np.asarray(list(samples), dtype=float))
    if arr.size == 0:
        raise EmptyInput("cannot fit an empty sample set")
    if np.any(arr <= 0) or np.any(~np.isfinite(arr)):
        raise DomainError("samples must be finite and positive")
    if mode == DISCRETE:
        if np.any(arr != np.floor(arr)):
            raise DomainError("discrete mode requires integer-valued samples")
        if x_min is not None and (x_min != int(x_min) or x_min < 1):
            raise DomainError("discrete x_min must be an integer >= 1")

    if x_min is not None:
        tail = arr[arr >= x_min]
        if tail.size < min_tail:
            raise InsufficientTail(
                f"only {tail.size} samples at or above x_min={x_min}, need {min_tail}"
            )
        return _fit_at(tail, float(x_min), mode)

    candidates = np.unique(arr)
    # a candidate needs min_tail samples at or above it
    viable = [float(v) for v in candidates if arr.size - np.searchsorted(arr, v, side="left") >= min_tail]
    if max_candidates is not None and len(viable) > max_candidates:
        idx = np.linspace(0, len(viable) - 1, max_candidates).round().astype(int)
        viable = [viable[i] for i in sorted(set(idx.tolist()))]
    best: TailFit | None = None
    for v in viable:
        tail = arr[arr >= v]
        try:
            fit = _fit_at(tail, v, mode)
        except InsufficientTail:
            continue
        if best is None or fit.ks < best.ks:
            best = fit
    if best is None:
        raise InsufficientTail(f"no candidate x_min keeps {min_tail} usable tail samples")
    return best


def expected_max(n: int, gamma: float) -> float:
    """Characteristic largest value among n power-law draws: n^(1/(gamma-1)),
    in units of x_min."""
    if gamma <= 1.0:
        raise DomainError("expected_max requires gamma > 1")
    if n < 1 or int(n) != n:
        raise DomainError("n must be a positive integer")
    return float(n) ** (1.0 / (gamma - 1.0))


# --------------------------------------------------------------------------
# Synthetic samplers (inverse transform), used by tests and `fit --synthetic`
# --------------------------------------------------------------------------


def pareto_samples(n: int, gamma: float, x_min: float = 1.0, rng=None) -> np.ndarray:
    """Continuous power-law (Pareto) samples with density exponent gamma."""
    if gamma <= 1.0:
        raise DomainError("pareto_samples requires gamma > 1")
    if x_min <= 0:
        raise DomainError("x_min must be positive")
    rng = np.random.default_rng() if rng is None else rng
    u = rng.random(n)
    return x_min * (1.0 - u) ** (-1.0 / (gamma - 1.0))


def zeta_samples(n: int, gamma: float, x_min: int = 1, rng=None, support_cap: int = 10**6) -> np.ndarray:
    """Discrete power-law samples drawn from the exact zeta weights.

    Inverse transform over P(X >= k) = zeta(gamma, k) / zeta(gamma, x_min)
    for integer k, truncated at support_cap (the truncated mass is far below
    1/n for the exponents used here).
    """
    if gamma <= 1.0:
        raise DomainError("zeta_samples requires gamma > 1")
    if x_min < 1 or int(x_min) != x_min:
        raise DomainError("x_min must be an integer >= 1")
    rng = np.random.default_rng() if rng is None else rng
    support = np.arange(x_min, support_cap + 1, dtype=float)
    tail_p = hurwitz_zeta(gamma, support) / hurwitz_zeta(gamma, float(x_min))
    u = rng.random(n)
    # X = largest k with P(X >= k) > u; tail_p is decreasing
    counts = np.searchsorted(-tail_p, -u, side="left")
    counts = np.clip(counts, 1, support.size)
    return (x_min + counts - 1).astype(float)


# --------------------------------------------------------------------------
# Correlation
# --------------------------------------------------------------------------


def pearson(xs, ys) -> float:
    """Sample Pearson product-moment correlation coefficient."""
    xs = list(map(float, xs))
    ys = list(map(float, ys))
    if len(xs) != len(ys):
        raise DegenerateInput(f"length mismatch: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 3:
        raise DegenerateInput("need at least 3 paired observations")
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    var_x = math.fsum(d * d for d in dx)
    var_y = math.fsum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise DegenerateInput("zero variance input")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)
    return max(-1.0, min(1.0, r))


# --------------------------------------------------------------------------
# Chi-square independence test
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ChiSquareResult:
    chi2: float
    dof: int
    p_value: float

    def __post_init__(self):
        assert self.chi2 >= 0.0
        assert self.dof >= 1
        assert 0.0 <= self.p_value <= 1.0


def regularized_gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x), absolute error < 1e-10.

    Series expansion of P(a, x) for x < a + 1, continued fraction (modified
    Lentz) for Q(a, x) otherwise.
    """
    if a <= 0.0 or x < 0.0:
        raise DomainError("regularized_gamma_q needs a > 0 and x >= 0")
    if x == 0.0:
        return 1.0
    log_prefactor = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        term = 1.0 / a
        total = term
        denom = a
        for _ in range(1000):
            denom += 1.0
            term *= x / denom
            total += term
            if abs(term) < abs(total) * 1e-17:
                break
        return 1.0 - total * math.exp(log_prefactor)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return math.exp(log_prefactor) * h


def chi_square_independence(table) -> ChiSquareResult:
    """Pearson chi-square test of independence on an R x C count table."""
    obs = np.asarray(table, dtype=float)
    if obs.ndim != 2 or obs.shape[0] < 2 or obs.shape[1] < 2:
        raise DegenerateTable("need a table with at least 2 rows and 2 columns")
    if np.any(obs < 0) or np.any(~np.isfinite(obs)):
        raise DegenerateTable("counts must be finite and non-negative")
    row_sums = obs.sum(axis=1)
    col_sums = obs.sum(axis=0)
    if np.any(row_sums <= 0) or np.any(col_sums <= 0):
        raise DegenerateTable("every row and column sum must be positive")
    total = obs.sum()
    expected = np.outer(row_sums, col_sums) / total
    chi2 = float(((obs - expected) ** 2 / expected).sum())
    dof = (obs.shape[0] - 1) * (obs.shape[1] - 1)
    return ChiSquareResult(chi2=chi2, dof=dof, p_value=regularized_gamma_q(dof / 2.0, chi2 / 2.0))
