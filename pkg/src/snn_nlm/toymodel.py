"""Bias/variance analysis of the single-pixel neighbor-averaging estimator.

Setup: ``n_total`` noisy replicas of a pixel with clean value ``mu`` and
noise std ``sigma`` are available.  For a noisy reference value ``mu_r``,
``n_neighbors`` replicas are selected (nearest values, or values nearest
to the expected noisy-replica distance ``offset * sigma``) and averaged.
The selected samples are modeled as draws from the Gaussian truncated to
the interval(s) expected to contain them, which yields closed-form
moments of the estimate and, integrated over the distribution of
``mu_r``, its bias/variance decomposition.

Two Monte-Carlo companions validate the analysis:

* :func:`mc_truncated_moments` samples the truncated/mixture selection
  distribution directly (inverse CDF) and checks the moment algebra to
  Monte-Carlo accuracy;
* :func:`mc_oracle` simulates the actual finite-sample process (draw the
  replicas, select, average) and checks the integrated prediction error.
  The truncated-Gaussian model is an O(1/n_total) approximation of this
  process, so agreement is at the percent level, not at standard-error
  level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx, ndtr, ndtri

__all__ = [
    "ToyScenario",
    "EstimatorMoments",
    "PredictionError",
    "solve_d_nn",
    "solve_d_snn",
    "nn_moments",
    "snn_moments",
    "prediction_error",
    "mc_oracle",
    "mc_truncated_moments",
    "expected_distance_fischer",
]

_SQRT2 = np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)

_BISECT_ITERS = 120
_RESIDUAL_TOL = 1e-12
_QUAD_NODES = 4001
_QUAD_RANGE_SIGMAS = 8.0


@dataclass(frozen=True)
class ToyScenario:
    """(mu, sigma, n_total, n_neighbors, offset) configuration."""

    mu: float
    sigma: float
    n_total: int
    n_neighbors: int
    offset: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if not 1 <= self.n_neighbors <= self.n_total:
            raise ValueError("need 1 <= n_neighbors <= n_total")
        if self.offset < 0:
            raise ValueError("offset must be >= 0")

    @property
    def fraction(self) -> float:
        """Selected fraction of the available replicas."""
        return self.n_neighbors / self.n_total


@dataclass(frozen=True)
class EstimatorMoments:
    """Expectation and variance of the averaged-neighbors estimate.

    Fields are scalars or arrays, matching the ``mu_r`` argument.
    ``degenerate`` marks evaluations where the truncation mass underflowed
    and the scaled-exponential fallback could not resolve it.
    """

    expectation: float | np.ndarray
    variance: float | np.ndarray
    degenerate: bool = False


@dataclass(frozen=True)
class PredictionError:
    """Integrated squared bias and variance; ``mse`` is their sum."""

    bias_sq: float
    variance: float

    @property
    def mse(self) -> float:
        return self.bias_sq + self.variance


def _phi(x):
    return _INV_SQRT2PI * np.exp(-0.5 * x * x)


def _trunc_ratios(alpha, beta):
    """Stable (phi(b)-phi(a))/Z and (b phi(b)-a phi(a))/Z for Z = Phi(b)-Phi(a).

    For intervals deep in a tail the plain expressions underflow; there we
    factor out the dominant exponential and evaluate through the scaled
    complementary error function, which stays finite for any bounds.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    r1 = np.empty_like(alpha)
    r2 = np.empty_like(alpha)
    degenerate = np.zeros(alpha.shape, dtype=bool)

    upper = alpha >= 0
    lower = beta <= 0
    middle = ~(upper | lower)

    if np.any(middle):
        a, b = alpha[middle], beta[middle]
        z = ndtr(b) - ndtr(a)
        r1[middle] = (_phi(b) - _phi(a)) / z
        r2[middle] = (b * _phi(b) - a * _phi(a)) / z

    for mask, flip in ((upper, False), (lower, True)):
        if not np.any(mask):
            continue
        if flip:
            a, b = -beta[mask], -alpha[mask]
        else:
            a, b = alpha[mask], beta[mask]
        # both bounds >= 0; exp((a^2-b^2)/2) <= 1 keeps everything finite
        damp = np.exp(0.5 * (a * a - b * b))
        den = erfcx(a / _SQRT2) - erfcx(b / _SQRT2) * damp
        bad = den <= 0.0
        degenerate[mask] |= bad
        den = np.where(bad, np.finfo(float).tiny, den)
        scale = 2.0 * _INV_SQRT2PI
        r1_v = scale * (damp - 1.0) / den
        r2_v = scale * (b * damp - a) / den
        if flip:
            r1_v = -r1_v
        r1[mask] = r1_v
        r2[mask] = r2_v
    return r1, r2, degenerate


def _trunc_moments(lo, hi, mu, sigma):
    """Per-sample moments of G(mu, sigma^2) truncated to [lo, hi] (1-d arrays)."""
    alpha = (np.atleast_1d(np.asarray(lo, dtype=float)) - mu) / sigma
    beta = (np.atleast_1d(np.asarray(hi, dtype=float)) - mu) / sigma
    r1, r2, degenerate = _trunc_ratios(alpha, beta)
    expectation = mu - sigma * r1
    variance = sigma**2 * np.maximum(1.0 - r2 - r1 * r1, 0.0)
    return expectation, variance, degenerate


def _gauss_mass(lo, hi, mu, sigma):
    """P(lo <= X <= hi) for X ~ G(mu, sigma^2), tail-symmetric evaluation."""
    a = (np.asarray(lo, dtype=float) - mu) / sigma
    b = (np.asarray(hi, dtype=float) - mu) / sigma
    both_up = a > 0
    plain = ndtr(b) - ndtr(a)
    flipped = ndtr(-a) - ndtr(-b)
    return np.where(both_up, flipped, plain)


def _check_solvable(scn: ToyScenario) -> None:
    if scn.n_neighbors >= scn.n_total:
        raise ValueError(
            "n_neighbors must be < n_total for a finite search half-width"
        )


def _nn_mass(scn: ToyScenario, mu_r, d):
    return _gauss_mass(mu_r - d, mu_r + d, scn.mu, scn.sigma)


def _snn_mass(scn: ToyScenario, mu_r, d):
    shift = scn.offset * scn.sigma
    lo_l, hi_l = mu_r - shift - d, mu_r - shift + d
    lo_r, hi_r = mu_r + shift - d, mu_r + shift + d
    disjoint = (_gauss_mass(lo_l, hi_l, scn.mu, scn.sigma)
                + _gauss_mass(lo_r, hi_r, scn.mu, scn.sigma))
    # overlapping intervals merge into one; count the union mass once
    union = _gauss_mass(lo_l, hi_r, scn.mu, scn.sigma)
    return np.where(d >= shift, union, disjoint)


def _solve_halfwidth(scn: ToyScenario, mu_r, mass_fn):
    _check_solvable(scn)
    mu_r = np.asarray(mu_r, dtype=float)
    scalar = mu_r.ndim == 0
    mu_r = np.atleast_1d(mu_r)
    target = scn.fraction
    lo = np.zeros_like(mu_r)
    hi = np.full_like(mu_r, 20.0 * scn.sigma)
    if np.any(mass_fn(scn, mu_r, hi) < target):
        raise ValueError("search bracket (0, 20 sigma] does not contain the root")
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        high = mass_fn(scn, mu_r, mid) >= target
        hi = np.where(high, mid, hi)
        lo = np.where(high, lo, mid)
    d = 0.5 * (lo + hi)
    residual = np.abs(mass_fn(scn, mu_r, d) - target)
    if np.any(residual > _RESIDUAL_TOL):
        raise ArithmeticError(f"bisection residual {residual.max():.3e} above tolerance")
    return d[0] if scalar else d


def solve_d_nn(scn: ToyScenario, mu_r):
    """Half-width d with P(mu_r - d <= X <= mu_r + d) = n_neighbors / n_total.

    Solved by bracketing bisection on (0, 20 sigma]; the residual of the
    returned root is below 1e-12.  Accepts scalar or array ``mu_r``.
    """
    return _solve_halfwidth(scn, mu_r, _nn_mass)


def solve_d_snn(scn: ToyScenario, mu_r):
    """Half-width of the two intervals at mu_r +- offset*sigma holding the
    selected fraction.

    When the intervals overlap (d >= offset*sigma) their union is a single
    interval and its mass is counted once, which also makes ``offset = 0``
    coincide with :func:`solve_d_nn` exactly.
    """
    return _solve_halfwidth(scn, mu_r, _snn_mass)


def nn_moments(scn: ToyScenario, mu_r) -> EstimatorMoments:
    """Moments of the mean of ``n_neighbors`` draws from the truncated model.

    The estimate is modeled as the mean of i.i.d. samples of
    G(mu, sigma^2) truncated to ``mu_r +- d``: the expectation is the
    truncated mean and the variance is the truncated variance divided by
    ``n_neighbors``.
    """
    d = solve_d_nn(scn, mu_r)
    mu_arr = np.asarray(mu_r, dtype=float)
    e, v, bad = _trunc_moments(mu_arr - d, mu_arr + d, scn.mu, scn.sigma)
    if mu_arr.ndim == 0:
        return EstimatorMoments(float(e[0]), float(v[0]) / scn.n_neighbors, bool(bad[0]))
    return EstimatorMoments(e, v / scn.n_neighbors, bool(np.any(bad)))


def snn_moments(scn: ToyScenario, mu_r) -> EstimatorMoments:
    """Moments of the offset-selection estimate (two-interval mixture).

    Disjoint intervals give a mixture of two truncated Gaussians weighted
    by their masses; the mixture variance combines second moments before
    subtracting the squared mixture mean.  Overlapping intervals fall back
    to a single truncation over the union.
    """
    d = solve_d_snn(scn, mu_r)
    mu_r = np.asarray(mu_r, dtype=float)
    shift = scn.offset * scn.sigma
    d_arr = np.atleast_1d(np.asarray(d))
    mu_arr = np.atleast_1d(mu_r)

    lo_l, hi_l = mu_arr - shift - d_arr, mu_arr - shift + d_arr
    lo_r, hi_r = mu_arr + shift - d_arr, mu_arr + shift + d_arr
    overlap = d_arr >= shift

    e_u, v_u, bad_u = _trunc_moments(lo_l, hi_r, scn.mu, scn.sigma)

    # clamp disjoint-branch bounds where overlap holds to keep the
    # vectorized evaluation well-defined; results there are discarded
    hi_l_c = np.where(overlap, lo_l + np.maximum(hi_l - lo_l, 1e-300), hi_l)
    lo_r_c = np.where(overlap, hi_r - np.maximum(hi_r - lo_r, 1e-300), lo_r)
    e_l, v_l, bad_l = _trunc_moments(lo_l, hi_l_c, scn.mu, scn.sigma)
    e_r, v_r, bad_r = _trunc_moments(lo_r_c, hi_r, scn.mu, scn.sigma)
    p_l = _gauss_mass(lo_l, hi_l_c, scn.mu, scn.sigma)
    p_r = _gauss_mass(lo_r_c, hi_r, scn.mu, scn.sigma)
    p_tot = p_l + p_r
    e_mix = (p_l * e_l + p_r * e_r) / p_tot
    second = (p_l * (e_l * e_l + v_l) + p_r * (e_r * e_r + v_r)) / p_tot
    v_mix = np.maximum(second - e_mix * e_mix, 0.0)

    e = np.where(overlap, e_u, e_mix)
    v = np.where(overlap, v_u, v_mix)
    bad = bool(np.any(bad_u | bad_l | bad_r))
    if mu_r.ndim == 0:
        return EstimatorMoments(float(e[0]), float(v[0]) / scn.n_neighbors, bad)
    return EstimatorMoments(e, v / scn.n_neighbors, bad)


def _moment_curve(scn: ToyScenario, strategy: str, mu_r):
    if strategy == "nn":
        return nn_moments(scn, mu_r)
    if strategy == "snn":
        return snn_moments(scn, mu_r)
    raise ValueError(f"unknown strategy {strategy!r}")


def prediction_error(scn: ToyScenario, strategy: str) -> PredictionError:
    """Estimator error integrated over the distribution of the reference.

    Composite-Simpson quadrature of squared bias and variance against the
    G(mu, sigma^2) density of ``mu_r`` over ``mu +- 8 sigma`` (4001
    nodes).  Both components are normalized by the selected fraction
    ``n_neighbors / n_total``, the convention under which the full-sample
    limit reports the plain sample-mean variance ``sigma^2 / n_total``.
    """
    if scn.n_neighbors == scn.n_total:
        # every replica is selected: the estimate is the unbiased sample mean
        return PredictionError(0.0, scn.sigma**2 / scn.n_total)
    span = _QUAD_RANGE_SIGMAS * scn.sigma
    grid = np.linspace(scn.mu - span, scn.mu + span, _QUAD_NODES)
    step = grid[1] - grid[0]
    weights = np.ones(_QUAD_NODES)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    weights *= step / 3.0
    moments = _moment_curve(scn, strategy, grid)
    density = _phi((grid - scn.mu) / scn.sigma) / scn.sigma
    bias_sq = float(np.sum(weights * (moments.expectation - scn.mu) ** 2 * density))
    variance = float(np.sum(weights * moments.variance * density))
    return PredictionError(bias_sq / scn.fraction, variance / scn.fraction)


def _select_and_average(pool, mu_r, scn: ToyScenario, strategy: str):
    if scn.n_neighbors == scn.n_total:
        return pool.mean(axis=1)
    if strategy == "nn":
        key = np.abs(pool - mu_r)
    elif strategy == "snn":
        key = np.abs(np.abs(pool - mu_r) - scn.offset * scn.sigma)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    idx = np.argpartition(key, scn.n_neighbors - 1, axis=1)[:, : scn.n_neighbors]
    return np.take_along_axis(pool, idx, axis=1).mean(axis=1)


def mc_oracle(
    scn: ToyScenario,
    strategy: str,
    trials: int,
    rng_seed: int,
    batch: int = 100_000,
) -> PredictionError:
    """Simulate the finite-sample process and decompose its error.

    Per trial: draw the reference ``mu_r``, complete the pool with
    ``n_total - 1`` further replicas (the reference is itself a selectable
    candidate, as in the image filter), select ``n_neighbors`` by the
    strategy key and average.  Two pools share each reference draw, so the
    product of their centered estimates is an unbiased estimate of the
    integrated squared bias; variance follows as MSE minus bias.
    Components carry the same selected-fraction normalization as
    :func:`prediction_error`.  Deterministic for a fixed seed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(rng_seed)
    mse_acc = 0.0
    bias_acc = 0.0
    done = 0
    while done < trials:
        n = min(batch, trials - done)
        mu_r = rng.normal(scn.mu, scn.sigma, size=(n, 1))
        estimates = []
        for _ in range(2):
            others = rng.normal(scn.mu, scn.sigma, size=(n, scn.n_total - 1))
            pool = np.concatenate([mu_r, others], axis=1)
            estimates.append(_select_and_average(pool, mu_r, scn, strategy))
        e1, e2 = estimates
        mse_acc += 0.5 * (((e1 - scn.mu) ** 2).sum() + ((e2 - scn.mu) ** 2).sum())
        bias_acc += ((e1 - scn.mu) * (e2 - scn.mu)).sum()
        done += n
    mse = mse_acc / trials
    bias_sq = max(bias_acc / trials, 0.0)
    variance = max(mse - bias_sq, 0.0)
    return PredictionError(bias_sq / scn.fraction, variance / scn.fraction)


def mc_truncated_moments(
    scn: ToyScenario,
    strategy: str,
    mu_r: float,
    trials: int,
    rng_seed: int,
):
    """Sample the model's selection distribution; return moments and SE.

    Draws ``trials`` values from the truncated (or two-interval mixture)
    distribution by inverse CDF and reduces them to estimator moments
    through the i.i.d.-mean identities (mean unchanged, variance divided
    by ``n_neighbors``).  Returns ``(EstimatorMoments, se_expectation)``
    where the standard error refers to the expectation estimate.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(rng_seed)
    if strategy == "nn":
        d = solve_d_nn(scn, mu_r)
        intervals = [(mu_r - d, mu_r + d)]
    elif strategy == "snn":
        d = solve_d_snn(scn, mu_r)
        shift = scn.offset * scn.sigma
        if d >= shift:
            intervals = [(mu_r - shift - d, mu_r + shift + d)]
        else:
            intervals = [
                (mu_r - shift - d, mu_r - shift + d),
                (mu_r + shift - d, mu_r + shift + d),
            ]
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    cdf_lo = np.array([ndtr((lo - scn.mu) / scn.sigma) for lo, _ in intervals])
    cdf_hi = np.array([ndtr((hi - scn.mu) / scn.sigma) for _, hi in intervals])
    masses = cdf_hi - cdf_lo
    u = rng.uniform(0.0, masses.sum(), size=trials)
    if len(intervals) == 1:
        p = cdf_lo[0] + u
    else:
        in_right = u >= masses[0]
        p = np.where(in_right, cdf_lo[1] + (u - masses[0]), cdf_lo[0] + u)
    x = scn.mu + scn.sigma * ndtri(p)
    mean = float(x.mean())
    var = float(x.var())
    se = float(np.sqrt(var / trials))
    return EstimatorMoments(mean, var / scn.n_neighbors), se


def expected_distance_fischer(sigma: float, p: int) -> float:
    """Approximate expected per-element distance between two noisy replicas.

    The squared patch distance is a scaled chi-square with ``p`` degrees
    of freedom; the square-root-of-chi-square normal approximation gives
    ``sigma * sqrt(2p - 1) / sqrt(p)``, i.e. ``sigma`` for a single-pixel
    patch.  The approximation is asymptotic in ``p`` (about 13% low at
    p = 1, 0.1% at p = 9 against the exact mean).
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    return sigma * np.sqrt(2.0 * p - 1.0) / np.sqrt(p)
