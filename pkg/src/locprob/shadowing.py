"""Failure bounds when coverage is set by power measurements under fading.

The estimated coverage ratio is a mixed random variable: log-normal around
the true ratio on (0, b_hat_max], plus a point mass at zero for the
below-threshold event.  The unconditioned failure bound integrates the
fixed-coverage bound against that mixture; an alternating binomial series
over the mixture's even moments and a closed-form log-normal moment
approximation are provided as cross-checks on their stated validity ranges.
"""

from __future__ import annotations

import math

from .analytic import FailureProbResult, _check_variant, _closed_value
from .model import ALPHA, BhatDistribution, NetworkParams
from .numerics import QuadratureSpec, integrate

METHODS = ("integrate_conditional", "alternating_sum", "moment_approx")

# The alternating series multiplies moment errors by binomial coefficients up
# to C(n-3, (n-3)/2); past n ~ 30 the cancellation swamps double precision.
ALTERNATING_SUM_MAX_N = 30
MOMENT_APPROX_MAX_N = 10

_EPS_SCALE = 1e-12  # lower integration cutoff, relative to b_o
_PEAK_SPAN = 10  # density split points at b_o * 10^(m sigma1 / 10), |m| <= span


def bhat_pdf(dist: BhatDistribution, bhat: float) -> float:
    """Continuous density of the estimated ratio at bhat.

    Zero beyond the truncation point b_hat_max; the point mass at zero is
    exposed separately as dist.zero_mass, never as a density value.
    """
    if dist.degenerate:
        raise ValueError(
            "degenerate distribution (sigma1 = 0) has no density; "
            "it is a point mass at b_o (or at 0 when b_o > b_hat_max)"
        )
    if bhat < 0.0:
        raise ValueError(f"bhat must be non-negative, got {bhat}")
    if bhat == 0.0 or bhat > dist.b_hat_max:
        return 0.0
    z = 10.0 * math.log10(bhat) - dist.mu
    sigma1 = dist.sigma1
    return (
        ALPHA
        / (math.sqrt(2.0 * math.pi) * sigma1 * bhat)
        * math.exp(-z * z / (2.0 * sigma1 * sigma1))
    )


def _split_points(dist: BhatDistribution) -> list[float]:
    """Integration breakpoints straddling the density peak.

    The log-normal bump can be arbitrarily narrow (small sigma1), so plain
    adaptive refinement over the whole support may sample straight past it.
    Splitting at b_o * 10^(m sigma1 / 10) pins the peak region explicitly.
    """
    lo = _EPS_SCALE * dist.b_o
    points = {lo, dist.b_hat_max}
    for m in range(-_PEAK_SPAN, _PEAK_SPAN + 1):
        x = dist.b_o * 10.0 ** (m * dist.sigma1 / 10.0)
        if lo < x < dist.b_hat_max:
            points.add(x)
    return sorted(points)


def _integrate_mixed(dist, g, abs_tol: float) -> float:
    """Integral of g(x) * density(x) over the continuous support."""
    points = _split_points(dist)
    spec = QuadratureSpec(abs_tol=abs_tol / (len(points) - 1))
    pieces = [
        integrate(lambda x: g(x) * bhat_pdf(dist, x), lo, hi, spec)
        for lo, hi in zip(points, points[1:])
    ]
    return math.fsum(pieces)


def bhat_moment(
    dist: BhatDistribution, order: int, method: str = "quadrature"
) -> float:
    """E[ratio^order] for even order.

    method="quadrature" integrates over the mixed distribution; the point
    mass at zero contributes only at order 0, where the total mass is 1
    exactly.  method="lognormal_approx" returns the closed-form log-normal
    moment exp((order/alpha) mu + ((order/alpha)^2 / 2) sigma1^2), ignoring
    the truncation and the zero mass.
    """
    if order < 0 or order % 2 != 0:
        raise ValueError(f"order must be a non-negative even integer, got {order}")
    if method == "lognormal_approx":
        scaled = order / ALPHA
        return math.exp(scaled * dist.mu + 0.5 * scaled * scaled * dist.sigma1**2)
    if method != "quadrature":
        raise ValueError(
            f"unknown method {method!r}, expected 'quadrature' or 'lognormal_approx'"
        )
    if order == 0:
        return 1.0
    if dist.degenerate:
        return dist.b_o**order if dist.b_o <= dist.b_hat_max else 0.0
    return _integrate_mixed(dist, lambda x: x**order, 1e-12)


def _series_constants(net: NetworkParams, variant: str) -> tuple[float, float, float]:
    n, a = net.n, net.a
    k1 = 1.0 - a
    k2 = (1.0 - a) * (n - 3)
    if variant == "corrected":
        k3 = (1.0 - a) ** 2 * 0.5 * (n - 2) * (n - 3)
    else:
        k3 = (1.0 - a) ** 2 * 0.5 * (n - 1) * (n - 2)
    return k1, k2, k3


def failure_prob_shadow(
    net: NetworkParams,
    dist: BhatDistribution,
    method: str = "integrate_conditional",
    variant: str = "corrected",
) -> FailureProbResult:
    """Failure bound with coverage drawn from the mixed ratio distribution.

    integrate_conditional (default): zero_mass + integral of the conditional
    fixed-coverage bound against the continuous density.  Conditional failure
    at ratio zero is certain, hence the zero_mass term.

    alternating_sum: binomial series over quadrature moments, restricted to
    n <= 30 (catastrophic cancellation beyond); algebraically identical to
    the integral form, kept for small-n cross-validation.

    moment_approx: the same series with closed-form log-normal moments
    b_o^j * exp(sigma1^2 j^2 / (2 alpha^2)), valid only for small n and
    small sigma1; enforced as n <= 10.
    """
    _check_variant(variant)
    n = net.n
    if method == "integrate_conditional":
        if dist.degenerate:
            p_f = (
                _closed_value(n, net.a, dist.b_o, variant)
                if dist.b_o <= dist.b_hat_max
                else 1.0
            )
        else:
            p_f = dist.zero_mass + _integrate_mixed(
                dist, lambda x: _closed_value(n, net.a, x, variant), 1e-9
            )
    elif method == "alternating_sum":
        if n > ALTERNATING_SUM_MAX_N:
            raise ValueError(
                f"alternating_sum is numerically unstable for n = {n} > "
                f"{ALTERNATING_SUM_MAX_N}, use integrate_conditional"
            )
        moments = {
            j: bhat_moment(dist, j, method="quadrature") for j in range(0, 2 * n, 2)
        }
        p_f = _series(net, variant, moments.__getitem__)
    elif method == "moment_approx":
        if n > MOMENT_APPROX_MAX_N:
            raise ValueError(
                f"moment_approx is outside its stated validity for n = {n} > "
                f"{MOMENT_APPROX_MAX_N}"
            )
        two_alpha_sq = 2.0 * ALPHA * ALPHA  # ~= 37.72, computed rather than quoted

        def lognormal_moment(j: int) -> float:
            return dist.b_o**j * math.exp(dist.sigma1**2 * j * j / two_alpha_sq)

        p_f = _series(net, variant, lognormal_moment)
    else:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    return FailureProbResult(p_f=p_f, p_loc=1.0 - p_f, method=method, variant=variant)


def _series(net: NetworkParams, variant: str, moment) -> float:
    """Alternating binomial series over even moments of the ratio."""
    n = net.n
    k1, k2, k3 = _series_constants(net, variant)
    terms = []
    for ell in range(n - 2):
        coeff = math.comb(n - 3, ell) * (-k1) ** ell
        terms.append(
            coeff
            * (moment(2 * ell) + k2 * moment(2 * ell + 2) + k3 * moment(2 * ell + 4))
        )
    return math.fsum(terms)
