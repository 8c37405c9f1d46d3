"""Failure-probability lower bounds and transition thresholds, fixed coverage.

A blind node localizes itself when at least three anchor nodes fall inside
its coverage disk.  With n nodes uniform on the domain disk, anchor fraction
1 - a and coverage-to-domain ratio b, the chance that any given node is both
in range and an anchor is (1 - a) * b^2, so the failure bound is the
probability that a binomial(n - 1, (1 - a) b^2) count stays below three.
The module evaluates that bound three ways (term-by-term series, closed
form, small-coverage approximation) plus the transition thresholds where the
bound's second derivative vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import NetworkParams
from .numerics import find_sign_change, log_binomial, second_derivative_fd

#: Bracket-coefficient variants for the closed form.  "corrected" uses the
#: b^4 coefficient (n-2)(n-3)/2 that matches the term-by-term series exactly;
#: "paper" keeps the as-published coefficient (n-1)(n-2)/2, which is retained
#: only to document the discrepancy -- it can exceed probability 1.
VARIANTS = ("corrected", "paper")


@dataclass(frozen=True)
class FailureProbResult:
    """Failure bound p_f, its complement p_loc, and the formula used."""

    p_f: float
    p_loc: float
    method: str
    variant: str | None = None


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")


def _check_ratio(b: float) -> None:
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"coverage ratio b must lie in [0, 1], got {b}")


def _few_anchor_mass(p: int, a: float) -> float:
    """P(at most two anchors among p in-range nodes), each anchor w.p. 1-a.

    This is the bracket of the p-th series term,
    a^p + p a^(p-1) (1-a) + (p(p-1)/2) a^(p-2) (1-a)^2,
    with the 0^0 = 1 convention so that a = 0 keeps its combinatorial
    meaning (certain for p <= 2, impossible otherwise).
    """
    if p <= 2:
        return 1.0
    if a == 0.0:
        return 0.0
    if a == 1.0:
        return 1.0
    one = 1.0 - a
    return a ** (p - 2) * (a * a + p * a * one + 0.5 * p * (p - 1) * one * one)


def failure_prob_sum(net: NetworkParams, b: float) -> FailureProbResult:
    """Failure bound as the full series over the in-range node count.

    Terms are evaluated in the log domain (log-gamma binomial coefficients,
    so n = 3000 is fine where factorials would overflow) and accumulated
    with exact compensated summation.  The weighted sum is normalised by the
    computed total mass of the count distribution -- analytically 1 -- which
    cancels the rounding error the log-gamma evaluations share across terms.
    """
    _check_ratio(b)
    n, a = net.n, net.a
    b2 = b * b
    if b2 == 0.0:
        p_f = 1.0
    elif b2 >= 1.0:
        p_f = _few_anchor_mass(n - 1, a)
    else:
        log_b2 = math.log(b2)
        log_q = math.log1p(-b2)
        weighted = []
        total = []
        for p in range(n):
            term = math.exp(log_binomial(n - 1, p) + p * log_b2 + (n - 1 - p) * log_q)
            total.append(term)
            mass = _few_anchor_mass(p, a)
            if mass != 0.0:
                weighted.append(term * mass)
        p_f = math.fsum(weighted) / math.fsum(total)
    return FailureProbResult(p_f=p_f, p_loc=1.0 - p_f, method="sum")


def _closed_value(n: int, a: float, b: float, variant: str) -> float:
    s = (1.0 - a) * b * b
    u = 1.0 - s
    if variant == "corrected":
        c2 = 0.5 * (n - 2) * (n - 3)
    else:
        c2 = 0.5 * (n - 1) * (n - 2)
    return u ** (n - 3) * (1.0 + (n - 3) * s + c2 * s * s)


def failure_prob_closed(
    net: NetworkParams, b: float, variant: str = "corrected"
) -> FailureProbResult:
    """Closed-form failure bound u^(n-3) * [1 + c1 s + c2 s^2], s = (1-a) b^2.

    With variant="corrected" the bracket coefficients are c1 = n-3 and
    c2 = (n-2)(n-3)/2, which reproduces failure_prob_sum identically.  With
    variant="paper" the c2 coefficient is (n-1)(n-2)/2 as originally
    published; that version is inconsistent with the series and can exceed 1
    on valid inputs, so it exists only for regression of the discrepancy.
    """
    _check_ratio(b)
    _check_variant(variant)
    p_f = _closed_value(net.n, net.a, b, variant)
    return FailureProbResult(p_f=p_f, p_loc=1.0 - p_f, method="closed", variant=variant)


def failure_prob_approx_small(
    net: NetworkParams, b: float, force: bool = False
) -> FailureProbResult:
    """Small-coverage approximation p_f ~= 1 - [(n-3)(1-a) b^2]^2.

    Valid when (1-a) b^2 << 2/n; outside that regime a ValueError is raised
    unless force=True.
    """
    _check_ratio(b)
    n, a = net.n, net.a
    s = (1.0 - a) * b * b
    if s >= 2.0 / n and not force:
        raise ValueError(
            f"outside validity domain: (1-a) b^2 = {s:.4g} is not small "
            f"against 2/n = {2.0 / n:.4g} (pass force=True to override)"
        )
    p_f = 1.0 - ((n - 3) * s) ** 2
    return FailureProbResult(p_f=p_f, p_loc=1.0 - p_f, method="approx_small")


def threshold_a_star(n: int, b: float) -> float | None:
    """Transition threshold on the blind-node fraction, 1 - 1/(b^2 (n/2 - 1)).

    Below the threshold localization succeeds with high probability; above
    it one-shot localization becomes unlikely.  Returns None when the formula
    gives a non-positive value, i.e. no threshold inside (0, 1).
    """
    if n < 5:
        raise ValueError(f"need n >= 5, got {n}")
    if not 0.0 < b <= 1.0:
        raise ValueError(f"coverage ratio b must lie in (0, 1], got {b}")
    a_star = 1.0 - 1.0 / (b * b * (0.5 * n - 1.0))
    return a_star if a_star > 0.0 else None


def threshold_b_star(n: int, a: float, form: str = "exact") -> float:
    """Transition threshold on the coverage ratio for a fixed blind fraction.

    form="exact" evaluates the full closed expression; form="large_n" uses
    the simplification b* ~= sqrt((1 + sqrt(1.75)) / ((1-a) n)).
    """
    if n < 10:
        raise ValueError(f"need n >= 10, got {n}")
    if not 0.0 <= a < 1.0:
        if a == 1.0:
            raise ValueError("no threshold: no anchor nodes (a = 1)")
        raise ValueError(f"blind fraction a must lie in [0, 1), got {a}")
    if form == "large_n":
        return math.sqrt((1.0 + math.sqrt(1.75)) / ((1.0 - a) * n))
    if form != "exact":
        raise ValueError(f"unknown form {form!r}, expected 'exact' or 'large_n'")
    lead = 4.0 * n * n - n - 15.0
    cubic = 2.0 * n**3 - 8.0 * n * n + 10.5 * n - 4.5
    inner = 1.0 + math.sqrt(1.0 + 6.0 * (n - 9.0) * cubic / (lead * lead))
    return math.sqrt(lead / (2.0 * (1.0 - a) * cubic) * inner)


def iterative_failure_floor(n: int, b: float) -> float:
    """Failure floor under unlimited relabelling of localized nodes.

    Even when every other node serves as an anchor, a node fails whenever
    fewer than three of the n - 1 others fall in coverage; this is the
    binomial(n - 1, b^2) CDF at 2.
    """
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    _check_ratio(b)
    b2 = b * b
    terms = [
        math.comb(n - 1, j) * b2**j * (1.0 - b2) ** (n - 1 - j) for j in range(3)
    ]
    return math.fsum(terms)


def threshold_a_star_numeric(
    n: int,
    b: float,
    variant: str = "corrected",
    h: float = 1e-4,
    tol: float = 1e-6,
    bracket: float = 0.08,
) -> float:
    """Root of the finite-difference second derivative of p_f in a.

    Independent verification of threshold_a_star: brackets the closed-form
    value and bisects the central second difference (step h) to tol.
    """
    _check_variant(variant)
    a_star = threshold_a_star(n, b)
    if a_star is None:
        raise ValueError(f"no threshold inside (0, 1) for n={n}, b={b}")

    def curvature(a: float) -> float:
        return second_derivative_fd(lambda x: _closed_value(n, x, b, variant), a, h)

    lo = max(h, a_star - bracket)
    hi = min(1.0 - h, a_star + bracket)
    return find_sign_change(curvature, lo, hi, tol)


def threshold_b_star_numeric(
    n: int,
    a: float,
    variant: str = "corrected",
    h: float = 1e-4,
    tol: float = 1e-6,
) -> float:
    """Root of the finite-difference second derivative of p_f in b.

    Reported alongside threshold_b_star so their gap can be recorded; the
    closed expression and the numeric root are not asserted equal.
    """
    _check_variant(variant)
    center = threshold_b_star(n, a, form="exact")

    def curvature(b: float) -> float:
        return second_derivative_fd(lambda x: _closed_value(n, a, x, variant), b, h)

    lo = max(h, 0.5 * center)
    hi = min(1.0 - h, 1.8 * center)
    return find_sign_change(curvature, lo, hi, tol)
