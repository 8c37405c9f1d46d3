"""Seeded Monte Carlo oracle for localization probabilities.

Node configurations are sampled on the unit disk with the square-root radial
transform (area-uniform placement).  Two probe protocols are implemented:

* "center_node" reproduces the interior-node model behind the closed forms:
  the probe sits at the origin and every other node is an anchor
  independently with probability k/n, so the anchors-in-range count is
  binomial(n-1, (1-a) b^2) exactly.
* "all_nl_nodes" is the field protocol: n nodes, exactly k anchors chosen
  uniquely at random, every blind node probed, and the per-configuration
  statistic is the fraction of blind nodes that localize.  Boundary nodes
  see a clipped coverage disk, which depresses this estimate below the
  interior-node theory -- that gap is intentional and measurable.

Shadowed coverage draws one fading value per probe ("per_node", matching the
mixed-ratio analysis: the probe's effective ratio is b * 10^(-X1/10), zeroed
when it exceeds b_hat_max) or one per link ("per_link", a different model,
kept behind the flag for comparison).

Determinism: trials are partitioned into fixed-size chunks and chunk i draws
from an independent stream spawned from the master seed, so results are
identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import BhatDistribution, NetworkParams

PROBE_CHOICES = ("center_node", "all_nl_nodes")
SHADOW_CHOICES = ("none", "per_node", "per_link")

# Chunk sizes define the random-stream layout; they are pure functions of the
# run parameters, so changing them changes the sampled numbers (not the
# distribution) and is part of the reproducibility contract.
_ALL_NODES_CHUNK = 32

_WILSON_Z = 1.959963984540054  # two-sided 95%


def _center_chunk_size(n: int) -> int:
    # cap the (trials x nodes) draw blocks near 8 MB
    return min(4096, max(128, 2**20 // n))


@dataclass(frozen=True)
class TrialProtocol:
    """Probe selection and fading-draw granularity for one trial."""

    probe: str = "center_node"
    shadow_draw: str = "none"

    def __post_init__(self) -> None:
        if self.probe not in PROBE_CHOICES:
            raise ValueError(f"probe must be one of {PROBE_CHOICES}, got {self.probe!r}")
        if self.shadow_draw not in SHADOW_CHOICES:
            raise ValueError(
                f"shadow_draw must be one of {SHADOW_CHOICES}, got {self.shadow_draw!r}"
            )


@dataclass(frozen=True)
class Realization:
    """One sampled configuration: polar positions plus anchor flags."""

    radii: np.ndarray
    angles: np.ndarray
    l_flags: np.ndarray


@dataclass(frozen=True)
class ProbEstimate:
    """Pooled trial outcomes with a Wilson 95% interval.

    trials counts pooled probe outcomes (equal to realizations for the
    center protocol; realizations * blind-node count for all_nl_nodes).
    p_hat estimates the localization (success) probability.
    """

    trials: int
    successes: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: int
    realizations: int


def wilson_interval(successes: int, trials: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """Score-based binomial confidence interval, valid at the extremes."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must lie in [0, {trials}], got {successes}")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4 * trials * trials)) / denom
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return low, high


def sample_realization(rng: np.random.Generator, net: NetworkParams) -> Realization:
    """Uniform positions on the unit disk with exactly net.k anchor flags.

    Radial coordinates are square roots of uniform draws so that point
    density is uniform in area; anchors are k unique indices chosen at
    random, re-drawn for every realization.
    """
    radii = np.sqrt(rng.random(net.n))
    angles = rng.uniform(-np.pi, np.pi, net.n)
    l_flags = np.zeros(net.n, dtype=bool)
    l_flags[rng.choice(net.n, size=net.k, replace=False)] = True
    return Realization(radii=radii, angles=angles, l_flags=l_flags)


def sample_center_realization(rng: np.random.Generator, net: NetworkParams) -> Realization:
    """Interior-probe configuration: node 0 pinned at the origin, blind.

    The other n - 1 nodes are uniform on the disk and each is an anchor
    independently with probability k/n, mirroring the probabilistic model
    behind the closed-form bounds (the flag count is random here, unlike
    sample_realization's exactly-k draw).
    """
    radii = np.empty(net.n)
    angles = np.empty(net.n)
    radii[0] = 0.0
    angles[0] = 0.0
    radii[1:] = np.sqrt(rng.random(net.n - 1))
    angles[1:] = rng.uniform(-np.pi, np.pi, net.n - 1)
    l_flags = np.zeros(net.n, dtype=bool)
    l_flags[1:] = rng.random(net.n - 1) < (net.k / net.n)
    return Realization(radii=radii, angles=angles, l_flags=l_flags)


def _effective_ratios(
    b: float, shadow: BhatDistribution, draws: np.ndarray
) -> np.ndarray:
    """Per-draw effective coverage ratio b * 10^(-X1/10), zeroed past b_hat_max."""
    ratio = b * 10.0 ** (-draws / 10.0)
    return np.where(ratio <= shadow.b_hat_max, ratio, 0.0)


def _check_shadow_args(protocol, shadow, b, rng_needed):
    if protocol.shadow_draw != "none":
        if shadow is None:
            raise ValueError(f"shadow_draw={protocol.shadow_draw!r} requires shadow parameters")
        if not math.isclose(shadow.b_o, b, rel_tol=1e-12):
            raise ValueError(
                f"shadow.b_o = {shadow.b_o} does not match the coverage ratio b = {b}"
            )
        if rng_needed:
            raise ValueError("shadowed trials need an rng for the fading draws")


def _pair_distances_sq(realization: Realization, workspace=None):
    """Squared probe-to-anchor distances, probes in index order.

    The probes-by-anchors block reaches ~1e6 entries at n ~ 3000, where
    allocation churn dominates; passing the previous call's workspace back in
    reuses the buffers when the shape is unchanged.
    """
    flags = realization.l_flags
    x = realization.radii * np.cos(realization.angles)
    y = realization.radii * np.sin(realization.angles)
    probe_idx = np.flatnonzero(~flags)
    shape = (probe_idx.size, int(flags.sum()))
    if workspace is None or workspace[0].shape != shape:
        workspace = (np.empty(shape), np.empty(shape))
    d2, dy = workspace
    np.subtract(x[probe_idx, None], x[None, flags], out=d2)
    np.multiply(d2, d2, out=d2)
    np.subtract(y[probe_idx, None], y[None, flags], out=dy)
    np.multiply(dy, dy, out=dy)
    np.add(d2, dy, out=d2)
    return d2, probe_idx, workspace


def run_trial(
    realization: Realization,
    b: float,
    protocol: TrialProtocol = TrialProtocol(),
    shadow: BhatDistribution | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Success flag per probe for one realization.

    A probe succeeds when at least three anchors lie within its effective
    coverage radius.  For the center protocol the single probe is the domain
    origin, so anchor distances are just their radial coordinates; for
    all_nl_nodes every unflagged node is probed in index order.
    """
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"coverage ratio b must lie in [0, 1], got {b}")
    _check_shadow_args(protocol, shadow, b, rng_needed=rng is None)
    flags = realization.l_flags
    if protocol.probe == "center_node":
        anchor_dist = realization.radii[flags]
        if protocol.shadow_draw == "none":
            eff = np.array([b])
        elif protocol.shadow_draw == "per_node":
            eff = _effective_ratios(b, shadow, rng.normal(0.0, shadow.sigma1, 1))
        else:
            per_link = _effective_ratios(
                b, shadow, rng.normal(0.0, shadow.sigma1, anchor_dist.size)
            )
            return np.array([(anchor_dist <= per_link).sum() >= 3])
        return np.array([(anchor_dist <= eff[0]).sum() >= 3])
    return _all_probe_outcomes(realization, b, protocol, shadow, rng)[0]


def _all_probe_outcomes(realization, b, protocol, shadow, rng, workspace=None):
    d2, probe_idx, workspace = _pair_distances_sq(realization, workspace)
    if protocol.shadow_draw == "none":
        counts = (d2 <= b * b).sum(axis=1)
    elif protocol.shadow_draw == "per_node":
        eff = _effective_ratios(b, shadow, rng.normal(0.0, shadow.sigma1, probe_idx.size))
        counts = (d2 <= (eff**2)[:, None]).sum(axis=1)
    else:
        eff = _effective_ratios(b, shadow, rng.normal(0.0, shadow.sigma1, d2.shape))
        counts = (d2 <= eff**2).sum(axis=1)
    return counts >= 3, workspace


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def _center_chunk(args) -> tuple[int, int]:
    """Vectorised centered-probe trials; returns (successes, probes)."""
    seed, index, m, net, b, protocol, shadow = args
    rng = _chunk_rng(seed, index)
    n_other = net.n - 1
    sq_radii = rng.random((m, n_other))
    anchor = rng.random((m, n_other)) < (net.k / net.n)
    if protocol.shadow_draw == "none":
        eff_sq = np.full(m, b * b)
    elif protocol.shadow_draw == "per_node":
        eff = _effective_ratios(b, shadow, rng.normal(0.0, shadow.sigma1, m))
        eff_sq = eff * eff
    else:
        eff = _effective_ratios(b, shadow, rng.normal(0.0, shadow.sigma1, (m, n_other)))
        counts = ((sq_radii <= eff * eff) & anchor).sum(axis=1)
        return int((counts >= 3).sum()), m
    counts = ((sq_radii <= eff_sq[:, None]) & anchor).sum(axis=1)
    return int((counts >= 3).sum()), m


def _all_nodes_chunk(args) -> tuple[int, int]:
    """Field-protocol trials, one realization at a time; returns pooled counts."""
    seed, index, m, net, b, protocol, shadow = args
    rng = _chunk_rng(seed, index)
    successes = 0
    probes = 0
    workspace = None
    for _ in range(m):
        realization = sample_realization(rng, net)
        outcome, workspace = _all_probe_outcomes(
            realization, b, protocol, shadow, rng, workspace
        )
        successes += int(outcome.sum())
        probes += outcome.size
    return successes, probes


def estimate(
    net: NetworkParams,
    b: float,
    protocol: TrialProtocol = TrialProtocol(),
    shadow: BhatDistribution | None = None,
    trials: int = 1000,
    seed: int = 0,
    workers: int = 1,
) -> ProbEstimate:
    """Monte Carlo estimate of the localization probability.

    trials counts sampled realizations.  For all_nl_nodes the outcomes of
    every blind probe are pooled (the per-realization statistic is the
    localized fraction) and the realization count is reported alongside.
    The result is a pure function of (seed, trials, parameters, protocol):
    the chunked stream layout makes it independent of the worker count.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"coverage ratio b must lie in [0, 1], got {b}")
    _check_shadow_args(protocol, shadow, b, rng_needed=False)
    if protocol.probe == "all_nl_nodes" and net.k == net.n:
        raise ValueError("all_nl_nodes protocol needs at least one blind node (k < n)")

    if protocol.probe == "center_node":
        chunk_size, kernel = _center_chunk_size(net.n), _center_chunk
    else:
        chunk_size, kernel = _ALL_NODES_CHUNK, _all_nodes_chunk
    jobs = [
        (seed, i, min(chunk_size, trials - i * chunk_size), net, b, protocol, shadow)
        for i in range((trials + chunk_size - 1) // chunk_size)
    ]
    if workers == 1:
        results = [kernel(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(kernel, jobs))
    successes = sum(r[0] for r in results)
    probes = sum(r[1] for r in results)
    ci_low, ci_high = wilson_interval(successes, probes)
    return ProbEstimate(
        trials=probes,
        successes=successes,
        p_hat=successes / probes,
        ci_low=ci_low,
        ci_high=ci_high,
        seed=seed,
        realizations=trials,
    )
