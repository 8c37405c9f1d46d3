"""Experiment runner emitting deterministic CSV tables.

Verbs: `figure <name>` rebuilds one of the canned curve families as a data
table, `sweep <config.json>` runs a custom parameter grid, `threshold` and
`estimate` answer single queries.  Every table re-runs byte-identically for
the same seed: floats carry 12 significant digits, line endings are LF, the
leading comment records the semantic configuration (worker count and output
path are execution details and deliberately excluded), and row order follows
grid order regardless of any parallelism.

Exit codes: 0 success, 1 invalid configuration, 2 numerical non-convergence
or a failed figure self-check.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import product

import numpy as np

from . import __version__
from .analytic import (
    VARIANTS,
    failure_prob_approx_small,
    failure_prob_closed,
    failure_prob_sum,
    threshold_a_star,
    threshold_a_star_numeric,
    threshold_b_star,
    threshold_b_star_numeric,
)
from .model import bhat_distribution, make_network, make_shadow_model
from .montecarlo import TrialProtocol, estimate
from .numerics import NonConvergenceError
from .shadowing import METHODS, failure_prob_shadow

FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig6", "fig_shadow")
SWEEP_MODES = ("analytic", "simulate", "shadow", "threshold", "figure")

_PROTOCOLS = {"center": "center_node", "all": "all_nl_nodes"}
_SHADOW_FIELDS = ("p0_dbm", "gamma_dbm", "d0", "n_p", "sigma_s", "R")


class CliError(Exception):
    """Invalid configuration or arguments (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # map argparse's own failures onto exit code 1
        raise CliError(message)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_table(out_path, config, header, rows, quiet):
    lines = [f"# locprob {__version__} config={json.dumps(config, sort_keys=True, separators=(',', ':'))}"]
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(row.get(h)) for h in header) for row in rows)
    text = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if not quiet:
            print(f"wrote {len(rows)} rows to {out_path}", file=sys.stderr)


def _network_for(n: int, a: float):
    """Integer anchor count closest to the requested blind fraction."""
    k = round(n * (1.0 - a))
    return make_network(n, k)


def _cell_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(index,)).generate_state(1)[0])


# ---------------------------------------------------------------------------
# figures

def _geometric_grid(j_lo: int, j_hi: int) -> list[float]:
    """The doubling grid 2^(j/22) - 1 used for both coverage and blind-fraction sweeps."""
    return [2.0 ** (j / 22.0) - 1.0 for j in range(j_lo, j_hi + 1)]


def _fig1(trials, seed, variant, workers):
    n = 300
    rows = []
    for b in _geometric_grid(3, 20):
        for i in range(51):
            net = _network_for(n, i / 50.0)
            res = failure_prob_closed(net, b, variant)
            rows.append(
                {"n": n, "k": net.k, "a": net.a, "b": b, "p_f": res.p_f,
                 "p_loc": res.p_loc, "method": res.method, "variant": variant}
            )
    return ["n", "k", "a", "b", "p_f", "p_loc", "method", "variant"], rows


def _fig2(trials, seed, variant, workers):
    n = 300
    rows = []
    for i in range(159):
        b = 0.085 + 0.005 * i
        rows.append({"n": n, "b": b, "a_star": threshold_a_star(n, b)})
    return ["n", "b", "a_star"], rows


def _fig3(trials, seed, variant, workers):
    n = 300
    rows = []
    for a in _geometric_grid(1, 20):
        net = _network_for(n, a)
        for i in range(51):
            b = i / 50.0
            res = failure_prob_closed(net, b, variant)
            rows.append(
                {"n": n, "k": net.k, "a": net.a, "b": b, "p_f": res.p_f,
                 "p_loc": res.p_loc, "method": res.method, "variant": variant}
            )
    return ["n", "k", "a", "b", "p_f", "p_loc", "method", "variant"], rows


def _fig4(trials, seed, variant, workers):
    n = 300
    rows = []
    for i in range(20):
        a = 0.05 * i
        exact = threshold_b_star(n, a, form="exact")
        approx = threshold_b_star(n, a, form="large_n")
        fd = threshold_b_star_numeric(n, a, variant)
        rows.append(
            {"n": n, "a": a, "b_star_exact": exact, "b_star_large_n": approx,
             "b_star_fd": fd, "gap_exact_fd": exact - fd}
        )
    return ["n", "a", "b_star_exact", "b_star_large_n", "b_star_fd", "gap_exact_fd"], rows


def _fig6(trials, seed, variant, workers):
    b = 0.05
    protocol = TrialProtocol(probe="all_nl_nodes")
    header = ["n", "k", "a", "b", "p_loc_theory", "p_loc_sim", "trials",
              "successes", "ci_low", "ci_high", "realizations", "seed", "protocol"]
    rows = []
    cell = 0
    for n in (500, 1000, 3000):
        for j in range(1, 12):
            net = _network_for(n, 0.08 * j)
            theory = failure_prob_closed(net, b, variant)
            cell_seed = _cell_seed(seed, cell)
            cell += 1
            sim = estimate(net, b, protocol, trials=trials, seed=cell_seed, workers=workers)
            rows.append(
                {"n": n, "k": net.k, "a": net.a, "b": b, "p_loc_theory": theory.p_loc,
                 "p_loc_sim": sim.p_hat, "trials": sim.trials, "successes": sim.successes,
                 "ci_low": sim.ci_low, "ci_high": sim.ci_high,
                 "realizations": sim.realizations, "seed": cell_seed,
                 "protocol": protocol.probe}
            )
    return header, rows


def _fig_shadow(trials, seed, variant, workers):
    model = make_shadow_model(
        p0_dbm=0.0, gamma_dbm=-80.0, d0=0.1, n_p=3.5, sigma_s=12.0, R=40.0
    )
    n = 50
    header = ["n", "k", "a", "b_o", "sigma1", "b_hat_max", "zero_mass",
              "p_loc_shadow", "p_loc_noshadow", "method", "variant"]
    rows = []
    # the worked-example fraction (a = 0.8) and the captioned one (a = 0.2)
    for k in (10, 40):
        net = make_network(n, k)
        for i in range(1, 48):
            b_o = 0.01 * i
            dist = bhat_distribution(b_o, model.sigma1, model.b_hat_max)
            shadowed = failure_prob_shadow(net, dist, "integrate_conditional", variant)
            plain = failure_prob_closed(net, b_o, variant)
            rows.append(
                {"n": n, "k": k, "a": net.a, "b_o": b_o, "sigma1": dist.sigma1,
                 "b_hat_max": dist.b_hat_max, "zero_mass": dist.zero_mass,
                 "p_loc_shadow": shadowed.p_loc, "p_loc_noshadow": plain.p_loc,
                 "method": shadowed.method, "variant": variant}
            )
    return header, rows


_FIGURE_BUILDERS = {
    "fig1": _fig1, "fig2": _fig2, "fig3": _fig3,
    "fig4": _fig4, "fig6": _fig6, "fig_shadow": _fig_shadow,
}


def build_figure(name, trials=1000, seed=0, variant="corrected", workers=1):
    """Header and rows for one canned figure table."""
    if name not in FIGURES:
        raise CliError(f"unknown figure {name!r}, expected one of {FIGURES}")
    if variant not in VARIANTS:
        raise CliError(f"invalid value for field 'variant': {variant!r}")
    header, rows = _FIGURE_BUILDERS[name](trials, seed, variant, workers)
    return header, rows


def _non_increasing(values, slack=0.0):
    return all(y <= x + slack for x, y in zip(values, values[1:]))


def _non_decreasing(values, slack=0.0):
    return all(y >= x - slack for x, y in zip(values, values[1:]))


def check_figure(name, rows) -> list[str]:
    """Post-emission self-test of the caption-level monotonicity claims.

    Only deterministic (theory) columns are checked; Monte Carlo columns are
    left to the statistical tests.
    """
    problems = []
    if name in ("fig1", "fig3"):
        by_b, by_a = {}, {}
        for row in rows:
            by_b.setdefault(row["b"], []).append((row["a"], row["p_loc"]))
            by_a.setdefault(row["a"], []).append((row["b"], row["p_loc"]))
        for b, pts in by_b.items():
            if not _non_increasing([p for _, p in sorted(pts)]):
                problems.append(f"{name}: p_loc not non-increasing in a at b={b:.6g}")
        for a, pts in by_a.items():
            if not _non_decreasing([p for _, p in sorted(pts)]):
                problems.append(f"{name}: p_loc not non-decreasing in b at a={a:.6g}")
    elif name == "fig2":
        if not _non_decreasing([row["a_star"] for row in rows]):
            problems.append("fig2: a_star not non-decreasing in b")
    elif name == "fig4":
        if not _non_decreasing([row["b_star_exact"] for row in rows]):
            problems.append("fig4: b_star not non-decreasing in a")
    elif name == "fig6":
        by_n = {}
        for row in rows:
            by_n.setdefault(row["n"], []).append((row["a"], row["p_loc_theory"]))
        for n, pts in by_n.items():
            if not _non_increasing([p for _, p in sorted(pts)]):
                problems.append(f"fig6: theory p_loc not non-increasing in a at n={n}")
    elif name == "fig_shadow":
        by_k = {}
        for row in rows:
            by_k.setdefault(row["k"], []).append(
                (row["b_o"], row["p_loc_noshadow"], row["p_loc_shadow"])
            )
        for k, pts in by_k.items():
            pts.sort()
            if not _non_decreasing([p for _, p, _ in pts]):
                problems.append(f"fig_shadow: unshadowed p_loc not non-decreasing (k={k})")
            diffs = [ps - pn for _, pn, ps in pts]
            if not (diffs[0] > 0.0 > diffs[-1]):
                problems.append(f"fig_shadow: no gain-to-loss crossing across b_o (k={k})")
    return problems


# ---------------------------------------------------------------------------
# sweep configs

def _listify(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _require(config, field, types, check=None, describe=""):
    if field not in config:
        raise CliError(f"missing required field '{field}'")
    values = _listify(config[field])
    if not values:
        raise CliError(f"empty grid: field '{field}' has no values")
    for v in values:
        if not isinstance(v, types) or isinstance(v, bool) or (check and not check(v)):
            raise CliError(f"invalid value for field '{field}': {v!r} {describe}".rstrip())
    return values


def _networks_from(config, n_values):
    if "k" in config and "a" in config:
        raise CliError("give either field 'k' or field 'a', not both")
    nets = []
    if "k" in config:
        k_values = _require(config, "k", int, lambda v: v >= 0, "(must be a non-negative integer)")
        for n, k in product(n_values, k_values):
            if k > n:
                raise CliError(f"invalid value for field 'k': {k} (exceeds n={n})")
            nets.append(make_network(n, k))
    else:
        a_values = _require(config, "a", (int, float), lambda v: 0.0 <= v <= 1.0, "(must lie in [0, 1])")
        nets.extend(_network_for(n, float(a)) for n, a in product(n_values, a_values))
    return nets


def _shadow_model_from(config):
    missing = [f for f in _SHADOW_FIELDS if f not in config]
    if missing:
        raise CliError(f"missing required field '{missing[0]}' (shadowing parameters)")
    vals = {}
    for f in _SHADOW_FIELDS:
        v = config[f]
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise CliError(f"invalid value for field '{f}': {v!r} (must be a number)")
        vals[f] = float(v)
    try:
        return make_shadow_model(**vals)
    except ValueError as exc:
        raise CliError(f"invalid shadowing parameters: {exc}") from exc


def run_sweep(config: dict):
    """Header and rows for a JSON-configured sweep (grid in declaration order)."""
    mode = config.get("mode")
    if mode not in SWEEP_MODES:
        raise CliError(f"invalid value for field 'mode': {mode!r} (expected one of {SWEEP_MODES})")
    variant = config.get("variant", "corrected")
    if variant not in VARIANTS:
        raise CliError(f"invalid value for field 'variant': {variant!r}")

    if mode == "figure":
        name = config.get("figure")
        if name not in FIGURES:
            raise CliError(f"invalid value for field 'figure': {name!r} (expected one of {FIGURES})")
        return build_figure(
            name,
            trials=config.get("trials", 1000),
            seed=config.get("seed", 0),
            variant=variant,
            workers=config.get("workers", 1),
        )

    n_values = _require(config, "n", int, lambda v: v >= 4, "(must be an integer >= 4)")

    if mode == "threshold":
        rows = []
        if "b" in config:
            for n in n_values:
                for b in _require(config, "b", (int, float), lambda v: 0.0 < v <= 1.0, "(must lie in (0, 1])"):
                    a_star = threshold_a_star(n, float(b))
                    fd = threshold_a_star_numeric(n, float(b), variant) if a_star is not None else None
                    rows.append({"n": n, "b": float(b), "a_star": a_star, "a_star_fd": fd,
                                 "gap": None if a_star is None else a_star - fd})
            return ["n", "b", "a_star", "a_star_fd", "gap"], rows
        if "a" in config:
            for n in n_values:
                for a in _require(config, "a", (int, float), lambda v: 0.0 <= v < 1.0, "(must lie in [0, 1))"):
                    exact = threshold_b_star(n, float(a), form="exact")
                    approx = threshold_b_star(n, float(a), form="large_n")
                    fd = threshold_b_star_numeric(n, float(a), variant)
                    rows.append({"n": n, "a": float(a), "b_star_exact": exact,
                                 "b_star_large_n": approx, "b_star_fd": fd,
                                 "gap_exact_fd": exact - fd})
            return ["n", "a", "b_star_exact", "b_star_large_n", "b_star_fd", "gap_exact_fd"], rows
        raise CliError("missing required field 'b' or 'a' for threshold mode")

    nets = _networks_from(config, n_values)

    if mode == "analytic":
        method = config.get("method", "closed")
        if method not in ("closed", "sum", "approx_small"):
            raise CliError(f"invalid value for field 'method': {method!r}")
        b_values = _require(config, "b", (int, float), lambda v: 0.0 <= v <= 1.0, "(must lie in [0, 1])")
        rows = []
        for net, b in product(nets, b_values):
            if method == "closed":
                res = failure_prob_closed(net, float(b), variant)
            elif method == "sum":
                res = failure_prob_sum(net, float(b))
            else:
                res = failure_prob_approx_small(net, float(b))
            rows.append({"n": net.n, "k": net.k, "a": net.a, "b": float(b),
                         "p_f": res.p_f, "p_loc": res.p_loc,
                         "method": res.method, "variant": res.variant})
        return ["n", "k", "a", "b", "p_f", "p_loc", "method", "variant"], rows

    if mode == "shadow":
        method = config.get("method", "integrate_conditional")
        if method not in METHODS:
            raise CliError(f"invalid value for field 'method': {method!r} (expected one of {METHODS})")
        model = _shadow_model_from(config)
        b_values = _require(config, "b_o", (int, float), lambda v: 0.0 < v <= 1.0, "(must lie in (0, 1])")
        rows = []
        for net, b_o in product(nets, b_values):
            dist = bhat_distribution(float(b_o), model.sigma1, model.b_hat_max)
            res = failure_prob_shadow(net, dist, method, variant)
            rows.append({"n": net.n, "k": net.k, "a": net.a, "b_o": float(b_o),
                         "sigma1": dist.sigma1, "b_hat_max": dist.b_hat_max,
                         "zero_mass": dist.zero_mass, "p_f": res.p_f,
                         "p_loc": res.p_loc, "method": method, "variant": variant})
        return ["n", "k", "a", "b_o", "sigma1", "b_hat_max", "zero_mass",
                "p_f", "p_loc", "method", "variant"], rows

    # mode == "simulate"
    trials = config.get("trials", 1000)
    if not isinstance(trials, int) or isinstance(trials, bool) or trials < 1:
        raise CliError(f"invalid value for field 'trials': {trials!r} (must be a positive integer)")
    seed = config.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise CliError(f"invalid value for field 'seed': {seed!r} (must be a non-negative integer)")
    protocol_name = config.get("protocol", "center")
    if protocol_name not in _PROTOCOLS:
        raise CliError(f"invalid value for field 'protocol': {protocol_name!r} (expected 'center' or 'all')")
    workers = config.get("workers", 1)
    if not isinstance(workers, int) or isinstance(workers, bool) or workers < 1:
        raise CliError(f"invalid value for field 'workers': {workers!r} (must be a positive integer)")
    shadowed = any(f in config for f in _SHADOW_FIELDS)
    model = _shadow_model_from(config) if shadowed else None
    draw = config.get("shadow_draw", "per_node" if shadowed else "none")
    if shadowed and draw not in ("per_node", "per_link"):
        raise CliError(f"invalid value for field 'shadow_draw': {draw!r}")
    protocol = TrialProtocol(probe=_PROTOCOLS[protocol_name], shadow_draw=draw)
    b_values = _require(config, "b", (int, float), lambda v: 0.0 <= v <= 1.0, "(must lie in [0, 1])")
    header = ["n", "k", "a", "b", "p_f", "p_loc", "trials", "successes",
              "ci_low", "ci_high", "realizations", "seed", "protocol"]
    if shadowed:
        header[4:4] = ["sigma1", "b_hat_max", "zero_mass"]
    rows = []
    for idx, (net, b) in enumerate(product(nets, b_values)):
        cell_seed = _cell_seed(seed, idx)
        dist = bhat_distribution(float(b), model.sigma1, model.b_hat_max) if shadowed else None
        sim = estimate(net, float(b), protocol, shadow=dist, trials=trials,
                       seed=cell_seed, workers=workers)
        row = {"n": net.n, "k": net.k, "a": net.a, "b": float(b),
               "p_f": 1.0 - sim.p_hat, "p_loc": sim.p_hat, "trials": sim.trials,
               "successes": sim.successes, "ci_low": sim.ci_low,
               "ci_high": sim.ci_high, "realizations": sim.realizations,
               "seed": cell_seed, "protocol": protocol.probe}
        if shadowed:
            row.update({"sigma1": dist.sigma1, "b_hat_max": dist.b_hat_max,
                        "zero_mass": dist.zero_mass})
        rows.append(row)
    return header, rows


# ---------------------------------------------------------------------------
# verbs

def _cmd_figure(args):
    header, rows = build_figure(args.name, args.trials, args.seed, args.variant, args.workers)
    config = {"figure": args.name, "trials": args.trials, "seed": args.seed,
              "variant": args.variant}
    _write_table(args.out, config, header, rows, args.quiet)
    problems = check_figure(args.name, rows)
    if problems:
        for p in problems:
            print(f"self-check FAILED: {p}", file=sys.stderr)
        return 2
    if not args.quiet:
        print(f"self-check ok: {args.name}", file=sys.stderr)
    return 0


def _cmd_sweep(args):
    try:
        with open(args.config, encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise CliError("config must be a JSON object")
    for flag in ("trials", "seed", "variant", "workers", "protocol"):
        value = getattr(args, flag)
        if value is not None:
            config[flag] = value
    header, rows = run_sweep(config)
    out = args.out if args.out is not None else config.get("out")
    emitted = {k: v for k, v in config.items() if k not in ("out", "workers")}
    _write_table(out, emitted, header, rows, args.quiet)
    return 0


def _cmd_threshold(args):
    if (args.b is None) == (args.a is None):
        raise CliError("give exactly one of --b (threshold on a) or --a (threshold on b)")
    n = args.n
    if args.b is not None:
        a_star = threshold_a_star(n, args.b)
        fd = threshold_a_star_numeric(n, args.b, args.variant) if a_star is not None else None
        header = ["n", "b", "a_star", "a_star_fd", "gap"]
        rows = [{"n": n, "b": args.b, "a_star": a_star, "a_star_fd": fd,
                 "gap": None if a_star is None else a_star - fd}]
        config = {"mode": "threshold", "n": n, "b": args.b, "variant": args.variant}
    else:
        exact = threshold_b_star(n, args.a, form="exact")
        approx = threshold_b_star(n, args.a, form="large_n")
        fd = threshold_b_star_numeric(n, args.a, args.variant)
        header = ["n", "a", "b_star_exact", "b_star_large_n", "b_star_fd", "gap_exact_fd"]
        rows = [{"n": n, "a": args.a, "b_star_exact": exact, "b_star_large_n": approx,
                 "b_star_fd": fd, "gap_exact_fd": exact - fd}]
        config = {"mode": "threshold", "n": n, "a": args.a, "variant": args.variant}
    _write_table(args.out, config, header, rows, args.quiet)
    return 0


def _cmd_estimate(args):
    if (args.k is None) == (args.a is None):
        raise CliError("give exactly one of --k or --a")
    net = make_network(args.n, args.k) if args.k is not None else _network_for(args.n, args.a)
    config = {"mode": "simulate", "n": net.n, "k": net.k, "b": args.b,
              "trials": args.trials, "seed": args.seed, "protocol": args.protocol}
    shadow_given = [
        f for f in ("sigma_s", "n_p", "gamma_dbm", "p0_dbm", "d0", "R")
        if getattr(args, f) is not None
    ]
    dist = None
    draw = "none"
    if shadow_given:
        cfg = {f: getattr(args, f) for f in _SHADOW_FIELDS}
        missing = [f for f, v in cfg.items() if v is None]
        if missing:
            raise CliError(f"shadowed estimate needs --{missing[0].replace('_', '-')}")
        model = _shadow_model_from(cfg)
        dist = bhat_distribution(args.b, model.sigma1, model.b_hat_max)
        draw = args.shadow_draw
        config.update(cfg)
        config["shadow_draw"] = draw
    protocol = TrialProtocol(probe=_PROTOCOLS[args.protocol], shadow_draw=draw)
    sim = estimate(net, args.b, protocol, shadow=dist, trials=args.trials,
                   seed=args.seed, workers=args.workers)
    header = ["n", "k", "a", "b", "p_f", "p_loc", "trials", "successes",
              "ci_low", "ci_high", "realizations", "seed", "protocol"]
    row = {"n": net.n, "k": net.k, "a": net.a, "b": args.b, "p_f": 1.0 - sim.p_hat,
           "p_loc": sim.p_hat, "trials": sim.trials, "successes": sim.successes,
           "ci_low": sim.ci_low, "ci_high": sim.ci_high,
           "realizations": sim.realizations, "seed": sim.seed,
           "protocol": protocol.probe}
    if dist is not None:
        header[4:4] = ["sigma1", "b_hat_max", "zero_mass"]
        row.update({"sigma1": dist.sigma1, "b_hat_max": dist.b_hat_max,
                    "zero_mass": dist.zero_mass})
    _write_table(args.out, config, header, [row], args.quiet)
    return 0


def _add_common(parser: _Parser, defer_to_config: bool = False) -> None:
    """Shared flags.  With defer_to_config the value-bearing defaults become
    None so a sweep config file wins unless the flag is given explicitly."""
    dflt = (lambda v: None) if defer_to_config else (lambda v: v)
    parser.add_argument("--seed", type=int, default=dflt(0), help="master seed (default 0)")
    parser.add_argument("--trials", type=int, default=dflt(1000),
                        help="Monte Carlo realizations per point (default 1000)")
    parser.add_argument("--out", default=None, help="output CSV path (default stdout)")
    parser.add_argument("--variant", choices=VARIANTS, default=dflt("corrected"),
                        help="closed-form coefficient variant")
    parser.add_argument("--protocol", choices=sorted(_PROTOCOLS), default=dflt("center"),
                        help="probe protocol for simulations")
    parser.add_argument("--workers", type=int, default=dflt(1),
                        help="parallel workers (results are worker-count independent)")
    parser.add_argument("--quiet", action="store_true", help="suppress status messages")


def _build_parser() -> _Parser:
    parser = _Parser(prog="locprob", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p_fig = sub.add_parser("figure", help="emit a canned figure table")
    _add_common(p_fig)
    p_fig.add_argument("name", choices=FIGURES)
    p_fig.set_defaults(func=_cmd_figure)

    p_sweep = sub.add_parser("sweep", help="run a JSON-configured sweep")
    _add_common(p_sweep, defer_to_config=True)
    p_sweep.add_argument("config", help="path to the JSON sweep configuration")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_thr = sub.add_parser("threshold", help="transition-threshold query")
    _add_common(p_thr)
    p_thr.add_argument("--n", type=int, required=True)
    p_thr.add_argument("--b", type=float, default=None, help="coverage ratio (query a*)")
    p_thr.add_argument("--a", type=float, default=None, help="blind fraction (query b*)")
    p_thr.set_defaults(func=_cmd_threshold)

    p_est = sub.add_parser("estimate", help="Monte Carlo estimate query")
    _add_common(p_est)
    p_est.add_argument("--n", type=int, required=True)
    p_est.add_argument("--k", type=int, default=None, help="anchor count")
    p_est.add_argument("--a", type=float, default=None, help="blind fraction (alternative to --k)")
    p_est.add_argument("--b", type=float, required=True, help="coverage ratio (b_o when shadowed)")
    p_est.add_argument("--sigma-s", dest="sigma_s", type=float, default=None)
    p_est.add_argument("--n-p", dest="n_p", type=float, default=None)
    p_est.add_argument("--gamma-dbm", dest="gamma_dbm", type=float, default=None)
    p_est.add_argument("--p0-dbm", dest="p0_dbm", type=float, default=None)
    p_est.add_argument("--d0", type=float, default=None)
    p_est.add_argument("--R", type=float, default=None)
    p_est.add_argument("--shadow-draw", choices=("per_node", "per_link"), default="per_node")
    p_est.set_defaults(func=_cmd_estimate)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NonConvergenceError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
