"""Scenario files, reproduction profiles and the command-line front end.

Scenarios are TOML with sections ``[channel] [pathloss] [density] [weights]
[policy] [sim] [grid] [cost]``; ``profile = "canonical"`` fills every default
of the reference numerical scenario.  Precedence is flag > file > profile,
except that the ``ERLANG_RAIN_SEED`` environment variable, when set, wins for
the seed.  Every CSV emitted starts with a comment line carrying the fully
resolved configuration so that reruns are exact.

Exit codes: 0 success, 1 usage or configuration error, 2 infeasible model,
3 statistical validation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .geometry import AtomicDensity, PathLoss, RadialDensity, WeightFunction
from .loss_model import (
    ChannelParams,
    DiskPolicy,
    ReceptionEvaluator,
    p_free,
    reception_curve,
)
from .policies import (
    cod_policy,
    maxmin_max_radius,
    maxmin_policy,
    naive_policy,
    waterfill_policy,
)
from .cost import CostParams, cost_sweep
from .sim import (
    SimConfig,
    estimate_conditional_laplace,
    estimate_rho,
    generate_rain,
    idle_gap_test,
    pool_results,
    run_loss_system,
)

__all__ = ["Scenario", "load_scenario", "scenario_to_toml", "main"]

SEED_ENV_VAR = "ERLANG_RAIN_SEED"

# The reference numerical scenario.  The per-sensor rate and packet duration
# realise the fixed traffic product lambda_e * b = 1.25e-4.
_CANONICAL = {
    "target_d": 0.75,
    "r_min": 0.1,
    "outputs": ".",
    "channel": {
        "p_bar": 1.0,
        "noise_w": 1e-13,
        "gamma": 1.0,
        "b": 1.25e-3,
        "lambda_e": 0.1,
    },
    "pathloss": {"kappa": 10**-5.5, "eta": 3.3},
    "density": {"type": "uniform", "lambda_s": 10.0, "support_radius": 50.0},
    "weights": {"type": "constant", "value": 1.0},
    "policy": {"kind": "disk", "radius": 20.0, "bound": "lower"},
    "sim": {
        "duration": 50.0,
        "warmup": 0.05,
        "domain_radius": 50.0,
        "seed": 20260808,
        "annulus_bins": 25,
        "replications": 8,
    },
    "grid": {"r_lo": 0.5, "r_hi": 45.0, "n": 90},
    "cost": {
        "c_s": 1.0,
        "c_c": 2.0,
        "lambda_s_grid": [0.0, 1.0, 2.0, 5.0, 10.0],
        "ratio_grid": [1.0, 2.0, 5.0, 20.0, 100.0],
    },
}

_PROFILES = {"canonical": _CANONICAL}

# Section keys that are legal but carry no profile default (alternative
# density and weight representations).
_OPTIONAL_KEYS = {
    "density": {"points", "breaks", "values"},
    "weights": {"breaks", "values"},
}


class ScenarioError(ValueError):
    """Configuration that parses but violates the scenario grammar."""


def _merge(base, override, path=""):
    out = dict(base)
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            if key in _OPTIONAL_KEYS.get(path, ()):
                out[key] = value
                continue
            raise ScenarioError(f"unknown key '{where}'")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ScenarioError(f"'{where}' must be a section")
            out[key] = _merge(base[key], value, where)
        else:
            out[key] = value
    return out


@dataclass(eq=False)
class Scenario:
    """A fully resolved run description."""

    channel: ChannelParams
    pathloss: PathLoss
    density: object
    weights: WeightFunction
    policy_kind: str
    policy_radius: float
    policy_bound: str
    target_d: float
    r_min: float
    outputs: str
    sim: SimConfig
    replications: int
    grid_lo: float
    grid_hi: float
    grid_n: int
    cost: CostParams
    lambda_s_grid: tuple
    ratio_grid: tuple
    raw: dict

    def resolved(self) -> dict:
        """Plain-data view of the configuration (manifest and serialisation)."""
        return json.loads(json.dumps(self.raw))

    def __eq__(self, other):
        return isinstance(other, Scenario) and self.raw == other.raw


def _build_density(section):
    kind = section.get("type", "uniform")
    if kind == "uniform":
        return RadialDensity.uniform(section["lambda_s"], section["support_radius"])
    if kind == "pieces":
        return RadialDensity(np.asarray(section["breaks"]), np.asarray(section["values"]))
    if kind == "atomic":
        pts = np.asarray(section["points"], dtype=float)
        return AtomicDensity(pts[:, :2], pts[:, 2])
    raise ScenarioError(f"unknown density type '{kind}'")


def _build_weights(section):
    kind = section.get("type", "constant")
    if kind == "constant":
        return WeightFunction.constant(section["value"])
    if kind == "pieces":
        return WeightFunction(np.asarray(section["breaks"]), np.asarray(section["values"]))
    raise ScenarioError(f"unknown weights type '{kind}'")


def load_scenario(path=None, *, text=None, overrides=None) -> Scenario:
    """Parse, merge with the profile defaults and validate a scenario."""
    if text is None:
        text = "" if path is None else open(path, "rb").read().decode()
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"config parse error: {exc}") from exc

    profile = data.pop("profile", "canonical")
    if profile not in _PROFILES:
        raise ScenarioError(f"unknown profile '{profile}'")
    merged = _merge(_PROFILES[profile], data)
    for dotted, value in (overrides or {}).items():
        section = merged
        *parents, leaf = dotted.split(".")
        for p in parents:
            if p not in section or not isinstance(section[p], dict):
                raise ScenarioError(f"unknown key '{dotted}'")
            section = section[p]
        if leaf not in section:
            raise ScenarioError(f"unknown key '{dotted}'")
        section[leaf] = value
    if SEED_ENV_VAR in os.environ:
        merged["sim"]["seed"] = int(os.environ[SEED_ENV_VAR])

    channel = ChannelParams(**merged["channel"])
    pathloss = PathLoss(**merged["pathloss"])
    density = _build_density(merged["density"])
    weights = _build_weights(merged["weights"])
    sim_section = merged["sim"]
    sim_cfg = SimConfig(
        duration=sim_section["duration"],
        warmup=sim_section["warmup"],
        domain_radius=sim_section["domain_radius"],
        seed=int(sim_section["seed"]),
        annulus_bins=int(sim_section["annulus_bins"]),
    )
    cost_section = merged["cost"]
    cost = CostParams(cost_section["c_s"], cost_section["c_c"], merged["target_d"])

    policy = merged["policy"]
    if policy["kind"] not in ("naive", "disk", "maxmin", "waterfill", "cod"):
        raise ScenarioError(f"unknown policy kind '{policy['kind']}'")
    if policy["bound"] not in ("lower", "upper"):
        raise ScenarioError("policy bound must be 'lower' or 'upper'")

    grid = merged["grid"]
    support = density.support_radius
    if grid["r_hi"] > support * (1 + 1e-12):
        raise ScenarioError("grid r_hi must lie within the sensing domain")
    if policy["kind"] == "disk" and policy["radius"] > support * (1 + 1e-12):
        raise ScenarioError("policy radius must lie within the sensing domain")
    if sim_cfg.domain_radius < support * (1 - 1e-12):
        raise ScenarioError("sim domain_radius must cover the sensing domain")

    return Scenario(
        channel=channel,
        pathloss=pathloss,
        density=density,
        weights=weights,
        policy_kind=policy["kind"],
        policy_radius=float(policy["radius"]),
        policy_bound=policy["bound"],
        target_d=float(merged["target_d"]),
        r_min=float(merged["r_min"]),
        outputs=str(merged["outputs"]),
        sim=sim_cfg,
        replications=int(sim_section["replications"]),
        grid_lo=float(grid["r_lo"]),
        grid_hi=float(grid["r_hi"]),
        grid_n=int(grid["n"]),
        cost=cost,
        lambda_s_grid=tuple(float(x) for x in cost_section["lambda_s_grid"]),
        ratio_grid=tuple(float(x) for x in cost_section["ratio_grid"]),
        raw=merged,
    )


def _toml_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialise {value!r}")


def scenario_to_toml(scenario: Scenario) -> str:
    """Serialise the resolved configuration; loading it back is an identity."""
    data = scenario.resolved()
    lines = []
    for key, value in data.items():
        if not isinstance(value, dict):
            lines.append(f"{key} = {_toml_value(value)}")
    for section, body in data.items():
        if isinstance(body, dict):
            lines.append("")
            lines.append(f"[{section}]")
            for key, value in body.items():
                lines.append(f"{key} = {_toml_value(value)}")
    return "\n".join(lines) + "\n"


def _manifest_line(scenario: Scenario, command: str) -> str:
    payload = dict(scenario.resolved())
    payload["command"] = command
    payload["seed"] = scenario.sim.seed
    return "# " + json.dumps(payload, sort_keys=True)


def resolve_policy(scenario: Scenario):
    """Build the scenario's admission policy.

    Returns ``(policy, characteristic_radius, deployment_density)``; the
    radius solvers size their own deployment, so the density they were solved
    on is returned alongside.
    """
    ch, pl, dens = scenario.channel, scenario.pathloss, scenario.density
    kind = scenario.policy_kind
    if kind == "naive":
        policy = naive_policy(ch, pl)
        return policy, policy.radius, dens
    if kind == "disk":
        return DiskPolicy(scenario.policy_radius), scenario.policy_radius, dens
    if kind == "maxmin":
        radius = maxmin_max_radius(
            scenario.target_d, dens, ch, pl, scenario.policy_bound, r_min=scenario.r_min
        )
        truncated = dens.truncated(radius)
        solution = maxmin_policy(
            scenario.weights, radius, truncated, ch, pl, scenario.policy_bound
        )
        return solution.policy, radius, truncated
    if kind == "waterfill":
        solution = waterfill_policy(
            scenario.weights, dens.support_radius, dens, ch, pl, scenario.policy_bound
        )
        radius = solution.region[-1][1] if solution.region else 0.0
        return solution.policy, radius, dens
    if kind == "cod":
        policy, radius = cod_policy(
            scenario.target_d, dens, ch, pl, r_min=scenario.r_min
        )
        return policy, radius, dens.truncated(radius)
    raise ScenarioError(f"unknown policy kind '{kind}'")


def _radius_grid(scenario: Scenario, upper=None):
    hi = scenario.grid_hi if upper is None else min(upper, scenario.grid_hi)
    lo = min(scenario.grid_lo, hi / 2)
    return np.linspace(lo, hi, scenario.grid_n)


def cmd_prec(scenario: Scenario, out=sys.stdout) -> int:
    """Reception probability and its bounds over the radius grid."""
    policy, _, dens = resolve_policy(scenario)
    radii = _radius_grid(scenario)
    curve = reception_curve(radii, policy, dens, scenario.channel, scenario.pathloss)
    out.write(_manifest_line(scenario, "prec") + "\n")
    out.write("r,p_rec,p_rec_lower,p_rec_upper\n")
    for i, r in enumerate(radii):
        out.write(
            "%.10g,%.10g,%.10g,%.10g\n"
            % (r, curve.p_rec[i], curve.p_rec_lower[i], curve.p_rec_upper[i])
        )
    return 0


def cmd_policy(scenario: Scenario, kind=None, policy_out=sys.stdout, rho_out=None, summary_out=sys.stderr) -> int:
    """Admission function and exact information-density profile."""
    if kind is not None:
        scenario = load_scenario(
            text=scenario_to_toml(scenario), overrides={"policy.kind": kind}
        )
    policy, radius, dens = resolve_policy(scenario)
    radii = _radius_grid(scenario, upper=dens.support_radius)
    curve = reception_curve(radii, policy, dens, scenario.channel, scenario.pathloss)
    policy_out.write(_manifest_line(scenario, f"policy {scenario.policy_kind}") + "\n")
    policy_out.write("r,d\n")
    d_vals = np.asarray(policy(radii), dtype=float)
    for i, r in enumerate(radii):
        policy_out.write("%.10g,%.10g\n" % (r, d_vals[i]))
    rho_out = rho_out or policy_out
    rho_out.write(_manifest_line(scenario, f"policy {scenario.policy_kind} rho") + "\n")
    rho_out.write("r,rho,rho_lower,rho_upper\n")
    for i, r in enumerate(radii):
        rho_out.write(
            "%.10g,%.10g,%.10g,%.10g\n"
            % (r, curve.rho[i], curve.rho_lower[i], curve.rho_upper[i])
        )
    summary_out.write(
        f"policy {scenario.policy_kind}: characteristic radius {radius:.6g} m\n"
    )
    return 0


def cmd_cost(scenario: Scenario, sweep_out=sys.stdout, gain_out=None, summary_out=sys.stderr) -> int:
    """Sensor/head sweep and cost-gain curves."""
    curve = cost_sweep(
        list(scenario.lambda_s_grid),
        scenario.cost,
        scenario.channel,
        scenario.pathloss,
        ratio_grid=list(scenario.ratio_grid),
    )
    sweep_out.write(_manifest_line(scenario, "cost sweep") + "\n")
    sweep_out.write("lambda_s,lambda_c,cost\n")
    for i in range(curve.lambda_s.size):
        sweep_out.write(
            "%.10g,%.10g,%.10g\n" % (curve.lambda_s[i], curve.lambda_c[i], curve.cost[i])
        )
    gain_out = gain_out or sweep_out
    gain_out.write(_manifest_line(scenario, "cost gain") + "\n")
    gain_out.write("ratio,gain,gain_naive\n")
    for i in range(curve.ratios.size):
        gain_out.write(
            "%.10g,%.10g,%.10g\n" % (curve.ratios[i], curve.gain[i], curve.gain_naive[i])
        )
    ls, lc, c = curve.optimum
    summary_out.write(f"cost optimum: lambda_s={ls:.6g} lambda_c={lc:.6g} cost={c:.6g}\n")
    return 0


def _bin_average(fn, lo, hi, n=33):
    """Average of fn over an annulus, weighted by the radial area element."""
    r = np.linspace(max(lo, 1e-9), hi, n)
    vals = np.atleast_1d(fn(r))
    return float(np.trapezoid(vals * r, r) / np.trapezoid(r, r))


def cmd_validate(scenario: Scenario, replications=None, self_test=False, out=sys.stdout) -> int:
    """Monte Carlo cross-validation of every closed form, with z-scores.

    All comparisons use null-hypothesis standard errors (the analytic value
    and, for the Laplace checks, the analytic second moment).  ``self_test``
    perturbs the analytic SINR threshold to prove the harness can fail.
    """
    reps = scenario.replications if replications is None else int(replications)
    ch, pl, dens = scenario.channel, scenario.pathloss, scenario.density
    policy, _, dens = resolve_policy(scenario)
    out.write(_manifest_line(scenario, f"validate x{reps}") + "\n")

    analytic_ch = ch
    if self_test:
        analytic_ch = ChannelParams(ch.p_bar, ch.noise_w, ch.gamma * 1.25, ch.b, ch.lambda_e)

    failures = []

    def report(name, ok, detail):
        out.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
        if not ok:
            failures.append(name)

    if ch.lambda_e == 0 or dens.disk_mass() == 0:
        report("degenerate", True, "no traffic; nothing to compare")
        out.write("validate: PASS\n")
        return 0

    evaluator = ReceptionEvaluator(policy, dens, analytic_ch, pl)
    lam = evaluator.lam

    runs = []
    all_events = []
    for k in range(reps):
        cfg = SimConfig(
            duration=scenario.sim.duration,
            warmup=scenario.sim.warmup,
            domain_radius=scenario.sim.domain_radius,
            seed=scenario.sim.seed + k,
            annulus_bins=scenario.sim.annulus_bins,
        )
        events = generate_rain(cfg, dens, ch, policy, pl)
        events, result = run_loss_system(events, ch)
        runs.append(result)
        all_events.append((cfg, events))
    pooled = pool_results(runs)

    pf = p_free(lam, analytic_ch.b)
    z = (pooled.p_free_hat - pf) / math.sqrt(pf * (1 - pf) / pooled.n_offered)
    report("p_free", abs(z) <= 3.0, f"z={z:+.2f} (hat={pooled.p_free_hat:.5f}, exact={pf:.5f})")

    # Mean reception probability of an admissible packet.
    def p_rec_fn(r):
        return evaluator.p_rec(r)

    if isinstance(dens, RadialDensity):
        from .geometry import radial_integral

        mean_num = float(
            radial_integral(
                lambda r: np.asarray(policy(r), dtype=float)
                * np.atleast_1d(evaluator.p_rec(r)),
                dens,
                breakpoints=tuple(getattr(policy, "breakpoints", ())),
            )
        )
        pi_mean = pf * ch.lambda_e * mean_num / lam
        z = (pooled.pi_hat - pi_mean) / math.sqrt(pi_mean * (1 - pi_mean) / pooled.n_offered)
        report("pi", abs(z) <= 3.0, f"z={z:+.2f} (hat={pooled.pi_hat:.5f}, exact={pi_mean:.5f})")

    # Per-annulus success fraction and received-packet rate.
    acc = suc = None
    for cfg, events in all_events:
        est = estimate_rho(events, cfg)
        if acc is None:
            edges, acc, suc = est.edges, est.n_accepted.astype(float), est.n_success.astype(float)
        else:
            acc += est.n_accepted
            suc += est.n_success
    total_time = reps * scenario.sim.duration
    worst = worst_rate = 0.0
    bins_used = 0
    for k in range(len(edges) - 1):
        if acc[k] < 200:
            continue
        pbar = _bin_average(p_rec_fn, edges[k], edges[k + 1])
        se = math.sqrt(max(pbar * (1 - pbar), 1e-300) / acc[k])
        worst = max(worst, abs(suc[k] / acc[k] - pbar) / se)
        if isinstance(dens, RadialDensity):
            def rho_fn(r):
                base = analytic_ch.lambda_e * dens(r) * np.asarray(policy(r), dtype=float)
                return base * pf * np.atleast_1d(evaluator.p_rec(r))

            area = math.pi * (edges[k + 1] ** 2 - edges[k] ** 2)
            mu = _bin_average(rho_fn, edges[k], edges[k + 1]) * total_time * area
            worst_rate = max(worst_rate, abs(suc[k] - mu) / math.sqrt(max(mu, 1e-300)))
        bins_used += 1
    report("p_rec_annuli", worst <= 3.0, f"worst |z|={worst:.2f} over {bins_used} bins")
    report("rho_annuli", worst_rate <= 3.0, f"worst |z|={worst_rate:.2f} over {bins_used} bins")

    # Conditional Laplace transform of the averaged interference at five
    # thresholds spanning ~4 decades for the reference path-loss exponent.
    probe_r = dens.support_radius * np.array([0.04, 0.1, 0.2, 0.35, 0.55])
    xi_probe = ch.gamma / (ch.p_bar * pl(probe_r))
    worst_adm = worst_tot = 0.0
    for xi in np.atleast_1d(xi_probe):
        l12 = float(evaluator.conditional_transform(xi))
        l12_2 = float(evaluator.conditional_transform(2 * xi))
        ljb = float(evaluator.external_transform(xi))
        ljb2 = float(evaluator.external_transform(2 * xi))
        n = pooled.n_accepted
        means = [estimate_conditional_laplace(ev, xi) for _, ev in all_events]
        emp_adm = float(np.mean([m.admissible[0] for m in means]))
        emp_tot = float(np.mean([m.total[0] for m in means]))
        se_adm = math.sqrt(max(l12_2 - l12**2, 1e-300) / n)
        se_tot = math.sqrt(max(l12_2 * ljb2 - (l12 * ljb) ** 2, 1e-300) / n)
        worst_adm = max(worst_adm, abs(emp_adm - l12) / se_adm)
        worst_tot = max(worst_tot, abs(emp_tot - l12 * ljb) / se_tot)
    report("laplace_l1l2", worst_adm <= 3.0, f"worst |z|={worst_adm:.2f} over 5 xi")
    report("laplace_full", worst_tot <= 3.0, f"worst |z|={worst_tot:.2f} over 5 xi")

    gap = idle_gap_test(pooled, lam)
    report(
        "idle_gaps",
        gap.passed,
        f"KS={gap.statistic:.5f} < {gap.critical_1pct:.5f} (n={gap.n})",
    )

    ok = not failures
    out.write(f"validate: {'PASS' if ok else 'FAIL ' + ','.join(failures)}\n")
    return 0 if ok else 3


def _add_common(parser):
    parser.add_argument("--config", help="scenario TOML file")
    parser.add_argument("--profile", default=None, help="profile name (default canonical)")
    parser.add_argument("--out", default=None, help="output directory (default from scenario)")
    parser.add_argument("--seed", type=int, default=None)
    for flag, dotted, cast in [
        ("--gamma", "channel.gamma", float),
        ("--lambda-e", "channel.lambda_e", float),
        ("--b", "channel.b", float),
        ("--noise-w", "channel.noise_w", float),
        ("--p-bar", "channel.p_bar", float),
        ("--kappa", "pathloss.kappa", float),
        ("--eta", "pathloss.eta", float),
        ("--lambda-s", "density.lambda_s", float),
        ("--support-radius", "density.support_radius", float),
        ("--target-d", "target_d", float),
    ]:
        parser.add_argument(flag, dest=dotted, type=cast, default=None)


def _scenario_from_args(args) -> Scenario:
    overrides = {}
    for dotted in [
        "channel.gamma", "channel.lambda_e", "channel.b", "channel.noise_w",
        "channel.p_bar", "pathloss.kappa", "pathloss.eta", "density.lambda_s",
        "density.support_radius", "target_d",
    ]:
        value = getattr(args, dotted, None)
        if value is not None:
            overrides[dotted] = value
    if args.seed is not None:
        overrides["sim.seed"] = args.seed
    if getattr(args, "kind", None):
        overrides["policy.kind"] = args.kind
    text = None
    if args.profile is not None:
        text = f'profile = "{args.profile}"\n'
    return load_scenario(args.config, text=text if args.config is None else None, overrides=overrides)


def _open_out(scenario, args, name):
    directory = args.out if args.out is not None else scenario.outputs
    os.makedirs(directory, exist_ok=True)
    return open(os.path.join(directory, name), "w")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="erlang-rain",
        description="Reception probabilities, admission policies, deployment "
        "cost and Monte Carlo validation for a transmit-only sensor network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_prec = sub.add_parser("prec", help="reception probability curve with bounds")
    _add_common(p_prec)

    p_pol = sub.add_parser("policy", help="admission policy and density profile")
    p_pol.add_argument("--kind", choices=["naive", "disk", "maxmin", "waterfill", "cod"])
    _add_common(p_pol)

    p_cost = sub.add_parser("cost", help="hybrid deployment cost sweep")
    _add_common(p_cost)

    p_val = sub.add_parser("validate", help="simulator-vs-analytic cross checks")
    p_val.add_argument("--replications", type=int, default=None)
    p_val.add_argument(
        "--self-test",
        action="store_true",
        help="perturb the analytic threshold; the checks must then fail",
    )
    _add_common(p_val)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 1

    try:
        scenario = _scenario_from_args(args)
    except (ScenarioError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "prec":
            with _open_out(scenario, args, "prec.csv") as fh:
                return cmd_prec(scenario, out=fh)
        if args.command == "policy":
            kind = scenario.policy_kind
            with _open_out(scenario, args, f"policy_{kind}.csv") as fh, _open_out(
                scenario, args, f"rho_{kind}.csv"
            ) as fh2:
                return cmd_policy(scenario, policy_out=fh, rho_out=fh2, summary_out=sys.stdout)
        if args.command == "cost":
            with _open_out(scenario, args, "cost.csv") as fh, _open_out(
                scenario, args, "gain.csv"
            ) as fh2:
                return cmd_cost(scenario, sweep_out=fh, gain_out=fh2, summary_out=sys.stdout)
        if args.command == "validate":
            return cmd_validate(
                scenario, replications=args.replications, self_test=args.self_test
            )
    except (ValueError, TypeError) as exc:
        message = str(exc)
        print(f"error: {message}", file=sys.stderr)
        infeasible = "unreachable" in message or "does not exist" in message
        return 2 if infeasible else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
