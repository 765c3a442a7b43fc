"""Cross-checking every closed form against the discrete-event simulator.

The simulator knows nothing about Laplace transforms: it replays the Poisson
rain packet by packet through the receiver state machine and integrates the
interference from interval overlaps.  Agreement is judged in standard errors
under the analytic null.
"""

import math

import numpy as np

from erlang_rain import (
    ChannelParams,
    DiskPolicy,
    PathLoss,
    RadialDensity,
    ReceptionEvaluator,
    SimConfig,
    estimate_conditional_laplace,
    estimate_rho,
    generate_rain,
    idle_gap_test,
    p_free,
    run_loss_system,
)

pl = PathLoss(kappa=10**-5.5, eta=3.3)
ch = ChannelParams(p_bar=1.0, noise_w=1e-13, gamma=1.0, b=1.25e-3, lambda_e=0.1)
density = RadialDensity.uniform(10.0, 50.0)
policy = DiskPolicy(20.0)

cfg = SimConfig(duration=50.0, warmup=0.05, domain_radius=50.0, seed=42, annulus_bins=25)
events = generate_rain(cfg, density, ch, policy, pl)
events, result = run_loss_system(events, ch)
evaluator = ReceptionEvaluator(policy, density, ch, pl)

print(f"packets simulated        {len(events)}")
print(f"admissible / accepted    {result.n_offered} / {result.n_accepted}")

pf = p_free(evaluator.lam, ch.b)
z = (result.p_free_hat - pf) / math.sqrt(pf * (1 - pf) / result.n_offered)
print(f"\nidle-at-arrival fraction {result.p_free_hat:.5f} vs Erlang {pf:.5f}  (z={z:+.2f})")

print("\nper-annulus success fraction vs p_rec:")
est = estimate_rho(events, cfg)
for k in range(10):
    if est.n_accepted[k] < 200:
        continue
    lo, hi = est.edges[k], est.edges[k + 1]
    r = np.linspace(max(lo, 1e-6), hi, 33)
    pbar = float(np.trapezoid(np.atleast_1d(evaluator.p_rec(r)) * r, r) / np.trapezoid(r, r))
    se = math.sqrt(pbar * (1 - pbar) / est.n_accepted[k])
    frac = est.n_success[k] / est.n_accepted[k]
    print(f"  [{lo:4.0f},{hi:4.0f}) m  sim {frac:.4f}  analytic {pbar:.4f}  "
          f"z={ (frac - pbar) / se:+.2f}")

print("\nconditional Laplace transform of the averaged interference:")
for r0 in [5.0, 10.0, 20.0]:
    xi = ch.xi_at(pl, r0)
    l12 = float(evaluator.conditional_transform(xi))
    emp = estimate_conditional_laplace(events, xi)
    var = float(evaluator.conditional_transform(2 * xi)) - l12**2
    z = (emp.admissible[0] - l12) / math.sqrt(max(var, 1e-300) / emp.n)
    print(f"  xi = gamma_x({r0:4.1f} m): sim {emp.admissible[0]:.5f}  "
          f"analytic {l12:.5f}  z={z:+.2f}")

gap = idle_gap_test(result, evaluator.lam)
print(f"\nidle gaps vs Exp(lambda): KS={gap.statistic:.5f}, 1% critical "
      f"{gap.critical_1pct:.5f}, n={gap.n} -> {'consistent' if gap.passed else 'rejected'}")
