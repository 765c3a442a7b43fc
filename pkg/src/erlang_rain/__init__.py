"""Performance analysis of transmit-only sensor networks.

Closed-form reception probabilities and information density of an Erlang
M/D/1/1 loss receiver with interference, optimal packet-admission policies
(max-min fair, water-filling, coverage-optimal deterministic), hybrid
deployment cost optimisation, and a discrete-event Monte Carlo simulator
that cross-validates every formula.
"""

from .geometry import (
    AtomicDensity,
    PathLoss,
    QuadratureError,
    RadialDensity,
    WeightFunction,
    adaptive_simpson,
    phi,
    radial_integral,
)
from .loss_model import (
    AnnularPolicy,
    ChannelParams,
    ConstantPolicy,
    DiskPolicy,
    Policy,
    PowerDistribution,
    ReceptionCurve,
    ReceptionEvaluator,
    RhoProfile,
    TabulatedPolicy,
    erlang_pi,
    lambda_admissible,
    laplace_all_traffic,
    laplace_l1,
    laplace_l2,
    laplace_ljb,
    laplace_w,
    mixture_laplace_l1,
    mixture_laplace_l2,
    mixture_laplace_ljb,
    p_free,
    p_rec,
    p_rec_bounds,
    reception_curve,
    rho,
)
from .policies import (
    MaxMinSolution,
    ThroughputBounds,
    WaterfillSolution,
    cod_policy,
    maxmin_level,
    maxmin_max_radius,
    maxmin_policy,
    naive_policy,
    total_throughput,
    waterfill_policy,
)
from .cost import (
    CostCurve,
    CostParams,
    cost_sweep,
    feasibility_slack,
    head_density_from_spacing,
    lambda_c_for_radius,
    r_max,
    required_lambda_c,
)
from .sim import (
    IdleGapTest,
    LaplaceEstimate,
    PacketEvent,
    PacketEvents,
    RhoEstimate,
    SimConfig,
    SimResult,
    estimate_conditional_laplace,
    estimate_rho,
    generate_power_rain,
    generate_rain,
    idle_gap_test,
    pool_results,
    run_loss_system,
)
from .cli import Scenario, load_scenario, scenario_to_toml

__version__ = "0.1.0"
