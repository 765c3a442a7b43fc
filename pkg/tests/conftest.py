import pytest

from erlang_rain import (
    ChannelParams,
    DiskPolicy,
    PathLoss,
    RadialDensity,
    SimConfig,
    WeightFunction,
    generate_rain,
    run_loss_system,
)

# Reference scenario: gamma=1, kappa=10^-5.5, eta=3.3, 10 sensors/m^2 on a
# 50 m disk, traffic product lambda_e*b = 1.25e-4, P/W = 1e13, target 0.75.
CANONICAL = {
    "pl": PathLoss(10**-5.5, 3.3),
    "ch": ChannelParams(p_bar=1.0, noise_w=1e-13, gamma=1.0, b=1.25e-3, lambda_e=0.1),
    "density": RadialDensity.uniform(10.0, 50.0),
    "weights": WeightFunction.constant(1.0),
    "target": 0.75,
}


@pytest.fixture(scope="session")
def canonical():
    return dict(CANONICAL)


@pytest.fixture(scope="session")
def canonical_run(canonical):
    """One 50 s canonical simulation under the 20 m disk policy."""
    cfg = SimConfig(duration=50.0, warmup=0.05, domain_radius=50.0, seed=1105, annulus_bins=25)
    events = generate_rain(
        cfg, canonical["density"], canonical["ch"], DiskPolicy(20.0), canonical["pl"]
    )
    events, result = run_loss_system(events, canonical["ch"])
    return {"cfg": cfg, "events": events, "result": result, "policy": DiskPolicy(20.0)}
