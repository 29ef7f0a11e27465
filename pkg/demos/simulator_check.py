# Packet-level Monte Carlo against the analytic round counts. Every run
# is seeded, so the numbers printed here are reproducible bit for bit.

from lossybsp import (
    CommPattern,
    NetworkParams,
    RetransmitPolicy,
    Scenario,
    SimConfig,
    Workload,
    expected_speedup,
    simulate_speedup,
)


def scenario(loss, copies, policy):
    return Scenario(
        network=NetworkParams(loss=loss, alpha=0.002, beta=0.05),
        comm=CommPattern.custom(lambda n: 10.0, "10 packets"),
        work=Workload(seconds=100.0),
        copies=copies,
        policy=policy,
        nodes=16,
    )


print(f"{'policy':<12} {'loss':>5} {'k':>2} {'analytic':>9} {'simulated':>10} {'gap/SE':>7}")
for policy in (RetransmitPolicy.LOST_ONLY, RetransmitPolicy.ALL_ON_ANY_LOSS):
    for loss, copies in ((0.05, 1), (0.1, 1), (0.1, 2), (0.3, 2)):
        sc = scenario(loss, copies, policy)
        analytic = expected_speedup(sc)
        sim = simulate_speedup(SimConfig(scenario=sc, trials=20000, master_seed=7))
        gap = (sim.mean_rounds - analytic.expected_rounds) / sim.std_error
        print(
            f"{policy.value:<12} {loss:5.2f} {copies:2d} {analytic.expected_rounds:9.4f}"
            f" {sim.mean_rounds:10.4f} {gap:+7.2f}"
        )

print()
print("empirical vs analytic speedup at 10% loss, lost-only:")
sc = scenario(0.1, 1, RetransmitPolicy.LOST_ONLY)
sim = simulate_speedup(SimConfig(scenario=sc, trials=20000, master_seed=7))
print(f"  simulated {sim.empirical_speedup:.4f}   model {expected_speedup(sc).speedup:.4f}")
