# Sending k copies of every packet trades bandwidth for fewer retransmit
# rounds. This sweeps k for one scenario and shows the sweet spot, then
# pushes transmit cost to zero to expose the delay ceiling.

from lossybsp import (
    CommPattern,
    NetworkParams,
    RetransmitPolicy,
    Scenario,
    Workload,
    delay_limited_speedup,
    expected_speedup,
    optimal_copies,
)

base = Scenario(
    network=NetworkParams(loss=0.2, alpha=0.002, beta=0.05),
    comm=CommPattern.linear(),
    work=Workload(seconds=100.0),
    copies=1,
    policy=RetransmitPolicy.LOST_ONLY,
    nodes=64,
)

print("copies   rounds   k*rounds   speedup")
for k in range(1, 11):
    report = expected_speedup(base.with_(copies=k))
    print(f"{k:6d} {report.expected_rounds:8.3f} {k * report.expected_rounds:10.3f} {report.speedup:9.3f}")

best = optimal_copies(base)
print(f"\nbest k = {best.copies} (speedup {best.report.speedup:.3f},"
      f" k*rounds product {best.rounds_cost_product:.3f})")

# The product k * expected rounds is the total transmit cost multiplier.
# It keeps falling only while the drop in rounds beats the extra copies.

print()
print("with alpha -> 0 the exchange cost is pure round-trip delay, and")
print("enough redundancy drives the expected rounds to one:")
free = base.with_(network=NetworkParams(loss=0.2, alpha=0.0, beta=0.05))
saturated = optimal_copies(free, max_copies=64)
ceiling = delay_limited_speedup(64, 100.0, 0.05)
print(f"  best k = {saturated.copies:2d}  speedup = {saturated.report.speedup:.4f}")
print(f"  delay ceiling               = {ceiling:.4f}")
