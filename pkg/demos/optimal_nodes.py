# Where does adding nodes stop paying off when the network loses packets?
#
# In the communication-free limit the speedup is n scaled by the chance
# that a whole exchange of c(n) packets lands. For patterns that grow
# faster than log n that product has an interior maximum, and the model
# gives it in closed form. A brute scan double-checks each answer here.

import numpy as np

from lossybsp import CommPattern, optimal_nodes_conceptual


def brute_best(loss, copies, pattern, top=10**4):
    n = np.arange(1, top + 1, dtype=float)
    c = np.array([pattern.packets(int(v)) for v in n])
    log_speedup = np.log(n) - 2.0 * loss**copies * c
    return int(n[int(np.argmax(log_speedup))])


patterns = [
    CommPattern.log2_squared(),
    CommPattern.linear(),
    CommPattern.n_log2(),
    CommPattern.squared(),
]

for loss in (0.05, 0.1, 0.2):
    print(f"loss = {loss}, one copy per packet")
    print(f"{'pattern':>10} {'closed form':>14} {'best integer':>13} {'brute scan':>11}")
    for pattern in patterns:
        best = optimal_nodes_conceptual(loss, 1, pattern)
        scan = brute_best(loss, 1, pattern)
        print(f"{str(pattern):>10} {best.nodes_real:14.2f} {best.nodes:13d} {scan:11d}")
    print()

# Monotone patterns have no interior optimum: with c(n) = log2 n the
# success factor decays too slowly to ever beat the extra node.
flat = optimal_nodes_conceptual(0.1, 1, CommPattern.log2())
print(f"c(n) = log2 n at 10% loss: monotonic = {flat.monotonic} (more nodes always help)")

# Redundancy moves the optimum out fast. Squaring the pattern cost is
# brutal, but two copies at 10% loss act like 1% loss.
best1 = optimal_nodes_conceptual(0.1, 1, CommPattern.squared())
best2 = optimal_nodes_conceptual(0.1, 2, CommPattern.squared())
print(f"c(n) = n^2 at 10% loss: best n goes {best1.nodes} -> {best2.nodes} with a second copy")
