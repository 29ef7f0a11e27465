# Measure a link with the probe, then feed the measurement straight into
# the model. Runs against an in-process channel with 10% loss injected in
# each direction and 20 ms of one-way delay, so no second host is needed.
#
# Against a real peer the flow is the same with UDP underneath:
#
#   host A$ lossybsp probe-serve --bind 0.0.0.0:9300
#   host B$ lossybsp probe --peer hostA:9300 --output link.csv

from lossybsp import (
    CommPattern,
    EchoResponder,
    LossyChannel,
    RetransmitPolicy,
    Scenario,
    Workload,
    expected_speedup,
    run_probe,
    to_network_params,
)

channel = LossyChannel(loss=(0.1, 0.1), delay=(0.02, 0.02), seed=11)
responder = EchoResponder(channel.b).start()
samples = run_probe(channel.a, packet_sizes=(256, 1024), count=400, drain_timeout=0.5)
responder.stop()

print(f"{'size':>6} {'sent':>5} {'echoed':>7} {'loss':>7} {'rtt ms':>7}")
for s in samples:
    print(f"{s.packet_size:>6} {s.sent:>5} {s.echoed:>7} {s.loss_rate:7.3f} {s.rtt_mean * 1e3:7.1f}")

params = to_network_params(samples[0])
print()
print("recovered link parameters from the 256-byte row:")
print(f"  per-direction loss {params.loss:.4f} (0.1 injected)")
print(f"  round-trip delay   {params.beta * 1e3:.1f} ms")
print(f"  packet transmit    {params.alpha * 1e6:.1f} us")

report = expected_speedup(
    Scenario(
        network=params,
        comm=CommPattern.linear(),
        work=Workload(seconds=600.0),
        copies=2,
        policy=RetransmitPolicy.LOST_ONLY,
        nodes=32,
    )
)
print()
print(f"a 32-node, 600 s job with doubled packets on this link:")
print(f"  expected rounds per exchange {report.expected_rounds:.3f}")
print(f"  speedup {report.speedup:.2f}  efficiency {report.efficiency:.3f}")
