"""Speedup modeling, simulation, and link probing for BSP-style parallel
programs whose supersteps exchange packets over a lossy network.

The public API re-exports the core types and operations; see each module for
the underlying formulas:

    model       expected-speedup model, retransmission series, optima
    algorithms  kernel cost models (matmul, bitonic, FFT, Laplace) and
                collectives, with the published reference table
    simulate    packet-level Monte-Carlo validation
    probe       datagram link measurement and conversion to model parameters
    cli         command-line front end (``lossybsp`` entry point)
"""

from .algorithms import (
    AlgoInstance,
    Algorithm,
    AlgoReport,
    CollectiveCost,
    ReferenceRow,
    allgather_cost,
    bitonic_speedup,
    broadcast_cost,
    evaluate_reference_row,
    fft2d_speedup,
    laplace_speedup,
    matmul_speedup,
    reference_rows,
)
from .model import (
    CommPattern,
    CopyOptimum,
    DominatingTerm,
    NetworkParams,
    NodeOptimum,
    PatternKind,
    RetransmitPolicy,
    Scenario,
    SpeedupReport,
    Workload,
    conceptual_speedup,
    conceptual_speedup_approx,
    delay_limited_speedup,
    dominating_term,
    exchange_time,
    expected_rounds_all,
    expected_rounds_lost_only,
    expected_speedup,
    optimal_copies,
    optimal_nodes_conceptual,
    packet_outcome_probabilities,
    round_success_probability,
    single_packet_success,
)
from .probe import (
    EchoResponder,
    LossyChannel,
    ProbeSample,
    UdpConn,
    run_probe,
    samples_from_csv,
    samples_to_csv,
    to_network_params,
)
from .simulate import (
    SimConfig,
    SimResult,
    compare_copies_paired,
    simulate_round_transmissions,
    simulate_speedup,
)

__version__ = "0.1.0"
