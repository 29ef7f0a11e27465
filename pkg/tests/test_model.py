"""Core model tests.

Expected values for the retransmission series come from two independent
oracles implemented here: the telescoping-form partial sum (definition of the
expectation of a maximum) and, for integer packet counts, the
inclusion-exclusion closed form. The package's survival-form series must
agree with both without sharing any code with them.
"""

import math

import numpy as np
import pytest

from lossybsp.model import (
    CommPattern,
    DominatingTerm,
    NetworkParams,
    PatternKind,
    RetransmitPolicy,
    Scenario,
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


def telescoping_rounds(packet_success: float, packets: float, tol: float = 1e-16) -> float:
    """Oracle: E[max of c geometrics] = sum_i i*((1-q^i)^c - (1-q^(i-1))^c)."""
    q = 1.0 - packet_success
    total = 0.0
    prev = 0.0
    i = 1
    while True:
        cur = (1.0 - q**i) ** packets
        total += i * (cur - prev)
        if i > 1 and i * packets * q ** (i - 1) < tol:
            return total
        prev = cur
        i += 1
        assert i < 10_000_000, "oracle failed to converge"


def inclusion_exclusion_rounds(packet_success: float, packets: int) -> float:
    """Oracle for integer packet counts: sum_j (-1)^(j+1) C(c,j) / (1 - q^j)."""
    q = 1.0 - packet_success
    return math.fsum(
        (-1) ** (j + 1) * math.comb(packets, j) / (1.0 - q**j)
        for j in range(1, packets + 1)
    )


class TestPacketSuccess:
    def test_single_copy(self):
        assert single_packet_success(0.1, 1) == pytest.approx(0.81, rel=1e-15)

    def test_copies_square_the_surviving_fraction(self):
        # two directions, each needing one survivor out of k copies
        assert single_packet_success(0.5, 3) == pytest.approx((1 - 0.125) ** 2, rel=1e-15)

    def test_outcome_probabilities_partition(self):
        rng = np.random.default_rng(7)
        for loss in rng.random(50):
            success, data_lost, ack_lost = packet_outcome_probabilities(float(loss))
            assert success == pytest.approx((1 - loss) ** 2, rel=1e-12)
            assert data_lost == pytest.approx(loss, rel=1e-12)
            assert success + data_lost + ack_lost == pytest.approx(1.0, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            single_packet_success(1.5)
        with pytest.raises(ValueError):
            single_packet_success(0.5, 0)


class TestRoundSuccess:
    def test_ten_packet_example(self):
        # 0.81**10 by repeated multiplication
        expect = 1.0
        for _ in range(10):
            expect *= 0.81
        assert round_success_probability(0.1, 1, 10) == pytest.approx(expect, rel=1e-13)

    def test_three_copy_example(self):
        # (1 - 0.5**3)**(2*4) = 0.875**8 = 0.34360891580581665
        assert round_success_probability(0.5, 3, 4) == pytest.approx(
            0.34360891580581665, rel=1e-13
        )

    def test_no_packets_always_succeeds(self):
        assert round_success_probability(0.9, 1, 0) == 1.0

    def test_certain_loss(self):
        assert round_success_probability(1.0, 3, 5) == 0.0

    def test_monotone_in_copies(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            loss = float(rng.uniform(0.01, 0.99))
            c = float(rng.integers(1, 200))
            values = [round_success_probability(loss, k, c) for k in range(1, 6)]
            assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))

    def test_log_space_avoids_underflow_collapse(self):
        # huge packet counts: result is tiny but still computed, not 0/1 garbage
        v = round_success_probability(0.001, 1, 1e6)
        assert v == pytest.approx(math.exp(2e6 * math.log1p(-0.001)), rel=1e-12)


class TestExpectedRoundsAll:
    def test_inverse_of_round_success(self):
        p_round = round_success_probability(0.1, 1, 10)
        assert expected_rounds_all(p_round) == pytest.approx(8.225263339969954, rel=1e-12)

    def test_diverges_at_zero(self):
        with pytest.raises(ValueError):
            expected_rounds_all(0.0)

    def test_domain_error_above_one(self):
        with pytest.raises(ValueError):
            expected_rounds_all(1.5)


class TestExpectedRoundsLostOnly:
    def test_single_packet_is_plain_geometric(self):
        # closed form 1/p_s; the series must reproduce it to near machine precision
        for p_s in (0.01, 0.05, 0.31, 0.81, 0.99):
            assert expected_rounds_lost_only(p_s, 1) == pytest.approx(
                1.0 / p_s, abs=1e-12
            )

    def test_frozen_reference_point(self):
        # telescoping-form oracle value for success 0.81, 10 packets
        assert expected_rounds_lost_only(0.81, 10) == pytest.approx(
            2.2686039289715385, rel=1e-12
        )

    def test_against_telescoping_oracle(self):
        for packets in (1, 2, 3, 10, 100, 1000):
            for p_s in (0.0199, 0.19, 0.49, 0.81, 0.9801):
                mine = expected_rounds_lost_only(p_s, packets)
                oracle = telescoping_rounds(p_s, packets)
                assert mine == pytest.approx(oracle, rel=1e-9), (p_s, packets)

    def test_against_inclusion_exclusion_oracle(self):
        # independent combinatorial route, small integer packet counts only
        for packets in (1, 2, 3, 5, 8):
            for p_s in (0.2, 0.5, 0.81):
                mine = expected_rounds_lost_only(p_s, packets)
                oracle = inclusion_exclusion_rounds(p_s, packets)
                assert mine == pytest.approx(oracle, rel=1e-11), (p_s, packets)

    def test_noninteger_packet_counts(self):
        # real c is allowed (log-like traffic patterns); oracle handles real c too
        mine = expected_rounds_lost_only(0.5, 17.3)
        assert mine == pytest.approx(telescoping_rounds(0.5, 17.3), rel=1e-9)

    def test_zero_packets_costs_one_round(self):
        assert expected_rounds_lost_only(0.37, 0) == 1.0

    def test_certain_success_is_one_round(self):
        assert expected_rounds_lost_only(1.0, 500) == 1.0

    def test_diverges_at_zero_success(self):
        with pytest.raises(ValueError):
            expected_rounds_lost_only(0.0, 4)

    def test_at_least_one_round(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            p_s = float(rng.uniform(0.02, 1.0))
            c = float(rng.integers(1, 500))
            assert expected_rounds_lost_only(p_s, c) >= 1.0

    def test_monotone_in_success_and_packets(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            p_s = float(rng.uniform(0.05, 0.95))
            c = int(rng.integers(1, 300))
            base = expected_rounds_lost_only(p_s, c)
            assert expected_rounds_lost_only(min(1.0, p_s + 0.02), c) <= base + 1e-12
            assert expected_rounds_lost_only(p_s, c + 10) >= base - 1e-12

    def test_never_worse_than_full_restart(self):
        # retrying only the failures can't take longer in expectation than
        # restarting everything on any loss
        rng = np.random.default_rng(13)
        for _ in range(100):
            loss = float(rng.uniform(0.01, 0.6))
            k = int(rng.integers(1, 4))
            c = int(rng.integers(1, 40))
            lost_only = expected_rounds_lost_only(single_packet_success(loss, k), c)
            restart = expected_rounds_all(round_success_probability(loss, k, c))
            assert lost_only <= restart + 1e-12


class TestExchangeTime:
    def test_squared_pattern_example(self):
        net = NetworkParams(loss=0.0, alpha=0.001, beta=0.05)
        # 3 copies * (100**2/100) packets/node * 1 ms + 50 ms
        assert exchange_time(CommPattern.squared(), 100, 3, net) == pytest.approx(
            0.35, rel=1e-15
        )

    def test_constant_pattern(self):
        net = NetworkParams(loss=0.0, alpha=0.01, beta=0.02)
        assert exchange_time(CommPattern.constant(), 4, 2, net) == pytest.approx(
            2 * (1 / 4) * 0.01 + 0.02, rel=1e-15
        )


def _scenario(
    loss=0.1,
    alpha=0.002,
    beta=0.05,
    seconds=100.0,
    comm=None,
    copies=1,
    policy=RetransmitPolicy.LOST_ONLY,
    nodes=16,
):
    return Scenario(
        network=NetworkParams(loss=loss, alpha=alpha, beta=beta),
        comm=comm if comm is not None else CommPattern.linear(),
        work=Workload(seconds=seconds),
        copies=copies,
        policy=policy,
        nodes=nodes,
    )


class TestExpectedSpeedup:
    def test_lost_only_matches_expanded_form(self):
        # independent route: speedup written out as
        # n / (1 + 2 k rho c alpha / w + 2 n beta rho / w),
        # with rho from the telescoping oracle
        rng = np.random.default_rng(17)
        for _ in range(50):
            loss = float(rng.uniform(0.01, 0.5))
            k = int(rng.integers(1, 5))
            n = int(rng.integers(2, 200))
            w = float(rng.uniform(10, 1000))
            alpha = float(rng.uniform(1e-5, 0.01))
            beta = float(rng.uniform(1e-3, 0.2))
            sc = _scenario(
                loss=loss, alpha=alpha, beta=beta, seconds=w, copies=k, nodes=n
            )
            c = float(n)
            rho = telescoping_rounds(single_packet_success(loss, k), c)
            expanded = n / (
                1.0 + 2.0 * k * rho * c * alpha / w + 2.0 * n * beta * rho / w
            )
            assert expected_speedup(sc).speedup == pytest.approx(expanded, rel=1e-9)

    def test_all_on_any_loss_formula(self):
        sc = _scenario(policy=RetransmitPolicy.ALL_ON_ANY_LOSS)
        report = expected_speedup(sc)
        tau = exchange_time(sc.comm, 16, 1, sc.network)
        g = 100.0 / (2 * 16 * tau)
        p_s = round_success_probability(0.1, 1, 16)
        assert report.speedup == pytest.approx(16 * g * p_s / (1 + g * p_s), rel=1e-12)
        assert report.expected_rounds == pytest.approx(1 / p_s, rel=1e-12)

    def test_report_fields_consistent(self):
        sc = _scenario(copies=2, nodes=64)
        report = expected_speedup(sc)
        assert report.efficiency == pytest.approx(report.speedup / 64, rel=1e-15)
        assert report.expected_rounds >= 1.0
        assert 0.0 < report.round_success <= 1.0
        assert not report.no_progress
        d = report.to_dict()
        assert d["dominating_term"] == "both"
        assert d["speedup"] == report.speedup

    def test_speedup_bounded_by_nodes(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            sc = _scenario(
                loss=float(rng.uniform(0, 0.9)),
                nodes=int(rng.integers(1, 500)),
                copies=int(rng.integers(1, 6)),
            )
            report = expected_speedup(sc)
            assert 0.0 <= report.speedup <= sc.nodes + 1e-9
            assert 0.0 <= report.efficiency <= 1.0 + 1e-12

    def test_lossless_link_still_pays_exchange_time(self):
        sc = _scenario(loss=0.0)
        report = expected_speedup(sc)
        assert report.expected_rounds == 1.0
        assert report.speedup < 16
        assert report.speedup == pytest.approx(
            16 * report.granularity / (report.granularity + 1.0), rel=1e-12
        )

    def test_certain_loss_flags_no_progress(self):
        for policy in RetransmitPolicy:
            report = expected_speedup(_scenario(loss=1.0, policy=policy))
            assert report.no_progress
            assert report.speedup == 0.0
            assert report.efficiency == 0.0
            assert math.isinf(report.expected_rounds)

    def test_free_network_reaches_linear_speedup(self):
        sc = _scenario(alpha=0.0, beta=0.0)
        report = expected_speedup(sc)
        assert report.speedup == 16.0
        assert math.isinf(report.granularity)

    def test_speedup_strictly_decreasing_in_loss(self):
        for policy in RetransmitPolicy:
            values = [
                expected_speedup(_scenario(loss=p, policy=policy)).speedup
                for p in (0.0, 0.05, 0.1, 0.2, 0.4, 0.7)
            ]
            assert all(a > b for a, b in zip(values, values[1:]))

    def test_speedup_approaches_node_count_as_work_grows(self):
        small = expected_speedup(_scenario(seconds=10.0)).speedup
        big = expected_speedup(_scenario(seconds=1e9)).speedup
        assert small < big < 16.0
        assert big == pytest.approx(16.0, rel=1e-6)


class TestConceptualModel:
    def test_linear_pattern_value(self):
        # 16 * 0.99**32 by repeated multiplication: 11.599685375325654
        sc = _scenario(
            copies=2, policy=RetransmitPolicy.ALL_ON_ANY_LOSS, nodes=16
        )
        report = conceptual_speedup(sc)
        assert report.speedup == pytest.approx(11.599685375325654, rel=1e-12)
        assert report.exchange_time == 0.0
        assert math.isinf(report.granularity)
        assert report.efficiency == pytest.approx(report.speedup / 16, rel=1e-15)

    def test_approximation_value(self):
        sc = _scenario(policy=RetransmitPolicy.ALL_ON_ANY_LOSS, nodes=5)
        assert conceptual_speedup_approx(sc) == pytest.approx(
            5 * math.exp(-1.0), rel=1e-12
        )

    def test_approximation_upper_bounds_exact(self):
        # exp(-2 p^k c) >= (1 - p^k)^(2c), so the approximation is optimistic
        rng = np.random.default_rng(29)
        for _ in range(100):
            sc = _scenario(
                loss=float(rng.uniform(0.01, 0.5)),
                copies=int(rng.integers(1, 4)),
                nodes=int(rng.integers(1, 100)),
                policy=RetransmitPolicy.ALL_ON_ANY_LOSS,
            )
            assert conceptual_speedup_approx(sc) >= conceptual_speedup(sc).speedup - 1e-12

    def test_requires_restart_policy(self):
        with pytest.raises(ValueError):
            conceptual_speedup(_scenario(policy=RetransmitPolicy.LOST_ONLY))

    def test_certain_loss_flags_no_progress(self):
        report = conceptual_speedup(
            _scenario(loss=1.0, policy=RetransmitPolicy.ALL_ON_ANY_LOSS)
        )
        assert report.no_progress and report.speedup == 0.0


def brute_force_best_nodes(loss, copies, pattern, hi=10**4):
    """Oracle: integer argmax of n*exp(-2 p^k c(n)) by exhaustive scan."""
    n = np.arange(1, hi + 1, dtype=np.float64)
    if pattern is PatternKind.LOG2_SQUARED:
        c = np.log2(n) ** 2
    elif pattern is PatternKind.LINEAR:
        c = n
    elif pattern is PatternKind.N_LOG2:
        c = n * np.log2(n)
    elif pattern is PatternKind.SQUARED:
        c = n * n
    else:
        raise ValueError(pattern)
    return int(np.argmax(n * np.exp(-2.0 * loss**copies * c))) + 1


class TestOptimalNodes:
    def test_linear_published_point(self):
        assert optimal_nodes_conceptual(0.1, 1, CommPattern.linear()).nodes == 5

    def test_squared_exact_point(self):
        # 1/(2 sqrt(0.25**2)) = 2 exactly
        opt = optimal_nodes_conceptual(0.25, 2, CommPattern.squared())
        assert opt.nodes == 2 and opt.nodes_real == pytest.approx(2.0, rel=1e-12)

    def test_rounding_follows_the_objective(self):
        # stationary point 2.5; the objective prefers 3
        opt = optimal_nodes_conceptual(0.2, 1, CommPattern.linear())
        assert opt.nodes_real == pytest.approx(2.5, rel=1e-12)
        assert opt.nodes == 3

    def test_matches_brute_force_spot_checks(self):
        cases = [
            (0.1, 2, PatternKind.LOG2_SQUARED, CommPattern.log2_squared()),
            (0.2, 2, PatternKind.N_LOG2, CommPattern.n_log2()),
            (0.05, 1, PatternKind.SQUARED, CommPattern.squared()),
        ]
        for loss, copies, kind, pattern in cases:
            opt = optimal_nodes_conceptual(loss, copies, pattern)
            if opt.nodes_real is not None and opt.nodes_real <= 10**4:
                assert opt.nodes == brute_force_best_nodes(loss, copies, kind)

    def test_monotonic_patterns_have_no_finite_optimum(self):
        for pattern in (CommPattern.constant(), CommPattern.log2()):
            opt = optimal_nodes_conceptual(0.3, 1, pattern)
            assert opt.monotonic and opt.nodes is None

    def test_lossless_is_monotonic_for_every_pattern(self):
        for pattern in (CommPattern.linear(), CommPattern.squared(), CommPattern.n_log2()):
            assert optimal_nodes_conceptual(0.0, 3, pattern).monotonic

    def test_nlog2_root_satisfies_stationarity(self):
        opt = optimal_nodes_conceptual(0.05, 2, CommPattern.n_log2())
        n = opt.nodes_real
        pk = 0.05**2
        assert 2 * pk * n * (math.log2(n) + 1 / math.log(2)) == pytest.approx(1.0, rel=1e-9)

    def test_custom_pattern_rejected(self):
        with pytest.raises(ValueError):
            optimal_nodes_conceptual(0.1, 1, CommPattern.custom(lambda n: n, "c"))


class TestOptimalCopies:
    def test_redundancy_helps_on_a_lossy_chatty_link(self):
        sc = _scenario(loss=0.3, alpha=1e-5, beta=0.05, nodes=64)
        best = optimal_copies(sc, max_copies=16)
        assert best.copies > 1
        assert best.report.speedup >= expected_speedup(sc.with_(copies=1)).speedup

    def test_exhaustive_argmax_and_tie_break(self):
        sc = _scenario(loss=0.2, alpha=0.001, beta=0.02, nodes=32)
        best = optimal_copies(sc, max_copies=8)
        speedups = [
            expected_speedup(sc.with_(copies=k)).speedup for k in range(1, 9)
        ]
        top = max(speedups)
        assert best.report.speedup == top
        assert best.copies == speedups.index(top) + 1  # first max wins ties
        assert best.rounds_cost_product == pytest.approx(
            best.copies * best.report.expected_rounds, rel=1e-15
        )

    def test_zero_transmit_cost_approaches_delay_bound(self):
        sc = _scenario(loss=0.1, alpha=0.0, beta=0.05, seconds=36000.0, nodes=2**10)
        best = optimal_copies(sc, max_copies=64)
        limit = delay_limited_speedup(2**10, 36000.0, 0.05)
        assert best.report.speedup == pytest.approx(limit, rel=1e-3)


class TestDominatingTerm:
    def test_canonical_classification(self):
        expect = {
            PatternKind.SQUARED: DominatingTerm.TRANSMIT,
            PatternKind.N_LOG2: DominatingTerm.TRANSMIT,
            PatternKind.LINEAR: DominatingTerm.BOTH,
            PatternKind.LOG2_SQUARED: DominatingTerm.DELAY,
            PatternKind.LOG2: DominatingTerm.DELAY,
            PatternKind.CONSTANT: DominatingTerm.DELAY,
        }
        for kind, term in expect.items():
            assert dominating_term(CommPattern(kind)) is term

    def test_custom_classified_by_growth(self):
        fast = CommPattern.custom(lambda n: n**1.5, "n^1.5")
        flat = CommPattern.custom(lambda n: 5.0 * n, "5n")
        slow = CommPattern.custom(lambda n: math.sqrt(n), "sqrt")
        assert dominating_term(fast) is DominatingTerm.TRANSMIT
        assert dominating_term(flat) is DominatingTerm.BOTH
        assert dominating_term(slow) is DominatingTerm.DELAY


class TestDelayLimit:
    def test_value(self):
        assert delay_limited_speedup(1000, 36000.0, 0.05) == pytest.approx(
            997.2299168975069, rel=1e-12
        )

    def test_zero_delay_gives_all_nodes(self):
        assert delay_limited_speedup(64, 10.0, 0.0) == 64.0


class TestTypesValidation:
    def test_network_params_bounds(self):
        with pytest.raises(ValueError):
            NetworkParams(loss=-0.1, alpha=0.001, beta=0.05)
        with pytest.raises(ValueError):
            NetworkParams(loss=0.1, alpha=-1.0, beta=0.05)
        with pytest.raises(ValueError):
            NetworkParams(loss=0.1, alpha=0.001, beta=-0.05)

    def test_alpha_consistency_with_link(self):
        NetworkParams(loss=0.1, alpha=0.001, beta=0.05, packet_size=1000, bandwidth=1e6)
        with pytest.raises(ValueError):
            NetworkParams(loss=0.1, alpha=0.002, beta=0.05, packet_size=1000, bandwidth=1e6)

    def test_from_link(self):
        net = NetworkParams.from_link(packet_size=65536, bandwidth=17.5e6, loss=0.045, beta=0.069)
        assert net.alpha == pytest.approx(65536 / 17.5e6, rel=1e-15)

    def test_workload_and_scenario_bounds(self):
        with pytest.raises(ValueError):
            Workload(seconds=0.0)
        with pytest.raises(ValueError):
            Workload(seconds=1.0, rounds=0)
        with pytest.raises(ValueError):
            _scenario(copies=0)
        with pytest.raises(ValueError):
            _scenario(nodes=0)

    def test_pattern_parsing(self):
        assert CommPattern.parse("n").kind is PatternKind.LINEAR
        assert CommPattern.parse("LOG2^2N").kind is PatternKind.LOG2_SQUARED
        assert CommPattern.parse("nlog2n").kind is PatternKind.N_LOG2
        with pytest.raises(ValueError):
            CommPattern.parse("cubic")

    def test_pattern_evaluation(self):
        assert CommPattern.linear().packets(8) == 8.0
        assert CommPattern.log2().packets(8) == 3.0
        assert CommPattern.log2_squared().packets(16) == 16.0
        assert CommPattern.n_log2().packets(8) == 24.0
        assert CommPattern.squared().packets(5) == 25.0
        assert CommPattern.constant().packets(999) == 1.0
        with pytest.raises(ValueError):
            CommPattern.linear().packets(0)
