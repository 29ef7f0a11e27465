"""Command-line front end.

Subcommands:

    speedup      model speedup across one swept axis (nodes/loss/copies/work)
    table2       recompute the reference kernel table against published values
    optimal-n    closed-form best node count for the communication-free model
    optimal-k    best redundancy level for a scenario
    simulate     Monte-Carlo check of a scenario (seed required)
    probe        measure a link; also converts probe CSV rows to config form
    probe-serve  run the echo responder

Exit codes: 0 success, 1 configuration error, 2 reference-table deviation
beyond 5 percent, 3 network error (unreachable probe peer).

Scenario values come from an INI config file (``--config``) and/or flags;
flags win. Config sections and keys:

    [network]  loss alpha beta packet_size bandwidth
    [workload] work rounds
    [run]      comm copies policy nodes model

The axis flags ``--nodes --loss --copies --work`` accept comma-separated
lists; for ``speedup`` exactly one of them may be a list (the sweep axis).
Outputs are CSV (header row, '.' decimal separator) or JSON carrying
identical values; ``--output`` writes to a file instead of stdout.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

from . import probe as probe_mod
from .algorithms import evaluate_reference_row, reference_rows
from .model import (
    CommPattern,
    NetworkParams,
    RetransmitPolicy,
    Scenario,
    Workload,
    conceptual_speedup,
    expected_speedup,
    optimal_copies,
    optimal_nodes_conceptual,
)
from .simulate import SimConfig, simulate_speedup

__all__ = ["main", "ConfigError"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_TABLE_DEVIATION = 2
EXIT_NETWORK = 3

TABLE_GATE = 0.05  # relative speedup error that fails the table2 regression


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; our scheme reserves 2 for
    table deviations, so usage problems are rethrown as config errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"expected a number or comma list, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            values.append(int(part))
        except ValueError as exc:
            raise ConfigError(f"expected an integer or comma list, got {text!r}") from exc
    return values


def _build_parser() -> _Parser:
    parser = _Parser(prog="lossybsp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scenario_flags(p: _Parser) -> None:
        p.add_argument("--config", help="INI file with [network]/[workload]/[run] sections")
        p.add_argument("--loss", help="per-packet drop probability (comma list to sweep)")
        p.add_argument("--alpha", type=float, help="seconds to transmit one packet")
        p.add_argument("--beta", type=float, help="round-trip delay, seconds")
        p.add_argument("--packet-size", type=int, help="bytes; with --bandwidth derives alpha")
        p.add_argument("--bandwidth", type=float, help="bytes per second")
        p.add_argument("--work", help="single-node seconds per superstep (comma list to sweep)")
        p.add_argument("--rounds", type=int, help="superstep count (default 1)")
        p.add_argument("--comm", help="packets per superstep: 1, log2n, log2^2n, n, nlog2n, n^2")
        p.add_argument("--copies", help="redundant datagrams per packet (comma list to sweep)")
        p.add_argument("--policy", choices=[p.value for p in RetransmitPolicy])
        p.add_argument("--nodes", help="node count (comma list to sweep)")

    def add_output_flags(p: _Parser) -> None:
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", help="write to this path instead of stdout")

    p = sub.add_parser("speedup", help="model speedup across one swept axis")
    add_scenario_flags(p)
    add_output_flags(p)
    p.add_argument(
        "--model",
        choices=("bsp", "conceptual"),
        default=None,
        help="bsp (full model, default) or conceptual (communication-free, "
        "implies the all-on-any-loss policy)",
    )

    p = sub.add_parser("table2", help="recompute the reference kernel table")
    add_output_flags(p)

    p = sub.add_parser("optimal-n", help="best node count, communication-free model")
    add_output_flags(p)
    p.add_argument("--loss", required=True, type=float)
    p.add_argument("--copies", required=True, type=int)
    p.add_argument("--comm", required=True)

    p = sub.add_parser("optimal-k", help="best redundancy level for a scenario")
    add_scenario_flags(p)
    add_output_flags(p)
    p.add_argument("--max-copies", type=int, default=64)

    p = sub.add_parser("simulate", help="Monte-Carlo check of a scenario")
    add_scenario_flags(p)
    add_output_flags(p)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, required=True, help="master seed (required)")
    p.add_argument("--max-rounds", type=int, default=10**6)

    p = sub.add_parser("probe", help="measure a link or convert probe CSV to config")
    add_output_flags(p)
    p.add_argument("--peer", help="HOST:PORT of a running probe-serve responder")
    p.add_argument("--sizes", default="256,1024,8192", help="comma list of wire sizes, bytes")
    p.add_argument("--count", type=int, default=200, help="probes per size")
    p.add_argument("--interval", type=float, default=0.0, help="seconds between probes")
    p.add_argument("--drain", type=float, default=2.0, help="grace period for late echoes")
    p.add_argument("--import-csv", dest="import_csv", help="probe CSV to convert to a [network] config section")
    p.add_argument("--row", type=int, default=0, help="row of --import-csv to convert")

    p = sub.add_parser("probe-serve", help="run the echo responder")
    p.add_argument("--bind", default="0.0.0.0:9300", help="HOST:PORT to listen on")

    return parser


def _load_config(path: str | None) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if path:
        read = cfg.read(path)
        if not read:
            raise ConfigError(f"config file not found: {path}")
    return cfg


def _setting(args: argparse.Namespace, cfg: configparser.ConfigParser,
             flag: str, section: str, key: str | None = None) -> str | None:
    value = getattr(args, flag, None)
    if value is not None:
        return str(value)
    return cfg.get(section, key or flag, fallback=None)


def _scenario_axes(
    args: argparse.Namespace, cfg: configparser.ConfigParser
) -> tuple[dict[str, list[Any]], NetworkParams, Workload, CommPattern, RetransmitPolicy]:
    """Collect scenario settings; axis values are returned as lists."""
    loss_text = _setting(args, cfg, "loss", "network")
    if loss_text is None:
        raise ConfigError("loss is required (--loss or [network] loss)")
    losses = _float_list(loss_text)

    alpha_text = _setting(args, cfg, "alpha", "network")
    ps_text = _setting(args, cfg, "packet_size", "network", "packet_size")
    if getattr(args, "packet_size", None) is not None:
        ps_text = str(args.packet_size)
    bw_text = _setting(args, cfg, "bandwidth", "network")

    packet_size = int(ps_text) if ps_text is not None else None
    bandwidth = float(bw_text) if bw_text is not None else None
    if alpha_text is not None:
        alpha = float(alpha_text)
    elif packet_size is not None and bandwidth is not None:
        alpha = packet_size / bandwidth
    else:
        raise ConfigError("alpha is required (directly, or via packet_size + bandwidth)")

    beta_text = _setting(args, cfg, "beta", "network")
    if beta_text is None:
        raise ConfigError("beta is required (--beta or [network] beta)")

    work_text = _setting(args, cfg, "work", "workload")
    if work_text is None:
        raise ConfigError("work is required (--work or [workload] work)")
    works = _float_list(work_text)
    rounds_text = _setting(args, cfg, "rounds", "workload")
    rounds = int(rounds_text) if rounds_text is not None else 1

    comm_text = _setting(args, cfg, "comm", "run") or "n"
    policy_text = _setting(args, cfg, "policy", "run") or RetransmitPolicy.LOST_ONLY.value
    copies_text = _setting(args, cfg, "copies", "run") or "1"
    nodes_text = _setting(args, cfg, "nodes", "run")
    if nodes_text is None:
        raise ConfigError("nodes is required (--nodes or [run] nodes)")

    try:
        comm = CommPattern.parse(comm_text)
        policy = RetransmitPolicy(policy_text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    try:
        network = NetworkParams(
            loss=losses[0],
            alpha=alpha,
            beta=float(beta_text),
            packet_size=packet_size,
            bandwidth=bandwidth,
        )
        work = Workload(seconds=works[0], rounds=rounds)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    axes = {
        "loss": losses,
        "work": works,
        "copies": _int_list(copies_text),
        "nodes": _int_list(nodes_text),
    }
    for name, values in axes.items():
        if not values:
            raise ConfigError(f"{name} has no values")
    return axes, network, work, comm, policy


def _base_scenario(
    axes: dict[str, list[Any]],
    network: NetworkParams,
    work: Workload,
    comm: CommPattern,
    policy: RetransmitPolicy,
) -> Scenario:
    try:
        return Scenario(
            network=network,
            comm=comm,
            work=work,
            copies=axes["copies"][0],
            policy=policy,
            nodes=axes["nodes"][0],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _scenario_at(base: Scenario, axis: str, value: Any) -> Scenario:
    if axis == "loss":
        from dataclasses import replace

        return base.with_(network=replace(base.network, loss=value))
    if axis == "work":
        from dataclasses import replace

        return base.with_(work=replace(base.work, seconds=value))
    if axis == "copies":
        return base.with_(copies=value)
    return base.with_(nodes=value)


def _emit(rows: list[dict[str, Any]], fmt: str, output: str | None) -> None:
    """CSV and JSON carry identical values; CSV floats use repr ('.' decimal)."""
    if fmt == "json":
        text = json.dumps({"rows": rows}, indent=2, allow_nan=True) + "\n"
    else:
        buf = io.StringIO()
        if rows:
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(rows[0].keys())
            for row in rows:
                writer.writerow([repr(v) if isinstance(v, float) else v for v in row.values()])
        text = buf.getvalue()
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_speedup(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    axes, network, work, comm, policy = _scenario_axes(args, cfg)
    model_text = args.model if args.model is not None else cfg.get("run", "model", fallback="bsp")
    if model_text not in ("bsp", "conceptual"):
        raise ConfigError(f"model must be bsp or conceptual, got {model_text!r}")
    swept = [name for name, values in axes.items() if len(values) > 1]
    if len(swept) > 1:
        raise ConfigError(f"only one axis may be a list, got {swept}")
    axis = swept[0] if swept else "nodes"
    base = _base_scenario(axes, network, work, comm, policy)
    if model_text == "conceptual":
        base = base.with_(policy=RetransmitPolicy.ALL_ON_ANY_LOSS)

    rows = []
    for value in axes[axis]:
        scenario = _scenario_at(base, axis, value)
        try:
            report = (
                conceptual_speedup(scenario)
                if model_text == "conceptual"
                else expected_speedup(scenario)
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        rows.append({axis: value, **report.to_dict()})
    _emit(rows, args.format, args.output)
    return EXIT_OK


def _cmd_table2(args: argparse.Namespace) -> int:
    rows = []
    worst = 0.0
    for ref in reference_rows():
        report, errors = evaluate_reference_row(ref)
        worst = max(worst, errors["speedup"])
        row: dict[str, Any] = {"label": ref.label}
        for name in (
            "expected_rounds",
            "serial_seconds",
            "comm_seconds",
            "total_seconds",
            "speedup",
            "efficiency",
        ):
            row[f"{name}_published"] = getattr(ref.published, name)
            row[f"{name}_computed"] = getattr(report, name)
            row[f"{name}_rel_err"] = errors[name]
        rows.append(row)
    _emit(rows, args.format, args.output)
    if worst > TABLE_GATE:
        print(
            f"reference table deviates: worst speedup error {worst:.3%} > {TABLE_GATE:.0%}",
            file=sys.stderr,
        )
        return EXIT_TABLE_DEVIATION
    return EXIT_OK


def _cmd_optimal_n(args: argparse.Namespace) -> int:
    try:
        comm = CommPattern.parse(args.comm)
        optimum = optimal_nodes_conceptual(args.loss, args.copies, comm)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = [
        {
            "pattern": optimum.pattern.value,
            "monotonic": optimum.monotonic,
            "nodes": optimum.nodes if optimum.nodes is not None else "",
            "nodes_real": optimum.nodes_real if optimum.nodes_real is not None else "",
        }
    ]
    _emit(rows, args.format, args.output)
    return EXIT_OK


def _cmd_optimal_k(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    axes, network, work, comm, policy = _scenario_axes(args, cfg)
    for name, values in axes.items():
        if len(values) > 1:
            raise ConfigError(f"optimal-k takes scalars, got a list for {name}")
    base = _base_scenario(axes, network, work, comm, policy)
    if args.max_copies < 1:
        raise ConfigError(f"--max-copies must be >= 1, got {args.max_copies}")
    best = optimal_copies(base, max_copies=args.max_copies)
    rows = [
        {
            "copies": best.copies,
            "rounds_cost_product": best.rounds_cost_product,
            **best.report.to_dict(),
        }
    ]
    _emit(rows, args.format, args.output)
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    axes, network, work, comm, policy = _scenario_axes(args, cfg)
    for name, values in axes.items():
        if len(values) > 1:
            raise ConfigError(f"simulate takes scalars, got a list for {name}")
    base = _base_scenario(axes, network, work, comm, policy)
    if args.trials < 1:
        raise ConfigError(f"--trials must be >= 1, got {args.trials}")
    try:
        sim_config = SimConfig(
            scenario=base,
            trials=args.trials,
            master_seed=args.seed,
            max_rounds=args.max_rounds,
        )
        result = simulate_speedup(sim_config)
        analytic = expected_speedup(base)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    gap = result.mean_rounds - analytic.expected_rounds
    rows = [
        {
            **result.to_dict(),
            "analytic_rounds": analytic.expected_rounds,
            "analytic_speedup": analytic.speedup,
            "mean_gap_std_errors": (gap / result.std_error) if result.std_error > 0 else math.nan,
        }
    ]
    _emit(rows, args.format, args.output)
    return EXIT_OK


def _parse_hostport(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not host:
        raise ConfigError(f"expected HOST:PORT, got {text!r}")
    try:
        return host, int(port)
    except ValueError as exc:
        raise ConfigError(f"bad port in {text!r}") from exc


def _cmd_probe(args: argparse.Namespace) -> int:
    if args.import_csv:
        with open(args.import_csv) as fh:
            samples = probe_mod.samples_from_csv(fh.read())
        if not 0 <= args.row < len(samples):
            raise ConfigError(f"--row {args.row} out of range (0..{len(samples) - 1})")
        try:
            params = probe_mod.to_network_params(samples[args.row])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        text = (
            "[network]\n"
            f"loss = {params.loss!r}\n"
            f"alpha = {params.alpha!r}\n"
            f"beta = {params.beta!r}\n"
            f"packet_size = {params.packet_size}\n"
            f"bandwidth = {params.bandwidth!r}\n"
        )
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    if not args.peer:
        raise ConfigError("probe needs --peer HOST:PORT (or --import-csv)")
    sizes = _int_list(args.sizes)
    if not sizes:
        raise ConfigError("--sizes has no values")
    peer = _parse_hostport(args.peer)
    try:
        conn = probe_mod.UdpConn(peer=peer)
    except OSError as exc:
        print(f"network error: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    try:
        samples = probe_mod.run_probe(
            conn,
            packet_sizes=sizes,
            count=args.count,
            interval=args.interval,
            drain_timeout=args.drain,
        )
    except OSError as exc:
        print(f"network error: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    finally:
        conn.close()
    if all(sample.echoed == 0 for sample in samples):
        print(f"peer {args.peer} unreachable: no echoes at any size", file=sys.stderr)
        return EXIT_NETWORK
    if args.format == "json":
        rows = [dict(zip(probe_mod._CSV_FIELDS, (s.packet_size, s.sent, s.echoed, s.loss_rate, s.rtt_mean, s.rtt_p50, s.rtt_p95, s.bandwidth))) for s in samples]
        _emit(rows, "json", args.output)
    else:
        text = probe_mod.samples_to_csv(samples)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def _cmd_probe_serve(args: argparse.Namespace) -> int:
    bind = _parse_hostport(args.bind)
    try:
        conn = probe_mod.UdpConn(bind=bind)
    except OSError as exc:
        print(f"network error: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    responder = probe_mod.EchoResponder(conn)
    host, port = conn.address
    print(f"echo responder on {host}:{port}", file=sys.stderr)
    try:
        responder.serve()
    except KeyboardInterrupt:
        pass
    finally:
        conn.close()
    return EXIT_OK


_COMMANDS = {
    "speedup": _cmd_speedup,
    "table2": _cmd_table2,
    "optimal-n": _cmd_optimal_n,
    "optimal-k": _cmd_optimal_k,
    "simulate": _cmd_simulate,
    "probe": _cmd_probe,
    "probe-serve": _cmd_probe_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
