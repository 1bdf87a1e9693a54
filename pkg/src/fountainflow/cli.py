"""Command line front end.

Subcommands:
  simulate        paired slotted run (fountain protocol vs ARQ baseline)
  emurun          stream through the in-process impaired network
  send / recv     real UDP endpoints
  bench-codec     raw encode/decode throughput for one block shape
  bench-loopback  end-to-end processing latency, sender+receiver in-process
  scenario        list shipped scenario files

Exit codes: 0 success, 2 bad flags or scenario schema, 3 port bind
failure, 1 other runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import metrics
from .scenarios import ScenarioError, load_scenario, shipped_scenario_path, \
    shipped_scenarios

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_BIND = 3


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    from .sim.slotted import paired_run

    scenario = load_scenario(args.scenario, seed_override=args.seed)
    if scenario.mode != "simulate":
        print(f"scenario {scenario.name} has mode {scenario.mode}, "
              f"expected simulate", file=sys.stderr)
        return EXIT_USAGE
    paired = paired_run(scenario.sim, scenario.params)
    out = _out_dir(args)
    metrics.write_sim_frames_csv(out / "frames.csv", paired)
    metrics.write_bandwidth_csv(out / "bandwidth.csv", paired)
    rows = metrics.read_csv(out / "frames.csv")
    summary = {
        "scenario": scenario.name,
        "seed": scenario.seed,
        "mode": "simulate",
        "protocols": {
            "liquid": metrics.summary_from_sim_frames(rows, "liquid"),
            "oracle": metrics.summary_from_sim_frames(rows, "oracle"),
        },
    }
    metrics.write_summary_json(out / "summary.json", summary)
    for name in ("liquid", "oracle"):
        print(metrics.format_summary_line(name, summary["protocols"][name]))
    print(f"wrote {out}/frames.csv, bandwidth.csv, summary.json")
    return EXIT_OK


def cmd_emurun(args) -> int:
    from .transport.emulator import run_emulated

    scenario = load_scenario(args.scenario, seed_override=args.seed,
                             duration_override_s=args.duration_s)
    if scenario.mode != "emurun":
        print(f"scenario {scenario.name} has mode {scenario.mode}, "
              f"expected emurun", file=sys.stderr)
        return EXIT_USAGE
    result = run_emulated(scenario.emu_stream, scenario.emu_impairment,
                          scenario.params, codec_name=scenario.emu_codec,
                          feedback=scenario.emu_feedback)
    out = _out_dir(args)
    metrics.write_emu_frames_csv(out / "frames.csv", result)
    rows = metrics.read_csv(out / "frames.csv")
    summary = {
        "scenario": scenario.name,
        "seed": scenario.seed,
        "mode": "emurun",
        "codec": scenario.emu_codec,
        "feedback": {
            "packets": result.feedback_packets,
            "bytes": result.feedback_bytes,
            "fraction_of_forward": (result.feedback_bytes / result.data_bytes
                                    if result.data_bytes else 0.0),
        },
        "protocols": {"liquid": metrics.summary_from_emu_frames(rows)},
    }
    metrics.write_summary_json(out / "summary.json", summary)
    print(metrics.format_summary_line("liquid", summary["protocols"]["liquid"]))
    print(f"wrote {out}/frames.csv, summary.json")
    return EXIT_OK


def cmd_send(args) -> int:
    from .planner import PlanParams
    from .transport.profiles import StreamProfile
    from .transport.udp import PortBindError, run_sender

    stream = StreamProfile(fps=args.fps, frame_sizes=(args.frame_size,),
                           duration_s=args.duration_s,
                           symbol_size=args.symbol_size)
    try:
        report = run_sender((args.host, args.port), stream, PlanParams(),
                            bind_port=args.bind_port,
                            rtt_hint_ms=args.rtt_hint_ms)
    except PortBindError as exc:
        print(exc, file=sys.stderr)
        return EXIT_BIND
    print(f"sent {report.frames_submitted} frames, "
          f"{report.packets_sent} packets ({report.bytes_sent} bytes), "
          f"feedback packets {report.feedback_packets}, "
          f"incomplete {report.incomplete_blocks}")
    return EXIT_OK


def cmd_recv(args) -> int:
    from .transport.udp import PortBindError, run_receiver

    try:
        records = run_receiver(("0.0.0.0", args.port),
                               expected_frames=args.frames,
                               idle_timeout_s=args.idle_timeout_s)
    except PortBindError as exc:
        print(exc, file=sys.stderr)
        return EXIT_BIND
    delivered = [r for r in records if r.delivered]
    if args.out:
        out = _out_dir(args)
        from .metrics import write_emu_frames_csv

        class _Wrap:
            frames = records
        write_emu_frames_csv(out / "frames.csv", _Wrap)
        print(f"wrote {out}/frames.csv")
    lat = [r.latency_ms for r in delivered]
    if lat:
        print(f"received {len(delivered)} blocks; assembly time "
              f"p50={metrics.percentile(lat, 50):.3f}ms "
              f"p95={metrics.percentile(lat, 95):.3f}ms "
              f"max={max(lat):.3f}ms")
    else:
        print("received no complete blocks")
    return EXIT_OK


def cmd_bench_codec(args) -> int:
    from .transport.bench import bench_codec

    stats = bench_codec(args.k, args.symbol_size, loss=args.loss,
                        repetitions=args.repetitions)
    print(f"k={stats['k']} symbol_size={stats['symbol_size']} "
          f"block={stats['block_mb']:.3f}MB: "
          f"encode {stats['encode_ms_median']:.2f}ms "
          f"({stats['encode_mbps']:.0f} MB/s), "
          f"decode {stats['decode_ms_median']:.2f}ms "
          f"({stats['decode_mbps']:.0f} MB/s)")
    return EXIT_OK


def cmd_bench_loopback(args) -> int:
    from .transport.bench import loopback_bench

    out_rows = []
    for size in args.frame_size:
        r = loopback_bench(size, frames=args.frames,
                           induced_loss=args.loss, seed=args.bench_seed)
        lat = sorted(r.samples_ms)
        med = metrics.percentile(lat, 50)
        p99 = metrics.percentile(lat, 99)
        print(f"{size} B frames (k={r.k}): delivered "
              f"{r.symbols_delivered}/{args.frames}, median {med:.3f} ms, "
              f"p99 {p99:.3f} ms, max {lat[-1]:.3f} ms, "
              f"sent ratio {r.symbols_sent / max(1, args.frames) / r.k:.4f}")
        out_rows.extend([size, i, s] for i, s in enumerate(r.samples_ms))
    if args.out:
        out = _out_dir(args)
        metrics.write_csv(out / "latency_samples.csv",
                          ["frame_size", "sample_idx", "latency_ms"], out_rows)
        print(f"wrote {out}/latency_samples.csv")
    return EXIT_OK


def cmd_scenario(args) -> int:
    if args.action == "list":
        for name in shipped_scenarios():
            path = shipped_scenario_path(name)
            desc = ""
            try:
                import json
                desc = json.loads(path.read_text()).get("description", "")
            except Exception:
                pass
            print(f"{name}: {desc}")
        return EXIT_OK
    print(f"unknown scenario action {args.action}", file=sys.stderr)
    return EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fountainflow",
        description="Fountain-coded block delivery: simulator, network "
                    "emulation, UDP endpoints, and benchmarks.")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="paired slotted run, CSV outputs")
    sim.add_argument("--scenario", required=True,
                     help="scenario file path or shipped scenario name")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", default="out")
    sim.set_defaults(fn=cmd_simulate)

    emu = sub.add_parser("emurun", help="emulated-network run, CSV outputs")
    emu.add_argument("--scenario", required=True)
    emu.add_argument("--seed", type=int, default=None)
    emu.add_argument("--duration-s", type=float, default=None,
                     help="override the scenario's stream duration")
    emu.add_argument("--out", default="out")
    emu.set_defaults(fn=cmd_emurun)

    snd = sub.add_parser("send", help="stream frames to a UDP receiver")
    snd.add_argument("--host", required=True)
    snd.add_argument("--port", type=int, required=True)
    snd.add_argument("--bind-port", type=int, default=0)
    snd.add_argument("--fps", type=float, default=30.0)
    snd.add_argument("--frame-size", type=int, default=40_000)
    snd.add_argument("--duration-s", type=float, default=10.0)
    snd.add_argument("--symbol-size", type=int, default=1250)
    snd.add_argument("--rtt-hint-ms", type=float, default=40.0)
    snd.set_defaults(fn=cmd_send)

    rcv = sub.add_parser("recv", help="receive a UDP stream")
    rcv.add_argument("--port", type=int, required=True)
    rcv.add_argument("--frames", type=int, default=None,
                     help="stop after this many delivered blocks")
    rcv.add_argument("--idle-timeout-s", type=float, default=10.0)
    rcv.add_argument("--out", default=None)
    rcv.set_defaults(fn=cmd_recv)

    bc = sub.add_parser("bench-codec", help="raw codec throughput")
    bc.add_argument("--k", type=int, default=200)
    bc.add_argument("--symbol-size", type=int, default=1250)
    bc.add_argument("--loss", type=float, default=0.10)
    bc.add_argument("--repetitions", type=int, default=20)
    bc.set_defaults(fn=cmd_bench_codec)

    bl = sub.add_parser("bench-loopback",
                        help="in-process end-to-end processing latency")
    bl.add_argument("--frame-size", type=int, nargs="+",
                    default=[62_500, 125_000, 250_000, 500_000])
    bl.add_argument("--frames", type=int, default=10_000)
    bl.add_argument("--loss", type=float, default=0.10)
    bl.add_argument("--bench-seed", type=int, default=1)
    bl.add_argument("--out", default=None)
    bl.set_defaults(fn=cmd_bench_loopback)

    sc = sub.add_parser("scenario", help="shipped scenario files")
    sc.add_argument("action", choices=["list"])
    sc.set_defaults(fn=cmd_scenario)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
