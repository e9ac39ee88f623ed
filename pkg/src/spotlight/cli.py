"""Command-line entry points.

Subcommands: serve (live WebSocket server), simulate (closed-loop
scenario runs), replay (trace playback, engine-direct or live),
gen-trace (scenario to .ajsonl), report (render a report document as a
table). Every run prints a banner with the resolved seed so it can be
reproduced by copy-pasting.
"""
from __future__ import annotations

import argparse
import asyncio
import json
import math
import sys
from dataclasses import replace

from .affect import DEFAULT_PROFILE, validate_profile
from .engine import DEFAULT_WINDOW_MS, Policy, SessionConfig
from .gestures import DetectorConfig, load_detector_config
from .server import run_server
from .simulator import compare_policies, gen_frames, load_scenario, run_scenario
from .traces import decision_log, read_trace, replay_decisions, replay_live, save_trace

_POLICIES = [p.value for p in Policy]


def _add_config_flags(parser: argparse.ArgumentParser, policy: bool = True) -> None:
    parser.add_argument(
        "--window-ms", type=int, default=DEFAULT_WINDOW_MS, help="selection window length"
    )
    if policy:
        parser.add_argument("--policy", choices=_POLICIES, default=None)
    parser.add_argument("--seed", type=int, default=0, help="selection RNG seed")
    parser.add_argument("--weights", metavar="FILE", help="weight profile JSON (key->number)")
    parser.add_argument("--hmm", metavar="FILE", help="gesture detector config JSON")


def _config_from_args(args, policy: str | None = None) -> SessionConfig:
    profile = DEFAULT_PROFILE
    if args.weights:
        with open(args.weights, encoding="utf-8") as f:
            profile = validate_profile(json.load(f))
        if not profile.conformant:
            print("# warning: weight profile is outside the recommended bounds", file=sys.stderr)
    return SessionConfig(
        window_ms=args.window_ms,
        policy=Policy(policy or getattr(args, "policy", None) or "affective"),
        seed=args.seed,
        profile=profile,
    )


def _detector_from_args(args) -> DetectorConfig:
    if getattr(args, "hmm", None):
        return load_detector_config(args.hmm)
    return DetectorConfig()


def _banner(config: SessionConfig) -> None:
    print(
        f"# seed={config.seed} window_ms={config.window_ms} policy={config.policy.value}",
        file=sys.stderr,
    )


def _write_out(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _parse_speed(raw: str) -> float:
    if raw == "real":
        return 1.0
    if raw == "max":
        return math.inf
    if raw.startswith("x"):
        value = float(raw[1:])
        if value <= 0:
            raise ValueError("speed factor must be > 0")
        return value
    raise ValueError(f"speed must be real, max or xN, got {raw!r}")


def cmd_serve(args) -> int:
    config = _config_from_args(args)
    _banner(config)
    try:
        asyncio.run(run_server(args.host, args.port, config, _detector_from_args(args)))
    except KeyboardInterrupt:
        pass
    return 0


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    policies = [Policy(p) for p in (args.policy or ["affective"])]
    config = _config_from_args(args, policy=policies[0].value)
    _banner(config)
    detector = _detector_from_args(args)
    if args.seeds == 1 and len(policies) == 1:
        doc = run_scenario(scenario, config, detector).as_doc()
    else:
        doc = compare_policies(scenario, policies, args.seeds, config, detector).as_doc()
    _write_out(json.dumps(doc, indent=2, sort_keys=False) + "\n", args.out)
    return 0


def cmd_gen_trace(args) -> int:
    scenario = load_scenario(args.scenario)
    config = replace(_config_from_args(args), presenter=scenario.presenter)
    _banner(config)
    count = save_trace(gen_frames(scenario), config, args.out, session=args.session)
    print(f"# wrote {count} frames to {args.out}", file=sys.stderr)
    return 0


def cmd_replay(args) -> int:
    trace = read_trace(args.trace)
    _banner(trace.config)
    speed = _parse_speed(args.speed)
    if args.live:
        uri = f"ws://{args.host}:{args.port}"
        sent = asyncio.run(replay_live(trace, uri, speed))
        print(f"# sent {sent} frames to {uri}", file=sys.stderr)
        return 0
    decisions = replay_decisions(trace, _detector_from_args(args))
    _write_out(decision_log(decisions), args.out)
    return 0


def _render_session_report(doc: dict) -> str:
    lines = [
        f"policy={doc['policy']} seed={doc['seed']} window_ms={doc['window_ms']}",
        f"decisions={doc['decisions']} distinct_shown={doc['distinct_shown']} "
        f"coverage={doc['coverage']:.3f} dwell_entropy={doc['dwell_entropy']:.3f}",
        "",
        f"{'participant':<20} dwell",
    ]
    for participant, dwell in doc["dwell"].items():
        lines.append(f"{participant:<20} {dwell}")
    return "\n".join(lines) + "\n"


def _render_comparison_report(doc: dict) -> str:
    header = (
        f"{'policy':<12} {'seeds':>5} {'coverage':>9} {'cov_iqr':>16} "
        f"{'entropy':>8} {'decisions':>9}"
    )
    lines = [header]
    for entry in doc["policies"]:
        cov = entry["coverage"]
        ent = entry["dwell_entropy"]
        iqr = f"[{cov['iqr'][0]:.3f},{cov['iqr'][1]:.3f}]"
        lines.append(
            f"{entry['policy']:<12} {entry['seeds']:>5} {cov['median']:>9.3f} "
            f"{iqr:>16} {ent['median']:>8.3f} {entry['decisions']['median']:>9.1f}"
        )
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    with open(args.report, encoding="utf-8") as f:
        doc = json.load(f)
    kind = doc.get("type")
    if kind == "session_report":
        sys.stdout.write(_render_session_report(doc))
    elif kind == "comparison_report":
        sys.stdout.write(_render_comparison_report(doc))
    else:
        raise ValueError(f"not a report document (type={kind!r})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spotlight",
        description="audience spotlight engine: live server, simulator, traces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the live WebSocket session server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    _add_config_flags(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("simulate", help="run a synthetic scenario")
    p.add_argument("--scenario", required=True, metavar="FILE")
    p.add_argument(
        "--policy",
        choices=_POLICIES,
        action="append",
        help="selection policy (repeat to compare several)",
    )
    p.add_argument("--seeds", type=int, default=1, help="number of engine seeds")
    p.add_argument("--out", metavar="FILE", help="write the report JSON here")
    p.add_argument("--window-ms", type=int, default=DEFAULT_WINDOW_MS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights", metavar="FILE")
    p.add_argument("--hmm", metavar="FILE")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="replay a recorded trace")
    p.add_argument("trace", metavar="TRACE.ajsonl")
    p.add_argument("--live", action="store_true", help="send over the wire to a server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--speed", default="real", help="real, max or xN (live replay pacing)")
    p.add_argument("--out", metavar="FILE", help="decision log destination (engine-direct)")
    p.add_argument("--hmm", metavar="FILE")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("gen-trace", help="generate a trace from a scenario")
    p.add_argument("--scenario", required=True, metavar="FILE")
    p.add_argument("--out", required=True, metavar="FILE")
    p.add_argument("--session", default="sim", help="session id for the trace header")
    _add_config_flags(p)
    p.set_defaults(func=cmd_gen_trace)

    p = sub.add_parser("report", help="render a report document as a table")
    p.add_argument("report", metavar="REPORT.json")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
