"""Coverage experiment: weighted selection vs uniform choice.

Runs a skewed audience (2 expressive members among 5 stoics) under the
affective, random and roundrobin policies across many engine seeds and
prints per-policy coverage and dwell statistics.

    python3 scripts/coverage_experiment.py --seeds 100 --out results.json
"""
import argparse
import json
import statistics
import sys
import time

from spotlight import (
    AudienceMember,
    Policy,
    ScenarioSpec,
    SessionConfig,
    archetype,
    compare_policies,
)
from spotlight.cli import _render_comparison_report


def skewed_scenario(duration_ms: int, fps: float) -> ScenarioSpec:
    expressive = (
        AudienceMember("nodder", archetype("nodder")),
        AudienceMember("confused", archetype("confused")),
    )
    stoics = tuple(AudienceMember(f"s{i}", archetype("stoic")) for i in range(1, 6))
    return ScenarioSpec(duration_ms=duration_ms, fps=fps, audience=expressive + stoics, seed=0)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=100)
    parser.add_argument("--duration-ms", type=int, default=300_000)
    parser.add_argument("--fps", type=float, default=5.0)
    parser.add_argument("--window-ms", type=int, default=15_000)
    parser.add_argument("--out", metavar="FILE", help="write the full report JSON here")
    args = parser.parse_args(argv)

    scenario = skewed_scenario(args.duration_ms, args.fps)
    config = SessionConfig(window_ms=args.window_ms, seed=0)
    t0 = time.monotonic()
    comparison = compare_policies(
        scenario,
        [Policy.AFFECTIVE, Policy.RANDOM, Policy.ROUND_ROBIN],
        n_seeds=args.seeds,
        config=config,
    )
    elapsed = time.monotonic() - t0

    doc = comparison.as_doc()
    sys.stdout.write(_render_comparison_report(doc))
    affective = comparison.policies[0]
    for member in ("nodder", "confused"):
        dwell = statistics.median(r.dwell[member] for r in affective.runs)
        print(f"affective dwell median for {member}: {dwell:.0f} windows")
    print(f"# {3 * args.seeds} runs in {elapsed:.1f}s")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(doc, f, indent=2)
        print(f"# wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
