"""Synthetic audiences for closed-loop experiments.

Archetypes are test fixtures, not psychology: each one is a small
recipe for baseline expression values plus timed episodes (head
oscillations or expression spikes) over constant signals with Gaussian
sensor noise. A scenario pins the audience, duration, frame rate and a
seed; frame generation is deterministic given the scenario.

Per-member draws come from independent numpy generators seeded by
(scenario seed, member index), in a fixed order: episode gaps, episode
kinds (mixed archetype only), then the y / yaw / roll noise arrays.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .affect import ExpressionVector, HeadPoseSample, MetricFrame
from .engine import (
    Policy,
    SessionConfig,
    SpotlightDecision,
    run_session,
)
from .gestures import DetectorConfig, estimate_frames
from .wire import encode

NOD_FREQ_HZ = 1.5  # head oscillation frequency during nod/shake episodes
EPISODE_SPIKE = 0.9  # expression confidence during smile/furrow episodes

_KINDS = ("nod", "shake", "smile", "furrow")


@dataclass(frozen=True)
class Archetype:
    """Behavior recipe for one synthetic audience member."""

    name: str
    kind: str | None = None  # episode kind; None means no episodes
    event_rate: float = 4.0  # episodes per minute
    episode_len_ms: float = 2000.0
    baseline: ExpressionVector = field(default_factory=ExpressionVector)
    nod_amplitude: float = 0.02  # normalized y units
    shake_amplitude: float = 6.0  # degrees
    noise_std_y: float = 0.001
    noise_std_yaw: float = 0.3
    face_present: bool = True

    def __post_init__(self) -> None:
        if self.kind is not None and self.kind not in _KINDS and self.kind != "mixed":
            raise ValueError(f"unknown episode kind {self.kind!r}")
        if self.event_rate < 0 or self.episode_len_ms < 0:
            raise ValueError("event_rate and episode_len_ms must be >= 0")
        if self.noise_std_y < 0 or self.noise_std_yaw < 0:
            raise ValueError("noise levels must be >= 0")


_BASE_ARCHETYPES = {
    "nodder": dict(kind="nod", baseline=dict(happiness=0.1)),
    "smiler": dict(kind="smile", baseline=dict(happiness=0.2)),
    "confused": dict(kind="furrow", baseline=dict(brow_furrow=0.15)),
    "stoic": dict(kind=None, baseline=dict()),
    "sleeper": dict(kind=None, baseline=dict(neutral=0.7, sadness=0.4)),
    "camera_off": dict(kind=None, face_present=False),
    "mixed": dict(kind="mixed", baseline=dict(happiness=0.1)),
}

ARCHETYPE_NAMES = tuple(_BASE_ARCHETYPES)


def archetype(name: str, **overrides) -> Archetype:
    """Named archetype with optional parameter overrides. ``baseline``
    may be passed as a plain field->value dict."""
    if name not in _BASE_ARCHETYPES:
        raise ValueError(f"unknown archetype {name!r} (have {', '.join(ARCHETYPE_NAMES)})")
    params: dict = {"name": name, **_BASE_ARCHETYPES[name]}
    params.update(overrides)
    base = params.get("baseline", {})
    if isinstance(base, dict):
        params["baseline"] = ExpressionVector(**base)
    return Archetype(**params)


@dataclass(frozen=True)
class AudienceMember:
    participant: str
    archetype: Archetype


@dataclass(frozen=True)
class ScenarioSpec:
    duration_ms: int
    fps: float
    audience: tuple[AudienceMember, ...]
    presenter: str = "presenter"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.duration_ms <= 0:
            raise ValueError("duration_ms must be > 0")
        if not (self.fps > 0):
            raise ValueError("fps must be > 0")
        object.__setattr__(self, "audience", tuple(self.audience))
        if not self.audience:
            raise ValueError("audience must be non-empty")
        ids = [m.participant for m in self.audience]
        if len(set(ids)) != len(ids):
            raise ValueError("audience participant ids must be unique")
        if self.presenter in ids:
            raise ValueError("presenter cannot also be an audience member")


def replace_expr(base: ExpressionVector, **changes) -> ExpressionVector:
    values = {
        name: getattr(base, name)
        for name in (
            "happiness",
            "sadness",
            "surprise",
            "neutral",
            "anger",
            "disgust",
            "fear",
            "brow_furrow",
        )
    }
    values.update(changes)
    return ExpressionVector(**values)


def _episodes(member: Archetype, duration_ms: int, rng: np.random.Generator):
    """Non-overlapping (start_ms, end_ms, kind) episodes."""
    if member.kind is None or member.event_rate == 0:
        return []
    mean_gap = 60_000.0 / member.event_rate
    episodes = []
    cursor = 0.0
    while True:
        start = cursor + rng.exponential(mean_gap)
        if start >= duration_ms:
            break
        kind = member.kind
        if kind == "mixed":
            kind = _KINDS[int(rng.integers(0, len(_KINDS)))]
        episodes.append((start, start + member.episode_len_ms, kind))
        cursor = start + member.episode_len_ms
    return episodes


def gen_frames(scenario: ScenarioSpec) -> list[MetricFrame]:
    """Deterministic time-ordered frame stream for the whole audience.

    Emits floor(duration*fps/1000) frames per member at t = floor(i*1000/fps),
    interleaved per tick in audience order. The head-pose fields carry
    the raw signals the gesture detectors consume.
    """
    n = int(scenario.duration_ms * scenario.fps // 1000)
    t_ms = [int(i * 1000.0 / scenario.fps) for i in range(n)]
    columns: list[list[MetricFrame]] = []
    for index, member in enumerate(scenario.audience):
        arch = member.archetype
        rng = np.random.default_rng(np.random.SeedSequence((scenario.seed, index)))
        if not arch.face_present:
            columns.append(
                [MetricFrame(member.participant, t, face_detected=False) for t in t_ms]
            )
            continue
        episodes = _episodes(arch, scenario.duration_ms, rng)
        t = np.asarray(t_ms, dtype=float)
        y = np.full(n, 0.5)
        yaw = np.zeros(n)
        smile_mask = np.zeros(n, dtype=bool)
        furrow_mask = np.zeros(n, dtype=bool)
        for start, end, kind in episodes:
            mask = (t >= start) & (t < end)
            if kind in ("nod", "shake"):
                phase = 2.0 * math.pi * NOD_FREQ_HZ * (t[mask] - start) / 1000.0
                if kind == "nod":
                    y[mask] += arch.nod_amplitude * np.sin(phase)
                else:
                    yaw[mask] += arch.shake_amplitude * np.sin(phase)
            elif kind == "smile":
                smile_mask[mask] = True
            else:
                furrow_mask[mask] = True
        y = y + rng.normal(0.0, arch.noise_std_y, n)
        yaw = yaw + rng.normal(0.0, arch.noise_std_yaw, n)
        roll = rng.normal(0.0, arch.noise_std_yaw, n)
        np.clip(y, 0.0, 1.0, out=y)
        np.clip(yaw, -90.0, 90.0, out=yaw)
        np.clip(roll, -90.0, 90.0, out=roll)
        base = arch.baseline
        # expression vectors are read-only values; share the three
        # possible variants across frames instead of allocating per frame
        expr_smile = replace_expr(base, happiness=max(base.happiness, EPISODE_SPIKE))
        expr_furrow = replace_expr(base, brow_furrow=max(base.brow_furrow, EPISODE_SPIKE))
        frames = []
        participant = member.participant
        for i in range(n):
            expr = expr_smile if smile_mask[i] else expr_furrow if furrow_mask[i] else base
            frames.append(
                MetricFrame(
                    participant,
                    t_ms[i],
                    face_detected=True,
                    expressions=expr,
                    head=HeadPoseSample(yaw_deg=float(yaw[i]), roll_deg=float(roll[i]), y=float(y[i])),
                )
            )
        columns.append(frames)
    ordered: list[MetricFrame] = []
    for i in range(n):
        for column in columns:
            ordered.append(column[i])
    return ordered


@dataclass
class SessionReport:
    policy: Policy
    seed: int
    window_ms: int
    decisions: int
    distinct_shown: int
    coverage: float
    dwell: dict[str, int]
    log: list[SpotlightDecision]

    def dwell_entropy(self) -> float:
        total = sum(self.dwell.values())
        if total == 0:
            return 0.0
        h = 0.0
        for count in self.dwell.values():
            if count:
                p = count / total
                h -= p * math.log(p)
        return h

    def as_doc(self) -> dict:
        return {
            "type": "session_report",
            "policy": self.policy.value,
            "seed": self.seed,
            "window_ms": self.window_ms,
            "decisions": self.decisions,
            "distinct_shown": self.distinct_shown,
            "coverage": self.coverage,
            "dwell_entropy": self.dwell_entropy(),
            "dwell": dict(sorted(self.dwell.items())),
            "windows": [json.loads(encode(d)) for d in self.log],
        }


def run_scenario(
    scenario: ScenarioSpec,
    config: SessionConfig,
    detector: DetectorConfig | None = None,
) -> SessionReport:
    """Generate frames, estimate gestures, run the session, aggregate.

    The scenario's presenter id overrides config.presenter. Only
    complete windows are reported: exactly floor(duration / window)
    decisions.
    """
    config = replace(config, presenter=scenario.presenter)
    frames = gen_frames(scenario)
    estimates = estimate_frames(frames, detector)
    decisions = run_session(
        zip(frames, estimates), config, horizon_ms=scenario.duration_ms
    )[: scenario.duration_ms // config.window_ms]
    dwell = Counter(d.participant for d in decisions if d.participant is not None)
    full_dwell = {m.participant: dwell.get(m.participant, 0) for m in scenario.audience}
    return SessionReport(
        policy=config.policy,
        seed=config.seed,
        window_ms=config.window_ms,
        decisions=len(decisions),
        distinct_shown=len(dwell),
        coverage=len(dwell) / len(scenario.audience),
        dwell=full_dwell,
        log=decisions,
    )


@dataclass
class PolicySummary:
    policy: Policy
    seeds: int
    coverage_median: float
    coverage_iqr: tuple[float, float]
    entropy_median: float
    entropy_iqr: tuple[float, float]
    decisions_median: float
    runs: list[SessionReport]

    def as_doc(self) -> dict:
        return {
            "policy": self.policy.value,
            "seeds": self.seeds,
            "coverage": {"median": self.coverage_median, "iqr": list(self.coverage_iqr)},
            "dwell_entropy": {"median": self.entropy_median, "iqr": list(self.entropy_iqr)},
            "decisions": {"median": self.decisions_median},
            "runs": [
                {
                    "seed": r.seed,
                    "coverage": r.coverage,
                    "dwell_entropy": r.dwell_entropy(),
                    "decisions": r.decisions,
                    "distinct_shown": r.distinct_shown,
                }
                for r in self.runs
            ],
        }


@dataclass
class ComparisonReport:
    policies: list[PolicySummary]

    def as_doc(self) -> dict:
        return {"type": "comparison_report", "policies": [p.as_doc() for p in self.policies]}


def compare_policies(
    scenario: ScenarioSpec,
    policies: list[Policy],
    n_seeds: int,
    config: SessionConfig | None = None,
    detector: DetectorConfig | None = None,
) -> ComparisonReport:
    """Run the same scenario under each policy for n_seeds engine seeds
    (config.seed + i), varying nothing else. The synthetic behavior is
    pinned by scenario.seed, so differences isolate the selection
    policy."""
    if n_seeds <= 0:
        raise ValueError("n_seeds must be > 0")
    base = config or SessionConfig()
    summaries = []
    for policy in policies:
        runs = [
            run_scenario(scenario, replace(base, policy=policy, seed=base.seed + i), detector)
            for i in range(n_seeds)
        ]
        coverage = np.array([r.coverage for r in runs])
        entropy = np.array([r.dwell_entropy() for r in runs])
        decisions = np.array([float(r.decisions) for r in runs])
        summaries.append(
            PolicySummary(
                policy=policy,
                seeds=n_seeds,
                coverage_median=float(np.median(coverage)),
                coverage_iqr=(
                    float(np.percentile(coverage, 25)),
                    float(np.percentile(coverage, 75)),
                ),
                entropy_median=float(np.median(entropy)),
                entropy_iqr=(
                    float(np.percentile(entropy, 25)),
                    float(np.percentile(entropy, 75)),
                ),
                decisions_median=float(np.median(decisions)),
                runs=runs,
            )
        )
    return ComparisonReport(summaries)


# --- scenario documents -------------------------------------------------------

_MEMBER_OVERRIDES = (
    "event_rate",
    "episode_len_ms",
    "nod_amplitude",
    "shake_amplitude",
    "noise_std_y",
    "noise_std_yaw",
    "baseline",
)


def scenario_from_doc(doc: dict) -> ScenarioSpec:
    members = []
    for entry in doc.get("audience", []):
        overrides = {k: entry[k] for k in _MEMBER_OVERRIDES if k in entry}
        members.append(
            AudienceMember(
                participant=entry["participant"],
                archetype=archetype(entry["archetype"], **overrides),
            )
        )
    return ScenarioSpec(
        duration_ms=doc["duration_ms"],
        fps=doc.get("fps", 15.0),
        audience=tuple(members),
        presenter=doc.get("presenter", "presenter"),
        seed=doc.get("seed", 0),
    )


def load_scenario(path) -> ScenarioSpec:
    return scenario_from_doc(json.loads(Path(path).read_text(encoding="utf-8")))
