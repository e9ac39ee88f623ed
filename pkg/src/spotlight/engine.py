"""Windowed score accumulation and spotlight selection.

Frames are scored as they arrive and accumulated per participant over
non-overlapping windows (default 15 s). When a window closes, one
participant is selected to spotlight:

* affective policy: highest accumulated score wins; exact score ties
  are broken by the seeded RNG; when the winner is already on the
  spotlight and at least two members are eligible, the second-highest
  member is shown instead (never the same member twice in a row);
* random policy: seeded uniform choice excluding the current member;
* round-robin: lexicographic cycle through the roster.

The presenter is never eligible: presenter frames are dropped at
ingest. Participants stay registered (and eligible, even at score 0)
from their first frame until the session ends.

Determinism contract: selection consumes the splitmix64 stream exactly
as documented in :mod:`spotlight.rng`; scores accumulate in frame
arrival order with per-frame contributions folded in canonical key
order. Given the same frames, gestures and config, the decision
sequence is reproducible bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .affect import (
    DEFAULT_PROFILE,
    METRIC_KEYS,
    GestureEstimate,
    MetricFrame,
    ProfileError,
    WeightProfile,
    metric_values,
    validate_profile,
)
from .rng import SplitMix64

DEFAULT_WINDOW_MS = 15_000  # the one shared default; every surface imports it

_UINT64_MAX = (1 << 64) - 1


class Policy(str, Enum):
    AFFECTIVE = "affective"
    RANDOM = "random"
    ROUND_ROBIN = "roundrobin"


class Normalization(str, Enum):
    SUM = "sum"
    MEAN = "mean"


class Reason(str, Enum):
    ARGMAX = "argmax"
    SECOND_HIGHEST_NO_REPEAT = "second_highest_no_repeat"
    TIE_BREAK = "tie_break"
    RANDOM_POLICY = "random_policy"
    ROUND_ROBIN = "round_robin"
    PINNED = "pinned"
    NO_ELIGIBLE = "no_eligible"


class ControlError(ValueError):
    """Raised for control commands that cannot be applied."""


@dataclass(frozen=True)
class SessionConfig:
    window_ms: int = DEFAULT_WINDOW_MS
    policy: Policy = Policy.AFFECTIVE
    seed: int = 0  # uint64 seed for every selection draw
    presenter: str | None = None
    profile: WeightProfile = field(default=DEFAULT_PROFILE)
    normalization: Normalization = Normalization.SUM

    def __post_init__(self) -> None:
        if self.window_ms <= 0:
            raise ValueError(f"window_ms must be > 0, got {self.window_ms!r}")
        if not (0 <= self.seed <= _UINT64_MAX):
            raise ValueError("seed must fit in uint64")


@dataclass(slots=True)
class ParticipantWindow:
    """Accumulated state for one participant within one window."""

    score: float = 0.0
    frame_count: int = 0
    # per-key contributions, aligned with METRIC_KEYS
    contributions: list[float] = field(default_factory=lambda: [0.0] * len(METRIC_KEYS))

    def breakdown(self) -> dict[str, float]:
        return {k.value: c for k, c in zip(METRIC_KEYS, self.contributions)}


@dataclass(slots=True)
class WindowScoreboard:
    window_index: int = 0
    entries: dict[str, ParticipantWindow] = field(default_factory=dict)

    def register(self, participant: str) -> ParticipantWindow:
        entry = self.entries.get(participant)
        if entry is None:
            entry = ParticipantWindow()
            self.entries[participant] = entry
        return entry


@dataclass
class SpotlightState:
    current: str | None = None
    pinned: str | None = None
    paused: bool = False
    rng: SplitMix64 = field(default_factory=lambda: SplitMix64(0))


@dataclass(slots=True)
class SpotlightDecision:
    window_index: int
    participant: str | None
    score: float
    reason: Reason
    t_start_ms: int
    t_end_ms: int
    breakdown: dict[str, float] = field(default_factory=dict)


# --- control commands -------------------------------------------------------


@dataclass(frozen=True)
class SetWeights:
    weights: dict


@dataclass(frozen=True)
class Pin:
    participant: str


@dataclass(frozen=True)
class Unpin:
    pass


@dataclass(frozen=True)
class Pause:
    pass


@dataclass(frozen=True)
class Resume:
    pass


Control = SetWeights | Pin | Unpin | Pause | Resume


# --- operations --------------------------------------------------------------


def ingest_frame(
    scoreboard: WindowScoreboard,
    frame: MetricFrame,
    gesture: GestureEstimate,
    config: SessionConfig,
) -> None:
    """Score one frame into the open window. Presenter frames are
    dropped; unknown participants are registered on first sight; no-face
    frames count toward frame_count but contribute zero score."""
    if frame.participant == config.presenter:
        return
    entry = scoreboard.entries.get(frame.participant)
    if entry is None:
        entry = scoreboard.register(frame.participant)
    entry.frame_count += 1
    if not frame.face_detected:
        return
    values = metric_values(frame, gesture)
    contributions = entry.contributions
    frame_score = 0.0
    for i, (w, v) in enumerate(zip(config.profile.vector, values)):
        c = w * v
        frame_score += c
        contributions[i] += c
    entry.score += frame_score


def effective_score(entry: ParticipantWindow, config: SessionConfig) -> float:
    if config.normalization is Normalization.MEAN:
        return entry.score / entry.frame_count if entry.frame_count else 0.0
    return entry.score


def _pick_top(
    candidates: list[str],
    scores: dict[str, float],
    rng: SplitMix64,
) -> tuple[str, bool]:
    """Argmax with seeded tie break over lexicographically sorted
    candidates. Returns (winner, tie_was_broken). Exact float equality
    defines the tie set; no epsilon."""
    best = max(scores[p] for p in candidates)
    top = [p for p in candidates if scores[p] == best]
    if len(top) == 1:
        return top[0], False
    return rng.pick(top), True


def close_window(
    scoreboard: WindowScoreboard,
    state: SpotlightState,
    config: SessionConfig,
) -> tuple[SpotlightDecision, SpotlightState, WindowScoreboard]:
    """Select for the closing window and roll the scoreboard over.

    The returned scoreboard keeps every registered participant with
    zeroed accumulators. state.current always becomes the decision's
    participant (None while paused or with an empty roster).
    """
    wi = scoreboard.window_index
    t_start = wi * config.window_ms
    t_end = (wi + 1) * config.window_ms
    eligible = sorted(scoreboard.entries)

    participant: str | None = None
    reason = Reason.NO_ELIGIBLE

    if state.paused:
        participant = None
    elif state.pinned is not None:
        participant, reason = state.pinned, Reason.PINNED
    elif eligible:
        scores = {p: effective_score(scoreboard.entries[p], config) for p in eligible}
        if config.policy is Policy.AFFECTIVE:
            pick, tied = _pick_top(eligible, scores, state.rng)
            if pick == state.current and len(eligible) >= 2:
                rest = [p for p in eligible if p != state.current]
                pick, _ = _pick_top(rest, scores, state.rng)
                reason = Reason.SECOND_HIGHEST_NO_REPEAT
            else:
                reason = Reason.TIE_BREAK if tied else Reason.ARGMAX
            participant = pick
        elif config.policy is Policy.RANDOM:
            candidates = [p for p in eligible if p != state.current] or eligible
            participant = state.rng.pick(candidates)
            reason = Reason.RANDOM_POLICY
        else:  # round-robin
            if state.current in scoreboard.entries:
                idx = (eligible.index(state.current) + 1) % len(eligible)
            else:
                idx = 0
            participant = eligible[idx]
            reason = Reason.ROUND_ROBIN

    if participant is not None:
        entry = scoreboard.entries[participant]
        decision = SpotlightDecision(
            window_index=wi,
            participant=participant,
            score=effective_score(entry, config),
            reason=reason,
            t_start_ms=t_start,
            t_end_ms=t_end,
            breakdown=entry.breakdown(),
        )
    else:
        decision = SpotlightDecision(
            window_index=wi,
            participant=None,
            score=0.0,
            reason=reason,
            t_start_ms=t_start,
            t_end_ms=t_end,
            breakdown={},
        )

    state.current = participant
    fresh = WindowScoreboard(
        window_index=wi + 1,
        entries={p: ParticipantWindow() for p in scoreboard.entries},
    )
    return decision, state, fresh


def apply_control(
    state: SpotlightState,
    command: Control,
    config: SessionConfig,
    roster: set[str] | None = None,
) -> tuple[SpotlightState, SessionConfig]:
    """Apply a steering command. Mid-window accumulations are never
    rescored: a weight change affects frames ingested after it, and all
    commands become visible in decisions at the next window close.
    ``roster`` (when given) validates pin targets."""
    if isinstance(command, SetWeights):
        profile = validate_profile(command.weights)
        config = replace(config, profile=profile)
    elif isinstance(command, Pin):
        if command.participant == config.presenter:
            raise ControlError("cannot pin the presenter")
        if roster is not None and command.participant not in roster:
            raise ControlError(f"cannot pin unknown participant {command.participant!r}")
        state.pinned = command.participant
    elif isinstance(command, Unpin):
        state.pinned = None
    elif isinstance(command, Pause):
        state.paused = True
    elif isinstance(command, Resume):
        state.paused = False
    else:
        raise ControlError(f"unknown control {command!r}")
    return state, config


class SpotlightSession:
    """Stateful wrapper tying scoreboard, state and config together for
    servers and replays."""

    def __init__(self, config: SessionConfig):
        self.config = config
        self.scoreboard = WindowScoreboard()
        self.state = SpotlightState(rng=SplitMix64(config.seed))

    def register(self, participant: str) -> None:
        if participant != self.config.presenter:
            self.scoreboard.register(participant)

    def ingest(self, frame: MetricFrame, gesture: GestureEstimate) -> None:
        ingest_frame(self.scoreboard, frame, gesture, self.config)

    def close(self) -> SpotlightDecision:
        decision, self.state, self.scoreboard = close_window(
            self.scoreboard, self.state, self.config
        )
        return decision

    def control(self, command: Control) -> None:
        self.state, self.config = apply_control(
            self.state, command, self.config, roster=set(self.scoreboard.entries)
        )


def run_session(
    pairs,
    config: SessionConfig,
    horizon_ms: int | None = None,
) -> list[SpotlightDecision]:
    """Run a whole session offline over (frame, gesture) pairs sorted by
    t_ms. A frame at time t belongs to window floor(t / window_ms); one
    decision is emitted per window from 0 through the last frame's
    window, empty gaps included. ``horizon_ms`` additionally closes
    empty windows up to (but not including) the one containing
    horizon_ms, so sparse sessions still tile a fixed duration."""
    session = SpotlightSession(config)
    decisions: list[SpotlightDecision] = []
    w = config.window_ms
    last_t: int | None = None
    for frame, gesture in pairs:
        if last_t is not None and frame.t_ms < last_t:
            raise ValueError(f"frames not sorted by t_ms: {frame.t_ms} after {last_t}")
        last_t = frame.t_ms
        target = frame.t_ms // w
        while session.scoreboard.window_index < target:
            decisions.append(session.close())
        session.ingest(frame, gesture)
    if last_t is not None:
        while session.scoreboard.window_index <= last_t // w:
            decisions.append(session.close())
    if horizon_ms is not None:
        while session.scoreboard.window_index < horizon_ms // w:
            decisions.append(session.close())
    return decisions
