"""Per-frame audience metrics and the weighted relevance score.

A sensing client reports, for each video frame, an expression
confidence vector plus a head pose sample. Head-gesture probabilities
(nods, shakes) are estimated separately from the pose stream. The
scoring step collapses all of it into one non-negative relevance
number per frame: a weighted sum over a fixed set of scoring keys.

Anger, disgust and fear are carried in the expression vector because
the sensing layer reports them, but they are deliberately not scoring
keys: the weight profile cannot reference them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class MetricKey(str, Enum):
    """Scoring keys, in canonical order (normative for wire documents)."""

    HAPPINESS = "happiness"
    SADNESS = "sadness"
    SURPRISE = "surprise"
    NEUTRAL = "neutral"
    BROW_FURROW = "brow_furrow"
    HEAD_NOD = "head_nod"
    HEAD_SHAKE = "head_shake"


METRIC_KEYS: tuple[MetricKey, ...] = tuple(MetricKey)
METRIC_NAMES: tuple[str, ...] = tuple(k.value for k in MetricKey)


class ProfileError(ValueError):
    """Raised for weight profiles that cannot be accepted."""


def _check_unit(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must be in [0, 1], got {value!r}")


@dataclass(slots=True)
class ExpressionVector:
    """Expression classifier confidences, each in [0, 1]."""

    happiness: float = 0.0
    sadness: float = 0.0
    surprise: float = 0.0
    neutral: float = 0.0
    anger: float = 0.0
    disgust: float = 0.0
    fear: float = 0.0
    brow_furrow: float = 0.0  # brow-lowering action unit confidence

    def __post_init__(self) -> None:
        _check_unit("happiness", self.happiness)
        _check_unit("sadness", self.sadness)
        _check_unit("surprise", self.surprise)
        _check_unit("neutral", self.neutral)
        _check_unit("anger", self.anger)
        _check_unit("disgust", self.disgust)
        _check_unit("fear", self.fear)
        _check_unit("brow_furrow", self.brow_furrow)


@dataclass(slots=True)
class HeadPoseSample:
    """Head pose for one frame."""

    yaw_deg: float = 0.0  # left/right rotation, [-90, 90]
    roll_deg: float = 0.0  # tilt, [-90, 90]
    y: float = 0.5  # vertical face-center position, normalized [0, 1]

    def __post_init__(self) -> None:
        if not (-90.0 <= self.yaw_deg <= 90.0):
            raise ValueError(f"yaw_deg must be in [-90, 90], got {self.yaw_deg!r}")
        if not (-90.0 <= self.roll_deg <= 90.0):
            raise ValueError(f"roll_deg must be in [-90, 90], got {self.roll_deg!r}")
        _check_unit("y", self.y)


@dataclass(slots=True)
class MetricFrame:
    """One sensed frame for one participant.

    When no face is detected the expression and head fields are absent;
    the frame still exists (it keeps the participant registered and
    counted).
    """

    participant: str
    t_ms: int  # client-side capture time, milliseconds from session start
    face_detected: bool = True
    expressions: ExpressionVector | None = None
    head: HeadPoseSample | None = None

    def __post_init__(self) -> None:
        if not self.participant:
            raise ValueError("participant id must be non-empty")
        if self.t_ms < 0 or self.t_ms != int(self.t_ms):
            raise ValueError(f"t_ms must be a non-negative integer, got {self.t_ms!r}")
        if self.face_detected:
            if self.expressions is None or self.head is None:
                raise ValueError("face_detected frames need expressions and head")
        else:
            if self.expressions is not None or self.head is not None:
                raise ValueError("no-face frames must omit expressions and head")


@dataclass(slots=True)
class GestureEstimate:
    """Head-gesture probabilities for one frame."""

    nod_prob: float = 0.0
    shake_prob: float = 0.0

    def __post_init__(self) -> None:
        _check_unit("nod_prob", self.nod_prob)
        _check_unit("shake_prob", self.shake_prob)


@dataclass(frozen=True)
class WeightProfile:
    """Non-negative weight per scoring key.

    ``conformant`` flags whether the profile keeps the recommended
    emphasis: strictly below 0.1 on sadness and neutral, strictly above
    0.5 on brow furrowing and head nods. Non-conformant profiles are
    legal; the flag exists so a console can warn about them.
    """

    weights: dict[MetricKey, float]
    # weights in canonical key order, for the per-frame hot path
    vector: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        vec = []
        for key in METRIC_KEYS:
            w = self.weights.get(key, 0.0)
            if not math.isfinite(w) or w < 0.0:
                raise ProfileError(f"weight for {key.value} must be finite and >= 0, got {w!r}")
            vec.append(float(w))
        object.__setattr__(self, "weights", {k: v for k, v in zip(METRIC_KEYS, vec)})
        object.__setattr__(self, "vector", tuple(vec))

    @property
    def conformant(self) -> bool:
        w = self.weights
        return (
            w[MetricKey.SADNESS] < 0.1
            and w[MetricKey.NEUTRAL] < 0.1
            and w[MetricKey.BROW_FURROW] > 0.5
            and w[MetricKey.HEAD_NOD] > 0.5
        )

    def as_wire(self) -> dict[str, float]:
        return {k.value: self.weights[k] for k in METRIC_KEYS}


DEFAULT_PROFILE = WeightProfile(
    {
        MetricKey.HAPPINESS: 0.4,
        MetricKey.SADNESS: 0.05,
        MetricKey.SURPRISE: 0.4,
        MetricKey.NEUTRAL: 0.05,
        MetricKey.BROW_FURROW: 0.6,
        MetricKey.HEAD_NOD: 0.6,
        MetricKey.HEAD_SHAKE: 0.3,
    }
)


def validate_profile(weights: dict) -> WeightProfile:
    """Build a WeightProfile from a raw key->number mapping.

    Unknown keys and negative weights are rejected; missing keys default
    to weight 0. Non-conformant profiles are accepted (check
    ``profile.conformant`` to warn).
    """
    known = set(METRIC_NAMES)
    by_key: dict[MetricKey, float] = {}
    for raw_key, value in weights.items():
        name = raw_key.value if isinstance(raw_key, MetricKey) else str(raw_key)
        if name not in known:
            raise ProfileError(f"unknown metric key {name!r}")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ProfileError(f"weight for {name!r} must be a number, got {value!r}")
        by_key[MetricKey(name)] = float(value)
    return WeightProfile(by_key)


def metric_values(frame: MetricFrame, gesture: GestureEstimate) -> tuple[float, ...]:
    """Metric values for one frame, in canonical key order.

    All-zero when no face was detected, regardless of the gesture
    estimate passed in.
    """
    if not frame.face_detected:
        return (0.0,) * len(METRIC_KEYS)
    e = frame.expressions
    return (
        e.happiness,
        e.sadness,
        e.surprise,
        e.neutral,
        e.brow_furrow,
        gesture.nod_prob,
        gesture.shake_prob,
    )


def score_frame(frame: MetricFrame, gesture: GestureEstimate, profile: WeightProfile) -> float:
    """Weighted relevance of one frame: sum of weight * value over the
    scoring keys, accumulated in canonical key order (the order is part
    of the contract so independent implementations agree bit-for-bit).
    """
    if not frame.face_detected:
        return 0.0
    values = metric_values(frame, gesture)
    total = 0.0
    for w, v in zip(profile.vector, values):
        total += w * v
    return total
