"""Line-oriented JSON wire protocol.

Every message is one single-line UTF-8 JSON document with a ``type``
field. Field names and their canonical order are part of the contract:
``encode`` always emits the canonical form, and ``decode(encode(m))``
is the identity. Unknown extra fields on inbound messages are ignored
so older readers keep working.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .affect import (
    METRIC_KEYS,
    ExpressionVector,
    HeadPoseSample,
    MetricFrame,
    WeightProfile,
    validate_profile,
)
from .engine import (
    Normalization,
    Pause,
    Pin,
    Policy,
    Reason,
    Resume,
    SessionConfig,
    SetWeights,
    SpotlightDecision,
    Unpin,
)

ROLES = ("audience", "presenter", "console")

_EXPR_FIELDS = (
    "happiness",
    "sadness",
    "surprise",
    "neutral",
    "anger",
    "disgust",
    "fear",
    "brow_furrow",
)
_HEAD_FIELDS = ("yaw_deg", "roll_deg", "y")


class WireError(ValueError):
    """Raised for lines that cannot be decoded into a valid message."""


@dataclass(frozen=True)
class Join:
    session: str
    participant: str
    role: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise WireError(f"role must be one of {ROLES}, got {self.role!r}")
        if not self.session or not self.participant:
            raise WireError("session and participant must be non-empty")


@dataclass(frozen=True)
class Notice:
    window: int
    spotlighted: bool = True


@dataclass(frozen=True)
class ConfigSnapshot:
    """Live configuration as broadcast to consoles."""

    window_ms: int
    policy: Policy
    profile: WeightProfile
    paused: bool
    pinned: str | None
    presenter: str | None = None


@dataclass(frozen=True)
class ErrorMessage:
    code: str
    detail: str


Message = (
    Join
    | MetricFrame
    | SpotlightDecision
    | Notice
    | SetWeights
    | Pin
    | Unpin
    | Pause
    | Resume
    | ConfigSnapshot
    | ErrorMessage
)


def _dump(doc: dict) -> str:
    return json.dumps(doc, separators=(",", ":"), allow_nan=False)


def encode(message: Message) -> str:
    """Canonical single-line encoding of any wire message."""
    if isinstance(message, Join):
        return _dump(
            {
                "type": "join",
                "session": message.session,
                "participant": message.participant,
                "role": message.role,
            }
        )
    if isinstance(message, MetricFrame):
        doc: dict = {
            "type": "metrics",
            "participant": message.participant,
            "t_ms": message.t_ms,
            "face": message.face_detected,
        }
        if message.face_detected:
            e, h = message.expressions, message.head
            doc["expr"] = {name: getattr(e, name) for name in _EXPR_FIELDS}
            doc["head"] = {name: getattr(h, name) for name in _HEAD_FIELDS}
        return _dump(doc)
    if isinstance(message, SpotlightDecision):
        return _dump(
            {
                "type": "spotlight",
                "window": message.window_index,
                "participant": message.participant,
                "score": message.score,
                "reason": message.reason.value,
                "t_start_ms": message.t_start_ms,
                "t_end_ms": message.t_end_ms,
                "breakdown": {k.value: message.breakdown.get(k.value, 0.0) for k in METRIC_KEYS}
                if message.breakdown
                else {},
            }
        )
    if isinstance(message, Notice):
        return _dump({"type": "notice", "spotlighted": message.spotlighted, "window": message.window})
    if isinstance(message, SetWeights):
        profile = validate_profile(message.weights)
        return _dump({"type": "set_weights", "profile": profile.as_wire()})
    if isinstance(message, Pin):
        return _dump({"type": "pin", "participant": message.participant})
    if isinstance(message, Unpin):
        return _dump({"type": "unpin"})
    if isinstance(message, Pause):
        return _dump({"type": "pause"})
    if isinstance(message, Resume):
        return _dump({"type": "resume"})
    if isinstance(message, ConfigSnapshot):
        return _dump(
            {
                "type": "config",
                "window_ms": message.window_ms,
                "policy": message.policy.value,
                "profile": message.profile.as_wire(),
                "paused": message.paused,
                "pinned": message.pinned,
                "presenter": message.presenter,
            }
        )
    if isinstance(message, ErrorMessage):
        return _dump({"type": "error", "code": message.code, "detail": message.detail})
    raise WireError(f"cannot encode {type(message).__name__}")


def _require(doc: dict, field: str, kinds, context: str):
    if field not in doc:
        raise WireError(f"{context} message missing {field!r}")
    value = doc[field]
    allowed = kinds if isinstance(kinds, tuple) else (kinds,)
    if isinstance(value, bool) and bool not in allowed:
        raise WireError(f"{context} field {field!r} has wrong type: {value!r}")
    if not isinstance(value, allowed):
        raise WireError(f"{context} field {field!r} has wrong type: {value!r}")
    return value


def _number(doc: dict, field: str, context: str) -> float:
    return float(_require(doc, field, (int, float), context))


def decode_metrics(doc: dict) -> MetricFrame:
    participant = _require(doc, "participant", str, "metrics")
    t_ms = _require(doc, "t_ms", int, "metrics")
    face = _require(doc, "face", bool, "metrics")
    if not face:
        try:
            return MetricFrame(participant=participant, t_ms=t_ms, face_detected=False)
        except ValueError as exc:
            raise WireError(str(exc)) from exc
    expr_doc = _require(doc, "expr", dict, "metrics")
    head_doc = _require(doc, "head", dict, "metrics")
    try:
        expr = ExpressionVector(**{n: _number(expr_doc, n, "expr") for n in _EXPR_FIELDS})
        head = HeadPoseSample(**{n: _number(head_doc, n, "head") for n in _HEAD_FIELDS})
        return MetricFrame(
            participant=participant, t_ms=t_ms, face_detected=True, expressions=expr, head=head
        )
    except ValueError as exc:
        raise WireError(str(exc)) from exc


def decode(line: str) -> Message:
    """Parse one wire line into its message object."""
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise WireError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise WireError("message must be a JSON object")
    kind = doc.get("type")
    if kind == "join":
        return Join(
            session=_require(doc, "session", str, "join"),
            participant=_require(doc, "participant", str, "join"),
            role=_require(doc, "role", str, "join"),
        )
    if kind == "metrics":
        return decode_metrics(doc)
    if kind == "spotlight":
        participant = doc.get("participant")
        if participant is not None and not isinstance(participant, str):
            raise WireError("spotlight field 'participant' has wrong type")
        try:
            reason = Reason(_require(doc, "reason", str, "spotlight"))
        except ValueError as exc:
            raise WireError(f"unknown reason {doc.get('reason')!r}") from exc
        breakdown_doc = doc.get("breakdown", {})
        if not isinstance(breakdown_doc, dict):
            raise WireError("spotlight field 'breakdown' has wrong type")
        return SpotlightDecision(
            window_index=_require(doc, "window", int, "spotlight"),
            participant=participant,
            score=_number(doc, "score", "spotlight"),
            reason=reason,
            t_start_ms=_require(doc, "t_start_ms", int, "spotlight"),
            t_end_ms=_require(doc, "t_end_ms", int, "spotlight"),
            breakdown={str(k): float(v) for k, v in breakdown_doc.items()},
        )
    if kind == "notice":
        return Notice(
            window=_require(doc, "window", int, "notice"),
            spotlighted=_require(doc, "spotlighted", bool, "notice"),
        )
    if kind == "set_weights":
        return SetWeights(weights=_require(doc, "profile", dict, "set_weights"))
    if kind == "pin":
        return Pin(participant=_require(doc, "participant", str, "pin"))
    if kind == "unpin":
        return Unpin()
    if kind == "pause":
        return Pause()
    if kind == "resume":
        return Resume()
    if kind == "config":
        try:
            policy = Policy(_require(doc, "policy", str, "config"))
        except ValueError as exc:
            raise WireError(f"unknown policy {doc.get('policy')!r}") from exc
        pinned = doc.get("pinned")
        if pinned is not None and not isinstance(pinned, str):
            raise WireError("config field 'pinned' has wrong type")
        presenter = doc.get("presenter")
        if presenter is not None and not isinstance(presenter, str):
            raise WireError("config field 'presenter' has wrong type")
        try:
            profile = validate_profile(_require(doc, "profile", dict, "config"))
        except ValueError as exc:
            raise WireError(str(exc)) from exc
        return ConfigSnapshot(
            window_ms=_require(doc, "window_ms", int, "config"),
            policy=policy,
            profile=profile,
            paused=_require(doc, "paused", bool, "config"),
            pinned=pinned,
            presenter=presenter,
        )
    if kind == "error":
        return ErrorMessage(
            code=_require(doc, "code", str, "error"),
            detail=_require(doc, "detail", str, "error"),
        )
    raise WireError(f"unknown message type {kind!r}")


# --- session config documents (trace headers, weight files) -----------------


def encode_session_config(config: SessionConfig) -> dict:
    return {
        "window_ms": config.window_ms,
        "policy": config.policy.value,
        "seed": config.seed,
        "presenter": config.presenter,
        "normalization": config.normalization.value,
        "profile": config.profile.as_wire(),
    }


def decode_session_config(doc: dict) -> SessionConfig:
    if not isinstance(doc, dict):
        raise WireError("config must be a JSON object")
    try:
        return SessionConfig(
            window_ms=_require(doc, "window_ms", int, "config"),
            policy=Policy(_require(doc, "policy", str, "config")),
            seed=_require(doc, "seed", int, "config"),
            presenter=doc.get("presenter"),
            normalization=Normalization(doc.get("normalization", "sum")),
            profile=validate_profile(_require(doc, "profile", dict, "config")),
        )
    except WireError:
        raise
    except ValueError as exc:
        raise WireError(str(exc)) from exc
