"""Affect-driven audience spotlighting for video presentations.

The package scores audience webcam metrics (facial expressions plus
nod/shake gesture probabilities), accumulates them over fixed windows
and picks one audience member to highlight at each window boundary.
"""
from .affect import (
    DEFAULT_PROFILE,
    METRIC_KEYS,
    ExpressionVector,
    GestureEstimate,
    HeadPoseSample,
    MetricFrame,
    MetricKey,
    ProfileError,
    WeightProfile,
    score_frame,
    validate_profile,
)
from .engine import (
    DEFAULT_WINDOW_MS,
    Control,
    ControlError,
    Normalization,
    Pause,
    Pin,
    Policy,
    Reason,
    Resume,
    SessionConfig,
    SetWeights,
    SpotlightDecision,
    SpotlightSession,
    Unpin,
    run_session,
)
from .gestures import (
    GESTURE_HMM,
    NULL_HMM,
    DetectorConfig,
    GestureDetector,
    HmmError,
    HmmParams,
    ParticipantGestures,
    Symbol,
    forward_loglik,
    llr_probability,
    load_detector_config,
    quantize,
)
from .simulator import (
    ARCHETYPE_NAMES,
    Archetype,
    AudienceMember,
    ComparisonReport,
    PolicySummary,
    ScenarioSpec,
    SessionReport,
    archetype,
    compare_policies,
    gen_frames,
    load_scenario,
    run_scenario,
    scenario_from_doc,
)
from .traces import Trace, TraceError, read_trace, replay_decisions, save_trace, write_trace
from .wire import (
    ConfigSnapshot,
    ErrorMessage,
    Join,
    Notice,
    WireError,
    decode,
    encode,
    decode_session_config,
    encode_session_config,
)

__all__ = [
    "ARCHETYPE_NAMES",
    "DEFAULT_PROFILE",
    "DEFAULT_WINDOW_MS",
    "GESTURE_HMM",
    "METRIC_KEYS",
    "NULL_HMM",
    "Archetype",
    "AudienceMember",
    "ComparisonReport",
    "ConfigSnapshot",
    "Control",
    "ControlError",
    "DetectorConfig",
    "ErrorMessage",
    "ExpressionVector",
    "GestureDetector",
    "GestureEstimate",
    "HeadPoseSample",
    "HmmError",
    "HmmParams",
    "Join",
    "MetricFrame",
    "MetricKey",
    "Normalization",
    "Notice",
    "ParticipantGestures",
    "Pause",
    "Pin",
    "Policy",
    "PolicySummary",
    "ProfileError",
    "Reason",
    "Resume",
    "ScenarioSpec",
    "SessionConfig",
    "SessionReport",
    "SetWeights",
    "SpotlightDecision",
    "SpotlightSession",
    "Symbol",
    "Trace",
    "TraceError",
    "Unpin",
    "WeightProfile",
    "WireError",
    "archetype",
    "compare_policies",
    "decode",
    "decode_session_config",
    "encode",
    "encode_session_config",
    "forward_loglik",
    "gen_frames",
    "llr_probability",
    "load_detector_config",
    "load_scenario",
    "quantize",
    "read_trace",
    "replay_decisions",
    "run_scenario",
    "run_session",
    "save_trace",
    "scenario_from_doc",
    "score_frame",
    "validate_profile",
    "write_trace",
]
