"""Random trace generation shared by the oracle-equivalence and fuzz
tests. Traces are built as plain dicts (the reference's input) and
converted to package types for the engine, so both sides consume the
same values."""
import random

from spotlight.affect import (
    ExpressionVector,
    GestureEstimate,
    HeadPoseSample,
    MetricFrame,
    validate_profile,
)
from spotlight.engine import Normalization, Policy, SessionConfig

from oracle_reference import KEYS

NAME_POOL = ["alice", "bob", "carol", "dave", "erin", "frank", "grace", "heidi"]

PRESENTER = "presenter"


def random_plain_trace(r: random.Random, max_members=8, max_windows=40, max_frames=50):
    members = r.sample(NAME_POOL, r.randint(1, max_members))
    n_windows = r.randint(1, max_windows)
    window_ms = r.choice([1000, 4000, 15000])
    policy = r.choice(["affective", "affective", "random", "roundrobin"])
    normalization = r.choice(["sum", "sum", "mean"])
    seed = r.getrandbits(64)
    weights = {k: r.choice([0.0, 0.05, 0.3, 0.4, 0.6]) for k in KEYS}

    frames = []
    for wi in range(n_windows):
        # whole-window regimes so exact ties actually occur
        regime = r.random()
        times = sorted(r.randrange(window_ms) for _ in range(r.randint(0, max_frames)))
        for offset in times:
            participant = PRESENTER if r.random() < 0.05 else r.choice(members)
            if regime < 0.2:
                values = None
            elif regime < 0.5:
                values = {k: r.choice([0.0, 0.25, 0.5]) for k in KEYS}
            else:
                values = {k: round(r.random(), 3) for k in KEYS}
            frames.append(
                {"participant": participant, "t_ms": wi * window_ms + offset, "values": values}
            )

    config = {
        "window_ms": window_ms,
        "policy": policy,
        "seed": seed,
        "presenter": PRESENTER,
        "weights": weights,
        "normalization": normalization,
        "horizon_ms": None,
    }
    return frames, config


def to_typed_pairs(frames):
    """Plain frames -> (MetricFrame, GestureEstimate) pairs carrying the
    same metric values."""
    pairs = []
    for frame in frames:
        values = frame["values"]
        if values is None:
            typed = MetricFrame(
                participant=frame["participant"], t_ms=frame["t_ms"], face_detected=False
            )
            gesture = GestureEstimate(0.0, 0.0)
        else:
            typed = MetricFrame(
                participant=frame["participant"],
                t_ms=frame["t_ms"],
                face_detected=True,
                expressions=ExpressionVector(
                    happiness=values["happiness"],
                    sadness=values["sadness"],
                    surprise=values["surprise"],
                    neutral=values["neutral"],
                    brow_furrow=values["brow_furrow"],
                ),
                head=HeadPoseSample(yaw_deg=0.0, roll_deg=0.0, y=0.5),
            )
            gesture = GestureEstimate(values["head_nod"], values["head_shake"])
        pairs.append((typed, gesture))
    return pairs


def to_typed_config(config) -> SessionConfig:
    return SessionConfig(
        window_ms=config["window_ms"],
        policy=Policy(config["policy"]),
        seed=config["seed"],
        presenter=config["presenter"],
        profile=validate_profile(config["weights"]),
        normalization=Normalization(config["normalization"]),
    )


def decision_tuple(d):
    """Normalized comparison form for an engine decision."""
    return (
        d.window_index,
        d.participant,
        d.score,
        d.reason.value,
        d.t_start_ms,
        d.t_end_ms,
        d.breakdown,
    )


def ref_tuple(d):
    """Same form for a reference decision dict."""
    return (
        d["window"],
        d["participant"],
        d["score"],
        d["reason"],
        d["t_start_ms"],
        d["t_end_ms"],
        d["breakdown"],
    )
