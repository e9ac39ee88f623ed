"""Head-nod and head-shake detection from pose deltas.

The detector quantizes first differences of a head signal (vertical
face position for nods, yaw for shakes) into Pos/Neg/Still symbols
using a per-axis dead zone, keeps the last ``window`` symbols, and
scores the ring under two discrete HMMs: a 3-state oscillation model
(up-phase, down-phase, pause) against a 1-state stillness model. The
per-sample gesture probability is a logistic squash of the normalized
log-likelihood ratio:

    p = logistic((loglik_gesture - loglik_null) / n_symbols * gain)

Calibration: only ``gain`` is meant to be retuned. gain=8 with the
shipped matrices puts a 1.5 Hz oscillation at p > 0.99 and a still
signal at p < 0.001 for a 30-sample window.

Two equivalent evaluation paths exist: a streaming detector for live
sessions (one sample at a time) and a vectorized batch path for
simulation and replay. They implement the same recursion and agree to
numerical tolerance; each is individually deterministic.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np

from .affect import GestureEstimate, MetricFrame


class Symbol(IntEnum):
    """Quantized signal delta; values index the emission columns."""

    POS = 0
    NEG = 1
    STILL = 2


class HmmError(ValueError):
    """Raised for malformed HMM parameters or symbol sequences."""


_ROW_TOL = 1e-9


@dataclass(frozen=True)
class HmmParams:
    """Discrete-observation HMM over the 3-symbol alphabet.

    ``emission`` columns are ordered Pos, Neg, Still.
    """

    initial: tuple[float, ...]
    transition: tuple[tuple[float, ...], ...]
    emission: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.initial)
        if n == 0:
            raise HmmError("at least one state required")
        object.__setattr__(self, "initial", tuple(float(x) for x in self.initial))
        object.__setattr__(
            self, "transition", tuple(tuple(float(x) for x in row) for row in self.transition)
        )
        object.__setattr__(
            self, "emission", tuple(tuple(float(x) for x in row) for row in self.emission)
        )
        if len(self.transition) != n or any(len(row) != n for row in self.transition):
            raise HmmError(f"transition must be {n}x{n}")
        if len(self.emission) != n or any(len(row) != len(Symbol) for row in self.emission):
            raise HmmError(f"emission must be {n}x{len(Symbol)}")
        for name, rows in (
            ("initial", (self.initial,)),
            ("transition", self.transition),
            ("emission", self.emission),
        ):
            for row in rows:
                if any(x < 0.0 or not math.isfinite(x) for x in row):
                    raise HmmError(f"{name} entries must be finite and >= 0")
                if abs(sum(row) - 1.0) > _ROW_TOL:
                    raise HmmError(f"{name} rows must sum to 1, got {sum(row)!r}")

    @property
    def n_states(self) -> int:
        return len(self.initial)


GESTURE_HMM = HmmParams(
    initial=(0.4, 0.4, 0.2),
    transition=(
        (0.15, 0.70, 0.15),  # up-phase favors flipping to down-phase
        (0.70, 0.15, 0.15),
        (0.35, 0.35, 0.30),  # pauses are short
    ),
    emission=(
        (0.80, 0.05, 0.15),
        (0.05, 0.80, 0.15),
        (0.10, 0.10, 0.80),
    ),
)

NULL_HMM = HmmParams(
    initial=(1.0,),
    transition=((1.0,),),
    emission=((0.05, 0.05, 0.90),),
)

NOD_DEAD_ZONE = 0.005  # normalized y units per sample
SHAKE_DEAD_ZONE = 2.0  # degrees per sample
DETECTOR_WINDOW = 30  # symbols kept, ~2 s at 15 fps
DETECTOR_GAIN = 8.0


@dataclass(frozen=True)
class DetectorConfig:
    window: int = DETECTOR_WINDOW
    gain: float = DETECTOR_GAIN
    nod_dead_zone: float = NOD_DEAD_ZONE
    shake_dead_zone: float = SHAKE_DEAD_ZONE
    gesture: HmmParams = field(default=GESTURE_HMM)
    null: HmmParams = field(default=NULL_HMM)

    def __post_init__(self) -> None:
        if self.window < 2:
            raise HmmError("window must be >= 2")
        if self.nod_dead_zone <= 0 or self.shake_dead_zone <= 0:
            raise HmmError("dead zones must be > 0")


def load_detector_config(source) -> DetectorConfig:
    """Read detector parameters from a JSON document (path, file object
    or already-parsed dict). Missing fields keep their defaults.
    """
    if isinstance(source, (str, Path)):
        doc = json.loads(Path(source).read_text())
    elif isinstance(source, dict):
        doc = source
    else:
        doc = json.load(source)
    kwargs = {}
    for name in ("window", "gain", "nod_dead_zone", "shake_dead_zone"):
        if name in doc:
            kwargs[name] = doc[name]
    for name in ("gesture", "null"):
        if name in doc:
            h = doc[name]
            kwargs[name] = HmmParams(
                initial=tuple(h["initial"]),
                transition=tuple(tuple(r) for r in h["transition"]),
                emission=tuple(tuple(r) for r in h["emission"]),
            )
    return DetectorConfig(**kwargs)


def quantize(delta: float, dead_zone: float) -> Symbol:
    """Sign-quantize a signal delta against a dead zone (> 0)."""
    if dead_zone <= 0:
        raise ValueError(f"dead_zone must be > 0, got {dead_zone!r}")
    if delta > dead_zone:
        return Symbol.POS
    if delta < -dead_zone:
        return Symbol.NEG
    return Symbol.STILL


def forward_loglik(symbols, hmm: HmmParams) -> float:
    """ln P(symbols | hmm) by the scaled forward recursion.

    Always <= 0 for row-stochastic parameters. Empty sequences are an
    error (there is no meaningful likelihood to report).
    """
    syms = [Symbol(s) for s in symbols]
    if not syms:
        raise HmmError("forward_loglik needs at least one symbol")
    n = hmm.n_states
    init, trans, emit = hmm.initial, hmm.transition, hmm.emission
    alpha = [init[i] * emit[i][syms[0]] for i in range(n)]
    c = sum(alpha)
    if c == 0.0:
        return float("-inf")
    loglik = math.log(c)
    alpha = [a / c for a in alpha]
    for sym in syms[1:]:
        nxt = []
        for j in range(n):
            acc = 0.0
            for i in range(n):
                acc += alpha[i] * trans[i][j]
            nxt.append(acc * emit[j][sym])
        c = sum(nxt)
        if c == 0.0:
            return float("-inf")
        loglik += math.log(c)
        alpha = [a / c for a in nxt]
    return min(loglik, 0.0)


def _logistic(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    ex = math.exp(x)
    return ex / (1.0 + ex)


def llr_probability(symbols, config: DetectorConfig) -> float:
    """Gesture probability for a symbol window (>= 2 symbols)."""
    llr = forward_loglik(symbols, config.gesture) - forward_loglik(symbols, config.null)
    return _logistic(llr / len(symbols) * config.gain)


class GestureDetector:
    """Streaming single-axis detector.

    Feeds one raw sample at a time; keeps the previous sample and a
    ring of the last ``window`` quantized deltas. Returns 0 until two
    symbols exist. Non-finite samples are ignored (state unchanged,
    last probability repeated).
    """

    __slots__ = ("dead_zone", "config", "_prev", "_history", "_last")

    def __init__(self, dead_zone: float, config: DetectorConfig | None = None):
        self.dead_zone = dead_zone
        self.config = config or DetectorConfig()
        self._prev: float | None = None
        self._history: list[Symbol] = []
        self._last = 0.0

    def reset(self) -> None:
        self._prev = None
        self._history.clear()
        self._last = 0.0

    def step(self, sample: float) -> float:
        if not math.isfinite(sample):
            return self._last
        if self._prev is None:
            self._prev = sample
            return self._last
        symbol = quantize(sample - self._prev, self.dead_zone)
        self._prev = sample
        self._history.append(symbol)
        if len(self._history) > self.config.window:
            del self._history[0]
        if len(self._history) < 2:
            return self._last
        self._last = llr_probability(self._history, self.config)
        return self._last


class ParticipantGestures:
    """Paired nod (vertical position) and shake (yaw) detectors for one
    participant. A no-face frame resets both and reports zero."""

    __slots__ = ("nod", "shake")

    def __init__(self, config: DetectorConfig | None = None):
        cfg = config or DetectorConfig()
        self.nod = GestureDetector(cfg.nod_dead_zone, cfg)
        self.shake = GestureDetector(cfg.shake_dead_zone, cfg)

    def update(self, frame: MetricFrame) -> GestureEstimate:
        if not frame.face_detected:
            self.nod.reset()
            self.shake.reset()
            return GestureEstimate(0.0, 0.0)
        return GestureEstimate(
            nod_prob=self.nod.step(frame.head.y),
            shake_prob=self.shake.step(frame.head.yaw_deg),
        )


# ---------------------------------------------------------------------------
# batch path


def _batch_forward_loglik(windows: np.ndarray, hmm: HmmParams) -> np.ndarray:
    """Scaled forward over many equal-length symbol windows at once.

    windows: (rows, length) int array. Returns (rows,) logliks.
    """
    init = np.asarray(hmm.initial)
    trans = np.asarray(hmm.transition)
    emit = np.asarray(hmm.emission)
    alpha = init[None, :] * emit[:, windows[:, 0]].T
    c = alpha.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        loglik = np.log(c)
        alpha = alpha / c[:, None]
        for t in range(1, windows.shape[1]):
            alpha = (alpha @ trans) * emit[:, windows[:, t]].T
            c = alpha.sum(axis=1)
            loglik += np.log(c)
            alpha = alpha / c[:, None]
    return np.minimum(np.nan_to_num(loglik, nan=-np.inf), 0.0)


def batch_axis_probs(values: np.ndarray, dead_zone: float, config: DetectorConfig) -> np.ndarray:
    """Per-sample gesture probabilities for one contiguous signal.

    Mirrors GestureDetector.step over the whole segment: entry i uses
    the quantized deltas of values[:i+1], truncated to the window.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    probs = np.zeros(n)
    if n < 3:
        return probs
    deltas = np.diff(values)
    syms = np.full(n - 1, int(Symbol.STILL), dtype=np.int64)
    syms[deltas > dead_zone] = int(Symbol.POS)
    syms[deltas < -dead_zone] = int(Symbol.NEG)
    w = config.window
    # growing prefix: sample i (2 <= i <= min(n-1, w)) sees syms[:i]
    head_end = min(n - 1, w)
    for i in range(2, head_end + 1):
        probs[i] = llr_probability([Symbol(s) for s in syms[:i]], config)
    if n - 1 > w:
        # full windows: sample i (> w) sees syms[i-w:i]
        rows = np.lib.stride_tricks.sliding_window_view(syms, w)[1 : n - w]
        ll_g = _batch_forward_loglik(rows, config.gesture)
        ll_0 = _batch_forward_loglik(rows, config.null)
        x = (ll_g - ll_0) / w * config.gain
        probs[w + 1 :] = 1.0 / (1.0 + np.exp(-np.clip(x, -60.0, 60.0)))
    return probs


def estimate_frames(
    frames: list[MetricFrame], config: DetectorConfig | None = None
) -> list[GestureEstimate]:
    """Gesture estimates for a time-ordered frame stream, all
    participants interleaved. Detector state is per participant and per
    axis, reset at every no-face frame; runs between resets are
    evaluated with the vectorized batch path.
    """
    cfg = config or DetectorConfig()
    estimates: list[GestureEstimate | None] = [None] * len(frames)
    by_participant: dict[str, list[int]] = {}
    for idx, frame in enumerate(frames):
        by_participant.setdefault(frame.participant, []).append(idx)
    for indices in by_participant.values():
        segment: list[int] = []
        segments = [segment]
        for idx in indices:
            if frames[idx].face_detected:
                segment.append(idx)
            else:
                estimates[idx] = GestureEstimate(0.0, 0.0)
                if segment:
                    segment = []
                    segments.append(segment)
        for seg in segments:
            if not seg:
                continue
            ys = np.array([frames[i].head.y for i in seg])
            yaws = np.array([frames[i].head.yaw_deg for i in seg])
            nod = batch_axis_probs(ys, cfg.nod_dead_zone, cfg)
            shake = batch_axis_probs(yaws, cfg.shake_dead_zone, cfg)
            for k, i in enumerate(seg):
                estimates[i] = GestureEstimate(float(nod[k]), float(shake[k]))
    return estimates  # type: ignore[return-value]
