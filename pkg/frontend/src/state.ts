// Console state as a pure fold over events. Every transition comes from a
// received server line or a user action, each stamped with a wall-clock
// time by the caller, so replaying a captured event log rebuilds the exact
// same state.

import {
  ConfigSnapshot,
  MetricKey,
  METRIC_KEYS,
  SpotlightDecision,
  Weights,
  decode,
} from "./wire.js";

// Default timeline depth: ten minutes of history at the stock window length.
export const TIMELINE_CAPACITY = 40;

export type ControlKind = "set_weights" | "pin" | "unpin" | "pause" | "resume";

export type ConnectionStatus =
  | { phase: "idle" }
  | { phase: "connecting"; attempt: number }
  | { phase: "open" }
  | { phase: "reconnecting"; retryMs: number }
  | { phase: "closed" };

export type ConsoleEvent =
  | { kind: "socket_connecting"; attempt: number; atMs: number }
  | { kind: "socket_open"; atMs: number }
  | { kind: "socket_closed"; willRetryMs: number | null; atMs: number }
  | { kind: "message"; line: string; atMs: number }
  | { kind: "edit_weight"; metric: MetricKey; value: number; atMs: number }
  | { kind: "reset_draft"; atMs: number }
  | { kind: "control_sent"; control: ControlKind; atMs: number };

export interface TimelineEntry extends SpotlightDecision {
  atMs: number; // receipt time, anchors the countdown to the next window
}

export interface ControlError {
  control: ControlKind | null;
  code: string;
  detail: string;
}

export interface ConsoleState {
  connection: ConnectionStatus;
  config: ConfigSnapshot | null;
  timeline: TimelineEntry[]; // ascending window index, length <= capacity
  timelineCapacity: number;
  draft: Weights | null; // staged weight edits; only an explicit commit sends them
  draftDirty: boolean;
  pendingControl: ControlKind | null; // sent, not yet answered by a config broadcast
  controlError: ControlError | null;
}

export function initialState(timelineCapacity: number = TIMELINE_CAPACITY): ConsoleState {
  if (!Number.isInteger(timelineCapacity) || timelineCapacity < 1)
    throw new RangeError("timelineCapacity must be a positive integer");
  return {
    connection: { phase: "idle" },
    config: null,
    timeline: [],
    timelineCapacity,
    draft: null,
    draftDirty: false,
    pendingControl: null,
    controlError: null,
  };
}

// Latest decision: the timeline is ordered by window index, so it is the tail.
export function currentDecision(state: ConsoleState): TimelineEntry | null {
  return state.timeline.length > 0 ? state.timeline[state.timeline.length - 1] : null;
}

export function sameWeights(a: Weights, b: Weights): boolean {
  return METRIC_KEYS.every((k) => a[k] === b[k]);
}

function copyWeights(w: Weights): Weights {
  const out = {} as Weights;
  for (const k of METRIC_KEYS) out[k] = w[k];
  return out;
}

// The presenter is never spotlighted, so pinning them is rejected at the
// source: the view disables the control and sendControl refuses to emit it.
export function canPin(state: ConsoleState, participant: string): boolean {
  return participant.length > 0 && state.config?.presenter !== participant;
}

function insertDecision(state: ConsoleState, entry: TimelineEntry): ConsoleState {
  const timeline = state.timeline.filter((d) => d.window !== entry.window);
  let at = timeline.length;
  while (at > 0 && timeline[at - 1].window > entry.window) at -= 1;
  timeline.splice(at, 0, entry);
  while (timeline.length > state.timelineCapacity) timeline.shift();
  return { ...state, timeline };
}

function applyConfig(state: ConsoleState, config: ConfigSnapshot): ConsoleState {
  let draft = state.draft;
  let draftDirty = state.draftDirty;
  if (draft === null || !draftDirty) {
    // A pristine draft follows the live profile.
    draft = copyWeights(config.profile);
    draftDirty = false;
  } else if (sameWeights(draft, config.profile)) {
    // The edit landed; the draft is live now.
    draftDirty = false;
  }
  return { ...state, config, draft, draftDirty, pendingControl: null, controlError: null };
}

function applyMessage(state: ConsoleState, line: string, atMs: number): ConsoleState {
  let msg;
  try {
    msg = decode(line);
  } catch {
    return state; // unreadable line: keep the last good state
  }
  switch (msg.type) {
    case "config":
      return applyConfig(state, {
        window_ms: msg.window_ms,
        policy: msg.policy,
        profile: msg.profile,
        paused: msg.paused,
        pinned: msg.pinned,
        presenter: msg.presenter,
      });
    case "spotlight":
      return insertDecision(state, {
        window: msg.window,
        participant: msg.participant,
        score: msg.score,
        reason: msg.reason,
        t_start_ms: msg.t_start_ms,
        t_end_ms: msg.t_end_ms,
        breakdown: msg.breakdown,
        atMs,
      });
    case "error":
      return {
        ...state,
        controlError: { control: state.pendingControl, code: msg.code, detail: msg.detail },
        pendingControl: null,
      };
    case "notice":
      return state; // personal notices are for spotlighted audience members
  }
}

export function reduce(state: ConsoleState, event: ConsoleEvent): ConsoleState {
  switch (event.kind) {
    case "socket_connecting":
      return { ...state, connection: { phase: "connecting", attempt: event.attempt } };
    case "socket_open":
      return { ...state, connection: { phase: "open" } };
    case "socket_closed":
      return {
        ...state,
        connection:
          event.willRetryMs === null
            ? { phase: "closed" }
            : { phase: "reconnecting", retryMs: event.willRetryMs },
        pendingControl: null,
      };
    case "message":
      return applyMessage(state, event.line, event.atMs);
    case "edit_weight": {
      if (state.draft === null) return state; // nothing to edit before the first config
      const value = Math.min(1, Math.max(0, event.value));
      const draft = { ...state.draft, [event.metric]: value };
      const live = state.config?.profile;
      return { ...state, draft, draftDirty: live === undefined || !sameWeights(draft, live) };
    }
    case "reset_draft":
      if (state.config === null) return state;
      return { ...state, draft: copyWeights(state.config.profile), draftDirty: false };
    case "control_sent":
      return { ...state, pendingControl: event.control, controlError: null };
  }
}

export function replayEvents(events: readonly ConsoleEvent[], timelineCapacity?: number): ConsoleState {
  return events.reduce(reduce, initialState(timelineCapacity));
}
