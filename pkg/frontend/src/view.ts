// Projection of console state into a plain view model. Rendering is a pure
// function of (state, now), so snapshots of the view model are comparable
// across live runs and log replays.

import { ConsoleState, canPin, currentDecision } from "./state.js";
import { METRIC_KEYS, Policy, Weights } from "./wire.js";

export interface BreakdownBar {
  metric: string;
  value: number;
}

export interface SpotlightView {
  label: string; // participant id, or the "no spotlight" placeholder
  window: number | null;
  reason: string | null;
  score: number | null;
  bars: BreakdownBar[]; // descending by value
  countdownMs: number | null; // time to the next window close, null while paused
}

export interface TimelineSlot {
  window: number;
  label: string;
}

export interface SessionView {
  windowMs: number;
  policy: Policy;
  paused: boolean;
  pinned: string | null;
  presenter: string | null;
  profile: Weights;
}

export interface ViewModel {
  banner: string | null; // connection trouble, with auto-reconnect status
  session: SessionView | null;
  spotlight: SpotlightView;
  timeline: TimelineSlot[];
  draft: { weights: Weights; dirty: boolean } | null;
  pinDisabled: string[]; // participants the pin control must not offer
  controlError: { control: string | null; code: string; detail: string } | null;
}

export const NO_SPOTLIGHT = "no spotlight";

function banner(state: ConsoleState): string | null {
  const c = state.connection;
  switch (c.phase) {
    case "open":
      return null;
    case "idle":
      return "not connected";
    case "connecting":
      return c.attempt > 1 ? `connecting (attempt ${c.attempt})` : "connecting";
    case "reconnecting":
      return `disconnected, retrying in ${(c.retryMs / 1000).toFixed(1)} s`;
    case "closed":
      return "disconnected";
  }
}

// Bars sort by value descending; equal values keep the canonical metric
// order so the layout is stable frame to frame.
export function breakdownBars(breakdown: Record<string, number>): BreakdownBar[] {
  const canonical = (m: string) => {
    const at = (METRIC_KEYS as readonly string[]).indexOf(m);
    return at === -1 ? METRIC_KEYS.length : at;
  };
  return Object.entries(breakdown)
    .map(([metric, value]) => ({ metric, value }))
    .sort((a, b) => b.value - a.value || canonical(a.metric) - canonical(b.metric));
}

export function render(state: ConsoleState, nowMs: number): ViewModel {
  const decision = currentDecision(state);
  const paused = state.config?.paused ?? false;
  let countdownMs: number | null = null;
  if (!paused && decision !== null && state.config !== null) {
    countdownMs = Math.max(0, decision.atMs + state.config.window_ms - nowMs);
  }
  const spotlight: SpotlightView = {
    label: decision?.participant ?? NO_SPOTLIGHT,
    window: decision?.window ?? null,
    reason: decision?.reason ?? null,
    score: decision?.score ?? null,
    bars: decision ? breakdownBars(decision.breakdown) : [],
    countdownMs,
  };
  const pinDisabled: string[] = [];
  if (state.config?.presenter != null && !canPin(state, state.config.presenter))
    pinDisabled.push(state.config.presenter);
  return {
    banner: banner(state),
    session:
      state.config === null
        ? null
        : {
            windowMs: state.config.window_ms,
            policy: state.config.policy,
            paused: state.config.paused,
            pinned: state.config.pinned,
            presenter: state.config.presenter,
            profile: state.config.profile,
          },
    spotlight,
    timeline: state.timeline.map((d) => ({
      window: d.window,
      label: d.participant ?? NO_SPOTLIGHT,
    })),
    draft: state.draft === null ? null : { weights: state.draft, dirty: state.draftDirty },
    pinDisabled,
    controlError: state.controlError,
  };
}
