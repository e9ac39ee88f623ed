// Socket loop and control surface. One socket, one event queue: every
// transition flows through dispatch() so the whole session is captured as
// an ordered event log.

import {
  ConsoleEvent,
  ConsoleState,
  ControlKind,
  canPin,
  initialState,
  reduce,
} from "./state.js";
import {
  MetricKey,
  encodeJoin,
  encodePause,
  encodePin,
  encodeResume,
  encodeSetWeights,
  encodeUnpin,
} from "./wire.js";

// Minimal socket surface, shaped like the browser WebSocket but string-only
// so tests can drive a scripted fake.
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((data: string) => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientOptions {
  url: string;
  session: string;
  participant: string;
  connect: SocketFactory;
  timelineCapacity?: number;
  now?: () => number;
  initialRetryMs?: number;
  maxRetryMs?: number;
}

export class ConsoleClient {
  state: ConsoleState;

  private readonly opts: ClientOptions;
  private readonly now: () => number;
  private readonly log: ConsoleEvent[] = [];
  private readonly listeners: Array<(state: ConsoleState) => void> = [];
  private socket: SocketLike | null = null;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private retryMs: number;
  private attempt = 0;
  private stopped = true;

  constructor(opts: ClientOptions) {
    this.opts = opts;
    this.now = opts.now ?? Date.now;
    this.retryMs = opts.initialRetryMs ?? 1000;
    this.state = initialState(opts.timelineCapacity);
  }

  start(): void {
    if (!this.stopped) return;
    this.stopped = false;
    this.open();
  }

  stop(): void {
    this.stopped = true;
    if (this.retryTimer !== null) {
      clearTimeout(this.retryTimer);
      this.retryTimer = null;
    }
    const socket = this.socket;
    this.socket = null;
    socket?.close();
    if (this.state.connection.phase !== "closed")
      this.dispatch({ kind: "socket_closed", willRetryMs: null, atMs: this.now() });
  }

  onChange(listener: (state: ConsoleState) => void): void {
    this.listeners.push(listener);
  }

  // The full event history, in order. Folding it from a fresh initial state
  // reproduces this.state exactly.
  eventLog(): readonly ConsoleEvent[] {
    return this.log;
  }

  dispatch(event: ConsoleEvent): void {
    this.log.push(event);
    this.state = reduce(this.state, event);
    for (const listener of this.listeners) listener(this.state);
  }

  editWeight(metric: MetricKey, value: number): void {
    this.dispatch({ kind: "edit_weight", metric, value, atMs: this.now() });
  }

  resetDraft(): void {
    this.dispatch({ kind: "reset_draft", atMs: this.now() });
  }

  // Emit one control message. The state is not touched beyond recording the
  // send: the view changes only when the server's config broadcast arrives.
  sendControl(control: ControlKind, participant?: string): boolean {
    if (this.socket === null || this.state.connection.phase !== "open") return false;
    let line: string;
    switch (control) {
      case "set_weights":
        if (this.state.draft === null) return false;
        line = encodeSetWeights(this.state.draft);
        break;
      case "pin":
        if (participant === undefined || !canPin(this.state, participant)) return false;
        line = encodePin(participant);
        break;
      case "unpin":
        line = encodeUnpin();
        break;
      case "pause":
        line = encodePause();
        break;
      case "resume":
        line = encodeResume();
        break;
    }
    // Record the send before performing it so the log keeps the send ahead
    // of any reply, however fast the server answers.
    this.dispatch({ kind: "control_sent", control, atMs: this.now() });
    this.socket.send(line);
    return true;
  }

  // Commit the staged weight edits as one set_weights message.
  commitWeights(): boolean {
    return this.sendControl("set_weights");
  }

  private open(): void {
    this.attempt += 1;
    this.dispatch({ kind: "socket_connecting", attempt: this.attempt, atMs: this.now() });
    const socket = this.opts.connect(this.opts.url);
    this.socket = socket;
    socket.onopen = () => {
      if (this.socket !== socket) return;
      this.retryMs = this.opts.initialRetryMs ?? 1000;
      this.attempt = 0;
      this.dispatch({ kind: "socket_open", atMs: this.now() });
      socket.send(encodeJoin(this.opts.session, this.opts.participant));
    };
    socket.onmessage = (data) => {
      if (this.socket !== socket) return;
      this.dispatch({ kind: "message", line: data, atMs: this.now() });
    };
    socket.onclose = () => {
      if (this.socket !== socket) return;
      this.socket = null;
      if (this.stopped) return;
      const retryMs = this.retryMs;
      this.retryMs = Math.min(this.retryMs * 2, this.opts.maxRetryMs ?? 8000);
      this.dispatch({ kind: "socket_closed", willRetryMs: retryMs, atMs: this.now() });
      this.retryTimer = setTimeout(() => {
        this.retryTimer = null;
        if (!this.stopped) this.open();
      }, retryMs);
    };
  }
}
