// Browser entry point. Reads the server address and session id from the
// URL query, runs one ConsoleClient, and repaints the page from the view
// model on every state change plus a short tick for the countdown.

import { ConsoleClient, SocketLike } from "./client.js";
import { METRIC_KEYS, MetricKey } from "./wire.js";
import { ViewModel, render } from "./view.js";

const params = new URLSearchParams(window.location.search);
const defaultServer = `${window.location.protocol === "https:" ? "wss" : "ws"}://${window.location.host}`;
const server = params.get("server") ?? defaultServer;
const session = params.get("session") ?? "demo";
const participant = params.get("participant") ?? "console";

function browserSocket(url: string): SocketLike {
  const ws = new WebSocket(url);
  const like: SocketLike = {
    send: (data) => ws.send(data),
    close: () => ws.close(),
    onopen: null,
    onmessage: null,
    onclose: null,
  };
  ws.onopen = () => like.onopen?.();
  ws.onmessage = (ev) => like.onmessage?.(String(ev.data));
  ws.onclose = () => like.onclose?.();
  return like;
}

const client = new ConsoleClient({ url: server, session, participant, connect: browserSocket });

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

const bannerEl = el<HTMLDivElement>("banner");
const sessionEl = el<HTMLDivElement>("session-line");
const labelEl = el<HTMLSpanElement>("spotlight-label");
const pausedEl = el<HTMLSpanElement>("paused-badge");
const metaEl = el<HTMLDivElement>("spotlight-meta");
const barsEl = el<HTMLDivElement>("bars");
const timelineEl = el<HTMLDivElement>("timeline");
const weightRowsEl = el<HTMLDivElement>("weight-rows");
const pinTargetEl = el<HTMLInputElement>("pin-target");
const errorEl = el<HTMLDivElement>("control-error");

// Build one slider row per metric once; values are synced from the draft.
const sliders = new Map<MetricKey, { input: HTMLInputElement; out: HTMLOutputElement }>();
for (const metric of METRIC_KEYS) {
  const row = document.createElement("div");
  row.className = "weight-row";
  const label = document.createElement("label");
  label.textContent = metric;
  const input = document.createElement("input");
  input.type = "range";
  input.min = "0";
  input.max = "1";
  input.step = "0.05";
  input.addEventListener("input", () => client.editWeight(metric, Number(input.value)));
  const out = document.createElement("output");
  row.append(label, input, out);
  weightRowsEl.append(row);
  sliders.set(metric, { input, out });
}

el<HTMLButtonElement>("commit-weights").addEventListener("click", () => client.commitWeights());
el<HTMLButtonElement>("reset-draft").addEventListener("click", () => client.resetDraft());
el<HTMLButtonElement>("pin").addEventListener("click", () =>
  client.sendControl("pin", pinTargetEl.value.trim()),
);
el<HTMLButtonElement>("unpin").addEventListener("click", () => client.sendControl("unpin"));
el<HTMLButtonElement>("pause").addEventListener("click", () => client.sendControl("pause"));
el<HTMLButtonElement>("resume").addEventListener("click", () => client.sendControl("resume"));
pinTargetEl.addEventListener("input", paint);

function paintBars(view: ViewModel): void {
  barsEl.replaceChildren();
  for (const bar of view.spotlight.bars) {
    const row = document.createElement("div");
    row.className = "bar-row";
    const name = document.createElement("span");
    name.className = "bar-name";
    name.textContent = bar.metric;
    const track = document.createElement("div");
    track.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = "bar-fill";
    fill.style.width = `${Math.round(Math.min(1, Math.max(0, bar.value)) * 100)}%`;
    track.append(fill);
    const value = document.createElement("span");
    value.className = "bar-value";
    value.textContent = bar.value.toFixed(3);
    row.append(name, track, value);
    barsEl.append(row);
  }
}

function paint(): void {
  const view = render(client.state, Date.now());

  bannerEl.hidden = view.banner === null;
  bannerEl.textContent = view.banner ?? "";

  if (view.session === null) {
    sessionEl.textContent = "waiting for session config…";
  } else {
    const pinned = view.session.pinned === null ? "" : `, pinned ${view.session.pinned}`;
    sessionEl.textContent =
      `policy ${view.session.policy}, window ${view.session.windowMs / 1000} s${pinned}`;
  }

  labelEl.textContent = view.spotlight.label;
  pausedEl.hidden = !(view.session?.paused ?? false);
  const parts: string[] = [];
  if (view.spotlight.window !== null) parts.push(`window ${view.spotlight.window}`);
  if (view.spotlight.reason !== null) parts.push(view.spotlight.reason);
  if (view.spotlight.score !== null) parts.push(`score ${view.spotlight.score.toFixed(3)}`);
  if (view.spotlight.countdownMs !== null)
    parts.push(`next in ${(view.spotlight.countdownMs / 1000).toFixed(0)} s`);
  metaEl.textContent = parts.join(" · ");

  paintBars(view);

  timelineEl.replaceChildren();
  for (const slot of view.timeline) {
    const chip = document.createElement("span");
    chip.className = slot.label === "no spotlight" ? "slot empty" : "slot";
    chip.textContent = `${slot.window}: ${slot.label}`;
    timelineEl.append(chip);
  }

  if (view.draft !== null) {
    for (const metric of METRIC_KEYS) {
      const slider = sliders.get(metric)!;
      const value = view.draft.weights[metric];
      if (Number(slider.input.value) !== value) slider.input.value = String(value);
      slider.out.textContent = value.toFixed(2);
    }
  }

  const pinButton = el<HTMLButtonElement>("pin");
  const target = pinTargetEl.value.trim();
  pinButton.disabled = target.length === 0 || view.pinDisabled.includes(target);

  errorEl.hidden = view.controlError === null;
  if (view.controlError !== null) {
    const where = view.controlError.control ?? "server";
    errorEl.textContent = `${where}: ${view.controlError.code} (${view.controlError.detail})`;
  }
}

client.onChange(paint);
setInterval(paint, 250); // keeps the countdown moving between messages
client.start();
paint();
