// Wire protocol: every message is one single-line JSON document with a
// "type" field. Field names and their order mirror the server's canonical
// encoding; unknown extra fields on inbound messages are ignored.

export const METRIC_KEYS = [
  "happiness",
  "sadness",
  "surprise",
  "neutral",
  "brow_furrow",
  "head_nod",
  "head_shake",
] as const;

export type MetricKey = (typeof METRIC_KEYS)[number];

export type Weights = Record<MetricKey, number>;

export type Policy = "affective" | "random" | "roundrobin";

const POLICIES: readonly string[] = ["affective", "random", "roundrobin"];

export class WireError extends Error {}

export interface SpotlightDecision {
  window: number;
  participant: string | null;
  score: number;
  reason: string;
  t_start_ms: number;
  t_end_ms: number;
  breakdown: Record<string, number>;
}

export interface ConfigSnapshot {
  window_ms: number;
  policy: Policy;
  profile: Weights;
  paused: boolean;
  pinned: string | null;
  presenter: string | null;
}

export type ServerMessage =
  | ({ type: "spotlight" } & SpotlightDecision)
  | ({ type: "config" } & ConfigSnapshot)
  | { type: "error"; code: string; detail: string }
  | { type: "notice"; window: number; spotlighted: boolean };

function field(doc: Record<string, unknown>, name: string, context: string): unknown {
  if (!(name in doc)) throw new WireError(`${context} message missing '${name}'`);
  return doc[name];
}

function str(doc: Record<string, unknown>, name: string, context: string): string {
  const v = field(doc, name, context);
  if (typeof v !== "string") throw new WireError(`${context} field '${name}' has wrong type`);
  return v;
}

function num(doc: Record<string, unknown>, name: string, context: string): number {
  const v = field(doc, name, context);
  if (typeof v !== "number" || !Number.isFinite(v))
    throw new WireError(`${context} field '${name}' has wrong type`);
  return v;
}

function int(doc: Record<string, unknown>, name: string, context: string): number {
  const v = num(doc, name, context);
  if (!Number.isInteger(v)) throw new WireError(`${context} field '${name}' must be an integer`);
  return v;
}

function bool(doc: Record<string, unknown>, name: string, context: string): boolean {
  const v = field(doc, name, context);
  if (typeof v !== "boolean") throw new WireError(`${context} field '${name}' has wrong type`);
  return v;
}

function optStr(doc: Record<string, unknown>, name: string, context: string): string | null {
  const v = doc[name];
  if (v === undefined || v === null) return null;
  if (typeof v !== "string") throw new WireError(`${context} field '${name}' has wrong type`);
  return v;
}

function weights(doc: Record<string, unknown>, name: string, context: string): Weights {
  const v = field(doc, name, context);
  if (typeof v !== "object" || v === null || Array.isArray(v))
    throw new WireError(`${context} field '${name}' has wrong type`);
  const raw = v as Record<string, unknown>;
  const out = {} as Weights;
  for (const key of METRIC_KEYS) {
    const w = raw[key];
    if (typeof w !== "number" || !(w >= 0 && w <= 1))
      throw new WireError(`${context} weight '${key}' must be a number in [0, 1]`);
    out[key] = w;
  }
  return out;
}

// Parse one line from the server. Throws WireError on anything that is not
// a valid console-facing message.
export function decode(line: string): ServerMessage {
  let doc: unknown;
  try {
    doc = JSON.parse(line);
  } catch (e) {
    throw new WireError(`not valid JSON: ${e}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc))
    throw new WireError("message must be a JSON object");
  const msg = doc as Record<string, unknown>;
  const kind = msg["type"];
  if (kind === "spotlight") {
    const participant = optStr(msg, "participant", "spotlight");
    const rawBreakdown = msg["breakdown"] ?? {};
    if (typeof rawBreakdown !== "object" || rawBreakdown === null || Array.isArray(rawBreakdown))
      throw new WireError("spotlight field 'breakdown' has wrong type");
    const breakdown: Record<string, number> = {};
    for (const [k, v] of Object.entries(rawBreakdown as Record<string, unknown>)) {
      if (typeof v !== "number") throw new WireError(`spotlight breakdown '${k}' has wrong type`);
      breakdown[k] = v;
    }
    return {
      type: "spotlight",
      window: int(msg, "window", "spotlight"),
      participant,
      score: num(msg, "score", "spotlight"),
      reason: str(msg, "reason", "spotlight"),
      t_start_ms: int(msg, "t_start_ms", "spotlight"),
      t_end_ms: int(msg, "t_end_ms", "spotlight"),
      breakdown,
    };
  }
  if (kind === "config") {
    const policy = str(msg, "policy", "config");
    if (!POLICIES.includes(policy)) throw new WireError(`unknown policy '${policy}'`);
    return {
      type: "config",
      window_ms: int(msg, "window_ms", "config"),
      policy: policy as Policy,
      profile: weights(msg, "profile", "config"),
      paused: bool(msg, "paused", "config"),
      pinned: optStr(msg, "pinned", "config"),
      presenter: optStr(msg, "presenter", "config"),
    };
  }
  if (kind === "error") {
    return { type: "error", code: str(msg, "code", "error"), detail: str(msg, "detail", "error") };
  }
  if (kind === "notice") {
    return {
      type: "notice",
      window: int(msg, "window", "notice"),
      spotlighted: bool(msg, "spotlighted", "notice"),
    };
  }
  throw new WireError(`unknown message type ${JSON.stringify(kind)}`);
}

// Outbound encoders. Key order matters: the canonical form lists fields in
// the same order the server emits them, so logs diff cleanly.

export function encodeJoin(session: string, participant: string): string {
  if (!session || !participant) throw new WireError("session and participant must be non-empty");
  return JSON.stringify({ type: "join", session, participant, role: "console" });
}

export function encodeSetWeights(profile: Weights): string {
  const wire: Record<string, number> = {};
  for (const key of METRIC_KEYS) {
    const w = profile[key];
    if (typeof w !== "number" || !(w >= 0 && w <= 1))
      throw new WireError(`weight '${key}' must be a number in [0, 1]`);
    wire[key] = w;
  }
  return JSON.stringify({ type: "set_weights", profile: wire });
}

export function encodePin(participant: string): string {
  if (!participant) throw new WireError("participant must be non-empty");
  return JSON.stringify({ type: "pin", participant });
}

export function encodeUnpin(): string {
  return JSON.stringify({ type: "unpin" });
}

export function encodePause(): string {
  return JSON.stringify({ type: "pause" });
}

export function encodeResume(): string {
  return JSON.stringify({ type: "resume" });
}
