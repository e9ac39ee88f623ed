// Steering round-trip against a scripted server: a committed weight edit
// goes out as a canonical set_weights line, the view follows the server's
// config broadcasts rather than the local draft, and replaying the captured
// event log rebuilds the exact same view model.

import { describe, expect, it } from "vitest";

import { ConsoleClient } from "../src/client.js";
import { replayEvents } from "../src/state.js";
import { render } from "../src/view.js";
import { METRIC_KEYS } from "../src/wire.js";
import { ScriptedServer, fakeConnect, spotlightLine, testClock, weightsWith } from "./fakes.js";

// The exact line the session server's own encoder produces for this profile.
const GOLDEN_SET_WEIGHTS =
  '{"type":"set_weights","profile":{"happiness":0.4,"sadness":0.05,"surprise":0.4,"neutral":0.05,"brow_furrow":0.7,"head_nod":0.6,"head_shake":0.3}}';

function steeredSession(server = new ScriptedServer()) {
  const { connect, sockets } = fakeConnect(server.handle);
  const clock = testClock();
  const client = new ConsoleClient({
    url: "ws://localhost:9000/ws",
    session: "talk",
    participant: "console-1",
    connect,
    now: clock.now,
  });
  client.start();
  const sock = sockets[0];
  sock.open();
  sock.deliver(); // join ack: the config snapshot
  return { client, sock, server, clock };
}

describe("weight commit", () => {
  it("emits one canonical set_weights line and nothing before the commit", () => {
    const { client, sock, clock } = steeredSession();
    expect(client.state.config?.profile).toEqual(weightsWith({}));

    clock.tick(500);
    client.editWeight("brow_furrow", 0.7);
    // staged only: the draft is dirty, no message has left the socket
    expect(client.state.draftDirty).toBe(true);
    expect(sock.sent).toHaveLength(1); // just the join

    clock.tick(500);
    expect(client.commitWeights()).toBe(true);
    expect(sock.sent).toHaveLength(2);
    const line = sock.sent[1];
    expect(line).toBe(GOLDEN_SET_WEIGHTS);
    expect(line).not.toContain("\n");
    const doc = JSON.parse(line);
    expect(Object.keys(doc)).toEqual(["type", "profile"]);
    expect(Object.keys(doc.profile)).toEqual([...METRIC_KEYS]);
    for (const key of METRIC_KEYS) {
      expect(doc.profile[key]).toBeGreaterThanOrEqual(0);
      expect(doc.profile[key]).toBeLessThanOrEqual(1);
    }
  });

  it("changes the view only when the config broadcast arrives", () => {
    const { client, sock, clock } = steeredSession();
    client.editWeight("brow_furrow", 0.7);
    client.commitWeights();

    // sent but not yet answered: the live profile still shows the old value
    let view = render(client.state, clock.now());
    expect(view.session?.profile.brow_furrow).toBe(0.6);
    expect(view.draft).toEqual({ weights: weightsWith({ brow_furrow: 0.7 }), dirty: true });

    sock.deliver();
    view = render(client.state, clock.now());
    expect(view.session?.profile.brow_furrow).toBe(0.7);
    expect(view.draft?.dirty).toBe(false);
  });

  it("shows what the server applied, not what was asked", () => {
    const server = new ScriptedServer();
    server.reviseWeights = (w) => ({ ...w, brow_furrow: 0.65 });
    const { client, sock, clock } = steeredSession(server);
    client.editWeight("brow_furrow", 0.7);
    client.commitWeights();
    sock.deliver();
    const view = render(client.state, clock.now());
    expect(view.session?.profile.brow_furrow).toBe(0.65);
    // the draft still asks for 0.7, so it stays dirty
    expect(view.draft).toEqual({ weights: weightsWith({ brow_furrow: 0.7 }), dirty: true });
  });

  it("is followed within two windows by decisions scored under the new profile", () => {
    const { client, sock, clock } = steeredSession();
    // window 4 closes under the default profile: brow furrow 0.5 * 0.6
    sock.receive(spotlightLine(4, "ada", { breakdown: { brow_furrow: 0.3 }, score: 0.3 }));
    clock.tick(1000);

    client.editWeight("brow_furrow", 0.7);
    client.commitWeights();
    sock.deliver();
    const committedAfterWindow = 4;

    // the same behavior now scores 0.5 * 0.7 at the very next close
    sock.receive(spotlightLine(5, "ada", { breakdown: { brow_furrow: 0.35 }, score: 0.35 }));
    const view = render(client.state, clock.now());
    expect(view.spotlight.window).toBe(5);
    expect(view.spotlight.window! - committedAfterWindow).toBeLessThanOrEqual(2);
    expect(view.spotlight.bars[0]).toEqual({ metric: "brow_furrow", value: 0.35 });
  });
});

describe("pin controls", () => {
  it("never sends a pin for the presenter", () => {
    const { client, sock, clock } = steeredSession();
    expect(render(client.state, clock.now()).pinDisabled).toEqual(["host"]);
    expect(client.sendControl("pin", "host")).toBe(false);
    expect(sock.sent).toHaveLength(1);
    expect(client.eventLog().some((e) => e.kind === "control_sent")).toBe(false);
  });

  it("pins an audience member and reflects the broadcast", () => {
    const { client, sock, clock } = steeredSession();
    expect(client.sendControl("pin", "ada")).toBe(true);
    sock.deliver();
    expect(render(client.state, clock.now()).session?.pinned).toBe("ada");
    expect(client.sendControl("unpin")).toBe(true);
    sock.deliver();
    expect(render(client.state, clock.now()).session?.pinned).toBeNull();
  });

  it("surfaces a rejected control inline and clears it on the next broadcast", () => {
    const { client, sock, clock } = steeredSession();
    expect(client.sendControl("pin", "ghost")).toBe(true);
    sock.deliver();
    const view = render(client.state, clock.now());
    expect(view.controlError).toEqual({
      control: "pin",
      code: "bad_control",
      detail: "cannot pin unknown participant ghost",
    });
    client.sendControl("pause");
    sock.deliver();
    expect(render(client.state, clock.now()).controlError).toBeNull();
    expect(render(client.state, clock.now()).session?.paused).toBe(true);
  });
});

describe("log replay", () => {
  it("reproduces the view model exactly from the captured event log", () => {
    const { client, sock, clock } = steeredSession();
    sock.receive(spotlightLine(0, "bo", { breakdown: { happiness: 0.2 } }));
    clock.tick(700);
    client.editWeight("brow_furrow", 0.7);
    client.editWeight("happiness", 0.35);
    clock.tick(300);
    client.commitWeights();
    sock.deliver();
    sock.receive(spotlightLine(1, "ada", { breakdown: { brow_furrow: 0.35 } }));
    clock.tick(2000);
    sock.receive(spotlightLine(2, null));
    client.sendControl("pin", "ghost");
    sock.deliver();

    const replayed = replayEvents(client.eventLog());
    expect(replayed).toEqual(client.state);
    expect(render(replayed, clock.now())).toEqual(render(client.state, clock.now()));
    console.log("PASS criterion 10: golden set_weights line, view follows broadcasts, replay exact");
  });
});
