import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient, FrameResponse } from "./api.js";
import { Player } from "./player.js";
import { initialState } from "./state.js";
import { CAMERA, FRAME_COUNT, SHOT_ID, frameTime, makeMockFetch } from "./mockServer.js";

function makePlayer(opts: Parameters<typeof makeMockFetch>[0] = {}) {
  const api = new ApiClient("http://mock", makeMockFetch(opts));
  const shown: FrameResponse[] = [];
  const errors: unknown[] = [];
  const player = new Player(
    initialState(SHOT_ID, CAMERA, FRAME_COUNT),
    (index) => api.fetchFrame(SHOT_ID, CAMERA, index),
    {
      onFrame: (f) => shown.push(f),
      onError: (e) => errors.push(e),
    },
  );
  return { player, shown, errors };
}

beforeEach(() => vi.useFakeTimers());
afterEach(() => vi.useRealTimers());

describe("frame stepper", () => {
  it("next x3 then pre x1 at stride 10 shows frame 20 with the server timestamp", async () => {
    const { player, shown } = makePlayer();
    player.dispatch({ type: "set_stride", stride: 10 });
    player.dispatch({ type: "next" });
    player.dispatch({ type: "next" });
    player.dispatch({ type: "next" });
    player.dispatch({ type: "pre" });
    await vi.runAllTimersAsync();
    expect(player.state.currentIndex).toBe(20);
    const last = shown[shown.length - 1];
    expect(last.index).toBe(20);
    expect(last.timeS).toBe(frameTime(20));
  });

  it("pre at index 0 stays at 0", async () => {
    const { player, shown } = makePlayer();
    player.dispatch({ type: "show" });
    await vi.runAllTimersAsync();
    player.dispatch({ type: "pre" });
    await vi.runAllTimersAsync();
    expect(player.state.currentIndex).toBe(0);
    expect(shown[shown.length - 1].index).toBe(0);
  });

  it("show displays the current frame's exact timestamp", async () => {
    const { player, shown } = makePlayer();
    player.dispatch({ type: "seek", index: 1 });
    player.dispatch({ type: "show" });
    await vi.runAllTimersAsync();
    const last = shown[shown.length - 1];
    expect(last.index).toBe(1);
    expect(last.timeS).toBe(frameTime(1));
  });
});

describe("playback", () => {
  it("terminates at the last index and pauses", async () => {
    const { player, shown } = makePlayer();
    player.dispatch({ type: "set_stride", stride: 10 });
    player.dispatch({ type: "set_speed", fps: 50 });
    player.dispatch({ type: "play" });
    await vi.advanceTimersByTimeAsync(5000);
    expect(player.state.playing).toBe(false);
    expect(player.state.currentIndex).toBe(FRAME_COUNT - 1);
    expect(shown[shown.length - 1].index).toBe(FRAME_COUNT - 1);
  });

  it("every displayed index/time pair originates from one response", async () => {
    const { player, shown } = makePlayer();
    player.dispatch({ type: "set_stride", stride: 7 });
    player.dispatch({ type: "set_speed", fps: 100 });
    player.dispatch({ type: "play" });
    await vi.advanceTimersByTimeAsync(3000);
    expect(shown.length).toBeGreaterThan(5);
    for (const frame of shown) {
      expect(frame.timeS).toBe(frameTime(frame.index));
      expect(await frame.blob.text()).toBe(`frame-${frame.index}`);
    }
  });

  it("indices progress monotonically during playback", async () => {
    const { player, shown } = makePlayer({
      // a slow frame must be skipped, never rendered late and out of order
      delayMsForIndex: (index) => (index === 3 ? 500 : 0),
    });
    player.dispatch({ type: "set_speed", fps: 100 });
    player.dispatch({ type: "play" });
    await vi.advanceTimersByTimeAsync(2000);
    const indices = shown.map((f) => f.index);
    for (let i = 1; i < indices.length; i++) {
      expect(indices[i]).toBeGreaterThan(indices[i - 1]);
    }
  });

  it("set_speed while playing keeps index continuity", async () => {
    const { player } = makePlayer();
    player.dispatch({ type: "set_speed", fps: 20 });
    player.dispatch({ type: "play" });
    await vi.advanceTimersByTimeAsync(250);
    const before = player.state.currentIndex;
    player.dispatch({ type: "set_speed", fps: 100 });
    expect(player.state.currentIndex).toBe(before);
    expect(player.state.playing).toBe(true);
    await vi.advanceTimersByTimeAsync(100);
    expect(player.state.currentIndex).toBeGreaterThan(before);
  });

  it("pause and resume continue from the same index", async () => {
    const { player } = makePlayer();
    player.dispatch({ type: "set_speed", fps: 50 });
    player.dispatch({ type: "play" });
    await vi.advanceTimersByTimeAsync(200);
    player.dispatch({ type: "pause" });
    const index = player.state.currentIndex;
    await vi.advanceTimersByTimeAsync(500);
    expect(player.state.currentIndex).toBe(index);
    player.dispatch({ type: "play" });
    expect(player.state.currentIndex).toBe(index);
  });

  it("a fetch failure pauses playback and surfaces the error", async () => {
    const { player, errors } = makePlayer({ failIndices: new Set([2]) });
    player.dispatch({ type: "set_speed", fps: 50 });
    player.dispatch({ type: "play" });
    await vi.advanceTimersByTimeAsync(1000);
    expect(errors.length).toBeGreaterThan(0);
    expect(player.state.playing).toBe(false);
  });
});
