import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "./api.js";
import { CAMERA, FRAME_COUNT, SHOT_ID, frameTime, makeMockFetch } from "./mockServer.js";

const client = () => new ApiClient("http://mock", makeMockFetch());

describe("ApiClient", () => {
  it("lists shots", async () => {
    const shots = await client().listShots({});
    expect(shots).toHaveLength(1);
    expect(shots[0].shot_id).toBe(SHOT_ID);
    expect(shots[0].frame_count).toBe(FRAME_COUNT);
  });

  it("filters by shot number range", async () => {
    expect(await client().listShots({ from: SHOT_ID, to: SHOT_ID })).toHaveLength(1);
    expect(await client().listShots({ from: 1, to: 2 })).toHaveLength(0);
  });

  it("pairs frame index and time from one response", async () => {
    const frame = await client().fetchFrame(SHOT_ID, CAMERA, 20);
    expect(frame.index).toBe(20);
    expect(frame.timeS).toBe(frameTime(20));
    expect(await frame.blob.text()).toBe("frame-20");
  });

  it("raises ApiError with the HTTP status", async () => {
    await expect(client().fetchFrame(SHOT_ID, CAMERA, FRAME_COUNT)).rejects.toMatchObject({
      status: 416,
    });
    await expect(client().getShot(1, CAMERA).catch((e) => Promise.reject(e))).rejects.toBeInstanceOf(
      ApiError,
    );
  });

  it("fetches sampled frames", async () => {
    const samples = await client().sampledFrames(SHOT_ID, CAMERA, 10);
    expect(samples.map((s) => s.index)).toEqual([0, 10, 20, 30, 40, 50, 60, 70, 80, 90]);
    expect(samples[1].time_s).toBe(frameTime(10));
  });

  it("builds the video download URL", () => {
    expect(client().videoUrl(SHOT_ID, CAMERA)).toBe(
      `http://mock/api/shots/${SHOT_ID}/${CAMERA}/video`,
    );
  });
});
