// Fetch-compatible stand-in for a conformant VOD API, seeded with one
// 97-frame shot whose timestamps mirror a produced times.txt (6 decimals).

import { FetchLike } from "./api.js";

export const SHOT_ID = 77212;
export const CAMERA = "WK-IR";
export const FRAME_COUNT = 97;
const FPS = 97 / 0.78;

export function frameTime(index: number): number {
  return Number((index / FPS).toFixed(6));
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify({ schema_version: "1", ...(body as object) }), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function frameResponse(index: number): Response {
  return new Response(new Blob([`frame-${index}`]), {
    status: 200,
    headers: {
      "Content-Type": "image/bmp",
      "X-Frame-Index": String(index),
      "X-Frame-Time": String(frameTime(index)),
    },
  });
}

export interface MockOptions {
  failIndices?: Set<number>;
  delayMsForIndex?: (index: number) => number;
  log?: string[];
}

export function makeMockFetch(opts: MockOptions = {}): FetchLike {
  const summary = {
    shot_id: SHOT_ID,
    camera_id: CAMERA,
    length_s: 0.78,
    frame_count: FRAME_COUNT,
    size_bytes: 1069547,
    has_video: true,
  };
  return async (url: string): Promise<Response> => {
    opts.log?.push(url);
    const u = new URL(url, "http://mock");
    const frameMatch = u.pathname.match(/^\/api\/shots\/(\d+)\/([A-Z-]+)\/frames\/(\d+)$/);
    if (frameMatch) {
      const [, shot, camera, indexStr] = frameMatch;
      const index = Number(indexStr);
      if (Number(shot) !== SHOT_ID || camera !== CAMERA) {
        return json({ detail: "unknown shot" }, 404);
      }
      if (index >= FRAME_COUNT) {
        return json({ detail: "out of range" }, 416);
      }
      if (opts.failIndices?.has(index)) {
        return json({ detail: "boom" }, 500);
      }
      const delay = opts.delayMsForIndex?.(index) ?? 0;
      if (delay > 0) {
        await new Promise((resolve) => setTimeout(resolve, delay));
      }
      return frameResponse(index);
    }
    if (u.pathname === "/api/shots") {
      const from = u.searchParams.get("from");
      const to = u.searchParams.get("to");
      const visible =
        (from === null || SHOT_ID >= Number(from)) &&
        (to === null || SHOT_ID <= Number(to));
      return json({ shots: visible ? [summary] : [] });
    }
    if (u.pathname === `/api/shots/${SHOT_ID}/${CAMERA}`) {
      return json(summary);
    }
    if (u.pathname === `/api/shots/${SHOT_ID}/${CAMERA}/frames`) {
      const stride = Number(u.searchParams.get("stride") ?? "1");
      if (!(stride >= 1)) {
        return json({ detail: "bad stride" }, 400);
      }
      const frames = [];
      for (let i = 0; i < FRAME_COUNT; i += stride) {
        frames.push({ index: i, time_s: frameTime(i) });
      }
      return json({ frames });
    }
    return json({ detail: `no route for ${u.pathname}` }, 404);
  };
}
