// Browser app: shot list with search on the left, frame analysis on the right.

import { ApiClient, FrameResponse, ShotSummary } from "./api.js";
import { Player } from "./player.js";
import { initialState } from "./state.js";

declare global {
  interface Window {
    SHOTVOD_API_BASE?: string;
  }
}

const apiBase =
  window.SHOTVOD_API_BASE ??
  new URLSearchParams(window.location.search).get("api") ??
  "http://127.0.0.1:8080";
const api = new ApiClient(apiBase);

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

const errorBanner = $("error-banner");
const shotList = $("shot-list");
const searchInput = $<HTMLInputElement>("search");
const frameImg = $<HTMLImageElement>("frame-image");
const frameIndexEl = $("frame-index");
const frameTimeEl = $("frame-time");
const shotTitle = $("shot-title");
const downloadLink = $<HTMLAnchorElement>("download-link");
const speedInput = $<HTMLInputElement>("speed");
const strideInput = $<HTMLInputElement>("stride");
const playButton = $<HTMLButtonElement>("play");

let player: Player | null = null;
let currentBlobUrl: string | null = null;

function showError(message: string): void {
  errorBanner.textContent = message;
  errorBanner.style.display = "block";
}

function clearError(): void {
  errorBanner.style.display = "none";
}

function renderFrame(frame: FrameResponse): void {
  if (currentBlobUrl) {
    URL.revokeObjectURL(currentBlobUrl);
  }
  currentBlobUrl = URL.createObjectURL(frame.blob);
  frameImg.src = currentBlobUrl;
  // index and time always come from the same response
  frameIndexEl.textContent = String(frame.index);
  frameTimeEl.textContent = `${frame.timeS.toFixed(6)} s`;
}

async function openShot(summary: ShotSummary): Promise<void> {
  player?.stop();
  clearError();
  shotTitle.textContent = `shot ${summary.shot_id} / ${summary.camera_id} — ` +
    `${summary.frame_count} frames, ${summary.length_s.toFixed(3)} s`;
  downloadLink.href = api.videoUrl(summary.shot_id, summary.camera_id);
  downloadLink.style.display = summary.has_video ? "inline" : "none";

  const state = initialState(summary.shot_id, summary.camera_id, summary.frame_count);
  state.fpsPlayback = Number(speedInput.value) || 10;
  state.stride = Math.max(1, Math.floor(Number(strideInput.value)) || 1);
  player = new Player(
    state,
    (index) => api.fetchFrame(summary.shot_id, summary.camera_id, index),
    {
      onFrame: renderFrame,
      onState: (s) => {
        playButton.textContent = s.playing ? "pause" : "play";
      },
      onError: (err) => showError(`frame fetch failed: ${err}`),
    },
  );
  player.dispatch({ type: "show" });
}

async function refreshShotList(): Promise<void> {
  clearError();
  shotList.textContent = "loading…";
  let shots: ShotSummary[];
  try {
    const query = searchInput.value.trim();
    if (query) {
      const shotNo = Number(query);
      if (!Number.isInteger(shotNo)) {
        showError(`not a shot number: ${query}`);
        return;
      }
      shots = await api.listShots({ from: shotNo, to: shotNo });
    } else {
      shots = await api.listShots({});
    }
  } catch (err) {
    shotList.textContent = "";
    showError(`cannot reach the VOD API at ${apiBase}: ${err}`);
    return;
  }
  shotList.textContent = "";
  if (shots.length === 0) {
    shotList.textContent = searchInput.value.trim() ? "no matching shot" : "no shots yet";
    return;
  }
  for (const summary of shots) {
    const row = document.createElement("div");
    row.className = "shot-row";
    const label = document.createElement("span");
    label.textContent = `${summary.shot_id}  ${summary.camera_id}  ` +
      `${summary.frame_count}f  ${(summary.size_bytes / 1048576).toFixed(2)} MiB`;
    const open = document.createElement("button");
    open.textContent = "open";
    open.onclick = () => void openShot(summary);
    const dl = document.createElement("a");
    dl.textContent = "download";
    dl.href = api.videoUrl(summary.shot_id, summary.camera_id);
    row.append(label, open, dl);
    shotList.append(row);
  }
}

function wireControls(): void {
  $("refresh").onclick = () => void refreshShotList();
  searchInput.onkeydown = (ev) => {
    if (ev.key === "Enter") {
      void refreshShotList();
    }
  };
  $("pre").onclick = () => player?.dispatch({ type: "pre" });
  $("next").onclick = () => player?.dispatch({ type: "next" });
  $("show").onclick = () => player?.dispatch({ type: "show" });
  playButton.onclick = () => {
    if (!player) {
      return;
    }
    player.dispatch({ type: player.state.playing ? "pause" : "play" });
  };
  speedInput.onchange = () =>
    player?.dispatch({ type: "set_speed", fps: Number(speedInput.value) });
  strideInput.onchange = () =>
    player?.dispatch({ type: "set_stride", stride: Math.floor(Number(strideInput.value)) });
}

wireControls();
void refreshShotList();
