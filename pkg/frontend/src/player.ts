// Timed frame playback over the frames endpoint. The server's uncompressed
// AVI is not browser-decodable, so playback is client-driven: a timer steps
// the index and each displayed image/timestamp pair comes from one response.

import { FrameResponse } from "./api.js";
import { PlaybackState, StepAction, advance, step } from "./state.js";

export type FrameFetcher = (index: number) => Promise<FrameResponse>;

export interface PlayerHooks {
  onFrame: (frame: FrameResponse) => void;
  onState?: (state: PlaybackState) => void;
  onError?: (err: unknown) => void;
}

const PREFETCH_AHEAD = 3;

export class Player {
  private timer: ReturnType<typeof setInterval> | null = null;
  private requestSeq = 0;
  private cache = new Map<number, Promise<FrameResponse>>();

  constructor(
    public state: PlaybackState,
    private fetcher: FrameFetcher,
    private hooks: PlayerHooks,
  ) {}

  dispatch(action: StepAction): void {
    const prev = this.state;
    this.state = step(this.state, action);
    this.hooks.onState?.(this.state);
    if (this.state.playing && !prev.playing) {
      this.startTimer();
    } else if (!this.state.playing && prev.playing) {
      this.stopTimer();
    } else if (this.state.playing && action.type === "set_speed") {
      this.stopTimer();
      this.startTimer();
    }
    if (this.state.currentIndex !== prev.currentIndex || action.type === "show") {
      void this.showCurrent();
    }
  }

  stop(): void {
    this.stopTimer();
    this.requestSeq++;
    this.cache.clear();
  }

  private startTimer(): void {
    if (this.timer !== null) {
      return;
    }
    this.timer = setInterval(() => this.tick(), 1000 / this.state.fpsPlayback);
    void this.showCurrent();
  }

  private stopTimer(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private tick(): void {
    const prev = this.state;
    this.state = advance(this.state);
    this.hooks.onState?.(this.state);
    if (!this.state.playing) {
      this.stopTimer();
    }
    if (this.state.currentIndex !== prev.currentIndex) {
      void this.showCurrent();
    }
  }

  private fetchCached(index: number): Promise<FrameResponse> {
    let pending = this.cache.get(index);
    if (!pending) {
      pending = this.fetcher(index);
      this.cache.set(index, pending);
      if (this.cache.size > 2 * PREFETCH_AHEAD + 2) {
        const oldest = this.cache.keys().next().value;
        if (oldest !== undefined) {
          this.cache.delete(oldest);
        }
      }
    }
    return pending;
  }

  private async showCurrent(): Promise<void> {
    const seq = ++this.requestSeq;
    const index = this.state.currentIndex;
    try {
      const frame = await this.fetchCached(index);
      // only the latest request may render: frames are skipped, never reordered
      if (seq === this.requestSeq) {
        this.hooks.onFrame(frame);
      }
      if (this.state.playing) {
        for (let k = 1; k <= PREFETCH_AHEAD; k++) {
          const ahead = index + k * this.state.stride;
          if (ahead <= this.state.frameCount - 1) {
            void this.fetchCached(ahead).catch(() => this.cache.delete(ahead));
          }
        }
      }
    } catch (err) {
      this.cache.delete(index);
      if (this.state.playing) {
        this.dispatch({ type: "pause" });
      }
      this.hooks.onError?.(err);
    }
  }
}
