// Playback state machine for the frame-analysis panel. Pure and synchronous:
// every transition returns a new state with currentIndex clamped to the shot.

export interface PlaybackState {
  shotId: number;
  cameraId: string;
  frameCount: number;
  currentIndex: number;
  playing: boolean;
  fpsPlayback: number;
  stride: number;
}

export type StepAction =
  | { type: "pre" }
  | { type: "next" }
  | { type: "show" }
  | { type: "play" }
  | { type: "pause" }
  | { type: "seek"; index: number }
  | { type: "set_speed"; fps: number }
  | { type: "set_stride"; stride: number };

export function initialState(shotId: number, cameraId: string, frameCount: number): PlaybackState {
  if (frameCount < 1) {
    throw new Error(`shot ${shotId} has no frames`);
  }
  return {
    shotId,
    cameraId,
    frameCount,
    currentIndex: 0,
    playing: false,
    fpsPlayback: 10,
    stride: 1,
  };
}

function clampIndex(state: PlaybackState, index: number): number {
  return Math.min(Math.max(index, 0), state.frameCount - 1);
}

export function step(state: PlaybackState, action: StepAction): PlaybackState {
  switch (action.type) {
    case "pre":
      return { ...state, currentIndex: clampIndex(state, state.currentIndex - state.stride) };
    case "next":
      return { ...state, currentIndex: clampIndex(state, state.currentIndex + state.stride) };
    case "show":
      return state; // display-only: the caller re-renders the current frame's time
    case "play":
      // restart from the top when play is hit at the end
      if (state.currentIndex >= state.frameCount - 1) {
        return { ...state, currentIndex: 0, playing: true };
      }
      return { ...state, playing: true };
    case "pause":
      return { ...state, playing: false };
    case "seek":
      return { ...state, currentIndex: clampIndex(state, action.index) };
    case "set_speed":
      if (!(action.fps > 0)) {
        return state;
      }
      return { ...state, fpsPlayback: action.fps };
    case "set_stride":
      if (!Number.isInteger(action.stride) || action.stride < 1) {
        return state;
      }
      return { ...state, stride: action.stride };
  }
}

// One playback tick: advance by stride; at the last index, stop.
export function advance(state: PlaybackState): PlaybackState {
  if (!state.playing) {
    return state;
  }
  const next = state.currentIndex + state.stride;
  if (next > state.frameCount - 1) {
    return { ...state, currentIndex: state.frameCount - 1, playing: false };
  }
  return { ...state, currentIndex: next };
}
