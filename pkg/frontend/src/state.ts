// Viewer state: the latest-frame slot shared by the network and render
// loops, stage-toggle bookkeeping with optimistic updates, and the
// color-source selection for the overlay toggle.

import { WireFrame, hasOverlay } from "./wire.js";

export interface ServerStatus {
  frame_index: number;
  fps: number;
  paused?: boolean;
  stage_states: Record<string, boolean>;
  timings_summary?: Record<string, number>;
  classes?: { name: string; color: number[] }[];
  error?: string;
  stage?: string;
}

export interface ViewerState {
  overlayOn: boolean;
  pointSizePx: number;
  stageStates: Record<string, boolean>;
  confirmedStageStates: Record<string, boolean>;
  lastFrameIndex: number;
  serverFps: number;
  streamFps: number;
  paused: boolean;
  errorBanner: string | null;
  classes: { name: string; color: number[] }[];
}

export function initialViewerState(): ViewerState {
  return {
    overlayOn: true,
    pointSizePx: 2,
    stageStates: {},
    confirmedStageStates: {},
    lastFrameIndex: -1,
    serverFps: 0,
    streamFps: 0,
    paused: false,
    errorBanner: null,
    classes: [],
  };
}

/** Latest-frame slot: the render loop reads, the network loop swaps. */
export class FrameStore {
  private frame: WireFrame | null = null;
  private generation = 0;

  set(frame: WireFrame): void {
    this.frame = frame;
    this.generation += 1;
  }

  get(): WireFrame | null {
    return this.frame;
  }

  version(): number {
    return this.generation;
  }
}

/**
 * The overlay toggle swaps the per-point color source only; positions are
 * untouched. Points without a class color (alpha 0) keep their RGB even in
 * overlay mode.
 */
export function chooseColors(frame: WireFrame, overlayOn: boolean): Uint8Array {
  if (!overlayOn || !hasOverlay(frame)) {
    return frame.rgb;
  }
  const out = new Uint8Array(frame.rgb); // copy, then substitute class colors
  for (let i = 0; i < frame.pointCount; i += 1) {
    if (frame.classRgb[i * 4 + 3] > 0) {
      out[i * 4] = frame.classRgb[i * 4];
      out[i * 4 + 1] = frame.classRgb[i * 4 + 1];
      out[i * 4 + 2] = frame.classRgb[i * 4 + 2];
      out[i * 4 + 3] = frame.classRgb[i * 4 + 3];
    }
  }
  return out;
}

export function noteFrame(state: ViewerState, frame: WireFrame,
                          nowMs: number, lastArrivalMs: number | null): void {
  state.lastFrameIndex = frame.frameIndex;
  if (lastArrivalMs !== null && nowMs > lastArrivalMs) {
    const inst = 1000 / (nowMs - lastArrivalMs);
    state.streamFps = state.streamFps === 0
      ? inst : 0.8 * state.streamFps + 0.2 * inst;
  }
}

/** Optimistic toggle: update the HUD now, return the message to send. */
export function requestToggle(state: ViewerState, stage: string,
                              value: boolean): string {
  state.stageStates = { ...state.stageStates, [stage]: value };
  return JSON.stringify({ cmd: "toggle", stage, value });
}

/** A server status (or control reply) reconciles; errors revert the HUD. */
export function applyServerReply(state: ViewerState, reply: ServerStatus): void {
  if (reply.error !== undefined) {
    state.stageStates = { ...state.confirmedStageStates };
    state.errorBanner = `server rejected command: ${reply.error}`;
    return;
  }
  state.stageStates = { ...reply.stage_states };
  state.confirmedStageStates = { ...reply.stage_states };
  state.serverFps = reply.fps;
  state.paused = reply.paused ?? false;
  if (reply.classes) {
    state.classes = reply.classes;
  }
  state.errorBanner = null;
}
