// Viewer state: the latest-frame slot shared by the network and render
// loops, stage-toggle bookkeeping with optimistic updates, and the
// color-source selection for the overlay toggle.
import { hasOverlay } from "./wire.js";
export function initialViewerState() {
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
    frame = null;
    generation = 0;
    set(frame) {
        this.frame = frame;
        this.generation += 1;
    }
    get() {
        return this.frame;
    }
    version() {
        return this.generation;
    }
}
/**
 * The overlay toggle swaps the per-point color source only; positions are
 * untouched. Points without a class color (alpha 0) keep their RGB even in
 * overlay mode.
 */
export function chooseColors(frame, overlayOn) {
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
export function noteFrame(state, frame, nowMs, lastArrivalMs) {
    state.lastFrameIndex = frame.frameIndex;
    if (lastArrivalMs !== null && nowMs > lastArrivalMs) {
        const inst = 1000 / (nowMs - lastArrivalMs);
        state.streamFps = state.streamFps === 0
            ? inst : 0.8 * state.streamFps + 0.2 * inst;
    }
}
/** Optimistic toggle: update the HUD now, return the message to send. */
export function requestToggle(state, stage, value) {
    state.stageStates = { ...state.stageStates, [stage]: value };
    return JSON.stringify({ cmd: "toggle", stage, value });
}
/** A server status (or control reply) reconciles; errors revert the HUD. */
export function applyServerReply(state, reply) {
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
