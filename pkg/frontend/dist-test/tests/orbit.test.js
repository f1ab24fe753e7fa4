// Orbit camera invariants: inverse gestures, pole clamping, wrap-around.
import assert from "node:assert/strict";
import { test } from "node:test";
import { defaultOrbit, orbit, pan, viewProjection, zoom } from "../src/orbit.js";
test("zoom in then out restores the projection matrix exactly", () => {
    const start = defaultOrbit();
    const zoomed = zoom(zoom(start, 2.0), 0.5);
    assert.equal(zoomed.distance, start.distance);
    const a = viewProjection(start, 16 / 9);
    const b = viewProjection(zoomed, 16 / 9);
    assert.deepEqual([...a], [...b]);
});
test("zoom clamps at the near and far limits", () => {
    let state = defaultOrbit();
    for (let i = 0; i < 100; i += 1)
        state = zoom(state, 0.5);
    assert.ok(state.distance > 0);
    const near = state.distance;
    state = zoom(state, 0.1);
    assert.equal(state.distance, near);
});
test("elevation clamps at +-89 under continued drag (no gimbal flip)", () => {
    let state = defaultOrbit();
    for (let i = 0; i < 50; i += 1)
        state = orbit(state, 0, 10);
    assert.equal(state.elevationDeg, 89);
    const before = viewProjection(state, 1);
    state = orbit(state, 0, 25); // keep dragging past the pole
    assert.equal(state.elevationDeg, 89);
    assert.deepEqual([...viewProjection(state, 1)], [...before]);
    for (let i = 0; i < 100; i += 1)
        state = orbit(state, 0, -10);
    assert.equal(state.elevationDeg, -89);
});
test("azimuth wraps cleanly", () => {
    let state = defaultOrbit();
    state = orbit(state, 725, 0);
    assert.ok(state.azimuthDeg >= 0 && state.azimuthDeg < 360);
    assert.ok(Math.abs(state.azimuthDeg - 5) < 1e-9);
});
test("pan moves the target, not the orbit shape", () => {
    const state = defaultOrbit();
    const panned = pan(state, 0.1, -0.05);
    assert.equal(panned.distance, state.distance);
    assert.equal(panned.azimuthDeg, state.azimuthDeg);
    assert.equal(panned.elevationDeg, state.elevationDeg);
    assert.notDeepEqual(panned.target, state.target);
});
