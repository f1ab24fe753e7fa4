// Orbit camera: the scene is inspected from varying angles around a target,
// never flown through. Elevation clamps short of the poles so continued
// dragging cannot flip the view.

import { Mat4, lookAt, multiply, perspective } from "./mat4.js";

const MAX_ELEVATION_DEG = 89;
const MIN_DISTANCE = 0.05;
const MAX_DISTANCE = 20;

export interface OrbitState {
  target: [number, number, number];
  distance: number;
  azimuthDeg: number;
  elevationDeg: number;
}

export function defaultOrbit(): OrbitState {
  return { target: [0, 0, 0.6], distance: 1.2, azimuthDeg: 0, elevationDeg: 15 };
}

export function orbit(state: OrbitState, dAzimuthDeg: number,
                      dElevationDeg: number): OrbitState {
  const elevation = Math.max(-MAX_ELEVATION_DEG,
    Math.min(MAX_ELEVATION_DEG, state.elevationDeg + dElevationDeg));
  let azimuth = (state.azimuthDeg + dAzimuthDeg) % 360;
  if (azimuth < 0) azimuth += 360;
  return { ...state, azimuthDeg: azimuth, elevationDeg: elevation };
}

export function zoom(state: OrbitState, factor: number): OrbitState {
  const distance = Math.max(MIN_DISTANCE,
    Math.min(MAX_DISTANCE, state.distance * factor));
  return { ...state, distance };
}

export function pan(state: OrbitState, dxView: number, dyView: number): OrbitState {
  // move the target in the view plane, scaled by distance
  const az = (state.azimuthDeg * Math.PI) / 180;
  const el = (state.elevationDeg * Math.PI) / 180;
  const rightX = Math.cos(az);
  const rightZ = -Math.sin(az);
  const upX = -Math.sin(az) * Math.sin(el);
  const upY = Math.cos(el);
  const upZ = -Math.cos(az) * Math.sin(el);
  const s = state.distance;
  return {
    ...state,
    target: [
      state.target[0] + (dxView * rightX + dyView * upX) * s,
      state.target[1] + dyView * upY * s,
      state.target[2] + (dxView * rightZ + dyView * upZ) * s,
    ],
  };
}

export function eyePosition(state: OrbitState): [number, number, number] {
  const az = (state.azimuthDeg * Math.PI) / 180;
  const el = (state.elevationDeg * Math.PI) / 180;
  const r = state.distance * Math.cos(el);
  return [
    state.target[0] + r * Math.sin(az),
    state.target[1] + state.distance * Math.sin(el),
    state.target[2] - r * Math.cos(az),
  ];
}

export function viewProjection(state: OrbitState, aspect: number,
                               fovYDeg = 55): Mat4 {
  const projection = perspective((fovYDeg * Math.PI) / 180, aspect, 0.01, 100);
  const view = lookAt(eyePosition(state), state.target, [0, 1, 0]);
  return multiply(projection, view);
}
