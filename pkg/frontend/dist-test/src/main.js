// Entry point: canvas + HUD wiring, input handling, the two decoupled loops.
import { Hud } from "./hud.js";
import { RenderLoop, StreamClient } from "./net.js";
import { defaultOrbit, orbit, pan, viewProjection, zoom } from "./orbit.js";
import { PointRenderer } from "./renderer.js";
import { FrameStore, applyServerReply, initialViewerState, noteFrame, requestToggle, } from "./state.js";
function wsUrl() {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    return `${proto}://${location.host}/stream`;
}
export function startViewer() {
    const canvas = document.getElementById("cloud");
    const hudRoot = document.getElementById("hud");
    const gl = canvas.getContext("webgl");
    if (!gl) {
        hudRoot.textContent = "WebGL unavailable";
        return;
    }
    const state = initialViewerState();
    const store = new FrameStore();
    let camera = defaultOrbit();
    const renderer = new PointRenderer(gl);
    let lastArrival = null;
    const loop = new RenderLoop((cb) => requestAnimationFrame(cb), () => {
        const frame = store.get();
        if (frame) {
            renderer.setFrame(frame, store.version(), state.overlayOn);
        }
        const aspect = canvas.clientWidth / Math.max(1, canvas.clientHeight);
        renderer.draw(viewProjection(camera, aspect), state.pointSizePx);
        hud.render(state, frame);
    });
    const client = new StreamClient({
        url: wsUrl(),
        socketFactory: (url) => new WebSocket(url),
        store,
        onFrame: (frame) => {
            const now = performance.now();
            noteFrame(state, frame, now, lastArrival);
            lastArrival = now;
            loop.requestRedraw();
        },
        onReply: (reply) => {
            applyServerReply(state, reply);
            loop.requestRedraw();
        },
        onError: (banner) => {
            state.errorBanner = banner;
            loop.requestRedraw();
        },
    });
    const hud = new Hud(hudRoot, (stage, value) => client.sendControl(requestToggle(state, stage, value)), (value) => {
        state.overlayOn = value;
        loop.requestRedraw();
    });
    // input: drag orbits, wheel zooms, shift-drag pans
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    canvas.addEventListener("mousedown", (e) => {
        dragging = true;
        lastX = e.clientX;
        lastY = e.clientY;
    });
    window.addEventListener("mouseup", () => {
        dragging = false;
    });
    window.addEventListener("mousemove", (e) => {
        if (!dragging)
            return;
        const dx = e.clientX - lastX;
        const dy = e.clientY - lastY;
        lastX = e.clientX;
        lastY = e.clientY;
        camera = e.shiftKey
            ? pan(camera, -dx / 600, dy / 600)
            : orbit(camera, -dx * 0.4, dy * 0.4);
        loop.requestRedraw();
    });
    canvas.addEventListener("wheel", (e) => {
        e.preventDefault();
        camera = zoom(camera, Math.exp(e.deltaY * 0.001));
        loop.requestRedraw();
    }, { passive: false });
    // resize + status poll for the legend
    const resize = () => {
        canvas.width = canvas.clientWidth * devicePixelRatio;
        canvas.height = canvas.clientHeight * devicePixelRatio;
        gl.viewport(0, 0, canvas.width, canvas.height);
        loop.requestRedraw();
    };
    window.addEventListener("resize", resize);
    fetch("/status")
        .then((resp) => resp.json())
        .then((status) => {
        applyServerReply(state, status);
        loop.requestRedraw();
    })
        .catch(() => undefined);
    resize();
    client.connect();
    loop.requestRedraw();
}
startViewer();
