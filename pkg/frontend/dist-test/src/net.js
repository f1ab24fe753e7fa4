// Stream client: decodes binary frames into the latest-frame slot, passes
// text replies to the state reconciler, reconnects with backoff, and
// renegotiates on version-mismatched frames. The socket is injectable so
// the protocol logic is testable without a browser or a network.
import { WireFormatError, decodeWireFrame } from "./wire.js";
export class StreamClient {
    options;
    socket = null;
    backoffMs = 500;
    closed = false;
    constructor(options) {
        this.options = options;
    }
    connect() {
        if (this.closed)
            return;
        const socket = this.options.socketFactory(this.options.url);
        socket.binaryType = "arraybuffer";
        socket.onmessage = (event) => this.handleMessage(event.data);
        socket.onclose = () => this.scheduleReconnect();
        socket.onerror = () => socket.close();
        this.socket = socket;
    }
    close() {
        this.closed = true;
        this.socket?.close();
    }
    sendControl(message) {
        this.socket?.send(message);
    }
    handleMessage(data) {
        if (typeof data === "string") {
            try {
                this.options.onReply?.(JSON.parse(data));
            }
            catch {
                this.options.onError?.("unparseable server reply");
            }
            return;
        }
        if (!(data instanceof ArrayBuffer))
            return;
        let frame;
        try {
            frame = decodeWireFrame(data);
        }
        catch (err) {
            if (err instanceof WireFormatError && err.kind === "version") {
                // renegotiate: drop the socket; reconnect picks the stream back up
                this.options.onError?.(err.message);
                this.socket?.close();
                return;
            }
            this.options.onError?.(String(err));
            return;
        }
        this.backoffMs = 500; // healthy traffic resets the backoff
        this.options.store.set(frame);
        this.options.onFrame?.(frame);
    }
    scheduleReconnect() {
        if (this.closed)
            return;
        const schedule = this.options.schedule
            ?? ((fn, ms) => setTimeout(fn, ms));
        const delay = this.backoffMs;
        this.backoffMs = Math.min(this.backoffMs * 2, this.options.maxBackoffMs ?? 8000);
        schedule(() => this.connect(), delay);
    }
}
/**
 * Render loop decoupled from the network: input and frame arrival both just
 * request a redraw; drawing happens on the next animation tick regardless of
 * stream progress, so navigation stays responsive on a paused stream.
 */
export class RenderLoop {
    raf;
    draw;
    pending = false;
    constructor(raf, draw) {
        this.raf = raf;
        this.draw = draw;
    }
    requestRedraw() {
        if (this.pending)
            return;
        this.pending = true;
        this.raf((tMs) => {
            this.pending = false;
            this.draw(tMs);
        });
    }
}
