// Stream client: decodes binary frames into the latest-frame slot, passes
// text replies to the state reconciler, reconnects with backoff, and
// renegotiates on version-mismatched frames. The socket is injectable so
// the protocol logic is testable without a browser or a network.

import { FrameStore } from "./state.js";
import { WireFormatError, WireFrame, decodeWireFrame } from "./wire.js";

export interface SocketLike {
  binaryType: string;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  send(data: string): void;
  close(): void;
}

export interface StreamClientOptions {
  url: string;
  socketFactory: (url: string) => SocketLike;
  store: FrameStore;
  onFrame?: (frame: WireFrame) => void;
  onReply?: (reply: unknown) => void;
  onError?: (banner: string) => void;
  /** schedule(fn, delayMs): injectable timer for tests */
  schedule?: (fn: () => void, delayMs: number) => void;
  maxBackoffMs?: number;
}

export class StreamClient {
  private socket: SocketLike | null = null;
  private backoffMs = 500;
  private closed = false;

  constructor(private readonly options: StreamClientOptions) {}

  connect(): void {
    if (this.closed) return;
    const socket = this.options.socketFactory(this.options.url);
    socket.binaryType = "arraybuffer";
    socket.onmessage = (event) => this.handleMessage(event.data);
    socket.onclose = () => this.scheduleReconnect();
    socket.onerror = () => socket.close();
    this.socket = socket;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }

  sendControl(message: string): void {
    this.socket?.send(message);
  }

  private handleMessage(data: unknown): void {
    if (typeof data === "string") {
      try {
        this.options.onReply?.(JSON.parse(data));
      } catch {
        this.options.onError?.("unparseable server reply");
      }
      return;
    }
    if (!(data instanceof ArrayBuffer)) return;
    let frame: WireFrame;
    try {
      frame = decodeWireFrame(data);
    } catch (err) {
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

  private scheduleReconnect(): void {
    if (this.closed) return;
    const schedule = this.options.schedule
      ?? ((fn: () => void, ms: number) => setTimeout(fn, ms));
    const delay = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2,
      this.options.maxBackoffMs ?? 8000);
    schedule(() => this.connect(), delay);
  }
}

/**
 * Render loop decoupled from the network: input and frame arrival both just
 * request a redraw; drawing happens on the next animation tick regardless of
 * stream progress, so navigation stays responsive on a paused stream.
 */
export class RenderLoop {
  private pending = false;

  constructor(
    private readonly raf: (cb: (tMs: number) => void) => void,
    private readonly draw: (tMs: number) => void,
  ) {}

  requestRedraw(): void {
    if (this.pending) return;
    this.pending = true;
    this.raf((tMs) => {
      this.pending = false;
      this.draw(tMs);
    });
  }
}
