// Decoder vs the server's published byte vectors, bit for bit.
import assert from "node:assert/strict";
import { test } from "node:test";
import { HEADER_SIZE, WireFormatError, decodeWireFrame, } from "../src/wire.js";
function header(version, frame, count, flags) {
    const buffer = new ArrayBuffer(HEADER_SIZE + count * (flags & 1 ? 20 : 16));
    const view = new DataView(buffer);
    view.setUint8(0, 0x53); // S
    view.setUint8(1, 0x4c); // L
    view.setUint8(2, 0x50); // P
    view.setUint8(3, 0x43); // C
    view.setUint16(4, version, true);
    view.setBigUint64(6, BigInt(frame), true);
    view.setUint32(14, count, true);
    view.setUint32(18, flags, true);
    return { buffer, view, bytes: new Uint8Array(buffer) };
}
test("empty frame is header-only", () => {
    const raw = header(1, 9, 0, 0);
    const frame = decodeWireFrame(raw.buffer);
    assert.equal(frame.frameIndex, 9);
    assert.equal(frame.pointCount, 0);
    assert.equal(frame.flags, 0);
    assert.equal(frame.positions.length, 0);
});
test("hand-assembled single point without overlay", () => {
    const raw = header(1, 7, 1, 0);
    raw.view.setFloat32(HEADER_SIZE, 1.0, true);
    raw.view.setFloat32(HEADER_SIZE + 4, 2.0, true);
    raw.view.setFloat32(HEADER_SIZE + 8, 3.0, true);
    raw.bytes.set([255, 0, 0, 255], HEADER_SIZE + 12);
    const frame = decodeWireFrame(raw.buffer);
    assert.equal(frame.frameIndex, 7);
    assert.equal(frame.pointCount, 1);
    assert.deepEqual([...frame.positions], [1.0, 2.0, 3.0]);
    assert.deepEqual([...frame.rgb], [255, 0, 0, 255]);
    assert.deepEqual([...frame.classRgb], [0, 0, 0, 0]);
});
test("hand-assembled single point with overlay", () => {
    const raw = header(1, 0, 1, 1);
    raw.view.setFloat32(HEADER_SIZE, 1.0, true);
    raw.view.setFloat32(HEADER_SIZE + 4, 2.0, true);
    raw.view.setFloat32(HEADER_SIZE + 8, 3.0, true);
    raw.bytes.set([10, 20, 30, 255], HEADER_SIZE + 12);
    raw.bytes.set([255, 0, 0, 255], HEADER_SIZE + 16);
    const frame = decodeWireFrame(raw.buffer);
    assert.equal(frame.flags & 1, 1);
    assert.deepEqual([...frame.rgb], [10, 20, 30, 255]);
    assert.deepEqual([...frame.classRgb], [255, 0, 0, 255]);
});
test("float bit patterns survive decode exactly", () => {
    const raw = header(1, 1, 1, 0);
    // a denormal-ish awkward pattern: set raw bits, expect identical bits out
    raw.view.setUint32(HEADER_SIZE, 0x3f9d70a4, true); // 1.2300000190734863
    raw.view.setUint32(HEADER_SIZE + 4, 0x80000001, true); // -1.4e-45 (subnormal)
    raw.view.setUint32(HEADER_SIZE + 8, 0x7f7fffff, true); // max finite f32
    const frame = decodeWireFrame(raw.buffer);
    const bits = new DataView(new ArrayBuffer(4));
    bits.setFloat32(0, frame.positions[0], true);
    assert.equal(bits.getUint32(0, true), 0x3f9d70a4);
    bits.setFloat32(0, frame.positions[1], true);
    assert.equal(bits.getUint32(0, true), 0x80000001);
    bits.setFloat32(0, frame.positions[2], true);
    assert.equal(bits.getUint32(0, true), 0x7f7fffff);
});
test("bad magic rejected", () => {
    const raw = header(1, 0, 0, 0);
    raw.view.setUint8(0, 0x58);
    assert.throws(() => decodeWireFrame(raw.buffer), (err) => err instanceof WireFormatError && err.kind === "magic");
});
test("version mismatch rejected with its own kind", () => {
    const raw = header(2, 0, 0, 0);
    assert.throws(() => decodeWireFrame(raw.buffer), (err) => err instanceof WireFormatError && err.kind === "version");
});
test("truncated payload rejected, no partial frame", () => {
    const raw = header(1, 0, 2, 0);
    const truncated = raw.buffer.slice(0, raw.buffer.byteLength - 1);
    assert.throws(() => decodeWireFrame(truncated), (err) => err instanceof WireFormatError && err.kind === "length");
});
test("short header rejected", () => {
    assert.throws(() => decodeWireFrame(new ArrayBuffer(5)), (err) => err instanceof WireFormatError && err.kind === "length");
});
