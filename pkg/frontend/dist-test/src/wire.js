// Binary frame decoding, mirroring the server's wire contract:
//   magic "SLPC" | version u16 | frame u64 | count u32 | flags u32
//   then per point: x,y,z f32 + r,g,b,a u8 (+ cr,cg,cb,ca u8 when flags bit 0)
// All little-endian. Decoding is bit-exact on positions and colors.
export const MAGIC = 0x53_4c_50_43; // "SLPC" read as big-endian bytes
export const VERSION = 1;
export const FLAG_CLASS_OVERLAY = 0x1;
export const HEADER_SIZE = 22;
export class WireFormatError extends Error {
    kind;
    constructor(message, kind) {
        super(message);
        this.kind = kind;
        this.name = "WireFormatError";
    }
}
export function hasOverlay(frame) {
    return (frame.flags & FLAG_CLASS_OVERLAY) !== 0;
}
export function decodeWireFrame(data) {
    if (data.byteLength < HEADER_SIZE) {
        throw new WireFormatError(`frame shorter than the ${HEADER_SIZE}-byte header`, "length");
    }
    const view = new DataView(data);
    if (view.getUint32(0, false) !== MAGIC) {
        throw new WireFormatError("bad magic", "magic");
    }
    const version = view.getUint16(4, true);
    if (version !== VERSION) {
        throw new WireFormatError(`unsupported version ${version}`, "version");
    }
    const frameIndex = Number(view.getBigUint64(6, true));
    const pointCount = view.getUint32(14, true);
    const flags = view.getUint32(18, true);
    const overlay = (flags & FLAG_CLASS_OVERLAY) !== 0;
    const pointSize = overlay ? 20 : 16;
    if (data.byteLength !== HEADER_SIZE + pointCount * pointSize) {
        throw new WireFormatError(`payload length ${data.byteLength - HEADER_SIZE} != ` +
            `${pointCount} x ${pointSize}`, "length");
    }
    const positions = new Float32Array(pointCount * 3);
    const rgb = new Uint8Array(pointCount * 4);
    const classRgb = new Uint8Array(pointCount * 4);
    const bytes = new Uint8Array(data);
    for (let i = 0; i < pointCount; i += 1) {
        const base = HEADER_SIZE + i * pointSize;
        positions[i * 3] = view.getFloat32(base, true);
        positions[i * 3 + 1] = view.getFloat32(base + 4, true);
        positions[i * 3 + 2] = view.getFloat32(base + 8, true);
        rgb[i * 4] = bytes[base + 12];
        rgb[i * 4 + 1] = bytes[base + 13];
        rgb[i * 4 + 2] = bytes[base + 14];
        rgb[i * 4 + 3] = bytes[base + 15];
        if (overlay) {
            classRgb[i * 4] = bytes[base + 16];
            classRgb[i * 4 + 1] = bytes[base + 17];
            classRgb[i * 4 + 2] = bytes[base + 18];
            classRgb[i * 4 + 3] = bytes[base + 19];
        }
    }
    return { frameIndex, flags, pointCount, positions, rgb, classRgb };
}
