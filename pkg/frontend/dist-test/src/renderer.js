// WebGL point renderer. Position and color buffers are independent: the
// overlay toggle re-uploads colors only, never positions.
import { chooseColors } from "./state.js";
const VERTEX_SHADER = `
attribute vec3 position;
attribute vec4 color;
uniform mat4 viewProjection;
uniform float pointSize;
varying vec4 vColor;
void main() {
  gl_Position = viewProjection * vec4(position, 1.0);
  gl_PointSize = pointSize;
  vColor = color;
}`;
const FRAGMENT_SHADER = `
precision mediump float;
varying vec4 vColor;
void main() {
  gl_FragColor = vec4(vColor.rgb, 1.0);
}`;
export class PointRenderer {
    gl;
    program;
    positionBuffer;
    colorBuffer;
    positionLoc;
    colorLoc;
    vpLoc;
    sizeLoc;
    pointCount = 0;
    uploadedVersion = -1;
    uploadedOverlay = null;
    frame = null;
    constructor(gl) {
        this.gl = gl;
        this.program = this.compile();
        this.positionBuffer = gl.createBuffer();
        this.colorBuffer = gl.createBuffer();
        this.positionLoc = gl.getAttribLocation(this.program, "position");
        this.colorLoc = gl.getAttribLocation(this.program, "color");
        this.vpLoc = gl.getUniformLocation(this.program, "viewProjection");
        this.sizeLoc = gl.getUniformLocation(this.program, "pointSize");
    }
    compile() {
        const gl = this.gl;
        const make = (kind, source) => {
            const shader = gl.createShader(kind);
            gl.shaderSource(shader, source);
            gl.compileShader(shader);
            if (!gl.getShaderParameter(shader, gl.COMPILE_STATUS)) {
                throw new Error(gl.getShaderInfoLog(shader) ?? "shader compile failed");
            }
            return shader;
        };
        const program = gl.createProgram();
        gl.attachShader(program, make(gl.VERTEX_SHADER, VERTEX_SHADER));
        gl.attachShader(program, make(gl.FRAGMENT_SHADER, FRAGMENT_SHADER));
        gl.linkProgram(program);
        if (!gl.getProgramParameter(program, gl.LINK_STATUS)) {
            throw new Error(gl.getProgramInfoLog(program) ?? "link failed");
        }
        return program;
    }
    /** Upload buffers as needed; positions only when the frame itself changed. */
    setFrame(frame, version, overlayOn) {
        const gl = this.gl;
        if (version !== this.uploadedVersion) {
            gl.bindBuffer(gl.ARRAY_BUFFER, this.positionBuffer);
            gl.bufferData(gl.ARRAY_BUFFER, frame.positions, gl.DYNAMIC_DRAW);
            this.uploadedVersion = version;
            this.uploadedOverlay = null;
            this.frame = frame;
            this.pointCount = frame.pointCount;
        }
        if (this.uploadedOverlay !== overlayOn && this.frame) {
            gl.bindBuffer(gl.ARRAY_BUFFER, this.colorBuffer);
            gl.bufferData(gl.ARRAY_BUFFER, chooseColors(this.frame, overlayOn), gl.DYNAMIC_DRAW);
            this.uploadedOverlay = overlayOn;
        }
    }
    draw(viewProjection, pointSizePx) {
        const gl = this.gl;
        gl.clearColor(0.05, 0.05, 0.08, 1);
        gl.clear(gl.COLOR_BUFFER_BIT | gl.DEPTH_BUFFER_BIT);
        if (this.pointCount === 0)
            return;
        gl.enable(gl.DEPTH_TEST);
        gl.useProgram(this.program);
        gl.uniformMatrix4fv(this.vpLoc, false, viewProjection);
        gl.uniform1f(this.sizeLoc, pointSizePx);
        gl.bindBuffer(gl.ARRAY_BUFFER, this.positionBuffer);
        gl.enableVertexAttribArray(this.positionLoc);
        gl.vertexAttribPointer(this.positionLoc, 3, gl.FLOAT, false, 0, 0);
        gl.bindBuffer(gl.ARRAY_BUFFER, this.colorBuffer);
        gl.enableVertexAttribArray(this.colorLoc);
        gl.vertexAttribPointer(this.colorLoc, 4, gl.UNSIGNED_BYTE, true, 0, 0);
        gl.drawArrays(gl.POINTS, 0, this.pointCount);
    }
}
