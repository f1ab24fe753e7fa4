// DOM HUD: frame/fps counters, stage toggles, class legend, error banner.
export class Hud {
    onToggle;
    onOverlay;
    stats;
    toggles;
    legend;
    banner;
    constructor(root, onToggle, onOverlay) {
        this.onToggle = onToggle;
        this.onOverlay = onOverlay;
        root.innerHTML = `
      <div class="hud-stats"></div>
      <div class="hud-banner" style="display:none"></div>
      <div class="hud-toggles"></div>
      <div class="hud-legend"></div>`;
        this.stats = root.querySelector(".hud-stats");
        this.toggles = root.querySelector(".hud-toggles");
        this.legend = root.querySelector(".hud-legend");
        this.banner = root.querySelector(".hud-banner");
    }
    render(state, frame) {
        const points = frame ? frame.pointCount : 0;
        this.stats.textContent =
            `frame ${state.lastFrameIndex}  points ${points}  ` +
                `stream ${state.streamFps.toFixed(1)} fps  ` +
                `pipeline ${state.serverFps.toFixed(1)} fps` +
                (state.paused ? "  [paused]" : "");
        if (state.errorBanner) {
            this.banner.style.display = "block";
            this.banner.textContent = state.errorBanner;
        }
        else {
            this.banner.style.display = "none";
        }
        this.renderToggles(state);
        this.renderLegend(state);
    }
    renderToggles(state) {
        const stages = Object.keys(state.stageStates).sort();
        const wanted = ["overlay-view", ...stages].join("|");
        if (this.toggles.dataset.stages !== wanted) {
            this.toggles.dataset.stages = wanted;
            this.toggles.innerHTML = "";
            const overlay = this.makeCheckbox("overlay (view)", state.overlayOn, (value) => this.onOverlay(value));
            this.toggles.appendChild(overlay);
            for (const stage of stages) {
                this.toggles.appendChild(this.makeCheckbox(stage, state.stageStates[stage], (value) => this.onToggle(stage, value)));
            }
        }
        else {
            const boxes = this.toggles.querySelectorAll("input");
            boxes.forEach((box) => {
                const stage = box.dataset.stage;
                box.checked = stage === "overlay (view)"
                    ? state.overlayOn : state.stageStates[stage];
            });
        }
    }
    makeCheckbox(label, checked, onChange) {
        const wrap = document.createElement("label");
        const box = document.createElement("input");
        box.type = "checkbox";
        box.checked = checked;
        box.dataset.stage = label;
        box.addEventListener("change", () => onChange(box.checked));
        wrap.appendChild(box);
        wrap.appendChild(document.createTextNode(" " + label));
        return wrap;
    }
    renderLegend(state) {
        const key = state.classes.map((c) => c.name).join("|");
        if (this.legend.dataset.key === key)
            return;
        this.legend.dataset.key = key;
        this.legend.innerHTML = "";
        for (const cls of state.classes) {
            const row = document.createElement("div");
            const swatch = document.createElement("span");
            const [r, g, b] = cls.color;
            swatch.style.cssText = `display:inline-block;width:10px;height:10px;` +
                `background:rgb(${r},${g},${b});margin-right:6px`;
            row.appendChild(swatch);
            row.appendChild(document.createTextNode(cls.name));
            this.legend.appendChild(row);
        }
    }
}
