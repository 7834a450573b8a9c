import init, { PulseParams, simulate, mixing, width_scan } from "./pkg/dressed_wasm.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

function legend(id, labels) {
  document.getElementById(id).innerHTML = labels
    .map((l, i) => `<span><i style="background:${COLORS[i]}"></i>${l}</span>`)
    .join("");
}

// Draws each series against x. `logX`/`logY` switch the axes to log10.
function plot(canvas, x, series, { logX = false, logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, L = 60, R = 10, T = 10, B = 30;
  const tx = logX ? Math.log10 : (v) => v;
  const ty = logY ? (v) => Math.log10(Math.max(v, 1e-300)) : (v) => v;
  const xs = Array.from(x, tx);
  const ys = series.flatMap((s) => Array.from(s, ty)).filter(Number.isFinite);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (logY) y0 = Math.max(y0, y1 - 12);
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const px = (v) => L + ((v - x0) / (x1 - x0)) * (W - L - R);
  const py = (v) => T + (1 - (v - y0) / (y1 - y0)) * (H - T - B);

  ctx.clearRect(0, 0, W, H);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(L, T, W - L - R, H - T - B);
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  for (let i = 0; i <= 4; i++) {
    const xv = x0 + ((x1 - x0) * i) / 4, yv = y0 + ((y1 - y0) * i) / 4;
    const xl = logX ? `1e${xv.toFixed(1)}` : xv.toPrecision(3);
    const yl = logY ? `1e${yv.toFixed(1)}` : yv.toPrecision(3);
    ctx.fillText(xl, px(xv) - 15, H - 10);
    ctx.fillText(yl, 4, py(yv) + 4);
  }
  series.forEach((s, k) => {
    ctx.strokeStyle = COLORS[k % COLORS.length];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let down = false;
    for (let i = 0; i < xs.length; i++) {
      const yv = ty(s[i]);
      if (!Number.isFinite(yv) || (logY && yv < y0)) { down = false; continue; }
      down ? ctx.lineTo(px(xs[i]), py(yv)) : ctx.moveTo(px(xs[i]), py(yv));
      down = true;
    }
    ctx.stroke();
  });
}

const value = (id) => Number(document.getElementById(id).value);

function params(points = 1201) {
  return new PulseParams(value("peak"), value("width"), 1.0, value("chirp"), value("decay"), points);
}

function updatePulse() {
  for (const id of ["peak", "width", "chirp", "decay"]) {
    document.querySelector(`output[for=${id}]`).textContent = value(id);
  }
  const err = document.getElementById("error");
  try {
    const r = simulate(params());
    err.textContent = "";
    const peak = value("peak");
    plot(document.getElementById("pulse"), r.t, [
      r.envelope.map((v) => v / peak),
      r.excited_analytic,
      r.excited_numerical,
      r.virtual_ground,
      r.dressed_excited,
    ], { logY: true });
    document.getElementById("pulse-stats").textContent =
      `margin ${r.margin.toExponential(2)}   max |p₂ analytic − p₂ numerical| ${r.max_population_error.toExponential(2)}`;
  } catch (e) {
    err.textContent = String(e);
  }
}

function updateMixing() {
  const c = mixing(1.0, value("decay"), 1e-3, 1e3, 241);
  plot(document.getElementById("mixing"), c.ratio, [c.cos_squared, c.sin_squared], { logX: true });
}

function runScan() {
  const widths = [25, 50, 100, 200, 400, 800];
  const s = width_scan(params(801), new Float64Array(widths));
  plot(document.getElementById("scan-plot"), s.width, [s.margin, s.error], { logX: true, logY: true });
}

await init();
legend("pulse-legend", ["Ω(t)/Ω_peak", "|a₂|² closed form", "|a₂|² numerical", "virtual |G⟩ population", "dressed |E⟩ population"]);
legend("mixing-legend", ["|cos(θ/2)|²", "|sin(θ/2)|² (x axis: Ω/|Δω|)"]);
legend("scan-legend", ["adiabaticity margin", "max population error (x axis: τ·Δω)"]);
for (const id of ["peak", "width", "chirp", "decay"]) {
  document.getElementById(id).addEventListener("input", () => {
    updatePulse();
    if (id === "decay") updateMixing();
  });
}
document.getElementById("scan").addEventListener("click", runScan);
updatePulse();
updateMixing();
