// Build the wasm package first:
//   wasm-pack build crates/web --target web --out-dir www/pkg
import init, { sdpi_curves, mixing_times, ldp_bounds } from "./pkg/hsdp_web.js";

const num = (id) => parseFloat(document.getElementById(id).value);

function rows(flat, width) {
  const out = [];
  for (let i = 0; i < flat.length; i += width) out.push(Array.from(flat.slice(i, i + width)));
  return out;
}

// Draws one polyline per series; NaN breaks the line.
function plot(canvas, data, series, yMax) {
  const ctx = canvas.getContext("2d");
  const pad = 40, w = canvas.width - 2 * pad, h = canvas.height - 2 * pad;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#444";
  ctx.strokeRect(pad, pad, w, h);
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.fillText("0", pad - 12, pad + h + 14);
  ctx.fillText("1", pad + w - 4, pad + h + 14);
  ctx.fillText(String(+yMax.toPrecision(3)), 2, pad + 4);
  for (const { col, color, step } of series) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    let open = false, prevY = 0;
    for (const r of data) {
      const v = r[col];
      if (!Number.isFinite(v)) { open = false; continue; }
      const x = pad + r[0] * w, y = pad + h - (Math.min(v, yMax) / yMax) * h;
      if (!open) ctx.moveTo(x, y);
      else if (step) { ctx.lineTo(x, prevY); ctx.lineTo(x, y); }
      else ctx.lineTo(x, y);
      open = true;
      prevY = y;
    }
    ctx.stroke();
  }
}

function guarded(errId, f) {
  const err = document.getElementById(errId);
  try { f(); err.textContent = ""; } catch (e) { err.textContent = String(e); }
}

function drawSdpi() {
  guarded("s-err", () => {
    const data = rows(sdpi_curves(num("s-gamma"), num("s-gprime"), num("s-delta"), 201), 4);
    plot(document.getElementById("s-plot"), data, [
      { col: 1, color: "#888" }, { col: 2, color: "#1f77b4" }, { col: 3, color: "#d62728" },
    ], 1);
  });
}

function drawMixing() {
  guarded("m-err", () => {
    const data = rows(mixing_times(num("m-gamma"), num("m-gprime"), num("m-delta"), 201), 3);
    const finite = data.flatMap((r) => [r[1], r[2]]).filter(Number.isFinite);
    const yMax = Math.max(1, Math.min(50, ...finite.length ? [Math.max(...finite)] : [1]));
    plot(document.getElementById("m-plot"), data, [
      { col: 1, color: "#1f77b4", step: true }, { col: 2, color: "#d62728", step: true },
    ], yMax);
  });
}

function drawLdp() {
  guarded("l-err", () => {
    const [ours, prior] = ldp_bounds(num("l-eps"), num("l-delta"), num("l-tau"), num("l-lambda"));
    document.getElementById("l-ours").textContent = ours.toPrecision(6);
    document.getElementById("l-prior").textContent = Number.isFinite(prior) ? prior.toPrecision(6) : "undefined";
  });
}

await init();
for (const [prefix, draw] of [["s-", drawSdpi], ["m-", drawMixing], ["l-", drawLdp]]) {
  document.querySelectorAll(`input[id^="${prefix}"]`).forEach((el) => el.addEventListener("input", draw));
  draw();
}
