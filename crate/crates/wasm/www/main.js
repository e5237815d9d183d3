import init, { analytic_landscape, boundary_trap, census } from "./pkg/landscape_lab_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function colormap(t) {
  // blue → white → red
  const c = Math.max(0, Math.min(1, t));
  const r = c < 0.5 ? 2 * c : 1;
  const b = c < 0.5 ? 1 : 2 - 2 * c;
  const g = 1 - Math.abs(2 * c - 1);
  return [255 * r, 255 * g, 255 * b];
}

function drawLandscape() {
  const canvas = $("ls-canvas");
  const ctx = canvas.getContext("2d");
  $("ls-msg").textContent = "";
  let data;
  try {
    data = JSON.parse(analytic_landscape(num("ls-steps"), num("ls-margin")));
  } catch (e) {
    $("ls-msg").innerHTML = `<span class="err">${e}</span>`;
    return;
  }
  const n = data.axis.length;
  const lim = data.axis[n - 1];
  const sorted = [...data.values].sort((a, b) => a - b);
  const lo = sorted[Math.floor(0.02 * sorted.length)];
  const hi = sorted[Math.floor(0.98 * sorted.length)];
  const img = ctx.createImageData(n, n);
  for (let row = 0; row < n; row++) {
    for (let col = 0; col < n; col++) {
      // row 0 of the image is the top, i.e. the largest ε2
      const v = data.values[(n - 1 - row) * n + col];
      const [r, g, b] = colormap((v - lo) / (hi - lo));
      const k = 4 * (row * n + col);
      img.data.set([r, g, b, 255], k);
    }
  }
  const off = new OffscreenCanvas(n, n);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);

  const px = (x) => ((x + lim) / (2 * lim)) * canvas.width;
  const py = (y) => canvas.height - ((y + lim) / (2 * lim)) * canvas.height;
  for (let i = 0; i < n; i++) {
    const c = data.axis[i];
    ctx.fillStyle = "#fff";
    ctx.fillRect(px(c) - 1.5, py(data.max_loc[i]) - 1.5, 3, 3);
    ctx.fillStyle = "#000";
    ctx.fillRect(px(c) - 1.5, py(data.min_loc[i]) - 1.5, 3, 3);
  }
  $("ls-msg").textContent = `ε1 horizontal, ε2 vertical, both in [−${lim.toFixed(3)}, ${lim.toFixed(3)}]`;
}

function plotLine(canvas, xs, ys, marks = []) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 30;
  ctx.clearRect(0, 0, w, h);
  const finite = ys.filter(Number.isFinite);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...finite), Math.max(...finite)];
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0 || 1)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.fillText(y1.toPrecision(4), 2, pad);
  ctx.fillText(y0.toPrecision(4), 2, h - pad);
  ctx.fillText(x0.toPrecision(3), pad, h - 10);
  ctx.fillText(x1.toPrecision(3), w - pad - 20, h - 10);
  ctx.strokeStyle = "#1f5fa8";
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  ctx.stroke();
  for (const [x, y, color] of marks) {
    ctx.fillStyle = color;
    ctx.beginPath();
    ctx.arc(sx(x), sy(y), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function runTrap() {
  try {
    const d = JSON.parse(boundary_trap(num("bt-t"), num("bt-z"), num("bt-s"), num("bt-n"), 0));
    const end = d.t.length - 1;
    plotLine($("bt-canvas"), d.t, d.profile, [[d.t[end], d.profile[end], d.is_trap ? "#c00" : "#080"]]);
    $("bt-out").textContent =
      `kappa = ${d.kappa}\nkappa_thr = ${d.kappa_thr}\nis_trap = ${d.is_trap}\n` +
      `J(corner) = ${d.j_at_corner}\nglobal max = ${d.j_global_max}\nmax inward gain = ${d.max_inward_gain}`;
  } catch (e) {
    $("bt-out").textContent = String(e);
  }
}

function runCensus() {
  try {
    const d = JSON.parse(census($("cs-fn").value, num("cs-a"), num("cs-b"), 4001));
    const marks = d.points.map((x, i) => [x, d.values[i], d.kinds[i] === "max" ? "#c00" : "#06c"]);
    plotLine($("cs-canvas"), d.curve.map((p) => p[0]), d.curve.map((p) => p[1]), marks);
    $("cs-out").textContent =
      `${d.points.length} critical points, ${d.distinct_values.length} distinct values\n` +
      d.distinct_values.map((v) => v.toPrecision(12)).join("\n");
  } catch (e) {
    $("cs-out").textContent = String(e);
  }
}

await init();
$("ls-run").onclick = drawLandscape;
$("bt-run").onclick = runTrap;
$("cs-run").onclick = runCensus;
drawLandscape();
runTrap();
runCensus();
