import init, { run_factorization, landscape_grid, mesh_output } from "./pkg/photonic_vqa_demo.js";

const $ = (id) => document.getElementById(id);

// ---- tabs -----------------------------------------------------------------

for (const button of document.querySelectorAll("nav button")) {
  button.addEventListener("click", () => {
    document.querySelectorAll("nav button").forEach((b) => b.classList.remove("active"));
    document.querySelectorAll("main section").forEach((s) => s.classList.remove("active"));
    button.classList.add("active");
    $(button.dataset.tab).classList.add("active");
  });
}

// ---- drawing helpers --------------------------------------------------------

function clear(ctx) {
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
}

function frame(ctx, pad) {
  const { width: w, height: h } = ctx.canvas;
  ctx.strokeStyle = "#c3ccd9";
  ctx.strokeRect(pad.l, pad.t, w - pad.l - pad.r, h - pad.t - pad.b);
}

function barChart(canvas, labels, values, highlight) {
  const ctx = canvas.getContext("2d");
  clear(ctx);
  const pad = { l: 46, r: 12, t: 16, b: 34 };
  frame(ctx, pad);
  const w = canvas.width - pad.l - pad.r;
  const h = canvas.height - pad.t - pad.b;
  const max = Math.max(...values, 1e-9);
  const slot = w / values.length;
  ctx.font = "12px system-ui";
  values.forEach((v, i) => {
    const bh = (v / max) * (h - 8);
    const x = pad.l + i * slot + slot * 0.18;
    ctx.fillStyle = highlight && highlight.includes(i) ? "#7950f2" : "#99a6ba";
    ctx.fillRect(x, pad.t + h - bh, slot * 0.64, bh);
    ctx.fillStyle = "#1b2330";
    ctx.textAlign = "center";
    ctx.fillText(labels[i], pad.l + (i + 0.5) * slot, canvas.height - pad.b + 16);
    ctx.fillText(v.toFixed(3), pad.l + (i + 0.5) * slot, pad.t + h - bh - 4);
  });
  ctx.textAlign = "left";
}

function traceChart(canvas, runs, mean, ground) {
  const ctx = canvas.getContext("2d");
  clear(ctx);
  const pad = { l: 52, r: 12, t: 12, b: 30 };
  frame(ctx, pad);
  const w = canvas.width - pad.l - pad.r;
  const h = canvas.height - pad.t - pad.b;
  const len = Math.max(mean.length, 2);
  let lo = ground, hi = -Infinity;
  for (const t of runs) for (const e of t) { hi = Math.max(hi, e); lo = Math.min(lo, e); }
  for (const e of mean) { hi = Math.max(hi, e); }
  if (!isFinite(hi)) hi = 1;
  const sx = (i) => pad.l + (i / (len - 1)) * w;
  const sy = (e) => pad.t + (1 - (e - lo) / (hi - lo || 1)) * h;

  const poly = (trace, color, widthPx) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = widthPx;
    ctx.beginPath();
    trace.forEach((e, i) => (i === 0 ? ctx.moveTo(sx(i), sy(e)) : ctx.lineTo(sx(Math.min(i, len - 1)), sy(e))));
    ctx.stroke();
  };
  for (const t of runs) poly(t, "rgba(121,80,242,0.25)", 1);
  poly(mean, "#1b2330", 2.2);

  ctx.setLineDash([6, 5]);
  ctx.strokeStyle = "#c92a2a";
  ctx.lineWidth = 1.2;
  ctx.beginPath();
  ctx.moveTo(pad.l, sy(ground));
  ctx.lineTo(pad.l + w, sy(ground));
  ctx.stroke();
  ctx.setLineDash([]);

  ctx.fillStyle = "#5b6778";
  ctx.font = "12px system-ui";
  ctx.fillText(hi.toFixed(0), 6, pad.t + 10);
  ctx.fillText(ground.toFixed(0), 6, sy(ground) + 4);
  ctx.textAlign = "center";
  ctx.fillText("iteration", pad.l + w / 2, canvas.height - 8);
  ctx.textAlign = "left";
}

const COLORMAP = (t) => {
  // dark violet -> warm yellow
  const r = Math.round(255 * Math.min(1, Math.max(0, 1.6 * t - 0.1)));
  const g = Math.round(255 * Math.min(1, Math.max(0, 1.4 * t * t)));
  const b = Math.round(255 * Math.min(1, Math.max(0, 0.7 - 0.8 * t + 0.6 * (1 - t) * (1 - t))));
  return [r, g, b];
};

function heatmap(canvas, grid) {
  const ctx = canvas.getContext("2d");
  clear(ctx);
  const pad = { l: 50, r: 10, t: 10, b: 40 };
  const w = canvas.width - pad.l - pad.r;
  const h = canvas.height - pad.t - pad.b;
  const n1 = grid.axis1.steps, n2 = grid.axis2.steps;
  const span = grid.e_max - grid.e_min || 1;
  const img = ctx.createImageData(n2, n1);
  for (let i = 0; i < n1; i++) {
    for (let j = 0; j < n2; j++) {
      const t = (grid.energies[i * n2 + j] - grid.e_min) / span;
      const [r, g, b] = COLORMAP(t);
      // axis1 increases upward
      const off = ((n1 - 1 - i) * n2 + j) * 4;
      img.data[off] = r; img.data[off + 1] = g; img.data[off + 2] = b; img.data[off + 3] = 255;
    }
  }
  const tile = document.createElement("canvas");
  tile.width = n2; tile.height = n1;
  tile.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(tile, pad.l, pad.t, w, h);
  frame(ctx, pad);
  ctx.fillStyle = "#1b2330";
  ctx.font = "12px system-ui";
  ctx.textAlign = "center";
  ctx.fillText(grid.axis2.name + " →", pad.l + w / 2, canvas.height - 10);
  ctx.save();
  ctx.translate(14, pad.t + h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(grid.axis1.name + " →", 0, 0);
  ctx.restore();
  ctx.textAlign = "left";
}

function colorbar(canvas, eMin, eMax) {
  const ctx = canvas.getContext("2d");
  clear(ctx);
  const pad = { l: 8, r: 46, t: 10, b: 40 };
  const h = canvas.height - pad.t - pad.b;
  for (let y = 0; y < h; y++) {
    const [r, g, b] = COLORMAP(1 - y / h);
    ctx.fillStyle = `rgb(${r},${g},${b})`;
    ctx.fillRect(pad.l, pad.t + y, 24, 1.5);
  }
  ctx.fillStyle = "#1b2330";
  ctx.font = "12px system-ui";
  ctx.fillText(eMax.toFixed(0), pad.l + 28, pad.t + 10);
  ctx.fillText(eMin.toFixed(0), pad.l + 28, pad.t + h);
  ctx.fillText("E", pad.l + 8, canvas.height - 14);
}

// ---- optimize tab -----------------------------------------------------------

function runOptimize() {
  const n = BigInt($("opt-n").value);
  const reps = Number($("opt-reps").value);
  const seed = BigInt($("opt-seed").value || "0");
  const shots = BigInt($("opt-shots").value || "0");
  $("status").textContent = "running " + reps + " repetitions…";
  setTimeout(() => {
    const t0 = performance.now();
    const data = JSON.parse(run_factorization(n, reps, seed, shots));
    const ms = (performance.now() - t0).toFixed(0);
    $("status").textContent = "";
    if (data.error) {
      $("opt-report").innerHTML = `<b class="bad">${data.error}</b>`;
      return;
    }
    const f = data.factors;
    const verdict = f.valid
      ? `<b class="ok">${data.n} = ${f.x} × ${f.y}</b>`
      : `<b class="bad">no valid factorization decoded</b>`;
    const gap = data.steps_to_gap["1e-2"];
    $("opt-report").innerHTML =
      `${verdict} — bit lengths (${data.nx}, ${data.ny}), ${data.modes}-mode mesh with ` +
      `${data.mzis} interferometers; ${data.converged}/${data.repetitions} runs converged, ` +
      `${data.excluded} excluded; mean trace reaches 1% of E<sub>g</sub>` +
      (gap === null ? " never" : ` at iteration ${gap}`) +
      `; equal-superposition fidelity ${data.fidelity_equal_superposition.toFixed(4)} (${ms} ms)`;
    traceChart($("opt-trace"), data.run_traces_shifted, data.mean_trace_shifted, data.ground_energy_shifted);
    barChart($("opt-dist"), data.labels, data.avg_distribution);
  }, 30);
}

// ---- landscape tab ----------------------------------------------------------

function runLandscape() {
  const family = $("land-family").value;
  const grid = Number($("land-grid").value);
  const data = JSON.parse(landscape_grid(family, 35n, grid));
  if (data.error) {
    $("land-hint").textContent = data.error;
    return;
  }
  heatmap($("land-map"), data);
  colorbar($("land-bar"), data.e_min, data.e_max);
  $("land-hint").textContent =
    `raw energy from ${data.e_min.toFixed(3)} to ${data.e_max.toFixed(3)} over a ` +
    `${data.axis1.steps} × ${data.axis2.steps} grid` +
    (data.e_max - data.e_min < 1e-9 ? " — completely flat: every point is a ground state." : ".");
}

// ---- mesh tab ----------------------------------------------------------------

const HALF_PI = Math.PI / 2;
const TAU = 2 * Math.PI;
const sliders = [];

function buildSliders() {
  const host = $("mesh-sliders");
  for (let k = 0; k < 12; k++) {
    const isTheta = k < 6;
    const label = document.createElement("label");
    const name = document.createElement("span");
    name.innerHTML = (isTheta ? "&theta;" : "&phi;") + "<sub>" + ((k % 6) + 1) + "</sub>";
    const input = document.createElement("input");
    input.type = "range";
    input.min = "0";
    input.max = String(isTheta ? HALF_PI : TAU);
    input.step = "0.001";
    input.value = String(isTheta ? HALF_PI : 0);
    const value = document.createElement("span");
    input.addEventListener("input", refreshMesh);
    label.append(name, input, value);
    host.append(label);
    sliders.push({ input, value });
  }
}

function refreshMesh() {
  const thetas = new Float64Array(6);
  const phis = new Float64Array(6);
  sliders.forEach((s, k) => {
    const v = Number(s.input.value);
    s.value.textContent = v.toFixed(2);
    if (k < 6) thetas[k] = v; else phis[k - 6] = v;
  });
  const data = JSON.parse(mesh_output(thetas, phis));
  if (data.error) {
    $("mesh-report").innerHTML = `<b class="bad">${data.error}</b>`;
    return;
  }
  const d = data.decoded;
  $("mesh-report").innerHTML =
    `E = ${data.energy_raw.toFixed(4)} raw, ${data.energy_shifted.toFixed(4)} shifted ` +
    `(ground ${data.ground_energy_shifted}); most likely state decodes to ` +
    (d.valid ? `<b class="ok">35 = ${d.x} × ${d.y}</b>` : `<b class="bad">${d.x} × ${d.y} = ${d.x * d.y}</b>`);
  barChart($("mesh-dist"), data.labels, data.probs, [1, 2]);
}

function setSliders(thetas, phis) {
  sliders.forEach((s, k) => {
    s.input.value = String(k < 6 ? thetas[k] : phis[k - 6]);
  });
  refreshMesh();
}

// ---- boot ---------------------------------------------------------------------

await init();
buildSliders();
refreshMesh();
runLandscape();

$("opt-run").addEventListener("click", runOptimize);
$("land-run").addEventListener("click", runLandscape);
$("mesh-random").addEventListener("click", () => {
  setSliders(
    Array.from({ length: 6 }, () => Math.random() * HALF_PI),
    Array.from({ length: 6 }, () => Math.random() * TAU),
  );
});
$("mesh-reflect").addEventListener("click", () => setSliders(new Array(6).fill(HALF_PI), new Array(6).fill(0)));
runOptimize();
