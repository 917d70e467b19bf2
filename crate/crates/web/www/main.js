import init, { networkStats, exponentialExplorer, seasonalExplorer } from "./pkg/airnet_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

// Draws point series and line series on shared axes. `log` plots log10 of both coordinates.
function plot(canvas, { points = [], lines = [], log = false, marks = [] }) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const tx = (v) => (log ? Math.log10(v) : v);
  const all = [...points.flatMap((s) => s.data), ...lines.flatMap((s) => s.data)]
    .filter(([x, y]) => y !== null && (!log || (x > 0 && y > 0)));
  if (all.length === 0) return;
  const xs = all.map(([x]) => tx(x));
  const ys = all.map(([, y]) => tx(y));
  let [x0, x1, y0, y1] = [Math.min(...xs), Math.max(...xs), Math.min(...ys), Math.max(...ys)];
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) y1 = y0 + 1;
  const px = (x) => pad + ((tx(x) - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (y) => h - pad - ((tx(y) - y0) / (y1 - y0)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  const fmt = (v) => (log ? `1e${v.toFixed(1)}` : v.toPrecision(3));
  ctx.fillText(fmt(x0), pad, h - pad + 14);
  ctx.fillText(fmt(x1), w - pad - 30, h - pad + 14);
  ctx.fillText(fmt(y0), 2, h - pad);
  ctx.fillText(fmt(y1), 2, pad + 4);

  for (const { data, color } of lines) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    let drawing = false;
    for (const [x, y] of data) {
      if (y === null || (log && (x <= 0 || y <= 0))) { drawing = false; continue; }
      drawing ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y));
      drawing = true;
    }
    ctx.stroke();
  }
  for (const { data, color } of points) {
    ctx.fillStyle = color;
    for (const [x, y] of data) {
      if (log && (x <= 0 || y <= 0)) continue;
      ctx.beginPath();
      ctx.arc(px(x), py(y), 3, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
  ctx.strokeStyle = "#d22";
  for (const [x, y] of marks) {
    ctx.beginPath();
    ctx.arc(px(x), py(y), 7, 0, 2 * Math.PI);
    ctx.stroke();
  }
}

function show(out, result) {
  out.className = result.error ? "error" : "";
  out.textContent = result.error ?? "";
  return !result.error;
}

function runNetwork() {
  const r = JSON.parse(networkStats(num("net-n"), num("net-k"), num("net-gamma"), num("net-two"), num("net-seed")));
  if (!show($("net-out"), r)) return;
  const lines = [];
  if (r.fit) {
    const p = r.fit.parameters;
    const xs = r.distribution.map(([x]) => x);
    const lo = Math.min(...xs), hi = Math.max(...xs);
    const left = [lo, p.k_break].map((x) => [x, Math.exp(p.intercept1) * x ** p.lambda1]);
    const right = [p.k_break, hi].map((x) => [x, Math.exp(p.intercept2) * x ** p.lambda2]);
    lines.push({ data: left, color: "#2a7" }, { data: right, color: "#c60" });
  }
  plot($("net-plot"), { points: [{ data: r.distribution, color: "#246" }], lines, log: true });
  const f = r.fit ? r.fit.parameters : null;
  $("net-out").textContent = [
    `nodes ${r.nodes}, arcs ${r.arcs}, links ${r.edges}, mean degree ${r.mean_degree.toFixed(2)}`,
    `reciprocity ${r.reciprocity?.toFixed(3) ?? "undefined"}, clustering ${r.clustering.toFixed(3)}`,
    `largest component ${r.largest_component ?? "-"}, mean path ${r.mean_path_length?.toFixed(3) ?? "-"}, diameter ${r.diameter ?? "-"}`,
    f ? `two-regime fit: lambda1 ${f.lambda1.toFixed(3)}, lambda2 ${f.lambda2.toFixed(3)}, break ${f.k_break.toFixed(1)}`
      : "two-regime fit: too few bins",
  ].join("\n");
}

function runExponential() {
  const r = JSON.parse(exponentialExplorer($("exp-text").value));
  if (!show($("exp-out"), r)) return;
  plot($("exp-plot"), { points: [{ data: r.points, color: "#246" }], lines: [{ data: r.curve, color: "#c60" }] });
  const p = r.fit.parameters, g = r.fit.goodness_of_fit;
  $("exp-out").textContent =
    `A ${p.amplitude.toPrecision(5)}, s ${p.scale.toPrecision(5)}, c ${p.offset.toPrecision(5)}\n` +
    `rmse ${g.rmse.toPrecision(4)} over ${r.fit.n_points} points`;
}

function runSeasonal() {
  const r = JSON.parse(seasonalExplorer(num("sea-rate"), num("sea-noise"), num("sea-dip"), num("sea-factor"), num("sea-seed")));
  if (!show($("sea-out"), r)) return;
  const observed = r.observed.map((v, t) => [t, v]);
  const trend = r.trend.map((v, t) => [t, v]);
  plot($("sea-plot"), {
    points: [{ data: observed, color: "#246" }],
    lines: [{ data: trend, color: "#c60" }],
    marks: r.outliers.map((t) => observed[t]),
  });
  const months = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];
  $("sea-out").textContent =
    `trend growth rate ${r.growth.parameters.rate.toFixed(4)} per month\n` +
    `outlier months ${r.outliers.join(", ") || "none"}\n` +
    months.map((m, i) => `${m} ${r.indices[i].toFixed(3)} (true ${r.true_indices[i].toFixed(2)})`).join("  ");
}

await init();
$("exp-text").value = Array.from({ length: 25 }, (_, i) =>
  `${i},${(2 * Math.exp(i / 6) + 10 + Math.sin(3 * i)).toFixed(3)}`).join("\n");
$("net-run").onclick = runNetwork;
$("exp-run").onclick = runExponential;
$("sea-run").onclick = runSeasonal;
runNetwork();
runExponential();
runSeasonal();
