import init, { maxminExplorer, sweepCdf, lowSnrSplit } from "./pkg/mmimo_wasm_demo.js";

const COLORS = { equal: "#888", data_only: "#d08020", joint: "#2060c0" };
const $ = (id) => document.getElementById(id);

function call(fn, msgId, ...args) {
  const out = JSON.parse(fn(...args));
  $(msgId).textContent = out.error ?? "";
  $(msgId).className = out.error ? "err" : "";
  return out.error ? null : out;
}

function axes(ctx, w, h, pad, xr, yr, xlabel, ylabel) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#444";
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
  const sx = (x) => pad + ((x - xr[0]) / (xr[1] - xr[0])) * (w - 1.5 * pad);
  const sy = (y) => h - pad - ((y - yr[0]) / (yr[1] - yr[0])) * (h - 1.5 * pad);
  for (let i = 0; i <= 4; i++) {
    const x = xr[0] + ((xr[1] - xr[0]) * i) / 4;
    const y = yr[0] + ((yr[1] - yr[0]) * i) / 4;
    ctx.fillText(x.toFixed(1), sx(x) - 10, h - pad + 16);
    ctx.fillText(y.toFixed(2), 4, sy(y) + 4);
  }
  ctx.fillText(xlabel, w / 2, h - 6);
  ctx.save();
  ctx.translate(12, h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(ylabel, 0, 0);
  ctx.restore();
  return { sx, sy };
}

function legend(ctx, names, x, y) {
  names.forEach((n, i) => {
    ctx.fillStyle = COLORS[n];
    ctx.fillRect(x, y + i * 16, 12, 10);
    ctx.fillStyle = "#222";
    ctx.fillText(n, x + 18, y + i * 16 + 9);
  });
}

function explorer() {
  const out = call(maxminExplorer, "ex-msg", $("ex-dist").value, Number($("ex-snr").value), $("ex-det").value);
  const canvas = $("ex-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  $("ex-table").innerHTML = "";
  if (!out) return;
  // Stacked bars: pilot share (dark) and payload share (light) of each budget.
  const users = out.schemes[0].users.length;
  const group = (canvas.width - 60) / users;
  const bar = group / (out.schemes.length + 1);
  const { sy } = axes(ctx, canvas.width, canvas.height, 40, [0, 1], [0, 1], "", "budget share");
  out.schemes.forEach((s, j) => {
    s.users.forEach((u, i) => {
      const x = 44 + i * group + j * bar;
      ctx.fillStyle = COLORS[s.scheme];
      ctx.globalAlpha = 1;
      ctx.fillRect(x, sy(u.pilot_share), bar - 2, sy(0) - sy(u.pilot_share));
      ctx.globalAlpha = 0.35;
      ctx.fillRect(x, sy(1), bar - 2, sy(u.pilot_share) - sy(1));
      ctx.globalAlpha = 1;
    });
  });
  ctx.fillStyle = "#222";
  out.schemes[0].users.forEach((u, i) => ctx.fillText(`${u.distance_m} m`, 44 + i * group, canvas.height - 24));
  legend(ctx, out.schemes.map((s) => s.scheme), canvas.width - 110, 8);
  const rows = out.schemes
    .map((s) => `<tr><td>${s.scheme}</td><td>${s.min_se.toFixed(3)}</td><td>${s.sum_se.toFixed(3)}</td>`
      + s.users.map((u) => `<td>${u.se.toFixed(3)}</td>`).join("") + "</tr>")
    .join("");
  const head = out.schemes[0].users.map((u) => `<th>SE @ ${u.distance_m} m</th>`).join("");
  $("ex-table").innerHTML = `<tr><th>scheme</th><th>min SE</th><th>sum SE</th>${head}</tr>${rows}`;
}

function cdf() {
  const out = call(sweepCdf, "cdf-msg", Number($("cdf-drops").value), Number($("cdf-snr").value),
    $("cdf-obj").value, $("cdf-det").value, Number($("cdf-seed").value));
  const canvas = $("cdf-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!out) return;
  const all = out.curves.flatMap((c) => c.values);
  const xr = [Math.min(0, ...all), Math.max(...all) * 1.05 || 1];
  const label = out.metric === "min_se" ? "minimum SE (bit/s/Hz)" : "sum SE (bit/s/Hz)";
  const { sx, sy } = axes(ctx, canvas.width, canvas.height, 40, xr, [0, 1], label, "CDF");
  for (const c of out.curves) {
    ctx.strokeStyle = COLORS[c.scheme];
    ctx.lineWidth = 2;
    ctx.beginPath();
    c.values.forEach((v, i) => {
      const p = [sx(v), sy((i + 1) / c.values.length)];
      if (i === 0) ctx.moveTo(sx(v), sy(0));
      ctx.lineTo(p[0], sy(i / c.values.length));
      ctx.lineTo(p[0], p[1]);
    });
    ctx.stroke();
  }
  ctx.lineWidth = 1;
  legend(ctx, out.curves.map((c) => c.scheme), 60, 10);
}

function split() {
  const out = call(lowSnrSplit, "ls-msg", Number($("ls-seed").value), Number($("ls-drop").value),
    Number($("ls-lo").value), Number($("ls-hi").value), 61);
  const canvas = $("ls-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!out) return;
  const pts = out.points;
  const xr = [pts[0].edge_snr_db, pts[pts.length - 1].edge_snr_db];
  const { sx, sy } = axes(ctx, canvas.width, canvas.height, 40, xr, [0, 1], "edge SNR (dB)", "pilot share");
  ctx.setLineDash([6, 4]);
  ctx.beginPath();
  ctx.moveTo(sx(xr[0]), sy(out.low_snr_share));
  ctx.lineTo(sx(xr[1]), sy(out.low_snr_share));
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.strokeStyle = COLORS.joint;
  ctx.lineWidth = 2;
  ctx.beginPath();
  pts.forEach((p, i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, sx(p.edge_snr_db), sy(p.pilot_share)));
  ctx.stroke();
  ctx.lineWidth = 1;
  const low = pts[0];
  ctx.fillStyle = "#222";
  ctx.fillText(`at ${low.edge_snr_db} dB: joint min SE ${low.joint_min_se.toFixed(4)}, `
    + `data-only ${low.data_only_min_se.toFixed(4)} bit/s/Hz`, 60, 20);
}

await init();
for (const id of ["ex-dist", "ex-snr", "ex-det"]) $(id).addEventListener("input", explorer);
for (const id of ["ls-seed", "ls-drop", "ls-lo", "ls-hi"]) $(id).addEventListener("change", split);
$("cdf-run").addEventListener("click", cdf);
explorer();
cdf();
split();
