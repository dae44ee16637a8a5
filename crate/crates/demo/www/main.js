import init, { threshold_curve, sure_curve, universal_lambda, denoise_demo } from "./pkg/sbite_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function frame(ctx, xs, series, opts = {}) {
  const { width: w, height: h } = ctx.canvas;
  const pad = 30;
  const all = series.flatMap((s) => s.data).filter(Number.isFinite);
  const lo = opts.ymin ?? Math.min(...all);
  const hi = opts.ymax ?? Math.max(...all);
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - lo) / (hi - lo || 1)) * (h - 2 * pad);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(pad, py(0)); ctx.lineTo(w - pad, py(0));
  ctx.stroke();
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.width ?? 1.5;
    ctx.beginPath();
    s.data.forEach((y, i) => (i ? ctx.lineTo(px(xs[i]), py(y)) : ctx.moveTo(px(xs[i]), py(y))));
    ctx.stroke();
  }
  ctx.fillStyle = "#555";
  ctx.fillText(hi.toPrecision(3), 2, pad);
  ctx.fillText(lo.toPrecision(3), 2, h - pad);
  return { px, py };
}

function drawThreshold() {
  const lambda = num("t-lambda"), nu = num("t-nu"), s = num("t-s");
  const n = 401;
  const v = threshold_curve(lambda, nu, s, 3.5, n);
  const xs = Array.from(v.slice(0, n));
  frame($("t-canvas").getContext("2d"), xs, [
    { data: xs, color: "#bbb", width: 1 },
    { data: Array.from(v.slice(n)), color: "#1f77b4", width: 2 },
  ]);
}

function drawSure() {
  const q = parseInt($("s-q").value, 10);
  const count = num("s-count"), mu = num("s-mu"), nu = num("s-nu");
  const seed = Math.max(0, parseInt($("s-seed").value, 10) || 0);
  const n = 1000, pts = 200, lmax = 2 * Math.sqrt(2 * Math.log(n)) + Math.sqrt(q);
  const v = sure_curve(seed, n, q, count, mu, nu, 0, lmax, pts);
  const xs = Array.from(v.slice(0, pts));
  const ctx = $("s-canvas").getContext("2d");
  const { px } = frame(ctx, xs, [
    { data: Array.from(v.slice(pts, 2 * pts)), color: "#1f77b4" },
    { data: Array.from(v.slice(2 * pts)), color: "#ff7f0e" },
  ]);
  const u = universal_lambda(n, q);
  ctx.strokeStyle = "#888";
  ctx.setLineDash([4, 4]);
  ctx.beginPath(); ctx.moveTo(px(u), 0); ctx.lineTo(px(u), ctx.canvas.height); ctx.stroke();
  ctx.setLineDash([]);
}

function drawDenoise() {
  const len = 2048, t0 = 700;
  const seed = Math.max(0, parseInt($("d-seed").value, 10) || 0);
  const v = denoise_demo(seed, len, t0, num("d-amp"), $("d-rule").value);
  const ctx = $("d-canvas").getContext("2d");
  const { width: w, height: h } = ctx.canvas;
  ctx.clearRect(0, 0, w, h);
  const band = h / 3;
  const xs = Array.from({ length: len }, (_, i) => i);
  for (let c = 0; c < 3; c++) {
    const noisy = Array.from(v.slice(c * len, (c + 1) * len));
    const clean = Array.from(v.slice((3 + c) * len, (4 + c) * len));
    const peak = Math.max(...noisy.map(Math.abs), 1e-9);
    const sub = document.createElement("canvas");
    sub.width = w; sub.height = band;
    frame(sub.getContext("2d"), xs, [
      { data: noisy, color: "#bbb", width: 1 },
      { data: clean, color: "#000", width: 1.5 },
    ], { ymin: -peak, ymax: peak });
    ctx.drawImage(sub, 0, c * band);
  }
}

function bind(ids, draw) {
  for (const id of ids) {
    const el = $(id);
    const out = $(id + "-v");
    const update = () => {
      if (out) out.textContent = el.value;
      try { draw(); $("status").textContent = ""; } catch (e) { $("status").textContent = String(e); }
    };
    el.addEventListener("input", update);
    update();
  }
}

await init();
bind(["t-lambda", "t-nu", "t-s"], drawThreshold);
bind(["s-count", "s-mu", "s-nu", "s-q", "s-seed"], drawSure);
bind(["d-amp", "d-rule", "d-seed"], drawDenoise);
