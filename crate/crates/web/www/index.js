import init, { Simulation } from "./pkg/cnlab_web.js";

const $ = (id) => document.getElementById(id);
let sim = null;
let playing = false;

function status(text) {
  $("status").textContent = text;
}

function reset() {
  try {
    sim = new Simulation(
      Number($("res").value),
      $("kind").value,
      Number($("amplitude").value),
      Number($("seed").value),
      Number($("nu").value),
    );
    draw();
  } catch (e) {
    status(`error: ${e}`);
  }
}

function draw() {
  const n = sim.res();
  const rgba = sim.vorticity_rgba();
  const img = new ImageData(new Uint8ClampedArray(rgba), n, n);
  const off = new OffscreenCanvas(n, n);
  off.getContext("2d").putImageData(img, 0, 0);
  const ctx = $("field").getContext("2d");
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, $("field").width, $("field").height);
  const smooth = $("smooth").checked;
  status(`t = ${sim.time().toFixed(3)}   B^-1 norm = ${sim.besov(-1, smooth).toExponential(4)}`);
}

function advance() {
  try {
    const span = Number($("span").value);
    sim.advance(span, Math.max(1, Math.ceil(span / 2e-3)));
    draw();
  } catch (e) {
    playing = false;
    status(`error: ${e}`);
  }
}

function loop() {
  if (!playing) return;
  advance();
  requestAnimationFrame(loop);
}

function axes(ctx, w, h, xlabel, ylabel) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#444";
  ctx.beginPath();
  ctx.moveTo(40, 10);
  ctx.lineTo(40, h - 30);
  ctx.lineTo(w - 10, h - 30);
  ctx.stroke();
  ctx.fillStyle = "#222";
  ctx.fillText(xlabel, w / 2, h - 8);
  ctx.fillText(ylabel, 4, 12);
}

function spectrum() {
  const norms = sim.block_norms($("smooth").checked);
  const c = $("plot");
  const ctx = c.getContext("2d");
  axes(ctx, c.width, c.height, "block j", "log10 sup |block|");
  const logs = Array.from(norms, (v) => (v > 0 ? Math.log10(v) : -16));
  const lo = Math.min(...logs, -1);
  const hi = Math.max(...logs, 0);
  const bw = (c.width - 60) / logs.length;
  ctx.fillStyle = "#c33";
  logs.forEach((v, i) => {
    const y = 10 + ((hi - v) / (hi - lo)) * (c.height - 40);
    ctx.fillRect(45 + i * bw, y, bw - 4, c.height - 30 - y);
    ctx.fillStyle = "#222";
    ctx.fillText(i === 0 ? "S0" : String(i - 1), 45 + i * bw, c.height - 18);
    ctx.fillStyle = "#c33";
  });
}

function curve() {
  const data = sim.heat_curve(1.0);
  const c = $("plot");
  const ctx = c.getContext("2d");
  axes(ctx, c.width, c.height, "log10 t", "sqrt(t) sup |heat flow|");
  const pts = [];
  for (let i = 0; i < data.length; i += 2) pts.push([Math.log10(data[i]), data[i + 1]]);
  const x0 = pts[0][0];
  const x1 = pts[pts.length - 1][0];
  const ymax = Math.max(...pts.map((p) => p[1])) || 1;
  ctx.strokeStyle = "#36c";
  ctx.beginPath();
  pts.forEach(([x, y], i) => {
    const px = 40 + ((x - x0) / (x1 - x0)) * (c.width - 50);
    const py = c.height - 30 - (y / ymax) * (c.height - 50);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
  status(`Kato smallness on [0, 1]: ${sim.kato(1.0).toExponential(4)}`);
}

await init();
$("reset").onclick = reset;
$("advance").onclick = advance;
$("play").onclick = () => {
  playing = !playing;
  $("play").textContent = playing ? "Pause" : "Play";
  loop();
};
$("spectrum").onclick = spectrum;
$("curve").onclick = curve;
reset();
