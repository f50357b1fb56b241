import init, { potentialProfile, whithamCurve, phaseConstants } from "./pkg/kdv_gas_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const status = (msg) => { $("status").textContent = msg; };

function plot(xs, ys, { xlabel, ylabel, marks = [] }) {
  const c = $("plot");
  const g = c.getContext("2d");
  const pad = 48;
  const w = c.width - 2 * pad;
  const h = c.height - 2 * pad;
  g.clearRect(0, 0, c.width, c.height);

  const fin = ys.filter(Number.isFinite);
  if (fin.length === 0) {
    status("no finite values in range");
    return;
  }
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...fin), Math.max(...fin)];
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * w;
  const sy = (y) => pad + h - ((y - y0) / (y1 - y0)) * h;

  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, w, h);
  g.fillStyle = "#333";
  g.font = "12px system-ui";
  g.fillText(x0.toPrecision(4), pad, pad + h + 16);
  g.fillText(x1.toPrecision(4), pad + w - 40, pad + h + 16);
  g.fillText(y1.toPrecision(4), 2, pad + 4);
  g.fillText(y0.toPrecision(4), 2, pad + h);
  g.fillText(xlabel, pad + w / 2, c.height - 8);
  g.fillText(ylabel, 8, pad - 12);

  g.strokeStyle = "#c60";
  g.setLineDash([4, 4]);
  for (const m of marks) {
    if (m < x0 || m > x1) continue;
    g.beginPath();
    g.moveTo(sx(m), pad);
    g.lineTo(sx(m), pad + h);
    g.stroke();
  }
  g.setLineDash([]);

  // Guarded points are NaN and break the line.
  g.strokeStyle = "#1f5fa8";
  g.lineWidth = 1.2;
  g.beginPath();
  let pen = false;
  xs.forEach((x, i) => {
    const y = ys[i];
    if (!Number.isFinite(y)) { pen = false; return; }
    pen ? g.lineTo(sx(x), sy(y)) : g.moveTo(sx(x), sy(y));
    pen = true;
  });
  g.stroke();
}

function run(f) {
  status("");
  try {
    f();
  } catch (e) {
    status(String(e.message ?? e));
  }
}

function drawProfile() {
  const [eta1, eta2, r1, t] = [num("eta1"), num("eta2"), num("r1"), num("t")];
  const [xmin, xmax, nx] = [num("xmin"), num("xmax"), num("nx")];
  const route = $("route").value;
  const start = performance.now();
  const u = potentialProfile(eta1, eta2, r1, t, xmin, xmax, nx, route, num("nodes"));
  const xs = Array.from({ length: nx }, (_, i) => xmin + ((xmax - xmin) * i) / (nx - 1));
  const consts = JSON.parse(phaseConstants(eta1, eta2, r1));
  const marks = t > 0 ? [4 * t * consts.xi_crit, 4 * t * consts.xi_top] : [];
  plot(xs, Array.from(u), { xlabel: "x", ylabel: `u(x, ${t})`, marks });
  const skipped = u.filter((v) => !Number.isFinite(v)).length;
  $("out").textContent =
    `${nx} points in ${(performance.now() - start).toFixed(0)} ms` +
    (skipped ? `, ${skipped} outside the route's range` : "");
}

function drawWhitham() {
  const pairs = whithamCurve(num("eta1"), num("eta2"), 200);
  const xi = [], alpha = [];
  for (let i = 0; i < pairs.length; i += 2) {
    xi.push(pairs[i]);
    alpha.push(pairs[i + 1]);
  }
  plot(xi, alpha, { xlabel: "xi = x / 4t", ylabel: "alpha" });
  $("out").textContent = `xi_crit = ${xi[0]}\nxi_top  = ${xi[xi.length - 1]}`;
}

function showPhases() {
  const c = JSON.parse(phaseConstants(num("eta1"), num("eta2"), num("r1")));
  $("out").textContent = Object.entries(c).map(([k, v]) => `${k.padEnd(9)}${v}`).join("\n");
}

await init();
$("profile").onclick = () => run(drawProfile);
$("whitham").onclick = () => run(drawWhitham);
$("phases").onclick = () => run(showPhases);
run(drawProfile);
