import init, { dimension, spectrum, sumset } from "./pkg/dynspec_wasm.js";

const $ = (id) => document.getElementById(id);

function rows(canvas, layers) {
  const g = canvas.getContext("2d");
  g.clearRect(0, 0, canvas.width, canvas.height);
  const xs = layers.flatMap((l) => (l.intervals || []).flat().concat(l.ticks || []));
  if (!xs.length) return;
  let lo = Math.min(...xs), hi = Math.max(...xs);
  if (hi <= lo) { lo -= 0.5; hi += 0.5; }
  const sx = (x) => 10 + ((x - lo) / (hi - lo)) * (canvas.width - 20);
  layers.forEach((l, i) => {
    const y = 20 + i * 30;
    g.fillStyle = g.strokeStyle = l.color;
    for (const [a, b] of l.intervals || []) g.fillRect(sx(a), y, Math.max(sx(b) - sx(a), 0.5), 10);
    for (const t of l.ticks || []) { g.beginPath(); g.moveTo(sx(t), y - 4); g.lineTo(sx(t), y + 14); g.stroke(); }
  });
  g.fillStyle = "#444";
  g.fillText(lo.toFixed(6), 10, canvas.height - 6);
  g.fillText(hi.toFixed(6), canvas.width - 80, canvas.height - 6);
}

function run(out, f) {
  try {
    const v = JSON.parse(f());
    out.classList.remove("err");
    return v;
  } catch (e) {
    out.textContent = String(e.message || e);
    out.classList.add("err");
  }
}

function onDimension() {
  const v = run($("dim-out"), () => dimension($("dim-set").value, +$("dim-depth").value));
  if (!v) return;
  $("dim-out").textContent = v.set + "\n" + v.rows.map((r) => `depth ${r.depth}: [${r.lower.toFixed(10)}, ${r.upper.toFixed(10)}]`).join("\n");
  const bounds = v.rows.map((r) => [r.lower, r.upper]);
  rows($("dim-plot"), [{ intervals: v.cover, color: "#236" }]);
  const g = $("dim-plot").getContext("2d");
  g.fillStyle = "#2a6";
  g.fillText(`dimension in [${bounds.at(-1)[0].toFixed(6)}, ${bounds.at(-1)[1].toFixed(6)}]`, 10, 70);
}

function onSpectrum() {
  const v = run($("scan-out"), () => spectrum($("scan-digits").value, +$("scan-period").value));
  if (!v) return;
  const vals = v.values.map((x) => x.decimal);
  $("scan-out").textContent = `${v.orbits} orbits, ${vals.length} distinct values\n` +
    v.values.slice(0, 12).map((x) => `${x.decimal.toFixed(12)}  ${x.exact}`).join("\n");
  rows($("scan-plot"), [{ ticks: vals, color: "#236" }]);
}

function onSumset() {
  const v = run($("sum-out"), () => sumset($("sum-left").value, $("sum-right").value,
    $("sum-op").value === "minus", +$("sum-depth").value, $("sum-margin").value));
  if (!v) return;
  const c = v.certificate;
  const layers = [{ intervals: v.cover, color: "#236" }];
  if (c.outcome === "certified") layers.push({ intervals: [[+c.lo_decimal, +c.hi_decimal]], color: "#2a6" });
  $("sum-out").textContent = `${v.components} components, length ${v.length.toFixed(6)}\n` + JSON.stringify(c, null, 1);
  rows($("sum-plot"), layers);
}

await init();
$("dim-run").onclick = onDimension;
$("scan-run").onclick = onSpectrum;
$("sum-run").onclick = onSumset;
onDimension();
onSpectrum();
onSumset();
