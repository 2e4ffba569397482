import init, { polytope_summary, fibonacci_bracket, planar_bracket } from "./pkg/steerlp_web.js";

const $ = (id) => document.getElementById(id);

function show(el, f) {
  el.classList.remove("err");
  const t0 = performance.now();
  try {
    const out = JSON.parse(f());
    out.ms = Math.round(performance.now() - t0);
    el.textContent = JSON.stringify(out, (k, v) => (k === "bloch" ? `[${v.length} vectors]` : v), 2);
    return out;
  } catch (e) {
    el.classList.add("err");
    el.textContent = String(e.message ?? e);
    return null;
  }
}

function polytopeArgs() {
  return [$("p-kind").value, Number($("p-size").value)];
}

// Orthographic view of the Bloch vectors, tilted so all three axes are visible.
function draw(bloch) {
  const c = $("p-canvas");
  const g = c.getContext("2d");
  const s = c.width / 2 - 12;
  g.clearRect(0, 0, c.width, c.height);
  g.strokeStyle = "#bbb";
  g.beginPath();
  g.arc(c.width / 2, c.height / 2, s, 0, 2 * Math.PI);
  g.stroke();
  const a = 0.5, b = 0.35;
  const pts = bloch.map(([x, y, z]) => {
    const x1 = x * Math.cos(a) - y * Math.sin(a);
    const y1 = x * Math.sin(a) + y * Math.cos(a);
    return [x1, y1 * Math.sin(b) + z * Math.cos(b), y1 * Math.cos(b) - z * Math.sin(b)];
  });
  pts.sort((p, q) => p[2] - q[2]);
  for (const [x, y, depth] of pts) {
    g.fillStyle = depth > 0 ? "#1f5fa8" : "#9db7d6";
    g.beginPath();
    g.arc(c.width / 2 + s * x, c.height / 2 - s * y, 3, 0, 2 * Math.PI);
    g.fill();
  }
}

await init();

$("p-run").onclick = () => {
  const out = show($("p-out"), () => polytope_summary(...polytopeArgs()));
  if (out) draw(out.bloch);
};
$("f-run").onclick = () =>
  show($("f-out"), () => fibonacci_bracket(Number($("f-m").value), ...polytopeArgs(), $("f-oracle").checked));
$("l-run").onclick = () =>
  show($("l-out"), () => planar_bracket($("l-angles").value, Number($("l-sides").value)));

$("p-run").click();
