import init, { Demo } from "./pkg/nnanim_web.js";

const SAMPLE = `# edit me, then Compile
network {
  layer ff { units: 3 }
  layer ff { units: 5 }
  layer ff { units: 3 }
}
animate forward_pass {}
animate dropout { rate: 0.4, seed: 7 }
render { fps: 15, width_px: 480, height_px: 270 }
`;

const $ = (id) => document.getElementById(id);
let demo = null;
let playing = false;
let started = 0;

function showError(e) {
  $("error").textContent = e ? String(e.message ?? e) : "";
}

function draw(t) {
  if (!demo) return;
  $("stage").innerHTML = demo.svgAt(t);
  $("time").textContent = t.toFixed(2);
  $("scrub").value = t / demo.duration();
}

function refreshPlan() {
  $("plan").textContent = demo.planSummary() || "(no dropout directive)";
}

function compile() {
  try {
    const next = new Demo($("source").value);
    demo?.free();
    demo = next;
    showError(null);
    refreshPlan();
    draw(0);
  } catch (e) {
    showError(e);
  }
}

function replan() {
  if (!demo) return;
  try {
    demo.replanDropout(Number($("rate").value), BigInt($("seed").value || 0));
    showError(null);
    refreshPlan();
    draw(Number($("scrub").value) * demo.duration());
  } catch (e) {
    showError(e);
  }
}

function tick(now) {
  if (!playing || !demo) return;
  const t = ((now - started) / 1000) % demo.duration();
  draw(t);
  requestAnimationFrame(tick);
}

function downloadGif() {
  if (!demo) return;
  try {
    const blob = new Blob([demo.gif()], { type: "image/gif" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "network.gif";
    a.click();
    URL.revokeObjectURL(a.href);
  } catch (e) {
    showError(e);
  }
}

await init();
$("source").value = SAMPLE;
$("compile").onclick = compile;
$("replan").onclick = replan;
$("gif").onclick = downloadGif;
$("scrub").oninput = () => {
  playing = false;
  $("play").textContent = "Play";
  if (demo) draw(Number($("scrub").value) * demo.duration());
};
$("play").onclick = () => {
  playing = !playing;
  $("play").textContent = playing ? "Pause" : "Play";
  if (playing && demo) {
    started = performance.now() - Number($("scrub").value) * demo.duration() * 1000;
    requestAnimationFrame(tick);
  }
};
compile();
