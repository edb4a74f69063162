import init, { counts, envelope, play_game } from "./pkg/forcing_lab_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(id, f) {
  const out = $(id);
  try {
    out.textContent = JSON.stringify(JSON.parse(f()), null, 2);
    out.className = "";
  } catch (e) {
    out.textContent = String(e);
    out.className = "err";
  }
}

await init();

$("c-go").onclick = () =>
  show("c-out", () => counts($("c-frame").value, num("c-n"), num("c-o"), num("c-d")));
$("e-go").onclick = () =>
  show("e-out", () => envelope(num("e-n"), $("e-q").value, $("e-s").value));
$("g-go").onclick = () =>
  show("g-out", () => play_game(num("g-n"), num("g-r"), $("g-s").value, $("g-x").value));
