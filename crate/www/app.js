import init, { lint, sections } from "./pkg/secomlint_web.js";

const $ = (id) => document.getElementById(id);

const COLORS = {
  ACTION: "#cde8ff", FLAW: "#ffd6d6", VULNID: "#ffc58a", CWEID: "#ffe08a",
  ISSUE: "#e0d4ff", EMAIL: "#d4f5e0", URL: "#d4eef5", SHA: "#eeeeee",
  VERSION: "#f0e6d0", SEVERITY: "#ffb3b3", DETECTION: "#c9f2c9", SECWORD: "#f7d4f0",
};

function highlight(text, entities) {
  const chars = [...text];
  const frag = document.createDocumentFragment();
  let at = 0;
  // Overlapping entities of different kinds: keep the first one that starts.
  for (const e of entities) {
    const [start, end] = e.span;
    if (start < at) continue;
    frag.append(chars.slice(at, start).join(""));
    const mark = document.createElement("mark");
    mark.style.background = COLORS[e.kind] || "#eee";
    mark.title = e.kind;
    mark.textContent = chars.slice(start, end).join("");
    frag.append(mark);
    at = end;
  }
  frag.append(chars.slice(at).join(""));
  return frag;
}

function update() {
  const message = $("message").value;
  const result = JSON.parse(lint(message, $("config").value, $("score").checked));
  const report = $("report");
  report.className = result.error ? "error" : "";
  report.textContent = result.error || result.text;

  const target = $("sections");
  target.replaceChildren();
  const parts = JSON.parse(sections(message));
  if (parts.error) {
    target.textContent = parts.error;
    return;
  }
  for (const part of parts) {
    const div = document.createElement("div");
    div.className = "section";
    const h = document.createElement("h3");
    h.textContent = part.kind;
    const pre = document.createElement("pre");
    pre.append(highlight(part.text, part.entities));
    div.append(h, pre);
    target.append(div);
  }
}

await init();
for (const id of ["message", "config", "score"]) $(id).addEventListener("input", update);
update();
