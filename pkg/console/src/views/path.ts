import { PathPoint } from "../api.js";
import { AppContext } from "../context.js";
import { clear, el, fmtTime } from "../dom.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const W = 480;
const H = 320;
const PAD = 30;

// (lon, lat) scatter with arrows in time order; no map tiles, no wrap
// logic - points crossing the antimeridian just land where they land.
function scatter(points: PathPoint[]): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("id", "path-scatter");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("width", String(W));
  svg.setAttribute("height", String(H));

  const lons = points.map((p) => p.lon);
  const lats = points.map((p) => p.lat);
  const lonMin = Math.min(...lons);
  const lonMax = Math.max(...lons);
  const latMin = Math.min(...lats);
  const latMax = Math.max(...lats);
  const sx = (lon: number) =>
    lonMax === lonMin ? W / 2 : PAD + ((lon - lonMin) / (lonMax - lonMin)) * (W - 2 * PAD);
  const sy = (lat: number) =>
    latMax === latMin ? H / 2 : H - PAD - ((lat - latMin) / (latMax - latMin)) * (H - 2 * PAD);

  const defs = document.createElementNS(SVG_NS, "defs");
  const marker = document.createElementNS(SVG_NS, "marker");
  marker.setAttribute("id", "arrowhead");
  marker.setAttribute("markerWidth", "8");
  marker.setAttribute("markerHeight", "8");
  marker.setAttribute("refX", "6");
  marker.setAttribute("refY", "3");
  marker.setAttribute("orient", "auto");
  const tip = document.createElementNS(SVG_NS, "path");
  tip.setAttribute("d", "M0,0 L6,3 L0,6 z");
  marker.append(tip);
  defs.append(marker);
  svg.append(defs);

  for (let i = 1; i < points.length; i++) {
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("class", "path-arrow");
    line.setAttribute("x1", String(sx(points[i - 1].lon)));
    line.setAttribute("y1", String(sy(points[i - 1].lat)));
    line.setAttribute("x2", String(sx(points[i].lon)));
    line.setAttribute("y2", String(sy(points[i].lat)));
    line.setAttribute("marker-end", "url(#arrowhead)");
    svg.append(line);
  }
  points.forEach((p, i) => {
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("class", "path-point");
    dot.setAttribute("cx", String(sx(p.lon)));
    dot.setAttribute("cy", String(sy(p.lat)));
    dot.setAttribute("r", "5");
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(sx(p.lon) + 8));
    label.setAttribute("y", String(sy(p.lat) - 8));
    label.textContent = `${i + 1}. ${p.camera_id}`;
    svg.append(dot, label);
  });
  return svg;
}

export function renderPath(root: HTMLElement, ctx: AppContext): void {
  clear(root);
  const output = el("div", { id: "path-output" });
  const plate = el("input", { id: "path-plate", placeholder: "plate" });

  const explore = () => {
    ctx.api
      .path(plate.value)
      .then((points) => {
        clear(output);
        if (points.length === 0) {
          output.append(el("div", { id: "path-empty", class: "empty" }, "no sightings for this plate"));
          return;
        }
        // timeline first, in exactly the order the API returned
        const entries = points.map((p, i) =>
          el(
            "li",
            { "data-camera": p.camera_id },
            `${i + 1}. ${p.camera_id} — ${fmtTime(p.first_seen_ms)} to ${fmtTime(p.last_seen_ms)} ` +
              `(${p.lat.toFixed(4)}, ${p.lon.toFixed(4)})`,
          ),
        );
        output.append(el("ol", { id: "path-timeline" }, ...entries), scatter(points));
      })
      .catch(() => {
        clear(output);
        output.append(el("div", { class: "error" }, "path lookup failed"));
      });
  };

  root.append(
    el("h1", {}, "Path explorer"),
    el("div", { class: "filters" }, plate, el("button", { id: "path-explore", onclick: explore }, "Explore")),
    output,
  );
}
