import { Sighting, SightingFilters } from "../api.js";
import { AppContext } from "../context.js";
import { clear, el, fmtTime } from "../dom.js";
import { Poller } from "../poller.js";

// Live sightings table: polls the API on an interval, newest rows first
// (the API already orders by first_seen descending; rows are rendered in
// response order, never re-sorted client-side).
export function renderSightings(root: HTMLElement, ctx: AppContext): () => void {
  clear(root);
  const filters: SightingFilters = {};

  const banner = el("div", { class: "banner hidden", id: "stale-banner" }, "connection lost, showing stale data; retrying");
  const tbody = el("tbody", { id: "sightings-body" });
  const table = el(
    "table",
    { id: "sightings-table" },
    el(
      "thead",
      {},
      el(
        "tr",
        {},
        el("th", {}, "Plate"),
        el("th", {}, "Camera"),
        el("th", {}, "First seen"),
        el("th", {}, "Last seen"),
        el("th", {}, "Confidence"),
      ),
    ),
    tbody,
  );

  const poller = new Poller<Sighting[]>(
    ctx.pollIntervalMs,
    () => ctx.api.sightings(filters),
    (rows) => {
      banner.classList.add("hidden");
      clear(tbody);
      for (const s of rows) {
        tbody.append(
          el(
            "tr",
            { "data-plate": s.plate },
            el("td", {}, s.plate),
            el("td", {}, s.camera_id),
            el("td", {}, fmtTime(s.first_seen_ms)),
            el("td", {}, fmtTime(s.last_seen_ms)),
            el("td", {}, s.confidence.toFixed(2)),
          ),
        );
      }
    },
    () => banner.classList.remove("hidden"),
  );

  const plate = el("input", { id: "filter-plate", placeholder: "plate (exact)" });
  const camera = el("input", { id: "filter-camera", placeholder: "camera" });
  const from = el("input", { id: "filter-from", placeholder: "from (UTC ms)" });
  const to = el("input", { id: "filter-to", placeholder: "to (UTC ms)" });
  const apply = () => {
    filters.plate = plate.value || undefined;
    filters.camera = camera.value || undefined;
    filters.from = from.value ? Number(from.value) : undefined;
    filters.to = to.value ? Number(to.value) : undefined;
    poller.refresh();
  };

  root.append(
    el("h1", {}, "Sightings"),
    banner,
    el(
      "div",
      { class: "filters" },
      plate,
      camera,
      from,
      to,
      el("button", { id: "filter-apply", onclick: apply }, "Apply"),
    ),
    table,
  );
  poller.start();
  return () => poller.stop();
}
