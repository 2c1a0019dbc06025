/** Browser wiring: render the store into the page and translate DOM events
 * into store actions. All data flows through the API client. */

import { HttpApiClient } from "./api.js";
import { motifSidebar } from "./motifs.js";
import { emptyScatterView, scatterView } from "./scatter.js";
import { AppStore, STRIP_WINDOW } from "./state.js";
import { stripsView } from "./strips.js";
import { timelinesPanel } from "./timeline.js";
import { renderToString } from "./vdom.js";

function render(store: AppStore, root: HTMLElement): void {
  const s = store.state;
  const patterns =
    s.mode === "scatter"
      ? s.run && s.display.length
        ? scatterView(s.run, s.display, s.hoverId)
        : emptyScatterView()
      : s.run
        ? timelinesPanel(s.run, s.timelines, s.comparison)
        : emptyScatterView();
  const strips = stripsView(
    store.visibleStrips(),
    s.highlights,
    s.motifHighlights,
    s.dimmedKeys,
    s.stripStart,
    s.strips.length,
  );
  root.innerHTML =
    `<div id="patterns">${renderToString(patterns)}</div>` +
    `<div id="sidebar">${renderToString(motifSidebar(s.motifRun, s.selectedMotif))}</div>` +
    `<div id="day-strips">${renderToString(strips)}</div>`;
}

function closestData(target: EventTarget | null, attr: string): HTMLElement | null {
  let el = target as HTMLElement | null;
  while (el && el !== document.body) {
    if (el.getAttribute && el.getAttribute(attr) !== null) return el;
    el = el.parentElement;
  }
  return null;
}

export function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const runId = params.get("run");
  const datasetId = params.get("dataset");
  const motifRunId = params.get("motifs");
  const root = document.getElementById("app");
  if (!root) return;
  if (!runId || !datasetId) {
    root.innerHTML =
      "<p>open with ?run=&lt;run-id&gt;&amp;dataset=&lt;dataset-id&gt;[&amp;motifs=&lt;motif-run-id&gt;]</p>";
    return;
  }
  const store = new AppStore(new HttpApiClient(), runId, datasetId);
  store.subscribe(() => render(store, root));

  root.addEventListener("mouseover", (ev) => {
    const point = closestData(ev.target, "data-id");
    if (point?.classList.contains("seq-point")) {
      void store.hoverSequence(point.getAttribute("data-id"));
    }
  });
  root.addEventListener("mouseout", (ev) => {
    const point = closestData(ev.target, "data-id");
    if (point?.classList.contains("seq-point")) void store.hoverSequence(null);
  });
  root.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const seqPoint = closestData(ev.target, "data-id");
    if (store.state.mode === "scatter" && seqPoint?.classList.contains("seq-point")) {
      void store.selectSequence(seqPoint.getAttribute("data-id") as string);
      return;
    }
    if (target.classList.contains("between-toggle")) {
      void store.toggleBetween(
        target.getAttribute("data-timeline") as string,
        Number(target.getAttribute("data-gap")),
      );
      return;
    }
    if (target.classList.contains("remove-focal")) {
      void store.removeFocal(
        target.getAttribute("data-timeline") as string,
        Number(target.getAttribute("data-position")),
      );
      return;
    }
    if (target.classList.contains("clone-button")) {
      void store.cloneTimeline(target.getAttribute("data-timeline") as string);
      return;
    }
    if (target.classList.contains("load-more")) {
      void store.loadMoreAdjacent(
        target.getAttribute("data-timeline") as string,
        target.getAttribute("data-region") as string,
      );
      return;
    }
    const adjacent = closestData(ev.target, "data-region");
    if (adjacent?.classList.contains("adjacent-entry")) {
      const timelineId = adjacent.getAttribute("data-timeline") as string;
      const sid = adjacent.getAttribute("data-id") as string;
      const view = store.timeline(timelineId);
      const region = adjacent.getAttribute("data-region") as string;
      const position = region === "before" ? 0 : view.info.focal.length;
      void store.addFocal(timelineId, sid, position);
      return;
    }
    if (target.classList.contains("promote-button")) {
      void store.promoteMotif(target.getAttribute("data-motif") as string);
      return;
    }
    const card = closestData(ev.target, "data-motif");
    if (card?.classList.contains("motif-card")) {
      const id = card.getAttribute("data-motif") as string;
      void store.selectMotif(store.state.selectedMotif === id ? null : id);
    }
  });
  document.getElementById("strip-scroll")?.addEventListener("input", (ev) => {
    store.setStripScroll(Number((ev.target as HTMLInputElement).value));
  });

  void store.init().then(() => {
    if (motifRunId) void store.loadMotifs(motifRunId);
    const slider = document.getElementById("strip-scroll") as HTMLInputElement | null;
    if (slider) {
      slider.max = String(Math.max(0, store.state.strips.length - STRIP_WINDOW));
    }
  });
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  boot();
}
