/** Timeline view: focal sequences centered as bead chains on tracks, adjacency lists
 * ranked vertically by region support and staggered horizontally by their
 * mean time offset; cloned timelines render stacked with comparison badges.
 */

import type { AdjacentEntry, CompareReport, RunPayload } from "./api.js";
import { glyphFor } from "./glyphs.js";
import type { RegionList, TimelineView } from "./state.js";
import { h, VNode } from "./vdom.js";

const LANE_WIDTH = 960;
const ROW_HEIGHT = 26;
const CENTER_X = LANE_WIDTH / 2;
const MAX_STAGGER = 110;

function offsetStagger(entries: AdjacentEntry[], offset: number): number {
  const largest = Math.max(1, ...entries.map((e) => Math.abs(e.mean_offset_s)));
  return (Math.abs(offset) / largest) * MAX_STAGGER;
}

function beadChain(symbols: string[], x: number, y: number, scale = 1): VNode {
  const beads = symbols.map((symbol, i) =>
    h("circle", {
      cx: (x + i * 11 * scale).toFixed(1),
      cy: y.toFixed(1),
      r: 4.5 * scale,
      fill: glyphFor(symbol).fill,
      stroke: "#222",
      "stroke-width": 0.6,
    }),
  );
  return h("g", { class: "bead-chain" }, ...beads);
}

function adjacencyColumn(
  view: TimelineView,
  region: RegionList,
  run: RunPayload,
  side: "left" | "right" | "middle",
  baseY: number,
): VNode[] {
  const entries = region.pages.flat();
  const knownIds = new Set(run.sequences.map((s) => s.id));
  const rows = entries.map((entry, row) => {
    const stagger = offsetStagger(entries, entry.mean_offset_s);
    const x =
      side === "left"
        ? CENTER_X - 160 - stagger
        : side === "right"
          ? CENTER_X + 160 + stagger
          : CENTER_X + (entry.mean_offset_s >= 0 ? stagger : -stagger) / 2;
    const y = baseY + row * ROW_HEIGHT;
    return h(
      "g",
      {
        class: "adjacent-entry",
        "data-timeline": view.info.id,
        "data-region": region.key,
        "data-id": entry.id,
        "data-rank": entry.rank,
        "data-support": entry.region_support,
        "data-offset": entry.mean_offset_s,
        "data-known": knownIds.has(entry.id) ? "1" : "0",
      },
      h("line", {
        x1: side === "left" ? x + 40 : CENTER_X,
        y1: y,
        x2: side === "left" ? CENTER_X : x - 6,
        y2: y,
        class: "track",
        stroke: "#eee",
        "stroke-width": 10,
      }),
      beadChain(entry.symbols, x - 16, y, 0.85),
      h(
        "text",
        { x: side === "left" ? x - 30 : x + entry.symbols.length * 11 + 8, y: y + 4, class: "entry-label", "font-size": 10 },
        `#${entry.rank} ×${entry.region_support}`,
      ),
    );
  });
  const more = h(
    "text",
    {
      x: side === "left" ? CENTER_X - 240 : side === "right" ? CENTER_X + 240 : CENTER_X,
      y: baseY + entries.length * ROW_HEIGHT + 12,
      class: "load-more",
      "data-timeline": view.info.id,
      "data-region": region.key,
      "font-size": 10,
      "text-anchor": "middle",
    },
    "scroll for more ▾",
  );
  return [...rows, more];
}

export function timelineLaneView(view: TimelineView, run: RunPayload, laneIndex: number): VNode {
  const focalSequences = view.info.focal.map(
    (sid) => run.sequences.find((s) => s.id === sid) ?? { id: sid, symbols: ["?"] },
  );
  const regionBlocks: VNode[] = [];
  let y = 44;

  const before = view.regions.find((r) => r.key === "before");
  if (before) {
    regionBlocks.push(
      h("g", { class: "region region-before" }, ...adjacencyColumn(view, before, run, "left", y)),
    );
  }
  const after = view.regions.find((r) => r.key === "after");
  if (after) {
    regionBlocks.push(
      h("g", { class: "region region-after" }, ...adjacencyColumn(view, after, run, "right", y)),
    );
  }

  const focalNodes: VNode[] = [];
  const gapNodes: VNode[] = [];
  const spacing = 120;
  const chainStart = CENTER_X - ((focalSequences.length - 1) * spacing) / 2;
  focalSequences.forEach((seq, i) => {
    const x = chainStart + i * spacing;
    focalNodes.push(
      h(
        "g",
        {
          class: "focal",
          "data-timeline": view.info.id,
          "data-position": i,
          "data-id": seq.id,
        },
        beadChain(seq.symbols, x - (seq.symbols.length - 1) * 5.5, y, 1.2),
        h("text", { x, y: y + 22, "text-anchor": "middle", "font-size": 9, class: "remove-focal", "data-timeline": view.info.id, "data-position": i }, "remove"),
      ),
    );
    if (i < focalSequences.length - 1) {
      const gap = view.regions.find((r) => r.key === `between${i}`);
      const gapX = x + spacing / 2;
      gapNodes.push(
        h(
          "text",
          {
            x: gapX,
            y: y + 5,
            "text-anchor": "middle",
            class: "between-toggle",
            "data-timeline": view.info.id,
            "data-gap": i,
            "font-size": 16,
          },
          gap?.open ? "−" : "+",
        ),
      );
      if (gap?.open) {
        regionBlocks.push(
          h(
            "g",
            { class: `region region-between${i}` },
            ...adjacencyColumn(view, gap, run, "middle", y + 30),
          ),
        );
      }
    }
  });

  const maxRows = Math.max(
    1,
    ...view.regions.filter((r) => r.open).map((r) => r.pages.flat().length),
  );
  const height = 80 + maxRows * ROW_HEIGHT;
  return h(
    "svg",
    {
      class: "timeline-lane",
      "data-timeline": view.info.id,
      "data-lane": laneIndex,
      width: LANE_WIDTH,
      height,
      viewBox: `0 0 ${LANE_WIDTH} ${height}`,
    },
    h("line", { x1: 20, y1: y, x2: LANE_WIDTH - 20, y2: y, stroke: "#f2f2f2", "stroke-width": 14 }),
    ...regionBlocks,
    ...gapNodes,
    ...focalNodes,
    h(
      "text",
      { x: LANE_WIDTH - 30, y: 16, "text-anchor": "end", class: "clone-button", "data-timeline": view.info.id, "font-size": 11 },
      "clone",
    ),
    h(
      "text",
      { x: 30, y: 16, "font-size": 11, class: "cohort-size" },
      `cohort: ${view.info.cohort_size} days`,
    ),
  );
}

export function comparisonBadges(report: CompareReport): VNode {
  const cohort = report.cohort;
  const regionBadges = report.regions.map((region) =>
    h(
      "span",
      { class: "region-badge", "data-selector": region.selector },
      `${region.selector}: ${region.only_a.length} only-A / ${region.only_b.length} only-B / ${region.deltas.length} shared`,
    ),
  );
  return h(
    "div",
    { class: "comparison" },
    h(
      "span",
      { class: "cohort-badge" },
      `shared ${cohort.shared} · A-only ${cohort.a_only} · B-only ${cohort.b_only} · J=${cohort.jaccard.toFixed(2)}`,
    ),
    ...regionBadges,
  );
}

export function timelinesPanel(
  run: RunPayload,
  timelines: TimelineView[],
  comparison: CompareReport | null,
): VNode {
  const lanes = timelines.map((view, i) => timelineLaneView(view, run, i));
  const badge = comparison ? [comparisonBadges(comparison)] : [];
  return h("div", { class: "timeline-stack" }, ...lanes, ...badge);
}
