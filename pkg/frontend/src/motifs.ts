/** Motif sidebar: centroid sparklines, selection highlights occurrences on
 * the strips, promote pushes the motif into the event alphabet. */

import type { MotifRunPayload, MotifSummary } from "./api.js";
import { h, VNode } from "./vdom.js";

const SPARK_W = 96;
const SPARK_H = 28;

export function sparklinePath(centroid: number[], width = SPARK_W, height = SPARK_H): string {
  const lo = Math.min(...centroid);
  const hi = Math.max(...centroid);
  const span = hi - lo || 1;
  const step = width / Math.max(centroid.length - 1, 1);
  return centroid
    .map((v, i) => {
      const x = (i * step).toFixed(1);
      const y = (height - 4 - ((v - lo) / span) * (height - 8)).toFixed(1);
      return `${i === 0 ? "M" : "L"}${x},${y}`;
    })
    .join(" ");
}

function motifCard(motif: MotifSummary, selected: boolean): VNode {
  return h(
    "div",
    {
      class: selected ? "motif-card selected" : "motif-card",
      "data-motif": motif.motif_id,
      "data-occurrences": motif.occurrence_count,
    },
    h(
      "svg",
      { width: SPARK_W, height: SPARK_H, viewBox: `0 0 ${SPARK_W} ${SPARK_H}` },
      h("path", { d: sparklinePath(motif.centroid), fill: "none", stroke: "#9c27b0", "stroke-width": 1.5 }),
    ),
    h(
      "div",
      { class: "motif-meta" },
      `${motif.motif_id} · ${motif.sax_word} · ${motif.member_count} windows · ${motif.occurrence_count} occ`,
    ),
    h("button", { class: "promote-button", "data-motif": motif.motif_id }, "promote"),
  );
}

export function motifSidebar(run: MotifRunPayload | null, selected: string | null): VNode {
  if (run === null) {
    return h("div", { class: "motif-sidebar empty" }, "no motif run loaded");
  }
  return h(
    "div",
    { class: "motif-sidebar" },
    h("h3", {}, `motifs (${run.motifs.length})`),
    ...run.motifs.map((m) => motifCard(m, m.motif_id === selected)),
  );
}
