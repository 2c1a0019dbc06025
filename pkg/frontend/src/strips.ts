/** Per-(participant, day) event strips: glyphs positioned by clock time,
 * linked highlight outlines, non-cohort days dimmed, windowed rendering for
 * large participant counts. */

import type { DayStrip, EventJson } from "./api.js";
import { glyphFor } from "./glyphs.js";
import type { HighlightSpan } from "./state.js";
import { h, VNode } from "./vdom.js";

const STRIP_W = 960;
const LABEL_W = 120;
const ROW_H = 22;
const DAY_SECONDS = 86400;

export function clockFraction(iso: string): number {
  // "2024-01-01T09:30:00Z" -> seconds since that day's midnight / 86400
  const [hh, mm, ss] = iso.slice(11, 19).split(":").map(Number);
  return (hh * 3600 + mm * 60 + ss) / DAY_SECONDS;
}

function eventX(iso: string): number {
  return LABEL_W + clockFraction(iso) * (STRIP_W - LABEL_W - 10);
}

function eventGlyph(ev: EventJson, rowY: number): VNode {
  const symbol =
    ev.kind === "SMOKE"
      ? "smoke"
      : ev.kind === "MOTIF"
        ? `motif:${ev.motif_id}`
        : `act:${ev.activity_level}|str:${ev.stress_level}`;
  const spec = glyphFor(symbol);
  const x0 = eventX(ev.start);
  const x1 = Math.max(eventX(ev.end), x0 + 1.5);
  if (spec.kind === "smoke") {
    return h("line", {
      class: "ev ev-smoke",
      x1: x0.toFixed(1),
      y1: rowY + 2,
      x2: x0.toFixed(1),
      y2: rowY + ROW_H - 4,
      stroke: spec.fill,
      "stroke-width": 2,
    });
  }
  const parts: VNode[] = [
    h("rect", {
      class: `ev ev-${spec.kind}`,
      x: x0.toFixed(1),
      y: rowY + 4,
      width: (x1 - x0).toFixed(1),
      height: ROW_H - 10,
      fill: spec.fill,
    }),
  ];
  const cx = (x0 + x1) / 2;
  if (spec.innerRadius > 0) {
    parts.push(
      h("circle", {
        class: "stress-dot",
        cx: cx.toFixed(1),
        cy: rowY + ROW_H / 2 - 1,
        r: spec.innerRadius,
        fill: "#fff",
        "stroke-dasharray": spec.dashedInner ? "1.5 1.5" : "none",
        stroke: spec.dashedInner ? "#777" : "none",
      }),
    );
  }
  if (spec.slash) {
    parts.push(
      h("line", {
        class: "mask-slash",
        x1: x0.toFixed(1),
        y1: rowY + ROW_H - 6,
        x2: x1.toFixed(1),
        y2: rowY + 4,
        stroke: "#fff",
        "stroke-width": 1.5,
      }),
    );
  }
  return h("g", {}, ...parts);
}

export interface StripRowModel {
  key: string;
  dimmed: boolean;
  highlightBoxes: { x0: number; x1: number; span: HighlightSpan }[];
}

/** Pure row model: which highlight boxes land on this strip (exact span
 * bounds from the API; nothing recomputed). */
export function stripRowModel(
  strip: DayStrip,
  highlights: HighlightSpan[],
  dimmedKeys: Set<string> | null,
): StripRowModel {
  const key = `${strip.participant_id}|${strip.day}`;
  const boxes = highlights
    .filter((s) => s.participant_id === strip.participant_id && s.day === strip.day)
    .map((span) => ({ x0: eventX(span.start), x1: eventX(span.end), span }));
  return {
    key,
    dimmed: dimmedKeys !== null && dimmedKeys.has(key),
    highlightBoxes: boxes,
  };
}

export function stripsView(
  strips: DayStrip[],
  highlights: HighlightSpan[],
  motifHighlights: HighlightSpan[],
  dimmedKeys: string[] | null,
  windowStart: number,
  totalStrips: number,
): VNode {
  const dimmed = dimmedKeys === null ? null : new Set(dimmedKeys);
  const rows = strips.map((strip, i) => {
    const rowY = i * ROW_H;
    const model = stripRowModel(strip, highlights, dimmed);
    const motifBoxes = stripRowModel(strip, motifHighlights, null).highlightBoxes;
    return h(
      "g",
      {
        class: "strip-row",
        "data-key": model.key,
        opacity: model.dimmed ? 0.25 : 1,
      },
      h("text", { x: 4, y: rowY + ROW_H - 8, "font-size": 9, class: "strip-label" }, `${strip.participant_id} ${strip.day}`),
      ...strip.events.map((ev) => eventGlyph(ev, rowY)),
      ...model.highlightBoxes.map(({ x0, x1 }) =>
        h("rect", {
          class: "highlight-box",
          x: x0.toFixed(1),
          y: rowY + 1,
          width: Math.max(x1 - x0, 2).toFixed(1),
          height: ROW_H - 4,
          fill: "none",
          stroke: "#ff9800",
          "stroke-width": 1.5,
        }),
      ),
      ...motifBoxes.map(({ x0, x1 }) =>
        h("rect", {
          class: "motif-box",
          x: x0.toFixed(1),
          y: rowY + 1,
          width: Math.max(x1 - x0, 2).toFixed(1),
          height: ROW_H - 4,
          fill: "none",
          stroke: "#9c27b0",
          "stroke-dasharray": "3 2",
          "stroke-width": 1.5,
        }),
      ),
    );
  });
  const height = Math.max(strips.length, 1) * ROW_H + 4;
  return h(
    "svg",
    {
      class: "strips",
      width: STRIP_W,
      height,
      viewBox: `0 0 ${STRIP_W} ${height}`,
      "data-window-start": windowStart,
      "data-total": totalStrips,
    },
    ...rows,
  );
}
