/** Scatter entry view: sequences at (days found, mean occurrences per day)
 * with quadrant guides; hover highlights, click opens a timeline. */

import type { RunPayload, SequenceSummary } from "./api.js";
import { glyphFor } from "./glyphs.js";
import { h, VNode } from "./vdom.js";

export interface ScatterOptions {
  width: number;
  height: number;
  yMidpoint: number;
}

const DEFAULTS: ScatterOptions = { width: 640, height: 420, yMidpoint: 3 };
const PAD = 36;

export interface ScatterScales {
  x(value: number): number;
  y(value: number): number;
  xMax: number;
  yMax: number;
}

export function scatterScales(
  run: RunPayload,
  points: SequenceSummary[],
  opts: ScatterOptions,
): ScatterScales {
  const xMax = Math.max(run.total_days, 1);
  const yMax = Math.max(opts.yMidpoint * 2, ...points.map((p) => p.scatter.y)) * 1.05;
  return {
    x: (v) => PAD + (v / xMax) * (opts.width - 2 * PAD),
    y: (v) => opts.height - PAD - (v / yMax) * (opts.height - 2 * PAD),
    xMax,
    yMax,
  };
}

function beadCluster(seq: SequenceSummary, cx: number, cy: number): VNode[] {
  // bead spacing condenses the mean intra-sequence time offsets
  const maxOffset = Math.max(1, seq.intra_offsets[seq.intra_offsets.length - 1]);
  return seq.symbols.map((symbol, i) => {
    const spec = glyphFor(symbol);
    const dx = seq.symbols.length === 1 ? 0 : (seq.intra_offsets[i] / maxOffset) * 14 - 7;
    return h("circle", {
      cx: (cx + dx).toFixed(1),
      cy: cy.toFixed(1),
      r: 4,
      fill: spec.fill,
      stroke: "#333",
      "stroke-width": 0.5,
    });
  });
}

export function scatterView(
  run: RunPayload,
  display: SequenceSummary[],
  hoverId: string | null,
  opts: Partial<ScatterOptions> = {},
): VNode {
  const options = { ...DEFAULTS, ...opts };
  const scales = scatterScales(run, display, options);
  const xMid = scales.x(run.total_days / 2);
  const yMid = scales.y(options.yMidpoint);

  const points = display.map((seq) => {
    const cx = scales.x(seq.scatter.x);
    const cy = scales.y(seq.scatter.y);
    const ring =
      hoverId === seq.id
        ? [h("circle", { cx: cx.toFixed(1), cy: cy.toFixed(1), r: 12, fill: "none", stroke: "#ff9800", "stroke-width": 2 })]
        : [];
    return h(
      "g",
      {
        class: "seq-point",
        "data-id": seq.id,
        "data-days": seq.scatter.x,
        "data-avg": seq.scatter.y,
        "data-quadrant": seq.scatter.quadrant,
      },
      ...ring,
      ...beadCluster(seq, cx, cy),
      h(
        "title",
        {},
        `${seq.symbols.join(" → ")}  days=${seq.scatter.x} avg/day=${seq.scatter.y.toFixed(2)} (${seq.scatter.quadrant})`,
      ),
    );
  });

  return h(
    "svg",
    {
      class: "scatter",
      width: options.width,
      height: options.height,
      viewBox: `0 0 ${options.width} ${options.height}`,
    },
    h("line", { x1: xMid.toFixed(1), y1: PAD, x2: xMid.toFixed(1), y2: options.height - PAD, stroke: "#bbb", "stroke-dasharray": "4 3" }),
    h("line", { x1: PAD, y1: yMid.toFixed(1), x2: options.width - PAD, y2: yMid.toFixed(1), stroke: "#bbb", "stroke-dasharray": "4 3" }),
    h("text", { x: options.width / 2, y: options.height - 8, "text-anchor": "middle", class: "axis-label" }, "days containing the sequence"),
    h("text", { x: 12, y: options.height / 2, class: "axis-label", transform: `rotate(-90 12 ${options.height / 2})`, "text-anchor": "middle" }, "mean occurrences per day"),
    ...points,
  );
}

export function emptyScatterView(): VNode {
  return h("div", { class: "empty-state" }, "No frequent sequences in this run.");
}
