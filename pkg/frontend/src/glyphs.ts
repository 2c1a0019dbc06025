/** One glyph per alphabet symbol: activity level sets the fill darkness,
 * stress level the inner-circle size, masked stress a white slash; smoking
 * is a red marker and motifs render as labeled diamonds. */

export interface GlyphSpec {
  kind: "activity" | "smoke" | "motif";
  fill: string;
  innerRadius: number;
  dashedInner: boolean;
  slash: boolean;
  label: string;
}

const ACTIVITY_FILL: Record<string, string> = {
  none: "#c6dbef",
  low: "#6baed6",
  high: "#2171b5",
};

const STRESS_RADIUS: Record<string, number> = {
  none: 0,
  low: 2,
  high: 3.5,
  unknown: 1.5,
  masked: 0,
};

export function glyphFor(symbol: string): GlyphSpec {
  if (symbol === "smoke") {
    return {
      kind: "smoke",
      fill: "#d62728",
      innerRadius: 0,
      dashedInner: false,
      slash: false,
      label: "smoke",
    };
  }
  if (symbol.startsWith("motif:")) {
    return {
      kind: "motif",
      fill: "#9e9ac8",
      innerRadius: 0,
      dashedInner: false,
      slash: false,
      label: symbol.slice("motif:".length),
    };
  }
  const match = /^act:(\w+)\|str:(\w+)$/.exec(symbol);
  if (!match) {
    throw new Error(`unknown event symbol: ${symbol}`);
  }
  const [, activity, stress] = match;
  const fill = ACTIVITY_FILL[activity];
  if (fill === undefined || !(stress in STRESS_RADIUS)) {
    throw new Error(`unknown event symbol: ${symbol}`);
  }
  return {
    kind: "activity",
    fill,
    innerRadius: STRESS_RADIUS[stress],
    dashedInner: stress === "unknown",
    slash: stress === "masked",
    label: `${activity}/${stress}`,
  };
}

/** Stable identity for glyph-uniqueness checks. */
export function glyphKey(spec: GlyphSpec): string {
  return [spec.kind, spec.fill, spec.innerRadius, spec.dashedInner, spec.slash, spec.label].join(
    "|",
  );
}
