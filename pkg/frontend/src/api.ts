/** Typed client over the backend JSON API. Every number the UI renders comes
 * from these payloads; the view layer never recomputes mining results. */

export interface ScatterPoint {
  x: number;
  y: number;
  quadrant: string;
}

export interface SequenceSummary {
  id: string;
  symbols: string[];
  support_days: number;
  total_occurrences: number;
  intra_offsets: number[];
  scatter: ScatterPoint;
}

export interface RunPayload {
  run_id: string;
  config: Record<string, unknown>;
  total_days: number;
  sequences: SequenceSummary[];
}

export interface OccurrenceSpan {
  participant_id: string;
  day: string;
  event_indices: number[];
  start: string;
  end: string;
}

export interface EventJson {
  participant_id: string;
  day: string;
  start: string;
  end: string;
  kind: string;
  activity_level?: string;
  stress_level?: string;
  motif_id?: string;
}

export interface DayStrip {
  participant_id: string;
  day: string;
  events: EventJson[];
  symbols: string[];
}

export interface TimelineInfo {
  id: string;
  run_id: string;
  focal: string[];
  cohort_size: number;
  parent_id: string | null;
}

export interface CohortPayload {
  timeline_id: string;
  cohort: [string, string][];
  assignments: Record<string, OccurrenceSpan[]>;
}

export interface AdjacentEntry {
  id: string;
  symbols: string[];
  region_support: number;
  mean_offset_s: number;
  rank: number;
}

export interface AdjacentPayload {
  timeline_id: string;
  region: string;
  index: number | null;
  page: number;
  adjacent: AdjacentEntry[];
}

export interface RegionDelta {
  pattern: string[];
  support_a: number;
  support_b: number;
}

export interface CompareReport {
  cohort: { a_only: number; b_only: number; shared: number; jaccard: number };
  regions: {
    selector: string;
    only_a: string[][];
    only_b: string[][];
    deltas: RegionDelta[];
  }[];
}

export interface MotifSummary {
  motif_id: string;
  centroid: number[];
  sax_word: string;
  member_count: number;
  occurrence_count: number;
}

export interface MotifRunPayload {
  motif_run_id: string;
  dataset_id: string;
  config: Record<string, unknown>;
  motifs: MotifSummary[];
  window_count: number;
}

export interface MotifOccurrence {
  participant_id: string;
  start: string;
  end: string;
  distance: number;
  motif_id?: string;
}

export type RegionSelector = "before" | "after" | "between";

export interface ApiClient {
  sequences(runId: string, display?: "scatter"): Promise<RunPayload>;
  occurrences(runId: string, sequenceId: string): Promise<OccurrenceSpan[]>;
  days(datasetId: string, derivationId?: string): Promise<DayStrip[]>;
  createTimeline(runId: string, focal: string[]): Promise<TimelineInfo>;
  addFocal(timelineId: string, sid: string, position: number): Promise<TimelineInfo>;
  removeFocal(timelineId: string, position: number): Promise<TimelineInfo>;
  cohort(timelineId: string): Promise<CohortPayload>;
  adjacent(
    timelineId: string,
    region: RegionSelector,
    index: number | null,
    top: number,
    page: number,
  ): Promise<AdjacentPayload>;
  cloneTimeline(timelineId: string): Promise<TimelineInfo>;
  compare(a: string, b: string): Promise<CompareReport>;
  deleteTimeline?(timelineId: string): Promise<void>;
  motifRun(motifRunId: string): Promise<MotifRunPayload>;
  motifOccurrences(motifRunId: string, motifId: string): Promise<MotifOccurrence[]>;
  promote(globalMotifId: string): Promise<{ derivation_id: string }>;
}

interface Envelope<T> {
  ok: boolean;
  data: T;
  error?: { code: string; message: string };
}

async function unwrap<T>(resp: Response): Promise<T> {
  const body = (await resp.json()) as Envelope<T>;
  if (!resp.ok || !body.ok) {
    const err = body.error ?? { code: "http", message: String(resp.status) };
    throw new Error(`${err.code}: ${err.message}`);
  }
  return body.data;
}

async function lines<T>(resp: Response): Promise<T[]> {
  const text = await resp.text();
  return text
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as T);
}

export class HttpApiClient implements ApiClient {
  constructor(private readonly base: string = "/api/v1") {}

  private url(path: string, params?: Record<string, string | number | null>): string {
    const query = params
      ? Object.entries(params)
          .filter(([, v]) => v !== null && v !== undefined)
          .map(([k, v]) => `${encodeURIComponent(k)}=${encodeURIComponent(String(v))}`)
          .join("&")
      : "";
    return this.base + path + (query ? `?${query}` : "");
  }

  sequences(runId: string, display?: "scatter"): Promise<RunPayload> {
    const params = display ? { display } : undefined;
    return fetch(this.url(`/runs/${runId}/sequences`, params)).then((r) =>
      unwrap<RunPayload>(r),
    );
  }

  occurrences(runId: string, sequenceId: string): Promise<OccurrenceSpan[]> {
    return fetch(this.url(`/runs/${runId}/sequences/${sequenceId}/occurrences`)).then(
      (r) => lines<OccurrenceSpan>(r),
    );
  }

  days(datasetId: string, derivationId?: string): Promise<DayStrip[]> {
    const params = derivationId ? { derivation: derivationId } : undefined;
    return fetch(this.url(`/datasets/${datasetId}/days`, params)).then((r) =>
      unwrap<DayStrip[]>(r),
    );
  }

  createTimeline(runId: string, focal: string[]): Promise<TimelineInfo> {
    return fetch(this.url(`/runs/${runId}/timelines`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ focal }),
    }).then((r) => unwrap<TimelineInfo>(r));
  }

  addFocal(timelineId: string, sid: string, position: number): Promise<TimelineInfo> {
    return fetch(this.url(`/timelines/${timelineId}/focal`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ sid, position }),
    }).then((r) => unwrap<TimelineInfo>(r));
  }

  removeFocal(timelineId: string, position: number): Promise<TimelineInfo> {
    return fetch(this.url(`/timelines/${timelineId}/focal/${position}`), {
      method: "DELETE",
    }).then((r) => unwrap<TimelineInfo>(r));
  }

  cohort(timelineId: string): Promise<CohortPayload> {
    return fetch(this.url(`/timelines/${timelineId}/cohort`)).then((r) =>
      unwrap<CohortPayload>(r),
    );
  }

  adjacent(
    timelineId: string,
    region: RegionSelector,
    index: number | null,
    top: number,
    page: number,
  ): Promise<AdjacentPayload> {
    return fetch(
      this.url(`/timelines/${timelineId}/adjacent`, { region, index, top, page }),
    ).then((r) => unwrap<AdjacentPayload>(r));
  }

  cloneTimeline(timelineId: string): Promise<TimelineInfo> {
    return fetch(this.url(`/timelines/${timelineId}/clone`), { method: "POST" }).then(
      (r) => unwrap<TimelineInfo>(r),
    );
  }

  compare(a: string, b: string): Promise<CompareReport> {
    return fetch(this.url(`/timelines/compare`, { a, b })).then((r) =>
      unwrap<CompareReport>(r),
    );
  }

  motifRun(motifRunId: string): Promise<MotifRunPayload> {
    return fetch(this.url(`/motif-runs/${motifRunId}`)).then((r) =>
      unwrap<MotifRunPayload>(r),
    );
  }

  motifOccurrences(motifRunId: string, motifId: string): Promise<MotifOccurrence[]> {
    return fetch(
      this.url(`/motif-runs/${motifRunId}/occurrences`, { motif: motifId }),
    ).then((r) => lines<MotifOccurrence>(r));
  }

  promote(globalMotifId: string): Promise<{ derivation_id: string }> {
    return fetch(this.url(`/motifs/${globalMotifId}/promote`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: "{}",
    }).then((r) => unwrap<{ derivation_id: string }>(r));
  }
}
