/** Test double for the API client backed by payloads recorded from the real
 * server (test/fixtures/bundle.json). It implements timeline bookkeeping
 * (ids, chains, clones) but serves only recorded responses, and logs every
 * request so tests can trace each rendered number back to an API payload. */

import { readFileSync } from "node:fs";

import type {
  AdjacentPayload,
  ApiClient,
  CohortPayload,
  CompareReport,
  DayStrip,
  MotifOccurrence,
  MotifRunPayload,
  OccurrenceSpan,
  RegionSelector,
  RunPayload,
  TimelineInfo,
} from "../src/api.js";

export interface FixtureBundle {
  meta: {
    dataset_id: string;
    derivation_id: string;
    run_id: string;
    motif_run_id: string;
    primary: string;
    secondary: string;
    hover_adjacent: string | null;
  };
  run: RunPayload;
  display: RunPayload;
  days: DayStrip[];
  occurrences: Record<string, OccurrenceSpan[]>;
  chains: Record<
    string,
    { cohort: CohortPayload; adjacent: Record<string, AdjacentPayload> }
  >;
  compare: Record<string, CompareReport>;
  motif_run: MotifRunPayload;
  motif_occurrences: Record<string, MotifOccurrence[]>;
}

export function loadBundle(): FixtureBundle {
  const url = new URL("./fixtures/bundle.json", import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as FixtureBundle;
}

export interface LoggedRequest {
  method: string;
  args: unknown[];
  response: unknown;
}

interface StubTimeline {
  chain: string[];
  parent: string | null;
}

export class StubApi implements ApiClient {
  readonly log: LoggedRequest[] = [];
  private readonly timelines = new Map<string, StubTimeline>();
  private nextTimeline = 1;
  private deferred = new Map<string, { promise: Promise<OccurrenceSpan[]>; resolve: () => void }>();

  constructor(readonly bundle: FixtureBundle = loadBundle()) {}

  private record<T>(method: string, args: unknown[], response: T): T {
    this.log.push({ method, args, response });
    return response;
  }

  /** Make the next occurrences(sid) call hang until the returned trigger
   * runs; used to script stale-response scenarios. */
  deferOccurrences(sequenceId: string): () => void {
    let release: () => void = () => undefined;
    const gate = new Promise<void>((resolve) => {
      release = resolve;
    });
    const spans = this.bundle.occurrences[sequenceId] ?? [];
    const promise = gate.then(() => spans);
    this.deferred.set(sequenceId, { promise, resolve: release });
    return release;
  }

  private chainKey(timelineId: string): string {
    const tl = this.timelines.get(timelineId);
    if (!tl) throw new Error(`not_found: ${timelineId}`);
    return tl.chain.join("|");
  }

  private info(timelineId: string): TimelineInfo {
    const tl = this.timelines.get(timelineId);
    if (!tl) throw new Error(`not_found: ${timelineId}`);
    const recorded = this.bundle.chains[this.chainKey(timelineId)];
    if (!recorded) throw new Error(`unrecorded chain: ${this.chainKey(timelineId)}`);
    return {
      id: timelineId,
      run_id: this.bundle.meta.run_id,
      focal: [...tl.chain],
      cohort_size: recorded.cohort.cohort.length,
      parent_id: tl.parent,
    };
  }

  sequences(runId: string, display?: "scatter"): Promise<RunPayload> {
    const payload = display ? this.bundle.display : this.bundle.run;
    return Promise.resolve(this.record("sequences", [runId, display ?? null], payload));
  }

  occurrences(runId: string, sequenceId: string): Promise<OccurrenceSpan[]> {
    const pending = this.deferred.get(sequenceId);
    if (pending) {
      this.deferred.delete(sequenceId);
      return pending.promise.then((spans) =>
        this.record("occurrences", [runId, sequenceId], spans),
      );
    }
    const spans = this.bundle.occurrences[sequenceId];
    if (!spans) throw new Error(`unrecorded occurrences: ${sequenceId}`);
    return Promise.resolve(this.record("occurrences", [runId, sequenceId], spans));
  }

  days(datasetId: string): Promise<DayStrip[]> {
    return Promise.resolve(this.record("days", [datasetId], this.bundle.days));
  }

  createTimeline(runId: string, focal: string[]): Promise<TimelineInfo> {
    const id = `tl-stub-${this.nextTimeline++}`;
    this.timelines.set(id, { chain: [...focal], parent: null });
    return Promise.resolve(this.record("createTimeline", [runId, focal], this.info(id)));
  }

  addFocal(timelineId: string, sid: string, position: number): Promise<TimelineInfo> {
    const tl = this.timelines.get(timelineId);
    if (!tl) throw new Error(`not_found: ${timelineId}`);
    tl.chain.splice(position, 0, sid);
    return Promise.resolve(
      this.record("addFocal", [timelineId, sid, position], this.info(timelineId)),
    );
  }

  removeFocal(timelineId: string, position: number): Promise<TimelineInfo> {
    const tl = this.timelines.get(timelineId);
    if (!tl) throw new Error(`not_found: ${timelineId}`);
    if (tl.chain.length <= 1) throw new Error("validation: cannot empty a chain");
    tl.chain.splice(position, 1);
    return Promise.resolve(
      this.record("removeFocal", [timelineId, position], this.info(timelineId)),
    );
  }

  cohort(timelineId: string): Promise<CohortPayload> {
    const recorded = this.bundle.chains[this.chainKey(timelineId)];
    if (!recorded) throw new Error(`unrecorded chain: ${this.chainKey(timelineId)}`);
    const payload = { ...recorded.cohort, timeline_id: timelineId };
    return Promise.resolve(this.record("cohort", [timelineId], payload));
  }

  adjacent(
    timelineId: string,
    region: RegionSelector,
    index: number | null,
    top: number,
    page: number,
  ): Promise<AdjacentPayload> {
    const key = region === "between" ? `between${index}:${page}` : `${region}:${page}`;
    const recorded = this.bundle.chains[this.chainKey(timelineId)]?.adjacent[key];
    if (!recorded) throw new Error(`unrecorded adjacency: ${this.chainKey(timelineId)} ${key}`);
    const payload = { ...recorded, timeline_id: timelineId };
    return Promise.resolve(
      this.record("adjacent", [timelineId, region, index, top, page], payload),
    );
  }

  cloneTimeline(timelineId: string): Promise<TimelineInfo> {
    const source = this.timelines.get(timelineId);
    if (!source) throw new Error(`not_found: ${timelineId}`);
    const id = `tl-stub-${this.nextTimeline++}`;
    this.timelines.set(id, { chain: [...source.chain], parent: timelineId });
    return Promise.resolve(this.record("cloneTimeline", [timelineId], this.info(id)));
  }

  compare(a: string, b: string): Promise<CompareReport> {
    const key = `${this.chainKey(a)}__VS__${this.chainKey(b)}`;
    const recorded = this.bundle.compare[key];
    if (!recorded) throw new Error(`unrecorded compare: ${key}`);
    return Promise.resolve(this.record("compare", [a, b], recorded));
  }

  deleteTimeline(timelineId: string): Promise<void> {
    this.timelines.delete(timelineId);
    return Promise.resolve(this.record("deleteTimeline", [timelineId], undefined));
  }

  motifRun(motifRunId: string): Promise<MotifRunPayload> {
    return Promise.resolve(this.record("motifRun", [motifRunId], this.bundle.motif_run));
  }

  motifOccurrences(motifRunId: string, motifId: string): Promise<MotifOccurrence[]> {
    const occs = this.bundle.motif_occurrences[motifId];
    if (!occs) throw new Error(`unrecorded motif occurrences: ${motifId}`);
    return Promise.resolve(this.record("motifOccurrences", [motifRunId, motifId], occs));
  }

  promote(globalMotifId: string): Promise<{ derivation_id: string }> {
    return Promise.resolve(
      this.record("promote", [globalMotifId], {
        derivation_id: this.bundle.meta.derivation_id,
      }),
    );
  }
}
