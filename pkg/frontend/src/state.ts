/** Application view-model: scatter/timeline modes, linked highlighting, and
 * stacked timelines with their region lists.
 *
 * All mining numbers shown anywhere come straight from API payloads; this
 * store only routes them. Responses are guarded by per-facet request tokens
 * so a stale fetch can never overwrite a newer interaction.
 */

import type {
  AdjacentEntry,
  ApiClient,
  CompareReport,
  DayStrip,
  MotifOccurrence,
  MotifRunPayload,
  OccurrenceSpan,
  RegionSelector,
  RunPayload,
  SequenceSummary,
  TimelineInfo,
} from "./api.js";

export interface RegionList {
  key: string; // "before" | "after" | "between0" | ...
  selector: RegionSelector;
  index: number | null;
  open: boolean;
  pages: AdjacentEntry[][];
}

export interface TimelineView {
  info: TimelineInfo;
  cohortKeys: string[]; // "pid|day", sorted
  assignments: Record<string, OccurrenceSpan[]>;
  regions: RegionList[];
}

export interface HighlightSpan {
  participant_id: string;
  day: string;
  start: string;
  end: string;
}

export const STRIP_WINDOW = 20;
export const TOP_N = 10;

export interface AppState {
  mode: "scatter" | "timeline";
  run: RunPayload | null;
  display: SequenceSummary[];
  strips: DayStrip[];
  stripStart: number;
  hoverId: string | null;
  highlightSource: string | null;
  highlights: HighlightSpan[];
  dimmedKeys: string[] | null;
  timelines: TimelineView[];
  comparison: CompareReport | null;
  motifRun: MotifRunPayload | null;
  selectedMotif: string | null;
  motifHighlights: HighlightSpan[];
}

function occurrenceToHighlight(occ: OccurrenceSpan): HighlightSpan {
  return {
    participant_id: occ.participant_id,
    day: occ.day,
    start: occ.start,
    end: occ.end,
  };
}

function motifToHighlight(occ: MotifOccurrence): HighlightSpan {
  return {
    participant_id: occ.participant_id,
    day: occ.start.slice(0, 10),
    start: occ.start,
    end: occ.end,
  };
}

export class AppStore {
  state: AppState = {
    mode: "scatter",
    run: null,
    display: [],
    strips: [],
    stripStart: 0,
    hoverId: null,
    highlightSource: null,
    highlights: [],
    dimmedKeys: null,
    timelines: [],
    comparison: null,
    motifRun: null,
    selectedMotif: null,
    motifHighlights: [],
  };

  private hoverToken = 0;
  private listeners: (() => void)[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly runId: string,
    private readonly datasetId: string,
  ) {}

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private changed(): void {
    for (const listener of this.listeners) listener();
  }

  // -- loading ---------------------------------------------------------------

  async init(): Promise<void> {
    const [run, display, strips] = await Promise.all([
      this.api.sequences(this.runId),
      this.api.sequences(this.runId, "scatter"),
      this.api.days(this.datasetId),
    ]);
    this.state.run = run;
    this.state.display = display.sequences;
    this.state.strips = strips;
    this.changed();
  }

  async loadMotifs(motifRunId: string): Promise<void> {
    this.state.motifRun = await this.api.motifRun(motifRunId);
    this.changed();
  }

  sequenceById(id: string): SequenceSummary | undefined {
    return this.state.run?.sequences.find((s) => s.id === id);
  }

  // -- linked highlighting ------------------------------------------------------

  /** Hovering a sequence highlights exactly the API's occurrence spans. */
  async hoverSequence(id: string | null): Promise<void> {
    this.state.hoverId = id;
    const token = ++this.hoverToken;
    if (id === null || this.sequenceById(id) === undefined) {
      this.state.highlights = [];
      this.state.highlightSource = null;
      this.changed();
      return;
    }
    const occurrences = await this.api.occurrences(this.runId, id);
    if (token !== this.hoverToken) return; // stale response: a newer hover won
    this.state.highlights = occurrences.map(occurrenceToHighlight);
    this.state.highlightSource = id;
    this.changed();
  }

  async selectMotif(motifId: string | null): Promise<void> {
    this.state.selectedMotif = motifId;
    if (motifId === null || this.state.motifRun === null) {
      this.state.motifHighlights = [];
      this.changed();
      return;
    }
    const occs = await this.api.motifOccurrences(this.state.motifRun.motif_run_id, motifId);
    this.state.motifHighlights = occs.map(motifToHighlight);
    this.changed();
  }

  async promoteMotif(motifId: string): Promise<{ derivation_id: string }> {
    if (this.state.motifRun === null) throw new Error("no motif run loaded");
    return this.api.promote(`${this.state.motifRun.motif_run_id}.${motifId}`);
  }

  // -- timelines ----------------------------------------------------------------

  private emptyRegions(nFocal: number): RegionList[] {
    const regions: RegionList[] = [
      { key: "before", selector: "before", index: null, open: true, pages: [] },
    ];
    for (let gap = 0; gap < nFocal - 1; gap += 1) {
      regions.push({
        key: `between${gap}`,
        selector: "between",
        index: gap,
        open: false,
        pages: [],
      });
    }
    regions.push({ key: "after", selector: "after", index: null, open: true, pages: [] });
    return regions;
  }

  private async refreshTimeline(view: TimelineView): Promise<void> {
    const cohort = await this.api.cohort(view.info.id);
    view.cohortKeys = cohort.cohort.map(([pid, day]) => `${pid}|${day}`);
    view.assignments = cohort.assignments;
    view.regions = this.emptyRegions(view.info.focal.length);
    for (const region of view.regions) {
      if (region.open) {
        const payload = await this.api.adjacent(
          view.info.id,
          region.selector,
          region.index,
          TOP_N,
          0,
        );
        region.pages = [payload.adjacent];
      }
    }
    this.updateDimming();
  }

  private updateDimming(): void {
    if (this.state.timelines.length === 0) {
      this.state.dimmedKeys = null;
      return;
    }
    const lit = new Set(this.state.timelines.flatMap((t) => t.cohortKeys));
    this.state.dimmedKeys = this.state.strips
      .map((s) => `${s.participant_id}|${s.day}`)
      .filter((key) => !lit.has(key));
  }

  /** Clicking a scatter point makes it the focal sequence of a new timeline. */
  async selectSequence(id: string): Promise<TimelineView> {
    const info = await this.api.createTimeline(this.runId, [id]);
    const view: TimelineView = { info, cohortKeys: [], assignments: {}, regions: [] };
    this.state.mode = "timeline";
    this.state.timelines = [view];
    this.state.comparison = null;
    await this.refreshTimeline(view);
    this.changed();
    return view;
  }

  timeline(timelineId: string): TimelineView {
    const view = this.state.timelines.find((t) => t.info.id === timelineId);
    if (view === undefined) throw new Error(`unknown timeline ${timelineId}`);
    return view;
  }

  /** Clicking an adjacent entry appends it as a focal sequence. */
  async addFocal(timelineId: string, sid: string, position: number): Promise<void> {
    const view = this.timeline(timelineId);
    view.info = await this.api.addFocal(timelineId, sid, position);
    await this.refreshTimeline(view);
    await this.refreshComparison();
    this.changed();
  }

  /** Deleting a focal broadens the cohort; removing the last one returns to
   * the scatter view. */
  async removeFocal(timelineId: string, position: number): Promise<void> {
    const view = this.timeline(timelineId);
    if (view.info.focal.length === 1) {
      if (this.api.deleteTimeline) await this.api.deleteTimeline(timelineId);
      this.state.timelines = this.state.timelines.filter((t) => t !== view);
      if (this.state.timelines.length === 0) {
        this.state.mode = "scatter";
        this.state.dimmedKeys = null;
      }
      this.state.comparison = null;
      this.changed();
      return;
    }
    view.info = await this.api.removeFocal(timelineId, position);
    await this.refreshTimeline(view);
    await this.refreshComparison();
    this.changed();
  }

  async toggleBetween(timelineId: string, gapIndex: number): Promise<void> {
    const view = this.timeline(timelineId);
    const region = view.regions.find((r) => r.key === `between${gapIndex}`);
    if (region === undefined) throw new Error(`no between gap ${gapIndex}`);
    region.open = !region.open;
    if (region.open && region.pages.length === 0) {
      const payload = await this.api.adjacent(
        view.info.id,
        "between",
        gapIndex,
        TOP_N,
        0,
      );
      region.pages = [payload.adjacent];
    }
    this.changed();
  }

  /** Scrolling past the visible ranks fetches the next page. */
  async loadMoreAdjacent(timelineId: string, regionKey: string): Promise<void> {
    const view = this.timeline(timelineId);
    const region = view.regions.find((r) => r.key === regionKey);
    if (region === undefined) throw new Error(`unknown region ${regionKey}`);
    const payload = await this.api.adjacent(
      view.info.id,
      region.selector,
      region.index,
      TOP_N,
      region.pages.length,
    );
    region.pages.push(payload.adjacent);
    this.changed();
  }

  /** Clone renders stacked under the original with independent state. */
  async cloneTimeline(timelineId: string): Promise<TimelineView> {
    const source = this.timeline(timelineId);
    const info = await this.api.cloneTimeline(timelineId);
    const view: TimelineView = {
      info,
      cohortKeys: [...source.cohortKeys],
      assignments: { ...source.assignments },
      regions: source.regions.map((r) => ({ ...r, pages: r.pages.map((p) => [...p]) })),
    };
    this.state.timelines.push(view);
    await this.refreshComparison();
    this.updateDimming();
    this.changed();
    return view;
  }

  private async refreshComparison(): Promise<void> {
    if (this.state.timelines.length < 2) {
      this.state.comparison = null;
      return;
    }
    const [a, b] = this.state.timelines;
    this.state.comparison = await this.api.compare(a.info.id, b.info.id);
  }

  // -- strips ------------------------------------------------------------------

  setStripScroll(startIndex: number): void {
    const max = Math.max(0, this.state.strips.length - STRIP_WINDOW);
    this.state.stripStart = Math.min(Math.max(0, startIndex), max);
    this.changed();
  }

  visibleStrips(): DayStrip[] {
    return this.state.strips.slice(
      this.state.stripStart,
      this.state.stripStart + STRIP_WINDOW,
    );
  }

  /** Serializable view snapshot; add-then-remove must restore it exactly. */
  snapshot(): string {
    const s = this.state;
    return JSON.stringify({
      mode: s.mode,
      hoverId: s.hoverId,
      highlightSource: s.highlightSource,
      highlights: s.highlights,
      dimmedKeys: s.dimmedKeys,
      stripStart: s.stripStart,
      timelines: s.timelines.map((t) => ({
        focal: t.info.focal,
        cohort_size: t.info.cohort_size,
        cohortKeys: t.cohortKeys,
        regions: t.regions.map((r) => ({
          key: r.key,
          open: r.open,
          pages: r.pages,
        })),
      })),
      comparison: s.comparison,
    });
  }
}
