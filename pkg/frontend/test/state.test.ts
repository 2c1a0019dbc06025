import { beforeEach, describe, expect, it } from "vitest";

import { AppStore, STRIP_WINDOW } from "../src/state.js";
import { loadBundle, StubApi } from "./stub.js";

const bundle = loadBundle();

function makeStore(): { store: AppStore; api: StubApi } {
  const api = new StubApi(bundle);
  const store = new AppStore(api, bundle.meta.run_id, bundle.meta.dataset_id);
  return { store, api };
}

describe("AppStore", () => {
  let store: AppStore;
  let api: StubApi;

  beforeEach(async () => {
    ({ store, api } = makeStore());
    await store.init();
  });

  it("loads run, display subset, and strips", () => {
    expect(store.state.run?.sequences.length).toBe(bundle.run.sequences.length);
    expect(store.state.display.length).toBe(bundle.display.sequences.length);
    expect(store.state.strips.length).toBe(bundle.days.length);
    expect(store.state.mode).toBe("scatter");
  });

  it("windows the strips for virtual scrolling", () => {
    expect(store.visibleStrips().length).toBeLessThanOrEqual(STRIP_WINDOW);
    store.setStripScroll(10_000);
    expect(store.state.stripStart).toBe(Math.max(0, bundle.days.length - STRIP_WINDOW));
    store.setStripScroll(-5);
    expect(store.state.stripStart).toBe(0);
  });

  it("notifies subscribers on changes", async () => {
    let calls = 0;
    store.subscribe(() => {
      calls += 1;
    });
    await store.hoverSequence(bundle.meta.primary);
    expect(calls).toBeGreaterThan(0);
  });

  it("discards stale hover responses by request token", async () => {
    const release = api.deferOccurrences(bundle.meta.primary);
    const slow = store.hoverSequence(bundle.meta.primary);
    await store.hoverSequence(bundle.meta.secondary);
    const fast = store.state.highlights;
    expect(store.state.highlightSource).toBe(bundle.meta.secondary);
    release();
    await slow;
    expect(store.state.highlightSource).toBe(bundle.meta.secondary);
    expect(store.state.highlights).toEqual(fast);
  });

  it("clears highlights on unhover", async () => {
    await store.hoverSequence(bundle.meta.primary);
    expect(store.state.highlights.length).toBeGreaterThan(0);
    await store.hoverSequence(null);
    expect(store.state.highlights).toEqual([]);
    expect(store.state.highlightSource).toBeNull();
  });

  it("select -> timeline mode with cohort and open regions", async () => {
    const view = await store.selectSequence(bundle.meta.primary);
    expect(store.state.mode).toBe("timeline");
    const recorded = bundle.chains[bundle.meta.primary];
    expect(view.cohortKeys.length).toBe(recorded.cohort.cohort.length);
    const before = view.regions.find((r) => r.key === "before");
    expect(before?.pages[0]).toEqual(recorded.adjacent["before:0"].adjacent);
  });

  it("removing the last focal returns to scatter mode", async () => {
    const view = await store.selectSequence(bundle.meta.primary);
    await store.removeFocal(view.info.id, 0);
    expect(store.state.mode).toBe("scatter");
    expect(store.state.timelines).toEqual([]);
    expect(store.state.dimmedKeys).toBeNull();
  });

  it("selecting a motif highlights its recorded occurrences", async () => {
    await store.loadMotifs(bundle.meta.motif_run_id);
    const motif = bundle.motif_run.motifs[0];
    await store.selectMotif(motif.motif_id);
    const recorded = bundle.motif_occurrences[motif.motif_id];
    expect(store.state.motifHighlights.length).toBe(recorded.length);
    expect(store.state.motifHighlights[0].start).toBe(recorded[0].start);
    await store.selectMotif(null);
    expect(store.state.motifHighlights).toEqual([]);
  });

  it("promote targets the selected motif run", async () => {
    await store.loadMotifs(bundle.meta.motif_run_id);
    const result = await store.promoteMotif("m0");
    expect(result.derivation_id).toBe(bundle.meta.derivation_id);
    const logged = api.log.find((r) => r.method === "promote");
    expect(logged?.args[0]).toBe(`${bundle.meta.motif_run_id}.m0`);
  });
});
