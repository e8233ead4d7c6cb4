// The full exploration loop against a live fixture service: seed search,
// statement marking, suggestion harvesting, acceptance, and re-search.
// The scenario must surface a planted answer string and leave a complete
// audit trail.

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ExploreSession } from "../src/session.js";
import { startService, type LiveService } from "./live.js";

const PLANTED_EATERS = ["白骨精", "蜘蛛精", "牛魔王"];

let service: LiveService;
let api: ApiClient;

beforeAll(async () => {
  service = await startService();
  api = new ApiClient(service.base);
});

afterAll(() => {
  service?.stop();
});

describe("exploration loop", () => {
  it("search, mark, suggest, accept, re-search surfaces a planted answer", async () => {
    const session = new ExploreSession(api);
    const view = await session.create("jttw");
    expect(view.live).toBe(true);

    await session.addSeeds(["吃"]);
    const hits = await session.search(["吃"], 100);
    expect(hits.length).toBeGreaterThan(0);

    await session.mark(hits[0], "relevant");
    const suggestions = await session.refreshSuggestions(40);
    expect(suggestions.status).toBe("ok");
    const surfaces = suggestions.items.map((s) => s.surface);
    expect(surfaces).toContain("唐僧");
    const answer = surfaces.find((s) => PLANTED_EATERS.includes(s));
    expect(answer, `no planted monster among ${surfaces.join(",")}`).toBeDefined();

    // Accepting a suggestion records "suggested" provenance.
    await session.acceptSuggestion(answer!);
    const entries = Object.values(session.view!.session.keyword_lists).flat();
    const accepted = entries.find((e) => e.surface === answer);
    expect(accepted?.provenance).toBe("suggested");

    // Re-searching with the accepted keyword finds the answer statements.
    const secondPass = await session.search([answer!], 50);
    expect(secondPass.length).toBeGreaterThan(0);
    await session.mark(secondPass[0], "answer", answer!);

    const report = await session.report([answer!]);
    expect(report.answers).toContain(answer);
    expect(report.precision).toBe(1.0);
    expect(report.recall).toBe(1.0);
  });

  it("every action lands in the audit log in order", async () => {
    const session = new ExploreSession(api);
    await session.create("jttw");
    await session.addSeeds(["唐僧"]);
    const hits = await session.search(["唐僧"], 10);
    await session.mark(hits[0], "relevant");

    const audit = session.view!.session.audit;
    const actions = audit.map((e) => e.action);
    expect(actions[0]).toBe("create");
    expect(actions).toContain("add_keywords");
    expect(actions).toContain("search");
    expect(actions).toContain("mark");
    const seqs = audit.map((e) => e.seq);
    expect(seqs).toEqual([...seqs].sort((a, b) => a - b));
  });

  it("suggestions never repeat existing session keywords", async () => {
    const session = new ExploreSession(api);
    await session.create("jttw");
    await session.addSeeds(["吃", "唐僧"]);
    const hits = await session.search(["吃"], 20);
    await session.mark(hits[0], "relevant");
    const suggestions = await session.refreshSuggestions(50);
    const surfaces = suggestions.items.map((s) => s.surface);
    expect(surfaces).not.toContain("吃");
    expect(surfaces).not.toContain("唐僧");
  });

  it("health panel reports keywords without hits and unmarked chapters", async () => {
    const session = new ExploreSession(api);
    await session.create("jttw");
    await session.addSeeds(["不存在的詞"]);
    const health = await session.health();
    expect(health.keywords_without_hits).toContain("不存在的詞");
    expect(health.keyword_hits["不存在的詞"]).toBe(0);
    expect(health.unmarked_chapters["jttw"].length).toBeGreaterThan(0);
  });
});
