import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { buildGraphModel, communityColor } from "../src/graphmodel.js";
import type { QueryResponse } from "../src/types.js";

// captured from the real service: store seeded from a planted graph,
// query with seeds [100, 101], fixed_count 25, community detection on
const fixture: QueryResponse = JSON.parse(
  readFileSync(new URL("./fixtures/query_response.json", import.meta.url), "utf-8"),
);

describe("buildGraphModel", () => {
  it("renders exactly the vertices and edges of the API response", () => {
    const model = buildGraphModel(fixture, [100, 101], 0);
    expect(model.empty).toBe(false);
    expect(model.nodes.length).toBe(fixture.community!.vertices.length);
    expect(model.edges.length).toBe(fixture.community!.edges.length);
    expect(model.nodes.map((n) => n.id).sort((a, b) => a - b)).toEqual(
      [...fixture.community!.vertices].sort((a, b) => a - b),
    );
  });

  it("marks the seeds and carries server distances verbatim", () => {
    const model = buildGraphModel(fixture, [100, 101], 0);
    const seeds = model.nodes.filter((n) => n.isSeed).map((n) => n.id);
    expect(seeds.sort((a, b) => a - b)).toEqual([100, 101]);
    for (const entry of fixture.ranked) {
      const node = model.nodes.find((n) => n.id === entry.id)!;
      expect(node.distance).toBe(entry.distance); // no local recomputation
    }
  });

  it("drops edges below the display threshold but keeps all vertices", () => {
    const all = buildGraphModel(fixture, [100, 101], 0);
    const weights = all.edges.map((e) => e.weight).sort((a, b) => a - b);
    const cut = weights[Math.floor(weights.length / 2)];
    const filtered = buildGraphModel(fixture, [100, 101], cut);
    expect(filtered.edges.length).toBe(all.edges.filter((e) => e.weight >= cut).length);
    expect(filtered.edges.length).toBeLessThan(all.edges.length);
    expect(filtered.nodes.length).toBe(all.nodes.length);
  });

  it("scales radii monotonically with the log of the weighted degree", () => {
    const model = buildGraphModel(fixture, [100, 101], 0);
    const byDegree = [...model.nodes].sort((a, b) => a.weightedDegree - b.weightedDegree);
    for (let i = 1; i < byDegree.length; i++) {
      expect(byDegree[i].radius + 1e-9).toBeGreaterThanOrEqual(byDegree[i - 1].radius);
    }
    expect(Math.min(...model.nodes.map((n) => n.radius))).toBeGreaterThanOrEqual(5);
    expect(Math.max(...model.nodes.map((n) => n.radius))).toBeLessThanOrEqual(20);
  });

  it("gives one deterministic colour per community", () => {
    const twoCommunities: QueryResponse = {
      ...fixture,
      community: {
        vertices: [1, 2, 3, 4],
        edges: [
          [1, 2, 0.9],
          [3, 4, 0.8],
        ],
        labels: { "1": 0, "2": 0, "3": 1, "4": 1 },
        modularity: 0.4,
      },
    };
    const model = buildGraphModel(twoCommunities, [1], 0);
    const colours = new Set(model.nodes.map((n) => n.color));
    expect(colours.size).toBe(2);
    const again = buildGraphModel(twoCommunities, [1], 0);
    expect(again.nodes.map((n) => n.color)).toEqual(model.nodes.map((n) => n.color));
    expect(communityColor(3)).toBe(communityColor(3));
    expect(communityColor(0)).not.toBe(communityColor(1));
  });

  it("reports an empty model when the response has no community map", () => {
    const bare: QueryResponse = { ...fixture, community: null };
    const model = buildGraphModel(bare, [100], 0);
    expect(model.empty).toBe(true);
    expect(model.nodes).toEqual([]);
  });
});
