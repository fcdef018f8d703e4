/** Translate a query response into a drawable graph model.
 *
 * Every number shown comes verbatim from the response: edge widths scale
 * with the server's similarity weights, vertex radii with the logarithm of
 * the server-side weighted degree, and colours are a fixed function of the
 * server's community labels, so re-rendering the same response always
 * produces the same picture.
 */

import type { QueryResponse } from "./types.js";

export interface GraphNode {
  id: number;
  community: number;
  color: string;
  radius: number;
  weightedDegree: number;
  isSeed: boolean;
  distance: number | null;
  x: number;
  y: number;
  vx: number;
  vy: number;
}

export interface GraphEdge {
  source: number;
  target: number;
  weight: number;
  width: number;
}

export interface GraphModel {
  nodes: GraphNode[];
  edges: GraphEdge[];
  empty: boolean;
  communities: number[];
  modularity: number | null;
}

const MIN_RADIUS = 5;
const MAX_RADIUS = 20;
const MAX_EDGE_WIDTH = 5;

/** Deterministic colour per community label (golden-angle hue walk). */
export function communityColor(label: number): string {
  const hue = ((label * 137.508) % 360 + 360) % 360;
  return `hsl(${hue.toFixed(1)}, 62%, 52%)`;
}

export function buildGraphModel(
  response: QueryResponse,
  seeds: number[],
  displayThreshold: number,
): GraphModel {
  const map = response.community;
  if (!map || map.vertices.length === 0) {
    return { nodes: [], edges: [], empty: true, communities: [], modularity: null };
  }
  const seedSet = new Set(seeds);
  const distances = new Map(response.ranked.map((e) => [e.id, e.distance]));

  const weightedDegree = new Map<number, number>(map.vertices.map((v) => [v, 0]));
  const edges: GraphEdge[] = [];
  for (const [a, b, weight] of map.edges) {
    weightedDegree.set(a, (weightedDegree.get(a) ?? 0) + weight);
    weightedDegree.set(b, (weightedDegree.get(b) ?? 0) + weight);
    if (weight >= displayThreshold) {
      edges.push({ source: a, target: b, weight, width: 0.5 + MAX_EDGE_WIDTH * weight });
    }
  }

  const logs = map.vertices.map((v) => Math.log1p(weightedDegree.get(v) ?? 0));
  const lo = Math.min(...logs);
  const hi = Math.max(...logs);
  const span = hi - lo;

  const nodes: GraphNode[] = map.vertices.map((v, i) => {
    const label = map.labels[String(v)] ?? 0;
    const t = span > 0 ? (logs[i] - lo) / span : 0.5;
    return {
      id: v,
      community: label,
      color: communityColor(label),
      radius: MIN_RADIUS + (MAX_RADIUS - MIN_RADIUS) * t,
      weightedDegree: weightedDegree.get(v) ?? 0,
      isSeed: seedSet.has(v),
      distance: distances.get(v) ?? null,
      x: 0,
      y: 0,
      vx: 0,
      vy: 0,
    };
  });

  const communities = [...new Set(nodes.map((n) => n.community))].sort((a, b) => a - b);
  return { nodes, edges, empty: false, communities, modularity: map.modularity };
}
