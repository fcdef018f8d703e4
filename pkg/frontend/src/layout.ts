/** Small force-directed layout: springs along edges, pairwise repulsion,
 * and a centering pull. Purely presentational; positions start on a
 * deterministic spiral so identical responses lay out identically.
 */

import type { GraphEdge, GraphNode } from "./graphmodel.js";

const GOLDEN_ANGLE = Math.PI * (3 - Math.sqrt(5));

export function initPositions(nodes: GraphNode[], width: number, height: number): void {
  const scale = Math.min(width, height) * 0.42;
  nodes.forEach((node, i) => {
    const r = scale * Math.sqrt((i + 0.5) / nodes.length);
    const theta = i * GOLDEN_ANGLE;
    node.x = width / 2 + r * Math.cos(theta);
    node.y = height / 2 + r * Math.sin(theta);
    node.vx = 0;
    node.vy = 0;
  });
}

export interface LayoutOptions {
  springStrength: number;
  repulsion: number;
  centering: number;
  damping: number;
}

export const DEFAULT_LAYOUT: LayoutOptions = {
  springStrength: 0.04,
  repulsion: 900,
  centering: 0.012,
  damping: 0.85,
};

/** Advance the simulation one tick; alpha in (0, 1] scales all forces. */
export function stepLayout(
  nodes: GraphNode[],
  edges: GraphEdge[],
  width: number,
  height: number,
  alpha: number,
  options: LayoutOptions = DEFAULT_LAYOUT,
): void {
  const index = new Map(nodes.map((n) => [n.id, n]));

  // springs: rest length shrinks as similarity grows
  for (const edge of edges) {
    const a = index.get(edge.source);
    const b = index.get(edge.target);
    if (!a || !b) continue;
    const rest = 40 + 140 * (1 - edge.weight);
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    const dist = Math.hypot(dx, dy) || 1e-6;
    const force = options.springStrength * alpha * (dist - rest) * edge.weight;
    dx /= dist;
    dy /= dist;
    a.vx += force * dx;
    a.vy += force * dy;
    b.vx -= force * dx;
    b.vy -= force * dy;
  }

  // pairwise repulsion (n is bounded by the community-map size limit)
  for (let i = 0; i < nodes.length; i++) {
    for (let j = i + 1; j < nodes.length; j++) {
      const a = nodes[i];
      const b = nodes[j];
      let dx = b.x - a.x;
      let dy = b.y - a.y;
      const d2 = dx * dx + dy * dy || 1e-6;
      const dist = Math.sqrt(d2);
      const force = (options.repulsion * alpha) / d2;
      dx /= dist;
      dy /= dist;
      a.vx -= force * dx;
      a.vy -= force * dy;
      b.vx += force * dx;
      b.vy += force * dy;
    }
  }

  for (const node of nodes) {
    node.vx += (width / 2 - node.x) * options.centering * alpha;
    node.vy += (height / 2 - node.y) * options.centering * alpha;
    node.vx *= options.damping;
    node.vy *= options.damping;
    node.x += node.vx;
    node.y += node.vy;
    node.x = Math.max(node.radius, Math.min(width - node.radius, node.x));
    node.y = Math.max(node.radius, Math.min(height - node.radius, node.y));
  }
}
