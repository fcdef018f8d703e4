/** Canvas renderer for the community map, with click-to-select hit testing. */

import type { GraphEdge, GraphModel, GraphNode } from "./graphmodel.js";
import { initPositions, stepLayout } from "./layout.js";

export interface MapCallbacks {
  onNodeClick?: (id: number) => void;
}

export class MapView {
  private ctx: CanvasRenderingContext2D;
  private model: GraphModel | null = null;
  private selected = new Set<number>();
  private alpha = 0;
  private animating = false;

  constructor(
    private canvas: HTMLCanvasElement,
    private callbacks: MapCallbacks = {},
  ) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
    canvas.addEventListener("click", (event) => {
      const hit = this.pick(event.offsetX, event.offsetY);
      if (hit !== null) this.callbacks.onNodeClick?.(hit);
    });
  }

  setModel(model: GraphModel): void {
    this.model = model;
    initPositions(model.nodes, this.canvas.width, this.canvas.height);
    this.alpha = 1;
    if (!this.animating) {
      this.animating = true;
      requestAnimationFrame(() => this.frame());
    }
  }

  setSelection(ids: Iterable<number>): void {
    this.selected = new Set(ids);
    this.draw();
  }

  private frame(): void {
    if (!this.model || this.alpha < 0.005) {
      this.animating = false;
      this.draw();
      return;
    }
    for (let i = 0; i < 3; i++) {
      stepLayout(this.model.nodes, this.model.edges, this.canvas.width, this.canvas.height, this.alpha);
    }
    this.alpha *= 0.97;
    this.draw();
    requestAnimationFrame(() => this.frame());
  }

  pick(x: number, y: number): number | null {
    if (!this.model) return null;
    // iterate back to front so the visually topmost node wins
    for (let i = this.model.nodes.length - 1; i >= 0; i--) {
      const node = this.model.nodes[i];
      if (Math.hypot(node.x - x, node.y - y) <= node.radius + 2) return node.id;
    }
    return null;
  }

  draw(): void {
    const { width, height } = this.canvas;
    this.ctx.clearRect(0, 0, width, height);
    if (!this.model || this.model.empty) return;
    const index = new Map(this.model.nodes.map((n) => [n.id, n]));
    for (const edge of this.model.edges) {
      this.drawEdge(edge, index);
    }
    for (const node of this.model.nodes) {
      this.drawNode(node);
    }
  }

  private drawEdge(edge: GraphEdge, index: Map<number, GraphNode>): void {
    const a = index.get(edge.source);
    const b = index.get(edge.target);
    if (!a || !b) return;
    this.ctx.beginPath();
    this.ctx.moveTo(a.x, a.y);
    this.ctx.lineTo(b.x, b.y);
    this.ctx.lineWidth = edge.width;
    this.ctx.strokeStyle = `rgba(120, 130, 150, ${0.15 + 0.45 * edge.weight})`;
    this.ctx.stroke();
  }

  private drawNode(node: GraphNode): void {
    this.ctx.beginPath();
    this.ctx.arc(node.x, node.y, node.radius, 0, Math.PI * 2);
    this.ctx.fillStyle = node.color;
    this.ctx.fill();
    if (node.isSeed) {
      this.ctx.lineWidth = 2.5;
      this.ctx.strokeStyle = "#111";
      this.ctx.stroke();
    }
    if (this.selected.has(node.id)) {
      this.ctx.beginPath();
      this.ctx.arc(node.x, node.y, node.radius + 3.5, 0, Math.PI * 2);
      this.ctx.lineWidth = 2;
      this.ctx.strokeStyle = "#e8b400";
      this.ctx.stroke();
    }
    if (node.radius >= 9 || node.isSeed) {
      this.ctx.fillStyle = "#1b1b1b";
      this.ctx.font = "10px sans-serif";
      this.ctx.textAlign = "center";
      this.ctx.fillText(String(node.id), node.x, node.y - node.radius - 3);
    }
  }
}
