/**
 * Interactive argument-graph editor. Graph-tagged spans arrive as nodes
 * from the server without any user action; dragging from one node to
 * another proposes an edge through the API. A rejected edge (cycle) never
 * enters committed state: it flashes red with the cycle path and the view
 * stays on the last accepted graph. Ancestor/descendant lists come from
 * the server payload and refresh after every accepted edit.
 */

import { ApiClient, ApiError, GraphInfo, GraphNodeInfo } from "./api";
import { showToast } from "./toast";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_RADIUS = 20;
const LAYER_X = 150;
const ROW_Y = 90;

interface Position {
  x: number;
  y: number;
}

export function layoutPositions(graph: GraphInfo): Map<string, Position> {
  // longest-path layering: x by depth from the roots, y by row within layer
  const depth = new Map<string, number>();
  for (const node of graph.nodes) depth.set(node.id, 0);
  let changed = true;
  while (changed) {
    changed = false;
    for (const edge of graph.edges) {
      const candidate = (depth.get(edge.src) ?? 0) + 1;
      if (candidate > (depth.get(edge.dst) ?? 0)) {
        depth.set(edge.dst, candidate);
        changed = true;
      }
    }
  }
  const rows = new Map<number, number>();
  const positions = new Map<string, Position>();
  for (const node of [...graph.nodes].sort((a, b) => a.id.localeCompare(b.id))) {
    const d = depth.get(node.id) ?? 0;
    const row = rows.get(d) ?? 0;
    rows.set(d, row + 1);
    positions.set(node.id, {
      x: 60 + d * LAYER_X,
      y: 60 + row * ROW_Y,
    });
  }
  return positions;
}

export class GraphEditor {
  graph: GraphInfo = { nodes: [], edges: [] };
  selectedNodeId: string | null = null;
  private dragFrom: string | null = null;

  constructor(
    private root: HTMLElement,
    private client: ApiClient,
    private docId: string,
    private excerptFor: (node: GraphNodeInfo) => string = (node) =>
      node.tag ?? "",
  ) {}

  async load(): Promise<void> {
    this.graph = await this.client.getGraph(this.docId);
    this.render();
  }

  render(): void {
    this.root.innerHTML = "";
    const wrapper = document.createElement("div");
    wrapper.className = "graph-layout";
    wrapper.append(this.renderSvg(), this.renderInfoPanel());
    this.root.appendChild(wrapper);
  }

  private renderSvg(): SVGSVGElement {
    const positions = layoutPositions(this.graph);
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("class", "graph-canvas");
    const maxX = Math.max(200, ...[...positions.values()].map((p) => p.x + 80));
    const maxY = Math.max(200, ...[...positions.values()].map((p) => p.y + 80));
    svg.setAttribute("viewBox", `0 0 ${maxX} ${maxY}`);

    for (const edge of this.graph.edges) {
      const from = positions.get(edge.src);
      const to = positions.get(edge.dst);
      if (!from || !to) continue;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("class", "edge");
      line.setAttribute("data-src", edge.src);
      line.setAttribute("data-dst", edge.dst);
      line.setAttribute("x1", String(from.x));
      line.setAttribute("y1", String(from.y));
      line.setAttribute("x2", String(to.x));
      line.setAttribute("y2", String(to.y));
      line.addEventListener("dblclick", () => void this.removeEdge(edge));
      svg.appendChild(line);
    }

    for (const node of this.graph.nodes) {
      const at = positions.get(node.id)!;
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("class", "node");
      if (node.id === this.selectedNodeId) {
        group.setAttribute("class", "node selected");
      }
      group.setAttribute("data-node-id", node.id);
      group.setAttribute("transform", `translate(${at.x}, ${at.y})`);

      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("r", String(NODE_RADIUS));
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("y", String(NODE_RADIUS + 14));
      label.textContent = node.tag ? `${node.tag}:${node.id}` : node.id;
      const hover = document.createElementNS(SVG_NS, "title");
      hover.textContent = this.excerptFor(node);

      group.append(circle, label, hover);
      group.addEventListener("mousedown", () => {
        this.dragFrom = node.id;
      });
      group.addEventListener("mouseup", () => {
        const from = this.dragFrom;
        this.dragFrom = null;
        if (from === null || from === node.id) {
          this.selectedNodeId = node.id;
          this.render();
        } else {
          void this.addEdge(from, node.id);
        }
      });
      svg.appendChild(group);
    }
    return svg;
  }

  private renderInfoPanel(): HTMLElement {
    const panel = document.createElement("aside");
    panel.className = "graph-info";
    const node = this.graph.nodes.find((n) => n.id === this.selectedNodeId);
    if (!node) {
      panel.textContent = this.graph.nodes.length
        ? "Select a node; drag between nodes to draw an edge."
        : "Tag text with a graph tag to create nodes.";
      return panel;
    }
    const title = document.createElement("h3");
    title.textContent = node.tag ? `${node.tag} (${node.id})` : node.id;
    const excerpt = document.createElement("blockquote");
    excerpt.textContent = this.excerptFor(node);

    const ancestors = document.createElement("p");
    ancestors.className = "ancestor-list";
    ancestors.textContent = `ancestors: ${node.ancestors.join(" ") || "—"}`;
    const descendants = document.createElement("p");
    descendants.className = "descendant-list";
    descendants.textContent = `descendants: ${node.descendants.join(" ") || "—"}`;

    panel.append(title, excerpt, ancestors, descendants);
    return panel;
  }

  /** Propose src -> dst; committed state changes only on acceptance. */
  async addEdge(src: string, dst: string): Promise<void> {
    const proposed = [...this.graph.edges, { src, dst }];
    try {
      this.graph = await this.client.putGraph(this.docId, proposed);
      this.selectedNodeId = dst;
      this.render();
    } catch (error) {
      if (error instanceof ApiError) {
        this.flashRejected(src, dst);
        const cycle = Array.isArray(error.details["cycle"])
          ? (error.details["cycle"] as string[]).join(" → ")
          : "";
        showToast(
          cycle ? `${error.code}: ${cycle}` : `${error.code}: ${error.message}`,
          "error",
        );
        return;
      }
      throw error;
    }
  }

  async removeEdge(edge: { src: string; dst: string }): Promise<void> {
    const remaining = this.graph.edges.filter(
      (e) => !(e.src === edge.src && e.dst === edge.dst),
    );
    this.graph = await this.client.putGraph(this.docId, remaining);
    this.render();
  }

  /** Transient red edge for a rejected draw; never part of committed state. */
  private flashRejected(src: string, dst: string): void {
    const svg = this.root.querySelector("svg");
    if (!svg) return;
    const positions = layoutPositions(this.graph);
    const from = positions.get(src);
    const to = positions.get(dst);
    if (!from || !to) return;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("class", "edge edge-rejected");
    line.setAttribute("x1", String(from.x));
    line.setAttribute("y1", String(from.y));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y));
    svg.appendChild(line);
    setTimeout(() => line.remove(), 900);
  }
}
