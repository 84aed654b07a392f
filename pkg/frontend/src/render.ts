import type { ExplorerController } from "./controller.js";
import type { GraphEdge, GraphNode } from "./types.js";

// d3 is loaded as a global UMD bundle by index.html.
declare const d3: typeof import("d3");

interface SimNode extends GraphNode {
  x?: number;
  y?: number;
  fx?: number | null;
  fy?: number | null;
}

interface SimLink {
  source: string | SimNode;
  target: string | SimNode;
  weight: number | null;
  relation?: string;
}

const WIDTH = 960;
const HEIGHT = 640;

/**
 * Force-directed rendering of the controller's graph store. The renderer
 * never computes similarities; edge thickness is proportional to the
 * server-supplied weight and curated (weightless) edges draw dashed.
 */
export class ForceRenderer {
  private simulation: import("d3").Simulation<SimNode, undefined> | null = null;
  private svg: import("d3").Selection<SVGSVGElement, unknown, null, undefined>;

  constructor(
    container: HTMLElement,
    private readonly controller: ExplorerController,
  ) {
    this.svg = d3
      .select(container)
      .append("svg")
      .attr("viewBox", `0 0 ${WIDTH} ${HEIGHT}`)
      .attr("width", "100%");
    this.svg.append("g").attr("class", "edges");
    this.svg.append("g").attr("class", "nodes");
    this.svg.append("g").attr("class", "labels");
    controller.onChange(() => this.draw());
  }

  renderedNodeCount(): number {
    return this.svg.select(".nodes").selectAll("circle").size();
  }

  renderedEdgeCount(): number {
    return this.svg.select(".edges").selectAll("line").size();
  }

  draw(): void {
    const nodes: SimNode[] = this.controller.store.allNodes().map((node) => ({ ...node }));
    const links: SimLink[] = this.controller.store
      .visibleEdges()
      .map((edge: GraphEdge) => ({ ...edge }));

    const edgeSel = this.svg
      .select<SVGGElement>(".edges")
      .selectAll<SVGLineElement, SimLink>("line")
      .data(links, (d: SimLink) => {
        const s = typeof d.source === "string" ? d.source : d.source.id;
        const t = typeof d.target === "string" ? d.target : d.target.id;
        return `${s}|${t}`;
      });
    edgeSel.exit().remove();
    const edgeEnter = edgeSel.enter().append("line");
    const edges = edgeEnter.merge(edgeSel as never);
    edges
      .attr("stroke", (d) => (d.relation ? "#c0392b" : "#999"))
      .attr("stroke-dasharray", (d) => (d.weight === null ? "4 3" : null))
      .attr("stroke-width", (d) => (d.weight === null ? 1.5 : 0.5 + 3 * Math.max(0, d.weight)))
      .on("click", (_event, d) => {
        const source = typeof d.source === "string" ? d.source : d.source.id;
        const target = typeof d.target === "string" ? d.target : d.target.id;
        const label = window.prompt(`relation label for ${source} -- ${target}?`, d.relation ?? "");
        if (label) this.controller.annotateEdge("relabel", source, target, label);
      });

    const nodeSel = this.svg
      .select<SVGGElement>(".nodes")
      .selectAll<SVGCircleElement, SimNode>("circle")
      .data(nodes, (d: SimNode) => d.id);
    nodeSel.exit().remove();
    const nodeEnter = nodeSel
      .enter()
      .append("circle")
      .attr("r", 7)
      .attr("fill", "#2c7fb8")
      .attr("cursor", "pointer");
    const circles = nodeEnter.merge(nodeSel as never);
    circles.on("click", (_event, d) => {
      void this.controller.expand(d.id);
    });
    circles.append("title");
    circles.select("title").text((d) => d.label);

    const labelSel = this.svg
      .select<SVGGElement>(".labels")
      .selectAll<SVGTextElement, SimNode>("text")
      .data(nodes, (d: SimNode) => d.id);
    labelSel.exit().remove();
    const labels = labelSel
      .enter()
      .append("text")
      .attr("font-size", 11)
      .attr("dx", 9)
      .attr("dy", 4)
      .merge(labelSel as never);
    labels.text((d) => d.label);

    this.simulation?.stop();
    this.simulation = d3
      .forceSimulation<SimNode>(nodes)
      .force(
        "link",
        d3
          .forceLink<SimNode, SimLink>(links as never)
          .id((d: SimNode) => d.id)
          .distance((d: SimLink) => 60 + 120 * (1 - (d.weight ?? 0.5)))
          .strength(0.6),
      )
      .force("charge", d3.forceManyBody().strength(-220))
      .force("center", d3.forceCenter(WIDTH / 2, HEIGHT / 2))
      .on("tick", () => {
        edges
          .attr("x1", (d) => (typeof d.source === "string" ? 0 : (d.source.x ?? 0)))
          .attr("y1", (d) => (typeof d.source === "string" ? 0 : (d.source.y ?? 0)))
          .attr("x2", (d) => (typeof d.target === "string" ? 0 : (d.target.x ?? 0)))
          .attr("y2", (d) => (typeof d.target === "string" ? 0 : (d.target.y ?? 0)));
        circles.attr("cx", (d) => d.x ?? 0).attr("cy", (d) => d.y ?? 0);
        labels.attr("x", (d) => d.x ?? 0).attr("y", (d) => d.y ?? 0);
      });
  }
}
