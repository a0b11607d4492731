import { ApiClient, ClusterSnapshot } from "./api.js";

const PALETTE = ["#2563eb", "#dc2626", "#16a34a", "#9333ea", "#ea580c", "#0891b2"];

const WIDTH = 520;
const HEIGHT = 360;
const MARGIN = 36;

function scale(values: number[], lo: number, hi: number): (v: number) => number {
  const min = Math.min(...values);
  const max = Math.max(...values);
  const span = max - min;
  return (v) => (span === 0 ? (lo + hi) / 2 : lo + ((v - min) / span) * (hi - lo));
}

/** Scatter plot of the latest cluster snapshot, projected onto two
 * user-selectable feature axes. One circle per patient vector. */
export class ClusterExplorer {
  private snapshot: ClusterSnapshot | null = null;
  private xAxis = 0;
  private yAxis = 1;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  async refresh(): Promise<void> {
    try {
      this.snapshot = await this.api.latestClusters();
    } catch {
      this.snapshot = null;
    }
    this.render();
  }

  pointCount(): number {
    return this.root.querySelectorAll("circle.point").length;
  }

  setAxes(x: number, y: number): void {
    this.xAxis = x;
    this.yAxis = y;
    this.render();
  }

  render(): void {
    this.root.replaceChildren();
    if (!this.snapshot) {
      const empty = document.createElement("p");
      empty.className = "empty";
      empty.textContent = "No cluster snapshot yet — run a model refresh.";
      this.root.appendChild(empty);
      return;
    }
    const snap = this.snapshot;
    this.root.appendChild(this.axisPicker(snap));

    const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
    svg.setAttribute("class", "cluster-plot");
    const xs = snap.vectors.map((v) => v[this.xAxis]);
    const ys = snap.vectors.map((v) => v[this.yAxis]);
    const sx = scale(xs, MARGIN, WIDTH - MARGIN);
    const sy = scale(ys, HEIGHT - MARGIN, MARGIN);

    snap.vectors.forEach((vec, i) => {
      const dot = document.createElementNS("http://www.w3.org/2000/svg", "circle");
      dot.setAttribute("class", "point");
      dot.setAttribute("cx", String(sx(vec[this.xAxis])));
      dot.setAttribute("cy", String(sy(vec[this.yAxis])));
      dot.setAttribute("r", "5");
      dot.setAttribute("fill", PALETTE[snap.labels[i] % PALETTE.length]);
      dot.dataset.patientId = snap.patient_ids[i];
      dot.dataset.label = String(snap.labels[i]);
      const tip = document.createElementNS("http://www.w3.org/2000/svg", "title");
      tip.textContent = `${snap.patient_ids[i]} (cluster ${snap.labels[i]}, band ${snap.bands[i]})`;
      dot.appendChild(tip);
      svg.appendChild(dot);
    });
    this.root.appendChild(svg);

    const legend = document.createElement("p");
    legend.className = "legend";
    legend.textContent = snap.cluster_sizes
      .map((size, i) => `cluster ${i}: ${size}`)
      .join("  ·  ");
    this.root.appendChild(legend);
  }

  private axisPicker(snap: ClusterSnapshot): HTMLElement {
    const bar = document.createElement("div");
    bar.className = "axis-picker";
    const build = (axis: "x" | "y", current: number) => {
      const select = document.createElement("select");
      select.className = `axis-${axis}`;
      snap.feature_names.forEach((name, i) => {
        const option = document.createElement("option");
        option.value = String(i);
        option.textContent = name;
        option.selected = i === current;
        select.appendChild(option);
      });
      select.addEventListener("change", () => {
        const x = axis === "x" ? Number(select.value) : this.xAxis;
        const y = axis === "y" ? Number(select.value) : this.yAxis;
        this.setAxes(x, y);
      });
      return select;
    };
    bar.append("x: ", build("x", this.xAxis), " y: ", build("y", this.yAxis));
    return bar;
  }
}
