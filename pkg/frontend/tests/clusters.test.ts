import { beforeEach, describe, expect, it } from "vitest";

import { ClusterSnapshot } from "../src/api.js";
import { ClusterExplorer } from "../src/clusters.js";
import { client, jsonResponse, makeFetch } from "./helpers.js";

function snapshot(n: number): ClusterSnapshot {
  return {
    snapshot_id: "snap0001",
    created_at: 1,
    patient_ids: Array.from({ length: n }, (_, i) => `p${i}`),
    vectors: Array.from({ length: n }, (_, i) => [i, i * 2, -i, 0.5, 1, i % 3]),
    labels: Array.from({ length: n }, (_, i) => i % 3),
    centroids: [
      [0, 0, 0, 0, 0, 0],
      [1, 1, 1, 1, 1, 1],
      [2, 2, 2, 2, 2, 2],
    ],
    bands: Array.from({ length: n }, (_, i) => ["HIGH", "MEDIUM", "LOW"][i % 3]),
    cluster_sizes: [Math.ceil(n / 3), Math.ceil((n - 1) / 3), Math.floor(n / 3)],
    feature_names: [
      "bmi",
      "diet_score",
      "sleep_hours",
      "activity_level",
      "profession_sedentariness",
      "age",
    ],
  };
}

function root(): HTMLElement {
  document.body.innerHTML = '<div id="clusters"></div>';
  return document.getElementById("clusters")!;
}

describe("ClusterExplorer", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("draws exactly one point per label reported by the API", async () => {
    const snap = snapshot(17);
    const { fetchFn } = makeFetch({
      "GET /v1/clusters/latest": () => jsonResponse(snap),
    });
    const explorer = new ClusterExplorer(root(), client(fetchFn));
    await explorer.refresh();
    expect(explorer.pointCount()).toBe(snap.labels.length);
    expect(document.querySelectorAll("circle.point")).toHaveLength(17);
  });

  it("colors points by cluster label", async () => {
    const snap = snapshot(6);
    const { fetchFn } = makeFetch({
      "GET /v1/clusters/latest": () => jsonResponse(snap),
    });
    const explorer = new ClusterExplorer(root(), client(fetchFn));
    await explorer.refresh();
    const points = [...document.querySelectorAll<SVGCircleElement>("circle.point")];
    const byLabel = new Map<string, Set<string>>();
    for (const point of points) {
      const label = point.dataset.label!;
      if (!byLabel.has(label)) byLabel.set(label, new Set());
      byLabel.get(label)!.add(point.getAttribute("fill")!);
    }
    for (const fills of byLabel.values()) {
      expect(fills.size).toBe(1);
    }
    expect(new Set(points.map((p) => p.getAttribute("fill"))).size).toBe(3);
  });

  it("offers every feature as a selectable axis and re-renders on change", async () => {
    const snap = snapshot(5);
    const { fetchFn } = makeFetch({
      "GET /v1/clusters/latest": () => jsonResponse(snap),
    });
    const explorer = new ClusterExplorer(root(), client(fetchFn));
    await explorer.refresh();
    const xSelect = document.querySelector<HTMLSelectElement>("select.axis-x")!;
    expect(xSelect.options).toHaveLength(6);
    expect([...xSelect.options].map((o) => o.textContent)).toContain("age");

    const positions = () =>
      [...document.querySelectorAll<SVGCircleElement>("circle.point")].map((p) =>
        p.getAttribute("cx"),
      );
    const before = positions();
    xSelect.value = "5";
    xSelect.dispatchEvent(new Event("change"));
    expect(explorer.pointCount()).toBe(5);
    expect(positions()).not.toEqual(before);
  });

  it("shows an empty state when no snapshot exists", async () => {
    const { fetchFn } = makeFetch({
      "GET /v1/clusters/latest": () => jsonResponse({ error: "no cluster snapshot yet" }, 404),
    });
    const explorer = new ClusterExplorer(root(), client(fetchFn));
    await explorer.refresh();
    expect(explorer.pointCount()).toBe(0);
    expect(document.querySelector(".empty")?.textContent).toContain("No cluster snapshot");
  });
});
