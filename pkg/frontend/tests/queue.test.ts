import { beforeEach, describe, expect, it } from "vitest";

import { QueueView } from "../src/queue.js";
import { client, jsonResponse, makeCase, makeFetch } from "./helpers.js";

function root(): HTMLElement {
  document.body.innerHTML = '<div id="queue"></div>';
  return document.getElementById("queue")!;
}

describe("QueueView", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("renders pending cases from the service", async () => {
    const { fetchFn } = makeFetch({
      "GET /v1/cases?status=PENDING": () =>
        jsonResponse([makeCase("case0001"), makeCase("case0002")]),
    });
    const view = new QueueView(root(), client(fetchFn));
    await view.refresh();
    const cards = document.querySelectorAll(".case-card");
    expect(cards).toHaveLength(2);
    expect(cards[0].textContent).toContain("case0001");
    expect(cards[0].textContent).toContain("jog");
    expect(cards[0].textContent).toContain("HIGH_ADH");
  });

  it("shows an empty state when the queue is clear", async () => {
    const { fetchFn } = makeFetch({
      "GET /v1/cases?status=PENDING": () => jsonResponse([]),
    });
    const view = new QueueView(root(), client(fetchFn));
    await view.refresh();
    expect(document.querySelector(".empty")?.textContent).toContain("No pending cases");
  });

  it("accept fires exactly one decision call even on a double click", async () => {
    let release!: (r: Response) => void;
    const pending = new Promise<Response>((resolve) => (release = resolve));
    const { fetchFn, calls } = makeFetch({
      "GET /v1/cases?status=PENDING": () => jsonResponse([makeCase("case0001")]),
      "POST /v1/cases/case0001/decision": () => pending,
    });
    const view = new QueueView(root(), client(fetchFn));
    await view.refresh();

    const accept = document.querySelector<HTMLButtonElement>("button.accept")!;
    accept.click();
    // the re-rendered button must be disabled while the call is in flight
    const againButton = document.querySelector<HTMLButtonElement>("button.accept")!;
    expect(againButton.disabled).toBe(true);
    againButton.click();
    accept.click();

    release(jsonResponse(makeCase("case0001", { status: "ACCEPTED" })));
    await new Promise((resolve) => setTimeout(resolve, 0));

    const decisions = calls.filter((c) => c.method === "POST");
    expect(decisions).toHaveLength(1);
    expect(decisions[0].body).toMatchObject({ decision: "ACCEPT", activity_id: "jog" });
  });

  it("removes the case only after the server confirms", async () => {
    let release!: (r: Response) => void;
    const pending = new Promise<Response>((resolve) => (release = resolve));
    const { fetchFn } = makeFetch({
      "GET /v1/cases?status=PENDING": () => jsonResponse([makeCase("case0001")]),
      "POST /v1/cases/case0001/decision": () => pending,
    });
    const view = new QueueView(root(), client(fetchFn));
    await view.refresh();

    document.querySelector<HTMLButtonElement>("button.accept")!.click();
    // still pending: no optimistic removal
    expect(document.querySelectorAll(".case-card")).toHaveLength(1);
    expect(view.caseIds()).toEqual(["case0001"]);

    release(jsonResponse(makeCase("case0001", { status: "ACCEPTED" })));
    await new Promise((resolve) => setTimeout(resolve, 0));
    expect(document.querySelectorAll(".case-card")).toHaveLength(0);
    expect(view.caseIds()).toEqual([]);
  });

  it("keeps the case and surfaces the error when the server rejects", async () => {
    const { fetchFn, calls } = makeFetch({
      "GET /v1/cases?status=PENDING": () => jsonResponse([makeCase("case0001")]),
      "POST /v1/cases/case0001/decision": () =>
        jsonResponse({ error: "case case0001 already decided" }, 409),
    });
    const view = new QueueView(root(), client(fetchFn));
    await view.refresh();

    document.querySelector<HTMLButtonElement>("button.reject")!.click();
    await new Promise((resolve) => setTimeout(resolve, 0));

    expect(calls.filter((c) => c.method === "POST")).toHaveLength(1);
    expect(document.querySelectorAll(".case-card")).toHaveLength(1);
    expect(document.querySelector(".case-card .error")?.textContent).toContain(
      "already decided",
    );
    // buttons are usable again after the failure
    expect(document.querySelector<HTMLButtonElement>("button.accept")!.disabled).toBe(false);
  });

  it("sends the selected candidate, not always the first", async () => {
    const { fetchFn, calls } = makeFetch({
      "GET /v1/cases?status=PENDING": () => jsonResponse([makeCase("case0001")]),
      "POST /v1/cases/case0001/decision": () =>
        jsonResponse(makeCase("case0001", { status: "ACCEPTED" })),
    });
    const view = new QueueView(root(), client(fetchFn));
    await view.refresh();

    const radios = document.querySelectorAll<HTMLInputElement>("input[type=radio]");
    radios[1].checked = true;
    document.querySelector<HTMLButtonElement>("button.accept")!.click();
    await new Promise((resolve) => setTimeout(resolve, 0));

    const decision = calls.find((c) => c.method === "POST")!;
    expect(decision.body).toMatchObject({ activity_id: "walk_brisk" });
  });

  it("disables accept for cold-start cases with no candidates", async () => {
    const { fetchFn } = makeFetch({
      "GET /v1/cases?status=PENDING": () =>
        jsonResponse([makeCase("case0001", { candidates: [], cold_start: true })]),
    });
    const view = new QueueView(root(), client(fetchFn));
    await view.refresh();
    expect(document.querySelector(".cold-start")).not.toBeNull();
    expect(document.querySelector<HTMLButtonElement>("button.accept")!.disabled).toBe(true);
    expect(document.querySelector<HTMLButtonElement>("button.reject")!.disabled).toBe(false);
  });
});
