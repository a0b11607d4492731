import { ApiClient } from "./api.js";
import { ClusterExplorer } from "./clusters.js";
import { DetailView } from "./detail.js";
import { QueueView } from "./queue.js";
import { RegisterForm } from "./register.js";
import { RosterView } from "./roster.js";

const POLL_MS = 5000;

function mount(): void {
  const api = new ApiClient("");
  const tabs = document.querySelectorAll<HTMLButtonElement>("nav button");
  const panels = document.querySelectorAll<HTMLElement>("main > section");

  const show = (name: string) => {
    panels.forEach((panel) => {
      panel.hidden = panel.id !== `panel-${name}`;
    });
    tabs.forEach((tab) => tab.classList.toggle("active", tab.dataset.panel === name));
  };
  tabs.forEach((tab) =>
    tab.addEventListener("click", () => show(tab.dataset.panel ?? "queue")),
  );

  const queue = new QueueView(document.getElementById("queue-root")!, api);
  const clusters = new ClusterExplorer(document.getElementById("clusters-root")!, api);
  const detail = new DetailView(document.getElementById("detail-root")!, api);
  const roster = new RosterView(document.getElementById("roster-root")!, api, (id) => {
    show("detail");
    void detail.show(id);
  });
  new RegisterForm(document.getElementById("register-root")!, api, () => {
    void roster.refresh();
  });

  const poll = () => {
    void queue.refresh();
    void roster.refresh();
    void clusters.refresh();
  };
  poll();
  setInterval(poll, POLL_MS);
  show("queue");
}

document.addEventListener("DOMContentLoaded", mount);
