import { ApiClient, PatientRow } from "./api.js";

/** Patient roster table; clicking a row opens the detail view. */
export class RosterView {
  private rows: PatientRow[] = [];

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly onSelect: (patientId: string) => void,
  ) {}

  async refresh(): Promise<void> {
    this.rows = await this.api.listPatients();
    this.render();
  }

  render(): void {
    this.root.replaceChildren();
    const table = document.createElement("table");
    table.className = "roster";
    const head = document.createElement("tr");
    for (const col of ["ID", "Name", "Band", "Adherence", "Last activity", "Intake"]) {
      const th = document.createElement("th");
      th.textContent = col;
      head.appendChild(th);
    }
    table.appendChild(head);
    for (const row of this.rows) {
      const tr = document.createElement("tr");
      tr.className = "roster-row";
      tr.dataset.patientId = row.id;
      const cells = [
        row.id,
        row.name,
        row.band,
        row.adherence_score === null ? "—" : row.adherence_score.toFixed(2),
        row.last_activity ?? "—",
        row.intake_complete ? "complete" : "in progress",
      ];
      for (const value of cells) {
        const td = document.createElement("td");
        td.textContent = value;
        tr.appendChild(td);
      }
      tr.addEventListener("click", () => this.onSelect(row.id));
      table.appendChild(tr);
    }
    this.root.appendChild(table);
  }
}
