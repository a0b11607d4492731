/** Recommendation queue: pending cases with Accept/Reject controls.
 *
 * A case leaves the list only after the server confirms the decision;
 * while a decision is in flight its buttons are disabled so a second
 * click cannot fire a duplicate call. */
export class QueueView {
    constructor(root, api) {
        this.root = root;
        this.api = api;
        this.cases = [];
        this.inFlight = new Set();
        this.errors = new Map();
    }
    async refresh() {
        this.cases = await this.api.pendingCases();
        for (const id of [...this.errors.keys()]) {
            if (!this.cases.some((c) => c.id === id))
                this.errors.delete(id);
        }
        this.render();
    }
    caseIds() {
        return this.cases.map((c) => c.id);
    }
    async decide(caseId, decision, activityId) {
        if (this.inFlight.has(caseId))
            return;
        this.inFlight.add(caseId);
        this.errors.delete(caseId);
        this.render();
        try {
            await this.api.decide(caseId, decision, activityId);
            // server confirmed: now the case may leave the queue
            this.cases = this.cases.filter((c) => c.id !== caseId);
        }
        catch (err) {
            this.errors.set(caseId, err instanceof Error ? err.message : String(err));
        }
        finally {
            this.inFlight.delete(caseId);
            this.render();
        }
    }
    render() {
        this.root.replaceChildren();
        if (this.cases.length === 0) {
            const empty = document.createElement("p");
            empty.className = "empty";
            empty.textContent = "No pending cases.";
            this.root.appendChild(empty);
            return;
        }
        for (const item of this.cases) {
            this.root.appendChild(this.renderCase(item));
        }
    }
    renderCase(item) {
        const card = document.createElement("article");
        card.className = "case-card";
        card.dataset.caseId = item.id;
        const busy = this.inFlight.has(item.id);
        const title = document.createElement("h3");
        title.textContent = `${item.id} — patient ${item.patient_id}`;
        card.appendChild(title);
        if (item.cold_start) {
            const flag = document.createElement("p");
            flag.className = "cold-start";
            flag.textContent = "Cold start: no candidates, assign manually.";
            card.appendChild(flag);
        }
        const list = document.createElement("ul");
        list.className = "candidates";
        item.candidates.forEach((cand, idx) => {
            const row = document.createElement("li");
            const label = document.createElement("label");
            const radio = document.createElement("input");
            radio.type = "radio";
            radio.name = `activity-${item.id}`;
            radio.value = cand.activity_id;
            radio.checked = idx === 0;
            radio.disabled = busy;
            label.appendChild(radio);
            label.append(` ${cand.activity_id} (${cand.provenance}, support ${cand.support_count})`);
            row.appendChild(label);
            list.appendChild(row);
        });
        card.appendChild(list);
        const controls = document.createElement("div");
        controls.className = "controls";
        const accept = document.createElement("button");
        accept.className = "accept";
        accept.textContent = busy ? "Deciding…" : "Accept";
        accept.disabled = busy || item.candidates.length === 0;
        accept.addEventListener("click", () => {
            const chosen = card.querySelector(`input[name="activity-${item.id}"]:checked`);
            void this.decide(item.id, "ACCEPT", chosen?.value);
        });
        const reject = document.createElement("button");
        reject.className = "reject";
        reject.textContent = "Reject";
        reject.disabled = busy;
        reject.addEventListener("click", () => void this.decide(item.id, "REJECT"));
        controls.append(accept, reject);
        card.appendChild(controls);
        const error = this.errors.get(item.id);
        if (error) {
            const note = document.createElement("p");
            note.className = "error";
            note.textContent = error;
            card.appendChild(note);
        }
        return card;
    }
}
