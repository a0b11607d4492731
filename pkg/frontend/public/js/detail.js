/** Single-patient view: profile, adherence timeline, chat transcript. */
export class DetailView {
    constructor(root, api) {
        this.root = root;
        this.api = api;
    }
    async show(patientId) {
        const [patient, transcript] = await Promise.all([
            this.api.getPatient(patientId),
            this.api.getTranscript(patientId),
        ]);
        this.root.replaceChildren();
        const title = document.createElement("h2");
        title.textContent = `${patient.name} (${patient.id})`;
        this.root.appendChild(title);
        const profile = document.createElement("dl");
        profile.className = "profile";
        for (const [key, value] of Object.entries(patient.profile)) {
            const dt = document.createElement("dt");
            dt.textContent = key;
            const dd = document.createElement("dd");
            dd.textContent = String(value);
            profile.append(dt, dd);
        }
        this.root.appendChild(profile);
        const timelineHead = document.createElement("h3");
        timelineHead.textContent = "Adherence timeline";
        this.root.appendChild(timelineHead);
        const timeline = document.createElement("ol");
        timeline.className = "timeline";
        for (const record of patient.adherence_history) {
            const li = document.createElement("li");
            li.className = record.completed ? "done" : "open";
            const rating = record.motivation_rating === null ? "" : ` — motivation ${record.motivation_rating}/5`;
            const feedback = record.feedback_text ? ` — “${record.feedback_text}”` : "";
            li.textContent = `${record.activity_id}: ${record.completed ? "completed" : "assigned"}${rating}${feedback}`;
            timeline.appendChild(li);
        }
        this.root.appendChild(timeline);
        const chatHead = document.createElement("h3");
        chatHead.textContent = "Transcript";
        this.root.appendChild(chatHead);
        const chat = document.createElement("div");
        chat.className = "transcript";
        for (const [speaker, text] of transcript) {
            const line = document.createElement("p");
            line.className = `line ${speaker}`;
            line.textContent = `${speaker}: ${text}`;
            chat.appendChild(line);
        }
        this.root.appendChild(chat);
    }
}
