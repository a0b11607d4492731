export class ApiError extends Error {
    constructor(message, status) {
        super(message);
        this.status = status;
    }
}
export class ApiClient {
    constructor(baseUrl = "", fetchFn = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async request(path, init) {
        const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
        const body = await resp.json().catch(() => ({}));
        if (!resp.ok) {
            const message = typeof body === "object" && body !== null && "error" in body
                ? String(body.error)
                : `request failed: ${resp.status}`;
            throw new ApiError(message, resp.status);
        }
        return body;
    }
    post(path, payload) {
        return this.request(path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(payload),
        });
    }
    listPatients() {
        return this.request("/v1/patients");
    }
    getPatient(id) {
        return this.request(`/v1/patients/${id}`);
    }
    getTranscript(id) {
        return this.request(`/v1/patients/${id}/transcript`);
    }
    pendingCases() {
        return this.request("/v1/cases?status=PENDING");
    }
    latestClusters() {
        return this.request("/v1/clusters/latest");
    }
    registerPatient(externalRef, name) {
        return this.post("/v1/patients", { external_ref: externalRef, name });
    }
    decide(caseId, decision, activityId, note) {
        return this.post(`/v1/cases/${caseId}/decision`, {
            decision,
            activity_id: activityId ?? null,
            note: note ?? null,
        });
    }
}
