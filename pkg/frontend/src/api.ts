export interface Candidate {
  activity_id: string;
  provenance: string;
  support_count: number;
}

export interface RecommendationCase {
  id: string;
  patient_id: string;
  candidates: Candidate[];
  status: string;
  created_at: number;
  cold_start: boolean;
  accepted_activity?: string | null;
  coach_note?: string | null;
}

export interface PatientRow {
  id: string;
  name: string;
  band: string;
  adherence_score: number | null;
  last_activity: string | null;
  intake_complete: boolean;
}

export interface AdherenceRecord {
  activity_id: string;
  assigned_at: number;
  completed: boolean;
  feedback_text: string | null;
  motivation_rating: number | null;
}

export interface PatientDoc {
  id: string;
  name: string;
  external_ref: string;
  profile: Record<string, number | string>;
  adherence_history: AdherenceRecord[];
}

export interface ClusterSnapshot {
  snapshot_id: string;
  created_at: number;
  patient_ids: string[];
  vectors: number[][];
  labels: number[];
  centroids: number[][];
  bands: string[];
  cluster_sizes: number[];
  feature_names: string[];
}

export type TranscriptLine = [string, string, number];

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, public readonly status: number) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      const message =
        typeof body === "object" && body !== null && "error" in body
          ? String((body as { error: unknown }).error)
          : `request failed: ${resp.status}`;
      throw new ApiError(message, resp.status);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  listPatients(): Promise<PatientRow[]> {
    return this.request("/v1/patients");
  }

  getPatient(id: string): Promise<PatientDoc> {
    return this.request(`/v1/patients/${id}`);
  }

  getTranscript(id: string): Promise<TranscriptLine[]> {
    return this.request(`/v1/patients/${id}/transcript`);
  }

  pendingCases(): Promise<RecommendationCase[]> {
    return this.request("/v1/cases?status=PENDING");
  }

  latestClusters(): Promise<ClusterSnapshot> {
    return this.request("/v1/clusters/latest");
  }

  registerPatient(externalRef: string, name: string): Promise<{ patient_id: string }> {
    return this.post("/v1/patients", { external_ref: externalRef, name });
  }

  decide(
    caseId: string,
    decision: "ACCEPT" | "REJECT",
    activityId?: string,
    note?: string,
  ): Promise<RecommendationCase> {
    return this.post(`/v1/cases/${caseId}/decision`, {
      decision,
      activity_id: activityId ?? null,
      note: note ?? null,
    });
  }
}
