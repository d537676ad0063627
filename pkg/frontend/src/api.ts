/** Typed client for the annotation service HTTP API. */

export interface Candidate {
  pair_id: string;
  text: string;
}

export interface Task {
  task_id: string;
  original: string;
  candidates: Candidate[];
}

export interface LabelItem {
  pair_id: string;
  label: boolean;
}

export interface SubmitResult {
  accepted: number;
  rejected: { pair_id: string; reason: string }[];
}

export interface WorkerStats {
  worker_id: string;
  labeled_count: number;
  kappa_vs_majority: number | null;
  flagged: boolean;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function raiseForStatus(res: Response): Promise<void> {
  if (res.ok) return;
  let detail = res.statusText;
  try {
    const body = await res.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    /* non-JSON error body; keep the status text */
  }
  throw new ApiError(res.status, detail);
}

export class ApiClient {
  constructor(private base: string = "") {}

  private url(path: string): string {
    return this.base.replace(/\/$/, "") + path;
  }

  async getTasks(worker: string, batch = 10): Promise<Task[]> {
    const params = new URLSearchParams({ worker, batch: String(batch) });
    const res = await fetch(this.url("/api/tasks?" + params));
    await raiseForStatus(res);
    return res.json();
  }

  async postLabels(worker: string, labels: LabelItem[]): Promise<SubmitResult> {
    const res = await fetch(this.url("/api/labels"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ worker, labels }),
    });
    await raiseForStatus(res);
    return res.json();
  }

  async getExport(): Promise<string> {
    const res = await fetch(this.url("/api/export"));
    await raiseForStatus(res);
    return res.text();
  }

  async getWorkerStats(worker: string): Promise<WorkerStats> {
    const res = await fetch(this.url(`/api/workers/${encodeURIComponent(worker)}/stats`));
    await raiseForStatus(res);
    return res.json();
  }
}
