/** Typed client for the gridsolve HTTP/JSON API. */

export interface CellDoc {
  formula: string;
  pinned: string | null;
}

export interface SheetDoc {
  name: string;
  cells: Record<string, CellDoc>;
}

export interface MapTableDoc {
  name: string;
  entries: [string, number][];
}

export interface FactTableDoc {
  name: string;
  arity: number;
  rows: (string | number)[][];
}

export interface WorkbookDoc {
  version: number;
  sheets: SheetDoc[];
  map_tables: MapTableDoc[];
  fact_tables: FactTableDoc[];
}

export type ViewMode = "constraints" | "solution";

export interface WorkbookState {
  id: string;
  revision: number;
  view_mode: ViewMode;
  workbook: WorkbookDoc;
  solution: Record<string, string> | null;
}

export type JobStatus = "running" | "sat" | "unsat" | "timeout" | "error";

export interface JobInfo {
  status: JobStatus;
  solution_count: number;
  stale: boolean;
  error?: string;
}

export interface NextReply {
  solution?: Record<string, string>;
  exhausted?: boolean;
  timeout?: boolean;
  position: number;
}

export interface SolveConfig {
  var_order?: "first_fail" | "input_order";
  max_solutions?: number;
  timeout_ms?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: { code?: string; message?: string; cell?: string; position?: number },
  ) {
    super(body.message ?? `request failed with ${status}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    const text = await response.text();
    const parsed = text ? safeJson(text) : null;
    if (!response.ok) {
      throw new ApiError(response.status, parsed ?? { message: text });
    }
    return parsed as T;
  }

  listSamples(): Promise<{ samples: string[] }> {
    return this.request("GET", "/samples");
  }

  loadSample(name: string): Promise<{ id: string; revision: number }> {
    return this.request("POST", `/workbooks/from-sample/${name}`);
  }

  uploadWorkbook(doc: WorkbookDoc): Promise<{ id: string; revision: number }> {
    return this.request("POST", "/workbooks", doc);
  }

  getWorkbook(id: string): Promise<WorkbookState> {
    return this.request("GET", `/workbooks/${id}`);
  }

  setFormula(id: string, addr: string, formula: string): Promise<{ revision: number }> {
    return this.request("PATCH", `/workbooks/${id}/cells/${addr}`, { formula });
  }

  setPinned(id: string, addr: string, pinned: string | null): Promise<{ revision: number }> {
    return this.request("PATCH", `/workbooks/${id}/cells/${addr}`, { pinned });
  }

  copy(
    id: string,
    src: string,
    dstRange: string,
    mode: "all_append" | "one_append" = "all_append",
    index = 0,
  ): Promise<{ revision: number }> {
    return this.request("POST", `/workbooks/${id}/copy`, {
      src,
      dst_range: dstRange,
      mode,
      index,
    });
  }

  solve(id: string, config: SolveConfig = {}): Promise<{ job_id: string }> {
    return this.request("POST", `/workbooks/${id}/solve`, config);
  }

  jobStatus(jobId: string): Promise<JobInfo> {
    return this.request("GET", `/jobs/${jobId}`);
  }

  nextSolution(jobId: string): Promise<NextReply> {
    return this.request("POST", `/jobs/${jobId}/next`);
  }

  setView(id: string, mode: ViewMode): Promise<{ revision: number }> {
    return this.request("POST", `/workbooks/${id}/view`, { mode });
  }

  async exportClpfd(id: string): Promise<string> {
    const response = await this.fetchFn(`${this.base}/workbooks/${id}/export/clpfd`, {
      method: "GET",
    });
    if (!response.ok) {
      throw new ApiError(response.status, { message: await response.text() });
    }
    return response.text();
  }
}

function safeJson(text: string): any {
  try {
    return JSON.parse(text);
  } catch {
    return null;
  }
}
