/** Grid view state and the actions that drive it through the service API.
 *
 * The controller is a pure client: every state change round-trips through
 * the HTTP API, and a fresh controller rebuilds identical state from the
 * GET endpoints alone.
 */

import { Addr, Selection, addrText, singleCell } from "./addr.js";
import { ApiError, Client, JobStatus, SolveConfig, ViewMode, WorkbookDoc } from "./api.js";

export type JobPhase = JobStatus | "idle";

export interface GridViewState {
  workbookId: string | null;
  revision: number;
  viewMode: ViewMode;
  doc: WorkbookDoc | null;
  /** current solution overlay, addr -> display value */
  solution: Record<string, string> | null;
  selection: Selection;
  jobId: string | null;
  jobPhase: JobPhase;
  jobStale: boolean;
  solutionCount: number;
  cursorPosition: number;
  exhausted: boolean;
  /** cells edited since the last solve started */
  dirty: Record<string, boolean>;
  solveStartedAt: number | null;
  elapsedMs: number;
  banner: string | null;
  lastError: string | null;
}

function initialState(): GridViewState {
  return {
    workbookId: null,
    revision: 0,
    viewMode: "constraints",
    doc: null,
    solution: null,
    selection: singleCell({ col: 2, row: 2 }),
    jobId: null,
    jobPhase: "idle",
    jobStale: false,
    solutionCount: 0,
    cursorPosition: -1,
    exhausted: false,
    dirty: {},
    solveStartedAt: null,
    elapsedMs: 0,
    banner: null,
    lastError: null,
  };
}

export interface ControllerOptions {
  pollIntervalMs?: number;
  now?: () => number;
}

export class GridController {
  readonly api: Client;
  state: GridViewState = initialState();
  onChange: ((state: GridViewState) => void) | null = null;

  private pollIntervalMs: number;
  private now: () => number;
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(api: Client, options: ControllerOptions = {}) {
    this.api = api;
    this.pollIntervalMs = options.pollIntervalMs ?? 1000;
    this.now = options.now ?? (() => Date.now());
  }

  private emit() {
    this.onChange?.(this.state);
  }

  private update(patch: Partial<GridViewState>) {
    this.state = { ...this.state, ...patch };
    this.emit();
  }

  // -- workbook loading ----------------------------------------------------

  async loadSample(name: string): Promise<void> {
    const { id } = await this.api.loadSample(name);
    await this.openWorkbook(id);
  }

  async openWorkbook(id: string): Promise<void> {
    this.stopPolling();
    const remote = await this.api.getWorkbook(id);
    this.state = {
      ...initialState(),
      workbookId: remote.id,
      revision: remote.revision,
      viewMode: remote.view_mode,
      doc: remote.workbook,
      solution: remote.solution,
    };
    this.emit();
  }

  /** Re-fetch the grid; server state wins. */
  async refresh(): Promise<void> {
    if (!this.state.workbookId) return;
    const remote = await this.api.getWorkbook(this.state.workbookId);
    this.update({
      revision: remote.revision,
      viewMode: remote.view_mode,
      doc: remote.workbook,
      solution: remote.solution,
    });
  }

  // -- grid reads ----------------------------------------------------------

  cellDoc(addr: Addr) {
    const key = addrText(addr);
    return this.state.doc?.sheets[0]?.cells[key] ?? null;
  }

  /** What the cell shows in the current view mode. */
  cellText(addr: Addr): string {
    const key = addrText(addr);
    if (this.state.viewMode === "solution") {
      return this.state.solution?.[key] ?? "";
    }
    const cell = this.cellDoc(addr);
    if (!cell) return "";
    if (cell.pinned !== null && !cell.formula) return cell.pinned;
    return cell.formula;
  }

  formulaBarText(): string {
    const cell = this.cellDoc(this.state.selection.anchor);
    return cell?.formula ?? "";
  }

  pinnedText(addr: Addr): string | null {
    return this.cellDoc(addr)?.pinned ?? null;
  }

  /** Symbols from every map table, for autocomplete. */
  knownSymbols(): string[] {
    const out: string[] = [];
    for (const table of this.state.doc?.map_tables ?? []) {
      for (const [symbol] of table.entries) out.push(symbol);
    }
    return out;
  }

  select(selection: Selection) {
    this.update({ selection });
  }

  // -- edits ---------------------------------------------------------------

  private requireWorkbook(): string {
    const id = this.state.workbookId;
    if (!id) throw new Error("no workbook open");
    return id;
  }

  private markDirty(addr: string) {
    this.state.dirty = { ...this.state.dirty, [addr]: true };
  }

  async setFormula(addr: Addr, formula: string): Promise<boolean> {
    const id = this.requireWorkbook();
    const key = addrText(addr);
    try {
      const { revision } = await this.api.setFormula(id, key, formula);
      this.markDirty(key);
      this.update({ revision, lastError: null });
      await this.refresh();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        const at = err.body.position !== undefined ? ` at ${err.body.position}` : "";
        this.update({ lastError: `${key}: ${err.body.message ?? "rejected"}${at}` });
        return false;
      }
      throw err;
    }
  }

  async setPinned(addr: Addr, value: string | null): Promise<boolean> {
    const id = this.requireWorkbook();
    const key = addrText(addr);
    try {
      const { revision } = await this.api.setPinned(id, key, value);
      this.markDirty(key);
      this.update({ revision, lastError: null });
      await this.refresh();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.update({ lastError: `${key}: ${err.body.message ?? "rejected"}` });
        return false;
      }
      throw err;
    }
  }

  /** Append builder output to the anchor cell of the selection. */
  async applyBuilder(built: string): Promise<boolean> {
    const anchor = this.state.selection.anchor;
    const existing = this.cellDoc(anchor)?.formula ?? "";
    const text = existing ? `${existing};${built}` : built;
    return this.setFormula(anchor, text);
  }

  async copyCell(
    src: Addr,
    dstRange: string,
    mode: "all_append" | "one_append" = "all_append",
    index = 0,
  ): Promise<boolean> {
    const id = this.requireWorkbook();
    try {
      const { revision } = await this.api.copy(id, addrText(src), dstRange, mode, index);
      this.update({ revision, lastError: null });
      await this.refresh();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.update({ lastError: err.body.message ?? "copy rejected" });
        return false;
      }
      throw err;
    }
  }

  // -- solve lifecycle -------------------------------------------------------

  async solve(config: SolveConfig = {}): Promise<boolean> {
    const id = this.requireWorkbook();
    try {
      const { job_id } = await this.api.solve(id, config);
      this.update({
        jobId: job_id,
        jobPhase: "running",
        jobStale: false,
        solutionCount: 0,
        cursorPosition: -1,
        exhausted: false,
        dirty: {},
        solveStartedAt: this.now(),
        elapsedMs: 0,
        banner: null,
        lastError: null,
      });
      this.startPolling();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        const cell = err.body.cell ? ` (${err.body.cell})` : "";
        this.update({ lastError: `${err.body.message ?? "solve rejected"}${cell}` });
        return false;
      }
      throw err;
    }
  }

  /** One status poll; the browser calls this on a 1 s interval. */
  async pollOnce(): Promise<void> {
    const jobId = this.state.jobId;
    if (!jobId || this.state.jobPhase !== "running") return;
    const info = await this.api.jobStatus(jobId);
    const elapsed = this.state.solveStartedAt ? this.now() - this.state.solveStartedAt : 0;
    if (info.status === "running") {
      this.update({ elapsedMs: elapsed, jobStale: info.stale });
      return;
    }
    this.stopPolling();
    if (info.status === "sat") {
      this.update({
        jobPhase: "sat",
        jobStale: info.stale,
        solutionCount: info.solution_count,
        elapsedMs: elapsed,
        banner: info.stale ? "constraints changed while solving; results may be stale" : null,
      });
      // show the first solution right away
      await this.nextSolution();
    } else if (info.status === "unsat") {
      this.update({
        jobPhase: "unsat",
        elapsedMs: elapsed,
        banner: "no solution; relax some constraints and solve again",
      });
    } else {
      this.update({
        jobPhase: info.status,
        elapsedMs: elapsed,
        banner:
          info.status === "timeout"
            ? "solver hit its time budget; simplify or raise the timeout"
            : info.error ?? "solver error",
      });
    }
  }

  startPolling() {
    if (this.pollTimer !== null) return;
    this.pollTimer = setInterval(() => {
      void this.pollOnce().catch(() => undefined);
    }, this.pollIntervalMs);
  }

  stopPolling() {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  /** Advance the solution cursor; switches the grid to solution view. */
  async nextSolution(): Promise<void> {
    const jobId = this.state.jobId;
    const id = this.requireWorkbook();
    if (!jobId) return;
    const reply = await this.api.nextSolution(jobId);
    if (reply.solution) {
      await this.api.setView(id, "solution");
      this.update({
        solution: reply.solution,
        cursorPosition: reply.position,
        solutionCount: Math.max(this.state.solutionCount, reply.position + 1),
        viewMode: "solution",
        banner: this.state.jobStale
          ? "constraints changed while solving; results may be stale"
          : null,
      });
    } else if (reply.exhausted) {
      this.update({ exhausted: true, banner: "all solutions shown (exhausted)" });
    } else if (reply.timeout) {
      this.update({ banner: "searching for the next solution timed out; try again" });
    }
  }

  /** Toggle between the solution overlay and the original constraints. */
  async switchView(): Promise<void> {
    const id = this.requireWorkbook();
    const mode: ViewMode = this.state.viewMode === "solution" ? "constraints" : "solution";
    await this.api.setView(id, mode);
    await this.refresh();
    this.update({ viewMode: mode });
  }

  async exportProgram(): Promise<string> {
    return this.api.exportClpfd(this.requireWorkbook());
  }

  // -- tables ----------------------------------------------------------------

  /** Replace the workbook's tables by re-uploading the document. The API
   * has no table endpoints, so table edits round-trip through upload. */
  async replaceTables(
    mapTables: WorkbookDoc["map_tables"],
    factTables: WorkbookDoc["fact_tables"],
  ): Promise<boolean> {
    const doc = this.state.doc;
    if (!doc) return false;
    const next: WorkbookDoc = { ...doc, map_tables: mapTables, fact_tables: factTables };
    try {
      const { id } = await this.api.uploadWorkbook(next);
      await this.openWorkbook(id);
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.update({ lastError: err.body.message ?? "table update rejected" });
        return false;
      }
      throw err;
    }
  }
}
