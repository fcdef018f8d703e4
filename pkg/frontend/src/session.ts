/** Per-tab analyst session: seeds, last response, selection, history.
 *
 * History is append-only; back-navigation moves a cursor without deleting
 * entries. The selection is always a subset of the vertices of the last
 * response's community map (or of the ranked ids when no map was asked
 * for), so promoted seeds always exist on the server.
 */

import type { QueryRequest, QueryResponse } from "./types.js";

export interface HistoryEntry {
  request: QueryRequest;
  response: QueryResponse;
}

export class Session {
  private history: HistoryEntry[] = [];
  private cursor = -1; // index into history of the state being shown
  private selection = new Set<number>();

  get currentRequest(): QueryRequest | null {
    return this.cursor >= 0 ? this.history[this.cursor].request : null;
  }

  get currentResponse(): QueryResponse | null {
    return this.cursor >= 0 ? this.history[this.cursor].response : null;
  }

  get currentSeeds(): number[] {
    return this.currentRequest ? [...this.currentRequest.seeds] : [];
  }

  get selectedIds(): number[] {
    return [...this.selection].sort((a, b) => a - b);
  }

  get historyLength(): number {
    return this.history.length;
  }

  get canGoBack(): boolean {
    return this.cursor > 0;
  }

  /** Ids that may be selected: vertices of the shown map, else ranked ids. */
  selectableIds(): Set<number> {
    const response = this.currentResponse;
    if (!response) return new Set();
    if (response.community) return new Set(response.community.vertices);
    return new Set(response.ranked.map((e) => e.id));
  }

  /** Record a completed query; drops any selection not present in it. */
  apply(request: QueryRequest, response: QueryResponse): void {
    this.history.push({ request, response });
    this.cursor = this.history.length - 1;
    const allowed = this.selectableIds();
    this.selection = new Set([...this.selection].filter((id) => allowed.has(id)));
  }

  toggleSelection(id: number): boolean {
    if (!this.selectableIds().has(id)) return false;
    if (this.selection.has(id)) {
      this.selection.delete(id);
    } else {
      this.selection.add(id);
    }
    return true;
  }

  clearSelection(): void {
    this.selection.clear();
  }

  /** Next request: current seeds plus the selection, duplicate-free.
   * Returns null when nothing is selected (the action is disabled). */
  promoteSelectionToSeeds(): QueryRequest | null {
    const request = this.currentRequest;
    if (!request || this.selection.size === 0) return null;
    const seeds = [...request.seeds];
    for (const id of this.selectedIds) {
      if (!seeds.includes(id)) seeds.push(id);
    }
    return { ...request, seeds };
  }

  /** Step the cursor back one entry; history itself is untouched. */
  back(): HistoryEntry | null {
    if (!this.canGoBack) return null;
    this.cursor -= 1;
    this.selection.clear();
    return this.history[this.cursor];
  }
}
