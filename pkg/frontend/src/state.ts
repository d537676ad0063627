/** Pure session state for the annotation UI: the task queue, checkbox
 * selections, keyboard handling and submit de-duplication.  No DOM or
 * network access here, so it is unit-testable on its own. */

import type { LabelItem, Task } from "./api.js";

export type KeyAction =
  | { kind: "toggle"; index: number }
  | { kind: "submit" }
  | { kind: "none" };

export class Session {
  private tasks: Task[] = [];
  private cursor = 0;
  /** pair_ids currently checked as paraphrases on the visible task */
  private checked = new Set<string>();
  /** task_ids already submitted in this session (or rolled back from) */
  private submitted = new Set<string>();

  loadTasks(tasks: Task[]): void {
    this.tasks = tasks.filter((t) => !this.submitted.has(t.task_id));
    this.cursor = 0;
    this.checked.clear();
  }

  current(): Task | null {
    return this.cursor < this.tasks.length ? this.tasks[this.cursor] : null;
  }

  remaining(): number {
    return Math.max(0, this.tasks.length - this.cursor);
  }

  isComplete(): boolean {
    return this.current() === null;
  }

  isChecked(pairId: string): boolean {
    return this.checked.has(pairId);
  }

  /** Toggle the i-th candidate (1-based, as on the number keys). */
  toggle(index: number): boolean {
    const task = this.current();
    if (!task || index < 1 || index > task.candidates.length) return false;
    const id = task.candidates[index - 1].pair_id;
    if (this.checked.has(id)) this.checked.delete(id);
    else this.checked.add(id);
    return true;
  }

  /** Map a keyboard key to an action: 1-9 and 0 toggle candidates
   * (0 means the tenth), Enter submits. */
  keyAction(key: string): KeyAction {
    if (key === "Enter") return { kind: "submit" };
    if (/^[0-9]$/.test(key)) {
      const index = key === "0" ? 10 : Number(key);
      return { kind: "toggle", index };
    }
    return { kind: "none" };
  }

  /** One label per candidate of the current task, checked = paraphrase. */
  labelsForCurrent(): LabelItem[] {
    const task = this.current();
    if (!task) return [];
    return task.candidates.map((c) => ({
      pair_id: c.pair_id,
      label: this.checked.has(c.pair_id),
    }));
  }

  /** Mark the current task submitted and advance.  Returns false (and
   * does nothing) when the task was already submitted, so a double
   * Enter or a retried click cannot send the same task twice. */
  beginSubmit(): boolean {
    const task = this.current();
    if (!task || this.submitted.has(task.task_id)) return false;
    this.submitted.add(task.task_id);
    this.cursor += 1;
    this.checked.clear();
    return true;
  }

  /** Undo a failed optimistic submit: restore the task and its
   * checkbox state so the worker can retry. */
  rollback(taskId: string, labels: LabelItem[]): void {
    if (!this.submitted.has(taskId)) return;
    this.submitted.delete(taskId);
    const index = this.tasks.findIndex((t) => t.task_id === taskId);
    if (index >= 0 && index < this.cursor) this.cursor = index;
    this.checked = new Set(labels.filter((l) => l.label).map((l) => l.pair_id));
  }

  hasSubmitted(taskId: string): boolean {
    return this.submitted.has(taskId);
  }
}
