/** Browser entry point: wires the session state to the DOM and the API.
 * Submits are optimistic — the next task renders immediately and a
 * failure rolls the queue back with a retry banner. */

import { ApiClient, ApiError, type LabelItem, type SubmitResult } from "./api.js";
import { Session } from "./state.js";

const api = new ApiClient("");
const session = new Session();

const el = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
};

function workerId(): string | null {
  return localStorage.getItem("paramine.worker");
}

function showBanner(message: string, retry?: () => void): void {
  const banner = el("banner");
  banner.textContent = message;
  banner.classList.remove("hidden");
  if (retry) {
    const button = document.createElement("button");
    button.textContent = "Retry";
    button.addEventListener("click", () => {
      banner.classList.add("hidden");
      retry();
    });
    banner.appendChild(button);
  }
}

function hideBanner(): void {
  el("banner").classList.add("hidden");
}

function showItemErrors(result: SubmitResult): void {
  const list = el("item-errors");
  list.innerHTML = "";
  for (const item of result.rejected) {
    const li = document.createElement("li");
    li.textContent = `${item.pair_id}: ${item.reason}`;
    list.appendChild(li);
  }
  list.classList.toggle("hidden", result.rejected.length === 0);
}

function render(): void {
  const task = session.current();
  el("login").classList.toggle("hidden", workerId() !== null);
  el("task").classList.toggle("hidden", !workerId() || task === null);
  el("done").classList.toggle("hidden", !workerId() || task !== null);
  el("remaining").textContent = String(session.remaining());
  if (!task) return;
  el("original").textContent = task.original;
  const list = el("candidates");
  list.innerHTML = "";
  task.candidates.forEach((cand, i) => {
    const li = document.createElement("li");
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = session.isChecked(cand.pair_id);
    box.addEventListener("change", () => session.toggle(i + 1));
    label.appendChild(box);
    label.appendChild(
      document.createTextNode(` [${(i + 1) % 10}] ${cand.text}`),
    );
    li.appendChild(label);
    list.appendChild(li);
  });
}

async function refreshTasks(): Promise<void> {
  const worker = workerId();
  if (!worker) return;
  try {
    session.loadTasks(await api.getTasks(worker, 10));
    hideBanner();
  } catch (err) {
    if (err instanceof ApiError && err.status === 401) {
      localStorage.removeItem("paramine.worker");
      showBanner("Unknown worker id — sign in again.");
    } else {
      showBanner("Could not load tasks.", () => void refreshTasks());
    }
  }
  render();
}

async function submitCurrent(): Promise<void> {
  const worker = workerId();
  const task = session.current();
  if (!worker || !task) return;
  const labels: LabelItem[] = session.labelsForCurrent();
  if (!session.beginSubmit()) return;
  render(); // optimistic: show the next task right away
  try {
    const result = await api.postLabels(worker, labels);
    showItemErrors(result);
    if (session.isComplete()) await refreshTasks();
  } catch (err) {
    session.rollback(task.task_id, labels);
    const why =
      err instanceof ApiError && err.status === 503
        ? "Service unavailable (503)."
        : "Submission failed.";
    showBanner(`${why} Your answers for this task were kept.`, () =>
      void submitCurrent(),
    );
    render();
  }
}

function init(): void {
  el("login-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const input = el("worker-input") as HTMLInputElement;
    const id = input.value.trim();
    if (!id) return;
    localStorage.setItem("paramine.worker", id);
    void refreshTasks();
  });
  el("submit").addEventListener("click", () => void submitCurrent());
  document.addEventListener("keydown", (ev) => {
    if ((ev.target as HTMLElement)?.tagName === "INPUT" &&
        (ev.target as HTMLInputElement).type === "text") return;
    const action = session.keyAction(ev.key);
    if (action.kind === "toggle" && session.toggle(action.index)) render();
    else if (action.kind === "submit") void submitCurrent();
  });
  void refreshTasks();
  render();
}

document.addEventListener("DOMContentLoaded", init);
