"""Crowd annotation service: 1-original-vs-10-candidates tasks, an
append-only vote log, majority-vote export and worker-kappa gating.

Persistence is two JSONL files in a data directory: tasks.jsonl (the
task definitions) and events.jsonl (the append-only log of label,
worker-registration and reopen events).  The HTTP layer is a thin
FastAPI app over the store.
"""

from __future__ import annotations

import json
import threading
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import corpus, metrics

MAX_WORKERS_PER_TASK = 6
KAPPA_FLAG_THRESHOLD = 0.4
KAPPA_MIN_SHARED = 20


class UnknownWorkerError(KeyError):
    pass


@dataclass(frozen=True)
class AnnotationTask:
    task_id: str
    original: str
    candidates: tuple  # of SentencePair, sharing the original as s1

    def __post_init__(self):
        if not (1 <= len(self.candidates) <= 10):
            raise ValueError("a task needs 1..10 candidates")


@dataclass(frozen=True)
class LabelEvent:
    worker_id: str
    pair_id: str
    label: bool
    timestamp: int


@dataclass
class WorkerStats:
    worker_id: str
    labeled_count: int
    kappa_vs_majority: Optional[float]
    flagged: bool


class AnnotationStore:
    """Single-writer event log with in-memory indexes."""

    def __init__(self, data_dir):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.events_path = self.data_dir / "events.jsonl"
        self.tasks_path = self.data_dir / "tasks.jsonl"
        self._lock = threading.Lock()
        self.tasks = {}
        self.pair_to_task = {}
        self.workers = set()
        self.reopened_workers = set()
        self.labels = {}  # (worker_id, pair_id) -> LabelEvent
        self._load()

    # ----------------------------------------------------------- loading

    def _load(self):
        if self.tasks_path.exists():
            with open(self.tasks_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._index_task(self._task_from_record(json.loads(line)))
        if self.events_path.exists():
            with open(self.events_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._apply(json.loads(line))

    @staticmethod
    def _task_from_record(rec):
        original = rec["original"]
        candidates = tuple(
            corpus.SentencePair(pair_id=c["pair_id"], s1=original,
                                s2=c["text"], url=rec.get("url"))
            for c in rec["candidates"])
        return AnnotationTask(task_id=rec["task_id"], original=original,
                              candidates=candidates)

    def _index_task(self, task):
        self.tasks[task.task_id] = task
        for cand in task.candidates:
            self.pair_to_task[cand.pair_id] = task.task_id

    def _apply(self, rec):
        kind = rec.get("type")
        if kind == "worker":
            self.workers.add(rec["worker_id"])
        elif kind == "label":
            key = (rec["worker_id"], rec["pair_id"])
            if key not in self.labels:
                self.labels[key] = LabelEvent(
                    worker_id=rec["worker_id"], pair_id=rec["pair_id"],
                    label=bool(rec["label"]), timestamp=int(rec["timestamp"]))
        elif kind == "reopen":
            self.reopened_workers.add(rec["worker_id"])

    def _append(self, rec):
        with open(self.events_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            fh.flush()
        self._apply(rec)

    # ------------------------------------------------------------- tasks

    def add_tasks(self, tasks):
        with self._lock:
            with open(self.tasks_path, "a", encoding="utf-8") as fh:
                for task in tasks:
                    rec = {
                        "task_id": task.task_id,
                        "original": task.original,
                        "candidates": [{"pair_id": c.pair_id, "text": c.s2}
                                       for c in task.candidates],
                    }
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")
                    self._index_task(task)

    def register_worker(self, worker_id):
        with self._lock:
            if worker_id not in self.workers:
                self._append({"type": "worker", "worker_id": worker_id})

    def _require_worker(self, worker_id):
        if worker_id not in self.workers:
            raise UnknownWorkerError(worker_id)

    def _task_workers(self, task_id, effective=False):
        """Distinct workers who labeled any pair of the task; with
        `effective`, reopened workers are ignored (capacity freed)."""
        task = self.tasks[task_id]
        pair_ids = {c.pair_id for c in task.candidates}
        out = set()
        for (worker, pair_id) in self.labels:
            if pair_id in pair_ids:
                if effective and worker in self.reopened_workers:
                    continue
                out.add(worker)
        return out

    def next_tasks(self, worker_id, batch=10):
        """Unlabeled tasks for a worker, fewest-workers first, respecting
        the per-task worker cap."""
        self._require_worker(worker_id)
        ranked = []
        for task_id in sorted(self.tasks):
            workers = self._task_workers(task_id, effective=True)
            if worker_id in self._task_workers(task_id):
                continue
            if len(workers) >= MAX_WORKERS_PER_TASK:
                continue
            ranked.append((len(workers), task_id))
        ranked.sort()
        return [self.tasks[tid] for _, tid in ranked[:batch]]

    def submit_labels(self, worker_id, labels, timestamp=None):
        """Append label events; duplicates and unknown pairs are rejected
        per item.  Returns (accepted_count, rejections)."""
        self._require_worker(worker_id)
        ts = int(timestamp if timestamp is not None else time.time())
        accepted = 0
        rejections = []
        with self._lock:
            for pair_id, label in labels:
                if pair_id not in self.pair_to_task:
                    rejections.append((pair_id, "unknown pair_id"))
                    continue
                if (worker_id, pair_id) in self.labels:
                    rejections.append((pair_id, "duplicate label"))
                    continue
                task_id = self.pair_to_task[pair_id]
                workers = self._task_workers(task_id, effective=True)
                if (worker_id not in workers
                        and len(workers) >= MAX_WORKERS_PER_TASK):
                    rejections.append((pair_id, "task already has %d workers"
                                       % MAX_WORKERS_PER_TASK))
                    continue
                self._append({"type": "label", "worker_id": worker_id,
                              "pair_id": pair_id, "label": bool(label),
                              "timestamp": ts})
                accepted += 1
        return accepted, rejections

    # ------------------------------------------------------------ export

    def _votes_by_pair(self, exclude_reopened=True):
        votes = defaultdict(list)
        for (worker, pair_id), ev in self.labels.items():
            if exclude_reopened and worker in self.reopened_workers:
                continue
            votes[pair_id].append(ev.label)
        return votes

    def export_gold(self, pos_min=corpus.DEFAULT_POS_MIN,
                    neg_max=corpus.DEFAULT_NEG_MAX):
        """Aggregate the vote log into a labeled Dataset.

        Pairs with fewer than 6 votes export as debatable: the thresholds
        are defined at 6 votes and are not rescaled.
        """
        votes = self._votes_by_pair()
        pairs = []
        for task_id in sorted(self.tasks):
            for cand in self.tasks[task_id].candidates:
                vs = votes.get(cand.pair_id, [])
                if not vs:
                    continue
                pos, tot = sum(vs), len(vs)
                if tot < 6:
                    gold = corpus.DEBATABLE
                else:
                    gold = corpus.aggregate_votes(pos, tot, pos_min, neg_max)
                pairs.append(corpus.LabeledPair(pair=cand, gold=gold,
                                                positive_votes=pos,
                                                total_votes=tot))
        return corpus.Dataset(name="annotation-export", pairs=pairs)

    # ------------------------------------------------------------ workers

    def worker_kappa(self, worker_id):
        """Kappa of a worker against the majority of the other workers on
        shared pairs (others >= 3 votes with a strict majority)."""
        self._require_worker(worker_id)
        mine = {}
        others = defaultdict(list)
        for (worker, pair_id), ev in self.labels.items():
            if worker == worker_id:
                mine[pair_id] = ev.label
            else:
                others[pair_id].append(ev.label)
        a, b = [], []
        for pair_id, label in mine.items():
            votes = others.get(pair_id, [])
            if len(votes) < 3:
                continue
            pos = sum(votes)
            if 2 * pos == len(votes):
                continue  # no strict majority
            a.append(label)
            b.append(pos * 2 > len(votes))
        kappa = None
        if len(a) >= KAPPA_MIN_SHARED:
            kappa = metrics.cohen_kappa(a, b)
        return WorkerStats(
            worker_id=worker_id,
            labeled_count=len(mine),
            kappa_vs_majority=kappa,
            flagged=kappa is not None and kappa < KAPPA_FLAG_THRESHOLD,
        )

    def reopen_worker(self, worker_id):
        """Void a worker's labels for aggregation and task capacity.

        The raw event log is untouched; the pair's total distinct-worker
        count (over all events) never decreases.
        """
        self._require_worker(worker_id)
        with self._lock:
            if worker_id not in self.reopened_workers:
                self._append({"type": "reopen", "worker_id": worker_id})


# -------------------------------------------------------------- HTTP layer

def create_app(store):
    from fastapi import FastAPI, HTTPException
    from fastapi.responses import PlainTextResponse
    from fastapi.staticfiles import StaticFiles

    app = FastAPI(title="paramine annotation service")

    def require_worker(worker):
        if worker not in store.workers:
            raise HTTPException(status_code=401,
                                detail="unknown worker %r" % worker)

    @app.get("/api/tasks")
    def get_tasks(worker: str, batch: int = 10):
        require_worker(worker)
        tasks = store.next_tasks(worker, batch=batch)
        return [{
            "task_id": t.task_id,
            "original": t.original,
            "candidates": [{"pair_id": c.pair_id, "text": c.s2}
                           for c in t.candidates],
        } for t in tasks]

    @app.post("/api/labels")
    def post_labels(payload: dict):
        worker = payload.get("worker")
        require_worker(worker)
        labels = [(item["pair_id"], bool(item["label"]))
                  for item in payload.get("labels", [])]
        accepted, rejections = store.submit_labels(worker, labels)
        return {"accepted": accepted,
                "rejected": [{"pair_id": p, "reason": r}
                             for p, r in rejections]}

    @app.get("/api/export", response_class=PlainTextResponse)
    def get_export(pos_min: int = corpus.DEFAULT_POS_MIN,
                   neg_max: int = corpus.DEFAULT_NEG_MAX):
        dataset = store.export_gold(pos_min=pos_min, neg_max=neg_max)
        lines = []
        for lp in dataset.pairs:
            lines.append("%s\t%s\t(%d, %d)" % (
                lp.pair.s1.replace("\t", " "), lp.pair.s2.replace("\t", " "),
                lp.positive_votes, lp.total_votes))
        return "\n".join(lines) + ("\n" if lines else "")

    @app.get("/api/workers/{worker}/stats")
    def get_worker_stats(worker: str):
        require_worker(worker)
        stats = store.worker_kappa(worker)
        return {
            "worker_id": stats.worker_id,
            "labeled_count": stats.labeled_count,
            "kappa_vs_majority": stats.kappa_vs_majority,
            "flagged": stats.flagged,
        }

    static_dir = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
    if static_dir.is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="ui")
    return app


def load_tasks_jsonl(path):
    tasks = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                tasks.append(AnnotationStore._task_from_record(json.loads(line)))
    return tasks
