"""Batch-job HTTP service over the compute pipeline.

Endpoints::

    POST /api/v1/jobs               multipart: graph (file), config (JSON) -> 202 {id, state}
    GET  /api/v1/jobs/{id}          job record
    GET  /api/v1/jobs/{id}/result   zip of the files ``glocal compute`` writes (409 until done)
    POST /api/v1/convert            multipart: file, from, to [, name, dtype] -> converted bytes

Jobs live under ``<data_dir>/jobs/<id>/``; records and results are written
atomically (temp file or directory, then rename). Settings come from the
``create_app`` arguments or the environment: ``GLOCAL_LISTEN`` (host:port),
``GLOCAL_DATA_DIR``, ``GLOCAL_WORKERS``, ``GLOCAL_MAX_PAYLOAD``.
"""

from __future__ import annotations

import contextlib
import datetime as dt
import hashlib
import io
import itertools
import json
import logging
import os
import shutil
import tempfile
import threading
import zipfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from fastapi import FastAPI, File, Form, HTTPException, Request, UploadFile
from fastapi.responses import JSONResponse, Response

from . import io_formats, pipeline
from .errors import ConvergenceError, GlocalError, InputError

log = logging.getLogger(__name__)

QUEUED, RUNNING, DONE, FAILED = "queued", "running", "done", "failed"
TRANSITIONS = {QUEUED: {RUNNING}, RUNNING: {DONE, FAILED}, DONE: set(), FAILED: set()}
DEFAULT_MAX_PAYLOAD = 256 * 1024 * 1024


class TransitionError(GlocalError):
    pass


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat()


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class JobRecord:
    id: str
    state: str
    submitted_at: str
    config: dict
    history: list = field(default_factory=list)
    started_at: str | None = None
    finished_at: str | None = None
    error: str | None = None
    timings: dict | None = None
    files: list | None = None

    def advance(self, new_state: str) -> None:
        if new_state not in TRANSITIONS[self.state]:
            raise TransitionError(f"job {self.id}: illegal transition {self.state} -> {new_state}")
        self.state = new_state
        self.history.append(new_state)

    def view(self) -> dict:
        return asdict(self)


class JobStore:
    """Persists jobs on disk and runs them on a bounded FIFO thread pool."""

    def __init__(self, data_dir, workers: int | None = None):
        self.root = Path(data_dir) / "jobs"
        self.root.mkdir(parents=True, exist_ok=True)
        self.workers = workers or os.cpu_count() or 1
        self._executor = ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix="glocal-job")
        self._records: dict[str, JobRecord] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._lock = threading.Lock()
        # cleared by tests to hold jobs in the queue
        self.gate = threading.Event()
        self.gate.set()
        self._closing = False
        self._running = 0
        self.max_running_seen = 0
        self._counter = itertools.count(self._recover() + 1)

    def _recover(self) -> int:
        count = 0
        requeue = []
        for rec_path in sorted(self.root.glob("*/record.json")):
            count += 1
            rec = JobRecord(**json.loads(rec_path.read_text()))
            if rec.state == RUNNING:
                rec.advance(FAILED)
                rec.error = "interrupted: service restarted while running"
                rec.finished_at = _now()
            self._records[rec.id] = rec
            self._locks[rec.id] = threading.Lock()
            self._persist(rec)
            if rec.state == QUEUED:
                requeue.append(rec)
        for rec in sorted(requeue, key=lambda r: r.submitted_at):
            self._executor.submit(self._run, rec.id)
        return count

    def _job_dir(self, job_id: str) -> Path:
        return self.root / job_id

    def _persist(self, rec: JobRecord) -> None:
        _atomic_write(self._job_dir(rec.id) / "record.json",
                      json.dumps(rec.view(), indent=2, sort_keys=True).encode())

    def submit(self, payload: bytes, config: pipeline.RunConfig) -> JobRecord:
        cfg = config.to_dict()
        digest = hashlib.sha256(payload + json.dumps(cfg, sort_keys=True).encode()).hexdigest()
        with self._lock:
            job_id = f"{digest[:12]}-{next(self._counter):06d}"
            job_dir = self._job_dir(job_id)
            job_dir.mkdir()
            _atomic_write(job_dir / "graph.bin", payload)
            rec = JobRecord(job_id, QUEUED, _now(), cfg, history=[QUEUED])
            self._records[job_id] = rec
            self._locks[job_id] = threading.Lock()
            self._persist(rec)
        self._executor.submit(self._run, job_id)
        return rec

    def get(self, job_id: str) -> JobRecord | None:
        return self._records.get(job_id)

    def _update(self, job_id: str, fn) -> None:
        with self._locks[job_id]:
            rec = self._records[job_id]
            fn(rec)
            self._persist(rec)

    def _run(self, job_id: str) -> None:
        self.gate.wait()
        with self._lock:
            if self._closing:
                # left queued on disk; picked up again on the next start
                return
            self._running += 1
            self.max_running_seen = max(self.max_running_seen, self._running)

        def start(rec):
            rec.advance(RUNNING)
            rec.started_at = _now()

        try:
            self._update(job_id, start)
            self._execute(job_id)
        finally:
            with self._lock:
                self._running -= 1

    def _execute(self, job_id: str) -> None:
        try:
            rec = self._records[job_id]
            config = pipeline.RunConfig.from_dict(rec.config)
            payload = (self._job_dir(job_id) / "graph.bin").read_bytes()
            result = pipeline.run(payload, config)
            files = pipeline.render_files(result, config)
            self._publish(job_id, files)
        except Exception as exc:
            kind = ("convergence" if isinstance(exc, ConvergenceError)
                    else "input" if isinstance(exc, InputError) else "internal")
            log.warning("job %s failed: %s", job_id, exc)

            def fail(rec):
                rec.advance(FAILED)
                rec.error = f"{kind}: {exc}"
                rec.finished_at = _now()

            self._update(job_id, fail)
        else:
            def done(rec):
                rec.advance(DONE)
                rec.finished_at = _now()
                rec.timings = result.bundle.timings
                rec.files = sorted(files)

            self._update(job_id, done)

    def _publish(self, job_id: str, files: dict[str, bytes]) -> None:
        job_dir = self._job_dir(job_id)
        tmp = Path(tempfile.mkdtemp(dir=job_dir, prefix=".result."))
        try:
            for name, data in files.items():
                (tmp / name).write_bytes(data)
            os.replace(tmp, job_dir / "result")
        except BaseException:
            shutil.rmtree(tmp, ignore_errors=True)
            raise

    def result_archive(self, job_id: str) -> bytes:
        result_dir = self._job_dir(job_id) / "result"
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
            for path in sorted(result_dir.iterdir()):
                zf.write(path, arcname=path.name)
        return buf.getvalue()

    def shutdown(self, wait: bool = True) -> None:
        with self._lock:
            self._closing = True
        self.gate.set()
        self._executor.shutdown(wait=wait, cancel_futures=True)


def _int_env(name, default):
    value = os.environ.get(name)
    return int(value) if value else default


def create_app(data_dir=None, workers: int | None = None, max_payload: int | None = None) -> FastAPI:
    data_dir = data_dir or os.environ.get("GLOCAL_DATA_DIR", "./glocal-data")
    workers = workers or _int_env("GLOCAL_WORKERS", None)
    max_payload = max_payload or _int_env("GLOCAL_MAX_PAYLOAD", DEFAULT_MAX_PAYLOAD)

    store = JobStore(data_dir, workers)

    @contextlib.asynccontextmanager
    async def lifespan(_app):
        yield
        store.shutdown(wait=False)

    app = FastAPI(title="glocal invariants service", version="1", lifespan=lifespan)
    app.state.store = store
    app.state.max_payload = max_payload

    def _check_length(request: Request):
        length = request.headers.get("content-length")
        if length is not None and int(length) > max_payload + 64 * 1024:
            raise HTTPException(413, f"payload exceeds {max_payload} bytes")

    async def _read_limited(upload: UploadFile) -> bytes:
        data = await upload.read(max_payload + 1)
        if len(data) > max_payload:
            raise HTTPException(413, f"payload exceeds {max_payload} bytes")
        return data

    @app.post("/api/v1/jobs", status_code=202)
    async def submit_job(request: Request, graph: UploadFile = File(...), config: str = Form("{}")):
        _check_length(request)
        payload = await _read_limited(graph)
        try:
            doc = json.loads(config)
            run_config = pipeline.RunConfig.from_dict(doc)
            # reject unparseable graphs before enqueueing
            io_formats.read_graph(payload, run_config.input_format)
        except json.JSONDecodeError as exc:
            raise HTTPException(400, f"config is not valid JSON: {exc}") from None
        except InputError as exc:
            raise HTTPException(400, str(exc)) from None
        rec = store.submit(payload, run_config)
        # the worker may already have picked it up; the submit contract reports queued
        return {"id": rec.id, "state": QUEUED}

    @app.get("/api/v1/jobs/{job_id}")
    def get_status(job_id: str):
        rec = store.get(job_id)
        if rec is None:
            raise HTTPException(404, f"unknown job {job_id}")
        return rec.view()

    @app.get("/api/v1/jobs/{job_id}/result")
    def get_result(job_id: str):
        rec = store.get(job_id)
        if rec is None:
            raise HTTPException(404, f"unknown job {job_id}")
        if rec.state != DONE:
            return JSONResponse(status_code=409, content={
                "detail": f"job is {rec.state}", "state": rec.state, "error": rec.error})
        return Response(store.result_archive(job_id), media_type="application/zip",
                        headers={"Content-Disposition": f'attachment; filename="{job_id}.zip"'})

    @app.post("/api/v1/convert")
    async def convert(
        request: Request,
        file: UploadFile = File(...),
        src: str = Form(..., alias="from"),
        dst: str = Form(..., alias="to"),
        name: str = Form("value"),
        dtype: str | None = Form(None),
    ):
        _check_length(request)
        payload = await _read_limited(file)
        try:
            out = io_formats.convert_bytes(payload, src, dst, name=name, dtype=dtype)
        except InputError as exc:
            raise HTTPException(400, str(exc)) from None
        return Response(out, media_type="application/octet-stream")

    return app


def main(argv=None) -> int:
    import argparse

    import uvicorn

    listen = os.environ.get("GLOCAL_LISTEN", "127.0.0.1:8000")
    host, _, port = listen.rpartition(":")
    p = argparse.ArgumentParser(prog="glocal-service")
    p.add_argument("--host", default=host or "127.0.0.1")
    p.add_argument("--port", type=int, default=int(port))
    p.add_argument("--data-dir", default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--max-payload", type=int, default=None)
    args = p.parse_args(argv)
    app = create_app(args.data_dir, args.workers, args.max_payload)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
