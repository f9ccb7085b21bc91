"""Oracle contract and implementations: ground-truth simulation and an
interactive HTTP labeling service for the human expert."""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Protocol

from .model import Label, Window
from .query import QuerySelection


@dataclass(frozen=True)
class QuerySample:
    id: int
    features: dict[str, float]  # standardized values keyed by feature name
    outlier_score: float
    uncertainty: float
    source: str  # outlierness | uncertainty | both
    family_hint: str | None = None  # ground-truth family when available, UI hint only


@dataclass(frozen=True)
class OracleRequest:
    request_id: str
    window_index: int
    samples: tuple[QuerySample, ...]

    def __post_init__(self):
        if not self.samples:
            raise ValueError("oracle request must contain at least one sample")
        ids = [s.id for s in self.samples]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate sample ids in oracle request")


@dataclass(frozen=True)
class OracleResponse:
    labels: dict[int, Label]
    responder: str  # simulated | human
    timestamp: float


class OracleError(RuntimeError):
    pass


class Oracle(Protocol):
    def resolve(self, request: OracleRequest) -> OracleResponse: ...


def build_request(
    selection: QuerySelection,
    window: Window,
    feature_names: list[str] | None = None,
) -> OracleRequest:
    by_id = {r.id: r for r in window.records}
    samples = []
    for rid in selection.union_ids:
        rec = by_id[rid]
        names = feature_names or [f"f{j}" for j in range(len(rec.features))]
        samples.append(
            QuerySample(
                id=rid,
                features={n: float(v) for n, v in zip(names, rec.features)},
                outlier_score=selection.outlier_score[rid],
                uncertainty=selection.uncertainty[rid],
                source=selection.source(rid),
                family_hint=rec.truth.family if rec.truth is not None else None,
            )
        )
    return OracleRequest(
        request_id=f"w{window.index:04d}",
        window_index=window.index,
        samples=tuple(samples),
    )


class SimulatedOracle:
    """Answers every query with the ground-truth binary label."""

    def __init__(self, truth: dict[int, Label]):
        self._truth = truth

    def resolve(self, request: OracleRequest) -> OracleResponse:
        labels = {}
        for s in request.samples:
            if s.id not in self._truth:
                raise OracleError(f"no ground truth available for record id {s.id}")
            labels[s.id] = self._truth[s.id]
        return OracleResponse(labels=labels, responder="simulated", timestamp=time.time())


def truth_map(window: Window) -> dict[int, Label]:
    return {r.id: r.truth.label for r in window.records if r.truth is not None}


class InteractiveOracle:
    """Blocks the pipeline until the labeling API has collected every label.

    Submissions are last-write-wins per id until the request completes. A
    `timeout` (seconds) aborts the run cleanly instead of guessing labels.
    """

    def __init__(self, timeout: float | None = None):
        self.timeout = timeout
        self._cond = threading.Condition()
        self._request: OracleRequest | None = None
        self._labels: dict[int, Label] = {}

    # -- pipeline side -----------------------------------------------------
    def resolve(self, request: OracleRequest) -> OracleResponse:
        with self._cond:
            self._request = request
            self._labels = {}
            wanted = {s.id for s in request.samples}
            deadline = None if self.timeout is None else time.monotonic() + self.timeout
            while set(self._labels) != wanted:
                remaining = None if deadline is None else deadline - time.monotonic()
                if remaining is not None and remaining <= 0:
                    self._request = None
                    raise OracleError(
                        f"labeling request {request.request_id} timed out"
                    )
                self._cond.wait(timeout=remaining)
            labels = dict(self._labels)
            self._request = None
            self._labels = {}
        return OracleResponse(labels=labels, responder="human", timestamp=time.time())

    # -- service side ------------------------------------------------------
    def pending(self) -> OracleRequest | None:
        with self._cond:
            return self._request

    def remaining(self) -> int:
        with self._cond:
            if self._request is None:
                return 0
            return len(self._request.samples) - len(self._labels)

    def submit(self, request_id: str, record_id: int, label: Label) -> int:
        """Returns the remaining count; raises OracleError on a bad submission."""
        with self._cond:
            if self._request is None or self._request.request_id != request_id:
                raise OracleError(f"no open labeling request {request_id!r}")
            if record_id not in {s.id for s in self._request.samples}:
                raise OracleError(f"record id {record_id} is not part of {request_id}")
            self._labels[record_id] = label
            remaining = len(self._request.samples) - len(self._labels)
            self._cond.notify_all()
            return remaining


class ServiceState:
    """Shared view of the running pipeline for the HTTP service."""

    def __init__(self, oracle: InteractiveOracle | None = None):
        self.oracle = oracle
        self._lock = threading.Lock()
        self._status = "idle"
        self._window = 0
        self._metrics: list[dict] = []

    def set_status(self, status: str, window: int) -> None:
        with self._lock:
            self._status = status
            self._window = window

    def status(self) -> dict:
        with self._lock:
            return {"state": self._status, "window": self._window}

    def add_window_metrics(self, entry: dict) -> None:
        with self._lock:
            self._metrics.append(entry)

    def metrics(self) -> list[dict]:
        with self._lock:
            return list(self._metrics)


class _LabelingHandler(BaseHTTPRequestHandler):
    state: ServiceState = None  # injected by serve_labeling_api
    static_dir: Path | None = None

    def log_message(self, *args):  # quiet by default
        pass

    def _send_json(self, payload, code: int = 200) -> None:
        body = json.dumps(payload).encode()
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        path = self.path.split("?")[0]
        if path == "/api/queries/pending":
            oracle = self.state.oracle
            request = oracle.pending() if oracle is not None else None
            if request is None:
                self._send_json({"request_id": None, "samples": []})
                return
            self._send_json(
                {
                    "request_id": request.request_id,
                    "window": request.window_index,
                    "samples": [
                        {
                            "id": s.id,
                            "features": s.features,
                            "outlier_score": s.outlier_score,
                            "uncertainty": s.uncertainty,
                            "source": s.source,
                        }
                        for s in request.samples
                    ],
                }
            )
        elif path == "/api/metrics/windows":
            self._send_json(self.state.metrics())
        elif path == "/api/status":
            self._send_json(self.state.status())
        elif self.static_dir is not None:
            self._serve_static(path)
        else:
            self._send_json({"error": "not found"}, 404)

    def _serve_static(self, path: str) -> None:
        rel = "index.html" if path == "/" else path.lstrip("/")
        target = (self.static_dir / rel).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) or not target.is_file():
            self._send_json({"error": "not found"}, 404)
            return
        ctype = {
            ".html": "text/html",
            ".js": "text/javascript",
            ".css": "text/css",
        }.get(target.suffix, "application/octet-stream")
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        if self.path.split("?")[0] != "/api/labels":
            self._send_json({"error": "not found"}, 404)
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length).decode())
            request_id = payload["request_id"]
            record_id = int(payload["id"])
            label = Label(payload["label"])
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            self._send_json({"accepted": False, "error": str(exc)}, 400)
            return
        oracle = self.state.oracle
        if oracle is None:
            self._send_json({"accepted": False, "error": "no interactive oracle"}, 400)
            return
        try:
            remaining = oracle.submit(request_id, record_id, label)
        except OracleError as exc:
            self._send_json({"accepted": False, "error": str(exc)}, 400)
            return
        self._send_json({"accepted": True, "remaining": remaining})


def serve_labeling_api(
    state: ServiceState, port: int, static_dir: str | Path | None = None
) -> ThreadingHTTPServer:
    """Start the labeling API on a daemon thread; caller owns shutdown()."""
    handler = type(
        "Handler",
        (_LabelingHandler,),
        {"state": state, "static_dir": None if static_dir is None else Path(static_dir)},
    )
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server
