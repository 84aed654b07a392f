"""HTTP facade over the pipeline: corpora, annotation and training jobs,
model queries, semantic-map export and the knowledge-engineer edit log.

Everything lives under /api/v1 and speaks JSON. Errors always carry the
shape {"error": {"code", "message", ...}}. Annotation and training run as
background jobs polled via /jobs/{id}; at most one job may run per target
id at a time. Map edits append to a per-map log; reading a map folds the
log over the stored graph in order.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import graphexport, vectorstore
from .embeddings import TrainingConfig, train
from .errors import (
    ConfigError,
    DataError,
    DuplicateIdError,
    NotFoundError,
    TermspaceError,
    UnknownTermError,
)
from .lexicon import Lexicon, load_lexicon_dir
from .termex import AnnotatedRepository, annotate_corpus
from .textcore import CorpusRepository, make_corpus

EDIT_ACTIONS = ("relabel", "delete", "add")


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, **extra):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.extra = extra

    def body(self) -> dict:
        return {"error": {"code": self.code, "message": self.message, **self.extra}}


def _from_exception(exc: TermspaceError) -> ApiError:
    if isinstance(exc, UnknownTermError):
        return ApiError(404, "unknown_term", str(exc), term=exc.term)
    if isinstance(exc, NotFoundError):
        return ApiError(404, "not_found", str(exc))
    if isinstance(exc, DuplicateIdError):
        return ApiError(409, "duplicate_id", str(exc))
    if isinstance(exc, ConfigError):
        return ApiError(400, "invalid_config", str(exc))
    if isinstance(exc, DataError):
        return ApiError(400, "invalid_data", str(exc))
    return ApiError(500, "internal", str(exc))


@dataclass
class Job:
    id: str
    kind: str  # "annotate" | "train"
    status: str = "queued"  # queued | running | done | failed
    progress: float = 0.0
    result_id: Optional[str] = None
    error: Optional[str] = None
    target: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "status": self.status,
            "progress": self.progress,
            "result_id": self.result_id,
            "error": self.error,
        }


class JobRegistry:
    """In-memory job table; one running job per target id."""

    def __init__(self) -> None:
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def submit(self, kind: str, target: str, work) -> Job:
        with self._lock:
            for job in self._jobs.values():
                if job.target == target and job.status in ("queued", "running"):
                    raise ApiError(
                        409, "conflict", f"a {job.kind} job is already running for {target!r}"
                    )
            job = Job(id=uuid.uuid4().hex[:12], kind=kind, target=target)
            self._jobs[job.id] = job

        def runner() -> None:
            job.status = "running"
            try:
                job.result_id = work(job)
                job.progress = 1.0
                job.status = "done"
            except ApiError as exc:
                job.error = exc.message
                job.status = "failed"
            except Exception as exc:  # surface anything else to the poller
                job.error = str(exc)
                job.status = "failed"

        threading.Thread(target=runner, daemon=True).start()
        return job

    def get(self, job_id: str) -> Job:
        job = self._jobs.get(job_id)
        if job is None:
            raise ApiError(404, "not_found", f"unknown job id: {job_id!r}")
        return job


class MapStore:
    """Persisted semantic maps plus their append-only edit logs."""

    def __init__(self, root: Path):
        self.root = root / "maps"
        self._lock = threading.Lock()

    def _map_path(self, map_id: str) -> Path:
        return self.root / f"{map_id}.json"

    def _edits_path(self, map_id: str) -> Path:
        return self.root / f"{map_id}.edits.jsonl"

    def create(self, document: dict) -> str:
        with self._lock:
            self.root.mkdir(parents=True, exist_ok=True)
            map_id = f"map-{uuid.uuid4().hex[:10]}"
            document = {"id": map_id, **document}
            self._map_path(map_id).write_text(
                json.dumps(document, ensure_ascii=False), encoding="utf-8"
            )
            return map_id

    def load(self, map_id: str) -> dict:
        path = self._map_path(map_id)
        if not path.is_file():
            raise ApiError(404, "not_found", f"unknown map id: {map_id!r}")
        return json.loads(path.read_text(encoding="utf-8"))

    def edits(self, map_id: str) -> list[dict]:
        self.load(map_id)  # 404 on unknown id
        path = self._edits_path(map_id)
        if not path.is_file():
            return []
        return [
            json.loads(line)
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]

    def append_edit(self, map_id: str, edit: dict) -> dict:
        with self._lock:
            document = self.load(map_id)
            folded = fold_edits(document, self.edits(map_id))
            _validate_edit(folded, edit)
            edit = {**edit, "timestamp": datetime.now(timezone.utc).isoformat()}
            with self._edits_path(map_id).open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(edit, ensure_ascii=False) + "\n")
            return edit

    def folded(self, map_id: str) -> dict:
        return fold_edits(self.load(map_id), self.edits(map_id))


def _canonical_edge(edge: dict) -> tuple[str, str]:
    source, target = edge.get("source"), edge.get("target")
    if not isinstance(source, str) or not isinstance(target, str) or source == target:
        raise ApiError(400, "malformed", "edit edge must name two distinct nodes")
    return (source, target) if source < target else (target, source)


def _validate_edit(folded: dict, edit: dict) -> None:
    action = edit.get("action")
    if action not in EDIT_ACTIONS:
        raise ApiError(400, "malformed", f"unknown edit action {action!r}")
    if action in ("relabel", "add") and not edit.get("relation_label"):
        raise ApiError(400, "malformed", f"{action} requires relation_label")
    source, target = _canonical_edge(edit.get("edge") or {})
    existing = {(e["source"], e["target"]) for e in folded["edges"]}
    if action in ("relabel", "delete") and (source, target) not in existing:
        raise ApiError(400, "invalid_data", f"edge {source}--{target} is not in the map")
    if action == "add":
        if (source, target) in existing:
            raise ApiError(400, "invalid_data", f"edge {source}--{target} already exists")
        nodes = {node["id"] for node in folded["nodes"]}
        if source not in nodes or target not in nodes:
            raise ApiError(400, "invalid_data", "added edge endpoints must be map nodes")


def fold_edits(document: dict, edits: list[dict]) -> dict:
    """Apply the edit log in order: deletes remove edges, relabels attach a
    "relation" field, adds append weightless labelled edges."""
    result = json.loads(json.dumps(document))
    edges = result["edges"]
    for edit in edits:
        source, target = _canonical_edge(edit["edge"])
        action = edit["action"]
        if action == "delete":
            edges[:] = [e for e in edges if (e["source"], e["target"]) != (source, target)]
        elif action == "relabel":
            for e in edges:
                if (e["source"], e["target"]) == (source, target):
                    e["relation"] = edit["relation_label"]
        elif action == "add":
            edges.append(
                {
                    "source": source,
                    "target": target,
                    "weight": None,
                    "relation": edit["relation_label"],
                }
            )
    return result


class DocumentIn(BaseModel):
    text: str
    id: Optional[str] = None
    source: Optional[str] = None


class CorpusIn(BaseModel):
    id: Optional[str] = None
    documents: list[DocumentIn]


class AnnotateIn(BaseModel):
    lexicon_dir: Optional[str] = None


class TrainIn(BaseModel):
    annotated_id: str
    model_id: Optional[str] = None
    config: dict = {}


class ImportIn(BaseModel):
    id: str
    path: Optional[str] = None
    content: Optional[str] = None


class CentroidIn(BaseModel):
    positive: list[str]
    topn: int = 10


class DocumentGraphIn(BaseModel):
    text: str
    topn: int = graphexport.DEFAULT_TOPN
    threshold: float = graphexport.DEFAULT_THRESHOLD


class EditIn(BaseModel):
    edge: dict
    action: str
    relation_label: Optional[str] = None
    author: str = "anonymous"


class ServiceState:
    def __init__(self, data_dir: Path, lexicon_dir: Optional[Path] = None):
        self.data_dir = data_dir
        self.corpora = CorpusRepository(data_dir)
        self.annotated = AnnotatedRepository(data_dir)
        self.maps = MapStore(data_dir)
        self.jobs = JobRegistry()
        self.lexicon_dir = lexicon_dir or (data_dir / "lexicon")
        self._lexicon: Optional[Lexicon] = None
        self._models: dict[str, object] = {}
        self._model_lock = threading.Lock()

    def lexicon(self, override: Optional[str] = None) -> Lexicon:
        if override:
            return load_lexicon_dir(Path(override))
        if self._lexicon is None:
            if not self.lexicon_dir.is_dir():
                raise ApiError(
                    400, "invalid_data", f"no lexicon directory at {self.lexicon_dir}"
                )
            self._lexicon = load_lexicon_dir(self.lexicon_dir)
        return self._lexicon

    def model_dir(self, model_id: str) -> Path:
        return self.data_dir / "models" / model_id

    def model_ids(self) -> list[str]:
        base = self.data_dir / "models"
        if not base.is_dir():
            return []
        return sorted(
            p.name for p in base.iterdir() if (p / vectorstore.VECTORS_FILE).is_file()
        )

    def model(self, model_id: str):
        with self._model_lock:
            if model_id not in self._models:
                directory = self.model_dir(model_id)
                if not (directory / vectorstore.VECTORS_FILE).is_file():
                    raise ApiError(404, "not_found", f"unknown model id: {model_id!r}")
                self._models[model_id] = vectorstore.load_model(directory)
            return self._models[model_id]

    def invalidate_model(self, model_id: str) -> None:
        with self._model_lock:
            self._models.pop(model_id, None)


def create_app(
    data_dir: Path | str, lexicon_dir: Path | str | None = None, static_dir: Path | str | None = None
) -> FastAPI:
    state = ServiceState(Path(data_dir), Path(lexicon_dir) if lexicon_dir else None)
    app = FastAPI(title="termspace", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def handle_api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(TermspaceError)
    async def handle_domain_error(_request: Request, exc: TermspaceError):
        api = _from_exception(exc)
        return JSONResponse(status_code=api.status, content=api.body())

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "malformed", "message": str(exc.errors()[:3])}},
        )

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_error(_request: Request, exc: StarletteHTTPException):
        code = "not_found" if exc.status_code == 404 else "http_error"
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": {"code": code, "message": str(exc.detail)}},
        )

    @app.post("/api/v1/corpora", status_code=201)
    def create_corpus(body: CorpusIn):
        if not body.documents:
            raise ApiError(400, "invalid_data", "no input documents")
        corpus_id = body.id or f"corpus-{uuid.uuid4().hex[:8]}"
        triples = [
            (doc.id or f"doc{i + 1}", doc.source or "upload", doc.text)
            for i, doc in enumerate(body.documents)
        ]
        corpus = make_corpus(triples, corpus_id, state.corpora)
        return {"id": corpus.id, "document_count": len(corpus.documents)}

    @app.get("/api/v1/corpora")
    def list_corpora():
        out = []
        for corpus_id in state.corpora.list_ids():
            manifest = state.corpora.load_manifest(corpus_id)
            out.append(
                {
                    "id": corpus_id,
                    "documents": len(manifest["documents"]),
                    "status": manifest.get("status"),
                }
            )
        return {"corpora": out}

    @app.get("/api/v1/corpora/{corpus_id}")
    def get_corpus(corpus_id: str):
        return state.corpora.load_manifest(corpus_id)

    @app.post("/api/v1/corpora/{corpus_id}/annotate", status_code=202)
    def annotate(corpus_id: str, body: Optional[AnnotateIn] = None):
        if not state.corpora.exists(corpus_id):
            raise ApiError(404, "not_found", f"unknown corpus id: {corpus_id!r}")
        lexicon = state.lexicon(body.lexicon_dir if body else None)

        def work(job: Job) -> str:
            corpus = state.corpora.load(corpus_id)
            job.progress = 0.1
            annotate_corpus(corpus, lexicon, state.annotated, state.corpora)
            return corpus_id

        job = state.jobs.submit("annotate", corpus_id, work)
        return {"job_id": job.id}

    @app.get("/api/v1/annotated")
    def list_annotated():
        return {"annotated": state.annotated.list_ids()}

    @app.get("/api/v1/annotated/{annotated_id}")
    def get_annotated(annotated_id: str):
        return state.annotated.summary(annotated_id)

    @app.post("/api/v1/models/train", status_code=202)
    def train_model(body: TrainIn):
        if not state.annotated.exists(body.annotated_id):
            raise ApiError(404, "not_found", f"unknown annotated id: {body.annotated_id!r}")
        try:
            config = TrainingConfig(**body.config)
        except TypeError as exc:
            raise ApiError(400, "invalid_config", str(exc))
        config.validate()
        model_id = body.model_id or f"{body.annotated_id}-model"
        if (state.model_dir(model_id) / vectorstore.VECTORS_FILE).is_file():
            raise ApiError(409, "duplicate_id", f"duplicate model id: {model_id!r}")

        def work(job: Job) -> str:
            stream_path = state.annotated.stream_path(body.annotated_id)
            stream = stream_path.read_text(encoding="utf-8").splitlines()
            vocab = state.annotated.load_vocab(body.annotated_id)
            head_pos = {key: entry.head_pos for key, entry in vocab.items()}
            job.progress = 0.1
            model = train(stream, config, head_pos)
            vectorstore.save_model(model, state.model_dir(model_id))
            state.invalidate_model(model_id)
            return model_id

        job = state.jobs.submit("train", model_id, work)
        return {"job_id": job.id}

    @app.post("/api/v1/models/import", status_code=201)
    def import_model(body: ImportIn):
        if (state.model_dir(body.id) / vectorstore.VECTORS_FILE).is_file():
            raise ApiError(409, "duplicate_id", f"duplicate model id: {body.id!r}")
        if body.content is None and body.path is None:
            raise ApiError(400, "malformed", "import needs 'content' or 'path'")
        content = body.content
        if content is None:
            source = Path(body.path)
            if not source.is_file():
                raise ApiError(404, "not_found", f"no vectors file at {source}")
            content = source.read_text(encoding="utf-8")
        directory = state.model_dir(body.id)
        directory.mkdir(parents=True, exist_ok=True)
        target = directory / vectorstore.VECTORS_FILE
        target.write_text(content, encoding="utf-8")
        try:
            model = vectorstore.load_model(directory)
        except TermspaceError as exc:
            target.unlink()
            raise _from_exception(exc)
        state.invalidate_model(body.id)
        return {
            "id": body.id,
            "vocab_size": len(model.vocabulary),
            "dim": model.dim,
            "filters_disabled": not vectorstore.has_metadata(model),
        }

    @app.get("/api/v1/models")
    def list_models():
        out = []
        for model_id in state.model_ids():
            model = state.model(model_id)
            out.append(
                {
                    "id": model_id,
                    "vocab_size": len(model.vocabulary),
                    "dim": model.dim,
                    "filters_disabled": not vectorstore.has_metadata(model),
                }
            )
        return {"models": out}

    @app.get("/api/v1/jobs/{job_id}")
    def get_job(job_id: str):
        return state.jobs.get(job_id).to_json()

    @app.get("/api/v1/models/{model_id}/similarity")
    def get_similarity(model_id: str, a: str = Query(...), b: str = Query(...)):
        return {"similarity": vectorstore.similarity(state.model(model_id), a, b)}

    @app.get("/api/v1/models/{model_id}/neighbors")
    def get_neighbors(
        model_id: str,
        term: str = Query(...),
        topn: int = 10,
        pos: Optional[str] = None,
        min_freq: Optional[int] = None,
    ):
        found = vectorstore.neighbors(
            state.model(model_id),
            term,
            topn,
            vectorstore.QueryFilter(pos=pos, min_freq=min_freq),
        )
        return {"neighbors": [{"term": n.term, "similarity": n.similarity} for n in found]}

    @app.get("/api/v1/models/{model_id}/analogy")
    def get_analogy(
        model_id: str,
        y: str = Query(...),
        a: str = Query(...),
        b: str = Query(...),
        topn: int = 10,
    ):
        found = vectorstore.analogy(state.model(model_id), y, a, b, topn)
        return {"neighbors": [{"term": n.term, "similarity": n.similarity} for n in found]}

    @app.post("/api/v1/models/{model_id}/centroid")
    def post_centroid(model_id: str, body: CentroidIn):
        vector, found = vectorstore.centroid(state.model(model_id), body.positive, body.topn)
        return {
            "vector": [float(x) for x in vector],
            "neighbors": [{"term": n.term, "similarity": n.similarity} for n in found],
        }

    def _store_map(built: graphexport.SemanticMap, model_id: str) -> dict:
        document = built.to_json()
        document["params"]["model"] = model_id
        map_id = state.maps.create(document)
        return state.maps.load(map_id)

    @app.get("/api/v1/models/{model_id}/graph")
    def get_graph(
        model_id: str,
        terms: str = Query(...),
        topn: int = graphexport.DEFAULT_TOPN,
        threshold: float = graphexport.DEFAULT_THRESHOLD,
        depth: int = graphexport.DEFAULT_DEPTH,
    ):
        seeds = [t.strip() for t in terms.split(",") if t.strip()]
        if not seeds:
            raise ApiError(400, "malformed", "terms must name at least one seed")
        built = graphexport.build_map(state.model(model_id), seeds, topn, threshold, depth)
        return _store_map(built, model_id)

    @app.post("/api/v1/models/{model_id}/document-graph")
    def post_document_graph(model_id: str, body: DocumentGraphIn):
        built = graphexport.build_document_map(
            state.model(model_id), body.text, state.lexicon(), body.topn, body.threshold
        )
        return _store_map(built, model_id)

    @app.get("/api/v1/maps/{map_id}")
    def get_map(map_id: str):
        return state.maps.folded(map_id)

    @app.get("/api/v1/maps/{map_id}/edits")
    def get_edits(map_id: str):
        return {"edits": state.maps.edits(map_id)}

    @app.post("/api/v1/maps/{map_id}/edits", status_code=201)
    def post_edit(map_id: str, body: EditIn):
        stored = state.maps.append_edit(
            map_id,
            {
                "edge": body.edge,
                "action": body.action,
                "relation_label": body.relation_label,
                "author": body.author,
            },
        )
        return {"edit": stored}

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="webapp")

    return app
