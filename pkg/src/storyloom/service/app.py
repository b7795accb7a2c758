"""HTTP service: project CRUD, generation control, progress streaming, metrics.

All endpoints live under /api/v1. Engine errors surface as structured bodies
{"error": {"code", "message", ...}} with stable codes; compiled prompts are
never returned by any endpoint (the --debug-prompts flag writes them to the
project's transcript log instead).
"""

from __future__ import annotations

import copy
import threading
import time
from typing import Literal

from fastapi import FastAPI, UploadFile, WebSocket, WebSocketDisconnect
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field
from starlette.concurrency import run_in_threadpool

from .. import model
from ..errors import (
    Cancelled,
    GenerationRunning,
    InvalidRequest,
    NotFound,
    ProviderError,
    StoryloomError,
    ValidationFailed,
)
from ..events import (
    extract_events,
    extract_relations,
    render_event_text,
    render_relation_text,
    set_event_order,
)
from ..metrics import (
    MicsiResponse,
    micsi_report,
    sus_report,
    tokenize,
    ttr,
)
from ..pipeline import describe_character, describe_scenery, generate_story
from ..providers import ModelProvider, MockProvider
from ..serialize import to_document
from ..store import ProjectStore
from ..vocab import DEFAULT_VOCAB, Vocab
from .jobs import Job, JobManager, make_frame

_STATUS_BY_CODE = {
    "unknown_board": 404,
    "unknown_character": 404,
    "unknown_node": 404,
    "unknown_job": 404,
    "not_found": 404,
    "generation_running": 409,
    "provider_error": 502,
    "corrupt_document": 500,
    "storage_failure": 500,
}


def _error_body(exc: StoryloomError) -> dict:
    body = {"code": exc.code, "message": exc.message}
    if isinstance(exc, ValidationFailed):
        body["violations"] = exc.violations
    return {"error": body}


# --- request bodies -----------------------------------------------------------

StructureName = Literal["free", "three_act", "five_act"]


class ProjectBody(BaseModel):
    title: str = "Untitled"
    genre: str
    structure: StructureName


class ProjectPatch(BaseModel):
    title: str | None = None
    genre: str | None = None
    structure: StructureName | None = None


class CharacterBody(BaseModel):
    name: str
    appearance: str | None = None


class KindBody(BaseModel):
    type: Literal["character_ref", "action", "relationship"]
    character_id: str | None = None
    label: str | None = None
    is_custom: bool = False


class PositionBody(BaseModel):
    x: float = 0.0
    y: float = 0.0


class NodeBody(BaseModel):
    kind: KindBody
    position: PositionBody = PositionBody()


class NodeMove(BaseModel):
    position: PositionBody


class EdgeBody(BaseModel):
    source: str
    target: str


class EventOrderBody(BaseModel):
    order: list[str]


class TtrBody(BaseModel):
    text: str


class SusBody(BaseModel):
    responses: list[list[int]] = Field(min_length=1)


class MicsiResponseBody(BaseModel):
    paired_items: dict[str, tuple[int, int]]
    single_items: dict[str, int]


class MicsiBody(BaseModel):
    responses: list[MicsiResponseBody] = Field(min_length=1)


def _kind_from_body(body: KindBody) -> model.NodeKind:
    if body.type == "character_ref":
        if not body.character_id:
            raise InvalidRequest("character_ref nodes need a character_id")
        return model.CharacterRef(character_id=body.character_id)
    if body.label is None:
        raise InvalidRequest(f"{body.type} nodes need a label")
    if body.type == "action":
        return model.Action(label=body.label, is_custom=body.is_custom)
    return model.Relationship(label=body.label)


class _LockMap:
    def __init__(self):
        self._meta = threading.Lock()
        self._locks: dict[str, threading.RLock] = {}

    def __call__(self, project_id: str) -> threading.RLock:
        with self._meta:
            return self._locks.setdefault(project_id, threading.RLock())


def create_app(data_dir, provider: ModelProvider | None = None,
               vocab: Vocab = DEFAULT_VOCAB, debug_prompts: bool = False,
               ui_dir=None) -> FastAPI:
    """Build the service around a data directory and a model provider."""
    store = ProjectStore(data_dir)
    provider = provider if provider is not None else MockProvider()
    jobs = JobManager()
    locks = _LockMap()
    projects: dict[str, model.StoryProject] = {}
    for project_id in store.list_ids():
        projects[project_id] = store.load(project_id)

    app = FastAPI(title="storyloom", version="0.1.0")

    @app.exception_handler(StoryloomError)
    async def engine_error(request, exc: StoryloomError):
        return JSONResponse(status_code=_STATUS_BY_CODE.get(exc.code, 400),
                            content=_error_body(exc))

    @app.exception_handler(RequestValidationError)
    async def bad_request(request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={
            "error": {"code": "invalid_request", "message": str(exc.errors()[:3])}})

    def get_project(project_id: str) -> model.StoryProject:
        project = projects.get(project_id)
        if project is None:
            raise NotFound(f"no project {project_id!r}")
        return project

    def mutable_project(project_id: str) -> model.StoryProject:
        project = get_project(project_id)
        if jobs.active_for(project_id) is not None:
            raise GenerationRunning(
                f"project {project_id!r} is generating; retry when the job ends")
        return project

    def persist(project: model.StoryProject) -> None:
        store.save(project)

    def project_doc(project: model.StoryProject) -> dict:
        return {"id": project.id, **to_document(project)}

    def board_doc(board: model.Storyboard) -> dict:
        doc = to_document_board(board)
        return doc

    def to_document_board(board: model.Storyboard) -> dict:
        full = to_document(model.StoryProject(
            id="x", title="", genre="", structure=model.Structure.FREE, boards=[board]))
        return full["boards"][0]

    # --- projects --------------------------------------------------------------

    @app.post("/api/v1/projects", status_code=201)
    def create_project(body: ProjectBody):
        import uuid

        project_id = uuid.uuid4().hex
        project = model.new_project(project_id, body.title, body.genre,
                                    model.Structure(body.structure), vocab)
        with locks(project_id):
            projects[project_id] = project
            persist(project)
        return project_doc(project)

    @app.get("/api/v1/projects")
    def list_projects():
        return {"projects": [
            {"id": p.id, "title": p.title, "genre": p.genre,
             "structure": p.structure.value, "boards": len(p.boards),
             "chapters": len(p.chapters)}
            for p in projects.values()
        ]}

    @app.get("/api/v1/projects/{project_id}")
    def read_project(project_id: str):
        return project_doc(get_project(project_id))

    @app.patch("/api/v1/projects/{project_id}")
    def patch_project(project_id: str, body: ProjectPatch):
        with locks(project_id):
            project = mutable_project(project_id)
            if body.title is not None:
                project.title = body.title
            if body.genre is not None:
                model.set_genre(project, body.genre, vocab)
            if body.structure is not None:
                model.set_structure(project, model.Structure(body.structure))
            persist(project)
            doc = project_doc(project)
        doc["validation"] = model.validate_structure(get_project(project_id))
        return doc

    @app.delete("/api/v1/projects/{project_id}", status_code=204)
    def delete_project(project_id: str):
        with locks(project_id):
            mutable_project(project_id)
            del projects[project_id]
            store.delete(project_id)

    @app.get("/api/v1/projects/{project_id}/validation")
    def read_validation(project_id: str):
        from ..pipeline import validate_for_generation

        project = get_project(project_id)
        return {"structure": model.validate_structure(project),
                "generation": validate_for_generation(project)}

    # --- characters -------------------------------------------------------------

    @app.post("/api/v1/projects/{project_id}/characters", status_code=201)
    def create_character(project_id: str, body: CharacterBody):
        with locks(project_id):
            project = mutable_project(project_id)
            cid = model.add_character(project, body.name, appearance=body.appearance)
            persist(project)
            character = project.characters[cid]
        return {"id": character.id, "name": character.name,
                "appearance": character.appearance, "image_ref": character.image_ref}

    @app.post("/api/v1/projects/{project_id}/characters/{character_id}/image")
    def upload_character_image(project_id: str, character_id: str, file: UploadFile):
        with locks(project_id):
            project = mutable_project(project_id)
            if character_id not in project.characters:
                from ..errors import UnknownCharacter

                raise UnknownCharacter(f"no character {character_id!r}")
            data = file.file.read()
            ref = store.put_blob(project_id, data)
            project.characters[character_id].image_ref = ref
            persist(project)
            character = describe_character(project, character_id, provider)
            persist(project)
        return {"id": character.id, "name": character.name,
                "appearance": character.appearance, "image_ref": character.image_ref}

    # --- boards ------------------------------------------------------------------

    @app.post("/api/v1/projects/{project_id}/boards", status_code=201)
    def create_board(project_id: str):
        with locks(project_id):
            project = mutable_project(project_id)
            bid = model.add_board(project)
            persist(project)
            return board_doc(model.get_board(project, bid))

    @app.delete("/api/v1/projects/{project_id}/boards/{board_id}", status_code=204)
    def delete_board(project_id: str, board_id: str):
        with locks(project_id):
            project = mutable_project(project_id)
            model.remove_board(project, board_id)
            persist(project)

    @app.post("/api/v1/projects/{project_id}/boards/{board_id}/scenery-image")
    def upload_scenery_image(project_id: str, board_id: str, file: UploadFile):
        with locks(project_id):
            project = mutable_project(project_id)
            board = model.get_board(project, board_id)
            data = file.file.read()
            board.scenery_image_ref = store.put_blob(project_id, data)
            persist(project)
            board = describe_scenery(project, board_id, provider)
            persist(project)
        return {"id": board.id, "scenery_image_ref": board.scenery_image_ref,
                "scenery_description": board.scenery_description}

    # --- nodes and edges -----------------------------------------------------------

    @app.post("/api/v1/projects/{project_id}/boards/{board_id}/nodes", status_code=201)
    def create_node(project_id: str, board_id: str, body: NodeBody):
        with locks(project_id):
            project = mutable_project(project_id)
            nid = model.add_node(project, board_id, _kind_from_body(body.kind),
                                 model.Position(x=body.position.x, y=body.position.y))
            persist(project)
            board = model.get_board(project, board_id)
        return next(n for n in to_document_board(board)["nodes"] if n["id"] == nid)

    @app.patch("/api/v1/projects/{project_id}/boards/{board_id}/nodes/{node_id}")
    def move_node(project_id: str, board_id: str, node_id: str, body: NodeMove):
        from ..errors import UnknownNode

        with locks(project_id):
            project = mutable_project(project_id)
            board = model.get_board(project, board_id)
            node = model.find_node(board, node_id)
            if node is None:
                raise UnknownNode(f"no node {node_id!r} on board {board_id!r}")
            node.position = model.Position(x=body.position.x, y=body.position.y)
            persist(project)
        return next(n for n in to_document_board(board)["nodes"] if n["id"] == node_id)

    @app.delete("/api/v1/projects/{project_id}/boards/{board_id}/nodes/{node_id}",
                status_code=204)
    def delete_node(project_id: str, board_id: str, node_id: str):
        with locks(project_id):
            project = mutable_project(project_id)
            model.remove_node(project, board_id, node_id)
            persist(project)

    @app.post("/api/v1/projects/{project_id}/boards/{board_id}/edges", status_code=201)
    def create_edge(project_id: str, board_id: str, body: EdgeBody):
        with locks(project_id):
            project = mutable_project(project_id)
            eid = model.add_edge(project, board_id, body.source, body.target)
            persist(project)
        return {"id": eid, "board_id": board_id, "source": body.source,
                "target": body.target}

    @app.delete("/api/v1/projects/{project_id}/boards/{board_id}/edges/{edge_id}",
                status_code=204)
    def delete_edge(project_id: str, board_id: str, edge_id: str):
        with locks(project_id):
            project = mutable_project(project_id)
            model.remove_edge(project, board_id, edge_id)
            persist(project)

    # --- events ---------------------------------------------------------------------

    @app.get("/api/v1/projects/{project_id}/boards/{board_id}/events")
    def read_events(project_id: str, board_id: str):
        project = get_project(project_id)
        board = model.get_board(project, board_id)
        extraction = extract_events(board, project)
        relations = extract_relations(board, project)
        return {
            "events": [
                {"connector_id": e.connector_id, "order_index": e.order_index,
                 "subjects": list(e.subjects), "verb": e.verb,
                 "objects": list(e.objects), "text": render_event_text(e, project)}
                for e in extraction.events
            ],
            "relations": [
                {"connector_id": r.connector_id, "subjects": list(r.subjects),
                 "label": r.label, "objects": list(r.objects),
                 "text": render_relation_text(r, project)}
                for r in relations.relations
            ],
            "incomplete": [
                {"connector_id": i.connector_id, "kind": i.kind, "reason": i.reason}
                for i in (*extraction.incomplete, *relations.incomplete)
            ],
        }

    @app.put("/api/v1/projects/{project_id}/boards/{board_id}/event-order")
    def put_event_order(project_id: str, board_id: str, body: EventOrderBody):
        with locks(project_id):
            project = mutable_project(project_id)
            board = model.get_board(project, board_id)
            set_event_order(board, body.order)
            persist(project)
        return {"board_id": board_id, "event_order": list(board.event_order)}

    # --- generation --------------------------------------------------------------------

    def run_generation(job: Job, project_id: str) -> None:
        project = projects[project_id]
        with locks(project_id):
            snap = model.snapshot(project)
            project.chapters.clear()
            persist(project)

        def sink(event):
            job.emit(event.kind, event.chapter_index, event.payload)

        def on_chapter(chapter):
            with locks(project_id):
                project.chapters.append(copy.deepcopy(chapter))
                persist(project)

        transcript = _TranscriptRecorder(job, store, project_id, debug_prompts)
        try:
            generate_story(snap, provider, sink, cancel=job.cancel_event,
                           transcript=transcript, on_chapter=on_chapter)
            job.emit("job_done")
        except Cancelled:
            job.emit("error", payload="cancelled")
        except ValidationFailed as exc:
            job.emit("error", payload="validation failed: " + "; ".join(exc.violations))
        except ProviderError as exc:
            job.emit("error", exc.chapter_index, str(exc))

    @app.post("/api/v1/projects/{project_id}/generate", status_code=202)
    def post_generate(project_id: str):
        from ..pipeline import validate_for_generation

        with locks(project_id):
            project = get_project(project_id)
            if jobs.active_for(project_id) is not None:
                raise GenerationRunning(f"project {project_id!r} is already generating")
            violations = validate_for_generation(project)
            if violations:
                raise ValidationFailed(violations)
            job = jobs.start(project_id, lambda j: run_generation(j, project_id))
        return {"job_id": job.job_id, "project_id": project_id, "state": job.state}

    @app.get("/api/v1/projects/{project_id}/story")
    def read_story(project_id: str):
        project = get_project(project_id)
        return {"project_id": project_id, "title": project.title,
                "chapters": [
                    {"index": ch.index, "text": ch.text, "summary": ch.summary,
                     "word_target": ch.word_target}
                    for ch in project.chapters
                ]}

    @app.get("/api/v1/jobs/{job_id}")
    def read_job(job_id: str):
        return jobs.get(job_id).describe()

    @app.post("/api/v1/jobs/{job_id}/cancel")
    def cancel_job(job_id: str):
        return jobs.cancel(job_id)

    @app.websocket("/api/v1/jobs/{job_id}/progress")
    async def progress_stream(websocket: WebSocket, job_id: str):
        await websocket.accept()
        job = jobs.try_get(job_id)
        if job is None:
            await websocket.send_json(make_frame(job_id, "error", None, "unknown job"))
            await websocket.close(code=4404)
            return
        index = job.subscribe()
        try:
            while True:
                frames, index, saw_terminal = await run_in_threadpool(
                    job.next_frames, index, 30.0)
                for frame in frames:
                    await websocket.send_json(frame)
                if saw_terminal:
                    break
            await websocket.close()
        except WebSocketDisconnect:
            pass

    # --- metrics ------------------------------------------------------------------------

    @app.post("/api/v1/metrics/ttr")
    def metrics_ttr(body: TtrBody):
        tokens = tokenize(body.text)
        return {"ttr": ttr(body.text), "tokens": len(tokens), "types": len(set(tokens))}

    @app.post("/api/v1/metrics/sus")
    def metrics_sus(body: SusBody):
        return sus_report([tuple(r) for r in body.responses])

    @app.post("/api/v1/metrics/micsi")
    def metrics_micsi(body: MicsiBody):
        responses = [
            MicsiResponse(paired_items={k: tuple(v) for k, v in r.paired_items.items()},
                          single_items=dict(r.single_items))
            for r in body.responses
        ]
        return micsi_report(responses)

    # --- misc ---------------------------------------------------------------------------

    @app.get("/api/v1/vocab")
    def read_vocab():
        return {
            "genres": list(vocab.genres),
            "actions": list(vocab.actions),
            "structures": [
                {"value": s.value, "display_name": s.display_name,
                 "boards_required": {"free": None, "three_act": 3, "five_act": 5}[s.value]}
                for s in model.Structure
            ],
        }

    @app.get("/api/v1/healthz")
    def healthz():
        return {"status": "ok", "provider": provider.name}

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


class _TranscriptRecorder(list):
    """Transcript list that mirrors entries into the project's transcript log.

    Prompt text is written only when the operator enabled --debug-prompts;
    responses are always logged.
    """

    def __init__(self, job: Job, store: ProjectStore, project_id: str, debug: bool):
        super().__init__()
        self._job = job
        self._store = store
        self._project_id = project_id
        self._debug = debug

    def append(self, entry) -> None:
        super().append(entry)
        doc = {
            "ts": time.time(),
            "job_id": self._job.job_id,
            "template_id": entry.prompt.template_id.value,
            "response": entry.response,
        }
        if self._debug:
            doc["prompt"] = entry.prompt.text
            doc["attachments"] = list(entry.prompt.attachments)
        self._store.append_transcript(self._project_id, doc)
