/**
 * Typed client for the storyloom service (/api/v1).
 *
 * Every mutation resolves with the server's document, so callers can
 * reconcile optimistic state; engine errors reject with ApiError carrying
 * the stable code from the structured error body.
 */

export type StructureName = "free" | "three_act" | "five_act";

export interface KindDoc {
  type: "character_ref" | "action" | "relationship";
  character_id?: string;
  label?: string;
  is_custom?: boolean;
}

export interface NodeDoc {
  id: string;
  board_id: string;
  kind: KindDoc;
  position: { x: number; y: number };
}

export interface EdgeDoc {
  id: string;
  board_id: string;
  source: string;
  target: string;
}

export interface BoardDoc {
  id: string;
  act_label: string;
  nodes: NodeDoc[];
  edges: EdgeDoc[];
  event_order: string[];
  scenery_description: string | null;
  scenery_image_ref: string | null;
}

export interface CharacterDoc {
  id: string;
  name: string;
  appearance: string | null;
  image_ref: string | null;
}

export interface ChapterDoc {
  index: number;
  text: string;
  summary: string | null;
  word_target: number;
}

export interface ProjectDoc {
  id: string;
  schema_version: number;
  title: string;
  genre: string;
  structure: StructureName;
  characters: CharacterDoc[];
  boards: BoardDoc[];
  chapters: ChapterDoc[];
  validation?: string[];
}

export interface EventInfo {
  connector_id: string;
  order_index: number;
  subjects: string[];
  verb: string;
  objects: string[];
  text: string;
}

export interface RelationInfo {
  connector_id: string;
  subjects: string[];
  label: string;
  objects: string[];
  text: string;
}

export interface IncompleteInfo {
  connector_id: string;
  kind: "action" | "relationship";
  reason: string;
}

export interface BoardEvents {
  events: EventInfo[];
  relations: RelationInfo[];
  incomplete: IncompleteInfo[];
}

export interface JobDoc {
  job_id: string;
  project_id: string;
  state: string;
  chapter_index: number | null;
  reason?: string;
}

export interface ProgressFrame {
  v: number;
  job_id: string;
  kind:
    | "chapter_started"
    | "text_chunk"
    | "chapter_done"
    | "summary_done"
    | "job_done"
    | "error";
  chapter_index: number | null;
  payload: string;
}

export interface StoryDoc {
  project_id: string;
  title: string;
  chapters: ChapterDoc[];
}

export interface VocabDoc {
  genres: string[];
  actions: string[];
  structures: { value: StructureName; display_name: string; boards_required: number | null }[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public violations?: string[],
  ) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class StoryloomApi {
  constructor(
    private base = "/api/v1",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body instanceof FormData) {
      init.body = body;
    } else if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.base}${path}`, init);
    if (!response.ok) {
      let code = "http_error";
      let message = `${response.status}`;
      let violations: string[] | undefined;
      try {
        const doc = await response.json();
        code = doc.error?.code ?? code;
        message = doc.error?.message ?? message;
        violations = doc.error?.violations;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, code, message, violations);
    }
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  listProjects() {
    return this.request<{ projects: { id: string; title: string }[] }>("GET", "/projects");
  }

  createProject(title: string, genre: string, structure: StructureName) {
    return this.request<ProjectDoc>("POST", "/projects", { title, genre, structure });
  }

  getProject(id: string) {
    return this.request<ProjectDoc>("GET", `/projects/${id}`);
  }

  patchProject(id: string, patch: { title?: string; genre?: string; structure?: StructureName }) {
    return this.request<ProjectDoc>("PATCH", `/projects/${id}`, patch);
  }

  createCharacter(projectId: string, name: string) {
    return this.request<CharacterDoc>("POST", `/projects/${projectId}/characters`, { name });
  }

  uploadCharacterImage(projectId: string, characterId: string, file: Blob, filename = "image.png") {
    const form = new FormData();
    form.append("file", file, filename);
    return this.request<CharacterDoc>(
      "POST",
      `/projects/${projectId}/characters/${characterId}/image`,
      form,
    );
  }

  uploadSceneryImage(projectId: string, boardId: string, file: Blob, filename = "scene.png") {
    const form = new FormData();
    form.append("file", file, filename);
    return this.request<{ id: string; scenery_description: string | null }>(
      "POST",
      `/projects/${projectId}/boards/${boardId}/scenery-image`,
      form,
    );
  }

  createBoard(projectId: string) {
    return this.request<BoardDoc>("POST", `/projects/${projectId}/boards`);
  }

  deleteBoard(projectId: string, boardId: string) {
    return this.request<void>("DELETE", `/projects/${projectId}/boards/${boardId}`);
  }

  createNode(projectId: string, boardId: string, kind: KindDoc, position: { x: number; y: number }) {
    return this.request<NodeDoc>("POST", `/projects/${projectId}/boards/${boardId}/nodes`, {
      kind,
      position,
    });
  }

  moveNode(projectId: string, boardId: string, nodeId: string, position: { x: number; y: number }) {
    return this.request<NodeDoc>(
      "PATCH",
      `/projects/${projectId}/boards/${boardId}/nodes/${nodeId}`,
      { position },
    );
  }

  deleteNode(projectId: string, boardId: string, nodeId: string) {
    return this.request<void>("DELETE", `/projects/${projectId}/boards/${boardId}/nodes/${nodeId}`);
  }

  createEdge(projectId: string, boardId: string, source: string, target: string) {
    return this.request<EdgeDoc>("POST", `/projects/${projectId}/boards/${boardId}/edges`, {
      source,
      target,
    });
  }

  deleteEdge(projectId: string, boardId: string, edgeId: string) {
    return this.request<void>("DELETE", `/projects/${projectId}/boards/${boardId}/edges/${edgeId}`);
  }

  getEvents(projectId: string, boardId: string) {
    return this.request<BoardEvents>("GET", `/projects/${projectId}/boards/${boardId}/events`);
  }

  putEventOrder(projectId: string, boardId: string, order: string[]) {
    return this.request<{ board_id: string; event_order: string[] }>(
      "PUT",
      `/projects/${projectId}/boards/${boardId}/event-order`,
      { order },
    );
  }

  generate(projectId: string) {
    return this.request<{ job_id: string; project_id: string; state: string }>(
      "POST",
      `/projects/${projectId}/generate`,
    );
  }

  getStory(projectId: string) {
    return this.request<StoryDoc>("GET", `/projects/${projectId}/story`);
  }

  getJob(jobId: string) {
    return this.request<JobDoc>("GET", `/jobs/${jobId}`);
  }

  cancelJob(jobId: string) {
    return this.request<{ acknowledged: boolean }>("POST", `/jobs/${jobId}/cancel`);
  }

  getVocab() {
    return this.request<VocabDoc>("GET", "/vocab");
  }
}
