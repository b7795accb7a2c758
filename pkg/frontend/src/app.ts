/**
 * The authoring shell: element/options tabs, board switcher, canvas,
 * event-ordering tab, and the story tab, glued to one project.
 */

import { ApiError, StoryloomApi } from "./api.js";
import type { CharacterDoc, KindDoc, ProjectDoc, VocabDoc } from "./api.js";
import { CanvasController, type Rect } from "./canvas.js";
import { OrderingTab } from "./ordering.js";
import { BoardMirror } from "./state.js";
import { StoryTab } from "./story.js";
import type { SocketFactory } from "./progress.js";

const TOUR_KEY = "storyloom-tour-done";

const TOUR_STEPS = [
  "Pick a genre and structure in the Options tab; three-act needs exactly three boards.",
  "Add characters, then drag characters, actions, and relationships onto the canvas.",
  "Drag from a node's round port onto a character to connect them: character > action > character reads as an event.",
  "Use the Ordering tab to put events in the order the story should tell them.",
  "Hit Generate in the Story tab and watch the chapters arrive.",
];

export interface AppOptions {
  api: StoryloomApi;
  projectId: string;
  socketFactory?: SocketFactory;
  wsUrl?: (jobId: string) => string;
  rectOf?: (el: Element) => Rect;
  storage?: Pick<Storage, "getItem" | "setItem">;
}

export class AppShell {
  project!: ProjectDoc;
  vocab!: VocabDoc;
  characters = new Map<string, CharacterDoc>();
  mirror: BoardMirror | null = null;
  canvas: CanvasController | null = null;
  ordering: OrderingTab;
  story: StoryTab;
  currentBoardId: string | null = null;

  private tabs = new Map<string, { button: HTMLButtonElement; panel: HTMLElement }>();
  private boardBar: HTMLElement;
  private canvasHost: HTMLElement;
  private noticeBox: HTMLElement;
  private elementsPanel: HTMLElement;
  private optionsPanel: HTMLElement;
  private previews = new Map<string, string>(); // character id -> object URL

  constructor(
    readonly root: HTMLElement,
    private options: AppOptions,
  ) {
    root.classList.add("storyloom-app");
    this.noticeBox = document.createElement("div");
    this.noticeBox.className = "notices";

    const tabBar = document.createElement("nav");
    tabBar.className = "tab-bar";
    const panels = document.createElement("div");
    panels.className = "panels";
    for (const name of ["Elements", "Options", "Ordering", "Story"]) {
      const button = document.createElement("button");
      button.textContent = name;
      button.addEventListener("click", () => this.showTab(name));
      tabBar.appendChild(button);
      const panel = document.createElement("section");
      panel.className = `panel panel-${name.toLowerCase()}`;
      panel.hidden = name !== "Elements";
      panels.appendChild(panel);
      this.tabs.set(name, { button, panel });
    }

    this.boardBar = document.createElement("div");
    this.boardBar.className = "board-bar";
    this.canvasHost = document.createElement("div");
    this.canvasHost.className = "canvas-host";

    const main = document.createElement("div");
    main.className = "workspace";
    main.append(panels, this.canvasHost);
    root.append(this.noticeBox, tabBar, this.boardBar, main);

    this.elementsPanel = this.tabs.get("Elements")!.panel;
    this.optionsPanel = this.tabs.get("Options")!.panel;
    this.ordering = new OrderingTab(this.tabs.get("Ordering")!.panel, {
      api: options.api,
      projectId: options.projectId,
      onNotice: (m, k) => this.notice(m, k),
    });
    this.story = new StoryTab(this.tabs.get("Story")!.panel, {
      api: options.api,
      projectId: options.projectId,
      onNotice: (m, k) => this.notice(m, k),
      socketFactory: options.socketFactory,
      wsUrl: options.wsUrl,
    });
  }

  async start(): Promise<void> {
    const { api, projectId } = this.options;
    this.vocab = await api.getVocab();
    this.project = await api.getProject(projectId);
    this.indexCharacters();
    this.renderBoardBar();
    this.renderElements();
    this.renderOptions();
    if (this.project.boards.length > 0) {
      this.openBoard(this.project.boards[0].id);
    }
    await this.story.loadStored();
    this.maybeShowTour();
  }

  private indexCharacters(): void {
    this.characters.clear();
    for (const c of this.project.characters) this.characters.set(c.id, c);
  }

  notice(message: string, kind: "error" | "info"): void {
    const entry = document.createElement("div");
    entry.className = `notice ${kind}`;
    entry.textContent = message;
    this.noticeBox.appendChild(entry);
    setTimeout(() => entry.remove(), 6000);
  }

  showTab(name: string): void {
    for (const [tab, { button, panel }] of this.tabs) {
      panel.hidden = tab !== name;
      button.classList.toggle("active", tab === name);
    }
    if (name === "Ordering" && this.currentBoardId) {
      void this.ordering.load(this.currentBoardId);
    }
    this.canvasHost.hidden = name === "Story";
  }

  // --- boards -----------------------------------------------------------------

  private renderBoardBar(): void {
    this.boardBar.textContent = "";
    for (const board of this.project.boards) {
      const button = document.createElement("button");
      button.className = "board-button";
      button.setAttribute("data-board-id", board.id);
      button.textContent = board.act_label;
      button.classList.toggle("active", board.id === this.currentBoardId);
      button.addEventListener("click", () => this.openBoard(board.id));
      this.boardBar.appendChild(button);
    }
    const add = document.createElement("button");
    add.className = "add-board";
    add.textContent = "+ board";
    add.addEventListener("click", () => void this.addBoard());
    this.boardBar.appendChild(add);
  }

  private async addBoard(): Promise<void> {
    try {
      await this.options.api.createBoard(this.options.projectId);
      await this.refreshProject();
      this.openBoard(this.project.boards[this.project.boards.length - 1].id);
    } catch (error) {
      this.notice(String(error), "error");
    }
  }

  async refreshProject(): Promise<void> {
    this.project = await this.options.api.getProject(this.options.projectId);
    this.indexCharacters();
    this.renderBoardBar();
    this.renderElements();
    const board = this.project.boards.find((b) => b.id === this.currentBoardId);
    if (board && this.mirror) this.mirror.applyBoard(board);
  }

  openBoard(boardId: string): void {
    const board = this.project.boards.find((b) => b.id === boardId);
    if (!board) return;
    this.currentBoardId = boardId;
    this.mirror = new BoardMirror(boardId, this.characters);
    this.canvasHost.textContent = "";
    this.canvas = new CanvasController(this.canvasHost, {
      api: this.options.api,
      projectId: this.options.projectId,
      mirror: this.mirror,
      onNotice: (m, k) => this.notice(m, k),
      rectOf: this.options.rectOf,
    });
    this.mirror.applyBoard(board);
    this.renderBoardBar();
  }

  // --- elements tab --------------------------------------------------------------

  private renderElements(): void {
    const panel = this.elementsPanel;
    panel.textContent = "";

    const charHeading = document.createElement("h3");
    charHeading.textContent = "Characters";
    panel.appendChild(charHeading);
    const charList = document.createElement("ul");
    charList.className = "character-list";
    for (const character of this.characters.values()) {
      charList.appendChild(this.characterItem(character));
    }
    panel.appendChild(charList);

    const addForm = document.createElement("div");
    addForm.className = "add-character";
    const nameInput = document.createElement("input");
    nameInput.placeholder = "New character name";
    const addButton = document.createElement("button");
    addButton.textContent = "Add";
    addButton.addEventListener("click", () => void this.addCharacter(nameInput));
    addForm.append(nameInput, addButton);
    panel.appendChild(addForm);

    const actionHeading = document.createElement("h3");
    actionHeading.textContent = "Actions";
    panel.appendChild(actionHeading);
    const actionList = document.createElement("ul");
    actionList.className = "action-list";
    for (const label of this.vocab.actions) {
      actionList.appendChild(
        this.paletteItem({ type: "action", label, is_custom: false }, label),
      );
    }
    panel.appendChild(actionList);

    const customRow = document.createElement("div");
    customRow.className = "custom-action";
    const customInput = document.createElement("input");
    customInput.placeholder = "Custom action";
    const customItem = this.paletteItem(
      { type: "action", label: "", is_custom: true },
      "drag me",
    );
    customInput.addEventListener("input", () => {
      customItem.setAttribute("data-label", customInput.value);
      customItem.querySelector("span")!.textContent = customInput.value || "drag me";
    });
    customRow.append(customInput, customItem);
    panel.appendChild(customRow);

    const relHeading = document.createElement("h3");
    relHeading.textContent = "Relationships";
    panel.appendChild(relHeading);
    const relRow = document.createElement("div");
    relRow.className = "custom-relationship";
    const relInput = document.createElement("input");
    relInput.placeholder = "Relationship label (e.g. brother of)";
    const relItem = this.paletteItem({ type: "relationship", label: "" }, "drag me");
    relInput.addEventListener("input", () => {
      relItem.setAttribute("data-label", relInput.value);
      relItem.querySelector("span")!.textContent = relInput.value || "drag me";
    });
    relRow.append(relInput, relItem);
    panel.appendChild(relRow);
  }

  private characterItem(character: CharacterDoc): HTMLElement {
    const item = this.paletteItem(
      { type: "character_ref", character_id: character.id },
      character.name,
    );
    item.classList.add("character-item");
    item.setAttribute("data-character-id", character.id);

    const attach = document.createElement("button");
    attach.className = "attach-image";
    attach.title = "Attach an image; the model describes the appearance";
    attach.textContent = "\u{1F4CE}";
    const fileInput = document.createElement("input");
    fileInput.type = "file";
    fileInput.accept = "image/*";
    fileInput.hidden = true;
    fileInput.addEventListener("change", () => {
      const file = fileInput.files?.[0];
      if (file) void this.uploadImage(character.id, file);
    });
    attach.addEventListener("click", () => fileInput.click());

    const preview = document.createElement("button");
    preview.className = "preview-image";
    preview.title = "Preview the image and generated description";
    preview.textContent = "\u{1F441}";
    preview.disabled = !character.image_ref && !this.previews.has(character.id);
    preview.addEventListener("click", () => this.showPreview(character.id));

    item.append(attach, fileInput, preview);
    return item;
  }

  private async addCharacter(input: HTMLInputElement): Promise<void> {
    try {
      const doc = await this.options.api.createCharacter(this.options.projectId, input.value);
      input.value = "";
      this.project.characters.push(doc);
      this.indexCharacters();
      this.renderElements();
    } catch (error) {
      this.notice(error instanceof ApiError ? error.message : String(error), "error");
    }
  }

  private async uploadImage(characterId: string, file: File): Promise<void> {
    try {
      this.previews.set(characterId, URL.createObjectURL(file));
      const doc = await this.options.api.uploadCharacterImage(
        this.options.projectId,
        characterId,
        file,
        file.name,
      );
      const existing = this.characters.get(characterId);
      if (existing) {
        existing.appearance = doc.appearance;
        existing.image_ref = doc.image_ref;
      }
      this.renderElements();
      this.notice(`Described ${doc.name}'s appearance from the image.`, "info");
    } catch (error) {
      this.notice(error instanceof ApiError ? error.message : String(error), "error");
    }
  }

  private showPreview(characterId: string): void {
    const character = this.characters.get(characterId);
    if (!character) return;
    const overlay = document.createElement("div");
    overlay.className = "preview-overlay";
    const card = document.createElement("div");
    card.className = "preview-card";
    const url = this.previews.get(characterId);
    if (url) {
      const img = document.createElement("img");
      img.src = url;
      card.appendChild(img);
    }
    const text = document.createElement("p");
    text.textContent = character.appearance ?? "No description yet.";
    const close = document.createElement("button");
    close.textContent = "Close";
    close.addEventListener("click", () => overlay.remove());
    card.append(text, close);
    overlay.appendChild(card);
    this.root.appendChild(overlay);
  }

  /** A draggable palette entry; mouse-drag it onto the canvas to drop. */
  private paletteItem(kind: KindDoc, label: string): HTMLElement {
    const item = document.createElement("li");
    item.className = `palette-item kind-${kind.type}`;
    item.setAttribute("data-kind", kind.type);
    if (kind.character_id) item.setAttribute("data-character-id", kind.character_id);
    item.setAttribute("data-label", kind.label ?? "");
    if (kind.is_custom) item.setAttribute("data-custom", "1");
    const span = document.createElement("span");
    span.textContent = label;
    item.appendChild(span);
    item.addEventListener("mousedown", (event) => this.startPaletteDrag(item, event));
    return item;
  }

  private startPaletteDrag(item: HTMLElement, event: MouseEvent): void {
    event.preventDefault();
    const ghost = document.createElement("div");
    ghost.className = "drag-ghost";
    ghost.textContent = item.getAttribute("data-label") || item.textContent || "";
    document.body.appendChild(ghost);
    const move = (e: MouseEvent) => {
      ghost.style.left = `${e.clientX + 4}px`;
      ghost.style.top = `${e.clientY + 4}px`;
    };
    const up = (e: MouseEvent) => {
      document.removeEventListener("mousemove", move);
      document.removeEventListener("mouseup", up);
      ghost.remove();
      void this.dropFromPalette(item, e.clientX, e.clientY);
    };
    document.addEventListener("mousemove", move);
    document.addEventListener("mouseup", up);
  }

  async dropFromPalette(item: HTMLElement, clientX: number, clientY: number): Promise<void> {
    if (!this.canvas) return;
    const rectOf = this.options.rectOf ?? ((el: Element) => el.getBoundingClientRect());
    const rect = rectOf(this.canvas.svg);
    const inside =
      clientX >= rect.left &&
      clientX <= rect.left + rect.width &&
      clientY >= rect.top &&
      clientY <= rect.top + rect.height;
    if (!inside) return;
    const type = item.getAttribute("data-kind") as KindDoc["type"];
    const kind: KindDoc =
      type === "character_ref"
        ? { type, character_id: item.getAttribute("data-character-id") ?? "" }
        : {
            type,
            label: item.getAttribute("data-label") ?? "",
            is_custom: item.getAttribute("data-custom") === "1",
          };
    await this.canvas.dropElement(kind, clientX, clientY);
  }

  // --- options tab ------------------------------------------------------------------

  private renderOptions(): void {
    const panel = this.optionsPanel;
    panel.textContent = "";
    const heading = document.createElement("h3");
    heading.textContent = "Story options";
    panel.appendChild(heading);

    const genreLabel = document.createElement("label");
    genreLabel.textContent = "Genre ";
    const genreSelect = document.createElement("select");
    genreSelect.className = "genre-select";
    for (const genre of this.vocab.genres) {
      const option = document.createElement("option");
      option.value = genre;
      option.textContent = genre;
      option.selected = genre === this.project.genre;
      genreSelect.appendChild(option);
    }
    genreSelect.addEventListener("change", () =>
      void this.patch({ genre: genreSelect.value }),
    );
    genreLabel.appendChild(genreSelect);

    const structureLabel = document.createElement("label");
    structureLabel.textContent = "Structure ";
    const structureSelect = document.createElement("select");
    structureSelect.className = "structure-select";
    for (const structure of this.vocab.structures) {
      const option = document.createElement("option");
      option.value = structure.value;
      option.textContent =
        structure.display_name +
        (structure.boards_required ? ` (${structure.boards_required} boards)` : "");
      option.selected = structure.value === this.project.structure;
      structureSelect.appendChild(option);
    }
    structureSelect.addEventListener("change", () =>
      void this.patch({ structure: structureSelect.value as ProjectDoc["structure"] }),
    );
    structureLabel.appendChild(structureSelect);

    const validation = document.createElement("div");
    validation.className = "validation-report";
    panel.append(genreLabel, structureLabel, validation);
    this.renderValidation(this.project.validation ?? []);
  }

  private renderValidation(violations: string[]): void {
    const box = this.optionsPanel.querySelector(".validation-report");
    if (!box) return;
    box.textContent = "";
    if (violations.length === 0) return;
    const list = document.createElement("ul");
    for (const violation of violations) {
      const item = document.createElement("li");
      item.textContent = violation;
      list.appendChild(item);
    }
    box.appendChild(list);
  }

  private async patch(patch: { genre?: string; structure?: ProjectDoc["structure"] }): Promise<void> {
    try {
      const doc = await this.options.api.patchProject(this.options.projectId, patch);
      this.project = doc;
      this.indexCharacters();
      this.renderBoardBar();
      this.renderValidation(doc.validation ?? []);
      if (doc.validation && doc.validation.length > 0) {
        this.notice(doc.validation.join("; "), "info");
      }
    } catch (error) {
      this.notice(error instanceof ApiError ? error.message : String(error), "error");
    }
  }

  // --- guided tour ---------------------------------------------------------------------

  private get storage(): Pick<Storage, "getItem" | "setItem"> {
    return this.options.storage ?? window.localStorage;
  }

  maybeShowTour(): void {
    if (this.storage.getItem(TOUR_KEY) === "1") return;
    let step = 0;
    const overlay = document.createElement("div");
    overlay.className = "tour-overlay";
    const card = document.createElement("div");
    card.className = "tour-card";
    const text = document.createElement("p");
    const next = document.createElement("button");
    next.className = "tour-next";
    const skip = document.createElement("button");
    skip.className = "tour-skip";
    skip.textContent = "Later";
    const render = () => {
      text.textContent = `${step + 1}/${TOUR_STEPS.length} ${TOUR_STEPS[step]}`;
      next.textContent = step === TOUR_STEPS.length - 1 ? "Done" : "Next";
    };
    next.addEventListener("click", () => {
      if (step === TOUR_STEPS.length - 1) {
        this.storage.setItem(TOUR_KEY, "1"); // only completion silences it
        overlay.remove();
      } else {
        step += 1;
        render();
      }
    });
    // dismissible, but it returns next session until completed
    skip.addEventListener("click", () => overlay.remove());
    render();
    card.append(text, next, skip);
    overlay.appendChild(card);
    this.root.appendChild(overlay);
  }
}
