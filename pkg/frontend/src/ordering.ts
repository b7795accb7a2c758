/**
 * Event-ordering tab: the board's extracted events as a reorderable list,
 * persisted through the event-order endpoint.
 */

import { ApiError, StoryloomApi } from "./api.js";
import type { BoardEvents } from "./api.js";

export interface OrderingOptions {
  api: StoryloomApi;
  projectId: string;
  onNotice: (message: string, kind: "error" | "info") => void;
}

export class OrderingTab {
  private boardId: string | null = null;
  private events: BoardEvents = { events: [], relations: [], incomplete: [] };
  private order: string[] = [];

  constructor(
    readonly element: HTMLElement,
    private options: OrderingOptions,
  ) {
    element.classList.add("ordering-tab");
  }

  async load(boardId: string): Promise<void> {
    this.boardId = boardId;
    this.events = await this.options.api.getEvents(this.options.projectId, boardId);
    this.order = this.events.events.map((e) => e.connector_id);
    this.render();
  }

  /** Move the event at `from` to `to` and persist the new permutation. */
  async move(from: number, to: number): Promise<void> {
    if (!this.boardId) return;
    if (to < 0 || to >= this.order.length || from === to) return;
    const next = [...this.order];
    const [moved] = next.splice(from, 1);
    next.splice(to, 0, moved);
    try {
      const result = await this.options.api.putEventOrder(
        this.options.projectId,
        this.boardId,
        next,
      );
      this.order = result.event_order;
      const byId = new Map(this.events.events.map((e) => [e.connector_id, e]));
      this.events.events = this.order.map((id) => byId.get(id)!).filter(Boolean);
      this.render();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.options.onNotice("A story is being generated - reordering is blocked until it finishes.", "info");
      } else if (error instanceof ApiError && error.code === "not_a_permutation") {
        this.options.onNotice("The event list changed elsewhere; refreshing.", "info");
        await this.load(this.boardId);
      } else {
        this.options.onNotice(String(error), "error");
      }
    }
  }

  render(): void {
    this.element.textContent = "";
    const heading = document.createElement("h3");
    heading.textContent = "Event order";
    this.element.appendChild(heading);

    if (this.events.incomplete.length > 0) {
      const warning = document.createElement("p");
      warning.className = "incomplete-warning";
      warning.textContent =
        `${this.events.incomplete.length} connector(s) are missing a character on one side ` +
        "and will block generation.";
      this.element.appendChild(warning);
    }

    const list = document.createElement("ol");
    list.className = "event-list";
    this.events.events.forEach((event, index) => {
      const item = document.createElement("li");
      item.setAttribute("data-connector-id", event.connector_id);
      const text = document.createElement("span");
      text.textContent = event.text;
      const up = document.createElement("button");
      up.className = "move-up";
      up.textContent = "↑";
      up.disabled = index === 0;
      up.addEventListener("click", () => void this.move(index, index - 1));
      const down = document.createElement("button");
      down.className = "move-down";
      down.textContent = "↓";
      down.disabled = index === this.events.events.length - 1;
      down.addEventListener("click", () => void this.move(index, index + 1));
      item.append(text, up, down);
      list.appendChild(item);
    });
    this.element.appendChild(list);

    if (this.events.relations.length > 0) {
      const relations = document.createElement("p");
      relations.className = "relations-note";
      relations.textContent =
        "Relationships (unordered): " + this.events.relations.map((r) => r.text).join(", ");
      this.element.appendChild(relations);
    }
  }
}
