/**
 * Story tab: start generation, render chapters incrementally from the
 * progress stream, and fall back to the stored story on reload.
 */

import { ApiError, StoryloomApi } from "./api.js";
import type { ProgressFrame } from "./api.js";
import { ProgressStream, progressUrl, type SocketFactory } from "./progress.js";

export interface StoryTabOptions {
  api: StoryloomApi;
  projectId: string;
  onNotice: (message: string, kind: "error" | "info") => void;
  socketFactory?: SocketFactory;
  wsUrl?: (jobId: string) => string;
}

export class StoryTab {
  private panes = new Map<number, HTMLElement>();
  private banner: HTMLElement;
  private chapterBox: HTMLElement;
  private generateButton: HTMLButtonElement;
  private cancelButton: HTMLButtonElement;
  private stream: ProgressStream | null = null;
  private activeJobId: string | null = null;

  constructor(
    readonly element: HTMLElement,
    private options: StoryTabOptions,
  ) {
    element.classList.add("story-tab");
    const controls = document.createElement("div");
    controls.className = "story-controls";
    this.generateButton = document.createElement("button");
    this.generateButton.className = "generate";
    this.generateButton.textContent = "Generate story";
    this.generateButton.addEventListener("click", () => void this.generate());
    this.cancelButton = document.createElement("button");
    this.cancelButton.className = "cancel";
    this.cancelButton.textContent = "Cancel";
    this.cancelButton.hidden = true;
    this.cancelButton.addEventListener("click", () => void this.cancel());
    controls.append(this.generateButton, this.cancelButton);

    this.banner = document.createElement("div");
    this.banner.className = "story-banner";
    this.banner.hidden = true;

    this.chapterBox = document.createElement("div");
    this.chapterBox.className = "chapters";

    element.append(controls, this.banner, this.chapterBox);
  }

  /** Reload path: render whatever the server has stored. */
  async loadStored(): Promise<void> {
    const story = await this.options.api.getStory(this.options.projectId);
    this.chapterBox.textContent = "";
    this.panes.clear();
    for (const chapter of story.chapters) {
      const pane = this.paneFor(chapter.index);
      this.fillPane(pane, chapter.text, true);
    }
  }

  async generate(): Promise<void> {
    this.hideBanner();
    try {
      const job = await this.options.api.generate(this.options.projectId);
      this.chapterBox.textContent = "";
      this.panes.clear();
      this.activeJobId = job.job_id;
      this.generateButton.disabled = true;
      this.cancelButton.hidden = false;
      this.subscribe(job.job_id);
    } catch (error) {
      if (error instanceof ApiError && error.violations) {
        this.showBanner(
          "The storyboard is not ready to generate:\n" + error.violations.join("\n"),
          "error",
        );
      } else if (error instanceof ApiError && error.status === 409) {
        this.showBanner("A story is already being generated for this project.", "info");
      } else {
        this.showBanner(String(error), "error");
      }
    }
  }

  private subscribe(jobId: string): void {
    this.stream?.close();
    const url = (this.options.wsUrl ?? ((id: string) => progressUrl(id)))(jobId);
    this.stream = new ProgressStream(url, {
      onFrame: (frame) => this.onFrame(frame),
      onResubscribe: () =>
        this.options.onNotice("Progress stream dropped - resubscribing.", "info"),
      socketFactory: this.options.socketFactory,
    });
    this.stream.connect();
  }

  private onFrame(frame: ProgressFrame): void {
    switch (frame.kind) {
      case "chapter_started": {
        const pane = this.paneFor(frame.chapter_index!);
        pane.querySelector(".status")!.textContent = "writing...";
        break;
      }
      case "text_chunk": {
        const pane = this.paneFor(frame.chapter_index!);
        this.fillPane(pane, frame.payload, false);
        break;
      }
      case "chapter_done": {
        const pane = this.paneFor(frame.chapter_index!);
        pane.querySelector(".status")!.textContent = "summarizing...";
        break;
      }
      case "summary_done": {
        const pane = this.paneFor(frame.chapter_index!);
        pane.querySelector(".status")!.textContent = "done";
        pane.classList.add("complete");
        break;
      }
      case "job_done": {
        this.finishRun();
        this.options.onNotice("Story complete.", "info");
        // a resubscribed stream replays only the terminal frame, so the
        // chapters themselves come from the stored story
        void this.loadStored();
        break;
      }
      case "error": {
        this.finishRun();
        const where = frame.chapter_index ? ` while writing chapter ${frame.chapter_index}` : "";
        this.showBanner(`Generation stopped${where}: ${frame.payload}`, "error");
        void this.loadStored();
        break;
      }
    }
  }

  private finishRun(): void {
    this.generateButton.disabled = false;
    this.cancelButton.hidden = true;
    this.activeJobId = null;
  }

  async cancel(): Promise<void> {
    if (this.activeJobId) {
      await this.options.api.cancelJob(this.activeJobId);
      this.options.onNotice("Cancellation requested.", "info");
    }
  }

  private paneFor(index: number): HTMLElement {
    let pane = this.panes.get(index);
    if (!pane) {
      pane = document.createElement("article");
      pane.className = "chapter-pane";
      pane.setAttribute("data-chapter", String(index));
      const heading = document.createElement("h3");
      heading.textContent = `Chapter ${index}`;
      const status = document.createElement("span");
      status.className = "status";
      const body = document.createElement("div");
      body.className = "chapter-text";
      pane.append(heading, status, body);
      this.panes.set(index, pane);
      // panes stay in chapter order even if frames raced the DOM
      const after = [...this.panes.keys()].filter((k) => k > index).sort((a, b) => a - b)[0];
      if (after !== undefined) {
        this.chapterBox.insertBefore(pane, this.panes.get(after)!);
      } else {
        this.chapterBox.appendChild(pane);
      }
    }
    return pane;
  }

  private fillPane(pane: HTMLElement, text: string, complete: boolean): void {
    pane.querySelector(".chapter-text")!.textContent = text;
    if (complete) {
      pane.classList.add("complete");
      pane.querySelector(".status")!.textContent = "done";
    }
  }

  private showBanner(message: string, kind: "error" | "info"): void {
    this.banner.textContent = message;
    this.banner.className = `story-banner ${kind}`;
    this.banner.hidden = false;
  }

  private hideBanner(): void {
    this.banner.hidden = true;
  }
}
