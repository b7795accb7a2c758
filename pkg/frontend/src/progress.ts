/**
 * Progress stream subscription over WebSocket.
 *
 * The server replays from the subscription point and always ends with a
 * terminal frame, so a dropped connection can simply resubscribe: a
 * reconnect after completion yields the single terminal replay frame.
 */

import type { ProgressFrame } from "./api.js";

export interface SocketLike {
  onmessage: ((event: { data: string }) => void) | null;
  onclose: ((event: unknown) => void) | null;
  onerror: ((event: unknown) => void) | null;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

const defaultFactory: SocketFactory = (url) => new WebSocket(url) as unknown as SocketLike;

export interface ProgressStreamOptions {
  onFrame: (frame: ProgressFrame) => void;
  onResubscribe?: (attempt: number) => void;
  socketFactory?: SocketFactory;
  /** Delay before resubscribing after an unexpected drop. */
  retryDelayMs?: number;
  maxRetries?: number;
}

export function progressUrl(jobId: string, base = "/api/v1"): string {
  const loc = typeof window !== "undefined" ? window.location : undefined;
  const scheme = loc && loc.protocol === "https:" ? "wss" : "ws";
  const host = loc ? loc.host : "127.0.0.1";
  return `${scheme}://${host}${base}/jobs/${jobId}/progress`;
}

export class ProgressStream {
  private socket: SocketLike | null = null;
  private terminal = false;
  private closedByUs = false;
  private attempts = 0;

  constructor(
    private url: string,
    private options: ProgressStreamOptions,
  ) {}

  get done(): boolean {
    return this.terminal;
  }

  connect(): void {
    const factory = this.options.socketFactory ?? defaultFactory;
    const socket = factory(this.url);
    this.socket = socket;
    socket.onmessage = (event) => {
      const frame = JSON.parse(event.data) as ProgressFrame;
      if (frame.kind === "job_done" || frame.kind === "error") {
        this.terminal = true;
      }
      this.options.onFrame(frame);
      if (this.terminal) this.close();
    };
    socket.onclose = () => this.maybeResubscribe();
    socket.onerror = () => {
      /* the close handler drives the retry */
    };
  }

  private maybeResubscribe(): void {
    if (this.terminal || this.closedByUs) return;
    const max = this.options.maxRetries ?? 5;
    if (this.attempts >= max) return;
    this.attempts += 1;
    this.options.onResubscribe?.(this.attempts);
    const delay = this.options.retryDelayMs ?? 500;
    setTimeout(() => {
      if (!this.terminal && !this.closedByUs) this.connect();
    }, delay);
  }

  close(): void {
    this.closedByUs = true;
    this.socket?.close();
    this.socket = null;
  }
}
