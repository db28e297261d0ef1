/** Websocket client for the core bridge.
 *
 * All sends are synchronous from the calling event handler — the tap
 * path from pad press to socket.send is a single function call, which
 * is what keeps input-to-wire latency inside one frame.
 */

import {
  MelodyLetter,
  answerMessage,
  tapMessage,
} from "./messages.js";
import { ConsoleStore } from "./store.js";

/** The slice of WebSocket the client uses; tests substitute a fake. */
export interface BridgeSocket {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => BridgeSocket;

export type Clock = () => number; // milliseconds, monotonic

const DEFAULT_FORCE_N = 10.0; // pointer events carry no reliable force

function defaultFactory(url: string): BridgeSocket {
  return new WebSocket(url) as unknown as BridgeSocket;
}

export class BridgeClient {
  readonly store: ConsoleStore;
  defaultForceN = DEFAULT_FORCE_N;

  private url: string;
  private factory: SocketFactory;
  private clock: Clock;
  private socket: BridgeSocket | null = null;
  private open = false;

  constructor(
    url: string,
    store: ConsoleStore,
    factory: SocketFactory = defaultFactory,
    clock: Clock = () => performance.now(),
  ) {
    this.url = url;
    this.store = store;
    this.factory = factory;
    this.clock = clock;
  }

  connect(): void {
    if (this.socket !== null) throw new Error("bridge already connected");
    const socket = this.factory(this.url);
    socket.onopen = () => {
      this.open = true;
      this.store.setConnected(true);
    };
    socket.onmessage = (event) => {
      if (typeof event.data === "string") this.store.ingest(event.data);
    };
    socket.onclose = () => this.handleClose();
    socket.onerror = () => this.handleClose();
    this.socket = socket;
  }

  get connected(): boolean {
    return this.open;
  }

  private handleClose(): void {
    if (this.socket === null) return;
    this.open = false;
    // mid-hold disconnect: the wire is gone, so the press state is
    // resolved locally before views are told to disable input
    this.store.setConnected(false);
  }

  close(): void {
    const socket = this.socket;
    this.socket = null;
    this.open = false;
    if (socket !== null) {
      socket.onclose = null;
      socket.close();
    }
    this.store.setConnected(false);
  }

  private send(payload: object): boolean {
    if (this.socket === null || !this.open) return false;
    this.socket.send(JSON.stringify(payload));
    return true;
  }

  /** Press or release one pad; false when not connected or redundant. */
  sendTap(channel: number, kind: "Press" | "Release", forceN?: number): boolean {
    if (!this.open) return false;
    const transition =
      kind === "Press" ? this.store.press(channel) : this.store.release(channel);
    if (!transition) return false; // held pad: one Press until release
    const tUs = Math.round(this.clock() * 1000);
    return this.send(tapMessage(channel, kind, forceN ?? this.defaultForceN, tUs));
  }

  /** Answer the active prompt; false on double clicks or no prompt. */
  sendAnswer(melody: MelodyLetter): boolean {
    if (!this.open) return false;
    if (!this.store.markAnswered()) return false;
    return this.send(answerMessage(melody));
  }
}
