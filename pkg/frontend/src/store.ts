/** Single mutable state store; socket callbacks write, views read.
 *
 * State messages are latest-wins: only the newest one is retained, so
 * a 100 Hz stream rendered at any refresh rate cannot grow a queue.
 */

import {
  GeometryMsg,
  ParseOutcome,
  PromptMessage,
  StateMessage,
  Warn,
  parseServerMessage,
} from "./messages.js";

export interface PromptState {
  trialIndex: number;
  answered: boolean;
}

export interface Snapshot {
  connected: boolean;
  latestState: StateMessage | null;
  geometry: GeometryMsg | null;
  prompt: PromptState | null;
  statesReceived: number;
  promptsSeen: number;
  answersSent: number;
  malformedCount: number;
  ignoredCount: number;
  pressed: readonly number[];
}

export type Listener = () => void;

export class ConsoleStore {
  connected = false;
  latestState: StateMessage | null = null;
  geometry: GeometryMsg | null = null;
  prompt: PromptState | null = null;
  statesReceived = 0;
  promptsSeen = 0;
  answersSent = 0;
  malformedCount = 0;
  ignoredCount = 0;
  readonly pressed = new Set<number>();

  private listeners: Listener[] = [];
  private warn: Warn;

  constructor(warn: Warn = (text) => console.warn(text)) {
    this.warn = warn;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Apply one raw socket frame. */
  ingest(raw: string): void {
    const outcome: ParseOutcome = parseServerMessage(raw, this.warn);
    if (!outcome.ok) {
      if (outcome.reason === "malformed") this.malformedCount += 1;
      else this.ignoredCount += 1;
      this.notify();
      return;
    }
    const message = outcome.message;
    if (message.type === "state") this.applyState(message);
    else this.applyPrompt(message);
    this.notify();
  }

  private applyState(message: StateMessage): void {
    this.latestState = message; // previous state dropped, never queued
    this.statesReceived += 1;
    if (message.geometry) this.geometry = message.geometry;
  }

  private applyPrompt(message: PromptMessage): void {
    this.prompt = { trialIndex: message.trial_index, answered: false };
    this.promptsSeen += 1;
  }

  setConnected(connected: boolean): void {
    this.connected = connected;
    if (!connected) this.pressed.clear();
    this.notify();
  }

  /** Record a press; false if the channel is already down. */
  press(channel: number): boolean {
    if (this.pressed.has(channel)) return false;
    this.pressed.add(channel);
    this.notify();
    return true;
  }

  /** Record a release; false if the channel was not down. */
  release(channel: number): boolean {
    if (!this.pressed.delete(channel)) return false;
    this.notify();
    return true;
  }

  /** Mark the active prompt answered; false on double answers. */
  markAnswered(): boolean {
    if (this.prompt === null || this.prompt.answered) return false;
    this.prompt.answered = true;
    this.answersSent += 1;
    this.notify();
    return true;
  }

  snapshot(): Snapshot {
    return {
      connected: this.connected,
      latestState: this.latestState,
      geometry: this.geometry,
      prompt: this.prompt === null ? null : { ...this.prompt },
      statesReceived: this.statesReceived,
      promptsSeen: this.promptsSeen,
      answersSent: this.answersSent,
      malformedCount: this.malformedCount,
      ignoredCount: this.ignoredCount,
      pressed: [...this.pressed].sort((a, b) => a - b),
    };
  }
}
