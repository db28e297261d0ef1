/** Subject side: blind-trial answering.
 *
 * Prompts arrive over the bridge; four labeled buttons send exactly
 * one answer each, then lock until the next prompt. Double clicks and
 * clicks with no active prompt are ignored.
 */

import { BridgeClient } from "../bridge.js";
import { MELODY_LETTERS, MELODY_NAMES, MelodyLetter } from "../messages.js";

export interface TrialHandle {
  readonly buttons: HTMLButtonElement[];
  readonly status: HTMLElement;
  answer(melody: MelodyLetter): boolean;
  dispose(): void;
}

export function trialView(root: HTMLElement, client: BridgeClient): TrialHandle {
  const doc = root.ownerDocument;
  const store = client.store;

  const section = doc.createElement("section");
  section.className = "trial-view";
  const status = doc.createElement("div");
  status.className = "trial-status";
  const row = doc.createElement("div");
  row.className = "answers";

  const buttons: HTMLButtonElement[] = [];

  const answer = (melody: MelodyLetter): boolean => {
    const sent = client.sendAnswer(melody);
    if (sent) sync();
    return sent;
  };

  for (const letter of MELODY_LETTERS) {
    const button = doc.createElement("button");
    button.className = "answer";
    button.dataset.melody = letter;
    button.textContent = `${letter} — ${MELODY_NAMES[letter]}`;
    button.disabled = true;
    button.addEventListener("click", () => answer(letter));
    buttons.push(button);
    row.append(button);
  }

  const sync = () => {
    const prompt = store.prompt;
    const active = store.connected && prompt !== null && !prompt.answered;
    for (const button of buttons) button.disabled = !active;
    if (!store.connected) {
      status.textContent = "bridge disconnected";
    } else if (prompt === null) {
      status.textContent = "waiting for the first trial";
    } else if (prompt.answered) {
      status.textContent = `trial ${prompt.trialIndex + 1}: answered`;
    } else {
      status.textContent = `trial ${prompt.trialIndex + 1}: which melody was that?`;
    }
  };
  const unsubscribe = store.subscribe(sync);
  sync();

  section.append(status, row);
  root.append(section);

  return {
    buttons,
    status,
    answer,
    dispose(): void {
      unsubscribe();
      section.remove();
    },
  };
}
