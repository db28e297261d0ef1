/** Tapper side: three pads streaming Press/Release over the bridge.
 *
 * Pointer, touch (via pointer events) and the J/K/L keys all funnel
 * into the same press/release pair, and every path that can lose a
 * held pad (pointer leave, tab blur, disconnect) releases it, so one
 * Press always pairs with exactly one Release.
 */

import { BridgeClient } from "../bridge.js";

export const PAD_KEYS: Readonly<Record<string, number>> = {
  j: 1,
  k: 2,
  l: 3,
};

export interface TapperHandle {
  press(channel: number): void;
  release(channel: number): void;
  releaseAll(): void;
  readonly pads: HTMLElement[];
  readonly slider: HTMLInputElement;
  readonly banner: HTMLElement;
  forceN(): number;
  dispose(): void;
}

export function tapperView(root: HTMLElement, client: BridgeClient): TapperHandle {
  const doc = root.ownerDocument;
  const win = doc.defaultView;
  const store = client.store;

  const section = doc.createElement("section");
  section.className = "tapper-view";

  const banner = doc.createElement("div");
  banner.className = "banner";
  banner.hidden = true;
  banner.textContent = "bridge disconnected — input disabled";

  const row = doc.createElement("div");
  row.className = "pads";
  const pads: HTMLElement[] = [];

  const sliderLabel = doc.createElement("label");
  sliderLabel.textContent = "press force (N) ";
  const slider = doc.createElement("input");
  slider.type = "range";
  slider.min = "0.5";
  slider.max = "10";
  slider.step = "0.5";
  slider.value = "10";
  sliderLabel.append(slider);

  const forceN = () => Number(slider.value);

  const press = (channel: number) => {
    if (!client.connected) return;
    if (client.sendTap(channel, "Press", forceN())) {
      pads[channel - 1].classList.add("pressed");
    }
  };
  const release = (channel: number) => {
    if (client.sendTap(channel, "Release")) {
      pads[channel - 1].classList.remove("pressed");
    }
  };
  const releaseAll = () => {
    for (const channel of [...store.pressed]) release(channel);
  };

  for (let channel = 1; channel <= 3; channel += 1) {
    const pad = doc.createElement("button");
    pad.className = "pad";
    pad.dataset.channel = String(channel);
    pad.textContent = `pad ${channel}`;
    pad.addEventListener("pointerdown", (event) => {
      event.preventDefault();
      press(channel);
    });
    pad.addEventListener("pointerup", () => release(channel));
    pad.addEventListener("pointercancel", () => release(channel));
    pad.addEventListener("pointerleave", () => release(channel));
    pads.push(pad);
    row.append(pad);
  }

  const onKeyDown = (event: KeyboardEvent) => {
    const channel = PAD_KEYS[event.key.toLowerCase()];
    if (channel === undefined || event.repeat) return;
    press(channel);
  };
  const onKeyUp = (event: KeyboardEvent) => {
    const channel = PAD_KEYS[event.key.toLowerCase()];
    if (channel !== undefined) release(channel);
  };
  const onBlur = () => releaseAll();

  doc.addEventListener("keydown", onKeyDown);
  doc.addEventListener("keyup", onKeyUp);
  win?.addEventListener("blur", onBlur);

  const syncConnection = () => {
    const connected = store.connected;
    banner.hidden = connected;
    for (const pad of pads) {
      (pad as HTMLButtonElement).disabled = !connected;
      if (!connected) pad.classList.remove("pressed");
    }
  };
  const unsubscribe = store.subscribe(syncConnection);
  syncConnection();

  section.append(banner, row, sliderLabel);
  root.append(section);

  return {
    press,
    release,
    releaseAll,
    pads,
    slider,
    banner,
    forceN,
    dispose(): void {
      unsubscribe();
      doc.removeEventListener("keydown", onKeyDown);
      doc.removeEventListener("keyup", onKeyUp);
      win?.removeEventListener("blur", onBlur);
      section.remove();
    },
  };
}
