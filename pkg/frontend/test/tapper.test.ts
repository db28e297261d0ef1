import { beforeEach, describe, expect, it } from "vitest";

import { tapperView } from "../src/views/tapper.js";
import { connectedClient } from "./fakes.js";

function mount() {
  const harness = connectedClient();
  const root = document.createElement("div");
  document.body.append(root);
  const view = tapperView(root, harness.client);
  return { ...harness, root, view };
}

function kinds(socket: { sentJson(): unknown[] }): string[] {
  return socket
    .sentJson()
    .map((m) => m as { type: string; channel?: number; kind?: string })
    .filter((m) => m.type === "tap")
    .map((m) => `${m.channel}:${m.kind}`);
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("tapperView", () => {
  it("emits Press on pointerdown and Release on pointerup", () => {
    const { socket, view } = mount();
    const pad2 = view.pads[1];
    pad2.dispatchEvent(new Event("pointerdown", { bubbles: true }));
    expect(kinds(socket)).toEqual(["2:Press"]);
    expect(pad2.classList.contains("pressed")).toBe(true);
    pad2.dispatchEvent(new Event("pointerup", { bubbles: true }));
    expect(kinds(socket)).toEqual(["2:Press", "2:Release"]);
    expect(pad2.classList.contains("pressed")).toBe(false);
  });

  it("holding a pad produces exactly one Press until release", () => {
    const { socket, view } = mount();
    const pad1 = view.pads[0];
    pad1.dispatchEvent(new Event("pointerdown"));
    pad1.dispatchEvent(new Event("pointerdown"));
    pad1.dispatchEvent(new Event("pointerdown"));
    pad1.dispatchEvent(new Event("pointerup"));
    expect(kinds(socket)).toEqual(["1:Press", "1:Release"]);
  });

  it("maps J/K/L to the three channels without key repeat", () => {
    const { socket } = mount();
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "j" }));
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "j", repeat: true }));
    document.dispatchEvent(new KeyboardEvent("keyup", { key: "j" }));
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "L" }));
    document.dispatchEvent(new KeyboardEvent("keyup", { key: "L" }));
    expect(kinds(socket)).toEqual(["1:Press", "1:Release", "3:Press", "3:Release"]);
  });

  it("releases a pad the pointer drags off of", () => {
    const { socket, view } = mount();
    const pad3 = view.pads[2];
    pad3.dispatchEvent(new Event("pointerdown"));
    pad3.dispatchEvent(new Event("pointerleave"));
    pad3.dispatchEvent(new Event("pointerleave")); // idle leave is a no-op
    expect(kinds(socket)).toEqual(["3:Press", "3:Release"]);
  });

  it("releases everything when the tab blurs", () => {
    const { socket, view } = mount();
    view.pads[0].dispatchEvent(new Event("pointerdown"));
    view.pads[2].dispatchEvent(new Event("pointerdown"));
    window.dispatchEvent(new Event("blur"));
    expect(kinds(socket).sort()).toEqual([
      "1:Press",
      "1:Release",
      "3:Press",
      "3:Release",
    ]);
  });

  it("sends the slider force with each press", () => {
    const { socket, view } = mount();
    view.slider.value = "4.5";
    view.pads[0].dispatchEvent(new Event("pointerdown"));
    const tap = socket.sentJson()[0] as { force_n: number };
    expect(tap.force_n).toBe(4.5);
  });

  it("on disconnect mid-hold shows the banner and disables pads", () => {
    const { socket, store, view } = mount();
    view.pads[1].dispatchEvent(new Event("pointerdown"));
    expect(view.banner.hidden).toBe(true);
    socket.serverClose();
    expect(view.banner.hidden).toBe(false);
    expect(view.pads.every((p) => (p as HTMLButtonElement).disabled)).toBe(true);
    expect(view.pads[1].classList.contains("pressed")).toBe(false);
    expect(store.snapshot().pressed).toEqual([]);
    // input is dead: no further wire traffic
    view.pads[1].dispatchEvent(new Event("pointerdown"));
    expect(kinds(socket)).toEqual(["2:Press"]);
  });

  it("dispose removes listeners and the view", () => {
    const { socket, root, view } = mount();
    view.dispose();
    expect(root.querySelector(".tapper-view")).toBeNull();
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "j" }));
    expect(kinds(socket)).toEqual([]);
  });
});
