/** Subject-side display: animated linkage rendering from state messages.
 *
 * Each animation frame reads the single latest state out of the store
 * (stale ones were already dropped on ingest) and redraws the three
 * linkages, so render cost is bound by refresh rate, not stream rate.
 */

import {
  FALLBACK_GEOMETRY,
  linkageExtent,
  linkageJoints,
  makeTransform,
} from "../linkage.js";
import { GeometryMsg, StateMessage } from "../messages.js";
import { ConsoleStore } from "../store.js";

/** The slice of CanvasRenderingContext2D the renderer draws with. */
export interface Canvas2dLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  strokeStyle: string;
  fillStyle: string;
  lineWidth: number;
}

export interface SceneInput {
  state: StateMessage | null;
  geometry: GeometryMsg | null;
  widthPx: number;
  heightPx: number;
}

/** Pure scene painter; the view wires it to a real canvas. */
export function renderScene(ctx: Canvas2dLike, input: SceneInput): void {
  const { widthPx, heightPx } = input;
  ctx.clearRect(0, 0, widthPx, heightPx);
  if (input.state === null) return;
  const geometry = input.state.geometry ?? input.geometry ?? FALLBACK_GEOMETRY;
  const world = linkageExtent(geometry);
  const count = input.state.linkages.length;
  const cellW = widthPx / count;
  for (let i = 0; i < count; i += 1) {
    const linkage = input.state.linkages[i];
    const toPx = makeTransform(world, cellW, heightPx);
    const shift = (p: { x: number; y: number }) => ({
      x: p.x + i * cellW,
      y: p.y,
    });
    const joints = linkageJoints(geometry, linkage);
    const skinLeft = shift(toPx({ x: world.xMin, y: geometry.skin_plane_y_mm }));
    const skinRight = shift(toPx({ x: world.xMax, y: geometry.skin_plane_y_mm }));
    ctx.strokeStyle = "#888";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(skinLeft.x, skinLeft.y);
    ctx.lineTo(skinRight.x, skinRight.y);
    ctx.stroke();

    ctx.strokeStyle = linkage.in_contact ? "#e33" : "#2a6";
    ctx.lineWidth = 2;
    for (const [a, b] of [
      [joints.base1, joints.elbow1],
      [joints.elbow1, joints.foot],
      [joints.base2, joints.elbow2],
      [joints.elbow2, joints.foot],
    ] as const) {
      const pa = shift(toPx(a));
      const pb = shift(toPx(b));
      ctx.beginPath();
      ctx.moveTo(pa.x, pa.y);
      ctx.lineTo(pb.x, pb.y);
      ctx.stroke();
    }

    const foot = shift(toPx(joints.foot));
    ctx.fillStyle = linkage.in_contact ? "#e33" : "#555";
    ctx.beginPath();
    ctx.arc(foot.x, foot.y, linkage.in_contact ? 6 : 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

export type FrameScheduler = (callback: () => void) => void;

export interface DisplayViewOptions {
  /** Loop driver; null = no loop (tests call frame() themselves). */
  scheduler?: FrameScheduler | null;
  now?: () => number; // milliseconds, for the fps counter
  context?: Canvas2dLike | null; // defaults to the canvas 2d context
  widthPx?: number;
  heightPx?: number;
}

export interface DisplayHandle {
  /** Render one frame immediately (the loop calls this). */
  frame(): void;
  /** Frames rendered in the last rolling second. */
  fps(): number;
  drawsPerformed: number;
  lastDrawnTick: number | null;
  readonly canvas: HTMLCanvasElement;
  readonly overlay: HTMLElement;
  stop(): void;
}

export function displayView(
  root: HTMLElement,
  store: ConsoleStore,
  options: DisplayViewOptions = {},
): DisplayHandle {
  const doc = root.ownerDocument;
  const widthPx = options.widthPx ?? 720;
  const heightPx = options.heightPx ?? 260;
  const now = options.now ?? (() => performance.now());

  const section = doc.createElement("section");
  section.className = "display-view";
  const canvas = doc.createElement("canvas");
  canvas.width = widthPx;
  canvas.height = heightPx;
  const overlay = doc.createElement("div");
  overlay.className = "debug-overlay";
  section.append(canvas, overlay);
  root.append(section);

  const ctx =
    options.context !== undefined
      ? options.context
      : (canvas.getContext("2d") as Canvas2dLike | null);

  const frameTimes: number[] = [];
  let running = true;

  const handle: DisplayHandle = {
    drawsPerformed: 0,
    lastDrawnTick: null,
    canvas,
    overlay,
    frame(): void {
      const snapshot = store.snapshot();
      if (ctx !== null) {
        renderScene(ctx, {
          state: snapshot.latestState,
          geometry: snapshot.geometry,
          widthPx,
          heightPx,
        });
      }
      handle.drawsPerformed += 1;
      handle.lastDrawnTick = snapshot.latestState?.tick ?? null;
      const t = now();
      frameTimes.push(t);
      while (frameTimes.length > 0 && frameTimes[0] <= t - 1000) {
        frameTimes.shift();
      }
      overlay.textContent =
        `${handle.fps()} fps | states ${snapshot.statesReceived}` +
        ` | malformed ${snapshot.malformedCount}` +
        (snapshot.connected ? "" : " | disconnected");
    },
    fps(): number {
      return frameTimes.length;
    },
    stop(): void {
      running = false;
    },
  };

  const schedule =
    options.scheduler !== undefined
      ? options.scheduler
      : typeof requestAnimationFrame === "function"
        ? (cb: () => void) => void requestAnimationFrame(cb)
        : null;
  if (schedule !== null) {
    const loop = () => {
      if (!running) return;
      handle.frame();
      schedule(loop);
    };
    schedule(loop);
  }
  return handle;
}
