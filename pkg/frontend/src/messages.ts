/** Bridge message schema: JSON over the websocket at /bridge.
 *
 * The browser never speaks the binary datagram protocol; the core
 * process translates taps into force frames and display states into
 * the JSON below. Every message round-trips through JSON unchanged.
 */

export type MelodyLetter = "A" | "B" | "C" | "D";

export const MELODY_LETTERS: readonly MelodyLetter[] = ["A", "B", "C", "D"];

export const MELODY_NAMES: Readonly<Record<MelodyLetter, string>> = {
  A: "Baby Shark",
  B: "Happy Birthday",
  C: "Jingle Bells",
  D: "William Tell Overture",
};

export interface LinkageStateMsg {
  x_mm: number;
  y_mm: number;
  in_contact: boolean;
  depth_mm: number;
  theta1_rad: number;
  theta2_rad: number;
}

export interface GeometryMsg {
  base_separation_mm: number;
  proximal_length_mm: number;
  distal_length_mm: number;
  skin_plane_y_mm: number;
  depth_max_mm: number;
}

export interface StateMessage {
  type: "state";
  tick: number;
  linkages: LinkageStateMsg[];
  geometry?: GeometryMsg;
}

export interface PromptMessage {
  type: "prompt";
  trial_index: number;
}

export interface TapMessage {
  type: "tap";
  channel: number; // 1..3
  kind: "Press" | "Release";
  force_n: number;
  t_us: number;
}

export interface AnswerMessage {
  type: "answer";
  melody: MelodyLetter;
}

export type ServerMessage = StateMessage | PromptMessage;
export type ClientMessage = TapMessage | AnswerMessage;

export type Warn = (text: string) => void;

function isFiniteNumber(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

function isLinkageState(value: unknown): value is LinkageStateMsg {
  if (typeof value !== "object" || value === null) return false;
  const s = value as Record<string, unknown>;
  return (
    isFiniteNumber(s.x_mm) &&
    isFiniteNumber(s.y_mm) &&
    typeof s.in_contact === "boolean" &&
    isFiniteNumber(s.depth_mm) &&
    isFiniteNumber(s.theta1_rad) &&
    isFiniteNumber(s.theta2_rad)
  );
}

function isGeometry(value: unknown): value is GeometryMsg {
  if (typeof value !== "object" || value === null) return false;
  const g = value as Record<string, unknown>;
  return (
    isFiniteNumber(g.base_separation_mm) &&
    isFiniteNumber(g.proximal_length_mm) &&
    isFiniteNumber(g.distal_length_mm) &&
    isFiniteNumber(g.skin_plane_y_mm) &&
    isFiniteNumber(g.depth_max_mm)
  );
}

export type ParseOutcome =
  | { ok: true; message: ServerMessage }
  | { ok: false; reason: "unknown" | "malformed" };

/** Validate one raw frame from the bridge socket.
 *
 * Unknown types are ignored with a console warning; structurally bad
 * state/prompt payloads are reported as malformed so the display view
 * can count them in its debug overlay.
 */
export function parseServerMessage(
  raw: string,
  warn: Warn = (text) => console.warn(text),
): ParseOutcome {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    warn(`bridge: undecodable frame ${raw.slice(0, 40)}`);
    return { ok: false, reason: "malformed" };
  }
  if (typeof data !== "object" || data === null) {
    warn("bridge: non-object frame");
    return { ok: false, reason: "malformed" };
  }
  const message = data as Record<string, unknown>;
  switch (message.type) {
    case "state": {
      const linkages = message.linkages;
      if (
        !isFiniteNumber(message.tick) ||
        !Array.isArray(linkages) ||
        linkages.length === 0 ||
        !linkages.every(isLinkageState) ||
        (message.geometry !== undefined && !isGeometry(message.geometry))
      ) {
        warn("bridge: malformed state message");
        return { ok: false, reason: "malformed" };
      }
      return { ok: true, message: message as unknown as StateMessage };
    }
    case "prompt": {
      if (!isFiniteNumber(message.trial_index) || message.trial_index < 0) {
        warn("bridge: malformed prompt message");
        return { ok: false, reason: "malformed" };
      }
      return { ok: true, message: message as unknown as PromptMessage };
    }
    default:
      warn(`bridge: ignoring message type ${JSON.stringify(message.type)}`);
      return { ok: false, reason: "unknown" };
  }
}

export function tapMessage(
  channel: number,
  kind: "Press" | "Release",
  forceN: number,
  tUs: number,
): TapMessage {
  if (channel < 1 || channel > 3 || !Number.isInteger(channel)) {
    throw new Error(`channel ${channel} outside 1..3`);
  }
  return { type: "tap", channel, kind, force_n: forceN, t_us: tUs };
}

export function answerMessage(melody: MelodyLetter): AnswerMessage {
  return { type: "answer", melody };
}
