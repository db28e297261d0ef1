/** Drawing geometry for one inverted five-bar linkage.
 *
 * The bridge sends joint angles and the effector position; the two
 * elbows follow from the proximal links, so the whole mechanism can
 * be drawn without re-solving the kinematics.
 */

import { GeometryMsg, LinkageStateMsg } from "./messages.js";

export interface Point {
  x: number;
  y: number;
}

export interface LinkageJoints {
  base1: Point;
  base2: Point;
  elbow1: Point;
  elbow2: Point;
  foot: Point;
}

/** Default drawing geometry when no state has carried one yet. */
export const FALLBACK_GEOMETRY: GeometryMsg = {
  base_separation_mm: 30,
  proximal_length_mm: 25,
  distal_length_mm: 40,
  skin_plane_y_mm: -55,
  depth_max_mm: 3,
};

export function linkageJoints(
  geometry: GeometryMsg,
  state: LinkageStateMsg,
): LinkageJoints {
  const { base_separation_mm: d, proximal_length_mm: l1 } = geometry;
  return {
    base1: { x: 0, y: 0 },
    base2: { x: d, y: 0 },
    elbow1: { x: l1 * Math.cos(state.theta1_rad), y: l1 * Math.sin(state.theta1_rad) },
    elbow2: {
      x: d + l1 * Math.cos(state.theta2_rad),
      y: l1 * Math.sin(state.theta2_rad),
    },
    foot: { x: state.x_mm, y: state.y_mm },
  };
}

export interface WorldRect {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

/** World extent that fits one linkage in any pose, with headroom. */
export function linkageExtent(geometry: GeometryMsg): WorldRect {
  const reach = geometry.proximal_length_mm + geometry.distal_length_mm;
  const d = geometry.base_separation_mm;
  return {
    xMin: -geometry.proximal_length_mm - 5,
    xMax: d + geometry.proximal_length_mm + 5,
    yMin: -reach - 5,
    yMax: 10,
  };
}

export type Transform = (p: Point) => Point;

/** Uniform-scale world(mm, y up) -> canvas(px, y down) mapping. */
export function makeTransform(
  world: WorldRect,
  widthPx: number,
  heightPx: number,
): Transform {
  const worldW = world.xMax - world.xMin;
  const worldH = world.yMax - world.yMin;
  const scale = Math.min(widthPx / worldW, heightPx / worldH);
  const padX = (widthPx - worldW * scale) / 2;
  const padY = (heightPx - worldH * scale) / 2;
  return (p) => ({
    x: padX + (p.x - world.xMin) * scale,
    y: padY + (world.yMax - p.y) * scale,
  });
}
