"""Planar kinematics of one inverted five-bar linkage.

Two motors sit on a common base line; each drives a proximal link of
length L1 whose tip (the elbow) connects through a distal link of
length L2 to the shared end effector. Motors point away from the skin,
so the working side is y < 0 and angles are measured from +x.

Both directions are closed form: the effector is the intersection of
the two distal circles (FK), and each elbow is the intersection of a
proximal and a distal circle (IK). Branch choice is fixed per geometry
so trajectories never teleport between mirror solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

_DEG = math.pi / 180.0


class Branch(Enum):
    ELBOW_OUT = "elbow_out"  # elbows bow away from the centerline, effector low
    ELBOW_IN = "elbow_in"


class Unreachable(Exception):
    """Pose outside the workspace; carries the nearest attainable point."""

    def __init__(self, message: str, nearest: tuple[float, float] | None = None):
        super().__init__(message)
        self.nearest = nearest


@dataclass(frozen=True)
class LinkageGeometry:
    base_separation_mm: float = 30.0
    proximal_length_mm: float = 25.0
    distal_length_mm: float = 40.0
    angle_min_rad: float = -170.0 * _DEG  # applies to each motor
    angle_max_rad: float = -10.0 * _DEG
    branch: Branch = Branch.ELBOW_OUT

    def __post_init__(self):
        if min(self.base_separation_mm, self.proximal_length_mm,
               self.distal_length_mm) <= 0:
            raise ValueError("link dimensions must be positive")
        if not 2 * self.distal_length_mm > self.base_separation_mm:
            raise ValueError("2*L2 must exceed base separation")
        if not self.angle_min_rad < self.angle_max_rad:
            raise ValueError("angle_min_rad must be below angle_max_rad")

    @property
    def x_center(self) -> float:
        return self.base_separation_mm / 2.0

    def in_limits(self, theta_rad: float) -> bool:
        return self.angle_min_rad <= theta_rad <= self.angle_max_rad


def _elbows(geom: LinkageGeometry, theta1_rad: float, theta2_rad: float):
    l1 = geom.proximal_length_mm
    return ((l1 * math.cos(theta1_rad), l1 * math.sin(theta1_rad)),
            (geom.base_separation_mm + l1 * math.cos(theta2_rad),
             l1 * math.sin(theta2_rad)))


def forward_kinematics(geom: LinkageGeometry, theta1_rad: float,
                       theta2_rad: float) -> tuple[float, float]:
    """Effector position for given motor angles.

    Intersects the two distal circles; ELBOW_OUT picks the lower-y
    solution. Raises Unreachable when the elbows are too far apart or
    coincide.
    """
    (e1x, e1y), (e2x, e2y) = _elbows(geom, theta1_rad, theta2_rad)
    dx, dy = e2x - e1x, e2y - e1y
    dist = math.hypot(dx, dy)
    l2 = geom.distal_length_mm
    if dist > 2 * l2:
        raise Unreachable(f"elbow gap {dist:.3f} mm exceeds 2*L2 = {2 * l2}")
    if dist == 0.0:
        raise Unreachable("elbows coincide, effector undefined")
    half = dist / 2.0
    h = math.sqrt(max(0.0, l2 * l2 - half * half))
    mx, my = e1x + dx / 2.0, e1y + dy / 2.0
    # unit perpendicular of the elbow chord; -perp lowers y when dx > 0
    px, py = -dy / dist, dx / dist
    if geom.branch is Branch.ELBOW_OUT:
        cand = ((mx + h * px, my + h * py), (mx - h * px, my - h * py))
        return min(cand, key=lambda p: p[1])
    cand = ((mx + h * px, my + h * py), (mx - h * px, my - h * py))
    return max(cand, key=lambda p: p[1])


def _arm_angle(base: tuple[float, float], target: tuple[float, float],
               geom: LinkageGeometry, want_positive_cross: bool) -> float | None:
    """Motor angle putting this arm's elbow on the requested side.

    The side is the sign of cross(elbow - base, target - elbow); for
    ELBOW_OUT the left arm bows positive, the right negative.
    """
    l1, l2 = geom.proximal_length_mm, geom.distal_length_mm
    dx, dy = target[0] - base[0], target[1] - base[1]
    dist = math.hypot(dx, dy)
    if dist > l1 + l2 or dist < abs(l1 - l2) or dist == 0.0:
        return None
    a = (l1 * l1 - l2 * l2 + dist * dist) / (2.0 * dist)
    h = math.sqrt(max(0.0, l1 * l1 - a * a))
    ux, uy = dx / dist, dy / dist
    mx, my = base[0] + a * ux, base[1] + a * uy
    best = None
    for sign in (1.0, -1.0):
        ex, ey = mx - sign * h * uy, my + sign * h * ux
        cross = ((ex - base[0]) * (target[1] - ey)
                 - (ey - base[1]) * (target[0] - ex))
        if (cross >= 0) != want_positive_cross and cross != 0.0:
            continue
        theta = math.atan2(ey - base[1], ex - base[0])
        if geom.in_limits(theta):
            best = theta
    return best


def _solve_ik(geom: LinkageGeometry,
              target: tuple[float, float]) -> tuple[float, float] | None:
    """Closed-form IK without error reporting; None when unreachable."""
    out = geom.branch is Branch.ELBOW_OUT
    theta1 = _arm_angle((0.0, 0.0), target, geom, want_positive_cross=out)
    theta2 = _arm_angle((geom.base_separation_mm, 0.0), target, geom,
                        want_positive_cross=not out)
    if theta1 is None or theta2 is None:
        return None
    try:
        fx, fy = forward_kinematics(geom, theta1, theta2)
    except Unreachable:
        return None
    err = math.hypot(fx - target[0], fy - target[1])
    if err > 1e-9 * max(1.0, math.hypot(*target)):
        return None  # solution lies on the mirror branch
    return theta1, theta2


def inverse_kinematics(geom: LinkageGeometry,
                       target: tuple[float, float]) -> tuple[float, float]:
    """Motor angles reaching the target on the configured branch.

    Rejects targets whose closed-form solution violates angle limits or
    reproduces only the mirror effector; Unreachable carries the
    nearest reachable point.
    """
    angles = _solve_ik(geom, target)
    if angles is None:
        raise Unreachable(f"target {target} outside workspace",
                          nearest=nearest_reachable(geom, target))
    return angles


def workspace_contains(geom: LinkageGeometry,
                       point: tuple[float, float]) -> bool:
    return _solve_ik(geom, point) is not None


def _interior_point(geom: LinkageGeometry) -> tuple[float, float] | None:
    """A pose known reachable, used as the anchor for boundary searches."""
    candidates = []
    for frac in (0.5, 0.25, 0.75):
        t = geom.angle_min_rad + frac * (geom.angle_max_rad - geom.angle_min_rad)
        try:
            candidates.append(forward_kinematics(geom, t, t))
        except Unreachable:
            continue
    for cand in candidates:
        if _solve_ik(geom, cand) is not None:
            return cand
    return None


def nearest_reachable(geom: LinkageGeometry,
                      target: tuple[float, float],
                      iterations: int = 60) -> tuple[float, float] | None:
    """Closest workspace point along the segment from the interior anchor.

    Bisects the reachable/unreachable transition; exact enough for
    clamping servo targets (the segment is millimetres long in practice).
    """
    if _solve_ik(geom, target) is not None:
        return target
    anchor = _interior_point(geom)
    if anchor is None:
        return None
    lo, hi = 0.0, 1.0  # fraction along anchor -> target; lo reachable
    for _ in range(iterations):
        mid = (lo + hi) / 2.0
        point = (anchor[0] + mid * (target[0] - anchor[0]),
                 anchor[1] + mid * (target[1] - anchor[1]))
        if _solve_ik(geom, point) is not None:
            lo = mid
        else:
            hi = mid
    return (anchor[0] + lo * (target[0] - anchor[0]),
            anchor[1] + lo * (target[1] - anchor[1]))
