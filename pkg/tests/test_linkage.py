"""Five-bar kinematics: closed-form FK/IK, branches, workspace queries."""

import math
import random

import pytest

from musinger.linkage import (Branch, LinkageGeometry, Unreachable,
                              forward_kinematics, inverse_kinematics,
                              nearest_reachable, workspace_contains)
from tests.helpers import TEST_RANDOM_SEED

DEG = math.pi / 180.0


def circle_intersection_oracle(geom, theta1, theta2):
    """Lower-y intersection of the two distal circles, solved longhand."""
    l1, l2, d = (geom.proximal_length_mm, geom.distal_length_mm,
                 geom.base_separation_mm)
    e1 = (l1 * math.cos(theta1), l1 * math.sin(theta1))
    e2 = (d + l1 * math.cos(theta2), l1 * math.sin(theta2))
    dx, dy = e2[0] - e1[0], e2[1] - e1[1]
    dist = math.hypot(dx, dy)
    a = dist / 2.0
    h = math.sqrt(l2 * l2 - a * a)
    mid = (e1[0] + dx / 2.0, e1[1] + dy / 2.0)
    candidates = [
        (mid[0] - h * dy / dist, mid[1] + h * dx / dist),
        (mid[0] + h * dy / dist, mid[1] - h * dx / dist),
    ]
    return min(candidates, key=lambda p: p[1])


def random_geometry(rng: random.Random) -> LinkageGeometry:
    l1 = rng.uniform(15.0, 40.0)
    l2 = rng.uniform(l1 + 5.0, 70.0)
    d = rng.uniform(10.0, min(2 * l2 - 5.0, 60.0))
    return LinkageGeometry(base_separation_mm=d, proximal_length_mm=l1,
                           distal_length_mm=l2)


def test_geometry_validation():
    with pytest.raises(ValueError):
        LinkageGeometry(base_separation_mm=0.0)
    with pytest.raises(ValueError):
        LinkageGeometry(proximal_length_mm=-1.0)
    with pytest.raises(ValueError):
        LinkageGeometry(base_separation_mm=90.0, distal_length_mm=40.0)
    with pytest.raises(ValueError):
        LinkageGeometry(angle_min_rad=-0.1, angle_max_rad=-0.5)
    assert LinkageGeometry().x_center == 15.0


def test_fk_symmetric_pose_matches_oracle():
    geom = LinkageGeometry()
    x, y = forward_kinematics(geom, -90.0 * DEG, -90.0 * DEG)
    ox, oy = circle_intersection_oracle(geom, -90.0 * DEG, -90.0 * DEG)
    assert math.hypot(x - ox, y - oy) < 1e-12
    # symmetric drive lands on the centerline, below both elbows
    assert x == pytest.approx(15.0, abs=1e-9)
    assert y == pytest.approx(-62.080992435478315, abs=1e-9)


def test_fk_matches_oracle_across_random_poses():
    rng = random.Random(TEST_RANDOM_SEED)
    geom = LinkageGeometry()
    for _ in range(2000):
        t1 = rng.uniform(geom.angle_min_rad, geom.angle_max_rad)
        t2 = rng.uniform(geom.angle_min_rad, geom.angle_max_rad)
        try:
            x, y = forward_kinematics(geom, t1, t2)
        except Unreachable:
            continue
        ox, oy = circle_intersection_oracle(geom, t1, t2)
        assert math.hypot(x - ox, y - oy) < 1e-9


def test_fk_picks_low_branch_for_elbow_out():
    geom = LinkageGeometry()
    rng = random.Random(TEST_RANDOM_SEED + 1)
    for _ in range(200):
        t1 = rng.uniform(-150 * DEG, -30 * DEG)
        t2 = rng.uniform(-150 * DEG, -30 * DEG)
        try:
            low = forward_kinematics(geom, t1, t2)
            high = forward_kinematics(
                LinkageGeometry(branch=Branch.ELBOW_IN), t1, t2)
        except Unreachable:
            continue
        assert low[1] <= high[1]


def test_fk_unreachable_when_elbows_too_far():
    # short distal links: arms spread outward put the elbows ~79 mm apart
    geom = LinkageGeometry(distal_length_mm=16.0)
    with pytest.raises(Unreachable):
        forward_kinematics(geom, -170.0 * DEG, -10.0 * DEG)


def test_ik_symmetric_example():
    geom = LinkageGeometry()
    theta1, theta2 = inverse_kinematics(geom, (15.0, -62.080992435478315))
    assert theta1 == pytest.approx(-90.0 * DEG, abs=1e-9)
    assert theta2 == pytest.approx(-90.0 * DEG, abs=1e-9)


def test_ik_fk_round_trip_default_geometry():
    geom = LinkageGeometry()
    rng = random.Random(TEST_RANDOM_SEED + 2)
    checked = 0
    while checked < 500:
        t1 = rng.uniform(geom.angle_min_rad, geom.angle_max_rad)
        t2 = rng.uniform(geom.angle_min_rad, geom.angle_max_rad)
        try:
            target = forward_kinematics(geom, t1, t2)
        except Unreachable:
            continue
        try:
            r1, r2 = inverse_kinematics(geom, target)
        except Unreachable:
            continue  # mirror-branch poses are legitimately rejected
        fx, fy = forward_kinematics(geom, r1, r2)
        err = math.hypot(fx - target[0], fy - target[1])
        assert err <= 1e-9 * max(1.0, math.hypot(*target))
        checked += 1


def test_ik_fk_round_trip_random_geometries():
    rng = random.Random(TEST_RANDOM_SEED + 3)
    for _ in range(10):
        geom = random_geometry(rng)
        checked = 0
        attempts = 0
        while checked < 100 and attempts < 2000:
            attempts += 1
            t1 = rng.uniform(geom.angle_min_rad, geom.angle_max_rad)
            t2 = rng.uniform(geom.angle_min_rad, geom.angle_max_rad)
            try:
                target = forward_kinematics(geom, t1, t2)
                r1, r2 = inverse_kinematics(geom, target)
            except Unreachable:
                continue
            fx, fy = forward_kinematics(geom, r1, r2)
            assert math.hypot(fx - target[0], fy - target[1]) \
                <= 1e-9 * max(1.0, math.hypot(*target))
            checked += 1
        assert checked == 100, f"only {checked} reachable poses for {geom}"


def test_ik_rejects_far_target_with_reachable_nearest():
    geom = LinkageGeometry()
    target = (15.0, -200.0)
    with pytest.raises(Unreachable) as excinfo:
        inverse_kinematics(geom, target)
    nearest = excinfo.value.nearest
    assert nearest is not None
    assert workspace_contains(geom, nearest)
    # the clamp point sits between anchor and target, closer than the anchor
    assert math.dist(nearest, target) < 200.0


def test_centerline_boundary_depth():
    # max symmetric reach on the centerline: sqrt((L1+L2)^2 - (d/2)^2)
    geom = LinkageGeometry()
    boundary_y = -math.sqrt(65.0 ** 2 - 15.0 ** 2)  # -63.2455...
    assert workspace_contains(geom, (15.0, boundary_y + 1e-6))
    assert not workspace_contains(geom, (15.0, boundary_y - 1e-3))
    # (15, -64) is 65.73 mm from each base, past L1+L2 = 65: outside
    assert not workspace_contains(geom, (15.0, -64.0))


def test_nearest_reachable_clamps_to_centerline_boundary():
    geom = LinkageGeometry()
    nearest = nearest_reachable(geom, (15.0, -70.0))
    boundary_y = -math.sqrt(65.0 ** 2 - 15.0 ** 2)
    assert nearest == pytest.approx((15.0, boundary_y), abs=1e-6)


def test_nearest_reachable_identity_inside_workspace():
    geom = LinkageGeometry()
    point = (15.0, -55.0)
    assert workspace_contains(geom, point)
    assert nearest_reachable(geom, point) == point


def test_angle_limits_make_upper_halfplane_unreachable():
    geom = LinkageGeometry()
    # y > 0 needs a motor angle above -10 degrees
    assert not workspace_contains(geom, (15.0, 10.0))
    with pytest.raises(Unreachable):
        inverse_kinematics(geom, (15.0, 10.0))


def test_in_limits():
    geom = LinkageGeometry()
    assert geom.in_limits(-90.0 * DEG)
    assert not geom.in_limits(-5.0 * DEG)
    assert not geom.in_limits(-171.0 * DEG)


def test_workspace_excludes_inner_annulus_hole():
    # directly on a base the distance is 0 < |L2 - L1| = 15: no solution
    geom = LinkageGeometry()
    assert not workspace_contains(geom, (0.0, 0.0))
    assert not workspace_contains(geom, (0.0, -10.0))
