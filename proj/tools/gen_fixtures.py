#!/usr/bin/env python3
"""Writes the module libraries and example tasks under data/."""

import json
import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"
GAP = 0.01


def translation(x, y, z):
    return [[1, 0, 0, x], [0, 1, 0, y], [0, 0, 1, z], [0, 0, 0, 1]]


def rot_x(a):
    c, s = math.cos(a), math.sin(a)
    return [[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1]]


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(4)) for j in range(4)] for i in range(4)]


def clean(m):
    return [[0.0 if abs(v) < 1e-15 else round(v, 15) for v in row] for row in m]


FLIP = clean(rot_x(math.pi))


def segment_shape(z0, z1, radius, offset=(0.0, 0.0)):
    """Capsule covering the segment [z0, z1] along z, inset by GAP."""
    half = (z1 - z0) / 2.0 - GAP
    centre = translation(offset[0], offset[1], (z0 + z1) / 2.0)
    if half - radius > 1e-6:
        return {"kind": "capsule", "dims": [radius, half - radius], "pose": centre}
    return {"kind": "sphere", "dims": [min(radius, half)], "pose": centre}


def body(mass, length, radius, shapes=None):
    ixx = mass * (3 * radius**2 + length**2) / 12.0
    izz = 0.5 * mass * radius**2
    return {
        "mass": mass,
        "com": [0.0, 0.0, length / 2.0],
        "inertia": [[ixx, 0.0, 0.0], [0.0, ixx, 0.0], [0.0, 0.0, izz]],
        "geometry": shapes if shapes is not None else [segment_shape(0.0, length, radius)],
    }


def base(mid, name, conn, height, radius, mass):
    return {
        "id": mid, "name": name, "kind": "base",
        "bodies": [body(mass, height, radius)], "joints": [],
        "proximal": {"type": "mount", "frame": translation(0, 0, 0)},
        "distal": {"type": conn, "frame": translation(0, 0, height)},
    }


def link(mid, name, conn_in, conn_out, length, radius, mass):
    return {
        "id": mid, "name": name, "kind": "regular",
        "bodies": [body(mass, length, radius)], "joints": [],
        "proximal": {"type": conn_in, "frame": FLIP},
        "distal": {"type": conn_out, "frame": translation(0, 0, length)},
    }


def joint(mid, name, conn, length, radius, mass, axis, limits, kind="revolute"):
    half = length / 2.0
    qd, qdd, tau = limits
    q_lim = [-math.pi, math.pi] if kind == "revolute" else [0.0, 0.3]
    return {
        "id": mid, "name": name, "kind": "regular",
        "bodies": [body(mass / 2, half, radius), body(mass / 2, half, radius)],
        "joints": [{
            "kind": kind, "axis": axis,
            "parent_frame": translation(0, 0, half), "child_frame": translation(0, 0, 0),
            "q_limits": q_lim, "qd_limits": [-qd, qd], "qdd_limits": [-qdd, qdd], "tau_max": tau,
        }],
        "proximal": {"type": conn, "frame": FLIP},
        "distal": {"type": conn, "frame": translation(0, 0, half)},
    }


def eef(mid, name, conn, length, radius, mass):
    return {
        "id": mid, "name": name, "kind": "end_effector",
        "bodies": [body(mass, length, radius)], "joints": [],
        "proximal": {"type": conn, "frame": FLIP},
        "distal": {"type": "tool", "frame": translation(0, 0, length)},
    }


def standard():
    large, small = 0.06, 0.045
    big = (1.5, 5.0, 150.0)
    little = (2.5, 10.0, 40.0)
    elbow_shapes = [segment_shape(0.0, 0.2 + large, large)]
    elbow_horizontal = segment_shape(large + GAP, 0.15, large)
    # Horizontal arm of the elbow runs along +y at the top of the vertical part.
    elbow_horizontal["pose"] = clean(matmul(translation(0, (large + GAP + 0.15) / 2.0, 0.2), rot_x(-math.pi / 2)))
    elbow_shapes.append(elbow_horizontal)
    elbow = link(10, "link_large_elbow", "L", "L", 0.2, large, 1.2)
    elbow["bodies"][0]["geometry"] = elbow_shapes
    elbow["distal"]["frame"] = clean(matmul(translation(0, 0.15, 0.2), rot_x(-math.pi / 2)))
    linear = joint(14, "linear_large", "L", 0.4, large, 2.0, [0, 0, 1], (0.5, 2.0, 500.0), kind="prismatic")
    modules = [
        base(1, "base_large", "L", 0.2, 0.08, 4.0),
        base(2, "base_large_tall", "L", 0.4, 0.08, 6.0),
        base(3, "base_small", "S", 0.15, 0.06, 2.0),
        joint(4, "joint_large_roll", "L", 0.2, large, 2.5, [0, 0, 1], big),
        joint(5, "joint_large_pitch", "L", 0.2, large, 2.5, [1, 0, 0], big),
        joint(6, "joint_small_roll", "S", 0.14, small, 1.2, [0, 0, 1], little),
        joint(7, "joint_small_pitch", "S", 0.14, small, 1.2, [1, 0, 0], little),
        link(8, "link_large_long", "L", "L", 0.4, large, 1.5),
        link(9, "link_large_short", "L", "L", 0.2, large, 0.8),
        elbow,
        link(11, "link_small", "S", "S", 0.2, small, 0.6),
        link(12, "adapter_large_small", "L", "S", 0.1, large, 0.4),
        eef(13, "eef_small", "S", 0.1, 0.035, 0.5),
        linear,
    ]
    types = [
        {"id": "mount", "size_class": "base"},
        {"id": "L", "size_class": "large"},
        {"id": "S", "size_class": "small"},
        {"id": "tool", "size_class": "tool"},
    ]
    return {"connector_types": types, "modules": modules}


def tiny():
    limits = (1.5, 5.0, 100.0)
    r = 0.05
    modules = [
        base(1, "base", "A", 0.2, 0.07, 3.0),
        joint(2, "roll", "A", 0.2, r, 2.0, [0, 0, 1], limits),
        joint(3, "pitch", "A", 0.2, r, 2.0, [1, 0, 0], limits),
        link(4, "link_long", "A", "A", 0.3, r, 1.0),
        link(5, "link_short", "A", "A", 0.15, r, 0.5),
        eef(6, "eef", "A", 0.1, 0.03, 0.3),
    ]
    return {"connector_types": [{"id": "mount", "size_class": "base"}, {"id": "A", "size_class": "a"},
                                {"id": "tool", "size_class": "tool"}],
            "modules": modules}


def planar():
    limits = (2.0, 8.0, 100.0)
    r = 0.04
    modules = [
        base(1, "base", "P", 0.1, 0.06, 2.0),
        joint(2, "pitch", "P", 0.2, r, 1.5, [1, 0, 0], limits),
        link(3, "link", "P", "P", 0.3, r, 0.8),
        eef(4, "eef", "P", 0.1, 0.03, 0.3),
    ]
    return {"connector_types": [{"id": "mount", "size_class": "base"}, {"id": "P", "size_class": "p"},
                                {"id": "tool", "size_class": "tool"}],
            "modules": modules}


def down(position, goal_id):
    # Tool z axis pointing down: rotation by pi about x.
    return {"id": goal_id, "pose": clean(matmul(translation(*position), rot_x(math.pi)))}


PARTIALLY_SYMMETRIC = {"t_p": 1e-3, "t_axis": [1 / 360, 1 / 360, 1.0], "phi": math.pi}


def manufacturing():
    pick_place = {
        "name": "pick_and_place",
        "tolerances": PARTIALLY_SYMMETRIC,
        "goals": [down([0.45, 0.35, 0.35], "pick"), down([-0.4, 0.4, 0.35], "place")],
        "obstacles": [
            {"kind": "box", "dims": [0.08, 0.08, 0.3], "pose": translation(0.0, 0.55, 0.3)},
        ],
    }
    drilling = {
        "name": "drilling",
        "tolerances": PARTIALLY_SYMMETRIC,
        "goals": [down([0.5, 0.0, 0.3], "hole1"), down([0.5, 0.2, 0.3], "hole2"), down([0.3, 0.45, 0.3], "hole3")],
        "obstacles": [
            {"kind": "box", "dims": [0.25, 0.35, 0.05], "pose": translation(0.5, 0.2, 0.1)},
        ],
    }
    return {"manufacturing1.json": pick_place, "manufacturing2.json": drilling}


def main():
    (ROOT / "modules").mkdir(parents=True, exist_ok=True)
    (ROOT / "tasks").mkdir(parents=True, exist_ok=True)
    for name, lib in {"standard.json": standard(), "tiny.json": tiny(), "planar.json": planar()}.items():
        (ROOT / "modules" / name).write_text(json.dumps(lib, indent=2) + "\n")
    for name, task in manufacturing().items():
        (ROOT / "tasks" / name).write_text(json.dumps(task, indent=2) + "\n")


if __name__ == "__main__":
    main()
