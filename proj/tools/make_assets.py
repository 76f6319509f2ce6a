#!/usr/bin/env python3
"""Regenerates the bundled scenes, scenarios and scripted transcripts.

Usage: python3 tools/make_assets.py [asset_dir]

Everything is deterministic; rerunning produces byte-identical files.
"""

import json
import math
import os
import sys

CELL = 0.05


def cells(x0, x1, y0, y1):
    """Cell-centre coordinates covering [x0, x1) x [y0, y1)."""
    i0, i1 = round(x0 / CELL), round(x1 / CELL)
    j0, j1 = round(y0 / CELL), round(y1 / CELL)
    for i in range(i0, i1):
        for j in range(j0, j1):
            yield round((i + 0.5) * CELL, 3), round((j + 0.5) * CELL, 3)


def rect(cat, x0, x1, y0, y1, z):
    return [[x, y, z, cat] for x, y in cells(x0, x1, y0, y1)]


def ring(cat, x0, x1, y0, y1, t, z):
    pts = rect(cat, x0, x1, y0, y0 + t, z) + rect(cat, x0, x1, y1 - t, y1, z)
    pts += rect(cat, x0, x0 + t, y0 + t, y1 - t, z) + rect(cat, x1 - t, x1, y0 + t, y1 - t, z)
    return pts


def visible(points, pose, rng):
    return [p for p in points if math.hypot(p[0] - pose[0], p[1] - pose[1]) <= rng]


def write_scene(path, categories, size, sensor, start, frames):
    with open(path, "w") as f:
        header = {"categories": categories, "cell_size": CELL, "M": size,
                  "sensor": sensor, "start": start}
        f.write(json.dumps(header) + "\n")
        for pose, pts in frames:
            f.write(json.dumps({"pose": pose, "points": pts}, separators=(",", ":")) + "\n")


def write_jsonl(path, records):
    with open(path, "w") as f:
        for r in records:
            f.write(json.dumps(r) + "\n")


def script(records):
    """[(template_id, response)] -> transcript records with per-template ordinals."""
    ordinals = {}
    out = []
    for tid, response in records:
        n = ordinals.get(tid, 0)
        ordinals[tid] = n + 1
        out.append({"template_id": tid, "ordinal": n, "request_hash": "", "response": response})
    return out


# --- cost-map scenes ------------------------------------------------------

def chair_scenes(d):
    cats = ["chair", "mattress", "floor"]
    floor = rect(2, -1.0, 6.0, -3.0, 3.0, 0.0)
    chair = rect(0, 4.0, 4.5, -0.25, 0.25, 0.45) + rect(0, 4.0, 4.5, -0.25, 0.25, 0.9)
    band = rect(1, 1.8, 2.6, -1.5, 1.5, 0.2)
    sensor = {"range": 4.0, "fov": 2 * math.pi}
    poses = [[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]]

    def frames(points):
        return [(p, visible(points, p, sensor["range"])) for p in poses]

    write_scene(f"{d}/scenes/chair_band.jsonl", cats, 240, sensor, poses[0],
                frames(floor + band + chair))
    write_scene(f"{d}/scenes/chair_control.jsonl", cats, 240, sensor, poses[0],
                frames(floor + chair))

    box_cats = ["red box", "floor"]
    write_scene(f"{d}/scenes/empty.jsonl", box_cats, 240, sensor, [0.0, 0.0, 0.0],
                [([0.0, 0.0, 0.0],
                  rect(1, -1.0, 3.0, -1.0, 1.0, 0.0) + rect(0, 2.0, 2.3, -0.15, 0.15, 0.3))])

    wall_cats = ["chair", "wall", "floor"]
    pts = (rect(2, -1.0, 6.0, -3.0, 3.0, 0.0) + rect(0, 4.0, 4.5, -0.25, 0.25, 0.45) +
           ring(1, 3.5, 5.0, -0.75, 0.75, 0.1, 0.5))
    write_scene(f"{d}/scenes/chair_sealed.jsonl", wall_cats, 240, sensor, [0.0, 0.0, 0.0],
                frames(pts))

    band_reply = json.dumps({
        "target_object": "chair",
        "obstacles": [],
        "terrain": [
            {"type": "floor", "cost": 0, "gait": 0},
            {"type": "mattress", "cost": 1, "gait": 0},
        ]}, indent=2)
    write_jsonl(f"{d}/transcripts/chair_plan.jsonl",
                script([("cost_map", "Here is the JSON:\n" + band_reply)]))
    box_reply = json.dumps({"target_object": "red box", "obstacles": [],
                            "terrain": [{"type": "floor", "cost": 0, "gait": 0}]})
    write_jsonl(f"{d}/transcripts/empty_plan.jsonl", script([("cost_map", box_reply)]))
    wall_reply = json.dumps({"target_object": "chair", "obstacles": ["wall"],
                             "terrain": [{"type": "floor", "cost": 0, "gait": 0}]})
    write_jsonl(f"{d}/transcripts/sealed_plan.jsonl", script([("cost_map", wall_reply)]))


# --- long-horizon scenario -----------------------------------------------

INSTRUCTION = ("Squat down, stand up, greet me, then walk through the bed and grass, "
               "find the blue clothes, and sit next to them.")


def living_room(walled):
    cats = ["floor", "bed", "grass", "blue clothes", "sofa", "wall"]
    pts = rect(0, -4.0, 4.0, -3.0, 3.0, 0.0)
    pts += rect(1, -2.0, -1.0, -1.0, 1.0, 0.4)
    pts += rect(2, -1.0, 0.5, -1.5, 1.5, 0.02)
    pts += rect(3, 2.0, 2.4, 0.8, 1.2, 0.05)
    pts += rect(4, 1.2, 1.6, -0.5, 0.5, 0.45)
    if walled:
        pts += ring(5, 1.75, 2.65, 0.55, 1.45, 0.1, 0.6)
    return cats, pts


def scenario(d, name, walled):
    cats, pts = living_room(walled)
    sensor = {"range": 3.0, "fov": 2 * math.pi}
    start = [-3.0, 0.0, 0.0]
    write_scene(f"{d}/scenes/{name}.jsonl", cats, 240, sensor, start, [(start, pts)])

    plan = [
        {"description": "squat down", "skill": "squat_down", "args": {}},
        {"description": "stand up", "skill": "stand_up", "args": {}},
        {"description": "greet the user", "skill": "greet", "args": {}},
        {"description": "walk through the bed and grass", "skill": "navigate_to",
         "args": {"target": "grass"}},
        {"description": "find the blue clothes", "skill": "find",
         "args": {"target": "blue clothes"}},
        {"description": "sit next to the blue clothes", "skill": "sit_next_to",
         "args": {"target": "blue clothes"}},
    ]

    def costs(target):
        return json.dumps({
            "target_object": target,
            "obstacles": ["sofa", "wall"],
            "terrain": [
                {"type": "floor", "cost": 0, "gait": 0},
                {"type": "bed", "cost": 0.2, "gait": 1},
                {"type": "grass", "cost": 0.1, "gait": 1},
            ]}, indent=2)

    records = [("decompose", "```json\n" + json.dumps(plan, indent=2) + "\n```")]
    records += [("evaluate", "succeeded")] * 3
    records += [("cost_map", costs("grass")), ("cost_map", costs("blue clothes"))]
    if not walled:
        records += [("cost_map", costs("blue clothes"))]
    write_jsonl(f"{d}/transcripts/{name}.jsonl", script(records))

    with open(f"{d}/scenarios/{name}.json", "w") as f:
        json.dump({"instruction": INSTRUCTION,
                   "scene": f"../scenes/{name}.jsonl",
                   "transcript": f"../transcripts/{name}.jsonl",
                   "options": {"cost_domain": "continuous", "advance_cells": 40}},
                  f, indent=2)
        f.write("\n")


# --- locomotion benchmark -------------------------------------------------

def levels(h, f, s, p, w, g="Trotting"):
    qs = [
        ("body height", "very high, high, medium, low, very low"),
        ("stepping frequency", "very high, high, medium, low, very low"),
        ("foot swing height", "very high, high, medium, low, very low"),
        ("body pitch", "very positive, positive, neutral, negative, very negative"),
        ("foot stance width", "very high, high, medium, low, very low"),
        ("gait", "pronking, trotting, bounding, pacing"),
    ]
    out = []
    for k, ((name, opts), ans) in enumerate(zip(qs, [h, f, s, p, w, g]), start=1):
        out.append(f"Q{k}: What is the proper {name} for this environment? Choose among {opts}.")
        out.append(f"A{k}: {ans}.")
    return "\n".join(out)


def numeric(h, f, s, p, w, g="trotting"):
    return (f"Body height: {h}\nStepping frequency: {f}\nFoot swing height: {s}\n"
            f"Body pitch: {p}\nFoot stance width: {w}\nGait: {g}")


def picks(*values):
    return "\n".join(f"A{k}: {v}" for k, v in enumerate(values, start=1))


BENCH = {
    "uphill_slope": {
        "auto_lss": [levels("Low", "High", "High", "Positive", "Medium"),
                     levels("Low", "High", "High", "Positive", "Medium"),
                     levels("Low", "Medium", "High", "Positive", "High")],
        "auto": [numeric(0.25, 2.8, 0.12, 0.1, 0.3), numeric(0.22, 3.0, 0.15, 0.15, 0.25),
                 numeric(0.28, 2.5, 0.1, 0.05, 0.28)],
        "auto_prior": [numeric(0.3, 2.5, 0.1, 0.2, 0.3), numeric(0.35, 2.0, 0.12, 0.25, 0.35),
                       numeric(0.25, 2.2, 0.08, 0.15, 0.3)],
        "lss_determining": [picks(0.175, 3.25, 0.185, 0.16, 0.25)],
    },
    "downhill_slope": {
        "auto_lss": [levels("Low", "Low", "Medium", "Negative", "High"),
                     levels("Low", "Low", "Low", "Negative", "High"),
                     levels("Low", "Low", "Medium", "Negative", "High")],
        "auto": [numeric(0.2, 2.0, 0.1, -0.2, 0.3), numeric(0.18, 2.2, 0.12, -0.15, 0.35),
                 numeric(0.22, 1.8, 0.1, -0.1, 0.3)],
        "auto_prior": [numeric(0.15, 1.8, 0.08, -0.3, 0.4), numeric(0.2, 2.0, 0.1, -0.25, 0.35),
                       numeric(0.15, 1.5, 0.1, -0.3, 0.4)],
        "lss_determining": [picks(0.175, 2.25, 0.135, -0.32, 0.33)],
    },
    "upside_stair": {
        "auto_lss": [levels("Medium", "Low", "Very high", "Positive", "Medium"),
                     levels("Medium", "Low", "High", "Positive", "Medium"),
                     levels("Medium", "Low", "Very high", "Positive", "Medium")],
        "auto": [numeric(0.3, 2.0, 0.2, 0.15, 0.25), numeric(0.28, 2.5, 0.18, 0.1, 0.3),
                 numeric(0.32, 2.2, 0.22, 0.2, 0.25)],
        "auto_prior": [numeric(0.35, 2.0, 0.25, 0.25, 0.3), numeric(0.3, 1.8, 0.2, 0.3, 0.3),
                       numeric(0.35, 2.0, 0.23, 0.2, 0.35)],
        "lss_determining": [picks(0.25, 2.25, 0.185, 0.16, 0.25)],
    },
    "downside_stair": {
        "auto_lss": [levels("Low", "Low", "High", "Negative", "High"),
                     levels("Low", "Low", "High", "Negative", "Very high"),
                     levels("Low", "Low", "High", "Negative", "Medium"),
                     levels("Low", "Low", "High", "Negative", "High"),
                     levels("Low", "Low", "High", "Negative", "High"),
                     levels("Low", "Very low", "High", "Negative", "High")],
        "auto": [numeric(0.2, 2.0, 0.15, -0.15, 0.3), numeric(0.22, 2.2, 0.18, -0.2, 0.3),
                 numeric(0.18, 1.8, 0.15, -0.1, 0.35)],
        "auto_prior": [numeric(0.2, 1.6, 0.12, -0.3, 0.4), numeric(0.15, 1.8, 0.1, -0.25, 0.4),
                       numeric(0.2, 1.5, 0.15, -0.35, 0.35)],
        "lss_determining": [picks(0.175, 2.25, 0.185, -0.16, 0.33)],
    },
    "uneven_ground": {
        "auto_lss": [levels("Low", "Medium", "Very high", "Neutral", "High"),
                     levels("Low", "Medium", "Very high", "Neutral", "High"),
                     levels("Low", "Medium", "High", "Neutral", "High")],
        "auto": [numeric(0.25, 2.5, 0.15, 0.0, 0.3), numeric(0.2, 2.8, 0.18, 0.05, 0.3),
                 numeric(0.22, 2.5, 0.2, 0.0, 0.35)],
        "auto_prior": [numeric(0.15, 2.0, 0.2, 0.0, 0.4), numeric(0.2, 2.0, 0.22, -0.05, 0.4),
                       numeric(0.15, 1.8, 0.25, 0.0, 0.45)],
        "lss_determining": [picks(0.175, 2.75, 0.23, 0, 0.33)],
    },
}

MANUAL = {
    "uphill_slope": {"body_height": 0.4, "step_frequency": 3.5, "swing_height": 0.25,
                     "body_pitch": 0.4, "stance_width": 0.3, "gait": "trotting"},
    "downhill_slope": {"body_height": 0.1, "step_frequency": 1.5, "swing_height": 0.05,
                       "body_pitch": -0.4, "stance_width": 0.45, "gait": "trotting"},
    "upside_stair": {"body_height": 0.45, "step_frequency": 2.0, "swing_height": 0.25,
                     "body_pitch": 0.3, "stance_width": 0.3, "gait": "trotting"},
    "downside_stair": {"body_height": 0.15, "step_frequency": 1.5, "swing_height": 0.2,
                       "body_pitch": -0.4, "stance_width": 0.45, "gait": "trotting"},
    "uneven_ground": {"body_height": 0.3, "step_frequency": 2.0, "swing_height": 0.25,
                      "body_pitch": 0.0, "stance_width": 0.4, "gait": "trotting"},
}


def benchmark(d):
    records = []
    for terrain, by_variant in BENCH.items():
        for variant, replies in by_variant.items():
            records += [(f"{variant}/{terrain}", r) for r in replies]
    write_jsonl(f"{d}/transcripts/benchmark.jsonl", script(records))
    with open(f"{d}/manual_params.json", "w") as f:
        json.dump(MANUAL, f, indent=2)
        f.write("\n")


def main():
    d = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "assets")
    for sub in ("scenes", "scenarios", "transcripts"):
        os.makedirs(f"{d}/{sub}", exist_ok=True)
    chair_scenes(d)
    scenario(d, "living_room", walled=False)
    scenario(d, "living_room_walled", walled=True)
    benchmark(d)


if __name__ == "__main__":
    main()
