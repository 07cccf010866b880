"""Regenerate the bundled example descriptions in src/picvar/fixtures."""

import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "picvar" / "fixtures"
S3 = math.sqrt(3) / 2


def diamond(a, b, frac=0.15, cap=0.1):
    """Quadrilateral with the segment a-b as its long diagonal."""
    mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
    dx, dy = b[0] - a[0], b[1] - a[1]
    L = math.hypot(dx, dy)
    w = min(frac * L, cap)
    nx, ny = -dy / L * w, dx / L * w
    return [list(a), [mx + nx, my + ny], list(b), [mx - nx, my - ny]]


def segments(path, names=None, prefix="c"):
    curves, polys = [], {}
    for i, (a, b) in enumerate(zip(path, path[1:])):
        name = names[i] if names else f"{prefix}{i}"
        polys[f"P_{name}"] = diamond(a, b)
        curves.append({"name": name, "kind": "segment", "from": list(a), "to": list(b),
                       "polygon": f"P_{name}"})
    return curves, polys


def write(name, doc):
    (OUT / name).write_text(json.dumps(doc, indent=1) + "\n")


Z2 = {"type": "polynomial", "coeffs": [[2, 0, 1, 0], [0, 2, -1, 0], [1, 1, 0, 2]]}
RE = {"type": "polynomial", "coeffs": [[1, 0, 1, 0]]}


def bad_bv_ex():
    # the blue curve starts on the red one, so the red segment is cut there
    red = [(0, 0), (0.75, 0.75), (1, 1), (2, 0), (3, 1.15), (4, 0)]
    blue = [(0.75, 0.75), (2, -0.5), (3, 0.7), (4, -0.5), (5, 0.7)]
    rc, rp = segments(red, prefix="red")
    bc, bp = segments(blue, prefix="blue")
    xs = [0.5, 1.0, 1.5, 2 + 5 / 6, 3 + 13 / 23, 4 + 5 / 6]
    verts = {f"x{i}": [x, 0.5] for i, x in enumerate(xs)}
    write("bad_bv_ex.json", {
        "vertices": verts, "polygons": {**rp, **bp}, "curves": rc + bc,
        "functions": {"red_indicator": {"type": "indicator", "curves": [c["name"] for c in rc]},
                      "one": {"type": "constant", "value": 1}},
        "lists": {"dashed": list(verts)},
    })


def cycle(name, pts):
    c, p = segments(pts + pts[:1])
    write(name, {"polygons": p, "curves": c, "functions": {"z2": Z2, "re": RE}})


def zigzag():
    pts = [(0, -1), (1, 1), (2, -1), (3, 1)]
    c, p = segments(pts)
    write("zigzag.json", {"vertices": {f"z{i}": list(q) for i, q in enumerate(pts)},
                          "polygons": p, "curves": c,
                          "functions": {"re": RE},
                          "lists": {"l1": [f"z{i}" for i in range(4)]}})


def plus():
    curves, polys = [], {}
    for i, q in enumerate([(1, 0), (0, 1), (-1, 0), (0, -1)]):
        c, p = segments([(0, 0), q], names=[f"arm{i}"])
        curves += c
        polys.update(p)
    write("plus.json", {"polygons": polys, "curves": curves, "functions": {"re": RE}})


def segment():
    c, p = segments([(0, 0), (1, 0)])
    write("segment.json", {"polygons": p, "curves": c, "functions": {"re": RE}})


def two_arcs():
    write("two_arcs.json", {
        "vertices": {"x": [1, 0], "y": [-1, 0], "o": [0, 0]},
        "polygons": {"U": ["x", [1, 1.2], [-1, 1.2], "y"], "D": ["x", "y", [-1, -1.2], [1, -1.2]]},
        "curves": [
            {"name": "upper", "kind": "circular-arc", "from": "x", "to": "y", "polygon": "U",
             "params": {"center": "o", "ccw": True}},
            {"name": "lower", "kind": "circular-arc", "from": "y", "to": "x", "polygon": "D",
             "params": {"center": "o", "ccw": True}},
        ],
        "functions": {"z2": Z2},
    })


def sigma_pair():
    v = {"x1": [2, 1], "x2": [1, 0], "x3": [0, 1], "x4": [-S3, 0.5], "x5": [-S3, -0.5],
         "x6": [0, -1], "o": [0, 0]}
    polys = {
        "P1": ["x2", [1.5, 1], "x1", [2, 0], [1.5, -0.5]],
        "P2": ["o", "x2", [1, 1], "x3"],
        "P3": ["x3", "o", "x4", [-S3, 1]],
        "P4": ["o", "x4", [-1.5, 0], "x5"],
        "P5": ["x5", "o", "x6", [-S3, -1]],
        "P6": ["o", "x6", [1, -1], "x2"],
    }
    curves = [
        {"name": "c1", "kind": "parabolic-arc", "from": "x2", "to": "x1", "polygon": "P1",
         "params": {"control": [1.5, 0]}},
        {"name": "c2", "kind": "circular-arc", "from": "x2", "to": "x3", "polygon": "P2",
         "params": {"center": "o", "ccw": True}},
        {"name": "c3", "kind": "circular-arc", "from": "x3", "to": "x4", "polygon": "P3",
         "params": {"center": "o", "ccw": True}},
        {"name": "c4", "kind": "circular-arc", "from": "x5", "to": "x4", "polygon": "P4",
         "params": {"center": [-2 * S3, 0], "ccw": True}},
        {"name": "c5", "kind": "circular-arc", "from": "x5", "to": "x6", "polygon": "P5",
         "params": {"center": "o", "ccw": True}},
        {"name": "c6", "kind": "circular-arc", "from": "x6", "to": "x2", "polygon": "P6",
         "params": {"center": "o", "ccw": True}},
    ]
    write("sigma_pair.json", {"vertices": v, "polygons": polys, "curves": curves,
                              "functions": {"z2": Z2, "re": RE}})
    y = {"y1": [0, -0.5], "y2": [0, 0], "y3": [1, 1], "y4": [-1, 1], "y5": [-1, -1], "y6": [1, -1]}
    tp = {
        "Q1": ["y1", [-0.5, -0.25], "y2", [0.5, -0.25]],
        "Q2": ["y2", [0, 0.5], "y3", [0.5, -0.25]],
        "Q3": ["y3", [0, 0.5], "y4", [0, 1.4]],
        "Q4": ["y4", [-0.5, -0.25], "y5", [-1.4, 0]],
        "Q5": ["y5", [0, -0.75], "y6", [0, -1.4]],
        "Q6": ["y3", [1.4, 0], "y6", [0.5, -0.25]],
    }
    path = ["y1", "y2", "y3", "y4", "y5", "y6", "y3"]
    tc = [{"name": f"d{i + 1}", "kind": "segment", "from": a, "to": b, "polygon": f"Q{i + 1}"}
          for i, (a, b) in enumerate(zip(path, path[1:]))]
    write("tau_pair.json", {"vertices": y, "polygons": tp, "curves": tc,
                            "functions": {"z2": Z2, "re": RE}})


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    bad_bv_ex()
    cycle("square_cycle.json", [(0, 0), (1, 0), (1, 1), (0, 1)])
    cycle("square.json", [(0, 0), (2, 0), (2, 2), (0, 2)])
    cycle("triangle.json", [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)])
    zigzag()
    plus()
    segment()
    two_arcs()
    sigma_pair()
