"""JSON instance files: segments, polygons and abstract graphs."""
from __future__ import annotations

import json

from gmpy2 import mpq

from .generators import MAX_COLORS
from .geom import ColoredSegmentInstance, Direction, Point, Segment, direction_of, format_coord, \
    validate_general_position
from .polygons import Polygon, PolygonError, PolygonInstance, normalize_polygon
from .strings import AbstractGraph

FORMAT_VERSION = 1


class InstanceError(ValueError):
    """Schema or constraint error; ``path`` locates the offending field."""

    def __init__(self, path, msg):
        super().__init__(f"{path}: {msg}" if path else msg)
        self.path = path


def _int(x, path):
    if isinstance(x, bool) or not isinstance(x, int):
        raise InstanceError(path, "expected an integer")
    return x


def _point(x, path):
    if not isinstance(x, list) or len(x) != 2:
        raise InstanceError(path, "expected [x, y]")
    return Point(_int(x[0], path + "[0]"), _int(x[1], path + "[1]"))


def _weight(x, path):
    if x is None:
        return None
    try:
        if isinstance(x, str):
            w = mpq(x)
        elif isinstance(x, (int, float)) and not isinstance(x, bool):
            w = mpq(x)
        else:
            raise ValueError
    except (ValueError, ZeroDivisionError):
        raise InstanceError(path, "weight must be a number or a \"num/den\" string")
    if w < 0:
        raise InstanceError(path, "negative weight")
    return w


def _list(doc, key, path):
    v = doc.get(key)
    if not isinstance(v, list):
        raise InstanceError(f"{path}.{key}" if path else key, "expected a list")
    return v


def detect_kind(doc) -> str:
    if "kind" in doc:
        return doc["kind"]
    for kind in ("segments", "polygons"):
        if kind in doc:
            return kind
    if "edges" in doc:
        return "graph"
    raise InstanceError("", "cannot tell the instance kind (need segments, polygons or edges)")


def parse_instance(data, perturb=False):
    """Parse UTF-8 JSON (bytes or str) into a ColoredSegmentInstance,
    PolygonInstance or AbstractGraph."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except ValueError as e:
        raise InstanceError("", f"invalid JSON: {e}")
    if not isinstance(doc, dict):
        raise InstanceError("", "top level must be an object")
    version = doc.get("version", doc.get("format_version", FORMAT_VERSION))
    if version != FORMAT_VERSION:
        raise InstanceError("version", f"unsupported version {version}")
    kind = detect_kind(doc)
    if kind == "segments":
        return _parse_segments(doc, perturb)
    if kind == "polygons":
        return _parse_polygons(doc)
    if kind == "graph":
        return _parse_graph(doc)
    raise InstanceError("kind", f"unknown kind {kind!r}")


def _parse_segments(doc, perturb):
    raw = _list(doc, "segments", "")
    pairs, ids, colors_of, weights = [], [], [], []
    for k, s in enumerate(raw):
        path = f"segments[{k}]"
        if not isinstance(s, dict):
            raise InstanceError(path, "expected an object")
        p, q = _point(s.get("p"), path + ".p"), _point(s.get("q"), path + ".q")
        if p == q:
            raise InstanceError(path, "zero-length segment")
        pairs.append((p, q))
        ids.append(_int(s.get("id", k), path + ".id"))
        colors_of.append(s.get("color"))
        weights.append(_weight(s.get("weight"), path + ".weight"))
    if len(set(ids)) != len(ids):
        raise InstanceError("segments", "duplicate segment ids")
    if "colors" in doc:
        colors = []
        for k, d in enumerate(_list(doc, "colors", "")):
            d = _point(d, f"colors[{k}]")
            if d == (0, 0):
                raise InstanceError(f"colors[{k}]", "zero direction")
            colors.append(Direction.of(*d))
        if len(set(colors)) != len(colors):
            raise InstanceError("colors", "repeated direction")
        segs = []
        for k, ((p, q), sid, col, w) in enumerate(zip(pairs, ids, colors_of, weights)):
            col = _int(col, f"segments[{k}].color")
            if not 0 <= col < len(colors):
                raise InstanceError(f"segments[{k}].color", f"color {col} out of range")
            if direction_of(p, q) != colors[col]:
                raise InstanceError(f"segments[{k}]", f"direction does not match color {col}")
            segs.append(Segment(sid, p, q, col, w))
        inst = ColoredSegmentInstance(segs, colors, {})
    else:
        inst = ColoredSegmentInstance.auto_colored(pairs, weights)
        inst.segments = [Segment(sid, s.p, s.q, s.color, s.weight) for sid, s in zip(ids, inst.segments)]
    if "c" in doc and _int(doc["c"], "c") != inst.c:
        raise InstanceError("c", f"c={doc['c']} but {inst.c} colors are used")
    if inst.c > MAX_COLORS:
        raise InstanceError("colors", f"c={inst.c} exceeds the maximum {MAX_COLORS}")
    if not perturb:
        rep = validate_general_position(inst)
        if not rep.ok:
            v = rep.violations[0]
            what = "same-color overlap" if v.kind in ("overlap", "same-color-intersection") else v.kind
            raise InstanceError("segments", f"{what} between segments {v.ids} (use --perturb)")
    return inst


def _parse_polygons(doc):
    polys = []
    seen = set()
    for k, d in enumerate(_list(doc, "polygons", "")):
        path = f"polygons[{k}]"
        if not isinstance(d, dict):
            raise InstanceError(path, "expected an object")
        pid = _int(d.get("id", k), path + ".id")
        if pid in seen:
            raise InstanceError(path + ".id", "duplicate polygon id")
        seen.add(pid)
        outer = [_point(p, f"{path}.outer[{i}]") for i, p in enumerate(_list(d, "outer", path))]
        holes = []
        for h, ring in enumerate(d.get("holes", [])):
            if not isinstance(ring, list):
                raise InstanceError(f"{path}.holes[{h}]", "expected a ring")
            holes.append([_point(p, f"{path}.holes[{h}][{i}]") for i, p in enumerate(ring)])
        try:
            polys.append(normalize_polygon(Polygon(pid, outer, holes, _weight(d.get("weight"), path + ".weight"))))
        except PolygonError as e:
            raise InstanceError(path, str(e))
    return PolygonInstance(polys, {})


def _parse_graph(doc):
    n = _int(doc.get("n"), "n")
    if n < 0:
        raise InstanceError("n", "negative node count")
    seen = set()
    for k, e in enumerate(_list(doc, "edges", "")):
        if not isinstance(e, list) or len(e) != 2:
            raise InstanceError(f"edges[{k}]", "expected [u, v]")
        u, v = _int(e[0], f"edges[{k}][0]"), _int(e[1], f"edges[{k}][1]")
        if not (0 <= u < n and 0 <= v < n):
            raise InstanceError(f"edges[{k}]", "node id out of range")
        if u == v:
            raise InstanceError(f"edges[{k}]", "self-loop")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise InstanceError(f"edges[{k}]", "duplicate edge")
        seen.add(key)
    weights = None
    if "weights" in doc:
        weights = [_weight(w, f"weights[{i}]") for i, w in enumerate(_list(doc, "weights", ""))]
    return AbstractGraph.from_edges(n, sorted(seen), weights)


# ------------------------------------------------------------ serialize


def _w(w):
    return None if w is None else format_coord(w)


def to_doc(inst) -> dict:
    if isinstance(inst, ColoredSegmentInstance):
        segs = []
        for s in inst.segments:
            d = {"id": s.id, "color": s.color, "p": [s.p.x, s.p.y], "q": [s.q.x, s.q.y]}
            if s.weight is not None:
                d["weight"] = _w(s.weight)
            segs.append(d)
        return {"version": FORMAT_VERSION, "kind": "segments", "c": inst.c,
                "colors": [[d.dx, d.dy] for d in inst.colors], "segments": segs}
    if isinstance(inst, PolygonInstance):
        polys = []
        for p in inst.polygons:
            d = {"id": p.id, "outer": [[v.x, v.y] for v in p.outer],
                 "holes": [[[v.x, v.y] for v in h] for h in p.holes]}
            if p.weight is not None:
                d["weight"] = _w(p.weight)
            polys.append(d)
        return {"version": FORMAT_VERSION, "kind": "polygons", "polygons": polys}
    if isinstance(inst, AbstractGraph):
        d = {"version": FORMAT_VERSION, "kind": "graph", "n": inst.n, "edges": [list(e) for e in inst.edges()]}
        if inst.weights is not None:
            d["weights"] = [_w(w) for w in inst.weights]
        return d
    raise TypeError(f"cannot serialize {type(inst).__name__}")


def serialize(inst) -> str:
    return json.dumps(to_doc(inst), separators=(",", ":"), sort_keys=False) + "\n"
