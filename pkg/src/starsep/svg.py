"""Debug rendering: input objects by color, active fragments, star centers and leaves."""
from __future__ import annotations

from xml.sax.saxutils import quoteattr

from .geom import ColoredSegmentInstance

PALETTE = ["#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
           "#aec7e8", "#98df8a", "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5"]
CENTER = "#d62728"
LEAF = "#ff7f0e"


def _f(x):
    return f"{float(x):.6g}"


def _objects(instance):
    """(id, color index, list of point lists) per input object."""
    if isinstance(instance, ColoredSegmentInstance):
        return [(s.id, s.color, [[s.p, s.q]]) for s in instance.segments]
    return [(p.id, 0, [list(r) + [r[0]] for r in p.rings()]) for p in instance.polygons]


def render_svg(instance, fragments=None, separator=None, width=800) -> str:
    objs = _objects(instance)
    pts = [p for _, _, lines in objs for line in lines for p in line]
    if pts:
        x0 = min(float(p.x) for p in pts)
        x1 = max(float(p.x) for p in pts)
        y0 = min(float(p.y) for p in pts)
        y1 = max(float(p.y) for p in pts)
    else:
        x0 = y0 = 0.0
        x1 = y1 = 1.0
    span = max(x1 - x0, y1 - y0, 1e-9)
    pad = span * 0.02
    stroke = span / 400
    # y grows downwards in SVG: draw in a flipped group
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{width}" '
           f'viewBox="{_f(x0 - pad)} {_f(-y1 - pad)} {_f(x1 - x0 + 2 * pad)} {_f(y1 - y0 + 2 * pad)}">',
           f'<g transform="scale(1,-1)" fill="none" stroke-width="{_f(stroke)}" stroke-linecap="round">']

    def path(lines, attrs):
        d = " ".join("M " + " L ".join(f"{_f(p.x)} {_f(p.y)}" for p in line) for line in lines)
        return f'<path d="{d}" {attrs}/>'

    out.append('<g id="input">')
    for oid, col, lines in objs:
        out.append(path(lines, f'stroke="{PALETTE[col % len(PALETTE)]}" data-id="{oid}"'))
    out.append('</g>')
    if fragments is not None:
        out.append(f'<g id="fragments" stroke="#000000" stroke-width="{_f(stroke * 2.5)}" stroke-opacity="0.5">')
        for f in fragments.active():
            out.append(path([[f.p0, f.p1]], f'class="fragment {f.kind}" data-id="{f.id}"'))
        out.append('</g>')
    if separator is not None:
        by_id = {oid: lines for oid, _, lines in objs}
        out.append(f'<g id="stars" stroke-width="{_f(stroke * 3)}">')
        for k, st in enumerate(separator.stars):
            out.append(path(by_id[st.center], f'class="center" stroke="{CENTER}" data-star="{k}"'))
            for leaf in sorted(st.leaves):
                out.append(path(by_id[leaf], f'class="leaf" stroke="{LEAF}" stroke-dasharray="{_f(stroke * 6)}" '
                                             f'data-star="{k}"'))
        out.append('</g>')
    out.append('</g>')
    title = instance.meta.get("kind", "instance") if hasattr(instance, "meta") else "instance"
    out.append(f'<title>{quoteattr(str(title))[1:-1]}</title>')
    out.append('</svg>')
    return "\n".join(out) + "\n"
