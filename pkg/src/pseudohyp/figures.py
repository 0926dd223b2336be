"""Figure emitters: line renderings in the flat chart, as SVG with CSV twins.

The SVG output is deliberately minimal (straight polylines in a viewBox);
every figure also writes the same data as CSV so the geometry is testable
without parsing markup.
"""

import csv
import os

import numpy as np

from .barbot import DirectionKind

CHART_BOX = 3.0  # half-width of the rendered chart window


def _svg_header(box):
    return (f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'viewBox="{-box} {-box} {2 * box} {2 * box}" '
            f'width="480" height="480">\n'
            f'<rect x="{-box}" y="{-box}" width="{2 * box}" height="{2 * box}" '
            f'fill="white" stroke="black" stroke-width="0.02"/>\n')


def _polyline(points, color, width=0.02, fill="none"):
    pts = " ".join(f"{x},{-y}" for x, y in points)  # chart y grows upward
    return f'<polyline points="{pts}" fill="{fill}" stroke="{color}" stroke-width="{width}"/>\n'


def _write(path, text):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)


def _write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(x) if isinstance(x, float) else x for x in row])


def geodesic_fan(surface, out_dir, basepoints=((0.0, 0.0), (0.55, -0.5)),
                 rays_per_point=24, length=2.2, box=CHART_BOX):
    """Fan of geodesic rays from two basepoints, colored by direction class."""
    rows = []
    svg = [_svg_header(box)]
    diagonals = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]
    for (u0, v0) in basepoints:
        generic = [(np.cos(2.0 * np.pi * k / rays_per_point + 0.02),
                    np.sin(2.0 * np.pi * k / rays_per_point + 0.02))
                   for k in range(rays_per_point)]
        for raw in generic + diagonals:
            d = surface.unit_direction(raw)
            cls = surface.classify_direction(u0, v0, d)
            tip = (u0 + d[0] * length, v0 + d[1] * length)
            color = "red" if cls.kind is DirectionKind.EDGE_MIDPOINT else "black"
            svg.append(_polyline([(u0, v0), tip], color, 0.015))
            rows.append([u0, v0, float(d[0]), float(d[1]),
                         cls.kind.value, cls.index, float(cls.growth_exponent)])
    svg.append("</svg>\n")
    _write(os.path.join(out_dir, "geodesic_fan.svg"), "".join(svg))
    _write_csv(os.path.join(out_dir, "geodesic_fan.csv"),
               ["base_u", "base_v", "dir_u", "dir_v", "kind", "index", "exponent"],
               rows)
    return rows


def vertex_horoball(surface, out_dir, level=0.5, box=CHART_BOX, samples=101):
    """Sublevel set of the vertex horofunction h(u, v) = -u, a half plane."""
    vs = np.linspace(-box, box, samples)
    boundary_u = -level
    rows = [[float(boundary_u), float(v), float(surface.horofunction(("vertex", 1), boundary_u, v))]
            for v in vs]
    svg = [_svg_header(box)]
    # shaded region {-u <= level} = {u >= -level}
    svg.append(_polyline([(boundary_u, -box), (box, -box), (box, box), (boundary_u, box),
                          (boundary_u, -box)], "gray", 0.0, fill="#cccccc"))
    svg.append(_polyline([(boundary_u, -box), (boundary_u, box)], "black", 0.03))
    svg.append("</svg>\n")
    _write(os.path.join(out_dir, "vertex_horoball.svg"), "".join(svg))
    _write_csv(os.path.join(out_dir, "vertex_horoball.csv"),
               ["u", "v", "h"], rows)
    return rows


def horoball_levels(surface, out_dir, levels=(0.8, 1.2, 1.6), box=CHART_BOX, samples=201):
    """Level curves of the edge horofunction log(exp(-u) + exp(-v))."""
    rows = []
    svg = [_svg_header(box)]
    for C in levels:
        vs = np.linspace(-box, box, samples)
        pts = []
        for v in vs:
            rest = np.exp(C) - np.exp(-v)
            if rest <= 0:
                continue
            u = -np.log(rest)
            if abs(u) <= box:
                pts.append((float(u), float(v)))
                rows.append([float(C), float(u), float(v)])
        if len(pts) >= 2:
            svg.append(_polyline(pts, "black", 0.02))
    svg.append("</svg>\n")
    _write(os.path.join(out_dir, "horoball_levels.svg"), "".join(svg))
    _write_csv(os.path.join(out_dir, "horoball_levels.csv"),
               ["level", "u", "v"], rows)
    return rows


def emit_figures(surface, out_dir):
    """All figures; returns the list of files written."""
    geodesic_fan(surface, out_dir)
    vertex_horoball(surface, out_dir)
    horoball_levels(surface, out_dir)
    return sorted(
        os.path.join(out_dir, name)
        for name in os.listdir(out_dir)
        if name.endswith((".svg", ".csv"))
    )
