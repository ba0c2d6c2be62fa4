"""Dependency-free SVG line charts.

The plot group carries its data window and pixel box as ``data-*``
attributes so polyline coordinates can be mapped back to data values.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

SVG_NS = "http://www.w3.org/2000/svg"
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
WIDTH, HEIGHT = 720, 420
BOX = {"left": 80.0, "top": 40.0, "width": 600.0, "height": 300.0}


def _window(values):
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def to_pixels(x, y, window, box=BOX):
    x0, x1, y0, y1 = window
    px = box["left"] + (np.asarray(x, float) - x0) / (x1 - x0) * box["width"]
    py = box["top"] + box["height"] - (np.asarray(y, float) - y0) / (y1 - y0) * box["height"]
    return px, py


def from_pixels(px, py, window, box=BOX):
    x0, x1, y0, y1 = window
    x = x0 + (np.asarray(px, float) - box["left"]) / box["width"] * (x1 - x0)
    y = y0 + (box["top"] + box["height"] - np.asarray(py, float)) / box["height"] * (y1 - y0)
    return x, y


def line_chart(series: dict, title: str = "", xlabel: str = "year", ylabel: str = "value") -> str:
    """Render ``{name: (xs, ys)}`` as one polyline per series."""
    if not series:
        raise ValueError("nothing to plot")
    all_x = np.concatenate([np.asarray(xs, float) for xs, _ in series.values()])
    all_y = np.concatenate([np.asarray(ys, float) for _, ys in series.values()])
    window = _window(all_x) + _window(all_y)

    ET.register_namespace("", SVG_NS)
    svg = ET.Element("svg", {"xmlns": SVG_NS, "width": str(WIDTH), "height": str(HEIGHT),
                             "viewBox": f"0 0 {WIDTH} {HEIGHT}"})
    ET.SubElement(svg, "rect", {"width": str(WIDTH), "height": str(HEIGHT), "fill": "white"})
    if title:
        t = ET.SubElement(svg, "text", {"x": str(WIDTH / 2), "y": "24", "text-anchor": "middle",
                                        "font-family": "sans-serif", "font-size": "16"})
        t.text = title
    attrs = {"class": "plot"}
    attrs.update({f"data-{k}": repr(v) for k, v in zip(("x-min", "x-max", "y-min", "y-max"), window)})
    attrs.update({f"data-{k}": repr(v) for k, v in BOX.items()})
    g = ET.SubElement(svg, "g", attrs)

    left, top, w, h = BOX["left"], BOX["top"], BOX["width"], BOX["height"]
    axis = {"stroke": "black", "stroke-width": "1"}
    ET.SubElement(g, "line", {"x1": str(left), "y1": str(top + h), "x2": str(left + w), "y2": str(top + h), **axis})
    ET.SubElement(g, "line", {"x1": str(left), "y1": str(top), "x2": str(left), "y2": str(top + h), **axis})
    for frac in np.linspace(0, 1, 5):
        xv = window[0] + frac * (window[1] - window[0])
        yv = window[2] + frac * (window[3] - window[2])
        px, _ = to_pixels(xv, window[2], window)
        _, py = to_pixels(window[0], yv, window)
        lab = ET.SubElement(g, "text", {"x": f"{float(px):.1f}", "y": str(top + h + 18), "text-anchor": "middle",
                                        "font-family": "sans-serif", "font-size": "11"})
        lab.text = f"{xv:.0f}"
        lab = ET.SubElement(g, "text", {"x": str(left - 6), "y": f"{float(py) + 4:.1f}", "text-anchor": "end",
                                        "font-family": "sans-serif", "font-size": "11"})
        lab.text = f"{yv:.3g}"
    xl = ET.SubElement(svg, "text", {"x": str(left + w / 2), "y": str(HEIGHT - 30), "text-anchor": "middle",
                                     "font-family": "sans-serif", "font-size": "12"})
    xl.text = xlabel
    yl = ET.SubElement(svg, "text", {"x": "16", "y": str(top + h / 2), "text-anchor": "middle",
                                     "font-family": "sans-serif", "font-size": "12",
                                     "transform": f"rotate(-90 16 {top + h / 2})"})
    yl.text = ylabel

    for i, (name, (xs, ys)) in enumerate(series.items()):
        px, py = to_pixels(xs, ys, window)
        points = " ".join(f"{float(a)!r},{float(b)!r}" for a, b in zip(px, py))
        color = COLORS[i % len(COLORS)]
        ET.SubElement(g, "polyline", {"class": "series", "data-series": name, "points": points, "fill": "none",
                                      "stroke": color, "stroke-width": "2"})
        ly = top + 14 + 16 * i
        ET.SubElement(svg, "line", {"x1": str(left + w - 150), "y1": str(ly), "x2": str(left + w - 130),
                                    "y2": str(ly), "stroke": color, "stroke-width": "2"})
        lt = ET.SubElement(svg, "text", {"x": str(left + w - 125), "y": str(ly + 4), "font-family": "sans-serif",
                                         "font-size": "11"})
        lt.text = name
    return ET.tostring(svg, encoding="unicode", xml_declaration=False) + "\n"


def read_polylines(svg_text: str) -> dict:
    """Recover ``{name: (xs, ys)}`` in data units from :func:`line_chart` output."""
    root = ET.fromstring(svg_text)
    g = root.find(f"{{{SVG_NS}}}g[@class='plot']")
    window = tuple(float(g.get(f"data-{k}")) for k in ("x-min", "x-max", "y-min", "y-max"))
    box = {k: float(g.get(f"data-{k}")) for k in BOX}
    out = {}
    for pl in g.findall(f"{{{SVG_NS}}}polyline"):
        pts = np.array([[float(v) for v in p.split(",")] for p in pl.get("points").split()])
        out[pl.get("data-series")] = from_pixels(pts[:, 0], pts[:, 1], window, box)
    return out


def prediction_charts(rows) -> dict:
    """One actual-vs-predicted chart per target, points ordered by year."""
    charts = {}
    for target in dict.fromkeys(r.target for r in rows):
        sel = sorted((r for r in rows if r.target == target), key=lambda r: r.year)
        years = [r.year for r in sel]
        phases = ", ".join(dict.fromkeys(r.phase for r in sel))
        charts[target] = line_chart(
            {"actual": (years, [r.actual for r in sel]), "predicted": (years, [r.predicted for r in sel])},
            title=f"{target} ({phases})",
        )
    return charts


def forecast_chart(results, history: dict = None) -> str:
    """Forecast trend per target, optionally preceded by its history."""
    series = {}
    for res in results:
        if history and res.target in history:
            hy, hv = history[res.target]
            series[f"{res.target} (history)"] = (list(hy), list(hv))
        series[res.target] = (list(res.years), list(res.values))
    return line_chart(series, title="Recursive forecast")
