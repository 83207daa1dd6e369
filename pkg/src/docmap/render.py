"""Standalone SVG output for the annotated map and evaluation curves."""

from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#bcbd22", "#17becf", "#7f7f7f",
)
UNASSIGNED_COLOR = "#c8c8c8"
METHOD_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


@dataclass
class MapScene:
    points: list  # (x, y, cluster) with cluster < 0 for unassigned
    labels: dict = field(default_factory=dict)  # cluster -> list of label strings
    anchors: dict = field(default_factory=dict)  # cluster -> (x, y) in data space
    width: int = 1200
    height: int = 900
    margin: int = 60


def cluster_color(c):
    return UNASSIGNED_COLOR if c is None or c < 0 else PALETTE[c % len(PALETTE)]


def _fit(xs, ys, width, height, margin):
    """Uniform scale + translation mapping the data bbox into the canvas."""
    if not xs:
        return lambda x, y: (width / 2, height / 2)
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0) or 1.0
    scale = min(width - 2 * margin, height - 2 * margin) / span
    cx = margin + (width - 2 * margin - (x1 - x0) * scale) / 2
    cy = margin + (height - 2 * margin - (y1 - y0) * scale) / 2
    # SVG y grows downward
    return lambda x, y: (cx + (x - x0) * scale, height - (cy + (y - y0) * scale))


def _header(width, height):
    return [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]


def map_svg(scene):
    xs = [p[0] for p in scene.points]
    ys = [p[1] for p in scene.points]
    to_px = _fit(xs, ys, scene.width, scene.height, scene.margin)
    out = _header(scene.width, scene.height)
    out.append('<g class="points">')
    for x, y, c in scene.points:
        px, py = to_px(x, y)
        cls = "-" if c is None or c < 0 else str(c)
        out.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3" fill="{cluster_color(c)}" '
                   f'fill-opacity="0.8" data-cluster="{cls}"/>')
    out.append("</g>")
    for c in sorted(scene.anchors):
        ax, ay = to_px(*scene.anchors[c])
        texts = [str(c)] + list(scene.labels.get(c, []))[:5]
        line_h = 15
        box_w = 12 + 7 * max(len(t) for t in texts)
        box_h = 6 + line_h * len(texts)
        # Box sits up-right of the mean; flipped when it would leave the canvas.
        bx = ax + 10 if ax + 10 + box_w <= scene.width else ax - 10 - box_w
        by = ay - 10 - box_h if ay - 10 - box_h >= 0 else ay + 10
        out.append(f'<g class="cluster-label" data-cluster="{c}">')
        out.append(f'<circle cx="{ax:.2f}" cy="{ay:.2f}" r="4" fill="none" '
                   f'stroke="{cluster_color(c)}" stroke-width="2"/>')
        out.append(f'<rect x="{bx:.2f}" y="{by:.2f}" width="{box_w}" height="{box_h}" '
                   f'fill="#ffffff" fill-opacity="0.85" stroke="{cluster_color(c)}"/>')
        for i, t in enumerate(texts):
            weight = ' font-weight="bold"' if i == 0 else ""
            out.append(f'<text x="{bx + 6:.2f}" y="{by + 3 + line_h * (i + 1) - 3:.2f}" '
                       f'font-size="12"{weight}>{escape(t)}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_map(scene, out):
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(map_svg(scene))


_PANELS = (
    ("precision", "n", "precision", "(a) precision"),
    ("recall", "n", "recall", "(b) recall"),
    ("f1", "n", "f1", "(c) F1"),
    ("pr", "recall", "precision", "(d) precision vs recall"),
)


def curves_svg(reports, width=1000, height=820):
    if not reports:
        raise ValueError("need at least one report")
    pw, ph = 400, 300
    origins = [(80, 60), (560, 60), (80, 440), (560, 440)]
    max_n = max(max(rep.column("n")) for rep in reports)
    out = _header(width, height)
    for (name, xname, yname, title), (ox, oy) in zip(_PANELS, origins):
        out.append(f'<g class="panel" id="panel-{name}">')
        out.append(f'<text x="{ox + pw / 2:.1f}" y="{oy - 15}" font-size="14" '
                   f'text-anchor="middle">{escape(title)}</text>')
        out.append(f'<rect x="{ox}" y="{oy}" width="{pw}" height="{ph}" fill="none" '
                   f'stroke="#333333"/>')
        if xname == "n":
            xmin, xmax = 1, max(max_n, 2)
        else:
            xmin, xmax = 0.0, 1.0
        for t in range(6):
            v = t / 5
            y = oy + ph - v * ph
            out.append(f'<text x="{ox - 8}" y="{y + 4:.1f}" font-size="10" '
                       f'text-anchor="end">{v:.1f}</text>')
            xv = xmin + (xmax - xmin) * t / 5
            x = ox + pw * t / 5
            label = f"{xv:.0f}" if xname == "n" else f"{xv:.1f}"
            out.append(f'<text x="{x:.1f}" y="{oy + ph + 15}" font-size="10" '
                       f'text-anchor="middle">{label}</text>')
        out.append(f'<text x="{ox + pw / 2:.1f}" y="{oy + ph + 32}" font-size="11" '
                   f'text-anchor="middle">{xname}</text>')
        out.append(f'<text x="{ox - 40}" y="{oy + ph / 2:.1f}" font-size="11" '
                   f'text-anchor="middle" transform="rotate(-90 {ox - 40} {oy + ph / 2:.1f})">'
                   f'{yname}</text>')
        for i, rep in enumerate(reports):
            xs = rep.column(xname)
            ys = rep.column(yname)
            pts = []
            for xv, yv in zip(xs, ys):
                xv = min(max(xv, xmin), xmax)
                yv = min(max(yv, 0.0), 1.0)
                px = ox + (xv - xmin) / (xmax - xmin) * pw
                py = oy + ph - yv * ph
                pts.append(f"{px:.2f},{py:.2f}")
            color = METHOD_COLORS[i % len(METHOD_COLORS)]
            out.append(f'<polyline class="curve" data-method={quoteattr(rep.method)} '
                       f'points="{" ".join(pts)}" fill="none" stroke="{color}" '
                       f'stroke-width="2"/>')
        out.append("</g>")
    out.append('<g class="legend">')
    for i, rep in enumerate(reports):
        x = 80 + 150 * i
        color = METHOD_COLORS[i % len(METHOD_COLORS)]
        out.append(f'<g class="legend-entry"><line x1="{x}" y1="800" x2="{x + 25}" y2="800" '
                   f'stroke="{color}" stroke-width="3"/><text x="{x + 30}" y="804" '
                   f'font-size="12">{escape(rep.method)}</text></g>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_curves(reports, out):
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(curves_svg(reports))
