"""Static SVG renderings of array configurations and movement traces.

Each atom gets a circle of half the interaction radius, so two atoms can
interact exactly when their circles touch or overlap.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

SCALE = 6.0  # pixels per micrometre
PAD = 30.0

SLM_FILL = "#4a6fa5"
AOD_FILL = "#e07a1f"
SITE_FILL = "#d0d0d0"
PATH_STROKE = {"move": "#c0392b", "induced": "#8e44ad", "home": "#27ae60", "trap_change": "#2c3e50"}


def _f(v):
    return f"{v:.2f}"


class _Canvas:
    def __init__(self, bounds, title):
        xmin, xmax, ymin, ymax = bounds
        self.xmin, self.ymax = xmin, ymax
        self.w = (xmax - xmin) * SCALE + 2 * PAD
        self.h = (ymax - ymin) * SCALE + 2 * PAD + 20
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(self.w)}" height="{_f(self.h)}" '
            f'viewBox="0 0 {_f(self.w)} {_f(self.h)}">',
            '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" '
            'markerHeight="6" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>',
            f'<rect width="{_f(self.w)}" height="{_f(self.h)}" fill="white"/>',
            f'<text x="{_f(PAD)}" y="18" font-family="sans-serif" font-size="13">{escape(title)}</text>',
        ]

    def xy(self, p):
        # SVG y grows downward; flip so larger y is drawn higher
        return ((p[0] - self.xmin) * SCALE + PAD, (self.ymax - p[1]) * SCALE + PAD + 20)

    def circle(self, p, r_um, **attrs):
        x, y = self.xy(p)
        extra = " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in attrs.items())
        self.parts.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r_um * SCALE)}" {extra}/>')

    def line(self, p, q, **attrs):
        (x0, y0), (x1, y1) = self.xy(p), self.xy(q)
        extra = " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in attrs.items())
        self.parts.append(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x1)}" y2="{_f(y1)}" {extra}/>')

    def text(self, p, s, size=9):
        x, y = self.xy(p)
        self.parts.append(f'<text x="{_f(x + 3)}" y="{_f(y - 3)}" font-family="sans-serif" '
                          f'font-size="{size}">{escape(str(s))}</text>')

    def done(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _sites(canvas, bounds, unit):
    xmin, xmax, ymin, ymax = bounds
    nx = int(round((xmax - xmin) / unit)) + 1
    ny = int(round((ymax - ymin) / unit)) + 1
    for j in range(ny):
        for i in range(nx):
            canvas.circle((xmin + i * unit, ymin + j * unit), 0.6, fill=SITE_FILL)


def _atoms(canvas, positions, aod, radius, blockade, annotate):
    for q, p in enumerate(positions):
        fill = AOD_FILL if q in aod else SLM_FILL
        canvas.circle(p, radius / 2, fill=fill, fill_opacity="0.12", stroke=fill, stroke_width="0.8")
        canvas.circle(p, 1.2, fill=fill)
        canvas.text(p, q)
    if annotate and len(positions):
        canvas.circle(positions[0], blockade / 2, fill="none", stroke="#999999",
                      stroke_dasharray="4 3", stroke_width="0.6")


def _legend(canvas, radius, blockade):
    canvas.parts.append(
        f'<text x="{_f(PAD)}" y="{_f(canvas.h - 6)}" font-family="sans-serif" font-size="10">'
        f'circles: r/2 with r = {radius:.3f} um (dashed: blockade/2, blockade = {blockade:.3f} um); '
        f'blue SLM, orange AOD</text>')


def render_configuration(positions, aod_qubits, topo, title="configuration"):
    """One snapshot: sites, atoms and their half-radius circles."""
    canvas = _Canvas(topo["bounds_um"], title)
    _sites(canvas, topo["bounds_um"], topo["unit_um"])
    _atoms(canvas, positions, set(aod_qubits), topo["interaction_radius_um"],
           topo["blockade_radius_um"], annotate=True)
    _legend(canvas, topo["interaction_radius_um"], topo["blockade_radius_um"])
    return canvas.done()


def render_trace(trace, topo, layers=None, title="movement trace"):
    """Home configuration plus an arrow for every trace event in ``layers``.

    ``trace`` is a list of event dicts (layer, qubit, kind, from, to,
    duration_us); ``topo`` is the report's topology block. ``layers`` is an
    inclusive ``(first, last)`` range or None for all.
    """
    canvas = _Canvas(topo["bounds_um"], title)
    _sites(canvas, topo["bounds_um"], topo["unit_um"])
    _atoms(canvas, topo.get("home_positions_um", []), set(topo.get("aod_qubits", [])),
           topo["interaction_radius_um"], topo["blockade_radius_um"], annotate=True)
    for ev in trace:
        if layers is not None and not layers[0] <= ev["layer"] <= layers[1]:
            continue
        stroke = PATH_STROKE.get(ev["kind"], "#000000")
        if ev["from"] == ev["to"]:
            continue
        canvas.line(ev["from"], ev["to"], stroke=stroke, stroke_width="1.2",
                    marker_end="url(#arrow)", opacity="0.8")
    _legend(canvas, topo["interaction_radius_um"], topo["blockade_radius_um"])
    return canvas.done()
