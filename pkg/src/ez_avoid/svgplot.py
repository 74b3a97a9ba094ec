"""Deterministic SVG plots of solved trajectories.

Coordinates are printed with a fixed number of decimals so identical
reports give byte-identical files.  Each path may carry snapshots of the
instantaneous zone (a cardioid that depends on the heading at that node).
"""

from __future__ import annotations

from html import escape
from typing import Sequence

import numpy as np

from .scenarios import SolveReport

COLORS = {"A": "#555555", "B": "#c0392b", "C": "#2471a3", "D": "#1e8449"}
SWEEP_COLORS = ("#7fb3d5", "#2e86c1", "#1f618d", "#154360", "#0b2545")
SNAPSHOT_TOL = 1e-4
SIZE = 560
MARGIN = 40


def cardioid(heading: float, r_max: float, n: int = 121) -> np.ndarray:
    """Boundary of the zone seen by a vehicle with the given heading (origin-centred)."""
    lam = np.linspace(0.0, 2.0 * np.pi, n)
    r = 0.5 * r_max * (1.0 - np.cos(heading - lam))
    return np.column_stack((r * np.cos(lam), r * np.sin(lam)))


def snapshot_nodes(report: SolveReport) -> np.ndarray:
    """Nodes where the zone is drawn: active constraint (B) or positive penalty (C, D)."""
    if report.kind == "B":
        return np.flatnonzero(report.node_c >= -SNAPSHOT_TOL)
    if report.kind in ("C", "D"):
        return np.flatnonzero(report.node_g > 0.0)
    return np.empty(0, dtype=int)


class _Frame:
    def __init__(self, reports: Sequence[SolveReport]):
        pts = [r.dense_states for r in reports]
        r_max = max(r.spec.ez.r_max for r in reports)
        pts.append(np.array([[-r_max, -r_max], [r_max, r_max]]))
        allp = np.vstack(pts)
        lo, hi = allp.min(axis=0), allp.max(axis=0)
        span = float(np.max(hi - lo)) * 1.08
        centre = 0.5 * (lo + hi)
        self.lo = centre - 0.5 * span
        self.scale = (SIZE - 2 * MARGIN) / span

    def xy(self, p):
        p = np.atleast_2d(p)
        sx = MARGIN + (p[:, 0] - self.lo[0]) * self.scale
        sy = SIZE - MARGIN - (p[:, 1] - self.lo[1]) * self.scale
        return np.column_stack((sx, sy))

    def points(self, p) -> str:
        return " ".join(f"{x:.3f},{y:.3f}" for x, y in self.xy(p))


def render(reports: Sequence[SolveReport], labels: Sequence[str] | None = None,
           title: str = "", colors: Sequence[str] | None = None) -> str:
    if not reports:
        raise ValueError("nothing to plot")
    labels = list(labels) if labels is not None else [f"scenario {r.kind}" for r in reports]
    colors = list(colors) if colors is not None else [COLORS.get(r.kind, "#000000") for r in reports]
    fr = _Frame(reports)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{SIZE / 2:.1f}" y="22" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="14">{escape(title)}</text>')

    r_max = reports[0].spec.ez.r_max
    o = fr.xy([0.0, 0.0])[0]
    out.append(f'<circle cx="{o[0]:.3f}" cy="{o[1]:.3f}" r="{r_max * fr.scale:.3f}" fill="none" '
               f'stroke="#999999" stroke-dasharray="4 3" stroke-width="0.8"/>')
    out.append(f'<circle cx="{o[0]:.3f}" cy="{o[1]:.3f}" r="3" fill="black"/>')

    for rep, color in zip(reports, colors):
        for i in snapshot_nodes(rep):
            shape = cardioid(rep.headings[i], rep.spec.ez.r_max)
            out.append(f'<polygon points="{fr.points(shape)}" fill="{color}" fill-opacity="0.025" '
                       f'stroke="{color}" stroke-opacity="0.5" stroke-width="0.6"/>')
    for rep, color in zip(reports, colors):
        out.append(f'<polyline points="{fr.points(rep.dense_states)}" fill="none" '
                   f'stroke="{color}" stroke-width="1.8"/>')
        for x, y in fr.xy(rep.states):
            out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="2.2" fill="{color}"/>')

    s0, sf = fr.xy(reports[0].spec.x0)[0], fr.xy(reports[0].spec.xf)[0]
    out.append(f'<rect x="{s0[0] - 5:.3f}" y="{s0[1] - 5:.3f}" width="10" height="10" fill="black"/>')
    out.append(f'<polygon points="{sf[0]:.3f},{sf[1] - 7:.3f} {sf[0] - 6:.3f},{sf[1] + 5:.3f} '
               f'{sf[0] + 6:.3f},{sf[1] + 5:.3f}" fill="black"/>')

    for k, (lab, color) in enumerate(zip(labels, colors)):
        y = 42 + 16 * k
        out.append(f'<line x1="{SIZE - 150}" y1="{y - 4}" x2="{SIZE - 130}" y2="{y - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{SIZE - 125}" y="{y}" font-family="sans-serif" '
                   f'font-size="11">{escape(lab)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
