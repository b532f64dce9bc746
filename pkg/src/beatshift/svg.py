"""Static SVG figures of a correction ledger.

Annotations sit in the upper lane, detections in the lower one. Every
annotation carries its inner tolerance band; only shifted detections carry
an outer band. Shifts are arrows labelled with the signed offset in
milliseconds, insertions and deletions get their own glyphs. Output is
plain text assembled in a fixed order, so identical inputs give identical
bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence
from xml.sax.saxutils import escape, quoteattr

from .core import EvalConfig, EvalResult, OpKind, SequenceLike, as_sequence

STYLE = {
    "background": "#ffffff",
    "frame": "#444444",
    "axis": "#222222",
    "text": "#111111",
    "inner_band": "#9ecae1",
    "inner_band_opacity": "0.45",
    "outer_band": "#fdd0a2",
    "outer_band_opacity": "0.45",
    "annotation": "#08519c",
    "detection": "#252525",
    "shift": "#e6550d",
    "insertion": "#31a354",
    "deletion": "#de2d26",
    "font": "DejaVu Sans, Arial, sans-serif",
}

MARGIN_LEFT = 60.0
MARGIN_RIGHT = 20.0
TITLE_HEIGHT = 24.0
AXIS_HEIGHT = 28.0


class InvalidSpecError(ValueError):
    pass


@dataclass(frozen=True)
class VizSpec:
    """Figure geometry. ``time_range=None`` fits the events padded by the outer window."""

    time_range: Optional[tuple[float, float]] = None
    width: float = 1000.0
    panel_height: float = 170.0
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.width > MARGIN_LEFT + MARGIN_RIGHT and self.panel_height > 0):
            raise InvalidSpecError(
                f"figure too small: width={self.width}, panel_height={self.panel_height}")
        if self.time_range is not None:
            start, end = self.time_range
            if not (math.isfinite(start) and math.isfinite(end) and end > start):
                raise InvalidSpecError(f"inverted or empty time range {self.time_range}")

    def resolved(self, events: Sequence[float], outer: float) -> "VizSpec":
        if self.time_range is not None:
            return self
        if events:
            start, end = min(events) - outer, max(events) + outer
        else:
            start, end = 0.0, 1.0
        return VizSpec((start, end), self.width, self.panel_height, self.style)

    def x(self, t: float) -> float:
        start, end = self.time_range
        span = self.width - MARGIN_LEFT - MARGIN_RIGHT
        return MARGIN_LEFT + (t - start) / (end - start) * span

    def time_at(self, x: float) -> float:
        start, end = self.time_range
        span = self.width - MARGIN_LEFT - MARGIN_RIGHT
        return start + (x - MARGIN_LEFT) / span * (end - start)

    @property
    def seconds_per_pixel(self) -> float:
        start, end = self.time_range
        return (end - start) / (self.width - MARGIN_LEFT - MARGIN_RIGHT)


def _f(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def _tick_step(span: float) -> float:
    raw = span / 10
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if m * mag >= raw:
            return m * mag
    return 10 * mag


def _axis(spec: VizSpec, y: float, style: dict) -> list[str]:
    start, end = spec.time_range
    step = _tick_step(end - start)
    out = [f'<g class="axis" stroke={quoteattr(style["axis"])} stroke-width="1">',
           f'<line x1="{_f(spec.x(start))}" y1="{_f(y)}" x2="{_f(spec.x(end))}" y2="{_f(y)}"/>']
    k = math.ceil(start / step - 1e-9)
    while k * step <= end + 1e-9:
        t = k * step
        x = _f(spec.x(t))
        out.append(f'<line x1="{x}" y1="{_f(y)}" x2="{x}" y2="{_f(y + 4)}"/>')
        out.append(f'<text x="{x}" y="{_f(y + 16)}" text-anchor="middle" stroke="none" '
                   f'fill={quoteattr(style["text"])} font-size="10">{t:g}</text>')
        k += 1
    out.append("</g>")
    return out


def _panel(result: EvalResult, anns, config: EvalConfig, spec: VizSpec, style: dict,
           label: Optional[str]) -> list[str]:
    """Panel body in local coordinates, top at y=0, height spec.panel_height."""
    h = spec.panel_height
    lane_top = TITLE_HEIGHT
    lane_h = (h - TITLE_HEIGHT - 8) / 2
    ann_y0, ann_y1 = lane_top, lane_top + lane_h
    det_y0, det_y1 = ann_y1 + 8, ann_y1 + 8 + lane_h
    arrow_y = det_y0 + lane_h * 0.3
    ledger = result.ledger
    inner, outer = config.inner_half_width, config.outer_half_width

    heading = f"ae={result.annotation_efficiency:.3f} F={result.f_measure:.3f}"
    if label:
        heading = f"{label}: {heading}"
    out = [f'<text class="title" x="{_f(MARGIN_LEFT)}" y="16" font-size="13" '
           f'fill={quoteattr(style["text"])}>{escape(heading)}</text>',
           f'<text class="lane-label" x="4" y="{_f((ann_y0 + ann_y1) / 2 + 4)}" font-size="10" '
           f'fill={quoteattr(style["text"])}>annot.</text>',
           f'<text class="lane-label" x="4" y="{_f((det_y0 + det_y1) / 2 + 4)}" font-size="10" '
           f'fill={quoteattr(style["text"])}>detect.</text>']

    out.append(f'<g class="inner-bands" fill={quoteattr(style["inner_band"])} '
               f'fill-opacity={quoteattr(style["inner_band_opacity"])}>')
    for a in anns:
        x0, x1 = spec.x(a - inner), spec.x(a + inner)
        out.append(f'<rect class="inner-band" x="{_f(x0)}" y="{_f(ann_y0)}" '
                   f'width="{_f(x1 - x0)}" height="{_f(det_y1 - ann_y0)}"/>')
    out.append("</g>")

    shifts = ledger.of_kind(OpKind.SHIFT)
    out.append(f'<g class="outer-bands" fill={quoteattr(style["outer_band"])} '
               f'fill-opacity={quoteattr(style["outer_band_opacity"])}>')
    for op in shifts:
        d = op.detection_time
        x0, x1 = spec.x(d - outer), spec.x(d + outer)
        out.append(f'<rect class="outer-band" x="{_f(x0)}" y="{_f(det_y0)}" '
                   f'width="{_f(x1 - x0)}" height="{_f(lane_h)}"/>')
    out.append("</g>")

    out.append(f'<g class="annotations" stroke={quoteattr(style["annotation"])} stroke-width="2">')
    for a in anns:
        x = _f(spec.x(a))
        out.append(f'<line class="annotation" x1="{x}" y1="{_f(ann_y0)}" x2="{x}" y2="{_f(ann_y1)}"/>')
    out.append("</g>")

    out.append(f'<g class="detections" stroke={quoteattr(style["detection"])} stroke-width="2">')
    for d in ledger.detection_times():
        x = _f(spec.x(d))
        out.append(f'<line class="detection" x1="{x}" y1="{_f(det_y0)}" x2="{x}" y2="{_f(det_y1)}"/>')
    out.append("</g>")

    out.append(f'<g class="shifts" stroke={quoteattr(style["shift"])} '
               f'fill={quoteattr(style["shift"])} stroke-width="1.5">')
    for op in shifts:
        xd, xa = spec.x(op.detection_time), spec.x(op.annotation_time)
        out.append(f'<path class="shift-arrow" d="M {_f(xd)} {_f(arrow_y)} L {_f(xa)} {_f(arrow_y)}" '
                   f'fill="none" marker-end="url(#arrowhead)"/>')
        ms = op.offset * 1000
        out.append(f'<text class="offset-label" x="{_f((xd + xa) / 2)}" y="{_f(arrow_y - 4)}" '
                   f'text-anchor="middle" stroke="none" font-size="9">{ms:+.0f} ms</text>')
    out.append("</g>")

    r = min(5.0, lane_h / 4)
    out.append(f'<g class="insertions" stroke={quoteattr(style["insertion"])} stroke-width="2" fill="none">')
    for op in ledger.of_kind(OpKind.INSERT):
        x, y = spec.x(op.annotation_time), det_y1 - lane_h * 0.3
        out.append(f'<path class="insertion" d="M {_f(x - r)} {_f(y)} H {_f(x + r)} '
                   f'M {_f(x)} {_f(y - r)} V {_f(y + r)}"/>')
    out.append("</g>")

    out.append(f'<g class="deletions" stroke={quoteattr(style["deletion"])} stroke-width="2" fill="none">')
    for op in ledger.of_kind(OpKind.DELETE):
        x, y = spec.x(op.detection_time), det_y1 - lane_h * 0.3
        out.append(f'<path class="deletion" d="M {_f(x - r)} {_f(y - r)} L {_f(x + r)} {_f(y + r)} '
                   f'M {_f(x - r)} {_f(y + r)} L {_f(x + r)} {_f(y - r)}"/>')
    out.append("</g>")
    return out


def _document(width: float, height: float, style: dict, body: list[str]) -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(width)}" '
        f'height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}" '
        f'font-family={quoteattr(style["font"])}>',
        "<defs>",
        f'<marker id="arrowhead" markerWidth="8" markerHeight="8" refX="7" refY="4" '
        f'orient="auto" markerUnits="userSpaceOnUse"><path d="M 0 0 L 8 4 L 0 8 z" '
        f'fill={quoteattr(style["shift"])}/></marker>',
        "</defs>",
        f'<rect class="background" x="0" y="0" width="{_f(width)}" height="{_f(height)}" '
        f'fill={quoteattr(style["background"])}/>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def _events(result: EvalResult, anns) -> list[float]:
    return list(anns) + list(result.ledger.detection_times())


def render_svg(result: EvalResult, anns: SequenceLike, config: Optional[EvalConfig] = None,
               spec: Optional[VizSpec] = None, label: Optional[str] = None) -> str:
    """Render one evaluation as a standalone SVG document."""
    config = EvalConfig() if config is None else config
    anns = as_sequence(anns)
    spec = (spec or VizSpec()).resolved(_events(result, anns), config.outer_half_width)
    style = {**STYLE, **spec.style}
    body = _panel(result, anns, config, spec, style, label)
    body += _axis(spec, spec.panel_height, style)
    return _document(spec.width, spec.panel_height + AXIS_HEIGHT, style, body)


def render_comparison_svg(results, anns: SequenceLike, config: Optional[EvalConfig] = None,
                          spec: Optional[VizSpec] = None) -> str:
    """Stack one framed panel per variation over a shared time axis."""
    results = list(results)
    if not results:
        raise InvalidSpecError("need at least one variation result")
    config = EvalConfig() if config is None else config
    anns = as_sequence(anns)
    events = [t for vr in results for t in _events(vr.result, anns)]
    spec = (spec or VizSpec()).resolved(events, config.outer_half_width)
    style = {**STYLE, **spec.style}
    h = spec.panel_height
    body = []
    for i, vr in enumerate(results):
        body.append(f'<g class="panel" data-variation={quoteattr(vr.kind.value)} '
                    f'transform="translate(0,{_f(i * h)})">')
        body.append(f'<rect class="panel-frame" x="0.500" y="0.500" width="{_f(spec.width - 1)}" '
                    f'height="{_f(h - 1)}" fill="none" stroke={quoteattr(style["frame"])}/>')
        body += _panel(vr.result, anns, config, spec, style, vr.kind.value)
        body.append("</g>")
    total = len(results) * h
    body += _axis(spec, total, style)
    return _document(spec.width, total + AXIS_HEIGHT, style, body)
