"""SVG figures of real and tropical arrangements in rank one and two.

Figures are combinatorial sketches: the bounding box is chosen to contain every
chamber witness and every vertex, and all geometry is computed exactly before
being rounded for output.
"""
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger
from pydantic import BaseModel, Field

from .arrangement import real_chambers
from .config import RenderConfig
from .exceptions import DimensionTooLarge
from .models.arrangement import HypertoricData
from .models.tropical import TropicalArrangement
from .tropical import build_tropical, enumerate_chambers, enumerate_strata
from .types import Rational
from .utils import format_decimal

SVG_NS = "http://www.w3.org/2000/svg"

Point = Tuple[Fraction, Fraction]


def _attr_name(key: str) -> str:
    return key.rstrip("_").replace("_", "-")


def _props(attrs: Dict[str, object]) -> str:
    return " ".join(f'{_attr_name(k)}="{v}"' for k, v in attrs.items())


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class Element:
    """An SVG element rendered to a string."""

    def __init__(self, tag: str, *children: "Element", text: str = "", **attrs: object) -> None:
        self.tag = tag
        self.children = list(children)
        self.text = text
        self.attrs = attrs

    def __repr__(self) -> str:
        return f"{self.tag}: {_props(self.attrs)}"

    def svg(self) -> str:
        props = _props(self.attrs)
        pre = " " if props else ""
        if not self.children and not self.text:
            return f"<{self.tag}{pre}{props} />"
        inner = _escape(self.text) + "".join("\n" + c.svg() for c in self.children)
        if self.children:
            inner += "\n"
        return f"<{self.tag}{pre}{props}>{inner}</{self.tag}>"


class Segment(BaseModel):
    start: Tuple[Rational, ...]
    end: Tuple[Rational, ...]


class Scene(BaseModel):
    """Exact geometry of a figure: one polyline group per hyperplane."""

    d: int
    hyperplanes: Dict[int, List[Segment]] = Field(default_factory=dict)
    labels: List[Tuple[str, Tuple[Rational, ...]]] = Field(default_factory=list)
    markers: List[Tuple[str, Tuple[Rational, ...]]] = Field(default_factory=list)
    box: Optional[Tuple[Rational, Rational, Rational, Rational]] = None


def _bounding_box(points: Sequence[Sequence[Fraction]], d: int) -> Tuple[Fraction, ...]:
    xs = [p[0] for p in points] or [Fraction(0)]
    ys = [p[1] for p in points] if d == 2 and points else [Fraction(0)]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    pad_x = max((x1 - x0) / 4, Fraction(1))
    pad_y = max((y1 - y0) / 4, Fraction(1))
    return x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y


def _clip_line(
    normal: Sequence[int], offset: Fraction, box: Sequence[Fraction]
) -> Optional[Segment]:
    """The part of the line <s, normal> = offset inside the box."""
    a, b = normal
    x0, x1, y0, y1 = box
    hits = set()
    if b:
        for x in (x0, x1):
            y = (offset - a * x) / b
            if y0 <= y <= y1:
                hits.add((x, y))
    if a:
        for y in (y0, y1):
            x = (offset - b * y) / a
            if x0 <= x <= x1:
                hits.add((x, y))
    if len(hits) < 2:
        return None
    ordered = sorted(hits)
    return Segment(start=ordered[0], end=ordered[-1])


def _ray(origin: Point, direction: Tuple[int, int], box: Sequence[Fraction]) -> Segment:
    """The segment from `origin` along `direction` up to the box boundary."""
    x0, x1, y0, y1 = box
    limits = []
    for value, step, low, high in ((origin[0], direction[0], x0, x1), (origin[1], direction[1], y0, y1)):
        if step > 0:
            limits.append((high - value) / step)
        elif step < 0:
            limits.append((low - value) / step)
    t = max(min(limits), Fraction(0))
    return Segment(start=origin, end=(origin[0] + t * direction[0], origin[1] + t * direction[1]))


def real_scene(h: HypertoricData) -> Scene:
    """Hyperplanes <s, u_k> = lambda_k with their sign-vector chambers."""
    if h.d > 2:
        raise DimensionTooLarge(h.d)
    chambers = real_chambers(h)
    scene = Scene(d=h.d, labels=[(c.signs, c.witness) for c in chambers])
    if h.d == 1:
        points = [(h.offset(k) / h.vector(k)[0],) for k in range(1, h.n + 1)]
        scene.box = _bounding_box(points + [c.witness for c in chambers], 1)
        for k, p in enumerate(points, start=1):
            scene.hyperplanes[k] = [Segment(start=p, end=p)]
        return scene
    scene.box = _bounding_box(_real_vertices(h) + [c.witness for c in chambers], 2)
    for k in range(1, h.n + 1):
        segment = _clip_line(h.vector(k), h.offset(k), scene.box)
        scene.hyperplanes[k] = [segment] if segment else []
    return scene


def _real_vertices(h: HypertoricData) -> List[Point]:
    vertices = []
    for i in range(1, h.n + 1):
        for j in range(i + 1, h.n + 1):
            (a, b), (c, e) = h.vector(i), h.vector(j)
            det = a * e - b * c
            if det:
                li, lj = h.offset(i), h.offset(j)
                vertices.append(((li * e - b * lj) / det, (a * lj - c * li) / det))
    return vertices


def tropical_scene(arr: TropicalArrangement) -> Scene:
    """Walls and tropical lines, chamber labels and 0-dimensional strata."""
    if arr.d > 2:
        raise DimensionTooLarge(arr.d)
    chambers = enumerate_chambers(arr)
    vertices = [s for s in enumerate_strata(arr) if s.dimension == 0]
    scene = Scene(
        d=arr.d,
        labels=[(c.key, c.witness) for c in chambers],
        markers=[(s.key, s.cells[0].witness) for s in vertices],
    )
    corners = [
        tuple([hp.constant] * arr.d) for hp in arr.hyperplanes
    ]
    scene.box = _bounding_box(
        corners + [c.witness for c in chambers] + [m[1] for m in scene.markers], arr.d
    )
    for hp in arr.hyperplanes:
        c = hp.constant
        if arr.d == 1:
            scene.hyperplanes[hp.index] = [Segment(start=(c,), end=(c,))]
        elif len(hp.support) == 1:
            normal = (1, 0) if hp.support == [1] else (0, 1)
            segment = _clip_line(normal, c, scene.box)
            scene.hyperplanes[hp.index] = [segment] if segment else []
        else:
            apex = (c, c)
            scene.hyperplanes[hp.index] = [
                _ray(apex, (1, 1), scene.box),
                _ray(apex, (-1, 0), scene.box),
                _ray(apex, (0, -1), scene.box),
            ]
    return scene


class _Canvas:
    def __init__(self, scene: Scene, render: RenderConfig) -> None:
        self.scene = scene
        self.render = render
        self.box = scene.box or (Fraction(-1), Fraction(1), Fraction(-1), Fraction(1))

    def x(self, value: Fraction) -> str:
        x0, x1 = self.box[0], self.box[1]
        span = self.render.width - 2 * self.render.margin
        return format_decimal(self.render.margin + (value - x0) / (x1 - x0) * span, 2)

    def y(self, value: Optional[Fraction]) -> str:
        if value is None or self.scene.d == 1:
            return format_decimal(Fraction(self.render.height, 2), 2)
        y0, y1 = self.box[2], self.box[3]
        span = self.render.height - 2 * self.render.margin
        return format_decimal(self.render.margin + (y1 - value) / (y1 - y0) * span, 2)

    def point(self, p: Sequence[Fraction]) -> Tuple[str, str]:
        return self.x(p[0]), self.y(p[1] if len(p) > 1 else None)

    def path(self, segments: List[Segment]) -> str:
        parts = []
        for seg in segments:
            (sx, sy), (ex, ey) = self.point(seg.start), self.point(seg.end)
            if self.scene.d == 1:
                # a point on the number line is drawn as a tick
                half = Fraction(self.render.height, 10)
                mid = Fraction(self.render.height, 2)
                parts.append(
                    f"M {sx} {format_decimal(mid - half, 2)} L {sx} {format_decimal(mid + half, 2)}"
                )
            else:
                parts.append(f"M {sx} {sy} L {ex} {ey}")
        return " ".join(parts)


def _axes(canvas: _Canvas) -> List[Element]:
    w, h = canvas.render.width, canvas.render.height
    m = canvas.render.margin
    mid_x, mid_y = format_decimal(Fraction(w, 2), 2), format_decimal(Fraction(h, 2), 2)
    return [
        Element("path", class_="axis", d=f"M {m} {mid_y} L {w - m} {mid_y}", stroke="#999"),
        Element("path", class_="axis", d=f"M {mid_x} {m} L {mid_x} {h - m}", stroke="#999"),
    ]


def render(scene: Scene, config: Optional[RenderConfig] = None, title: str = "") -> str:
    """Serialize a scene as an SVG 1.1 document.

    A scene without hyperplanes renders as a canvas with axes only.
    """
    config = config or RenderConfig()
    canvas = _Canvas(scene, config)
    body: List[Element] = []
    if title:
        body.append(Element("title", text=title))
    if not scene.hyperplanes:
        body.extend(_axes(canvas))
    elif scene.d == 1:
        body.append(_axes(canvas)[0])
    for k, segments in sorted(scene.hyperplanes.items()):
        body.append(
            Element(
                "path",
                class_="hyperplane",
                id=f"H{k}",
                d=canvas.path(segments),
                stroke="black",
                fill="none",
            )
        )
    for key, p in scene.markers:
        x, y = canvas.point(p)
        body.append(Element("circle", class_="stratum", cx=x, cy=y, r=3, fill="black", **{"data-key": key}))
    for text, p in scene.labels:
        x, y = canvas.point(p)
        body.append(
            Element("text", class_="chamber", x=x, y=y, text=text, font_size=10, text_anchor="middle")
        )
    doc = Element(
        "svg",
        *body,
        xmlns=SVG_NS,
        version="1.1",
        width=config.width,
        height=config.height,
        viewBox=f"0 0 {config.width} {config.height}",
    )
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + doc.svg() + "\n"


def emit_svg(
    h: HypertoricData,
    kind: str,
    render_config: Optional[RenderConfig] = None,
    arrangement: Optional[TropicalArrangement] = None,
) -> str:
    """Render the real or tropical arrangement of `h`.

    Raises
    ------
    DimensionTooLarge
        d > 2.
    """
    if h.d > 2:
        logger.bind(d=h.d).error("Cannot render arrangement")
        raise DimensionTooLarge(h.d)
    if kind == "real":
        scene = real_scene(h)
    elif kind == "tropical":
        scene = tropical_scene(arrangement or build_tropical(h))
    else:
        raise ValueError(f"unknown figure kind {kind!r}")
    logger.debug(
        "Rendering {} figure with {} hyperplanes and {} labels",
        kind,
        len(scene.hyperplanes),
        len(scene.labels),
    )
    return render(scene, render_config, title=f"{kind} arrangement")
