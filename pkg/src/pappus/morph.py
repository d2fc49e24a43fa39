"""Morphed marked-box operations and their orbits.

Sigma_{a,b} is a projective map preserving the normal box M0 and commuting
with the reflection x -> -x.  A box M is morphed by conjugating Sigma with
its normalizer T_M (the map taking M's vertices to those of M0), and a
morphed operation is the classical operation followed by the morph of the
resulting box.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .boxes import (NORMAL_VERTICES, MarkedBox, PappusParams, generator_polys, generators,
                    initial_box, nested_or_disjoint, op_b, op_i, op_t)
from .errors import (DegenerateBox, DepthLimit, InternalError, NotInTheta, ParamOutOfRange,
                     SingularMatrix)
from .kernel import HomPoint, ProjMap
from .poly import pmat, pmat_mul, variables

MAX_DEPTH = 7


@dataclass(frozen=True)
class MorphParams:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        a, b = Fraction(self.a), Fraction(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a <= 0 or b < 1:
            raise ParamOutOfRange(f"(a,b)=({a},{b}) needs a > 0 and b >= 1")

    @property
    def is_identity(self) -> bool:
        return self.a == 1 and self.b == 1


def _lam(lam) -> tuple[Fraction, Fraction]:
    if isinstance(lam, MorphParams):
        return lam.a, lam.b
    a, b = (Fraction(x) for x in lam)
    return a, b


def sigma_matrix(lam) -> ProjMap:
    a, b = _lam(lam)
    if a <= 0 or b <= 0:
        raise ParamOutOfRange("Sigma needs a > 0 and b > 0")
    return ProjMap([[1, 0, 0],
                    [0, (1 + b**2) / (2 * a * b), (b**2 - 1) / (2 * b)],
                    [0, (b**2 - 1) / (2 * b), a * (1 + b**2) / (2 * b)]])


def sigma_polys():
    """Numerators S, S' with Sigma = S/(2ab) and Sigma^{-1} = S'/(2ab)."""
    a, b = variables("a b")
    s = pmat([[2 * a * b, 0, 0],
              [0, 1 + b**2, a * (b**2 - 1)],
              [0, a * (b**2 - 1), a**2 * (1 + b**2)]])
    s_inv = pmat([[2 * a * b, 0, 0],
                  [0, a**2 * (1 + b**2), -a * (b**2 - 1)],
                  [0, -a * (b**2 - 1), 1 + b**2]])
    return s, s_inv


REFLECTION = ProjMap.diag(-1, 1, 1)


def normalizer(m: MarkedBox, flip: bool = False) -> ProjMap:
    """Projective map sending (p, q, r, s) to the normal vertices in order.

    With ``flip`` the box is first relabelled left-right, which composes the
    result with the reflection x -> -x (the other admissible choice).
    """
    src = m.mirror().vertices if flip else m.vertices
    try:
        return ProjMap.four_point(src, NORMAL_VERTICES)
    except SingularMatrix as exc:
        raise DegenerateBox(str(exc)) from None


def morph_box(m: MarkedBox, lam, flip: bool = False) -> MarkedBox:
    a, b = _lam(lam)
    if a == 1 and b == 1:
        return m
    t = normalizer(m, flip)
    g = t.inverse() @ sigma_matrix((a, b)) @ t
    return m.apply(g)


def segment_bounds(b):
    """Endpoints of the a-segment of Theta at height b (None means unbounded)."""
    b = Fraction(b)
    if b <= 1:
        return None
    k = 1 + 2 * b - b**2
    if k <= 0:
        return (Fraction(0), None)
    return ((1 + 2 * b - b**2) / (b**2 + 1), (b**2 + 1) / k)


def theta_closed_form(lam) -> bool:
    a, b = _lam(lam)
    seg = segment_bounds(b)
    if seg is None or a <= 0:
        return False
    lo, hi = seg
    return lo < a and (hi is None or a < hi)


def theta_geometric(lam) -> bool:
    """Sigma(M0) inside the open normal box, tested on the images of the
    vertex lifts and of one interior point per edge."""
    a, b = _lam(lam)
    if a <= 0 or b <= 0:
        return False
    m0 = initial_box((0, 0))
    sig = sigma_matrix((a, b))
    lifts = m0.lifts
    probes = list(lifts) + [tuple(x + y for x, y in zip(lifts[k], lifts[(k + 1) % 4]))
                            for k in range(4)]
    vals = [sum(n[i] * v[i] for i in range(3))
            for v in (sig.apply_vec(p) for p in probes) for n in m0.edge_normals]
    return all(v > 0 for v in vals) or all(v < 0 for v in vals)


def theta_contains(lam) -> bool:
    closed = theta_closed_form(lam)
    geo = theta_geometric(lam)
    if closed != geo:
        raise InternalError(f"Theta tests disagree at {lam}: closed={closed}, geometric={geo}")
    return closed


def sigma_vertex_images(lam):
    """Affine images of [1:1:0] and [1:0:1] under Sigma."""
    sig = sigma_matrix(lam)
    return sig.apply(HomPoint(1, 1, 0)).affine(), sig.apply(HomPoint(1, 0, 1)).affine()


# ---------------------------------------------------------------------------
# morphed operations


def morphed_op(name: str, lam):
    classical = {"i": op_i, "t": op_t, "b": op_b}[name]

    def op(m: MarkedBox) -> MarkedBox:
        return morph_box(classical(m), lam)

    op.__name__ = f"{name}_lambda"
    return op


def morphed_ops(m: MarkedBox, lam) -> dict[str, MarkedBox]:
    return {n: morphed_op(n, lam)(m) for n in "itb"}


def morphed_op_table(lam):
    return {n: morphed_op(n, lam) for n in "itb"}


def morphed_generators(a, b, c, d) -> tuple[ProjMap, ProjMap]:
    """(r1, Sigma^{-1} r2 Sigma) for the parameters (a, b, c, d)."""
    lam = MorphParams(a, b)
    r1, r2 = generators(PappusParams(c, d))
    s = sigma_matrix(lam)
    return r1, s.inverse() @ r2 @ s


def morphed_generator_polys():
    """Numerators R1, R2m and denominators with r1 = R1/D1, r2m = R2m/D2."""
    a, b = variables("a b")
    r1, r2, d1 = generator_polys()
    s, s_inv = sigma_polys()
    r2m = pmat_mul(pmat_mul(s_inv, r2), s)
    return r1, r2m, d1, 4 * a**2 * b**2


# ---------------------------------------------------------------------------
# orbits


@dataclass(frozen=True)
class OrbitNode:
    word: str
    box: MarkedBox

    @property
    def depth(self) -> int:
        return len(self.word)


def generate_orbit(params, depth: int, max_depth: int = MAX_DEPTH,
                   require_theta: bool = True) -> list[OrbitNode]:
    """Boxes w(M) and w(i(M)) for words w in {t,b}*, total length <= depth.

    Words are read as compositions, so 'tbi' is t(b(i(M))).  These are the
    boxes on the two sides of the edge pair of M; each remaining orbit box
    is one of them with top and bottom swapped.
    """
    a, b, c, d = (Fraction(x) for x in params)
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth > max_depth:
        raise DepthLimit(f"depth {depth} exceeds the maximum {max_depth}")
    lam = MorphParams(a, b)
    if require_theta and not lam.is_identity and not theta_contains(lam):
        raise NotInTheta(f"(a,b)=({a},{b}) is not in Theta")
    ops = morphed_op_table(lam)
    m = initial_box((c, d))
    nodes = [OrbitNode("", m)]
    frontier = [nodes[0]]
    if depth >= 1:
        first = OrbitNode("i", ops["i"](m))
        nodes.append(first)
        frontier.append(first)
    seen = {n.box for n in nodes}
    while frontier:
        nxt = []
        for node in frontier:
            if node.depth >= depth:
                continue
            for letter in "tb":
                child = OrbitNode(letter + node.word, ops[letter](node.box))
                if child.box in seen:
                    continue
                seen.add(child.box)
                nodes.append(child)
                nxt.append(child)
        frontier = nxt
    return nodes


def nesting_report(orbit, strict: bool = True):
    """First pair of orbit boxes that is neither nested nor disjoint, or None."""
    boxes = [n.box if isinstance(n, OrbitNode) else n for n in orbit]
    labels = [n.word if isinstance(n, OrbitNode) else str(k) for k, n in enumerate(orbit)]
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            if nested_or_disjoint(boxes[i], boxes[j], strict) is None:
                return labels[i], labels[j]
    return None


def nesting_certificate(orbit, strict: bool = True) -> bool:
    """Every pair disjoint or nested (closures and interiors when strict)."""
    return nesting_report(orbit, strict) is None


# ---------------------------------------------------------------------------
# exports

_UNIT = (HomPoint(0, 1, 1), HomPoint(1, 1, 1), HomPoint(1, 0, 1), HomPoint(0, 0, 1))
CHART = ProjMap.four_point(NORMAL_VERTICES, _UNIT)


def _chart_polygon(box: MarkedBox):
    pts = []
    for h in box.vertices:
        x, y, z = CHART.apply(h).coords
        if z == 0:
            return None
        pts.append((float(x / z), float(y / z)))
    return pts


def box_diameter(box: MarkedBox) -> float:
    """Euclidean diameter in the chart where M0 is the unit square."""
    pts = _chart_polygon(box)
    if pts is None:
        return math.inf
    return max(math.dist(u, v) for u in pts for v in pts)


def orbit_to_json(orbit, params, certified: bool | None = None) -> str:
    data = {
        "params": {k: str(Fraction(v)) for k, v in zip("abcd", params)},
        "nesting_certificate": certified,
        "boxes": [{"word": n.word, "box": n.box.to_json()} for n in orbit],
    }
    return json.dumps(data, indent=1)


def orbit_to_csv(orbit) -> str:
    """Box diameters per depth for boxes inside M (words ending in t or b)."""
    by_depth: dict[int, list[float]] = {}
    for n in orbit:
        if n.word.endswith("i"):
            continue
        by_depth.setdefault(n.depth, []).append(box_diameter(n.box))
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["depth", "count", "min_diameter", "max_diameter"])
    for k in sorted(by_depth):
        ds = by_depth[k]
        w.writerow([k, len(ds), f"{min(ds):.9g}", f"{max(ds):.9g}"])
    return out.getvalue()


def orbit_to_svg(orbit, size: int = 600, margin: int = 20) -> str:
    """Draw the boxes inside M in the unit-square chart."""
    scale = size - 2 * margin
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    for n in sorted(orbit, key=lambda n: n.depth):
        if n.word.endswith("i"):
            continue
        pts = _chart_polygon(n.box)
        if pts is None:
            continue
        coords = " ".join(f"{margin + x * scale:.3f},{margin + (1 - y) * scale:.3f}" for x, y in pts)
        shade = max(0, 200 - 35 * n.depth)
        parts.append(f'<polygon points="{coords}" fill="rgb({shade},{shade},255)" '
                     f'fill-opacity="0.35" stroke="black" stroke-width="0.6"/>')
    parts.append("</svg>")
    return "\n".join(parts)
