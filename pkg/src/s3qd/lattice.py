"""Oriented square-lattice geometry: edges, sites, triangles and ribbon paths.

Conventions fixed here and relied on everywhere else:

* horizontal edges point +x, vertical edges point +y;
* a dual edge inherits the direction of its direct edge rotated 90 degrees
  counterclockwise (it crosses the direct edge from right to left), so the
  dual of a horizontal edge runs south plaquette -> north plaquette and the
  dual of a vertical edge runs east plaquette -> west plaquette;
* a site is a (vertex, plaquette) pair with the plaquette adjacent to the
  vertex; the local orientation of a triangle is computed with the hinge
  rule at the plaquette center of its start site.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

EdgeId = int
VertexId = int
PlaquetteId = int
Site = Tuple[VertexId, PlaquetteId]

TORUS = "torus"
OPEN = "open"

DIRECT = "direct"
DUAL = "dual"

ALIGNED = "aligned"
OPPOSITE = "opposite"

CW = "cw"
CCW = "ccw"


class GeometryError(ValueError):
    """Raised when a triangle or ribbon cannot be embedded as requested."""


@dataclass(frozen=True)
class Lattice:
    """Square lattice of `width` x `height` plaquettes with oriented edges."""

    width: int
    height: int
    boundary: str
    n_vertices: int = field(init=False)
    n_plaquettes: int = field(init=False)
    n_edges: int = field(init=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("lattice dimensions must be positive")
        if self.boundary not in (TORUS, OPEN):
            raise ValueError(f"unknown boundary type {self.boundary!r}")
        object.__setattr__(self, "_vcols", self.width if self.boundary == TORUS else self.width + 1)
        object.__setattr__(self, "_vrows", self.height if self.boundary == TORUS else self.height + 1)
        object.__setattr__(self, "n_vertices", self._vcols * self._vrows)
        object.__setattr__(self, "n_plaquettes", self.width * self.height)
        h_edges = []
        v_edges = []
        if self.boundary == TORUS:
            h_edges = [(i, j) for j in range(self.height) for i in range(self.width)]
            v_edges = [(i, j) for j in range(self.height) for i in range(self.width)]
        else:
            h_edges = [(i, j) for j in range(self.height + 1) for i in range(self.width)]
            v_edges = [(i, j) for j in range(self.height) for i in range(self.width + 1)]
        object.__setattr__(self, "_h_edges", tuple(h_edges))
        object.__setattr__(self, "_v_edges", tuple(v_edges))
        object.__setattr__(self, "n_edges", len(h_edges) + len(v_edges))
        object.__setattr__(self, "_h_index", {ij: k for k, ij in enumerate(h_edges)})
        object.__setattr__(self, "_v_index", {ij: k + len(h_edges) for k, ij in enumerate(v_edges)})

    # --- index helpers ---------------------------------------------------

    def vertex(self, i: int, j: int) -> VertexId:
        if self.boundary == TORUS:
            return (j % self.height) * self._vcols + (i % self.width)
        if not (0 <= i < self._vcols and 0 <= j < self._vrows):
            raise GeometryError(f"vertex ({i},{j}) outside open lattice")
        return j * self._vcols + i

    def vertex_coords(self, v: VertexId) -> Tuple[int, int]:
        return v % self._vcols, v // self._vcols

    def plaquette(self, i: int, j: int) -> PlaquetteId:
        if self.boundary == TORUS:
            return (j % self.height) * self.width + (i % self.width)
        if not (0 <= i < self.width and 0 <= j < self.height):
            raise GeometryError(f"plaquette ({i},{j}) outside open lattice")
        return j * self.width + i

    def plaquette_coords(self, p: PlaquetteId) -> Tuple[int, int]:
        return p % self.width, p // self.width

    def h_edge(self, i: int, j: int) -> EdgeId:
        if self.boundary == TORUS:
            i, j = i % self.width, j % self.height
        key = (i, j)
        if key not in self._h_index:
            raise GeometryError(f"no horizontal edge at {key}")
        return self._h_index[key]

    def v_edge(self, i: int, j: int) -> EdgeId:
        if self.boundary == TORUS:
            i, j = i % self.width, j % self.height
        key = (i, j)
        if key not in self._v_index:
            raise GeometryError(f"no vertical edge at {key}")
        return self._v_index[key]

    def edge_kind(self, e: EdgeId) -> Tuple[str, int, int]:
        """Return ("H"|"V", i, j) for an edge id."""
        if e < len(self._h_edges):
            i, j = self._h_edges[e]
            return "H", i, j
        i, j = self._v_edges[e - len(self._h_edges)]
        return "V", i, j

    # --- incidence --------------------------------------------------------

    def edge_endpoints(self, e: EdgeId) -> Tuple[VertexId, VertexId]:
        """(tail, head) in the direction of the edge orientation."""
        kind, i, j = self.edge_kind(e)
        if kind == "H":
            return self.vertex(i, j), self.vertex(i + 1, j)
        return self.vertex(i, j), self.vertex(i, j + 1)

    def edge_between(self, v1: VertexId, v2: VertexId) -> EdgeId:
        for e in self.edges_at(v1):
            a, b = self.edge_endpoints(e)
            if (a, b) == (v1, v2) or (a, b) == (v2, v1):
                return e
        raise GeometryError(f"no edge between vertices {v1} and {v2}")

    def edges_at(self, v: VertexId) -> Tuple[EdgeId, ...]:
        out = []
        i, j = self.vertex_coords(v)
        for getter, args in (
            (self.h_edge, (i, j)),
            (self.h_edge, (i - 1, j)),
            (self.v_edge, (i, j)),
            (self.v_edge, (i, j - 1)),
        ):
            try:
                out.append(getter(*args))
            except GeometryError:
                pass
        return tuple(dict.fromkeys(out))

    def out_edges(self, v: VertexId) -> Tuple[EdgeId, ...]:
        return tuple(e for e in self.edges_at(v) if self.edge_endpoints(e)[0] == v)

    def in_edges(self, v: VertexId) -> Tuple[EdgeId, ...]:
        return tuple(e for e in self.edges_at(v) if self.edge_endpoints(e)[1] == v)

    def edge_plaquettes(self, e: EdgeId) -> Tuple[Optional[PlaquetteId], Optional[PlaquetteId]]:
        """Flanking plaquettes in dual-edge order (dual tail, dual head).

        The dual of a horizontal edge runs south -> north, the dual of a
        vertical edge runs east -> west.  Missing neighbours on an open
        boundary are None.
        """
        kind, i, j = self.edge_kind(e)
        def maybe(pi, pj):
            try:
                return self.plaquette(pi, pj)
            except GeometryError:
                return None
        if kind == "H":
            return maybe(i, j - 1), maybe(i, j)
        return maybe(i, j), maybe(i - 1, j)

    def plaquette_corners(self, p: PlaquetteId) -> Tuple[VertexId, VertexId, VertexId, VertexId]:
        """Corners (SW, SE, NE, NW)."""
        i, j = self.plaquette_coords(p)
        return (
            self.vertex(i, j),
            self.vertex(i + 1, j),
            self.vertex(i + 1, j + 1),
            self.vertex(i, j + 1),
        )

    def plaquette_cycle(self, p: PlaquetteId, base: VertexId) -> Tuple[Tuple[EdgeId, int], ...]:
        """Counterclockwise boundary walk of p starting at the corner `base`.

        Each entry is (edge, sign); sign +1 when the walk direction agrees
        with the edge orientation.
        """
        i, j = self.plaquette_coords(p)
        cycle = (
            (self.h_edge(i, j), +1),       # SW -> SE
            (self.v_edge(i + 1, j), +1),   # SE -> NE
            (self.h_edge(i, j + 1), -1),   # NE -> NW
            (self.v_edge(i, j), -1),       # NW -> SW
        )
        corners = self.plaquette_corners(p)
        if base not in corners:
            raise GeometryError(f"vertex {base} is not a corner of plaquette {p}")
        k = corners.index(base)
        return cycle[k:] + cycle[:k]

    def site(self, v: VertexId, p: PlaquetteId) -> Site:
        if v not in self.plaquette_corners(p):
            raise GeometryError(f"vertex {v} not adjacent to plaquette {p}")
        return (v, p)

    def northeast_site(self, i: int, j: int) -> Site:
        """Canonical site pairing: vertex (i,j) with the plaquette to its north-east."""
        return self.site(self.vertex(i, j), self.plaquette(i, j))


def build_lattice(width: int, height: int, boundary: str = TORUS) -> Lattice:
    return Lattice(width, height, boundary)


# --- triangles -------------------------------------------------------------


@dataclass(frozen=True)
class Triangle:
    kind: str                 # DIRECT or DUAL
    long_edge: EdgeId
    start_site: Site
    end_site: Site
    alignment: str            # ALIGNED or OPPOSITE
    orientation: str          # CW or CCW

    @property
    def start_vertex(self) -> VertexId:
        return self.start_site[0]

    @property
    def end_vertex(self) -> VertexId:
        return self.end_site[0]


def _cross(a: Tuple[float, float], b: Tuple[float, float]) -> float:
    return a[0] * b[1] - a[1] * b[0]


def _edge_side_of_plaquette(lattice: Lattice, e: EdgeId, p: PlaquetteId) -> str:
    """Which side of plaquette p the direct edge e lies on ("S","E","N","W")."""
    i, j = lattice.plaquette_coords(p)
    kind, ei, ej = lattice.edge_kind(e)
    sides = []
    if kind == "H":
        if lattice.h_edge(i, j) == e:
            sides.append("S")
        if lattice.h_edge(i, j + 1) == e:
            sides.append("N")
    else:
        if lattice.v_edge(i, j) == e:
            sides.append("W")
        if lattice.v_edge(i + 1, j) == e:
            sides.append("E")
    if not sides:
        raise GeometryError(f"edge {e} does not bound plaquette {p}")
    if len(sides) > 1:
        raise GeometryError(
            f"edge {e} bounds plaquette {p} on more than one side; "
            "the lattice is too small for an unambiguous triangle"
        )
    return sides[0]


_CORNER_POS = {"SW": (-0.5, -0.5), "SE": (0.5, -0.5), "NE": (0.5, 0.5), "NW": (-0.5, 0.5)}
_SIDE_CORNERS = {"S": ("SW", "SE"), "E": ("SE", "NE"), "N": ("NW", "NE"), "W": ("SW", "NW")}


def direct_triangle(lattice: Lattice, edge: EdgeId, plaquette: PlaquetteId,
                    reverse: bool = False) -> Triangle:
    """Direct triangle on `edge` with its third corner at `plaquette`.

    Traversal follows the edge orientation unless `reverse`.
    """
    side = _edge_side_of_plaquette(lattice, edge, plaquette)
    tail, head = lattice.edge_endpoints(edge)
    v1, v2 = (head, tail) if reverse else (tail, head)
    corner_tail, corner_head = _SIDE_CORNERS[side]
    # corner roles in traversal order
    c1, c2 = (corner_head, corner_tail) if reverse else (corner_tail, corner_head)
    cross = _cross(_CORNER_POS[c1], _CORNER_POS[c2])
    orientation = CCW if cross > 0 else CW
    return Triangle(
        kind=DIRECT,
        long_edge=edge,
        start_site=(v1, plaquette),
        end_site=(v2, plaquette),
        alignment=OPPOSITE if reverse else ALIGNED,
        orientation=orientation,
    )


def dual_triangle(lattice: Lattice, edge: EdgeId, vertex: VertexId,
                  reverse: bool = False) -> Triangle:
    """Dual triangle crossing the direct `edge`, hinged at `vertex`.

    Traversal follows the dual-edge orientation unless `reverse`.
    """
    tail, head = lattice.edge_endpoints(edge)
    if vertex not in (tail, head):
        raise GeometryError(f"vertex {vertex} is not an endpoint of edge {edge}")
    p_tail, p_head = lattice.edge_plaquettes(edge)
    p1, p2 = (p_head, p_tail) if reverse else (p_tail, p_head)
    if p1 is None or p2 is None:
        raise GeometryError(f"edge {edge} is on the open boundary; no dual triangle there")
    kind, _, _ = lattice.edge_kind(edge)
    # relative positions: edge midpoint at origin
    if kind == "H":
        s_pos = (-0.5, 0.0) if vertex == tail else (0.5, 0.0)
        c_tail, c_head = (0.0, -0.5), (0.0, 0.5)      # south, north
    else:
        s_pos = (0.0, -0.5) if vertex == tail else (0.0, 0.5)
        c_tail, c_head = (0.5, 0.0), (-0.5, 0.0)      # east, west
    c1, c2 = (c_head, c_tail) if reverse else (c_tail, c_head)
    cross = _cross((s_pos[0] - c1[0], s_pos[1] - c1[1]), (c2[0] - c1[0], c2[1] - c1[1]))
    orientation = CCW if cross > 0 else CW
    return Triangle(
        kind=DUAL,
        long_edge=edge,
        start_site=(vertex, p1),
        end_site=(vertex, p2),
        alignment=OPPOSITE if reverse else ALIGNED,
        orientation=orientation,
    )


def classify_triangle(lattice: Lattice, kind: str, edge: EdgeId,
                      start_site: Site) -> Triangle:
    """Fill alignment and local orientation for a partially specified triangle."""
    v, p = start_site
    if kind == DIRECT:
        tail, head = lattice.edge_endpoints(edge)
        if v not in (tail, head):
            raise GeometryError(f"vertex {v} is not an endpoint of edge {edge}")
        return direct_triangle(lattice, edge, p, reverse=(v != tail))
    if kind == DUAL:
        p_tail, p_head = lattice.edge_plaquettes(edge)
        if p not in (p_tail, p_head):
            raise GeometryError(f"plaquette {p} does not flank edge {edge}")
        return dual_triangle(lattice, edge, v, reverse=(p != p_tail))
    raise ValueError(f"unknown triangle kind {kind!r}")


# --- ribbons ----------------------------------------------------------------


ZEdge = Tuple[EdgeId, int]  # (edge, +1/-1): sign +1 when walked along its orientation


@dataclass(frozen=True)
class RibbonPath:
    lattice: Lattice
    triangles: Tuple[Triangle, ...]
    z_prefix: Tuple[ZEdge, ...] = ()
    z_suffix: Tuple[ZEdge, ...] = ()

    @property
    def start_site(self) -> Site:
        return self.triangles[0].start_site

    @property
    def end_site(self) -> Site:
        return self.triangles[-1].end_site

    @property
    def orientation(self) -> str:
        return self.triangles[0].orientation

    @property
    def string_start_vertex(self) -> VertexId:
        """First vertex of the extended z string (prefix included)."""
        if self.z_prefix:
            return _walk_start(self.lattice, self.z_prefix)
        return self.start_site[0]

    @property
    def string_end_vertex(self) -> VertexId:
        if self.z_suffix:
            return _walk_end(self.lattice, self.z_suffix)
        return self.end_site[0]

    def direct_edges(self) -> Tuple[EdgeId, ...]:
        return tuple(t.long_edge for t in self.triangles if t.kind == DIRECT)

    def dual_crossed_edges(self) -> Tuple[EdgeId, ...]:
        return tuple(t.long_edge for t in self.triangles if t.kind == DUAL)


def _walk_vertices(lattice: Lattice, walk: Sequence[ZEdge]) -> List[VertexId]:
    """Vertices visited by a signed direct-edge walk, in order."""
    verts: List[VertexId] = []
    for edge, sign in walk:
        tail, head = lattice.edge_endpoints(edge)
        a, b = (tail, head) if sign > 0 else (head, tail)
        if not verts:
            verts.append(a)
        elif verts[-1] != a:
            raise GeometryError("z-string extension is not a connected walk")
        verts.append(b)
    return verts


def _walk_start(lattice: Lattice, walk: Sequence[ZEdge]) -> VertexId:
    return _walk_vertices(lattice, walk)[0]


def _walk_end(lattice: Lattice, walk: Sequence[ZEdge]) -> VertexId:
    return _walk_vertices(lattice, walk)[-1]


def make_ribbon(lattice: Lattice, triangles: Sequence[Triangle],
                z_prefix: Sequence[ZEdge] = (), z_suffix: Sequence[ZEdge] = (),
                allow_self_crossing: bool = False) -> RibbonPath:
    """Validate and assemble a ribbon path.

    Rejects empty ribbons, broken site chains, mixed local orientations and
    (unless overridden for braiding constructions) repeated lattice edges.
    """
    if not triangles:
        raise GeometryError("a ribbon needs at least one triangle")
    for a, b in zip(triangles, triangles[1:]):
        if a.end_site != b.start_site:
            raise GeometryError(
                f"triangle chain broken: end site {a.end_site} != start site {b.start_site}"
            )
    orientations = {t.orientation for t in triangles}
    if len(orientations) > 1:
        raise GeometryError("mixed local orientations along the ribbon")
    used = [t.long_edge for t in triangles]
    if not allow_self_crossing and len(set(used)) != len(used):
        raise GeometryError("ribbon uses a lattice edge twice (self-crossing)")
    path = RibbonPath(lattice, tuple(triangles), tuple(z_prefix), tuple(z_suffix))
    if z_prefix and _walk_end(lattice, z_prefix) != path.start_site[0]:
        raise GeometryError("z prefix does not end at the ribbon start vertex")
    if z_suffix and _walk_start(lattice, z_suffix) != path.end_site[0]:
        raise GeometryError("z suffix does not start at the ribbon end vertex")
    return path


def ribbon_sites(path: RibbonPath) -> List[Site]:
    sites = [path.triangles[0].start_site]
    sites.extend(t.end_site for t in path.triangles)
    return sites


def route_ribbon(lattice: Lattice, start: Site, end: Site) -> RibbonPath:
    """Shortest triangle chain from `start` to `end` (a convenience router).

    Breadth-first over sites; direct moves are tried before dual moves so
    ties resolve to the staircase path with direct triangles first.
    """
    if start == end:
        raise GeometryError("routing requires distinct start and end sites")
    from collections import deque

    seen = {start}
    queue = deque([(start, ())])
    while queue:
        site, chain = queue.popleft()
        for tri in _site_moves(lattice, site, chain[-1].orientation if chain else None):
            nxt = tri.end_site
            if nxt in seen:
                continue
            new_chain = chain + (tri,)
            if nxt == end:
                return make_ribbon(lattice, new_chain)
            seen.add(nxt)
            queue.append((nxt, new_chain))
    raise GeometryError(f"no ribbon route from {start} to {end}")


def _site_moves(lattice: Lattice, site: Site, orientation: Optional[str]) -> List[Triangle]:
    v, p = site
    moves: List[Triangle] = []
    for e in lattice.plaquette_cycle(p, base=lattice.plaquette_corners(p)[0]):
        edge = e[0]
        a, b = lattice.edge_endpoints(edge)
        if v in (a, b):
            try:
                tri = classify_triangle(lattice, DIRECT, edge, site)
            except GeometryError:
                continue
            moves.append(tri)
    for edge in lattice.edges_at(v):
        try:
            tri = classify_triangle(lattice, DUAL, edge, site)
        except GeometryError:
            continue
        moves.append(tri)
    if orientation is not None:
        moves = [t for t in moves if t.orientation == orientation]
    return moves


# --- ribbon description files ----------------------------------------------


def serialize_ribbon(path: RibbonPath, include_lattice: bool = True) -> str:
    """Line-oriented ribbon description; round-trips bit-exactly."""
    lines = []
    if include_lattice:
        lat = path.lattice
        lines.append(f"LATTICE {lat.width} {lat.height} {lat.boundary}")
    for t in path.triangles:
        code = "D" if t.kind == DIRECT else "U"
        lines.append(f"{code} {t.long_edge} {t.start_site[0]} {t.start_site[1]}")
    if path.z_prefix:
        lines.append("ZPRE " + " ".join(f"{'+' if s > 0 else '-'}{e}" for e, s in path.z_prefix))
    if path.z_suffix:
        lines.append("ZSUF " + " ".join(f"{'+' if s > 0 else '-'}{e}" for e, s in path.z_suffix))
    return "\n".join(lines) + "\n"


class RibbonParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _parse_signed(tok: str, line_no: int) -> ZEdge:
    if not tok or tok[0] not in "+-":
        raise RibbonParseError(line_no, f"signed edge id expected, got {tok!r}")
    try:
        return int(tok[1:]), (1 if tok[0] == "+" else -1)
    except ValueError:
        raise RibbonParseError(line_no, f"bad edge id in {tok!r}") from None


def parse_ribbon(text: str, lattice: Optional[Lattice] = None,
                 allow_self_crossing: bool = False) -> RibbonPath:
    triangles: List[Triangle] = []
    z_prefix: Tuple[ZEdge, ...] = ()
    z_suffix: Tuple[ZEdge, ...] = ()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "LATTICE":
            if len(parts) != 4:
                raise RibbonParseError(line_no, "LATTICE expects width height boundary")
            try:
                lattice = build_lattice(int(parts[1]), int(parts[2]), parts[3])
            except ValueError as exc:
                raise RibbonParseError(line_no, str(exc)) from None
        elif tag in ("D", "U"):
            if lattice is None:
                raise RibbonParseError(line_no, "no lattice declared before triangles")
            if len(parts) != 4:
                raise RibbonParseError(line_no, f"{tag} expects edge start-vertex start-plaquette")
            try:
                edge, v, p = int(parts[1]), int(parts[2]), int(parts[3])
            except ValueError:
                raise RibbonParseError(line_no, "triangle fields must be integers") from None
            kind = DIRECT if tag == "D" else DUAL
            try:
                triangles.append(classify_triangle(lattice, kind, edge, (v, p)))
            except (GeometryError, ValueError) as exc:
                raise RibbonParseError(line_no, str(exc)) from None
        elif tag == "ZPRE":
            z_prefix = tuple(_parse_signed(tok, line_no) for tok in parts[1:])
        elif tag == "ZSUF":
            z_suffix = tuple(_parse_signed(tok, line_no) for tok in parts[1:])
        else:
            raise RibbonParseError(line_no, f"unknown directive {tag!r}")
    if lattice is None:
        raise RibbonParseError(0, "ribbon file declares no lattice and none was given")
    try:
        return make_ribbon(lattice, triangles, z_prefix, z_suffix,
                           allow_self_crossing=allow_self_crossing)
    except GeometryError as exc:
        raise RibbonParseError(0, str(exc)) from None
