"""Sparse wavefunctions over group-valued edge configurations.

A basis configuration assigns one S3 element to every edge and is stored as
a bytes key (edge id -> element id).  All operators act configuration-wise,
so states stay sparse: vertex operators permute configurations, plaquette
operators are diagonal projectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from s3qd import group
from s3qd.group import GroupElement, inv, mul
from s3qd.lattice import Lattice, PlaquetteId, Site, VertexId

PRUNE_EPS = 1e-12

BasisConfig = bytes


class MixedSyndromeError(ValueError):
    """The state superposes different flux syndromes; per-site violations are undefined."""


@dataclass
class WaveFunction:
    lattice: Lattice
    amp: Dict[BasisConfig, complex] = field(default_factory=dict)

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.lattice, dict(self.amp))

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amp.values()))

    def is_zero(self, tol: float = PRUNE_EPS) -> bool:
        return self.norm() <= tol

    def prune(self, eps: float = PRUNE_EPS) -> "WaveFunction":
        self.amp = {c: a for c, a in self.amp.items() if abs(a) >= eps}
        return self

    def normalized(self) -> "WaveFunction":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return WaveFunction(self.lattice, {c: a / n for c, a in self.amp.items()}).prune()

    def inner(self, other: "WaveFunction") -> complex:
        """<self|other>."""
        if len(self.amp) > len(other.amp):
            return complex(sum(other.amp[c] * self.amp[c].conjugate()
                               for c in other.amp.keys() & self.amp.keys()))
        return complex(sum(other.amp.get(c, 0j) * a.conjugate() for c, a in self.amp.items()))

    def scaled(self, factor: complex) -> "WaveFunction":
        return WaveFunction(self.lattice, {c: a * factor for c, a in self.amp.items()})

    def add(self, other: "WaveFunction") -> "WaveFunction":
        out = dict(self.amp)
        for c, a in other.amp.items():
            out[c] = out.get(c, 0j) + a
        return WaveFunction(self.lattice, out).prune()

    def distance(self, other: "WaveFunction") -> float:
        keys = self.amp.keys() | other.amp.keys()
        return math.sqrt(sum(abs(self.amp.get(c, 0j) - other.amp.get(c, 0j)) ** 2 for c in keys))

    def __len__(self) -> int:
        return len(self.amp)


def basis_state(lattice: Lattice, config: Sequence[GroupElement]) -> WaveFunction:
    cfg = bytes(config)
    if len(cfg) != lattice.n_edges:
        raise ValueError(f"config has {len(cfg)} edges, lattice has {lattice.n_edges}")
    return WaveFunction(lattice, {cfg: 1.0 + 0j})


def trivial_config(lattice: Lattice) -> BasisConfig:
    return bytes(lattice.n_edges)


def random_state(lattice: Lattice, rng: np.random.Generator, n_terms: int = 8) -> WaveFunction:
    """Random sparse test state: n_terms distinct configurations, Gaussian amplitudes."""
    amp: Dict[BasisConfig, complex] = {}
    while len(amp) < n_terms:
        cfg = bytes(rng.integers(0, 6, size=lattice.n_edges, dtype=np.uint8).tolist())
        amp[cfg] = complex(rng.normal(), rng.normal())
    return WaveFunction(lattice, amp).normalized()


# --- vertex and plaquette operators ------------------------------------------


def apply_vertex(psi: WaveFunction, g: GroupElement, v: VertexId) -> WaveFunction:
    """A^g at vertex v: left-multiply out-edges by g, right-multiply in-edges by g^-1."""
    lat = psi.lattice
    out_edges = lat.out_edges(v)
    in_edges = lat.in_edges(v)
    gi = inv(g)
    amp: Dict[BasisConfig, complex] = {}
    for cfg, a in psi.amp.items():
        new = bytearray(cfg)
        for e in out_edges:
            new[e] = mul(g, new[e])
        for e in in_edges:
            new[e] = mul(new[e], gi)
        key = bytes(new)
        amp[key] = amp.get(key, 0j) + a
    return WaveFunction(lat, amp).prune()


def flux_at(config: BasisConfig, lattice: Lattice, p: PlaquetteId,
            base: Optional[VertexId] = None) -> GroupElement:
    """Counterclockwise boundary product of plaquette p starting at `base`.

    This is the local flux value v of the configuration at the site
    (base, p); the plaquette projector B^h keeps configurations with
    v = h^-1.
    """
    if base is None:
        base = lattice.plaquette_corners(p)[0]
    prod = group.E
    for edge, sign in lattice.plaquette_cycle(p, base):
        val = config[edge]
        prod = mul(prod, val if sign > 0 else inv(val))
    return prod


def apply_plaquette(psi: WaveFunction, h: GroupElement, p: PlaquetteId,
                    base: Optional[VertexId] = None) -> WaveFunction:
    """B^h at plaquette p: project the boundary product from `base` onto h^-1."""
    if base is not None and base not in psi.lattice.plaquette_corners(p):
        raise ValueError(f"vertex {base} is not adjacent to plaquette {p}")
    target = inv(h)
    amp = {cfg: a for cfg, a in psi.amp.items()
           if flux_at(cfg, psi.lattice, p, base) == target}
    return WaveFunction(psi.lattice, amp)


def apply_vertex_projector(psi: WaveFunction, v: VertexId) -> WaveFunction:
    """A_s = (1/6) sum_g A^g at vertex v."""
    out = WaveFunction(psi.lattice, {})
    for g in group.ALL_ELEMENTS:
        out = out.add(apply_vertex(psi, g, v).scaled(1.0 / 6.0))
    return out


def vertex_projector_expectation(psi: WaveFunction, v: VertexId) -> float:
    return psi.inner(apply_vertex_projector(psi, v)).real


# --- ground states ------------------------------------------------------------


def _config_flux_pattern(config: BasisConfig, lattice: Lattice) -> Tuple[GroupElement, ...]:
    return tuple(flux_at(config, lattice, p) for p in range(lattice.n_plaquettes))


def has_trivial_flux(config: BasisConfig, lattice: Lattice) -> bool:
    return all(f == group.E for f in _config_flux_pattern(config, lattice))


_MUL_NP = np.array(group.MUL_TABLE, dtype=np.uint8)
_INV_NP = np.array(group.INV_TABLE, dtype=np.uint8)


def gauge_orbit(lattice: Lattice, rep: BasisConfig) -> List[BasisConfig]:
    """All configurations reachable from `rep` by vertex operators."""
    n_e = lattice.n_edges
    moves = []
    for v in range(lattice.n_vertices):
        for g in (group.MU, group.SIGMA):
            moves.append((g, lattice.out_edges(v), lattice.in_edges(v)))

    seen = np.frombuffer(rep, dtype=np.uint8).reshape(1, n_e).copy()
    frontier = seen
    void = np.dtype((np.void, n_e))
    seen_keys = {seen.tobytes()}
    while frontier.size:
        batches = []
        for g, out_edges, in_edges in moves:
            new = frontier.copy()
            if out_edges:
                idx = list(out_edges)
                new[:, idx] = _MUL_NP[g, new[:, idx]]
            if in_edges:
                idx = list(in_edges)
                gi = _INV_NP[g]
                new[:, idx] = _MUL_NP[new[:, idx], gi]
            batches.append(new)
        cand = np.unique(np.concatenate(batches).view(void))
        cand = cand.view(np.uint8).reshape(-1, n_e)
        fresh = [row for row in cand if row.tobytes() not in seen_keys]
        if not fresh:
            break
        frontier = np.array(fresh, dtype=np.uint8)
        for row in frontier:
            seen_keys.add(row.tobytes())
        seen = np.concatenate([seen, frontier])
    return sorted(row.tobytes() for row in seen)


def ground_state(lattice: Lattice, rep: Optional[BasisConfig] = None) -> WaveFunction:
    """Project a zero-flux representative onto the vacuum sector.

    Applying the product of all vertex projectors to a zero-flux basis
    configuration yields the uniform superposition over its gauge orbit.
    """
    if rep is None:
        rep = trivial_config(lattice)
    if not has_trivial_flux(rep, lattice):
        raise ValueError("representative configuration carries nonzero flux")
    orbit = gauge_orbit(lattice, rep)
    a = 1.0 / math.sqrt(len(orbit))
    return WaveFunction(lattice, {cfg: a + 0j for cfg in orbit})


def canonical_gauge_form(lattice: Lattice, config: BasisConfig) -> BasisConfig:
    """Canonical representative of the gauge orbit of `config`.

    Gauge-fixes a spanning tree of the vertex graph to identity edges, then
    removes the residual global conjugation by the deterministic rule that
    the first non-identity co-tree edge value has the least possible id.
    Two configurations are gauge equivalent iff their canonical forms match.
    """
    cfg = bytearray(config)
    # spanning tree: connect vertex (i,j) to (0,0) via row 0 then up columns;
    # on the torus the wrap edges are never tree edges
    order: List[Tuple[VertexId, Tuple[str, int, int]]] = []
    for v in range(lattice.n_vertices):
        i, j = lattice.vertex_coords(v)
        if (i, j) == (0, 0):
            continue
        if j == 0:
            order.append((v, ("H", i - 1, 0)))
        else:
            order.append((v, ("V", i, j - 1)))
    # walk tree edges from the root outward so each step fixes one new vertex
    for v, (kind, i, j) in order:
        e = lattice.h_edge(i, j) if kind == "H" else lattice.v_edge(i, j)
        tail, head = lattice.edge_endpoints(e)
        val = cfg[e]
        # gauge move at v that sets this tree edge to identity: an in-edge
        # transforms as val -> val g^-1, an out-edge as val -> g val
        g = val if head == v else inv(val)
        gi = inv(g)
        for ee in lattice.out_edges(v):
            cfg[ee] = mul(g, cfg[ee])
        for ee in lattice.in_edges(v):
            cfg[ee] = mul(cfg[ee], gi)
    # residual global conjugation: normalize deterministically
    best = None
    for g in group.ALL_ELEMENTS:
        gi = inv(g)
        cand = bytes(mul(mul(g, x), gi) for x in cfg)
        if best is None or cand < best:
            best = cand
    return best


# --- census on the smallest torus ---------------------------------------------


@dataclass(frozen=True)
class CensusReport:
    ground_count: int
    excited_count: int
    flux_of_config: Dict[Tuple[GroupElement, GroupElement], GroupElement]
    ground_orbit_reps: Tuple[Tuple[GroupElement, GroupElement], ...]
    excited_flux_classes: Tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "ground": self.ground_count,
            "excited": self.excited_count,
            "excited_flux_classes": list(self.excited_flux_classes),
            "commutator_subgroup": [group.element_name(g) for g in group.derived_subgroup()],
        }


def census_1x1_torus() -> CensusReport:
    """Classify all 36 edge configurations of the one-plaquette torus.

    Ground states are gauge orbits of commuting edge pairs; everything else
    is a single-particle excited state.  The realized single-particle fluxes
    are exactly the commutators g1 g2 g1^-1 g2^-1, so they never leave the
    commutator subgroup.
    """
    flux = {}
    orbits: Dict[Tuple[GroupElement, GroupElement], Set[Tuple[GroupElement, GroupElement]]] = {}
    seen = set()
    for g1 in group.ALL_ELEMENTS:
        for g2 in group.ALL_ELEMENTS:
            flux[(g1, g2)] = group.commutator(g1, g2)
    ground_reps = []
    for g1 in group.ALL_ELEMENTS:
        for g2 in group.ALL_ELEMENTS:
            if (g1, g2) in seen or flux[(g1, g2)] != group.E:
                continue
            orbit = {(group.conjugate(g1, by=h), group.conjugate(g2, by=h))
                     for h in group.ALL_ELEMENTS}
            seen |= orbit
            ground_reps.append((g1, g2))
    ground = len(ground_reps)
    excited = 36 - ground
    excited_classes = sorted({group.class_of(f).label for f in flux.values()})
    return CensusReport(
        ground_count=ground,
        excited_count=excited,
        flux_of_config=flux,
        ground_orbit_reps=tuple(ground_reps),
        excited_flux_classes=tuple(excited_classes),
    )


def fig7_representatives() -> Tuple[Tuple[GroupElement, GroupElement], ...]:
    """Representative (horizontal, vertical) configs of the 8 torus ground states.

    The vertical element runs over class representatives and the horizontal
    element over conjugacy classes of its centralizer.
    """
    reps = []
    for v in (group.E, group.SIGMA, group.MU):
        cent = group.centralizer(v)
        classes_seen = set()
        for h in cent:
            key = frozenset(group.conjugate(h, by=u) for u in cent)
            if key in classes_seen:
                continue
            classes_seen.add(key)
            reps.append((h, v))
    return tuple(reps)


# --- violations and neutrality --------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str                         # "flux" or "charge"
    site: Site
    value: Optional[GroupElement]     # flux value if base-independent... see flux_class
    flux_class: Optional[str]         # conjugacy-class label of a flux violation
    expectation: float                # stabilizer projector expectation at the site


def violations(psi: WaveFunction, tol: float = 1e-9) -> List[Violation]:
    """All sites where the vacuum stabilizer conditions fail.

    The flux syndrome (trivial or not, per plaquette) must be definite
    across the support, otherwise MixedSyndromeError is raised.  The flux
    value itself depends on the base vertex; it is reported only when all
    configurations agree from the plaquette's SW corner, the conjugacy
    class (base independent) always is.  A vertex is flagged when the
    charge-projector expectation falls below one; the expectation is
    reported so definite charges (expectation zero) can be told apart from
    partially excited vertices.
    """
    lat = psi.lattice
    if not psi.amp:
        raise ValueError("empty state")
    out: List[Violation] = []
    for p in range(lat.n_plaquettes):
        fluxes = {flux_at(cfg, lat, p) for cfg in psi.amp}
        trivial = group.E in fluxes
        if trivial and len(fluxes) > 1:
            raise MixedSyndromeError(
                f"plaquette {p} superposes trivial and nontrivial flux"
            )
        if trivial:
            continue
        base = lat.plaquette_corners(p)[0]
        classes = {group.class_of(f).label for f in fluxes}
        out.append(Violation(
            "flux", (base, p),
            value=fluxes.pop() if len(fluxes) == 1 else None,
            flux_class=classes.pop() if len(classes) == 1 else None,
            expectation=0.0,
        ))
    norm2 = psi.inner(psi).real
    for v in range(lat.n_vertices):
        exp = vertex_projector_expectation(psi, v) / norm2
        if exp < 1.0 - tol:
            p_adj = next(p for p in range(lat.n_plaquettes)
                         if v in lat.plaquette_corners(p))
            out.append(Violation("charge", (v, p_adj), None, None, exp))
    return out


def flux_violations(psi: WaveFunction, tol: float = 1e-9) -> List[Violation]:
    return [v for v in violations(psi, tol) if v.kind == "flux"]


def charge_violations(psi: WaveFunction, tol: float = 1e-9) -> List[Violation]:
    return [v for v in violations(psi, tol) if v.kind == "charge"]


def region_boundary_cycle(lattice: Lattice, i0: int, j0: int, i1: int, j1: int
                          ) -> List[Tuple[int, int]]:
    """Counterclockwise walk around the plaquette rectangle [i0,i1] x [j0,j1]."""
    cycle: List[Tuple[int, int]] = []
    for i in range(i0, i1 + 1):
        cycle.append((lattice.h_edge(i, j0), +1))
    for j in range(j0, j1 + 1):
        cycle.append((lattice.v_edge(i1 + 1, j), +1))
    for i in range(i1, i0 - 1, -1):
        cycle.append((lattice.h_edge(i, j1 + 1), -1))
    for j in range(j1, j0 - 1, -1):
        cycle.append((lattice.v_edge(i0, j), -1))
    return cycle


def global_neutrality(psi: WaveFunction,
                      region: Optional[Tuple[int, int, int, int]] = None,
                      tol: float = 1e-9) -> Tuple[bool, bool]:
    """(charge_neutral, flux_neutral) over a contractible plaquette rectangle.

    With no region given the whole lattice is used, which requires an open
    boundary (a full torus is not contractible).
    """
    lat = psi.lattice
    if region is None:
        if lat.boundary != "open":
            raise ValueError("whole-lattice neutrality needs an open boundary")
        region = (0, 0, lat.width - 1, lat.height - 1)
    i0, j0, i1, j1 = region
    vertices = {lat.vertex(i, j) for i in range(i0, i1 + 2) for j in range(j0, j1 + 2)}
    norm2 = psi.inner(psi).real
    charge_neutral = True
    for g in (group.MU, group.SIGMA):
        phi = psi
        for v in sorted(vertices):
            phi = apply_vertex(phi, g, v)
        if abs(psi.inner(phi) - norm2) > tol:
            charge_neutral = False
            break
    flux_neutral = True
    cycle = region_boundary_cycle(lat, i0, j0, i1, j1)
    for cfg in psi.amp:
        prod = group.E
        for edge, sign in cycle:
            val = cfg[edge]
            prod = mul(prod, val if sign > 0 else inv(val))
        if prod != group.E:
            flux_neutral = False
            break
    return charge_neutral, flux_neutral


# --- state dump format -----------------------------------------------------------


def dump_state(psi: WaveFunction) -> str:
    """One line per basis term: re, im, then edge values; sorted by config key."""
    lines = []
    for cfg in sorted(psi.amp):
        a = psi.amp[cfg]
        vals = " ".join(group.element_name(x) for x in cfg)
        lines.append(f"{a.real:.17g} {a.imag:.17g} {vals}")
    return "\n".join(lines) + "\n"


def parse_state(text: str, lattice: Lattice) -> WaveFunction:
    amp: Dict[BasisConfig, complex] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2 + lattice.n_edges:
            raise ValueError(
                f"line {line_no}: expected 2 amplitudes + {lattice.n_edges} edge values"
            )
        try:
            re, im = float(parts[0]), float(parts[1])
        except ValueError:
            raise ValueError(f"line {line_no}: bad amplitude") from None
        cfg = bytes(group.parse_element(tok) for tok in parts[2:])
        amp[cfg] = complex(re, im)
    return WaveFunction(lattice, amp)
