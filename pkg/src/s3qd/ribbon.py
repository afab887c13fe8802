"""Ribbon operators: constructive application, recursive oracle, anyon labels.

The constructive walk keeps a running product x of the direct edges seen so
far (seeded by the z-string prefix).  Direct triangles feed x; dual triangles
multiply their crossed edge by a conjugate of the flux label v, with the side
and inverse fixed by the (alignment, local orientation) cell:

    cw,  aligned : edge <- (x' v x)^-1 . edge      with x' = x^-1
    cw,  opposite: edge <- edge . (x' v x)
    ccw, aligned : edge <- edge . (x' v x)^-1
    ccw, opposite: edge <- (x' v x) . edge

At the end the total direct product (prefix + ribbon + suffix) is projected
onto z.  The recursive two-segment splitting is kept as an independent test
oracle and is never used by the production path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from s3qd import group
from s3qd.group import GroupElement, Irrep, inv, mul
from s3qd.lattice import (ALIGNED, CCW, CW, DIRECT, DUAL, GeometryError, Lattice,
                          RibbonPath, Triangle, direct_triangle, dual_triangle,
                          make_ribbon)
from s3qd.state import BasisConfig, WaveFunction

MicroLabel = Tuple[GroupElement, GroupElement]  # (z, v)


def _dual_action(cfg: bytearray, tri: Triangle, c: GroupElement) -> None:
    e = tri.long_edge
    if tri.orientation == CW:
        if tri.alignment == ALIGNED:
            cfg[e] = mul(inv(c), cfg[e])
        else:
            cfg[e] = mul(cfg[e], c)
    else:
        if tri.alignment == ALIGNED:
            cfg[e] = mul(cfg[e], inv(c))
        else:
            cfg[e] = mul(c, cfg[e])


def apply_triangle(psi: WaveFunction, tri: Triangle, param: GroupElement) -> WaveFunction:
    """Single triangle operator.

    For a direct triangle `param` is the projector value k; for a dual
    triangle it is the (already conjugated) flux element multiplying the
    crossed edge.
    """
    amp: Dict[BasisConfig, complex] = {}
    if tri.kind == DIRECT:
        for cfg, a in psi.amp.items():
            val = cfg[tri.long_edge]
            if tri.alignment != ALIGNED:
                val = inv(val)
            if val == param:
                amp[cfg] = amp.get(cfg, 0j) + a
    else:
        for cfg, a in psi.amp.items():
            new = bytearray(cfg)
            _dual_action(new, tri, param)
            key = bytes(new)
            amp[key] = amp.get(key, 0j) + a
    return WaveFunction(psi.lattice, amp).prune()


def _signed_product(cfg: BasisConfig, walk: Sequence[Tuple[int, int]]) -> GroupElement:
    prod = group.E
    for edge, sign in walk:
        val = cfg[edge]
        prod = mul(prod, val if sign > 0 else inv(val))
    return prod


def apply_ribbon(psi: WaveFunction, path: RibbonPath, z: GroupElement,
                 v: GroupElement) -> WaveFunction:
    """F^(z,v) along `path`, including any extended z string.

    The zero state is a legal output: the final projector may annihilate
    every configuration.
    """
    amp: Dict[BasisConfig, complex] = {}
    triangles = path.triangles
    for cfg, a in psi.amp.items():
        x = _signed_product(cfg, path.z_prefix)
        new: Optional[bytearray] = None
        for tri in triangles:
            if tri.kind == DIRECT:
                val = cfg[tri.long_edge]
                if tri.alignment != ALIGNED:
                    val = inv(val)
                x = mul(x, val)
            else:
                c = mul(mul(inv(x), v), x)
                if new is None:
                    new = bytearray(cfg)
                _dual_action(new, tri, c)
        x = mul(x, _signed_product(cfg, path.z_suffix))
        if x != z:
            continue
        key = bytes(new) if new is not None else cfg
        amp[key] = amp.get(key, 0j) + a
    return WaveFunction(psi.lattice, amp).prune()


def apply_generalized_ribbon(psi: WaveFunction, path: RibbonPath, z: GroupElement,
                             v: GroupElement) -> WaveFunction:
    """Alias for apply_ribbon; extensions are part of the path."""
    return apply_ribbon(psi, path, z, v)


def apply_ribbon_recursive(psi: WaveFunction, triangles: Sequence[Triangle],
                           z: GroupElement, v: GroupElement) -> WaveFunction:
    """Two-segment recursive evaluation, used only as a test oracle.

    F^(z,v)(rho) = sum_k F^(k,v)(rho_1) F^(k^-1 z, k^-1 v k)(rho_2)
    with rho_1 the first triangle.  Exponential in ribbon length.
    """
    if not triangles:
        raise ValueError("empty ribbon")
    first, rest = triangles[0], triangles[1:]
    if not rest:
        if first.kind == DIRECT:
            return apply_triangle(psi, first, z)
        if z != group.E:
            return WaveFunction(psi.lattice, {})
        return apply_triangle(psi, first, v)
    out = WaveFunction(psi.lattice, {})
    for k in group.ALL_ELEMENTS:
        ki = inv(k)
        inner = apply_ribbon_recursive(psi, rest, mul(ki, z), mul(mul(ki, v), k))
        if inner.is_zero():
            continue
        outer = apply_ribbon_recursive(inner, (first,), k, v)
        out = out.add(outer)
    return out.prune()


# --- anyon-basis ribbons ------------------------------------------------------


@dataclass(frozen=True)
class AnyonRibbonLabel:
    """Flux class, centralizer irrep and internal indices of an anyon ribbon.

    u = (c, j) fixes the flavor end, u' = (c', j') the color end.  For flux
    eigenribbons the irrep is the trivial one and j = j' = 1.
    """

    flux_class: group.ConjugacyClass
    irrep: Irrep
    c: GroupElement
    j: int
    c_prime: GroupElement
    j_prime: int

    def __post_init__(self):
        if self.c not in self.flux_class or self.c_prime not in self.flux_class:
            raise ValueError("internal flux labels must lie in the flux class")
        r = self.flux_class.representative
        if set(self.irrep.domain) != set(group.centralizer(r)):
            raise ValueError(
                f"irrep {self.irrep.label} is not a representation of Z({group.element_name(r)})"
            )
        if not (1 <= self.j <= self.irrep.dim and 1 <= self.j_prime <= self.irrep.dim):
            raise ValueError("matrix indices out of range for the irrep dimension")

    def terms(self) -> List[Tuple[complex, MicroLabel]]:
        """Micro-ribbon expansion sum_n coeff(n) F^(q_c n q_c'^-1, c).

        Coefficients carry the normalization sqrt(dim R / |Z(r)|) that makes
        the basis change unitary per flux sector.
        """
        r = self.flux_class.representative
        cent = group.centralizer(r)
        q_c = group.q_rep(self.c, r)
        q_cp_i = inv(group.q_rep(self.c_prime, r))
        scale = math.sqrt(self.irrep.dim / len(cent))
        out = []
        for n in cent:
            coeff = scale * self.irrep.matrix(n)[self.j - 1, self.j_prime - 1]
            if coeff == 0:
                continue
            out.append((complex(coeff), (mul(mul(q_c, n), q_cp_i), self.c)))
        return out

    def serialize(self) -> str:
        return ":".join([
            self.flux_class.label,
            self.irrep.label,
            group.element_name(self.c),
            str(self.j),
            group.element_name(self.c_prime),
            str(self.j_prime),
        ])

    @staticmethod
    def parse(text: str) -> "AnyonRibbonLabel":
        parts = text.split(":")
        if len(parts) != 6:
            raise ValueError(f"anyon label {text!r} needs 6 colon-separated fields")
        cls = group.class_by_label(parts[0])
        irrep = group.centralizer_irrep(cls, parts[1])
        return AnyonRibbonLabel(cls, irrep, group.parse_element(parts[2]), int(parts[3]),
                                group.parse_element(parts[4]), int(parts[5]))


def apply_anyon_ribbon(psi: WaveFunction, path: RibbonPath,
                       label: AnyonRibbonLabel) -> WaveFunction:
    out = WaveFunction(psi.lattice, {})
    for coeff, (z, v) in label.terms():
        out = out.add(apply_ribbon(psi, path, z, v).scaled(coeff))
    return out.prune()


def apply_flux_sum_ribbon(psi: WaveFunction, path: RibbonPath,
                          c: GroupElement) -> WaveFunction:
    """Sum of the flux-basis ribbons with flavor c over all color labels.

    Equal to sum_z F^(z,c) up to normalization: the color sum leaves no
    charge at the ribbon end vertex.
    """
    cls = group.class_of(c)
    irrep = group.centralizer_irreps(cls)[0]   # trivial
    out = WaveFunction(psi.lattice, {})
    for c_prime in cls.members:
        label = AnyonRibbonLabel(cls, irrep, c, 1, c_prime, 1)
        out = out.add(apply_anyon_ribbon(psi, path, label))
    return out.prune()


# --- closed ribbons -----------------------------------------------------------


def closed_direct_loop(lattice: Lattice, p: int) -> RibbonPath:
    """Four direct triangles around plaquette p, clockwise from its SW corner."""
    i, j = lattice.plaquette_coords(p)
    tris = [
        direct_triangle(lattice, lattice.v_edge(i, j), p, reverse=False),
        direct_triangle(lattice, lattice.h_edge(i, j + 1), p, reverse=False),
        direct_triangle(lattice, lattice.v_edge(i + 1, j), p, reverse=True),
        direct_triangle(lattice, lattice.h_edge(i, j), p, reverse=True),
    ]
    return make_ribbon(lattice, tris)


def closed_dual_loop(lattice: Lattice, v: int) -> RibbonPath:
    """Four dual triangles around vertex v, starting from its SE plaquette."""
    i, j = lattice.vertex_coords(v)
    tris = [
        dual_triangle(lattice, lattice.v_edge(i, j - 1), v, reverse=False),
        dual_triangle(lattice, lattice.h_edge(i - 1, j), v, reverse=False),
        dual_triangle(lattice, lattice.v_edge(i, j), v, reverse=True),
        dual_triangle(lattice, lattice.h_edge(i, j), v, reverse=True),
    ]
    return make_ribbon(lattice, tris)


def common_origin_vertex(paths: Sequence[RibbonPath]) -> int:
    """The shared base vertex of a family of ribbons.

    Topological fluxes of different ribbon pairs can only be compared when
    every extended z string starts or ends at one common vertex; raises
    GeometryError otherwise.
    """
    if not paths:
        raise GeometryError("no ribbons given")
    candidates = {paths[0].string_start_vertex, paths[0].string_end_vertex}
    for path in paths[1:]:
        candidates &= {path.string_start_vertex, path.string_end_vertex}
    if not candidates:
        raise GeometryError("ribbons do not share a base vertex for their z strings")
    return min(candidates)


# --- exchange lemma -------------------------------------------------------------


def exchange_compose(label2: MicroLabel, label1: MicroLabel,
                     orientation: str) -> Tuple[MicroLabel, MicroLabel]:
    """Rewrite F2(t2) F1(t1) as F1'(t1) F2(t2) for ribbons ending at one site.

    Returns (label1', label2).  Valid when t1 and t2 share exactly their
    final edge; the geometry must be checked by the caller.
    """
    z1, v1 = label1
    z2, v2 = label2
    core = v2 if orientation == CW else inv(v2)
    z1p = mul(mul(mul(z1, inv(z2)), core), z2)
    return (z1p, v1), (z2, v2)


def swapped_topological_flux(label1: MicroLabel, label2: MicroLabel) -> GroupElement:
    """Topological flux of particle 1 after one counterclockwise swap with 2.

    Equals w2 w1 w2^-1 with w_i = z_i^-1 v_i z_i.
    """
    (z1p, _v1), _ = exchange_compose(label2, label1, CCW)
    z1, v1 = label1
    return mul(mul(inv(z1p), v1), z1p)
