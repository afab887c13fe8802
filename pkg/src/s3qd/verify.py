"""Invariant suites behind the `verify` command.

Each suite returns a list of (check name, passed, detail) triples; the CLI
turns them into pass/fail lines and an exit status.  The checks mirror the
property tests but run standalone so a packaged install can self-verify.
"""

from __future__ import annotations

import math
from typing import Callable, List, Tuple

import numpy as np

from s3qd import anyon, gates, group, ribbon, state
from s3qd.group import E, MU, MUBAR, MUBARSIGMA, MUSIGMA, SIGMA, inv, mul
from s3qd.lattice import (CCW, CW, build_lattice, direct_triangle, dual_triangle,
                          make_ribbon)

Check = Tuple[str, bool, str]


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


# --- algebra suite ---------------------------------------------------------------


def verify_algebra(seed: int = 0, tol: float = 1e-9) -> List[Check]:
    rng = _rng(seed)
    checks: List[Check] = []

    ok = all(mul(mul(a, b), c) == mul(a, mul(b, c))
             for a in group.ALL_ELEMENTS for b in group.ALL_ELEMENTS for c in group.ALL_ELEMENTS)
    checks.append(("group associativity (216 triples)", ok, ""))

    worst = 0.0
    for irrep in group.S3_IRREPS:
        for a in group.ALL_ELEMENTS:
            for b in group.ALL_ELEMENTS:
                d = np.abs(irrep.matrix(mul(a, b)) - irrep.matrix(a) @ irrep.matrix(b)).max()
                worst = max(worst, d)
    checks.append(("irrep homomorphism", worst <= 1e-12, f"max dev {worst:.1e}"))

    ok = True
    for r1 in group.S3_IRREPS:
        for r2 in group.S3_IRREPS:
            s = sum(r1.character(g) * np.conj(r2.character(g)) for g in group.ALL_ELEMENTS)
            want = 6.0 if r1 is r2 else 0.0
            if abs(s - want) > 1e-12:
                ok = False
    checks.append(("character orthogonality", ok, ""))

    ok = set(group.derived_subgroup()) == {E, MU, MUBAR}
    checks.append(("commutator subgroup is the 3-cycle subgroup", ok, ""))

    rep = state.census_1x1_torus()
    ok = (rep.ground_count == 8 and rep.excited_count == 28
          and "C2" not in rep.excited_flux_classes)
    checks.append(("1x1 torus census (8 ground, 28 excited, no C2 flux)", ok,
                   f"{rep.ground_count}/{rep.excited_count}"))

    lat = build_lattice(2, 2, "open")
    s_v = lat.vertex(1, 1)
    p = lat.plaquette(1, 1)
    worst = 0.0
    for _ in range(20):
        psi = state.random_state(lat, rng, 6)
        for g1 in group.ALL_ELEMENTS:
            for g2 in (MU, SIGMA):
                a = state.apply_vertex(state.apply_vertex(psi, g2, s_v), g1, s_v)
                b = state.apply_vertex(psi, mul(g1, g2), s_v)
                worst = max(worst, a.distance(b))
        for h1 in (E, MU, SIGMA):
            for h2 in (E, SIGMA):
                a = state.apply_plaquette(state.apply_plaquette(psi, h2, p, s_v), h1, p, s_v)
                b = state.apply_plaquette(psi, h1, p, s_v) if h1 == h2 else None
                d = a.norm() if b is None else a.distance(b)
                worst = max(worst, d)
        for g in (MU, SIGMA, MUSIGMA):
            for h in (MU, SIGMA):
                a = state.apply_plaquette(state.apply_vertex(psi, g, s_v),
                                          mul(mul(g, h), inv(g)), p, s_v)
                b = state.apply_vertex(state.apply_plaquette(psi, h, p, s_v), g, s_v)
                worst = max(worst, a.distance(b))
    checks.append(("Drinfeld relations on random states", worst <= tol, f"max dev {worst:.1e}"))

    worst = 0.0
    for lat_t in (build_lattice(1, 1, "torus"), lat):
        for _ in range(5):
            psi = state.random_state(lat_t, rng, 5)
            for v in range(lat_t.n_vertices):
                a1 = state.apply_vertex_projector(psi, v)
                worst = max(worst, a1.distance(state.apply_vertex_projector(a1, v)))
            for pq in range(lat_t.n_plaquettes):
                b1 = state.apply_plaquette(psi, E, pq)
                worst = max(worst, b1.distance(state.apply_plaquette(b1, E, pq)))
    checks.append(("vertex/plaquette projectors idempotent", worst <= tol, f"{worst:.1e}"))

    # basis change: unitary sectors + the four printed C3 states
    ok = True
    for cls in group.CLASSES:
        for w in cls.members:
            M, _names = anyon.sector_matrix(cls, w)
            if np.abs(M @ M.conj().T - np.eye(6)).max() > 1e-12:
                ok = False
    checks.append(("anyon basis change unitary per sector", ok, ""))

    got = anyon.anyon_to_micro(group.CLASS_C3, MU, {"C3:[1]:u:1:u:1": 1.0})
    want = {E: 1 / math.sqrt(3), MU: 1 / math.sqrt(3), MUBAR: 1 / math.sqrt(3)}
    ok = all(abs(got.get(z, 0) - a) < 1e-12 for z, a in want.items())
    got = anyon.anyon_to_micro(group.CLASS_C3, MU, {"C3:[w]:u:1:u:1": 1.0})
    w3 = group.OMEGA
    want = {E: 1 / math.sqrt(3), MU: w3 / math.sqrt(3), MUBAR: w3.conjugate() / math.sqrt(3)}
    ok = ok and all(abs(got.get(z, 0) - a) < 1e-12 for z, a in want.items())
    checks.append(("printed C3 basis states reproduced", ok, ""))

    ok = True
    for a in group.ANYON_TYPES:
        for b in group.ANYON_TYPES:
            outs = anyon.fuse(a, b)
            if a.qdim * b.qdim != sum(c.qdim for c in outs):
                ok = False
            if anyon.FUSION_TABLE[(a.letter, b.letter)] != anyon.FUSION_TABLE[(b.letter, a.letter)]:
                ok = False
    total = sum(t.qdim ** 2 for t in group.ANYON_TYPES)
    checks.append(("fusion table symmetric and dimension consistent", ok and total == 36,
                   f"sum d^2 = {total}"))
    return checks


# --- ribbon suite -----------------------------------------------------------------


def _sample_ribbons(lat):
    """A cw and a ccw test ribbon with both triangle kinds."""
    ccw = make_ribbon(lat, [
        direct_triangle(lat, lat.h_edge(0, 1), lat.plaquette(0, 1), reverse=False),
        dual_triangle(lat, lat.v_edge(1, 1), lat.vertex(1, 1), reverse=True),
        direct_triangle(lat, lat.h_edge(1, 1), lat.plaquette(1, 1), reverse=False),
    ])
    cw = make_ribbon(lat, [
        direct_triangle(lat, lat.h_edge(0, 2), lat.plaquette(0, 1), reverse=False),
        dual_triangle(lat, lat.v_edge(1, 1), lat.vertex(1, 2), reverse=True),
        direct_triangle(lat, lat.h_edge(1, 2), lat.plaquette(1, 1), reverse=False),
    ])
    return cw, ccw


def verify_ribbon(seed: int = 0, tol: float = 1e-9, tuples: int = 100) -> List[Check]:
    rng = _rng(seed)
    checks: List[Check] = []
    lat = build_lattice(3, 3, "open")
    cw, ccw = _sample_ribbons(lat)

    worst = 0.0
    for k in range(tuples):
        rib = cw if k % 2 else ccw
        psi = state.random_state(lat, rng, 4)
        z = int(rng.integers(0, 6))
        v = int(rng.integers(0, 6))
        a = ribbon.apply_ribbon(psi, rib, z, v)
        b = ribbon.apply_ribbon_recursive(psi, rib.triangles, z, v)
        worst = max(worst, a.distance(b))
    checks.append((f"recursive == constructive on {tuples} random tuples",
                   worst <= tol, f"max dev {worst:.1e}"))

    p = lat.plaquette(1, 1)
    base = lat.plaquette_corners(p)[0]
    loop = ribbon.closed_direct_loop(lat, p)
    worst = 0.0
    for _ in range(20):
        psi = state.random_state(lat, rng, 5)
        for z in group.ALL_ELEMENTS:
            for v in (E, MU, SIGMA):
                worst = max(worst, ribbon.apply_ribbon(psi, loop, z, v).distance(
                    state.apply_plaquette(psi, z, p, base)))
    checks.append(("closed direct loop equals the plaquette projector", worst <= tol,
                   f"{worst:.1e}"))

    s_v = lat.vertex(1, 1)
    dloop = ribbon.closed_dual_loop(lat, s_v)
    worst = 0.0
    for _ in range(20):
        psi = state.random_state(lat, rng, 5)
        for g in group.ALL_ELEMENTS:
            worst = max(worst, ribbon.apply_ribbon(psi, dloop, E, g).distance(
                state.apply_vertex(psi, g, s_v)))
        for z in (MU, SIGMA):
            worst = max(worst, ribbon.apply_ribbon(psi, dloop, z, MU).norm())
    checks.append(("closed dual loop equals the vertex operator", worst <= tol,
                   f"{worst:.1e}"))

    worst = 0.0
    for rib in (cw, ccw):
        for _ in range(4):
            psi = state.random_state(lat, rng, 5)
            for z1 in group.ALL_ELEMENTS:
                for v1, v2 in ((MU, SIGMA), (SIGMA, MUSIGMA), (MUBAR, MUBAR)):
                    for z2 in (z1, mul(z1, MU)):
                        lhs = ribbon.apply_ribbon(ribbon.apply_ribbon(psi, rib, z2, v2),
                                                  rib, z1, v1)
                        if z1 != z2:
                            worst = max(worst, lhs.norm())
                        else:
                            vv = mul(v2, v1) if rib.orientation == CW else mul(v1, v2)
                            worst = max(worst, lhs.distance(
                                ribbon.apply_ribbon(psi, rib, z1, vv)))
    checks.append(("same-ribbon composition rule (cw and ccw)", worst <= tol, f"{worst:.1e}"))

    worst = 0.0
    for rib in (cw, ccw):
        interior = rib.triangles[1].start_site[0]
        for _ in range(4):
            psi = state.random_state(lat, rng, 5)
            for g in group.ALL_ELEMENTS:
                for z, v in ((E, MU), (SIGMA, MUSIGMA)):
                    a = state.apply_vertex(ribbon.apply_ribbon(psi, rib, z, v), g, interior)
                    b = ribbon.apply_ribbon(state.apply_vertex(psi, g, interior), rib, z, v)
                    worst = max(worst, a.distance(b))
    checks.append(("mid-ribbon commutation with vertex projectors", worst <= tol,
                   f"{worst:.1e}"))

    worst = 0.0
    for rib in (cw, ccw):
        ori = rib.orientation
        vs, ps = rib.start_site
        ve, pe = rib.end_site
        for _ in range(3):
            psi = state.random_state(lat, rng, 5)
            for z, v in ((E, MU), (SIGMA, MUBARSIGMA), (MU, SIGMA)):
                for h in (MU, SIGMA, MUSIGMA):
                    eta = mul(v, h) if ori == CW else mul(h, v)
                    lhs = state.apply_plaquette(ribbon.apply_ribbon(psi, rib, z, v), h, ps, vs)
                    rhs = ribbon.apply_ribbon(state.apply_plaquette(psi, eta, ps, vs), rib, z, v)
                    worst = max(worst, lhs.distance(rhs))
                    conj_v = mul(mul(inv(z), inv(v)), z)
                    eta = mul(h, conj_v) if ori == CW else mul(conj_v, h)
                    lhs = state.apply_plaquette(ribbon.apply_ribbon(psi, rib, z, v), h, pe, ve)
                    rhs = ribbon.apply_ribbon(state.apply_plaquette(psi, eta, pe, ve), rib, z, v)
                    worst = max(worst, lhs.distance(rhs))
                for g in (MU, SIGMA):
                    lhs = state.apply_vertex(ribbon.apply_ribbon(psi, rib, z, v), g, vs)
                    rhs = ribbon.apply_ribbon(state.apply_vertex(psi, g, vs), rib,
                                              mul(g, z), mul(mul(g, v), inv(g)))
                    worst = max(worst, lhs.distance(rhs))
                    lhs = state.apply_vertex(ribbon.apply_ribbon(psi, rib, z, v), g, ve)
                    rhs = ribbon.apply_ribbon(state.apply_vertex(psi, g, ve), rib,
                                              mul(z, inv(g)), v)
                    worst = max(worst, lhs.distance(rhs))
    checks.append(("endpoint commutation relations (8 cases)", worst <= tol, f"{worst:.1e}"))

    t1c = make_ribbon(lat, [
        direct_triangle(lat, lat.h_edge(0, 1), lat.plaquette(0, 1), reverse=False),
        direct_triangle(lat, lat.v_edge(1, 1), lat.plaquette(0, 1), reverse=False),
    ])
    t2c = make_ribbon(lat, [
        dual_triangle(lat, lat.h_edge(1, 2), lat.vertex(1, 2), reverse=True),
        dual_triangle(lat, lat.v_edge(1, 1), lat.vertex(1, 2), reverse=False),
    ])
    t1w = make_ribbon(lat, [
        direct_triangle(lat, lat.h_edge(0, 2), lat.plaquette(0, 1), reverse=False),
        direct_triangle(lat, lat.v_edge(1, 1), lat.plaquette(0, 1), reverse=True),
    ])
    t2w = make_ribbon(lat, [
        dual_triangle(lat, lat.h_edge(1, 1), lat.vertex(1, 1), reverse=False),
        dual_triangle(lat, lat.v_edge(1, 1), lat.vertex(1, 1), reverse=False),
    ])
    worst = 0.0
    for t1, t2, ori in ((t1c, t2c, CCW), (t1w, t2w, CW)):
        for _ in range(3):
            psi = state.random_state(lat, rng, 5)
            for z1 in (E, MUBAR, MUSIGMA):
                for v1 in (MU, SIGMA):
                    for z2 in (E, MU, MUBARSIGMA):
                        for v2 in (SIGMA, MUBAR):
                            lhs = ribbon.apply_ribbon(ribbon.apply_ribbon(psi, t1, z1, v1),
                                                      t2, z2, v2)
                            (z1p, v1p), _ = ribbon.exchange_compose((z2, v2), (z1, v1), ori)
                            rhs = ribbon.apply_ribbon(ribbon.apply_ribbon(psi, t2, z2, v2),
                                                      t1, z1p, v1p)
                            worst = max(worst, lhs.distance(rhs))
    checks.append(("exchange lemma (cw and ccw)", worst <= tol, f"{worst:.1e}"))

    ok = True
    for z1 in group.ALL_ELEMENTS:
        for v1 in group.ALL_ELEMENTS:
            for z2 in group.ALL_ELEMENTS:
                for v2 in group.ALL_ELEMENTS:
                    w1 = mul(mul(inv(z1), v1), z1)
                    w2 = mul(mul(inv(z2), v2), z2)
                    if ribbon.swapped_topological_flux((z1, v1), (z2, v2)) != \
                            mul(mul(w2, w1), inv(w2)):
                        ok = False
    checks.append(("braiding conjugates the topological flux", ok, ""))
    return checks


# --- gates suite -------------------------------------------------------------------


def verify_gates(seed: int = 0, tol: float = 1e-9) -> List[Check]:
    checks: List[Check] = []
    w = group.OMEGA

    M = gates.gate_matrix(lambda r: r.pull_through(0, 1), 2, seed=seed)
    ok = all(abs(M[3 * a + ((-a - b) % 3), 3 * a + b] - 1) < tol
             for a in range(3) for b in range(3))
    checks.append(("pull-through truth table (9 entries)", ok, ""))

    Mp = gates.gate_matrix(lambda r: r.u_plus(0, 1), 2, seed=seed)
    Mm = gates.gate_matrix(lambda r: r.u_minus(0, 1), 2, seed=seed)
    okp = all(abs(Mp[3 * a + ((b + a) % 3), 3 * a + b] - 1) < tol
              for a in range(3) for b in range(3))
    okm = np.abs(Mm @ Mp - np.eye(9)).max() < tol
    checks.append(("U+ truth table and U- inverse", okp and okm, ""))

    Mz = gates.gate_matrix(lambda r: r.qutrit_z(0), 1, seed=seed)
    Mx = gates.gate_matrix(lambda r: r.qutrit_shift(0), 1, seed=seed)
    ok = np.abs(Mz - np.diag([1, w, w ** 2])).max() < tol
    ok = ok and np.abs(Mz @ Mx - w * (Mx @ Mz)).max() < tol
    checks.append(("clock gate and ZX = wXZ", ok, ""))

    ok = True
    for which in range(3):
        Ms = gates.gate_matrix(lambda r, wh=which: r.sign_flip(0, wh), 1, seed=seed + which)
        tgt = np.diag([(-1.0 if i == which else 1.0) for i in range(3)])
        if np.abs(Ms - tgt).max() > tol:
            ok = False
    checks.append(("sign-flip truth tables (3x3)", ok, ""))

    ok = True
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        Ma = gates.gate_matrix(lambda r, a=i: r.sign_flip(0, a), 1, seed=seed + 31)
        Mb = gates.gate_matrix(lambda r, b=j: r.sign_flip(0, b), 1, seed=seed + 32)
        Mc = gates.gate_matrix(lambda r, c=k: r.sign_flip(0, c), 1, seed=seed + 33)
        if np.abs(Mb @ Ma + Mc).max() > tol:
            ok = False
    checks.append(("sign-flip product rule sz_j sz_i = -sz_k", ok, ""))

    def qubit_cols(apply_fn, n, seed_):
        out = []
        import itertools
        for col, bits in enumerate(itertools.product((0, 1), repeat=n)):
            reg = gates.new_register(n, seed=seed_ + col + 1)
            reg.set_basis(list(bits))
            apply_fn(reg)
            out.append(reg.vector())
        return np.array(out).T

    import itertools
    def qubit_rows(M, n):
        idx = [sum(b * 3 ** (n - 1 - kk) for kk, b in enumerate(bits))
               for bits in itertools.product((0, 1), repeat=n)]
        return M[idx, :], np.delete(M, idx, axis=0)

    MX = qubit_cols(lambda r: r.qubit_x(0), 1, seed + 41)
    q, leak = qubit_rows(MX, 1)
    ok = np.abs(q - np.array([[0, 1], [1, 0]])).max() < tol and np.abs(leak).max() < tol
    checks.append(("qubit X truth table", ok, ""))

    MCZ = qubit_cols(lambda r: r.cz(0, 1), 2, seed + 43)
    q, leak = qubit_rows(MCZ, 2)
    ok = np.abs(q - np.diag([1, 1, 1, -1])).max() < tol and np.abs(leak).max() < tol
    checks.append(("CZ truth table (4 entries)", ok, ""))

    MCCZ = qubit_cols(lambda r: r.ccz(0, 1, 2), 3, seed + 47)
    q, leak = qubit_rows(MCCZ, 3)
    ok = np.abs(q - np.diag([1] * 7 + [-1])).max() < tol and np.abs(leak).max() < tol
    checks.append(("CCZ truth table (8 entries)", ok, ""))

    def conj_fn(r):
        r.ccz(0, 1, 2)
        r.qubit_x(0)
        r.ccz(0, 1, 2)
    M1 = qubit_cols(conj_fn, 3, seed + 53)
    q, leak = qubit_rows(M1, 3)
    X = np.array([[0, 1], [1, 0]])
    CZ = np.diag([1, 1, 1, -1])
    ok = np.abs(q - np.kron(X, CZ)).max() < tol and np.abs(leak).max() < tol
    checks.append(("CCZ X1 CCZ equals X tensor CZ (non-Clifford witness)", ok, ""))

    MH = qubit_cols(lambda r: r.hadamard(0), 1, seed + 59)
    q, leak = qubit_rows(MH, 1)
    H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    ok = np.abs(q - H).max() < tol and np.abs(leak).max() < tol
    checks.append(("Hadamard truth table and H^2 = 1", ok and
                   np.abs(q @ q - np.eye(2)).max() < tol, ""))

    ok = True
    S = np.diag([1, 1j, 1])
    rng = _rng(seed + 61)
    for trial in range(10):
        a = rng.normal() + 1j * rng.normal()
        b = rng.normal() + 1j * rng.normal()
        vec = np.array([a, b, 0], dtype=complex)
        vec /= np.linalg.norm(vec)
        reg = gates.new_register(1, seed=seed + 100 + trial)
        reg.set_state(vec)
        reg.s_gate(0)
        out = reg.vector()
        want = S @ vec
        fid = abs(np.vdot(want, out))
        if abs(fid - 1.0) > tol:
            ok = False
    checks.append(("S gate projectively exact on random qubit states", ok, ""))
    return checks


SUITES: dict = {
    "algebra": verify_algebra,
    "ribbon": verify_ribbon,
    "gates": verify_gates,
}


def run_suites(names, seed: int = 0, tol: float = 1e-9) -> List[Check]:
    out: List[Check] = []
    for name in names:
        out.extend(SUITES[name](seed=seed, tol=tol))
    return out
