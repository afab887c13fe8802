"""Acceptance criteria, one test per criterion, pinned tolerances.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass/fail line
per criterion, or via `s3qd verify all` and `s3qd mc` for the CLI flavor.
"""

import itertools
import math
import time

import numpy as np
import pytest

from s3qd import anyon, cli, gates, group, ribbon, state
from s3qd.group import ALL_ELEMENTS, E, MU, MUBAR, MUBARSIGMA, MUSIGMA, OMEGA, SIGMA, inv, mul
from s3qd.lattice import CCW, CW, build_lattice, direct_triangle, dual_triangle, make_ribbon

TOL = 1e-9

_rng = lambda seed: np.random.Generator(np.random.Philox(seed))


def _report(criterion: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


# --- criterion 1: torus census -------------------------------------------------------


def test_criterion_1_census():
    t0 = time.monotonic()
    rep = state.census_1x1_torus()
    elapsed = time.monotonic() - t0
    ok = (rep.ground_count == 8 and rep.excited_count == 28
          and "C2" not in rep.excited_flux_classes and elapsed < 1.0)
    _report("1 torus census", ok,
            f"ground={rep.ground_count} excited={rep.excited_count} "
            f"classes={rep.excited_flux_classes} in {elapsed:.3f}s")


# --- criterion 2: stabilizer algebra ---------------------------------------------------


def test_criterion_2_drinfeld_relations():
    t0 = time.monotonic()
    rng = _rng(2)
    lat = build_lattice(2, 2, "open")
    v = lat.vertex(1, 1)
    p = lat.plaquette(1, 1)
    worst = 0.0
    for _ in range(20):
        psi = state.random_state(lat, rng, 6)
        for g1 in ALL_ELEMENTS:
            for g2 in ALL_ELEMENTS:
                a = state.apply_vertex(state.apply_vertex(psi, g2, v), g1, v)
                worst = max(worst, a.distance(state.apply_vertex(psi, mul(g1, g2), v)))
        for h1 in ALL_ELEMENTS:
            for h2 in ALL_ELEMENTS:
                a = state.apply_plaquette(state.apply_plaquette(psi, h2, p, v), h1, p, v)
                if h1 == h2:
                    worst = max(worst, a.distance(state.apply_plaquette(psi, h1, p, v)))
                else:
                    worst = max(worst, a.norm())
        for g in ALL_ELEMENTS:
            for h in ALL_ELEMENTS:
                a = state.apply_plaquette(state.apply_vertex(psi, g, v),
                                          mul(mul(g, h), inv(g)), p, v)
                b = state.apply_vertex(state.apply_plaquette(psi, h, p, v), g, v)
                worst = max(worst, a.distance(b))
    elapsed = time.monotonic() - t0
    _report("2 stabilizer algebra", worst <= TOL and elapsed < 10.0,
            f"max dev {worst:.2e} in {elapsed:.1f}s")


# --- criterion 3: ribbon identities ------------------------------------------------------


def test_criterion_3_ribbon_identities():
    t0 = time.monotonic()
    rng = _rng(3)
    lat = build_lattice(3, 3, "open")

    ccw_rib = make_ribbon(lat, [
        direct_triangle(lat, lat.h_edge(0, 1), lat.plaquette(0, 1), reverse=False),
        dual_triangle(lat, lat.v_edge(1, 1), lat.vertex(1, 1), reverse=True),
        direct_triangle(lat, lat.h_edge(1, 1), lat.plaquette(1, 1), reverse=False),
    ])
    cw_rib = make_ribbon(lat, [
        direct_triangle(lat, lat.h_edge(0, 2), lat.plaquette(0, 1), reverse=False),
        dual_triangle(lat, lat.v_edge(1, 1), lat.vertex(1, 2), reverse=True),
        direct_triangle(lat, lat.h_edge(1, 2), lat.plaquette(1, 1), reverse=False),
    ])

    # (a) recursive == constructive on 100 random tuples
    worst_a = 0.0
    for k in range(100):
        rib = cw_rib if k % 2 else ccw_rib
        psi = state.random_state(lat, rng, 4)
        z = int(rng.integers(0, 6))
        v = int(rng.integers(0, 6))
        worst_a = max(worst_a, ribbon.apply_ribbon(psi, rib, z, v).distance(
            ribbon.apply_ribbon_recursive(psi, rib.triangles, z, v)))

    # (b) closed loops against the stabilizers, all labels
    worst_b = 0.0
    p = lat.plaquette(1, 1)
    base = lat.plaquette_corners(p)[0]
    loop = ribbon.closed_direct_loop(lat, p)
    s_v = lat.vertex(1, 1)
    dloop = ribbon.closed_dual_loop(lat, s_v)
    for _ in range(10):
        psi = state.random_state(lat, rng, 5)
        for z in ALL_ELEMENTS:
            for vv in ALL_ELEMENTS:
                worst_b = max(worst_b, ribbon.apply_ribbon(psi, loop, z, vv).distance(
                    state.apply_plaquette(psi, z, p, base)))
        for g in ALL_ELEMENTS:
            worst_b = max(worst_b, ribbon.apply_ribbon(psi, dloop, E, g).distance(
                state.apply_vertex(psi, g, s_v)))
        for z in (MU, SIGMA):
            worst_b = max(worst_b, ribbon.apply_ribbon(psi, dloop, z, MU).norm())

    # (c) same-ribbon composition and the eight endpoint relations
    worst_c = 0.0
    for rib in (cw_rib, ccw_rib):
        ori = rib.orientation
        vs, ps = rib.start_site
        ve, pe = rib.end_site
        for _ in range(4):
            psi = state.random_state(lat, rng, 5)
            for z1 in ALL_ELEMENTS:
                for v1, v2 in ((MU, SIGMA), (MUSIGMA, MUBAR)):
                    lhs = ribbon.apply_ribbon(ribbon.apply_ribbon(psi, rib, z1, v2),
                                              rib, z1, v1)
                    vv = mul(v2, v1) if ori == CW else mul(v1, v2)
                    worst_c = max(worst_c, lhs.distance(
                        ribbon.apply_ribbon(psi, rib, z1, vv)))
                    lhs = ribbon.apply_ribbon(
                        ribbon.apply_ribbon(psi, rib, mul(z1, MU), v2), rib, z1, v1)
                    worst_c = max(worst_c, lhs.norm())
            for z, v in ((E, MU), (MUSIGMA, SIGMA), (MU, MUBARSIGMA)):
                for h in ALL_ELEMENTS:
                    eta = mul(v, h) if ori == CW else mul(h, v)
                    lhs = state.apply_plaquette(ribbon.apply_ribbon(psi, rib, z, v),
                                                h, ps, vs)
                    rhs = ribbon.apply_ribbon(state.apply_plaquette(psi, eta, ps, vs),
                                              rib, z, v)
                    worst_c = max(worst_c, lhs.distance(rhs))
                    conj = mul(mul(inv(z), inv(v)), z)
                    eta = mul(h, conj) if ori == CW else mul(conj, h)
                    lhs = state.apply_plaquette(ribbon.apply_ribbon(psi, rib, z, v),
                                                h, pe, ve)
                    rhs = ribbon.apply_ribbon(state.apply_plaquette(psi, eta, pe, ve),
                                              rib, z, v)
                    worst_c = max(worst_c, lhs.distance(rhs))
                for g in ALL_ELEMENTS:
                    lhs = state.apply_vertex(ribbon.apply_ribbon(psi, rib, z, v), g, vs)
                    rhs = ribbon.apply_ribbon(state.apply_vertex(psi, g, vs), rib,
                                              mul(g, z), mul(mul(g, v), inv(g)))
                    worst_c = max(worst_c, lhs.distance(rhs))
                    lhs = state.apply_vertex(ribbon.apply_ribbon(psi, rib, z, v), g, ve)
                    rhs = ribbon.apply_ribbon(state.apply_vertex(psi, g, ve), rib,
                                              mul(z, inv(g)), v)
                    worst_c = max(worst_c, lhs.distance(rhs))

    # (d) exchange lemma in both orientations
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
    worst_d = 0.0
    for t1, t2, ori in ((t1c, t2c, CCW), (t1w, t2w, CW)):
        for _ in range(4):
            psi = state.random_state(lat, rng, 5)
            for z1, v1 in ((E, MU), (MUBAR, SIGMA), (MUSIGMA, MUBARSIGMA)):
                for z2, v2 in ((E, SIGMA), (MU, MUSIGMA)):
                    lhs = ribbon.apply_ribbon(ribbon.apply_ribbon(psi, t1, z1, v1),
                                              t2, z2, v2)
                    (z1p, v1p), _lbl = ribbon.exchange_compose((z2, v2), (z1, v1), ori)
                    rhs = ribbon.apply_ribbon(ribbon.apply_ribbon(psi, t2, z2, v2),
                                              t1, z1p, v1p)
                    worst_d = max(worst_d, lhs.distance(rhs))

    elapsed = time.monotonic() - t0
    worst = max(worst_a, worst_b, worst_c, worst_d)
    _report("3 ribbon identities", worst <= TOL and elapsed < 60.0,
            f"a={worst_a:.1e} b={worst_b:.1e} c={worst_c:.1e} d={worst_d:.1e} "
            f"in {elapsed:.1f}s")


# --- criterion 4: basis change -----------------------------------------------------------


def test_criterion_4_basis_change():
    ok = True
    for cls in group.CLASSES:
        for w in cls.members:
            M, _ = anyon.sector_matrix(cls, w)
            if np.abs(M @ M.conj().T - np.eye(6)).max() > 1e-12:
                ok = False
    s3 = 1 / math.sqrt(3)
    printed = [
        ({"C3:[1]:u:1:u:1": 1.0}, MU, {E: s3, MU: s3, MUBAR: s3}),
        ({"C3:[1]:U:1:U:1": 1.0}, MUBAR, {E: s3, MU: s3, MUBAR: s3}),
        ({"C3:[1]:U:1:u:1": 1.0}, MU, {SIGMA: s3, MUBARSIGMA: s3, MUSIGMA: s3}),
        ({"C3:[1]:u:1:U:1": 1.0}, MUBAR, {SIGMA: s3, MUBARSIGMA: s3, MUSIGMA: s3}),
        ({"C3:[w]:u:1:u:1": 1.0}, MU,
         {E: s3, MU: OMEGA * s3, MUBAR: OMEGA.conjugate() * s3}),
    ]
    for anyon_amp, w, want in printed:
        got = anyon.anyon_to_micro(group.CLASS_C3, w, anyon_amp)
        if set(got) != set(want) or any(abs(got[z] - want[z]) > 1e-12 for z in want):
            ok = False
    # round trip at 1e-12 on random sector vectors
    rng = _rng(4)
    for cls in group.CLASSES:
        for w in cls.members:
            vec = rng.normal(size=6) + 1j * rng.normal(size=6)
            micro = {z: complex(vec[z]) for z in ALL_ELEMENTS}
            back = anyon.anyon_to_micro(cls, w, anyon.micro_to_anyon(cls, w, micro))
            if any(abs(back.get(z, 0) - micro[z]) > 1e-12 for z in ALL_ELEMENTS):
                ok = False
    _report("4 basis change", ok, "unitary sectors + printed C3 states at 1e-12")


# --- criterion 5: generalized ribbons ------------------------------------------------------


def test_criterion_5_generalized_ribbons():
    lat = build_lattice(2, 1, "open")
    gs = state.ground_state(lat)
    tris = [
        direct_triangle(lat, lat.h_edge(0, 0), lat.plaquette(0, 0), reverse=False),
        dual_triangle(lat, lat.v_edge(1, 0), lat.vertex(1, 0), reverse=True),
    ]
    label = ribbon.AnyonRibbonLabel(group.CLASS_C2, group.Z2_TRIVIAL, SIGMA, 1, SIGMA, 1)
    plain = make_ribbon(lat, tris)
    prefix = ((lat.v_edge(0, 0), -1),)
    suffix = ((lat.h_edge(1, 0), +1),)
    ext = make_ribbon(lat, tris, z_prefix=prefix, z_suffix=suffix)

    psi = ribbon.apply_anyon_ribbon(gs, plain, label).normalized()
    viol = state.violations(psi, tol=TOL)
    plain_charge = {v.site[0] for v in viol if v.kind == "charge"}
    plain_flux = {v.site[1] for v in viol if v.kind == "flux"}

    psi = ribbon.apply_anyon_ribbon(gs, ext, label).normalized()
    viol = state.violations(psi, tol=TOL)
    ext_charge = {v.site[0] for v in viol if v.kind == "charge"}
    ext_flux = {v.site[1] for v in viol if v.kind == "flux"}

    ok = (plain_flux == {plain.start_site[1], plain.end_site[1]}
          and plain_charge == {plain.start_site[0], plain.end_site[0]}
          and ext_flux == plain_flux
          and ext_charge == {ext.string_start_vertex, ext.string_end_vertex}
          and ext_charge.isdisjoint(plain_charge))
    _report("5 generalized ribbons", ok,
            f"flux@{sorted(ext_flux)} charge moved {sorted(plain_charge)} -> "
            f"{sorted(ext_charge)}")


# --- criterion 6: lattice logical initialization ----------------------------------------------


def test_criterion_6_logical_initialization():
    lat = build_lattice(3, 1, "open")
    gs = state.ground_state(lat)
    t1 = make_ribbon(lat, [dual_triangle(lat, lat.v_edge(1, 0), lat.vertex(1, 1),
                                         reverse=True)],
                     z_suffix=((lat.h_edge(1, 1), +1),))
    t2 = make_ribbon(lat, [dual_triangle(lat, lat.v_edge(2, 0), lat.vertex(2, 1),
                                         reverse=False)])
    assert ribbon.common_origin_vertex([t1, t2]) == lat.vertex(2, 1)

    comp = []
    for a in range(3):
        psi = ribbon.apply_flux_sum_ribbon(gs, t2, anyon.FLUX_LABELS[a])
        psi = ribbon.apply_flux_sum_ribbon(psi, t1, anyon.FLUX_LABELS[a])
        comp.append(psi.normalized())

    gram = np.array([[x.inner(y) for y in comp] for x in comp])
    ortho_deficit = np.abs(gram - np.eye(3)).max()

    # computational readout: definite flavor flux at both far plaquettes
    flavor_ok = True
    for a, psi in enumerate(comp):
        for rib in (t1, t2):
            vals = {state.flux_at(cfg, lat, rib.start_site[1], base=rib.start_site[0])
                    for cfg in psi.amp}
            if vals != {anyon.FLUX_LABELS[a]}:
                flavor_ok = False

    # dual readout: the all-vertex group action has eigenphase 1, w, w* and
    # the sigma action fixes only the charge-free state
    def a_global(psi, g):
        out = psi
        for v in range(lat.n_vertices):
            out = state.apply_vertex(out, g, v)
        return out

    dual_deficit = 0.0
    for k in range(3):
        dual = state.WaveFunction(lat, {})
        for a in range(3):
            dual = dual.add(comp[a].scaled(anyon.DUAL_BASIS[k][a]))
        dual = dual.normalized()
        phase = dual.inner(a_global(dual, MU))
        dual_deficit = max(dual_deficit, abs(phase - OMEGA ** k))
        sig = dual.inner(a_global(dual, SIGMA)).real
        dual_deficit = max(dual_deficit, abs(sig - (1.0 if k == 0 else 0.0)))

    ok = ortho_deficit <= TOL and flavor_ok and dual_deficit <= math.sqrt(TOL)
    _report("6 lattice logical initialization", ok,
            f"orthonormality deficit {ortho_deficit:.1e}, dual readout deficit "
            f"{dual_deficit:.1e}")


# --- criterion 7: gate truth tables ----------------------------------------------------------


def test_criterion_7_gate_truth_tables():
    checks = gates and True
    results = {}

    M = gates.gate_matrix(lambda r: r.pull_through(0, 1), 2, seed=70)
    results["U"] = all(abs(M[3 * a + ((-a - b) % 3), 3 * a + b] - 1) <= TOL
                       for a in range(3) for b in range(3))
    Mp = gates.gate_matrix(lambda r: r.u_plus(0, 1), 2, seed=71)
    Mm = gates.gate_matrix(lambda r: r.u_minus(0, 1), 2, seed=72)
    results["U+"] = all(abs(Mp[3 * a + ((b + a) % 3), 3 * a + b] - 1) <= TOL
                        for a in range(3) for b in range(3))
    results["U-"] = all(abs(Mm[3 * a + ((b - a) % 3), 3 * a + b] - 1) <= TOL
                        for a in range(3) for b in range(3))
    Mz = gates.gate_matrix(lambda r: r.qutrit_z(0), 1, seed=73)
    results["Z"] = np.abs(Mz - np.diag([1, OMEGA, OMEGA ** 2])).max() <= TOL
    for which in range(3):
        Ms = gates.gate_matrix(lambda r, w=which: r.sign_flip(0, w), 1, seed=74 + which)
        tgt = np.diag([(-1.0 if i == which else 1.0) for i in range(3)])
        results[f"sz{which}"] = np.abs(Ms - tgt).max() <= TOL

    def qubit_cols(apply_fn, n, seed):
        cols = []
        for k, bits in enumerate(itertools.product((0, 1), repeat=n)):
            reg = gates.new_register(n, seed=seed + k)
            reg.set_basis(list(bits))
            apply_fn(reg)
            cols.append(reg.vector())
        return np.array(cols).T

    def qubit_rows(M, n):
        idx = [sum(b * 3 ** (n - 1 - k) for k, b in enumerate(bits))
               for bits in itertools.product((0, 1), repeat=n)]
        return M[idx, :], np.delete(M, idx, axis=0)

    MX = qubit_cols(lambda r: r.qubit_x(0), 1, 80)
    q, leak = qubit_rows(MX, 1)
    results["X"] = np.abs(q - [[0, 1], [1, 0]]).max() <= TOL and np.abs(leak).max() <= TOL
    MCZ = qubit_cols(lambda r: r.cz(0, 1), 2, 82)
    q, leak = qubit_rows(MCZ, 2)
    results["CZ"] = np.abs(q - np.diag([1, 1, 1, -1])).max() <= TOL \
        and np.abs(leak).max() <= TOL
    MCCZ = qubit_cols(lambda r: r.ccz(0, 1, 2), 3, 84)
    q, leak = qubit_rows(MCCZ, 3)
    results["CCZ"] = np.abs(q - np.diag([1] * 7 + [-1])).max() <= TOL \
        and np.abs(leak).max() <= TOL

    def conj(r):
        r.ccz(0, 1, 2)
        r.qubit_x(0)
        r.ccz(0, 1, 2)
    M8 = qubit_cols(conj, 3, 86)
    q, leak = qubit_rows(M8, 3)
    want = np.kron(np.array([[0, 1], [1, 0]]), np.diag([1, 1, 1, -1]))
    results["CCZ.X1.CCZ"] = np.abs(q - want).max() <= TOL and np.abs(leak).max() <= TOL

    MH = qubit_cols(lambda r: r.hadamard(0), 1, 88)
    q, leak = qubit_rows(MH, 1)
    H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    results["H"] = np.abs(q - H).max() <= TOL and np.abs(leak).max() <= TOL

    s_ok = True
    S = np.diag([1, 1j, 1])
    for col, basis in enumerate(((1, 0, 0), (0, 1, 0))):
        reg = gates.new_register(1, seed=90 + col)
        reg.set_state(np.array(basis, dtype=complex))
        reg.s_gate(0)
        out = reg.vector()
        if abs(abs(np.vdot(S @ np.array(basis, dtype=complex), out)) - 1) > TOL:
            s_ok = False
    rng = _rng(91)
    for trial in range(5):
        vec = np.array([rng.normal() + 1j * rng.normal(),
                        rng.normal() + 1j * rng.normal(), 0])
        vec /= np.linalg.norm(vec)
        reg = gates.new_register(1, seed=92 + trial)
        reg.set_state(vec)
        reg.s_gate(0)
        if abs(abs(np.vdot(S @ vec, reg.vector())) - 1) > TOL:
            s_ok = False
    results["S"] = s_ok

    failed = [name for name, ok in results.items() if not ok]
    _report("7 gate truth tables", not failed,
            "all exact" if not failed else f"failed: {failed}")


# --- criterion 8: protocol statistics ----------------------------------------------------------


def test_criterion_8_protocol_statistics():
    t0 = time.monotonic()
    trials = 10000
    caps = gates.Caps()
    all_stats = []
    for name in ("flux_c3", "flux_c2", "qubit_dual", "plus_prep", "xi_prep",
                 "signflip_N1", "signflip_N11", "signflip_N35"):
        all_stats.extend(cli.PROTOCOLS[name](trials, 8080, caps))
    elapsed = time.monotonic() - t0
    bad = [s for s in all_stats if not s["within_3_sigma"]]
    analytic_ok = (
        abs(next(s for s in all_stats if "4 rounds" in s["label"])["analytic"]
            - 0.25 ** 4) < 1e-12
        and 0.25 ** 4 < 0.005
        and (1 / 9) ** 3 < 0.01
        and 1 - (1 / 3) ** 5 >= 0.99
        and gates.sign_flip_success_probability(35) >= 0.99
    )
    _report("8 protocol statistics", not bad and analytic_ok and elapsed < 300.0,
            f"{len(all_stats)} stats within 3 sigma in {elapsed:.0f}s")


# --- criterion 9: charge transfer law -------------------------------------------------------------


def test_criterion_9_charge_transfer():
    ok = True
    for irrep in group.S3_IRREPS:
        for cls in group.CLASSES:
            dim = irrep.dim
            pair = anyon.AnyonState((anyon.charge_particle(irrep),) * 2)
            for i in range(dim):
                pair.amp[(i, i)] = 1 / math.sqrt(dim)
            wound = anyon.wind_flux_around_charge(cls.representative, pair, 0)
            overlap = sum(wound.amp.get((i, i), 0j) for i in range(dim)) / math.sqrt(dim)
            sim = abs(overlap) ** 2
            if abs(sim - anyon.charge_transfer_prob(irrep, cls)) > 1e-12:
                ok = False
    _report("9 charge transfer law", ok,
            "|chi(a)/dim|^2 matches the simulated winding for all 9 pairs")


# --- criterion 10: fusion table --------------------------------------------------------------------


def test_criterion_10_fusion_consistency():
    ok = True
    for a in group.ANYON_TYPES:
        for b in group.ANYON_TYPES:
            outs = anyon.fuse(a, b)
            if anyon.fuse(b, a) != outs:
                ok = False
            if a.qdim * b.qdim != sum(c.qdim for c in outs):
                ok = False
    total = sum(t.qdim ** 2 for t in group.ANYON_TYPES)
    _report("10 fusion table", ok and total == 36,
            f"36 ordered pairs consistent, sum d^2 = {total}")
