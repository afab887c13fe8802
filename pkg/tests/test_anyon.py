"""Anyon-level model: fusion, basis change, winding channels, measurements."""

import json
import math

import numpy as np
import pytest

from s3qd import anyon, group
from s3qd.anyon import (AnyonState, FLUX_LABELS, charge_particle, compare_computational,
                        compare_dual, comparison_verdict, charge_transfer_prob,
                        dual_state, flux_particle, fuse, measure_computational,
                        measure_flux_channel, micro_to_anyon, anyon_to_micro,
                        probe_fusion_amplitudes, sector_matrix, wind_flux_around_charge,
                        wind_flux_around_fluxes)
from s3qd.group import ALL_ELEMENTS, E, MU, MUBAR, MUBARSIGMA, MUSIGMA, OMEGA, SIGMA, mul, inv

rng = np.random.Generator(np.random.Philox(11))


# --- fusion table ------------------------------------------------------------------


def test_vacuum_fusion_is_identity():
    A = group.anyon_type("A")
    for x in group.ANYON_TYPES:
        assert fuse(A, x) == (x,)


def test_specific_fusion_entries():
    C = group.anyon_type("C")
    D = group.anyon_type("D")
    assert {t.letter for t in fuse(C, C)} == {"A", "B", "C"}
    assert {t.letter for t in fuse(D, D)} == {"A", "C", "F", "G", "H"}
    assert D.qdim * D.qdim == sum(t.qdim for t in fuse(D, D))
    assert 3 * 3 == 1 + 2 + 2 + 2 + 2


def test_fusion_symmetric_and_dimension_consistent_all_pairs():
    for a in group.ANYON_TYPES:
        for b in group.ANYON_TYPES:
            outs = fuse(a, b)
            assert fuse(b, a) == outs
            assert a.qdim * b.qdim == sum(c.qdim for c in outs)
    assert sum(t.qdim ** 2 for t in group.ANYON_TYPES) == 36


# --- basis change ------------------------------------------------------------------


def test_printed_c3_states():
    s3 = 1 / math.sqrt(3)
    got = anyon_to_micro(group.CLASS_C3, MU, {"C3:[1]:u:1:u:1": 1.0})
    assert got.keys() == {E, MU, MUBAR}
    assert all(abs(v - s3) < 1e-12 for v in got.values())

    got = anyon_to_micro(group.CLASS_C3, MU, {"C3:[w]:u:1:u:1": 1.0})
    assert abs(got[E] - s3) < 1e-12
    assert abs(got[MU] - OMEGA * s3) < 1e-12
    assert abs(got[MUBAR] - OMEGA.conjugate() * s3) < 1e-12

    # the flavor-Ubar states live on the 2-cycle z values
    got = anyon_to_micro(group.CLASS_C3, MU, {"C3:[1]:U:1:u:1": 1.0})
    assert got.keys() == {SIGMA, MUSIGMA, MUBARSIGMA}
    assert all(abs(v - s3) < 1e-12 for v in got.values())

    got = anyon_to_micro(group.CLASS_C3, MUBAR, {"C3:[1]:u:1:U:1": 1.0})
    assert got.keys() == {SIGMA, MUSIGMA, MUBARSIGMA}
    assert all(abs(v - s3) < 1e-12 for v in got.values())


def test_sector_matrices_unitary():
    for cls in group.CLASSES:
        for w in cls.members:
            M, names = sector_matrix(cls, w)
            assert M.shape == (6, 6)
            assert np.abs(M @ M.conj().T - np.eye(6)).max() < 1e-12


def test_micro_anyon_round_trip_random_vectors():
    for cls in group.CLASSES:
        for w in cls.members:
            vec = rng.normal(size=6) + 1j * rng.normal(size=6)
            vec /= np.linalg.norm(vec)
            micro = {z: complex(vec[z]) for z in ALL_ELEMENTS}
            back = anyon_to_micro(cls, w, micro_to_anyon(cls, w, micro))
            assert all(abs(back.get(z, 0) - micro[z]) < 1e-12 for z in ALL_ELEMENTS)


def test_micro_to_anyon_rejects_wrong_sector():
    with pytest.raises(ValueError):
        anyon.sector_matrix(group.CLASS_C3, SIGMA)


# --- charge transfer law -------------------------------------------------------------


def test_charge_transfer_closed_form_values():
    assert charge_transfer_prob(group.STANDARD, group.CLASS_C3) == pytest.approx(0.25)
    assert charge_transfer_prob(group.STANDARD, group.CLASS_C2) == pytest.approx(0.0)
    for irrep in group.S3_IRREPS:
        assert charge_transfer_prob(irrep, group.CLASS_C1) == pytest.approx(1.0)
    assert charge_transfer_prob(group.SIGN, group.CLASS_C2) == pytest.approx(1.0)


def _simulated_vacuum_probability(irrep, cls):
    """Wind a class representative around half an irrep singlet and fuse."""
    dim = irrep.dim
    pair = AnyonState((charge_particle(irrep), charge_particle(irrep)))
    for i in range(dim):
        pair.amp[(i, i)] = 1 / math.sqrt(dim)
    wound = wind_flux_around_charge(cls.representative, pair, 0)
    overlap = sum(wound.amp.get((i, i), 0j) for i in range(dim)) / math.sqrt(dim)
    return abs(overlap) ** 2


def test_charge_transfer_matches_simulated_winding_all_pairs():
    for irrep in group.S3_IRREPS:
        for cls in group.CLASSES:
            sim = _simulated_vacuum_probability(irrep, cls)
            assert sim == pytest.approx(charge_transfer_prob(irrep, cls), abs=1e-12)


# --- winding ----------------------------------------------------------------------


def _single_charge(component):
    st = AnyonState((charge_particle(group.STANDARD),))
    st.amp[(component,)] = 1.0
    return st


def test_winding_phases_on_standard_charge():
    st = wind_flux_around_charge(MU, _single_charge(0), 0)
    assert st.amp[(0,)] == pytest.approx(OMEGA)
    st = wind_flux_around_charge(SIGMA, _single_charge(0), 0)
    assert st.amp[(1,)] == pytest.approx(1.0)
    st = wind_flux_around_charge(SIGMA, _single_charge(1), 0)
    assert st.amp[(0,)] == pytest.approx(1.0)
    st = wind_flux_around_charge(E, _single_charge(1), 0)
    assert st.amp[(1,)] == pytest.approx(1.0)
    # the dual-comparison phases: us|2+> = w*|2->, Us|2+> = w|2->
    st = wind_flux_around_charge(MUSIGMA, _single_charge(0), 0)
    assert st.amp[(1,)] == pytest.approx(OMEGA.conjugate())
    st = wind_flux_around_charge(MUBARSIGMA, _single_charge(0), 0)
    assert st.amp[(1,)] == pytest.approx(OMEGA)


def test_charge_singlet_global_invariance():
    # the section-2.6 singlet: invariant under a global group action
    pair = AnyonState((charge_particle(group.STANDARD), charge_particle(group.STANDARD)),
                      {(0, 1): 1 / math.sqrt(2), (1, 0): 1 / math.sqrt(2)})
    for g in ALL_ELEMENTS:
        out = wind_flux_around_charge(g, wind_flux_around_charge(g, pair, 0), 1)
        diff = max(abs(out.amp.get(k, 0j) - pair.amp.get(k, 0j))
                   for k in set(out.amp) | set(pair.amp))
        assert diff < 1e-12


def test_pull_through_from_flux_winding():
    # winding one flux of pair 1 around both of pair 2 conjugates pair 2 by
    # the pair-1 label and reproduces U|a,b> = |a, -a-b>
    for a in range(3):
        for b in range(3):
            st = AnyonState(tuple(flux_particle(group.CLASS_C2) for _ in range(4)))
            st.amp[(FLUX_LABELS[a], FLUX_LABELS[a], FLUX_LABELS[b], FLUX_LABELS[b])] = 1.0
            out = wind_flux_around_fluxes(st, 0, [2, 3])
            (labels,) = out.amp
            want = FLUX_LABELS[(-a - b) % 3]
            assert labels == (FLUX_LABELS[a], FLUX_LABELS[a], want, want)


def test_wind_flux_preserves_class_invariant():
    st = AnyonState((flux_particle(group.CLASS_C2), flux_particle(group.CLASS_C3)))
    st.amp[(SIGMA, MU)] = 1.0
    out = wind_flux_around_fluxes(st, 0, [1])
    for labels in out.amp:
        assert labels[0] in group.CLASS_C2
        assert labels[1] in group.CLASS_C3
    out.check()


# --- probe channel ------------------------------------------------------------------


def test_probe_fusion_amplitudes_follow_characters():
    for w in ALL_ELEMENTS:
        amps = probe_fusion_amplitudes(w)
        chi = group.STANDARD.character(w)
        assert amps["vacuum"] == pytest.approx(chi / 2)
        total = sum(abs(a) ** 2 for a in amps.values())
        assert total == pytest.approx(1.0)
    c3 = probe_fusion_amplitudes(MU)
    assert abs(c3["vacuum"]) ** 2 == pytest.approx(0.25)
    assert abs(c3["minus"]) ** 2 == pytest.approx(0.75)
    c2 = probe_fusion_amplitudes(SIGMA)
    assert c2["vacuum"] == pytest.approx(0.0)
    assert c2["minus"] == pytest.approx(0.0)
    assert abs(c2["two_plus"]) ** 2 == pytest.approx(0.5)
    assert abs(c2["two_minus"]) ** 2 == pytest.approx(0.5)


def test_flux_channel_trivial_flux_always_vacuum():
    st = AnyonState((flux_particle(group.CLASS_C2),) * 2)
    st.amp[(SIGMA, SIGMA)] = 1.0
    outcomes, post, records = measure_flux_channel(
        st, [0, 1], np.random.Generator(np.random.Philox(5)), rounds=6)
    assert outcomes == ["vacuum"] * 6
    assert all(r.p == pytest.approx(1.0) for r in records)


def test_flux_channel_c3_statistics():
    vac = 0
    trials = 3000
    for t in range(trials):
        st = AnyonState((flux_particle(group.CLASS_C3),), {(MU,): 1.0})
        outcomes, _, _ = measure_flux_channel(
            st, [0], np.random.Generator(np.random.Philox(key=77, counter=t)), rounds=1)
        vac += outcomes[0] == "vacuum"
    assert abs(vac / trials - 0.25) < 3 * math.sqrt(0.25 * 0.75 / trials)


def test_flux_channel_c2_remnant_split():
    seen = {"two_plus": 0, "two_minus": 0}
    trials = 3000
    for t in range(trials):
        st = AnyonState((flux_particle(group.CLASS_C2),), {(SIGMA,): 1.0})
        outcomes, _, _ = measure_flux_channel(
            st, [0], np.random.Generator(np.random.Philox(key=78, counter=t)), rounds=1)
        assert outcomes[0] in seen
        seen[outcomes[0]] += 1
    assert abs(seen["two_plus"] / trials - 0.5) < 3 * math.sqrt(0.25 / trials)


def test_measurement_records_serialize():
    st = AnyonState((flux_particle(group.CLASS_C3),), {(MU,): 1.0})
    _, _, records = measure_flux_channel(
        st, [0], np.random.Generator(np.random.Philox(9)), rounds=3)
    payload = json.dumps([r.as_dict() for r in records])
    back = json.loads(payload)
    assert {"round", "probe", "outcome", "p"} == set(back[0])


# --- computational measurement --------------------------------------------------------


def test_measure_computational_exact_basis_state():
    for a in range(3):
        vec = np.zeros(3, dtype=complex)
        vec[a] = 1.0
        outcome, post, _ = measure_computational(vec, np.random.Generator(
            np.random.Philox(1)), mode="exact")
        assert outcome == a
        assert abs(post[a]) == pytest.approx(1.0)


@pytest.mark.parametrize("mode", ["exact", "sampled"])
def test_measure_computational_superposition_statistics(mode):
    counts = [0, 0, 0]
    trials = 1500
    vec = np.array([1, 1, 0], dtype=complex) / math.sqrt(2)
    for t in range(trials):
        outcome, post, _ = measure_computational(
            vec, np.random.Generator(np.random.Philox(key=31, counter=t)), mode=mode)
        counts[outcome] += 1
        assert abs(abs(post[outcome]) - 1.0) < 1e-9
    assert counts[2] == 0
    assert abs(counts[0] / trials - 0.5) < 3 * math.sqrt(0.25 / trials)


def test_measure_computational_sampled_records_minus_pattern():
    vec = np.array([0, 1, 0], dtype=complex)
    outcome, _, records = measure_computational(
        vec, np.random.Generator(np.random.Philox(3)), mode="sampled")
    assert outcome == 1
    minus_refs = {r.probe for r in records if r.outcome == "minus"}
    assert minus_refs == {"ref0", "ref2"}


def test_comparison_false_negative_rate():
    # a pure |0> compared against |1>: one winding round returns vacuum with
    # probability exactly 1/4
    vec = np.array([1, 0, 0], dtype=complex)
    vac = 0
    trials = 3000
    for t in range(trials):
        outcome, p, _ = compare_computational(
            vec, 1, np.random.Generator(np.random.Philox(key=13, counter=t)))
        if outcome == "vacuum":
            vac += 1
            assert p == pytest.approx(0.25)
    assert abs(vac / trials - 0.25) < 3 * math.sqrt(0.25 * 0.75 / trials)


def test_comparison_verdict_modes():
    vec = dual_state(0)
    # exact mode: "different" projects out the reference component cleanly
    same, post, _ = comparison_verdict(vec, 2, np.random.Generator(np.random.Philox(8)),
                                       mode="exact")
    if not same:
        assert np.allclose(post, np.array([1, 1, 0]) / math.sqrt(2), atol=1e-12)
    # sampled mode: a "different" verdict ends in the clean projection up to
    # a global sign from the intervening vacuum rounds
    for t in range(50):
        g = np.random.Generator(np.random.Philox(key=21, counter=t))
        same, post, recs = comparison_verdict(vec, 2, g, mode="sampled", n_rounds=4)
        if not same:
            want = np.array([1, 1, 0]) / math.sqrt(2)
            assert abs(abs(np.vdot(want, post)) - 1.0) < 1e-9
        else:
            assert abs(abs(post[2]) - 1.0) < 0.2      # reweighted toward |2>


def test_inconclusive_raises_after_cap():
    vec = np.array([0, 1, 0], dtype=complex)
    with pytest.raises(anyon.Inconclusive):
        # cap of 1 comparison can never see two distinct minus results
        measure_computational(vec, np.random.Generator(np.random.Philox(4)),
                              mode="sampled", cap=1)


# --- dual comparison --------------------------------------------------------------------


def test_compare_dual_no_false_negative():
    for which in range(3):
        vec = dual_state(which)
        for t in range(20):
            yes, post, _ = compare_dual(vec, which,
                                        np.random.Generator(np.random.Philox(key=41, counter=t)))
            assert yes
            assert abs(abs(np.vdot(dual_state(which), post)) - 1) < 1e-12


def test_compare_dual_projects_coherently():
    vec = np.array([1, 0, 0], dtype=complex)       # |0> has overlap 1/3 with each dual
    yes_count = 0
    trials = 3000
    for t in range(trials):
        g = np.random.Generator(np.random.Philox(key=43, counter=t))
        yes, post, _ = compare_dual(vec, 0, g)
        if yes:
            yes_count += 1
        else:
            # coherent projection onto the complement of |0~>
            want = vec - dual_state(0) * (dual_state(0).conj() @ vec)
            want = want / np.linalg.norm(want)
            assert np.allclose(post, want, atol=1e-12)
    assert abs(yes_count / trials - 1 / 3) < 3 * math.sqrt((1 / 3) * (2 / 3) / trials)


def test_dual_projection_probability():
    assert anyon.dual_projection_probability(np.array([1, 0, 0]), 0) == pytest.approx(1 / 3)
    assert anyon.dual_projection_probability(dual_state(1), 1) == pytest.approx(1.0)
    assert anyon.dual_projection_probability(dual_state(1), 0) == pytest.approx(0.0, abs=1e-12)


def test_dual_basis_is_clock_eigenbasis():
    # the dual states as printed are shift eigenstates with eigenvalue
    # w^-k (the conjugate labeling), and the clock gate cycles them
    w = OMEGA
    Z = np.diag([1, w, w ** 2])
    X = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        X[(i + 1) % 3, i] = 1
    for k in range(3):
        v = dual_state(k)
        assert np.allclose(X @ v, (w ** (-k)) * v, atol=1e-12)
        assert np.allclose(Z @ v, dual_state((k + 1) % 3), atol=1e-12)
