"""Anyon-level model: fusion rules, basis change, winding and measurement channels.

Logical qutrits are pairs of C2 fluxes with equal internal labels; the
computational basis is (s, us, Us) for 0, 1, 2 and the dual basis is its
discrete Fourier transform.  Measurement is modelled by the charge-probe
channel: a [2]-charge singlet is wound around the group of fluxes under
test and fused, which multiplies each basis branch by an amplitude fixed
by the total flux of that branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from s3qd import group
from s3qd.group import GroupElement, Irrep, inv, mul

OMEGA = group.OMEGA

# computational flux labels: |a> is the flux pair (FLUX_LABELS[a], FLUX_LABELS[a])
FLUX_LABELS: Tuple[GroupElement, ...] = (group.SIGMA, group.MUSIGMA, group.MUBARSIGMA)

# DUAL_BASIS[w] is the component vector of |w~> in the computational basis
DUAL_BASIS = np.array([
    [1, 1, 1],
    [1, OMEGA, OMEGA.conjugate()],
    [1, OMEGA.conjugate(), OMEGA],
], dtype=complex) / math.sqrt(3)


def dual_state(which: int) -> np.ndarray:
    return DUAL_BASIS[which].copy()


# --- fusion -------------------------------------------------------------------

_FUSION_UPPER = {
    ("A", "A"): "A", ("A", "B"): "B", ("A", "C"): "C", ("A", "D"): "D",
    ("A", "E"): "E", ("A", "F"): "F", ("A", "G"): "G", ("A", "H"): "H",
    ("B", "B"): "A", ("B", "C"): "C", ("B", "D"): "E", ("B", "E"): "D",
    ("B", "F"): "F", ("B", "G"): "G", ("B", "H"): "H",
    ("C", "C"): "ABC", ("C", "D"): "DE", ("C", "E"): "DE",
    ("C", "F"): "GH", ("C", "G"): "FH", ("C", "H"): "FG",
    ("D", "D"): "ACFGH", ("D", "E"): "BCFGH", ("D", "F"): "DE",
    ("D", "G"): "DE", ("D", "H"): "DE",
    ("E", "E"): "ACFGH", ("E", "F"): "DE", ("E", "G"): "DE", ("E", "H"): "DE",
    ("F", "F"): "ABF", ("F", "G"): "CH", ("F", "H"): "CG",
    ("G", "G"): "ABG", ("G", "H"): "CF",
    ("H", "H"): "ABH",
}

FUSION_TABLE: Dict[Tuple[str, str], Tuple[str, ...]] = {}
for (_a, _b), _out in _FUSION_UPPER.items():
    FUSION_TABLE[(_a, _b)] = tuple(_out)
    FUSION_TABLE[(_b, _a)] = tuple(_out)


def fuse(a: group.AnyonType, b: group.AnyonType) -> Tuple[group.AnyonType, ...]:
    return tuple(group.anyon_type(x) for x in FUSION_TABLE[(a.letter, b.letter)])


# --- micro <-> anyon basis change ----------------------------------------------


def sector_matrix(cls: group.ConjugacyClass, w: GroupElement
                  ) -> Tuple[np.ndarray, List[str]]:
    """Unitary matrix of the micro -> anyon basis change in a (class, w) sector.

    Micro states are |z, w> with z running over all six group elements
    (columns in element-id order); anyon rows are labelled
    class:irrep:c:j:w:j' with c the flavor flux fixed by z.  Row
    (c, R, j, j') has entries sqrt(|R| / |Z(r)|) Gamma^R_{jj'}(n) at
    z = q_c n q_w^-1, which makes the rows orthonormal.
    """
    if w not in cls:
        raise ValueError("sector flux must lie in the class")
    r = cls.representative
    cent = group.centralizer(r)
    q_w_i = inv(group.q_rep(w, r))
    rows, names = [], []
    for c in cls.members:
        q_c = group.q_rep(c, r)
        for irrep in group.centralizer_irreps(cls):
            scale = math.sqrt(irrep.dim / len(cent))
            for j in range(1, irrep.dim + 1):
                for jp in range(1, irrep.dim + 1):
                    row = np.zeros(6, dtype=complex)
                    for n in cent:
                        z = mul(mul(q_c, n), q_w_i)
                        row[z] = scale * irrep.matrix(n)[j - 1, jp - 1]
                    rows.append(row)
                    names.append(f"{cls.label}:{irrep.label}:{group.element_name(c)}:{j}:"
                                 f"{group.element_name(w)}:{jp}")
    return np.array(rows), names


def micro_to_anyon(cls: group.ConjugacyClass, w: GroupElement,
                   micro: Dict[GroupElement, complex]) -> Dict[str, complex]:
    """Amplitudes over z -> amplitudes over anyon labels in the (class, w) sector."""
    vec = np.zeros(6, dtype=complex)
    for z, a in micro.items():
        if mul(mul(z, w), inv(z)) not in cls:
            raise ValueError("micro amplitude outside the requested flux-class sector")
        vec[z] = a
    M, names = sector_matrix(cls, w)
    out = M.conj() @ vec
    return {name: complex(x) for name, x in zip(names, out) if abs(x) > 1e-15}


def anyon_to_micro(cls: group.ConjugacyClass, w: GroupElement,
                   anyon: Dict[str, complex]) -> Dict[GroupElement, complex]:
    M, names = sector_matrix(cls, w)
    vec = np.zeros(len(names), dtype=complex)
    for name, a in anyon.items():
        vec[names.index(name)] = a
    out = M.T @ vec
    return {z: complex(x) for z, x in enumerate(out) if abs(x) > 1e-15}


# --- charge transfer -------------------------------------------------------------


def charge_transfer_prob(irrep: Irrep, cls: group.ConjugacyClass) -> float:
    """Probability that an irrep singlet survives the winding flux: |chi(a)/dim|^2."""
    chi = irrep.character(cls.representative)
    return abs(chi / irrep.dim) ** 2


_STD = group.STANDARD

# probe pair basis: |++>, |+->, |-+>, |--> of two [2] charges
_PROBE_SINGLET = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)
_PROBE_MINUS = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
_PROBE_PP = np.array([1, 0, 0, 0], dtype=complex)
_PROBE_MM = np.array([0, 0, 0, 1], dtype=complex)

# fusion outcomes of the probe pair after winding; the [2] remnant keeps an
# internal index (|++> picks up w^2 under a global 3-cycle like |2->)
PROBE_OUTCOMES = ("vacuum", "minus", "two_minus", "two_plus")


def probe_fusion_amplitudes(w: GroupElement) -> Dict[str, complex]:
    """Fusion amplitudes of a [2]-charge singlet after winding one half around flux w."""
    wound = np.kron(_STD.matrix(w), np.eye(2)) @ _PROBE_SINGLET
    return {
        "vacuum": complex(_PROBE_SINGLET.conj() @ wound),
        "minus": complex(_PROBE_MINUS.conj() @ wound),
        "two_minus": complex(_PROBE_PP.conj() @ wound),
        "two_plus": complex(_PROBE_MM.conj() @ wound),
    }


# --- anyon states -----------------------------------------------------------------


@dataclass(frozen=True)
class Particle:
    """One anyon slot: a flux with class-valued labels or a charge with components."""

    kind: str                               # "flux" or "charge"
    flux_class: Optional[group.ConjugacyClass] = None
    irrep: Optional[Irrep] = None

    def label_ok(self, label) -> bool:
        if self.kind == "flux":
            return label in self.flux_class
        return 0 <= label < self.irrep.dim


def flux_particle(cls: group.ConjugacyClass) -> Particle:
    return Particle("flux", flux_class=cls)


def charge_particle(irrep: Irrep) -> Particle:
    return Particle("charge", irrep=irrep)


@dataclass
class AnyonState:
    particles: Tuple[Particle, ...]
    amp: Dict[Tuple, complex] = field(default_factory=dict)

    def check(self) -> "AnyonState":
        for labels in self.amp:
            if len(labels) != len(self.particles):
                raise ValueError("label tuple length mismatch")
            for particle, label in zip(self.particles, labels):
                if not particle.label_ok(label):
                    raise ValueError(f"label {label!r} invalid for a {particle.kind} slot")
        return self

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amp.values()))

    def normalized(self) -> "AnyonState":
        n = self.norm()
        return AnyonState(self.particles, {k: v / n for k, v in self.amp.items()})

    def prune(self, eps: float = 1e-12) -> "AnyonState":
        self.amp = {k: v for k, v in self.amp.items() if abs(v) >= eps}
        return self


def wind_flux_around_charge(w: GroupElement, state: AnyonState,
                            charge_index: int) -> AnyonState:
    """Transport flux w in a closed loop around one charge: apply Gamma^R(w)."""
    particle = state.particles[charge_index]
    if particle.kind != "charge":
        raise ValueError("target particle is not a charge")
    mat = particle.irrep.matrix(w)
    amp: Dict[Tuple, complex] = {}
    for labels, a in state.amp.items():
        j = labels[charge_index]
        for jp in range(particle.irrep.dim):
            coeff = mat[jp, j]
            if coeff == 0:
                continue
            new = labels[:charge_index] + (jp,) + labels[charge_index + 1:]
            amp[new] = amp.get(new, 0j) + coeff * a
    return AnyonState(state.particles, amp).prune()


def wind_flux_around_fluxes(state: AnyonState, winder: int,
                            targets: Sequence[int]) -> AnyonState:
    """Wind the flux at slot `winder` once around the flux slots in `targets`.

    All participating fluxes are conjugated by the total flux of the winding
    process: the enclosed labels by the winder label, the winder by the
    total flux of winder and enclosed slots together.
    """
    amp: Dict[Tuple, complex] = {}
    for labels, a in state.amp.items():
        w = labels[winder]
        new = list(labels)
        total = group.E
        for t in targets:
            total = mul(total, labels[t])
            new[t] = mul(mul(w, labels[t]), inv(w))
        overall = mul(w, total)
        new[winder] = mul(mul(overall, w), inv(overall))
        key = tuple(new)
        amp[key] = amp.get(key, 0j) + a
    return AnyonState(state.particles, amp).prune()


# --- measurement channels ----------------------------------------------------------


@dataclass(frozen=True)
class MeasurementEvent:
    round: int
    probe: str
    outcome: str
    p: float

    def as_dict(self) -> dict:
        return {"round": self.round, "probe": self.probe, "outcome": self.outcome, "p": self.p}


class Inconclusive(Exception):
    """A repeat-until-success loop ran out of its round cap."""

    def __init__(self, message: str, records: List[MeasurementEvent]):
        super().__init__(message)
        self.records = records


def measure_flux_channel(state: AnyonState, flux_indices: Sequence[int],
                         rng: np.random.Generator, rounds: int = 1,
                         probe_name: str = "flux-probe"
                         ) -> Tuple[List[str], AnyonState, List[MeasurementEvent]]:
    """Wind a [2]-charge singlet around the given fluxes and fuse, `rounds` times.

    Every basis branch is multiplied by the fusion amplitude of its total
    flux; outcomes are drawn from the exact branch norms.  Returns the
    outcome stream, the post-measurement state and the event records.
    """
    outcomes: List[str] = []
    records: List[MeasurementEvent] = []
    current = state
    for k in range(rounds):
        branch: Dict[str, Dict[Tuple, complex]] = {o: {} for o in PROBE_OUTCOMES}
        for labels, a in current.amp.items():
            total = group.E
            for t in flux_indices:
                total = mul(total, labels[t])
            for outcome, m in probe_fusion_amplitudes(total).items():
                if m == 0:
                    continue
                branch[outcome][labels] = branch[outcome].get(labels, 0j) + m * a
        probs = {o: sum(abs(x) ** 2 for x in b.values()) for o, b in branch.items()}
        total_p = sum(probs.values())
        pick = rng.random() * total_p
        acc = 0.0
        outcome = PROBE_OUTCOMES[-1]
        for o in PROBE_OUTCOMES:
            acc += probs[o]
            if pick <= acc:
                outcome = o
                break
        current = AnyonState(current.particles, branch[outcome]).normalized()
        outcomes.append(outcome)
        records.append(MeasurementEvent(k, probe_name, outcome, probs[outcome] / total_p))
    return outcomes, current, records


# comparison channel for computational qutrits ------------------------------------


def comparison_multipliers(ref: int) -> Dict[str, np.ndarray]:
    """Amplitude multipliers for one winding round comparing a qutrit with |ref>.

    The compared total flux of branch a against reference b is the 3-cycle
    power mu^(a-b); its probe fusion amplitudes reduce to 1 or -1/2
    ("vacuum") and 0 or +-i sqrt(3)/2 ("minus").
    """
    vac = np.empty(3, dtype=complex)
    minus = np.empty(3, dtype=complex)
    for a in range(3):
        w = mul(FLUX_LABELS[a], FLUX_LABELS[ref])
        amps = probe_fusion_amplitudes(w)
        vac[a] = amps["vacuum"]
        minus[a] = amps["minus"]
    return {"vacuum": vac, "minus": minus}


def compare_computational(amp: np.ndarray, ref: int, rng: np.random.Generator
                          ) -> Tuple[str, float, np.ndarray]:
    """One winding round of the flux comparison of a qutrit against |ref>."""
    mults = comparison_multipliers(ref)
    branches = {o: m * amp for o, m in mults.items()}
    probs = {o: float(np.sum(np.abs(b) ** 2)) for o, b in branches.items()}
    total = probs["vacuum"] + probs["minus"]
    outcome = "vacuum" if rng.random() * total <= probs["vacuum"] else "minus"
    post = branches[outcome]
    return outcome, probs[outcome] / total, post / np.linalg.norm(post)


def measure_computational(amp: np.ndarray, rng: np.random.Generator,
                          mode: str = "exact", cap: int = 64
                          ) -> Tuple[int, np.ndarray, List[MeasurementEvent]]:
    """Projective computational-basis measurement of one qutrit.

    exact mode: ideal projection with Born probabilities.  sampled mode:
    the reference-comparison protocol, one winding round per comparison,
    concluding once two of the three reference states have produced a
    "minus" remnant; the measured state is then the third one.  Raises
    Inconclusive when the comparison cap runs out.
    """
    amp = np.asarray(amp, dtype=complex)
    records: List[MeasurementEvent] = []
    if mode == "exact":
        probs = np.abs(amp) ** 2
        probs = probs / probs.sum()
        outcome = int(rng.choice(3, p=probs))
        post = np.zeros(3, dtype=complex)
        post[outcome] = 1.0
        records.append(MeasurementEvent(0, "projective", str(outcome), float(probs[outcome])))
        return outcome, post, records
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    minus_seen: Dict[int, int] = {}
    current = amp / np.linalg.norm(amp)
    for k in range(cap):
        candidates = [b for b in range(3) if b not in minus_seen]
        ref = candidates[k % len(candidates)]
        outcome, p, current = compare_computational(current, ref, rng)
        records.append(MeasurementEvent(k, f"ref{ref}", outcome, p))
        if outcome == "minus":
            minus_seen[ref] = minus_seen.get(ref, 0) + 1
            if len(minus_seen) == 2:
                winner = next(b for b in range(3) if b not in minus_seen)
                post = np.zeros(3, dtype=complex)
                post[winner] = 1.0
                return winner, post, records
    raise Inconclusive("computational measurement exceeded its comparison cap", records)


def comparison_verdict(amp: np.ndarray, ref: int, rng: np.random.Generator,
                       mode: str = "exact", n_rounds: int = 4
                       ) -> Tuple[bool, np.ndarray, List[MeasurementEvent]]:
    """Decide whether a qutrit equals |ref>, destructively.

    exact mode is the ideal projective element {|ref><ref|, 1 - |ref><ref|}.
    sampled mode runs winding rounds: any "minus" decides "different" (and
    projects the ref component out exactly); n_rounds vacuums in a row
    declare "same" with residual error (1/4)^n_rounds on a genuinely
    different state.  Returns (same?, post state, records).
    """
    amp = np.asarray(amp, dtype=complex)
    if mode == "exact":
        p_same = float(abs(amp[ref]) ** 2 / (np.abs(amp) ** 2).sum())
        same = bool(rng.random() <= p_same)
        if same:
            post = np.zeros(3, dtype=complex)
            post[ref] = 1.0
        else:
            post = amp.copy()
            post[ref] = 0.0
            post = post / np.linalg.norm(post)
        return same, post, [MeasurementEvent(0, f"ref{ref}", "yes" if same else "no",
                                             p_same if same else 1.0 - p_same)]
    records: List[MeasurementEvent] = []
    current = amp / np.linalg.norm(amp)
    for k in range(n_rounds):
        outcome, p, current = compare_computational(current, ref, rng)
        records.append(MeasurementEvent(k, f"ref{ref}", outcome, p))
        if outcome == "minus":
            # the remnant is announced, so its branch phases are known and
            # can be corrected away, leaving the clean projector complement
            mults = comparison_multipliers(ref)["minus"]
            fix = np.array([abs(m) / m if m != 0 else 0.0 for m in mults], dtype=complex)
            current = current * fix
            current = current / np.linalg.norm(current)
            return False, current, records
    return True, current, records


def compare_dual(amp: np.ndarray, which: int, rng: np.random.Generator
                 ) -> Tuple[bool, np.ndarray, MeasurementEvent]:
    """Compare a qutrit with the dual state |which~> by winding a C2 singlet.

    There is no false negative: "yes" projects onto the dual state, "no"
    projects coherently onto its orthogonal complement.  Comparisons with
    |1~> and |2~> conjugate the |0~> comparison by powers of the clock
    gate, which permutes the dual basis.
    """
    amp = np.asarray(amp, dtype=complex)
    target = dual_state(which)
    overlap = complex(target.conj() @ amp)
    p_yes = float(abs(overlap) ** 2 / (np.abs(amp) ** 2).sum())
    yes = bool(rng.random() <= p_yes)
    if yes:
        post = target * (overlap / abs(overlap) if abs(overlap) > 0 else 1.0)
    else:
        post = amp - target * overlap
    post = post / np.linalg.norm(post)
    event = MeasurementEvent(0, f"dual{which}", "yes" if yes else "no",
                             p_yes if yes else 1.0 - p_yes)
    return yes, post, event


def dual_projection_probability(amp: np.ndarray, which: int) -> float:
    amp = np.asarray(amp, dtype=complex)
    target = dual_state(which)
    return float(abs(target.conj() @ amp) ** 2 / (np.abs(amp) ** 2).sum())
