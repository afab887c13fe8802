"""Universal qubit gate set over C2-flux qutrits.

Every gate is built from the primitive toolkit the anyon layer provides:
the pull-through two-qutrit gate, computational (flux) comparisons and
dual (charge) comparisons.  Ancillas are explicit: each gate takes what it
needs from a typed pool, runs its circuit, verifies the ancilla came back
disentangled in the declared state and returns or discards it.

Measurement channels come in two modes.  "exact" uses ideal projective
elements with Born probabilities; "sampled" runs the winding-round
protocols with their false-negative structure.  Either way the RUS
controllers repeat until the measurement record composes to the intended
gate, so the final unitary is exact whenever the controller reports
success.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from s3qd import anyon, group
from s3qd.anyon import MeasurementEvent, dual_state

OMEGA = group.OMEGA
SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)

KET = {
    "0": np.array([1, 0, 0], dtype=complex),
    "1": np.array([0, 1, 0], dtype=complex),
    "2": np.array([0, 0, 1], dtype=complex),
    "plus": np.array([1, 1, 0], dtype=complex) / SQ2,
    "minus": np.array([1, -1, 0], dtype=complex) / SQ2,
    "dual0": dual_state(0),
    "dual1": dual_state(1),
    "dual2": dual_state(2),
    "xi": np.array([1, -1, 1], dtype=complex) / SQ3,
    "y_plus": np.array([(1 + 1j) / 2, -(1 - 1j) / 2, 0], dtype=complex),
    "y_minus": np.array([(1 + 1j) / 2, (1 - 1j) / 2, 0], dtype=complex),
}

POOL_KINDS = ("0", "1", "2", "plus", "dual0", "dual1", "dual2", "xi", "y_minus")


class AncillaError(RuntimeError):
    """The typed ancilla pool cannot supply a requested state."""


class LeakageError(ValueError):
    """A qubit-subspace gate was fed a state with |2> support."""


class CapExhausted(RuntimeError):
    """A repeat-until-success controller hit its repetition cap."""

    def __init__(self, message: str, result: "GateResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class GateResult:
    applied: str
    repetitions: int
    corrected: bool
    residual_error: float

    def as_dict(self) -> dict:
        return {"applied": self.applied, "repetitions": self.repetitions,
                "corrected": self.corrected, "residual_error": self.residual_error}


@dataclass(frozen=True)
class Caps:
    sign_flip: int = 101
    prepare: int = 64
    measure: int = 64
    qubit_x_steps: int = 3
    flux_rounds: int = 4


def sign_flip_success_probability(n: int) -> float:
    """Closed-form RUS success probability after n repetitions."""
    if n < 1:
        return 0.0
    return 1.0 - (2.0 / 3.0) * (7.0 / 9.0) ** ((n - 1) // 2)


# --- the register -------------------------------------------------------------


@dataclass
class LogicalRegister:
    """Ordered logical qutrits plus scratch ancilla slots and a typed pool."""

    n: int
    rng: np.random.Generator
    mode: str = "exact"
    caps: Caps = field(default_factory=Caps)
    tol: float = 1e-9

    def __post_init__(self):
        self.state = np.zeros((3,) * self.n, dtype=complex)
        self.state[(0,) * self.n] = 1.0
        self._slots: List = [("q", i) for i in range(self.n)]
        self.pool: Dict[str, int] = {}
        self.results: List[GateResult] = []
        self.records: List[MeasurementEvent] = []

    # -- initialization and bookkeeping --

    def set_state(self, vec: np.ndarray) -> None:
        vec = np.asarray(vec, dtype=complex)
        if vec.size != 3 ** self.n:
            raise ValueError("state vector size mismatch")
        self.state = vec.reshape((3,) * self.n) / np.linalg.norm(vec)
        self._slots = [("q", i) for i in range(self.n)]

    def set_basis(self, digits: Sequence[int]) -> None:
        vec = np.zeros((3,) * self.n, dtype=complex)
        vec[tuple(digits)] = 1.0
        self.state = vec
        self._slots = [("q", i) for i in range(self.n)]

    def vector(self) -> np.ndarray:
        order = [self._slots.index(("q", i)) for i in range(self.n)]
        return np.transpose(self.state, order).reshape(-1).copy()

    def stock(self, kind: str, count: int = 1) -> None:
        if kind not in POOL_KINDS:
            raise ValueError(f"unknown ancilla kind {kind!r}")
        self.pool[kind] = self.pool.get(kind, 0) + count

    def _take(self, kind: str) -> np.ndarray:
        if self.pool.get(kind, 0) < 1:
            raise AncillaError(f"ancilla pool has no |{kind}> state")
        self.pool[kind] -= 1
        return KET[kind].copy()

    def _give(self, kind: str) -> None:
        self.pool[kind] = self.pool.get(kind, 0) + 1

    # -- axis helpers --

    def _axis(self, slot) -> int:
        return self._slots.index(slot)

    def _qaxis(self, i: int) -> int:
        return self._axis(("q", i))

    def _append(self, vec: np.ndarray, slot) -> None:
        self.state = np.tensordot(self.state, vec, axes=0)
        self._slots.append(slot)

    def _apply_1(self, U: np.ndarray, axis: int) -> None:
        self.state = np.moveaxis(np.tensordot(U, self.state, axes=([1], [axis])), 0, axis)

    def _apply_mult(self, mult: np.ndarray, axis: int) -> None:
        shape = [1] * self.state.ndim
        shape[axis] = 3
        self.state = self.state * mult.reshape(shape)

    def _apply_2(self, U9: np.ndarray, ax_c: int, ax_t: int) -> None:
        U = U9.reshape(3, 3, 3, 3)     # (c', t', c, t)
        moved = np.tensordot(U, self.state, axes=([2, 3], [ax_c, ax_t]))
        # tensordot put (c', t') in front; move them home (ax_c < ax_t cases both fine)
        moved = np.moveaxis(moved, [0, 1], [ax_c, ax_t])
        self.state = moved

    def _contract(self, axis: int, vec: np.ndarray) -> None:
        self.state = np.tensordot(vec.conj(), self.state, axes=([0], [axis]))
        del self._slots[axis]

    def _project_out(self, slot, expected: str) -> None:
        """Verify the slot factorizes as |expected> and remove it."""
        axis = self._axis(slot)
        vec = KET[expected]
        rest = np.tensordot(vec.conj(), self.state, axes=([0], [axis]))
        rebuilt = np.moveaxis(np.tensordot(vec, rest, axes=0), 0, axis)
        err = np.linalg.norm(self.state - rebuilt)
        if err > self.tol:
            raise RuntimeError(
                f"ancilla {slot} not disentangled in |{expected}> (residual {err:.2e})"
            )
        self.state = rest
        del self._slots[axis]

    def _renormalize(self) -> None:
        self.state = self.state / np.linalg.norm(self.state)

    # -- primitive two-qutrit gate --

    def pull_through(self, i, j) -> None:
        """U|a,b> = |a, -a-b>, by winding one flux of pair i around pair j."""
        U = np.zeros((9, 9), dtype=complex)
        for a in range(3):
            for b in range(3):
                U[3 * a + ((-a - b) % 3), 3 * a + b] = 1.0
        self._apply_2(U, self._axis_of(i), self._axis_of(j))

    def _axis_of(self, handle) -> int:
        if isinstance(handle, int):
            return self._qaxis(handle)
        return self._axis(handle)

    # -- derived qutrit gates --

    def u_plus(self, i, j) -> None:
        """U+|a,b> = |a, b+a>; one |0> ancilla, returned in |0>."""
        anc = ("anc", len(self._slots), "u_plus")
        self._append(self._take("0"), anc)
        self.pull_through(i, j)
        self.pull_through(anc, j)
        self._project_out(anc, "0")
        self._give("0")

    def u_minus(self, i, j) -> None:
        """U-|a,b> = |a, b-a>; uses two |0> ancillas transiently (one inside U+)."""
        anc = ("anc", len(self._slots), "u_minus")
        self._append(self._take("0"), anc)
        self.pull_through(i, anc)
        self.u_plus(anc, j)
        self.pull_through(i, anc)
        self._project_out(anc, "0")
        self._give("0")

    def qutrit_z(self, i) -> None:
        """Clock gate |a> -> w^a |a> via U- onto a |1~> ancilla."""
        anc = ("anc", len(self._slots), "qutrit_z")
        self._append(self._take("dual1"), anc)
        self.u_minus(i, anc)
        self._project_out(anc, "dual1")
        self._give("dual1")

    def qutrit_shift(self, i) -> None:
        """Shift gate |a> -> |a+1>: U+ controlled by a |1> ancilla."""
        anc = ("anc", len(self._slots), "qutrit_shift")
        self._append(self._take("1"), anc)
        self.u_plus(anc, i)
        self._project_out(anc, "1")
        self._give("1")

    # -- measurements on register slots --

    def measure_computational(self, handle, consume: bool = True) -> int:
        """Projective computational measurement of one slot.

        sampled mode runs the reference-comparison loop with the winding
        channel; exact mode projects with Born probabilities.
        """
        axis = self._axis_of(handle)
        if self.mode == "exact":
            marg = self._axis_probs(axis)
            outcome = int(self.rng.choice(3, p=marg))
            self.records.append(MeasurementEvent(0, "projective", str(outcome),
                                                 float(marg[outcome])))
        else:
            outcome = self._measure_sampled(axis)
        vec = np.zeros(3, dtype=complex)
        vec[outcome] = 1.0
        if consume:
            self._contract(axis, vec)
        else:
            keep = np.zeros((3, 3), dtype=complex)
            keep[outcome, outcome] = 1.0
            self._apply_1(keep, axis)
        self._renormalize()
        return outcome

    def _axis_probs(self, axis: int) -> np.ndarray:
        moved = np.moveaxis(self.state, axis, 0).reshape(3, -1)
        marg = np.sum(np.abs(moved) ** 2, axis=1)
        return marg / marg.sum()

    def _measure_sampled(self, axis: int) -> int:
        minus_seen = set()
        for k in range(self.caps.measure):
            candidates = [b for b in range(3) if b not in minus_seen]
            ref = candidates[k % len(candidates)]
            outcome = self._comparison_round(axis, ref, k)
            if outcome == "minus":
                minus_seen.add(ref)
                if len(minus_seen) == 2:
                    return next(b for b in range(3) if b not in minus_seen)
        raise CapExhausted(
            "computational measurement exceeded its comparison cap",
            GateResult("measure", self.caps.measure, False, 1.0),
        )

    def _comparison_round(self, axis: int, ref: int, round_no: int) -> str:
        mults = anyon.comparison_multipliers(ref)
        norms = {}
        for o, m in mults.items():
            self_m = self._with_mult(axis, m)
            norms[o] = float(np.sum(np.abs(self_m) ** 2))
        total = norms["vacuum"] + norms["minus"]
        outcome = "vacuum" if self.rng.random() * total <= norms["vacuum"] else "minus"
        self.state = self._with_mult(axis, mults[outcome])
        self._renormalize()
        self.records.append(MeasurementEvent(round_no, f"ref{ref}", outcome,
                                             norms[outcome] / total))
        return outcome

    def _with_mult(self, axis: int, mult: np.ndarray) -> np.ndarray:
        shape = [1] * self.state.ndim
        shape[axis] = 3
        return self.state * mult.reshape(shape)

    def comparison_verdict(self, handle, ref: int) -> bool:
        """Does the slot equal |ref>? Destructive on "same", clean projection on "different".

        The winding remnant is announced by the fusion outcome, so the
        branch phases of a "minus" result are known and corrected; the
        "different" branch is then the exact projector complement.
        sampled mode declares "same" after caps.flux_rounds vacuums, with
        the channel reweighting applied honestly.
        """
        axis = self._axis_of(handle)
        if self.mode == "exact":
            probs = self._axis_probs(axis)
            same = bool(self.rng.random() <= probs[ref])
            self.records.append(MeasurementEvent(0, f"ref{ref}", "yes" if same else "no",
                                                 float(probs[ref] if same else 1 - probs[ref])))
            if same:
                vec = np.zeros(3, dtype=complex)
                vec[ref] = 1.0
                self._contract(axis, vec)
            else:
                kill = np.ones(3, dtype=complex)
                kill[ref] = 0.0
                self._apply_mult(kill, axis)
            self._renormalize()
            return same
        for k in range(self.caps.flux_rounds):
            outcome = self._comparison_round(axis, ref, k)
            if outcome == "minus":
                # remnant-known phase correction restores the clean projection
                mults = anyon.comparison_multipliers(ref)["minus"]
                fix = np.array([
                    abs(m) / m if m != 0 else 0.0 for m in mults
                ], dtype=complex)
                fix[ref] = 1.0
                self._apply_mult(fix, axis)
                self._renormalize()
                return False
        vec = np.zeros(3, dtype=complex)
        vec[ref] = 1.0
        self._contract(axis, vec)
        self._renormalize()
        return True

    def compare_dual(self, handle, which: int) -> bool:
        """Charge-probe comparison with |which~>; no false negatives."""
        axis = self._axis_of(handle)
        target = dual_state(which)
        overlap = np.tensordot(target.conj(), self.state, axes=([0], [axis]))
        p_yes = float(np.sum(np.abs(overlap) ** 2) / np.sum(np.abs(self.state) ** 2))
        yes = bool(self.rng.random() <= p_yes)
        self.records.append(MeasurementEvent(0, f"dual{which}", "yes" if yes else "no",
                                             p_yes if yes else 1 - p_yes))
        if yes:
            rebuilt = np.moveaxis(np.tensordot(target, overlap, axes=0), 0, axis)
            self.state = rebuilt
        else:
            rebuilt = np.moveaxis(np.tensordot(target, overlap, axes=0), 0, axis)
            self.state = self.state - rebuilt
        self._renormalize()
        return yes

    def measure_qubit_x(self, handle) -> Tuple[str, GateResult]:
        """Qubit dual-basis measurement by alternating |0~> and |2> comparisons.

        Consumes the measured slot.  Any "yes" concludes "+"; after
        caps.qubit_x_steps full steps without one the outcome is declared
        "-" with residual misassignment probability (1/9)^steps.
        """
        axis_slot = self._slots[self._axis_of(handle)]
        steps = self.caps.qubit_x_steps
        for _ in range(steps):
            if self.compare_dual(axis_slot, 0):
                vec = dual_state(0)
                self._contract(self._axis(axis_slot), vec)
                self._renormalize()
                return "+", GateResult("measure_x", steps, True, 0.0)
            if self.comparison_verdict(axis_slot, 2):
                # slot already consumed by the "same" branch
                return "+", GateResult("measure_x", steps, True, 0.0)
        vec = KET["minus"]
        self._contract(self._axis(axis_slot), vec)
        self._renormalize()
        return "-", GateResult("measure_x", steps, True, (1.0 / 9.0) ** steps)

    # -- qubit gates --

    def _check_qubit_subspace(self, i) -> None:
        axis = self._axis_of(i)
        leak = self._axis_probs(axis)[2]
        if leak > self.tol:
            raise LeakageError(f"slot {i} has |2> weight {leak:.2e}")

    def sign_flip(self, i, which: int) -> GateResult:
        """RUS sign flip of the coefficient of |which>.

        Each attempt entangles a fresh magic ancilla with U+ and measures
        it; attempts repeat until the record holds the target flip an odd
        number of times and the other two evenly.
        """
        counts = [0, 0, 0]
        for rep in range(1, self.caps.sign_flip + 1):
            anc = ("anc", len(self._slots), "xi")
            self._append(self._take("xi"), anc)
            self.u_plus(i, anc)
            outcome = self.measure_computational(anc, consume=True)
            flips = (outcome + 2) % 3
            counts[flips] += 1
            if counts[which] % 2 == 1 and all(counts[o] % 2 == 0 for o in range(3) if o != which):
                result = GateResult(f"sign_flip_{which}", rep, True, 0.0)
                self.results.append(result)
                return result
        result = GateResult(f"sign_flip_{which}", self.caps.sign_flip, False,
                            1.0 - sign_flip_success_probability(self.caps.sign_flip))
        raise CapExhausted("sign flip did not correct within its cap", result)

    def qubit_x(self, i) -> None:
        """Deterministic qubit X via three counters; rejects |2> support."""
        self._check_qubit_subspace(i)
        a0 = ("anc", len(self._slots), "x0")
        self._append(self._take("0"), a0)
        a1 = ("anc", len(self._slots) + 100, "x1")
        self._append(self._take("1"), a1)
        self.u_plus(i, a0)
        self.u_plus(a1, a0)
        self.u_plus(a0, i)
        self.u_plus(i, a0)
        self._project_out(a0, "2")
        self._give("2")
        self._project_out(a1, "1")
        self._give("1")

    def cz(self, i, j) -> GateResult:
        """(-1)^(xy) on qubit basis states; ancilla computes x+y, sign-flips on 2."""
        anc = ("anc", len(self._slots), "cz")
        self._append(self._take("0"), anc)
        self.u_plus(i, anc)
        self.u_plus(j, anc)
        result = self.sign_flip(anc, 2)
        self.u_minus(j, anc)
        self.u_minus(i, anc)
        self._project_out(anc, "0")
        self._give("0")
        out = replace(result, applied="cz")
        self.results.append(out)
        return out

    def ccz(self, i, j, k) -> GateResult:
        """(-1)^(xyz) on qubit basis states."""
        reps = 0
        for target in (i, j, k):
            reps += self.sign_flip(target, 1).repetitions
        anc = ("anc", len(self._slots), "ccz")
        self._append(self._take("0"), anc)
        for target in (i, j, k):
            self.u_plus(target, anc)
        reps += self.sign_flip(anc, 1).repetitions
        for target in (k, j, i):
            self.u_minus(target, anc)
        self._project_out(anc, "0")
        self._give("0")
        out = GateResult("ccz", reps, True, 0.0)
        self.results.append(out)
        return out

    def hadamard(self, i) -> GateResult:
        """CZ onto a |+> ancilla, X-basis readout of the input, X correction on "-"."""
        anc = ("anc", len(self._slots), "h")
        self._append(self._take("plus"), anc)
        cz_result = self.cz(i, anc)
        outcome, mres = self.measure_qubit_x(i)
        if outcome == "-":
            self.qubit_x(anc)
        # the ancilla wire now carries the output qutrit
        self._slots[self._axis(anc)] = ("q", i) if isinstance(i, int) else i
        out = GateResult("h", cz_result.repetitions, True, mres.residual_error)
        self.results.append(out)
        return out

    def s_gate(self, i) -> GateResult:
        """CZ onto a |-_Y> ancilla, X-basis readout of the ancilla.

        The "-" branch leaves i S^dagger on the input, which the qubit Z
        (sign flip of |1>) turns into S up to a global phase.
        """
        anc = ("anc", len(self._slots), "s")
        self._append(self._take("y_minus"), anc)
        cz_result = self.cz(i, anc)
        outcome, mres = self.measure_qubit_x(anc)
        reps = cz_result.repetitions
        if outcome == "-":
            reps += self.sign_flip(i, 1).repetitions
        out = GateResult("s", reps, True, mres.residual_error)
        self.results.append(out)
        return out


# --- ancilla preparation protocols ---------------------------------------------


def prepare_plus(pool_register: LogicalRegister) -> GateResult:
    """Mint one |+> from |0~> sources by repeated comparison with |2>.

    Per-round success probability 2/3; the product is added to the pool.
    """
    reg = pool_register
    for attempt in range(1, reg.caps.prepare + 1):
        scratch = ("anc", 900 + attempt, "plusprep")
        reg._append(reg._take("dual0"), scratch)
        reg._take("2")          # reference consumed by the comparison
        same = reg.comparison_verdict(scratch, 2)
        if not same:
            # remaining slot state is exactly |+>
            reg._project_out(scratch, "plus")
            reg._give("plus")
            result = GateResult("prepare_plus", attempt, True, 0.0)
            reg.results.append(result)
            return result
        # "same": the dual0 source collapsed to |2>; already consumed
    result = GateResult("prepare_plus", reg.caps.prepare, False,
                        (1.0 / 3.0) ** reg.caps.prepare)
    raise CapExhausted("plus preparation ran out of attempts", result)


def prepare_xi(pool_register: LogicalRegister) -> GateResult:
    """Mint one magic state (|0> - |1> + |2>)/sqrt(3); success chance 1/4 per attempt."""
    reg = pool_register
    for attempt in range(1, reg.caps.prepare + 1):
        s1 = ("anc", 800, "xi1")
        s2 = ("anc", 801, "xi2")
        reg._append(reg._take("plus"), s1)
        reg._append(reg._take("plus"), s2)
        reg.qutrit_z(s1)
        reg.qutrit_z(s2)
        reg.qutrit_z(s2)
        reg.u_plus(s1, s2)
        if reg.compare_dual(s1, 0):
            reg._contract(reg._axis(s1), dual_state(0))
            reg._renormalize()
            reg._project_out(s2, "xi")
            reg._give("xi")
            result = GateResult("prepare_xi", attempt, True, 0.0)
            reg.results.append(result)
            return result
        # failed comparison: discard both scratch qutrits
        reg.measure_computational(s1, consume=True)
        reg.measure_computational(s2, consume=True)
    result = GateResult("prepare_xi", reg.caps.prepare, False,
                        (3.0 / 4.0) ** reg.caps.prepare)
    raise CapExhausted("magic-state preparation ran out of attempts", result)


# --- correlated Y-eigenstate supply ----------------------------------------------

X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Y_PLUS = np.array([1, 1j], dtype=complex) / SQ2
Y_MINUS = np.array([1, -1j], dtype=complex) / SQ2


def _controlled(U: np.ndarray) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = U
    return out


COPY_CIRCUIT = _controlled(Z2) @ _controlled(X2)       # CX then CZ, control = fresh |+>
COMPARE_CIRCUIT = _controlled(X2) @ _controlled(Z2)    # CZ then CX, control = tested half


class YPool:
    """Classically correlated pool of Y eigenstates with a hidden sign.

    The pool's joint state is (|l_Y><l_Y|)^(x)N for a hidden uniform sign l;
    every member agrees under a hypothetical Y measurement.  Copying uses a
    |+> and the controlled X-then-Z circuit; minting a relative |-_Y> uses
    a fresh Bell-pair half and an X-basis readout.
    """

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.hidden_sign = 1 if rng.random() < 0.5 else -1
        self.size = 1

    def member_vector(self) -> np.ndarray:
        return Y_PLUS if self.hidden_sign > 0 else Y_MINUS

    def copy_extend(self) -> None:
        """Copy the pool mixture onto a fresh |+>; the pool grows by one."""
        plus = np.array([1, 1], dtype=complex) / SQ2
        joint = COPY_CIRCUIT @ np.kron(plus, self.member_vector())
        target = np.kron(self.member_vector(), self.member_vector())
        if abs(abs(joint.conj() @ target) - 1.0) > 1e-9:
            raise RuntimeError("Y-copy circuit failed to clone the pool state")
        self.size += 1

    def mint_relative_minus(self) -> Tuple[str, np.ndarray]:
        """Compare a fresh Bell-pair half with a pool member; herald the kept half.

        The tested half runs through the Z-then-X comparison circuit and an
        X-basis readout; the kept half of the Bell pair is Y-anticorrelated
        with it.  The outcome is deterministic given the hidden signs, and
        "+" heralds the kept half anti-aligned with the pool convention,
        i.e. a relative |-_Y>.
        """
        pool_vec = self.member_vector()
        fresh_sign = 1 if self.rng.random() < 0.5 else -1
        tested = Y_PLUS if fresh_sign > 0 else Y_MINUS
        kept_sign = -fresh_sign
        joint = COMPARE_CIRCUIT @ np.kron(tested, pool_vec)
        plus2 = np.array([1, 1], dtype=complex) / SQ2
        minus2 = np.array([1, -1], dtype=complex) / SQ2
        p_plus = float(np.sum(np.abs(np.kron(plus2.conj(), np.eye(2)) @ joint) ** 2))
        p_minus = float(np.sum(np.abs(np.kron(minus2.conj(), np.eye(2)) @ joint) ** 2))
        outcome = "+" if self.rng.random() * (p_plus + p_minus) <= p_plus else "-"
        kept = Y_PLUS if kept_sign > 0 else Y_MINUS
        return outcome, kept


# --- circuit runner ---------------------------------------------------------------


DEFAULT_STOCK = {"0": 400, "1": 64, "2": 64, "plus": 64, "dual0": 64,
                 "dual1": 400, "dual2": 16, "xi": 4096, "y_minus": 16}


def new_register(n: int, seed: int = 0, mode: str = "exact",
                 caps: Optional[Caps] = None,
                 stock: Optional[Dict[str, int]] = None) -> LogicalRegister:
    reg = LogicalRegister(n, np.random.Generator(np.random.Philox(seed)), mode,
                          caps or Caps())
    for kind, count in (stock or DEFAULT_STOCK).items():
        reg.stock(kind, count)
    return reg


def run_circuit(circuit: Sequence[dict], n: Optional[int] = None, mode: str = "exact",
                seed: int = 0, caps: Optional[Caps] = None) -> dict:
    """Execute a gate list on a fresh register.

    Each element is {"gate": name, "targets": [...], "params": {...}}.
    Returns the final state vector (exact mode), per-gate results and the
    measurement record; cap exhaustion surfaces as a typed entry.
    """
    max_target = 0
    for item in circuit:
        for t in item.get("targets", []):
            max_target = max(max_target, t)
    reg = new_register(n if n is not None else max_target + 1, seed=seed,
                       mode=mode, caps=caps)
    outcomes: List[dict] = []
    for item in circuit:
        gate = item.get("gate")
        targets = item.get("targets", [])
        params = item.get("params", {})
        if gate == "init":
            reg.set_basis(params["digits"])
        elif gate == "U":
            reg.pull_through(*targets)
        elif gate == "U+":
            reg.u_plus(*targets)
        elif gate == "U-":
            reg.u_minus(*targets)
        elif gate == "Z":
            reg.qutrit_z(targets[0])
        elif gate == "SHIFT":
            reg.qutrit_shift(targets[0])
        elif gate == "SZ":
            reg.sign_flip(targets[0], params["which"])
        elif gate == "X":
            reg.qubit_x(targets[0])
        elif gate == "CZ":
            reg.cz(*targets)
        elif gate == "CCZ":
            reg.ccz(*targets)
        elif gate == "H":
            reg.hadamard(targets[0])
        elif gate == "S":
            reg.s_gate(targets[0])
        elif gate == "M":
            outcome = reg.measure_computational(targets[0], consume=False)
            outcomes.append({"gate": "M", "target": targets[0], "outcome": outcome})
        else:
            raise ValueError(f"unknown gate {gate!r}")
    return {
        "state": reg.vector().tolist() if mode == "exact" else None,
        "gates": [r.as_dict() for r in reg.results],
        "measurements": outcomes,
        "records": [r.as_dict() for r in reg.records],
    }


def gate_matrix(apply_fn: Callable[[LogicalRegister], None], n: int,
                seed: int = 0, mode: str = "exact") -> np.ndarray:
    """Matrix of a register operation in the computational basis (column by column)."""
    dim = 3 ** n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        digits = [(col // 3 ** (n - 1 - k)) % 3 for k in range(n)]
        reg = new_register(n, seed=seed + 17 * col + 1, mode=mode)
        reg.set_basis(digits)
        apply_fn(reg)
        out[:, col] = reg.vector()
    return out
