"""Exact S3 arithmetic, conjugacy classes, centralizers and irreps.

Elements are plain ints 0..5 in the fixed order (e, u, U, s, us, Us) where
``u`` is the 3-cycle, ``U`` its inverse and ``s`` the 2-cycle that together
generate the group with the relation u*s = s*U.  All tables are precomputed
at import from the underlying permutations, so every identity used elsewhere
(Cayley table, inverses, classes) traces back to permutation composition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Tuple

import numpy as np

GroupElement = int

# Fixed element order: e, u=3-cycle, U=inverse 3-cycle, s, us, Us.
E, MU, MUBAR, SIGMA, MUSIGMA, MUBARSIGMA = range(6)

ELEMENT_NAMES: Tuple[str, ...] = ("e", "u", "U", "s", "us", "Us")

ALL_ELEMENTS: Tuple[GroupElement, ...] = tuple(range(6))

# Permutations of {1,2,3}; PERMS[g][i] is the image of i+1.
PERMS: Tuple[Tuple[int, int, int], ...] = (
    (1, 2, 3),   # e
    (2, 3, 1),   # u   (1 -> 2 -> 3 -> 1)
    (3, 1, 2),   # U
    (1, 3, 2),   # s   (swap 2, 3)
    (2, 1, 3),   # us  (swap 1, 2)
    (3, 2, 1),   # Us  (swap 1, 3)
)


def _compose(a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
    # right-to-left: apply b first, then a
    return tuple(a[b[i] - 1] for i in range(3))


_PERM_TO_ID = {p: i for i, p in enumerate(PERMS)}

MUL_TABLE: Tuple[Tuple[int, ...], ...] = tuple(
    tuple(_PERM_TO_ID[_compose(PERMS[g], PERMS[h])] for h in ALL_ELEMENTS)
    for g in ALL_ELEMENTS
)

INV_TABLE: Tuple[int, ...] = tuple(
    next(h for h in ALL_ELEMENTS if MUL_TABLE[g][h] == E) for g in ALL_ELEMENTS
)


def mul(g: GroupElement, h: GroupElement) -> GroupElement:
    """Group product g*h (rightmost factor acts first)."""
    return MUL_TABLE[g][h]


def mul_all(elements: Iterable[GroupElement]) -> GroupElement:
    """Left-to-right product of a sequence, empty product is e."""
    out = E
    for g in elements:
        out = MUL_TABLE[out][g]
    return out


def inv(g: GroupElement) -> GroupElement:
    return INV_TABLE[g]


def conjugate(h: GroupElement, by: GroupElement) -> GroupElement:
    """Return (by) * h * (by)^-1."""
    return mul(mul(by, h), inv(by))


def commutator(g: GroupElement, h: GroupElement) -> GroupElement:
    """Return g h g^-1 h^-1."""
    return mul_all((g, h, inv(g), inv(h)))


def element_name(g: GroupElement) -> str:
    return ELEMENT_NAMES[g]


def parse_element(name: str) -> GroupElement:
    try:
        return ELEMENT_NAMES.index(name)
    except ValueError:
        raise ValueError(f"unknown group element {name!r}; expected one of {ELEMENT_NAMES}") from None


@dataclass(frozen=True)
class ConjugacyClass:
    label: str
    representative: GroupElement
    members: Tuple[GroupElement, ...]

    def __contains__(self, g: GroupElement) -> bool:
        return g in self.members

    def __len__(self) -> int:
        return len(self.members)


def _class_members(rep: GroupElement) -> Tuple[GroupElement, ...]:
    return tuple(sorted({conjugate(rep, by=g) for g in ALL_ELEMENTS}))


CLASS_C1 = ConjugacyClass("C1", E, _class_members(E))
CLASS_C2 = ConjugacyClass("C2", SIGMA, _class_members(SIGMA))
CLASS_C3 = ConjugacyClass("C3", MU, _class_members(MU))

CLASSES: Tuple[ConjugacyClass, ...] = (CLASS_C1, CLASS_C2, CLASS_C3)

_CLASS_OF = {g: c for c in CLASSES for g in c.members}


def class_of(g: GroupElement) -> ConjugacyClass:
    return _CLASS_OF[g]


def class_by_label(label: str) -> ConjugacyClass:
    for c in CLASSES:
        if c.label == label:
            return c
    raise ValueError(f"unknown conjugacy class {label!r}")


def centralizer(g: GroupElement) -> Tuple[GroupElement, ...]:
    """All h with g h = h g."""
    return tuple(h for h in ALL_ELEMENTS if mul(g, h) == mul(h, g))


def derived_subgroup() -> Tuple[GroupElement, ...]:
    """Commutator subgroup; for S3 this is the 3-cycle subgroup."""
    return tuple(sorted({commutator(g, h) for g in ALL_ELEMENTS for h in ALL_ELEMENTS}))


OMEGA = np.exp(2j * np.pi / 3)


@dataclass(frozen=True)
class Irrep:
    """Unitary irreducible representation of S3 or one of its centralizer subgroups."""

    group: str                     # "S3", "Z3" or "Z2"
    label: str
    dim: int
    matrices: Dict[GroupElement, np.ndarray] = field(repr=False)

    def matrix(self, g: GroupElement) -> np.ndarray:
        try:
            return self.matrices[g]
        except KeyError:
            raise ValueError(f"element {element_name(g)} not in the domain of irrep {self.label}") from None

    def character(self, g: GroupElement) -> complex:
        return complex(np.trace(self.matrix(g)))

    @property
    def domain(self) -> Tuple[GroupElement, ...]:
        return tuple(sorted(self.matrices))


def _m(*rows) -> np.ndarray:
    a = np.array(rows, dtype=complex)
    a.setflags(write=False)
    return a


# Standard 2d irrep in the basis (|2+>, |2->); the 3-cycle is diagonal
# with phases (w, w*) and the generating 2-cycle is the swap.
_STD = {
    E: _m([1, 0], [0, 1]),
    MU: _m([OMEGA, 0], [0, OMEGA.conjugate()]),
    MUBAR: _m([OMEGA.conjugate(), 0], [0, OMEGA]),
    SIGMA: _m([0, 1], [1, 0]),
    MUSIGMA: _m([0, OMEGA], [OMEGA.conjugate(), 0]),
    MUBARSIGMA: _m([0, OMEGA.conjugate()], [OMEGA, 0]),
}

TRIVIAL = Irrep("S3", "[+]", 1, {g: _m([1]) for g in ALL_ELEMENTS})
SIGN = Irrep("S3", "[-]", 1, {g: _m([1 if g in (E, MU, MUBAR) else -1]) for g in ALL_ELEMENTS})
STANDARD = Irrep("S3", "[2]", 2, _STD)

S3_IRREPS: Tuple[Irrep, ...] = (TRIVIAL, SIGN, STANDARD)

# Z3 = centralizer of the 3-cycles, elements {e, u, U} mapped to exponents 0,1,2.
_Z3_EXP = {E: 0, MU: 1, MUBAR: 2}

Z3_TRIVIAL = Irrep("Z3", "[1]", 1, {g: _m([1]) for g in _Z3_EXP})
Z3_OMEGA = Irrep("Z3", "[w]", 1, {g: _m([OMEGA ** k]) for g, k in _Z3_EXP.items()})
Z3_OMEGA_STAR = Irrep("Z3", "[w*]", 1, {g: _m([OMEGA.conjugate() ** k]) for g, k in _Z3_EXP.items()})

Z3_IRREPS: Tuple[Irrep, ...] = (Z3_TRIVIAL, Z3_OMEGA, Z3_OMEGA_STAR)

# Z2 = centralizer of the class representative s.
Z2_TRIVIAL = Irrep("Z2", "[+]", 1, {E: _m([1]), SIGMA: _m([1])})
Z2_SIGN = Irrep("Z2", "[-]", 1, {E: _m([1]), SIGMA: _m([-1])})

Z2_IRREPS: Tuple[Irrep, ...] = (Z2_TRIVIAL, Z2_SIGN)


def centralizer_irreps(cls: ConjugacyClass) -> Tuple[Irrep, ...]:
    """Irreps of the centralizer of the canonical class representative."""
    if cls.label == "C1":
        return S3_IRREPS
    if cls.label == "C2":
        return Z2_IRREPS
    return Z3_IRREPS


def centralizer_irrep(cls: ConjugacyClass, label: str) -> Irrep:
    for irrep in centralizer_irreps(cls):
        if irrep.label == label:
            return irrep
    raise ValueError(f"no irrep {label!r} for the centralizer of class {cls.label}")


def character(irrep: Irrep, g: GroupElement) -> complex:
    return irrep.character(g)


def q_rep(c: GroupElement, r: GroupElement) -> GroupElement:
    """Canonical conjugating element q with c = q r q^-1.

    Deterministic: the smallest element id satisfying the equation.  The
    choice is a convention; any solution differs by right multiplication
    with a centralizer element of r.
    """
    if class_of(c) is not class_of(r):
        raise ValueError(
            f"{element_name(c)} and {element_name(r)} lie in different conjugacy classes"
        )
    for q in ALL_ELEMENTS:
        if conjugate(r, by=q) == c:
            return q
    raise AssertionError("unreachable: same class guarantees a conjugator")


@dataclass(frozen=True)
class AnyonType:
    """One of the eight excitation types: a flux class plus a centralizer charge."""

    letter: str
    flux_class: ConjugacyClass
    charge: Irrep
    qdim: int


ANYON_TYPES: Tuple[AnyonType, ...] = (
    AnyonType("A", CLASS_C1, TRIVIAL, 1),
    AnyonType("B", CLASS_C1, SIGN, 1),
    AnyonType("C", CLASS_C1, STANDARD, 2),
    AnyonType("D", CLASS_C2, Z2_TRIVIAL, 3),
    AnyonType("E", CLASS_C2, Z2_SIGN, 3),
    AnyonType("F", CLASS_C3, Z3_TRIVIAL, 2),
    AnyonType("G", CLASS_C3, Z3_OMEGA, 2),
    AnyonType("H", CLASS_C3, Z3_OMEGA_STAR, 2),
)


def anyon_type(letter: str) -> AnyonType:
    for t in ANYON_TYPES:
        if t.letter == letter:
            return t
    raise ValueError(f"unknown anyon type {letter!r}")
