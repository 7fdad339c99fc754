"""Truth values with confidence levels, and interpretations over them.

The value domain is the linear order

    F_0 < F_1 < ... < 0 < ... < T_1 < T_0

where ``F_k`` / ``T_k`` is falsity / truth whose certainty has been eroded
``k`` times and ``0`` is unknown.  Negation flips polarity and bumps the
level: ``not F_k = T_{k+1}``, ``not T_k = F_{k+1}``, ``not 0 = 0``.

An :class:`Interpretation` maps a fixed, ordered tuple of atoms into that
domain.  The plain lattice order ``<=`` and join/meet are pointwise.  On
top of that there is one preorder per stratum ``alpha``
(:func:`stratum_le`): interpretations are related at ``alpha`` when they
agree on every value of level below ``alpha`` and are suitably bounded at
level ``alpha`` itself.  These preorders drive the stratified fixed point
construction; the derived global order is :func:`stratified_le`.

Everything here is immutable and every function is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from stratfix.errors import (
    LevelOverflow,
    MixedAtomSets,
    NotAlphaCompatible,
)

#: Hard ceiling for confidence levels.  Negation is the only level-raising
#: operation, so a computation that climbs this high is a runaway.
DEFAULT_LEVEL_CAP = 2**16


@dataclass(frozen=True, slots=True)
class TruthValue:
    """One element of the value domain.

    ``polarity`` is one of ``"F"``, ``"0"``, ``"T"``; ``level`` is a
    natural number for F/T and ``None`` for the unknown value.
    """

    polarity: str
    level: int | None = None

    def __post_init__(self):
        if self.polarity not in ("F", "0", "T"):
            raise ValueError(f"bad polarity {self.polarity!r}")
        if self.polarity == "0":
            if self.level is not None:
                raise ValueError("the unknown value carries no level")
        else:
            if not isinstance(self.level, int) or self.level < 0:
                raise ValueError(f"bad level {self.level!r}")

    @property
    def rank(self) -> tuple[int, int]:
        """Sort key realizing F_0 < F_1 < ... < 0 < ... < T_1 < T_0."""
        if self.polarity == "F":
            return (0, self.level)
        if self.polarity == "0":
            return (1, 0)
        return (2, -self.level)

    def level_or_inf(self) -> float:
        """Stratification level: the natural level for F/T, +inf for 0.

        The +inf sentinel makes every "level <= alpha" test uniform.
        """
        return math.inf if self.polarity == "0" else self.level

    def __lt__(self, other):
        return self.rank < other.rank

    def __le__(self, other):
        return self.rank <= other.rank

    def __gt__(self, other):
        return self.rank > other.rank

    def __ge__(self, other):
        return self.rank >= other.rank

    def __str__(self):
        return "0" if self.polarity == "0" else f"{self.polarity}{self.level}"


ZERO = TruthValue("0")


def F(level: int) -> TruthValue:
    return TruthValue("F", level)


def T(level: int) -> TruthValue:
    return TruthValue("T", level)


def tv(text: str) -> TruthValue:
    """Parse the compact text form: ``F0``, ``F12``, ``T3``, ``0``."""
    text = text.strip()
    if text == "0":
        return ZERO
    if len(text) >= 2 and text[0] in ("F", "T") and text[1:].isdigit():
        return TruthValue(text[0], int(text[1:]))
    raise ValueError(f"bad truth value text {text!r}")


def tv_to_json(v: TruthValue) -> dict:
    if v.polarity == "0":
        return {"polarity": "0"}
    return {"polarity": v.polarity, "level": v.level}


def tv_from_json(obj: Mapping) -> TruthValue:
    if obj["polarity"] == "0":
        return ZERO
    return TruthValue(obj["polarity"], obj["level"])


def tv_compare(a: TruthValue, b: TruthValue) -> int:
    """Total order on values: -1, 0 or 1."""
    ka, kb = a.rank, b.rank
    return (ka > kb) - (ka < kb)


def tv_neg(a: TruthValue, cap: int = DEFAULT_LEVEL_CAP) -> TruthValue:
    """not F_k = T_{k+1}, not T_k = F_{k+1}, not 0 = 0."""
    if a.polarity == "0":
        return ZERO
    if a.level + 1 > cap:
        raise LevelOverflow(f"negation of {a} exceeds level cap {cap}")
    return TruthValue("T" if a.polarity == "F" else "F", a.level + 1)


def tv_join(a: TruthValue, b: TruthValue) -> TruthValue:
    return a if a.rank >= b.rank else b


def tv_meet(a: TruthValue, b: TruthValue) -> TruthValue:
    return a if a.rank <= b.rank else b


def _sq_value(a: TruthValue, b: TruthValue, alpha: int) -> bool:
    # a is below-or-equivalent-to b at stratum alpha:
    #   (i)  they agree on every level below alpha,
    #   (ii) b = F_alpha forces a = F_alpha, a = T_alpha forces b = T_alpha.
    if a == b:
        return True
    if a.level_or_inf() < alpha or b.level_or_inf() < alpha:
        return False
    if b.polarity == "F" and b.level == alpha:
        return False  # a would have to equal b
    if a.polarity == "T" and a.level == alpha:
        return False
    return True


def _eq_value(a: TruthValue, b: TruthValue, alpha: int) -> bool:
    # Equivalence at stratum alpha: equal, or both strictly above it.
    return a == b or (a.level_or_inf() > alpha and b.level_or_inf() > alpha)


def _eq_value_below(a: TruthValue, b: TruthValue, alpha: int) -> bool:
    # Equivalent at every stratum below alpha: equal, or both at level
    # alpha or higher.
    return a == b or (a.level_or_inf() >= alpha and b.level_or_inf() >= alpha)


@dataclass(frozen=True, slots=True)
class Interpretation:
    """A total map from an ordered atom tuple into the value domain."""

    atoms: tuple[str, ...]
    values: tuple[TruthValue, ...]

    def __post_init__(self):
        if len(self.atoms) != len(self.values):
            raise ValueError("atoms and values differ in length")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("duplicate atoms")

    @classmethod
    def from_dict(cls, mapping: Mapping[str, TruthValue]) -> "Interpretation":
        return cls(tuple(mapping), tuple(mapping.values()))

    @classmethod
    def bottom(cls, atoms: Sequence[str]) -> "Interpretation":
        return cls(tuple(atoms), tuple(F(0) for _ in atoms))

    @classmethod
    def top(cls, atoms: Sequence[str]) -> "Interpretation":
        return cls(tuple(atoms), tuple(T(0) for _ in atoms))

    def __getitem__(self, atom: str) -> TruthValue:
        return self.values[self.atoms.index(atom)]

    def as_dict(self) -> dict[str, TruthValue]:
        return dict(zip(self.atoms, self.values))

    def replace(self, atom: str, value: TruthValue) -> "Interpretation":
        i = self.atoms.index(atom)
        vals = self.values[:i] + (value,) + self.values[i + 1 :]
        return Interpretation(self.atoms, vals)

    def max_finite_level(self) -> int:
        return max(
            (v.level for v in self.values if v.polarity != "0"), default=0
        )

    def leq(self, other: "Interpretation") -> bool:
        _require_same_atoms(self, other)
        return all(a.rank <= b.rank for a, b in zip(self.values, other.values))

    def __str__(self):
        body = ",".join(f"{a}={v}" for a, v in zip(self.atoms, self.values))
        return "{" + body + "}"


def _require_same_atoms(*interps: Interpretation):
    atoms = interps[0].atoms
    for other in interps[1:]:
        if other.atoms != atoms:
            raise MixedAtomSets(
                f"atom tuples differ: {atoms} vs {other.atoms}"
            )


def interp_join(interps: Iterable[Interpretation]) -> Interpretation:
    """Pointwise join of a nonempty family."""
    interps = list(interps)
    if not interps:
        raise ValueError("join of an empty family needs an explicit bottom")
    _require_same_atoms(*interps)
    vals = tuple(
        max((i.values[k] for i in interps), key=lambda v: v.rank)
        for k in range(len(interps[0].atoms))
    )
    return Interpretation(interps[0].atoms, vals)


def interp_meet(interps: Iterable[Interpretation]) -> Interpretation:
    """Pointwise meet of a nonempty family."""
    interps = list(interps)
    if not interps:
        raise ValueError("meet of an empty family needs an explicit top")
    _require_same_atoms(*interps)
    vals = tuple(
        min((i.values[k] for i in interps), key=lambda v: v.rank)
        for k in range(len(interps[0].atoms))
    )
    return Interpretation(interps[0].atoms, vals)


def interp_neg(i: Interpretation, cap: int = DEFAULT_LEVEL_CAP) -> Interpretation:
    return Interpretation(i.atoms, tuple(tv_neg(v, cap) for v in i.values))


def stratum_le(i: Interpretation, j: Interpretation, alpha: int) -> bool:
    """The stratum-``alpha`` preorder, pointwise over atoms."""
    _require_same_atoms(i, j)
    return all(
        _sq_value(a, b, alpha) for a, b in zip(i.values, j.values)
    )


def stratum_eq(i: Interpretation, j: Interpretation, alpha: int) -> bool:
    """Equivalence at stratum ``alpha`` (both directions of the preorder)."""
    _require_same_atoms(i, j)
    return all(_eq_value(a, b, alpha) for a, b in zip(i.values, j.values))


def restrict(i: Interpretation, alpha: int) -> Interpretation:
    """Least interpretation equivalent to ``i`` at stratum ``alpha``.

    Pointwise: values of level <= alpha are kept, everything else drops
    to F_{alpha+1}.
    """
    repl = F(alpha + 1)
    vals = tuple(
        v if v.level_or_inf() <= alpha else repl for v in i.values
    )
    return Interpretation(i.atoms, vals)


def stratum_lub(
    interps: Sequence[Interpretation],
    alpha: int,
    witness: Interpretation | None = None,
) -> Interpretation:
    """Stratified supremum of a family that agrees below ``alpha``.

    For a nonempty family the result keeps every pinned value of level
    below alpha and otherwise takes, per atom: T_alpha when some member
    reaches it, F_alpha when every member sits there, and F_{alpha+1} in
    all remaining cases.  An empty family needs a ``witness`` whose
    below-alpha values pin the result; unpinned atoms fall to F_alpha.
    """
    interps = list(interps)
    if not interps:
        if witness is None:
            raise ValueError("empty family needs a witness interpretation")
        vals = tuple(
            v if v.level_or_inf() < alpha else F(alpha)
            for v in witness.values
        )
        return Interpretation(witness.atoms, vals)

    anchor = interps[0] if witness is None else witness
    members = interps if witness is None else [witness, *interps]
    _require_same_atoms(*members)
    for other in members[1:]:
        for a, b in zip(anchor.values, other.values):
            if not _eq_value_below(a, b, alpha):
                raise NotAlphaCompatible(
                    f"{a} and {b} disagree below stratum {alpha}"
                )

    t_alpha, f_alpha = T(alpha), F(alpha)
    out = []
    for k in range(len(anchor.atoms)):
        column = [i.values[k] for i in interps]
        first = column[0]
        if first.level_or_inf() < alpha:
            out.append(first)
        elif any(v == t_alpha for v in column):
            out.append(t_alpha)
        elif all(v == f_alpha for v in column):
            out.append(f_alpha)
        else:
            out.append(F(alpha + 1))
    return Interpretation(anchor.atoms, tuple(out))


def stratum_search_bound(i: Interpretation, j: Interpretation) -> int:
    """Largest stratum worth probing when comparing ``i`` and ``j``.

    Above every level occurring in either side the stratum preorders
    collapse to equality on these two elements, so the scan may stop at
    max occurring level + 1.
    """
    return max(i.max_finite_level(), j.max_finite_level()) + 1


def stratified_le(i: Interpretation, j: Interpretation) -> bool:
    """The global stratified order: equal, or strictly below at some
    stratum (below in the preorder but not equivalent there)."""
    _require_same_atoms(i, j)
    if i == j:
        return True
    for alpha in range(stratum_search_bound(i, j) + 1):
        if stratum_le(i, j, alpha) and not stratum_le(j, i, alpha):
            return True
    return False


def interp_to_json(i: Interpretation) -> dict:
    return {a: tv_to_json(v) for a, v in zip(i.atoms, i.values)}


def interp_to_text(i: Interpretation) -> dict:
    return {a: str(v) for a, v in zip(i.atoms, i.values)}


def interp_from_json(obj: Mapping[str, Mapping]) -> Interpretation:
    return Interpretation(
        tuple(obj), tuple(tv_from_json(v) for v in obj.values())
    )
