"""Finite stratified lattices as explicit tables.

A :class:`FiniteModel` is a finite complete lattice together with one
preorder per stratum.  Carriers are small (tens of elements), so orders
are stored as bitmask rows and every derived structure (join tables,
restrictions, stratified suprema) is found by exhaustive search and
memoized.  Correctness over cleverness: the tables are tiny.

Constructors in this module only validate *order* structure (lattice,
preorders).  Whether the stratum axioms hold is a separate question
answered by :mod:`stratfix.axioms`; a constructor is allowed to build a
structure that the checker then rejects.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from stratfix import values as V
from stratfix.errors import (
    ConditionViolated,
    KappaMismatch,
    NotALattice,
    NotAlphaCompatible,
    SupremumUndefined,
)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _pairs_to_rows(n: int, index: dict, pairs) -> list[int]:
    rows = [1 << x for x in range(n)]  # reflexive closure is implied
    for a, b in pairs:
        rows[index[a]] |= 1 << index[b]
    return rows


class FiniteModel:
    """Explicit finite stratified lattice.

    ``carrier`` lists hashable element ids; ``leq`` and each ``sq[alpha]``
    are given either as pair collections over ids (reflexivity implied) or
    as precomputed bitmask rows.
    """

    def __init__(self, carrier, kappa, leq, sq, *, name=None, extra=None,
                 validate=True):
        self.ids = tuple(carrier)
        self.n = len(self.ids)
        if self.n == 0:
            raise NotALattice("empty carrier")
        if self.n > 200:
            raise NotALattice(f"carrier too large ({self.n} elements)")
        if kappa < 1:
            raise ValueError("kappa must be at least 1")
        self.kappa = kappa
        self.index = {e: i for i, e in enumerate(self.ids)}
        if len(self.index) != self.n:
            raise ValueError("duplicate carrier elements")
        self.name = name or f"model[{self.n}]k{kappa}"
        self.extra = dict(extra or {})

        self.leq_up = self._coerce_rows(leq)
        if len(sq) != kappa:
            raise ValueError(f"expected {kappa} stratum relations, got {len(sq)}")
        self.sq_up = tuple(self._coerce_rows(r) for r in sq)

        self._full = (1 << self.n) - 1
        self._lub_memo = {}
        self._caches = {}
        if validate:
            self._validate()

    def _coerce_rows(self, rel) -> tuple[int, ...]:
        rel = list(rel)
        if rel and isinstance(rel[0], int):
            if len(rel) != self.n:
                raise ValueError("bad row count")
            return tuple(r | (1 << x) for x, r in enumerate(rel))
        return tuple(_pairs_to_rows(self.n, self.index, rel))

    # -- validation ---------------------------------------------------------

    def _check_preorder(self, rows, what):
        for x in range(self.n):
            if not rows[x] >> x & 1:
                raise NotALattice(f"{what} is not reflexive at {self.ids[x]}")
            for y in _bits(rows[x]):
                if rows[y] & ~rows[x]:
                    raise NotALattice(
                        f"{what} is not transitive at "
                        f"({self.ids[x]}, {self.ids[y]})"
                    )

    def _validate(self):
        self._check_preorder(self.leq_up, "leq")
        for x in range(self.n):
            for y in _bits(self.leq_up[x]):
                if y != x and self.leq_up[y] >> x & 1:
                    raise NotALattice(
                        f"leq is not antisymmetric at "
                        f"({self.ids[x]}, {self.ids[y]})"
                    )
        for alpha, rows in enumerate(self.sq_up):
            self._check_preorder(rows, f"sq[{alpha}]")
        # force join/meet tables; they raise NotALattice when a bound is
        # missing or ambiguous
        self.join_table()
        self.meet_table()

    # -- basic order access --------------------------------------------------

    def leq_idx(self, x: int, y: int) -> bool:
        return bool(self.leq_up[x] >> y & 1)

    def sq_idx(self, x: int, y: int, alpha: int) -> bool:
        return bool(self.sq_up[alpha][x] >> y & 1)

    def eq_idx(self, x: int, y: int, alpha: int) -> bool:
        return self.sq_idx(x, y, alpha) and self.sq_idx(y, x, alpha)

    def _cache(self, key, build):
        if key not in self._caches:
            self._caches[key] = build()
        return self._caches[key]

    def leq_dn(self) -> tuple[int, ...]:
        def build():
            dn = [0] * self.n
            for x in range(self.n):
                for y in _bits(self.leq_up[x]):
                    dn[y] |= 1 << x
            return tuple(dn)

        return self._cache("leq_dn", build)

    def sq_dn(self, alpha: int) -> tuple[int, ...]:
        def build():
            dn = [0] * self.n
            for x in range(self.n):
                for y in _bits(self.sq_up[alpha][x]):
                    dn[y] |= 1 << x
            return tuple(dn)

        return self._cache(("sq_dn", alpha), build)

    def eq_mask(self, alpha: int) -> tuple[int, ...]:
        """Per element: bitmask of its stratum-``alpha`` equivalence class."""
        def build():
            dn = self.sq_dn(alpha)
            return tuple(self.sq_up[alpha][x] & dn[x] for x in range(self.n))

        return self._cache(("eq", alpha), build)

    def class_below(self, alpha: int) -> tuple[int, ...]:
        """Per element x: bitmask of {y : y equivalent to x at every
        stratum below alpha}."""
        def build():
            if alpha == 0:
                return tuple(self._full for _ in range(self.n))
            prev = self.class_below(alpha - 1)
            eq = self.eq_mask(alpha - 1)
            return tuple(prev[x] & eq[x] for x in range(self.n))

        return self._cache(("below", alpha), build)

    # -- lattice structure ----------------------------------------------------

    def bottom(self) -> int:
        def build():
            for x in range(self.n):
                if self.leq_up[x] == self._full:
                    return x
            raise NotALattice("no bottom element")

        return self._cache("bottom", build)

    def top(self) -> int:
        def build():
            dn = self.leq_dn()
            for x in range(self.n):
                if dn[x] == self._full:
                    return x
            raise NotALattice("no top element")

        return self._cache("top", build)

    def _bound_table(self, up_of, kind):
        table = [[0] * self.n for _ in range(self.n)]
        for x in range(self.n):
            for y in range(self.n):
                common = up_of[x] & up_of[y]
                best = None
                for z in _bits(common):
                    if common & ~up_of[z] == 0:
                        best = z
                        break
                if best is None:
                    raise NotALattice(
                        f"{self.ids[x]} and {self.ids[y]} have no {kind}"
                    )
                table[x][y] = best
        return tuple(tuple(r) for r in table)

    def join_table(self):
        return self._cache(
            "join", lambda: self._bound_table(self.leq_up, "join")
        )

    def meet_table(self):
        return self._cache(
            "meet", lambda: self._bound_table(self.leq_dn(), "meet")
        )

    def join(self, items: Iterable[int]) -> int:
        out = self.bottom()
        t = self.join_table()
        for x in items:
            out = t[out][x]
        return out

    def meet(self, items: Iterable[int]) -> int:
        out = self.top()
        t = self.meet_table()
        for x in items:
            out = t[out][x]
        return out

    # -- stratified structure --------------------------------------------------

    def stratum_le(self, x: int, y: int, alpha: int) -> bool:
        return self.sq_idx(x, y, alpha)

    def stratum_eq(self, x: int, y: int, alpha: int) -> bool:
        return self.eq_idx(x, y, alpha)

    def stratum_lub(self, members, alpha: int, witness: int | None = None) -> int:
        """Stratified supremum by exhaustive search, memoized.

        The family (plus the witness, which is required when the family is
        empty) must be equivalent at every stratum below ``alpha``.  The
        result bounds the family in the stratum preorder and is below every
        other bound in both the stratum preorder and the lattice order.
        """
        members = frozenset(members)
        key = (members, alpha, witness if not members else None)
        hit = self._lub_memo.get(key)
        if hit is not None:
            return hit

        if not members:
            if witness is None:
                raise ValueError("empty family needs a witness element")
            anchor = witness
        else:
            anchor = next(iter(members))
        cls = self.class_below(alpha)[anchor]
        for m in members:
            if not cls >> m & 1:
                raise NotAlphaCompatible(
                    f"{self.ids[m]} not compatible below stratum {alpha}"
                )
        if witness is not None and not cls >> witness & 1:
            raise NotAlphaCompatible("witness not compatible with family")

        up = self.sq_up[alpha]
        bound_set = cls
        for m in members:
            bound_set &= up[m]
        z = self._least_of(bound_set if members else cls, bound_set, alpha)
        if z is None:
            raise SupremumUndefined(
                f"no stratum-{alpha} supremum for "
                f"{{{', '.join(str(self.ids[m]) for m in members)}}}"
            )
        self._lub_memo[key] = z
        return z

    def _least_of(self, candidates: int, bound_set: int, alpha: int):
        # an element of `candidates` below every member of `bound_set`
        # in both sq[alpha] and leq
        up = self.sq_up[alpha]
        for z in _bits(candidates):
            if bound_set & ~up[z] == 0 and bound_set & ~self.leq_up[z] == 0:
                return z
        return None

    def restrict(self, x: int, alpha: int) -> int:
        """Least element equivalent to ``x`` at stratum ``alpha``."""
        table = self.restrict_table()
        z = table[alpha][x]
        if z < 0:
            raise SupremumUndefined(
                f"{self.ids[x]} has no restriction at stratum {alpha}"
            )
        return z

    def restrict_table(self):
        def build():
            out = []
            for alpha in range(self.kappa):
                cls = self.class_below(alpha)
                up = self.sq_up[alpha]
                row = []
                for x in range(self.n):
                    w = cls[x] & up[x]
                    z = self._least_of(w, w, alpha)
                    row.append(-1 if z is None else z)
                out.append(tuple(row))
            return tuple(out)

        return self._cache("restrict", build)

    def stratified_le(self, x: int, y: int) -> bool:
        """Global order: equal, or strictly below at some stratum."""
        return bool(self.stratified_up()[x] >> y & 1)

    def stratified_up(self) -> tuple[int, ...]:
        def build():
            rows = []
            for x in range(self.n):
                mask = 1 << x
                for alpha in range(self.kappa):
                    up = self.sq_up[alpha]
                    dn = self.sq_dn(alpha)
                    mask |= up[x] & ~dn[x]
                rows.append(mask)
            return tuple(rows)

        return self._cache("global_up", build)

    def leq_max_id(self):
        return self.ids[self.top()]

    def stratified_max_id(self):
        up = self.stratified_up()
        dn = [0] * self.n
        for x in range(self.n):
            for y in _bits(up[x]):
                dn[y] |= 1 << x
        for x in range(self.n):
            if dn[x] == self._full:
                return self.ids[x]
        return None

    def kernel_pack(self) -> dict:
        """Flattened byte tables consumed by the kernel."""
        def build():
            n = self.n
            sq = bytearray(self.kappa * n * n)
            for alpha in range(self.kappa):
                base = alpha * n * n
                for x in range(n):
                    for y in _bits(self.sq_up[alpha][x]):
                        sq[base + x * n + y] = 1
            jt = self.join_table()
            join = bytearray(n * n)
            for x in range(n):
                for y in range(n):
                    join[x * n + y] = jt[x][y]
            rt = self.restrict_table()
            rst = bytearray(self.kappa * n)
            for alpha in range(self.kappa):
                for x in range(n):
                    v = rt[alpha][x]
                    rst[alpha * n + x] = 255 if v < 0 else v
            return {
                "n": n,
                "kappa": self.kappa,
                "sq": bytes(sq),
                "join": bytes(join),
                "restrict": bytes(rst),
                "bottom": self.bottom(),
            }

        return self._cache("kernel", build)

    # -- engine protocol -------------------------------------------------------

    #: finite tables detect a stratum plateau in one exact step
    inner_plateau_window = 1

    def chain_budget(self) -> int:
        return self.n + 2

    def equal(self, x: int, y: int) -> bool:
        return x == y

    # -- serialization ----------------------------------------------------------

    def to_json_dict(self) -> dict:
        def enc(e):
            return list(map(enc, e)) if isinstance(e, tuple) else e

        def rel_pairs(rows):
            return [
                [enc(self.ids[x]), enc(self.ids[y])]
                for x in range(self.n)
                for y in _bits(rows[x])
                if x != y
            ]

        return {
            "carrier": [enc(e) for e in self.ids],
            "kappa": self.kappa,
            "leq": rel_pairs(self.leq_up),
            "sq": [rel_pairs(rows) for rows in self.sq_up],
            "name": self.name,
        }

    @classmethod
    def from_json_dict(cls, obj) -> "FiniteModel":
        def dec(e):
            return tuple(map(dec, e)) if isinstance(e, list) else e

        carrier = [dec(e) for e in obj["carrier"]]
        leq = [(dec(a), dec(b)) for a, b in obj["leq"]]
        sq = [[(dec(a), dec(b)) for a, b in rel] for rel in obj["sq"]]
        return cls(carrier, obj["kappa"], leq, sq, name=obj.get("name"))

    def __repr__(self):
        return f"<FiniteModel {self.name}: {self.n} elements, kappa={self.kappa}>"


# --- constructors -------------------------------------------------------------


def lattice_as_model(carrier, leq, kappa, *, name=None) -> FiniteModel:
    """View a finite complete lattice as a stratified model: stratum 0 is
    the lattice order itself, every later stratum is equality."""
    probe = FiniteModel(carrier, 1, leq, [leq], validate=True)
    eq_rows = [1 << x for x in range(probe.n)]
    sq = [probe.leq_up] + [eq_rows] * (kappa - 1)
    return FiniteModel(
        carrier, kappa, probe.leq_up, sq,
        name=name or f"lattice[{probe.n}]k{kappa}",
    )


def chain_model(n: int, kappa: int) -> FiniteModel:
    carrier = [f"c{i}" for i in range(n)]
    leq = [(f"c{i}", f"c{j}") for i in range(n) for j in range(i, n)]
    return lattice_as_model(carrier, leq, kappa, name=f"chain{n}k{kappa}")


def diamond_model(kappa: int) -> FiniteModel:
    carrier = ["bot", "a", "b", "top"]
    leq = [("bot", "a"), ("bot", "b"), ("bot", "top"), ("a", "top"), ("b", "top")]
    return lattice_as_model(carrier, leq, kappa, name=f"diamondk{kappa}")


def two_order_model(carrier, leq, sq0, kappa: int = 2, *, name=None) -> FiniteModel:
    """Model from two complete lattice orders on one carrier.

    Stratum 0 is ``sq0``, all later strata are equality.  The construction
    is sound exactly when ``x sq0 y`` implies ``x leq y``; the equivalent
    bound conditions are all reported on failure.
    """
    base = FiniteModel(carrier, 1, leq, [leq], validate=True)
    probe = FiniteModel(carrier, 1, sq0, [sq0], validate=True)
    sq0_rows = probe.leq_up
    n = base.n

    failed = []
    witness = None
    for x in range(n):
        bad = sq0_rows[x] & ~base.leq_up[x]
        if bad:
            y = next(_bits(bad))
            failed.append("pointwise: x below0 y but not x leq y")
            witness = (base.ids[x], base.ids[y])
            break
    if failed and n <= 12:
        # the other two (equivalent) formulations, for the report
        sq0_model = probe
        for subset in range(1, 1 << n):
            members = list(_bits(subset))
            sup0 = sq0_model.join(members)
            supl = base.join(members)
            if not base.leq_idx(supl, sup0):
                failed.append("joins: lattice join not below stratum-0 join")
                break
        for subset in range(1 << n):
            members = list(_bits(subset))
            ub0 = [
                y
                for y in range(n)
                if all(sq0_rows[m] >> y & 1 for m in members)
            ]
            sup0 = sq0_model.join(members)
            if any(not base.leq_idx(sup0, y) for y in ub0):
                failed.append(
                    "bounds: a stratum-0 bound is not above the stratum-0 join"
                )
                break
    if failed:
        raise ConditionViolated(
            f"incompatible orders at {witness}", failed, witness
        )

    eq_rows = [1 << x for x in range(n)]
    sq = [sq0_rows] + [eq_rows] * (kappa - 1)
    return FiniteModel(
        carrier, kappa, base.leq_up, sq, name=name or f"twoorder[{n}]k{kappa}"
    )


def truncated_truth_model(maxlevel: int, atoms: Sequence[str]) -> FiniteModel:
    """The interpretation space over a level-truncated value domain.

    Carrier: every map from ``atoms`` into {F_0..F_maxlevel, 0,
    T_maxlevel..T_0}; one stratum per level (kappa = maxlevel + 1); all
    orders are the pointwise ones from :mod:`stratfix.values`.
    """
    atoms = tuple(atoms)
    if not atoms:
        raise ValueError("need at least one atom")
    levels = (
        [V.F(k) for k in range(maxlevel + 1)]
        + [V.ZERO]
        + [V.T(k) for k in range(maxlevel, -1, -1)]
    )
    interps = [
        V.Interpretation(atoms, vs)
        for vs in itertools.product(levels, repeat=len(atoms))
    ]
    ids = [",".join(f"{a}={v}" for a, v in zip(i.atoms, i.values)) for i in interps]
    kappa = maxlevel + 1

    n = len(interps)
    leq_rows = [
        sum(1 << y for y in range(n) if interps[x].leq(interps[y]))
        for x in range(n)
    ]
    sq = [
        [
            sum(
                1 << y
                for y in range(n)
                if V.stratum_le(interps[x], interps[y], alpha)
            )
            for x in range(n)
        ]
        for alpha in range(kappa)
    ]
    model = FiniteModel(
        ids, kappa, leq_rows, sq,
        name=f"truth[{maxlevel}]x{len(atoms)}",
        extra={
            "interpretations": tuple(interps),
            "atoms": atoms,
            "maxlevel": maxlevel,
            "interp_index": {i: k for k, i in enumerate(interps)},
        },
    )
    return model


def twisted_bit_model() -> FiniteModel:
    """Four-element two-stratum structure over bit pairs.

    Stratum 0 ranks by the first bit; stratum 1 ranks by the second bit,
    reversed on the upper half.  Its two order maxima differ ("10" for the
    stratified order, "11" for the lattice), which is the point of the
    construction.  Note that the reversed half makes the lub axiom fail on
    the class {10, 11}; see the axiom checker tests.
    """
    carrier = ["00", "01", "10", "11"]
    leq = [
        (x, y)
        for x in carrier
        for y in carrier
        if int(x[0]) <= int(y[0]) and int(x[1]) <= int(y[1])
    ]
    sq0 = [(x, y) for x in carrier for y in carrier if int(x[0]) <= int(y[0])]
    sq1 = [
        (x, y)
        for x in carrier
        for y in carrier
        if (x[0] == y[0] == "0" and int(x[1]) <= int(y[1]))
        or (x[0] == y[0] == "1" and int(x[1]) >= int(y[1]))
    ]
    return FiniteModel(carrier, 2, leq, [sq0, sq1], name="twisted-bit")


def terminal_model(kappa: int) -> FiniteModel:
    return FiniteModel(
        ["*"], kappa, [("*", "*")], [[("*", "*")]] * kappa, name=f"1k{kappa}"
    )


def product(m1: FiniteModel, m2: FiniteModel) -> FiniteModel:
    """Pointwise product of two models with equal stratum counts."""
    if m1.kappa != m2.kappa:
        raise KappaMismatch(f"kappa {m1.kappa} vs {m2.kappa}")
    ids = [(a, b) for a in m1.ids for b in m2.ids]
    n2 = m2.n

    def combine(rows1, rows2):
        rows = []
        for x1 in range(m1.n):
            for x2 in range(m2.n):
                mask = 0
                for y1 in _bits(rows1[x1]):
                    base = y1 * n2
                    r2 = rows2[x2]
                    y2mask = r2
                    while y2mask:
                        low = y2mask & -y2mask
                        mask |= 1 << (base + low.bit_length() - 1)
                        y2mask ^= low
                rows.append(mask)
        return rows

    leq = combine(m1.leq_up, m2.leq_up)
    sq = [
        combine(m1.sq_up[a], m2.sq_up[a]) for a in range(m1.kappa)
    ]
    return FiniteModel(
        ids, m1.kappa, leq, sq,
        name=f"({m1.name}x{m2.name})",
        extra={"factors": (m1, m2)},
    )


def power(m: FiniteModel, k: int) -> FiniteModel:
    """k-fold pointwise power; carrier ids are k-tuples."""
    if k < 1:
        raise ValueError("power needs k >= 1")
    ids = list(itertools.product(m.ids, repeat=k))
    index = {e: i for i, e in enumerate(m.ids)}

    def combine(rows):
        out = []
        for xs in itertools.product(range(m.n), repeat=k):
            mask = 0
            for pos, ys in enumerate(itertools.product(range(m.n), repeat=k)):
                if all(rows[x] >> y & 1 for x, y in zip(xs, ys)):
                    mask |= 1 << pos
            out.append(mask)
        return out

    leq = combine(m.leq_up)
    sq = [combine(m.sq_up[a]) for a in range(m.kappa)]
    return FiniteModel(
        ids, m.kappa, leq, sq,
        name=f"{m.name}^{k}",
        extra={"factors": (m,) * k},
    )


# --- lattice enumeration --------------------------------------------------------


def _canonical_form(n, up_rows):
    best = None
    for perm in itertools.permutations(range(n)):
        bits = 0
        pos = 0
        for x in range(n):
            for y in range(n):
                if up_rows[perm[x]] >> perm[y] & 1:
                    bits |= 1 << pos
                pos += 1
        if best is None or bits < best:
            best = bits
    return best


def all_lattices(max_size: int):
    """Every complete lattice with at most ``max_size`` elements, up to
    isomorphism, as (carrier, leq-pairs) specs.

    Enumerates order relations along a fixed linear extension (an edge
    i < j is only allowed when i precedes j), so every isomorphism class
    is hit; duplicates are removed by canonicalization.
    """
    out = []
    for n in range(1, max_size + 1):
        seen = set()
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for choice in range(1 << len(edges)):
            rows = [1 << x for x in range(n)]
            for k, (i, j) in enumerate(edges):
                if choice >> k & 1:
                    rows[i] |= 1 << j
            ok = True
            for x in range(n):
                for y in _bits(rows[x]):
                    if rows[y] & ~rows[x]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            try:
                FiniteModel(list(range(n)), 1, rows, [rows])
            except NotALattice:
                continue
            form = _canonical_form(n, rows)
            if form in seen:
                continue
            seen.add(form)
            carrier = [f"e{i}" for i in range(n)]
            pairs = [
                (carrier[x], carrier[y])
                for x in range(n)
                for y in _bits(rows[x])
            ]
            out.append((carrier, pairs))
    return out


def lattice_catalog(max_size: int, kappas: Iterable[int]):
    """All small complete lattices viewed as models, for each kappa."""
    out = []
    for num, (carrier, pairs) in enumerate(all_lattices(max_size)):
        for kappa in kappas:
            out.append(
                lattice_as_model(
                    carrier, pairs, kappa,
                    name=f"lat{len(carrier)}-{num}k{kappa}",
                )
            )
    return out
