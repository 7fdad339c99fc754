"""Axiom checker for finite stratified lattices.

Each check quantifies exhaustively wherever the quantification domain can
be collapsed to something finite and small:

* the lub/glb axioms quantify over arbitrary subsets of a compatibility
  class, but the only thing a subset contributes is its set of upper
  (lower) bounds, which is an intersection of per-element bound sets; the
  checker closes those under intersection, so every subset instance is
  covered without enumerating subsets;
* the join/meet-stability axioms quantify over subset joins (meets),
  which form the closure of a class under the binary operation; the
  closure lives inside the carrier, so it is enumerated directly;
* the join-monotonicity axiom quantifies over indexed families of related
  pairs; achievable (join-of-lefts, join-of-rights) pairs are again a
  closure inside carrier x carrier.

The one genuinely unbounded axiom is the double-limit exchange
(``exchange``); it is checked on bounded index families (three rows, chain
length up to three) and, on larger carriers, on a seeded sample.  The
report records the coverage mode per axiom.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from stratfix.errors import NotAlphaCompatible, SupremumUndefined
from stratfix.models import FiniteModel, _bits

ALL_AXIOMS = (
    "refine", "separate", "lub", "join-stable", "join-monotone", "exchange", "aligned", "restrict-monotone",
    "glb", "meet-stable", "upper-restrict-monotone",
)

#: axioms expected of every model
CORE_AXIOMS = ("refine", "separate", "lub", "join-stable")


@dataclass
class AxiomReport:
    model_name: str
    statuses: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    coverage: dict = field(default_factory=dict)

    def holds(self, *names) -> bool:
        names = names or tuple(self.statuses)
        return all(self.statuses[n] for n in names)

    def failing(self):
        return [n for n, ok in self.statuses.items() if not ok]

    def to_json(self) -> dict:
        return {
            "model": self.model_name,
            "axioms": {
                name: {
                    "holds": ok,
                    **(
                        {"witness": _jsonable(self.witnesses[name])}
                        if name in self.witnesses
                        else {}
                    ),
                    **(
                        {"coverage": self.coverage[name]}
                        if name in self.coverage
                        else {}
                    ),
                }
                for name, ok in self.statuses.items()
            },
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj if isinstance(obj, (int, float, str, bool, type(None))) else str(obj)


def check_axioms(model: FiniteModel, which=None, *, seed: int = 0,
                 exchange_chain_cap: int = 40, exchange_samples: int = 2000) -> AxiomReport:
    """Run the requested axiom checks (all by default)."""
    which = tuple(which) if which else ALL_AXIOMS
    unknown = set(which) - set(ALL_AXIOMS)
    if unknown:
        raise ValueError(f"unknown axioms: {sorted(unknown)}")
    report = AxiomReport(model.name)
    checkers = {
        "refine": _check_refinement,
        "separate": _check_separation,
        "lub": lambda m: _check_bound_axiom(m, dual=False),
        "glb": lambda m: _check_bound_axiom(m, dual=True),
        "join-stable": lambda m: _check_op_stability(m, dual=False),
        "meet-stable": lambda m: _check_op_stability(m, dual=True),
        "join-monotone": _check_join_monotone,
        "exchange": lambda m: _check_exchange(m, seed, exchange_chain_cap, exchange_samples),
        "aligned": _check_alignment,
        "restrict-monotone": lambda m: _check_restriction_monotone(m, dual=False),
        "upper-restrict-monotone": lambda m: _check_restriction_monotone(m, dual=True),
    }
    for name in which:
        ok, witness, coverage = checkers[name](model)
        report.statuses[name] = ok
        if witness is not None:
            report.witnesses[name] = witness
        if coverage:
            report.coverage[name] = coverage
    return report


# --- refine / separate ------------------------------------------------------------


def _check_refinement(m: FiniteModel):
    # a relation at a higher stratum refines equivalence at every lower one
    for beta in range(1, m.kappa):
        for alpha in range(beta):
            eq = m.eq_mask(alpha)
            for x in range(m.n):
                bad = m.sq_up[beta][x] & ~eq[x]
                if bad:
                    y = next(_bits(bad))
                    return False, {
                        "alpha": alpha, "beta": beta,
                        "x": m.ids[x], "y": m.ids[y],
                    }, None
    return True, None, None


def _check_separation(m: FiniteModel):
    # joint equivalence at every stratum collapses to equality
    for x in range(m.n):
        joint = m._full
        for alpha in range(m.kappa):
            joint &= m.eq_mask(alpha)[x]
        if joint != 1 << x:
            y = next(b for b in _bits(joint) if b != x)
            return False, {"x": m.ids[x], "y": m.ids[y]}, None
    return True, None, None


# --- lub / glb (bound existence) -------------------------------------------


def _bound_families(m: FiniteModel, alpha: int, cls: int, rel_up):
    """All distinct bound sets {y in cls : X rel y} over subsets X of cls,
    via intersection closure; yields (bound_set, generating X)."""
    family = {cls: ()}
    frontier = [cls]
    gens = {v: cls & rel_up[v] for v in _bits(cls)}
    while frontier:
        new = []
        for w in frontier:
            for v, g in gens.items():
                w2 = w & g
                if w2 not in family:
                    family[w2] = family[w] + (v,)
                    new.append(w2)
        frontier = new
    return family


def _check_bound_axiom(m: FiniteModel, *, dual: bool):
    seen = set()
    for alpha in range(m.kappa):
        classes = m.class_below(alpha)
        rel_up = m.sq_dn(alpha) if dual else m.sq_up[alpha]
        latt_up = m.leq_dn() if dual else m.leq_up
        for x in range(m.n):
            cls = classes[x]
            if (alpha, cls) in seen:
                continue
            seen.add((alpha, cls))
            for bound_set, gen in _bound_families(m, alpha, cls, rel_up).items():
                candidates = bound_set if gen else cls
                ok = any(
                    bound_set & ~rel_up[z] == 0 and bound_set & ~latt_up[z] == 0
                    for z in _bits(candidates)
                )
                if not ok:
                    return False, {
                        "alpha": alpha,
                        "class": [m.ids[e] for e in _bits(cls)],
                        "family": [m.ids[e] for e in gen],
                        "bounds": [m.ids[e] for e in _bits(bound_set)],
                    }, "exhaustive via bound-set closure"
    return True, None, "exhaustive via bound-set closure"


# --- join/meet stability of equivalence classes -----------------


def _check_op_stability(m: FiniteModel, *, dual: bool):
    table = m.meet_table() if dual else m.join_table()
    for alpha in range(m.kappa):
        eq = m.eq_mask(alpha)
        done = set()
        for y in range(m.n):
            cls = eq[y]
            if (alpha, cls) in done:
                continue
            done.add((alpha, cls))
            members = list(_bits(cls))
            built = {v: (v,) for v in members}
            frontier = list(members)
            while frontier:
                nxt = []
                for a in frontier:
                    for v in members:
                        j = table[a][v]
                        if j not in built:
                            built[j] = built[a] + (v,)
                            nxt.append(j)
                frontier = nxt
            for j, gen in built.items():
                if not cls >> j & 1:
                    op = "meet" if dual else "join"
                    return False, {
                        "alpha": alpha,
                        "anchor": m.ids[y],
                        "family": [m.ids[e] for e in gen],
                        op: m.ids[j],
                    }, "exhaustive via closure under the operation"
    return True, None, "exhaustive via closure under the operation"


# --- join-monotone (joins preserve the stratum preorders) --------------------------------


def _check_join_monotone(m: FiniteModel):
    table = m.join_table()
    for alpha in range(m.kappa):
        up = m.sq_up[alpha]
        seeds = [
            (x, y) for x in range(m.n) for y in _bits(up[x])
        ]
        built = {p: (p,) for p in seeds}
        frontier = list(seeds)
        while frontier:
            nxt = []
            for (a, b) in frontier:
                for (c, d) in seeds:
                    p = (table[a][c], table[b][d])
                    if p not in built:
                        built[p] = built[(a, b)] + ((c, d),)
                        nxt.append(p)
            frontier = nxt
        for (a, b), gen in built.items():
            if not up[a] >> b & 1:
                return False, {
                    "alpha": alpha,
                    "pairs": [[m.ids[x], m.ids[y]] for x, y in gen],
                    "joins": [m.ids[a], m.ids[b]],
                }, "exhaustive via closure under componentwise join"
    return True, None, "exhaustive via closure under componentwise join"


# --- exchange (joins against stratified suprema of chains) --------------------


def _chains_in(m: FiniteModel, alpha: int, max_len: int):
    """Nondecreasing stratum-alpha chains inside one compatibility class."""
    classes = m.class_below(alpha)
    seen_cls = set()
    chains = []
    for x in range(m.n):
        cls = classes[x]
        if cls in seen_cls:
            continue
        seen_cls.add(cls)
        members = list(_bits(cls))
        level = [[(v,) for v in members]]
        for _ in range(max_len - 1):
            nxt = []
            for ch in level[-1]:
                for v in _bits(m.sq_up[alpha][ch[-1]] & cls):
                    nxt.append(ch + (v,))
            level.append(nxt)
        for lv in level:
            chains.extend(lv)
    return chains


def _exchange_instance(m: FiniteModel, alpha: int, rows):
    try:
        row_lubs = [m.stratum_lub(frozenset(ch), alpha) for ch in rows]
    except (NotAlphaCompatible, SupremumUndefined) as exc:
        return False, f"row supremum undefined: {exc}"
    lhs = m.join(row_lubs)
    width = len(rows[0])
    cols = [m.join(ch[j] for ch in rows) for j in range(width)]
    try:
        rhs = m.stratum_lub(frozenset(cols), alpha)
    except (NotAlphaCompatible, SupremumUndefined) as exc:
        return False, f"column supremum undefined: {exc}"
    return m.eq_idx(lhs, rhs, alpha), None


def _check_exchange(m: FiniteModel, seed: int, chain_cap: int, samples: int):
    rng = random.Random(seed)
    for alpha in range(m.kappa):
        chains = _chains_in(m, alpha, 3)
        if len(chains) <= chain_cap:
            coverage = f"families of <=3 rows over all {len(chains)} chains (length <=3)"
            combos = itertools.chain.from_iterable(
                itertools.combinations_with_replacement(chains, k)
                for k in (1, 2, 3)
            )
        else:
            coverage = (
                f"seeded sample of {samples} families (seed {seed}); "
                f"{len(chains)} chains is beyond the exhaustive cap"
            )
            by_len = {}
            for ch in chains:
                by_len.setdefault(len(ch), []).append(ch)

            def sampled():
                for _ in range(samples):
                    width = rng.choice(sorted(by_len))
                    k = rng.randint(1, 3)
                    yield tuple(
                        rng.choice(by_len[width]) for _ in range(k)
                    )

            combos = sampled()
        for rows in combos:
            if len({len(ch) for ch in rows}) != 1:
                continue
            ok, note = _exchange_instance(m, alpha, rows)
            if not ok:
                witness = {
                    "alpha": alpha,
                    "rows": [[m.ids[e] for e in ch] for ch in rows],
                }
                if note:
                    witness["note"] = note
                return False, witness, coverage
    return True, None, coverage


# --- aligned / restriction monotonicity -----------------------------------------------------------


def _check_alignment(m: FiniteModel):
    # lattice-below plus agreement below alpha implies stratum-alpha below
    for alpha in range(m.kappa):
        classes = m.class_below(alpha)
        up = m.sq_up[alpha]
        for x in range(m.n):
            bad = classes[x] & m.leq_up[x] & ~up[x]
            if bad:
                y = next(_bits(bad))
                return False, {
                    "alpha": alpha, "x": m.ids[x], "y": m.ids[y],
                }, None
    return True, None, None


def _dual_restrict_table(m: FiniteModel):
    out = []
    for alpha in range(m.kappa):
        cls = m.class_below(alpha)
        dn = m.sq_dn(alpha)
        ldn = m.leq_dn()
        row = []
        for x in range(m.n):
            w = cls[x] & dn[x]
            z = next(
                (
                    z for z in _bits(w)
                    if w & ~dn[z] == 0 and w & ~ldn[z] == 0
                ),
                None,
            )
            row.append(-1 if z is None else z)
        out.append(tuple(row))
    return tuple(out)


def _check_restriction_monotone(m: FiniteModel, *, dual: bool):
    table = _dual_restrict_table(m) if dual else m.restrict_table()
    kind = "upper" if dual else "lower"
    for alpha in range(m.kappa):
        for x in range(m.n):
            if table[alpha][x] < 0:
                return False, {
                    "alpha": alpha,
                    "x": m.ids[x],
                    "note": f"{kind} restriction undefined",
                }, None
    for x in range(m.n):
        for y in _bits(m.leq_up[x]):
            for alpha in range(m.kappa):
                rx, ry = table[alpha][x], table[alpha][y]
                if not m.leq_idx(rx, ry):
                    return False, {
                        "alpha": alpha, "x": m.ids[x], "y": m.ids[y],
                        "rx": m.ids[rx], "ry": m.ids[ry],
                    }, None
    return True, None, None


# --- replay ----------------------------------------------------------------------


def replay_witness(model: FiniteModel, axiom: str, witness: dict) -> bool:
    """Re-evaluate a reported counterexample; True means it still violates."""
    ix = model.index
    if axiom == "refine":
        x, y = ix[witness["x"]], ix[witness["y"]]
        return model.sq_idx(x, y, witness["beta"]) and not model.eq_idx(
            x, y, witness["alpha"]
        )
    if axiom == "separate":
        x, y = ix[witness["x"]], ix[witness["y"]]
        return x != y and all(
            model.eq_idx(x, y, a) for a in range(model.kappa)
        )
    if axiom in ("lub", "glb"):
        alpha = witness["alpha"]
        fam = [ix[e] for e in witness["family"]]
        cls_mask = 0
        for e in witness["class"]:
            cls_mask |= 1 << ix[e]
        rel_up = model.sq_dn(alpha) if axiom == "glb" else model.sq_up[alpha]
        latt = model.leq_dn() if axiom == "glb" else model.leq_up
        bound = cls_mask
        for v in fam:
            bound &= rel_up[v]
        candidates = bound if fam else cls_mask
        return not any(
            bound & ~rel_up[z] == 0 and bound & ~latt[z] == 0
            for z in _bits(candidates)
        )
    if axiom in ("join-stable", "meet-stable"):
        alpha = witness["alpha"]
        y = ix[witness["anchor"]]
        fam = [ix[e] for e in witness["family"]]
        agg = (model.meet if axiom == "meet-stable" else model.join)(fam)
        return all(model.eq_idx(v, y, alpha) for v in fam) and not model.eq_idx(
            agg, y, alpha
        )
    if axiom == "join-monotone":
        alpha = witness["alpha"]
        xs = [ix[a] for a, _ in witness["pairs"]]
        ys = [ix[b] for _, b in witness["pairs"]]
        return all(
            model.sq_idx(x, y, alpha) for x, y in zip(xs, ys)
        ) and not model.sq_idx(model.join(xs), model.join(ys), alpha)
    if axiom == "exchange":
        rows = [tuple(ix[e] for e in ch) for ch in witness["rows"]]
        ok, _ = _exchange_instance(model, witness["alpha"], rows)
        return not ok
    if axiom == "aligned":
        alpha = witness["alpha"]
        x, y = ix[witness["x"]], ix[witness["y"]]
        agrees = bool(model.class_below(alpha)[x] >> y & 1)
        return agrees and model.leq_idx(x, y) and not model.sq_idx(x, y, alpha)
    if axiom in ("restrict-monotone", "upper-restrict-monotone"):
        table = (
            _dual_restrict_table(model) if axiom == "upper-restrict-monotone"
            else model.restrict_table()
        )
        alpha = witness["alpha"]
        x = ix[witness["x"]]
        if "note" in witness:
            return table[alpha][x] < 0
        y = ix[witness["y"]]
        return model.leq_idx(x, y) and not model.leq_idx(
            table[alpha][x], table[alpha][y]
        )
    raise ValueError(f"unknown axiom {axiom}")
