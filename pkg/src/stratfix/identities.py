"""Extensional checking of fixed-point identities over finite models.

Every check compares two composite tables pointwise over the full
parameter domain; nothing is symbolic.  Functions arrive as
:class:`stratfix.functions.StratifiedFn` tables, schemas always carry an
explicit parameter model (the one-element model when the identity is
used unparametrized), and daggers are computed by the kernel fast path.

Exhaustive tiers enumerate every stratum-monotone function fitting a
schema, subject to the documented feasibility guards: binary function
spaces are enumerated by backtracking (never by filtering the raw
space), pairings are capped by the size of the joint space, and the
catalog contains the axiom-checked models of at most four elements.
The structure with the deliberately twisted stratum is excluded: it is
not a model, so the fixed-point theory does not speak about it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from random import Random

from stratfix import axioms as AX
from stratfix import functions as FN
from stratfix import models as M
from stratfix.errors import (
    ArityMismatch,
    AxiomPreconditionFailed,
    FunctionSpaceTooLarge,
)
from stratfix.fixpoint import dagger
from stratfix.functions import StratifiedFn, _dom_size
from stratfix.models import FiniteModel


@dataclass(frozen=True)
class CheckResult:
    suite: str
    case_id: str
    status: str  # "pass" | "fail" | "vacuous"
    model: str
    seed: int | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "suite": self.suite,
            "case": self.case_id,
            "status": self.status,
            "model": self.model,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.detail:
            out["detail"] = {k: str(v) for k, v in self.detail.items()}
        return out


def _result(suite, case_id, model, ok, seed=None, detail=None):
    return CheckResult(
        suite, case_id, "pass" if ok else "fail", model, seed, detail or {}
    )


# --- identity checks on explicit tables --------------------------------------------


def check_fixed_point(f: StratifiedFn):
    """f-dagger is a fixed point pointwise: f(f-dagger y, y) = f-dagger y."""
    params = f.doms[1:]
    n_param = _dom_size(params)
    fd = dagger(f)
    table = fd.table if params else bytes([fd])
    for p in range(n_param):
        v = table[p]
        if f.table[v * n_param + p] != v:
            return False, {"point": p, "value": v}
    return True, None


def check_parameter(f: StratifiedFn, g: StratifiedFn):
    """Re-parametrizing before or after the dagger is the same."""
    L = f.doms[0]
    if len(f.doms) != 2 or g.cod is not f.doms[1]:
        raise ArityMismatch("need f : L x P -> L and g : Q -> P")
    (Q,) = g.doms
    nP, nQ = f.doms[1].n, Q.n
    lhs_table = bytes(
        f.table[x * nP + g.table[q]] for x in range(L.n) for q in range(nQ)
    )
    lhs = dagger(StratifiedFn((L, Q), L, lhs_table))
    fd = dagger(f)
    for q in range(nQ):
        if lhs.table[q] != fd.table[g.table[q]]:
            return False, {"point": Q.ids[q]}
    return True, None


def check_composition(f: StratifiedFn, g: StratifiedFn):
    """Dagger of g after f equals g applied to the dagger of f after g."""
    if len(f.doms) != 2 or len(g.doms) != 2 or f.doms[1] is not g.doms[1]:
        raise ArityMismatch("need f : L x P -> L2 and g : L2 x P -> L")
    L, P, L2 = g.cod, f.doms[1], f.cod
    if f.doms[0] is not L or g.doms[0] is not L2:
        raise ArityMismatch("composition schema mismatch")
    nP = P.n
    gf = bytes(
        g.table[f.table[x * nP + p] * nP + p]
        for x in range(L.n)
        for p in range(nP)
    )
    lhs = dagger(StratifiedFn((L, P), L, gf))
    fg = bytes(
        f.table[g.table[u * nP + p] * nP + p]
        for u in range(L2.n)
        for p in range(nP)
    )
    k = dagger(StratifiedFn((L2, P), L2, fg))
    for p in range(nP):
        if lhs.table[p] != g.table[k.table[p] * nP + p]:
            return False, {"point": P.ids[p]}
    return True, None


def check_double_dagger(f: StratifiedFn):
    """Collapsing the two recursion arguments equals taking the dagger
    twice."""
    if len(f.doms) != 3 or f.doms[0] is not f.doms[1] or f.cod is not f.doms[0]:
        raise ArityMismatch("need f : L x L x P -> L")
    L, P = f.doms[0], f.doms[2]
    nL, nP = L.n, P.n
    diag = bytes(
        f.table[(x * nL + x) * nP + p] for x in range(nL) for p in range(nP)
    )
    lhs = dagger(StratifiedFn((L, P), L, diag))
    inner = dagger(f)  # (L, P) -> L
    outer = dagger(inner)
    for p in range(nP):
        if lhs.table[p] != outer.table[p]:
            return False, {"point": P.ids[p]}
    return True, None


def check_bekic(f: StratifiedFn, g: StratifiedFn):
    """Joint dagger over a product equals the staged one-coordinate-at-a-
    time computation."""
    if len(f.doms) != 3 or len(g.doms) != 3:
        raise ArityMismatch("need f : L x K x P -> L and g : L x K x P -> K")
    L, K, P = f.doms
    if g.doms != (L, K, P) or f.cod is not L or g.cod is not K:
        raise ArityMismatch("pairing schema mismatch")
    nL, nK, nP = L.n, K.n, P.n
    LK = _product_cached(L, K)
    joint_table = bytes(
        f.table[i * nP + p] * nK + g.table[i * nP + p]
        for i in range(nL * nK)
        for p in range(nP)
    )
    joint = dagger(StratifiedFn((LK, P), LK, joint_table))

    # stage one: dagger of g in K, parametrized by (L, P)
    g_swapped = bytes(
        g.table[(x * nK + k) * nP + p]
        for k in range(nK)
        for x in range(nL)
        for p in range(nP)
    )
    kd = dagger(StratifiedFn((K, L, P), K, g_swapped))  # (L, P) -> K
    # stage two: dagger of f with the K coordinate already solved
    fk = bytes(
        f.table[(x * nK + kd.table[x * nP + p]) * nP + p]
        for x in range(nL)
        for p in range(nP)
    )
    xd = dagger(StratifiedFn((L, P), L, fk))  # (P,) -> L
    for p in range(nP):
        x_star = xd.table[p]
        k_star = kd.table[x_star * nP + p]
        if joint.table[p] != x_star * nK + k_star:
            return False, {"point": P.ids[p]}
    return True, None


def check_weak_functorial(f: StratifiedFn, g: StratifiedFn, n: int):
    """If f on the n-fold power restricts to g along the diagonal, their
    daggers match along the diagonal too.  Returns (status, detail) where
    status is "pass" / "fail" / "vacuous"."""
    Ln, P = f.doms[0], f.doms[1]
    L = g.doms[0]
    if g.doms[1] is not P or g.cod is not L or f.cod is not Ln:
        raise ArityMismatch("weak functorial schema mismatch")
    nP, nL = P.n, L.n
    diag_idx = [
        Ln.index[tuple(L.ids[x] for _ in range(n))] for x in range(nL)
    ]
    for x in range(nL):
        for p in range(nP):
            want = diag_idx[g.table[x * nP + p]]
            if f.table[diag_idx[x] * nP + p] != want:
                return "vacuous", {"premise_broken_at": (L.ids[x], P.ids[p])}
    fd = dagger(f)
    gd = dagger(g)
    for p in range(nP):
        if fd.table[p] != diag_idx[gd.table[p]]:
            return "fail", {"point": P.ids[p]}
    return "pass", None


# --- exponentials: abstraction and induction -----------------------------------------


def exponential_model(dom: FiniteModel, cod: FiniteModel, *,
                      guard: int = 200) -> FiniteModel:
    """The stratum-monotone function space dom -> cod as a model with
    pointwise orders.  Needs the join-monotonicity axiom on the codomain
    (that is what closes the space under pointwise joins)."""
    gate = AX.check_axioms(cod, ["join-monotone"])
    if not gate.holds("join-monotone"):
        raise AxiomPreconditionFailed(
            f"{cod.name} fails the join-monotonicity axiom", gate
        )
    fns = FN.enumerate_fn_tables((dom,), cod)
    if len(fns) > guard:
        raise FunctionSpaceTooLarge(
            f"{len(fns)} functions (guard {guard})"
        )
    tables = [f.table for f in fns]
    ids = [tuple(cod.ids[v] for v in t) for t in tables]
    n = len(tables)
    leq = [
        sum(
            1 << j
            for j in range(n)
            if all(cod.leq_idx(tables[i][y], tables[j][y]) for y in range(dom.n))
        )
        for i in range(n)
    ]
    sq = [
        [
            sum(
                1 << j
                for j in range(n)
                if all(
                    cod.sq_idx(tables[i][y], tables[j][y], alpha)
                    for y in range(dom.n)
                )
            )
            for i in range(n)
        ]
        for alpha in range(cod.kappa)
    ]
    return FiniteModel(
        ids, cod.kappa, leq, sq,
        name=f"({dom.name}->{cod.name})",
        extra={
            "tables": tables,
            "table_index": {t: i for i, t in enumerate(tables)},
            "dom": dom,
            "cod": cod,
        },
    )


def _apply_along(f: StratifiedFn, h_table: bytes) -> bytes:
    """The table y -> f(h(y), y)."""
    nP = f.doms[1].n
    return bytes(f.table[h_table[y] * nP + y] for y in range(nP))


def check_abstraction(f: StratifiedFn, expo: FiniteModel):
    """Currying the recursion: the dagger computed inside the function
    space equals the pointwise dagger."""
    index = expo.extra["table_index"]
    tables = expo.extra["tables"]
    lam = bytes(index[_apply_along(f, h)] for h in tables)
    h_star = dagger(StratifiedFn((expo,), expo, lam))
    fd = dagger(f)
    ok = tables[h_star] == fd.table
    return ok, (None if ok else {"inside": h_star})


def check_fp_induction(f: StratifiedFn, expo: FiniteModel):
    """Everything the function folds below itself bounds the dagger."""
    index = expo.extra["table_index"]
    tables = expo.extra["tables"]
    fd_idx = index[dagger(f).table]
    checked = 0
    for g_idx, g_table in enumerate(tables):
        fg_idx = index[_apply_along(f, g_table)]
        if expo.stratified_le(fg_idx, g_idx):
            checked += 1
            if not expo.stratified_le(fd_idx, g_idx):
                return False, {"bound": expo.ids[g_idx]}
    return True, {"premises": checked}


# --- model catalogs --------------------------------------------------------------------


_product_memo = {}


def _product_cached(a: FiniteModel, b: FiniteModel) -> FiniteModel:
    key = (id(a), id(b))
    if key not in _product_memo:
        _product_memo[key] = (M.product(a, b), a, b)
    return _product_memo[key][0]


_truncated_memo = {}


def truncated_model(maxlevel: int, atoms: tuple) -> FiniteModel:
    key = (maxlevel, tuple(atoms))
    if key not in _truncated_memo:
        _truncated_memo[key] = M.truncated_truth_model(maxlevel, atoms)
    return _truncated_memo[key]


def conway_catalog():
    """Axiom-checked models with at most four elements and at most three
    strata: all small lattices per stratum count, plus the one-stratum
    truth model."""
    models = M.lattice_catalog(4, (1, 2, 3))
    models.append(truncated_model(0, ("p",)))
    for m in models:
        report = AX.check_axioms(m, AX.CORE_AXIOMS)
        if not report.holds():
            raise AxiomPreconditionFailed(
                f"catalog model {m.name} is not a model", report
            )
    return models


def _terminal(kappa: int) -> FiniteModel:
    key = ("terminal", kappa)
    if key not in _truncated_memo:
        _truncated_memo[key] = M.terminal_model(kappa)
    return _truncated_memo[key]


def _param_models(L: FiniteModel):
    """Parameter models used by the exhaustive tier: none, and a 2-chain."""
    return [_terminal(L.kappa), _chain_cached(2, L.kappa)]


_chain_memo = {}


def _chain_cached(n: int, kappa: int) -> FiniteModel:
    key = (n, kappa)
    if key not in _chain_memo:
        _chain_memo[key] = M.chain_model(n, kappa)
    return _chain_memo[key]


# --- exhaustive tier ---------------------------------------------------------------------


#: joint enumeration caps for paired schemas
PAIR_CAP = 40_000


def run_conway_exhaustive(models=None, *, progress=None):
    """Every identity on every stratum-monotone function tuple fitting
    the schemas over the catalog; returns (results, summary)."""
    models = list(models) if models is not None else conway_catalog()
    results = []
    counts = {}

    def record(suite, model, case_id, ok, detail=None):
        counts[suite] = counts.get(suite, 0) + 1
        if not ok:
            results.append(_result(suite, case_id, model.name, False, None, detail))

    for L in models:
        if progress:
            progress(L.name)
        term = _terminal(L.kappa)
        unary = FN.enumerate_fn_tables((L,), L)
        unary_param = [
            StratifiedFn((L, term), L, f.table) for f in unary
        ]

        # fixed point: unparametrized and with a 2-chain parameter
        for i, f in enumerate(unary_param):
            ok, detail = check_fixed_point(f)
            record("fixed-point", L, f"{L.name}/unary{i}", ok, detail)
        P = _chain_cached(2, L.kappa)
        binary_LP = FN.enumerate_fn_tables((L, P), L)
        for i, f in enumerate(binary_LP):
            ok, detail = check_fixed_point(f)
            record("fixed-point", L, f"{L.name}/param{i}", ok, detail)

        # parameter identity: g ranges over the 2-chain self-maps
        chain_maps = FN.enumerate_fn_tables((P,), P)
        for i, f in enumerate(binary_LP):
            for j, g in enumerate(chain_maps):
                ok, detail = check_parameter(f, g)
                record("parameter", L, f"{L.name}/p{i}g{j}", ok, detail)

        # composition identity against both L itself and the 2-chain
        for other in (L, _chain_cached(2, L.kappa)):
            fwd = FN.enumerate_fn_tables((L, term), other)
            back = FN.enumerate_fn_tables((other, term), L)
            if len(fwd) * len(back) > PAIR_CAP:
                continue
            for i, f in enumerate(fwd):
                for j, g in enumerate(back):
                    ok, detail = check_composition(f, g)
                    record(
                        "composition", L,
                        f"{L.name}->{other.name}/f{i}g{j}", ok, detail,
                    )

        # double dagger over every binary function
        for i, f in enumerate(FN.enumerate_fn_tables((L, L), L)):
            f3 = StratifiedFn((L, L, term), L, f.table)
            ok, detail = check_double_dagger(f3)
            record("double-dagger", L, f"{L.name}/bin{i}", ok, detail)

        # pairing: joint systems against the 2-chain where the joint
        # space stays enumerable
        K = _chain_cached(2, L.kappa)
        fs = FN.enumerate_fn_tables((L, K), L)
        gs = FN.enumerate_fn_tables((L, K), K)
        if len(fs) * len(gs) <= PAIR_CAP:
            for i, f in enumerate(fs):
                f3 = StratifiedFn((L, K, term), L, f.table)
                for j, g in enumerate(gs):
                    g3 = StratifiedFn((L, K, term), K, g.table)
                    ok, detail = check_bekic(f3, g3)
                    record("bekic", L, f"{L.name}/f{i}g{j}", ok, detail)

    summary = {
        "cases": counts,
        "failures": len(results),
        "models": [m.name for m in models],
    }
    return results, summary


# --- randomized tier ------------------------------------------------------------------------


_ATOMS = {
    "L": (("u",), ("u", "u2")),
    "L2": (("v",), ("v", "v2")),
    "K": (("w",), ("w", "w2")),
    "P": (("y",), ("y", "y2")),
    "Q": (("q",),),
}

CONWAY_IDENTITIES = (
    "fixed-point", "parameter", "composition", "double-dagger", "bekic",
)


def _pick_space(rng: Random, role: str, maxlevel: int, max_size: int):
    options = [
        atoms
        for atoms in _ATOMS[role]
        if (2 * maxlevel + 3) ** len(atoms) <= max_size
    ]
    return truncated_model(maxlevel, rng.choice(options))


def _term_table(rng, doms, cod, depth=3):
    maxlevel = cod.extra["maxlevel"]
    term = FN.random_term_fn(
        rng,
        [m.extra["atoms"] for m in doms],
        cod.extra["atoms"],
        maxlevel,
        depth,
    )
    return term.compile(tuple(doms), cod)


def run_conway_random_case(identity: str, seed: int, case_index: int):
    """One seeded term-generated case; reproducible from its inputs."""
    rng = Random(seed * 1_000_003 + case_index)
    maxlevel = rng.choice((0, 1, 2))
    case_id = f"{identity}/{case_index}"

    if identity == "fixed-point":
        L = _pick_space(rng, "L", maxlevel, 49)
        P = _pick_space(rng, "P", maxlevel, 9 if L.n > 9 else 49)
        f = _term_table(rng, (L, P), L)
        ok, detail = check_fixed_point(f)
        model_name = f"{L.name},{P.name}"
    elif identity == "parameter":
        L = _pick_space(rng, "L", maxlevel, 25)
        P = _pick_space(rng, "P", maxlevel, 9)
        Q = truncated_model(maxlevel, _ATOMS["Q"][0])
        f = _term_table(rng, (L, P), L)
        g = _term_table(rng, (Q,), P)
        ok, detail = check_parameter(f, g)
        model_name = f"{L.name},{P.name},{Q.name}"
    elif identity == "composition":
        L = _pick_space(rng, "L", maxlevel, 25)
        L2 = _pick_space(rng, "L2", maxlevel, 25)
        P = _pick_space(rng, "P", maxlevel, 9)
        f = _term_table(rng, (L, P), L2)
        g = _term_table(rng, (L2, P), L)
        ok, detail = check_composition(f, g)
        model_name = f"{L.name},{L2.name},{P.name}"
    elif identity == "double-dagger":
        L = _pick_space(rng, "L", maxlevel, 9)
        P = _pick_space(rng, "P", maxlevel, 9)
        f = _term_table(rng, (L, L, P), L)
        ok, detail = check_double_dagger(f)
        model_name = f"{L.name},{P.name}"
    elif identity == "bekic":
        L = _pick_space(rng, "L", maxlevel, 9)
        K = _pick_space(rng, "K", maxlevel, 9)
        P = truncated_model(maxlevel, _ATOMS["P"][0]) if rng.random() < 0.3 \
            else _terminal(maxlevel + 1)
        if L.n * K.n * P.n > 400:
            P = _terminal(maxlevel + 1)
        if P.n == 1:
            f = _term_table(rng, (L, K), L)
            g = _term_table(rng, (L, K), K)
            f = StratifiedFn((L, K, P), L, f.table)
            g = StratifiedFn((L, K, P), K, g.table)
        else:
            f = _term_table(rng, (L, K, P), L)
            g = _term_table(rng, (L, K, P), K)
        ok, detail = check_bekic(f, g)
        model_name = f"{L.name},{K.name},{P.name}"
    else:
        raise ValueError(f"unknown identity {identity}")

    return _result(identity, case_id, model_name, ok, seed, detail)


def run_conway_random(cases: int, seed: int, identities=CONWAY_IDENTITIES):
    results = []
    failures = []
    for identity in identities:
        for i in range(cases):
            r = run_conway_random_case(identity, seed, i)
            results.append(r)
            if r.status != "pass":
                failures.append(r)
    summary = {
        "cases": {ident: cases for ident in identities},
        "failures": len(failures),
        "seed": seed,
    }
    return results, summary


# --- weak functorial squares -------------------------------------------------------------


def run_weak_functorial(cases: int, seed: int, *, n: int = 2,
                        include_broken: int = 0):
    """Constructed commuting squares: f applies g coordinatewise after a
    permutation, so the diagonal premise holds by construction and is
    still verified before the conclusion is checked."""
    rng = Random(seed)
    base_models = M.lattice_catalog(3, (1, 2)) + [truncated_model(0, ("p",)),
                                                  truncated_model(1, ("p",))]
    results = []
    produced = 0
    while produced < cases:
        L = rng.choice(base_models)
        P = _terminal(L.kappa) if rng.random() < 0.5 else _chain_cached(2, L.kappa)
        Ln = _power_cached(L, n)
        gs = _unary_pool(L, P)
        g = gs[rng.randrange(len(gs))]
        perm = tuple(rng.randrange(n) for _ in range(n))
        nP, nL = P.n, L.n
        table = bytearray(Ln.n * nP)
        for flat, xs in enumerate(itertools.product(range(nL), repeat=n)):
            for p in range(nP):
                image = tuple(
                    L.ids[g.table[xs[perm[k]] * nP + p]] for k in range(n)
                )
                table[flat * nP + p] = Ln.index[image]
        f = StratifiedFn((Ln, P), Ln, bytes(table))
        status, detail = check_weak_functorial(f, g, n)
        results.append(
            CheckResult(
                "functorial", f"square{produced}", status,
                f"{L.name}^{n},{P.name}", seed, detail or {},
            )
        )
        produced += 1
    for b in range(include_broken):
        L = rng.choice(base_models)
        P = _terminal(L.kappa)
        Ln = _power_cached(L, n)
        pool = FN.enumerate_fn_tables((Ln, P), Ln) if Ln.n <= 9 else []
        g = _unary_pool(L, P)[0]
        broken = next(
            (
                f for f in pool
                if check_weak_functorial(f, g, n)[0] == "vacuous"
            ),
            None,
        )
        if broken is not None:
            status, detail = check_weak_functorial(broken, g, n)
            results.append(
                CheckResult(
                    "functorial", f"broken{b}", status,
                    f"{L.name}^{n}", seed, detail or {},
                )
            )
    summary = {
        "cases": len(results),
        "vacuous": sum(1 for r in results if r.status == "vacuous"),
        "failures": sum(1 for r in results if r.status == "fail"),
        "seed": seed,
    }
    return results, summary


_power_memo = {}


def _power_cached(m: FiniteModel, k: int) -> FiniteModel:
    key = (id(m), k)
    if key not in _power_memo:
        _power_memo[key] = (M.power(m, k), m)
    return _power_memo[key][0]


_unary_memo = {}


def _unary_pool(L: FiniteModel, P: FiniteModel):
    key = (id(L), id(P))
    if key not in _unary_memo:
        _unary_memo[key] = (FN.enumerate_fn_tables((L, P), L), L, P)
    return _unary_memo[key][0]


# --- abstraction / induction tier -----------------------------------------------------------


def abstraction_pairs():
    """(recursion model, argument model) pairs with enumerable
    exponentials."""
    two = _chain_cached(2, 2)
    return [
        (two, two),
        (truncated_model(1, ("p",)), two),
    ]


def run_abstraction_exhaustive(pairs=None):
    results = []
    total = 0
    for L, Larg in pairs or abstraction_pairs():
        expo = exponential_model(Larg, L)
        expo_report = AX.check_axioms(expo, AX.CORE_AXIOMS)
        if not expo_report.holds():
            raise AxiomPreconditionFailed(
                f"exponential {expo.name} is not a model", expo_report
            )
        for i, f in enumerate(FN.enumerate_fn_tables((L, Larg), L)):
            total += 1
            ok, detail = check_abstraction(f, expo)
            if not ok:
                results.append(
                    _result(
                        "abstraction", f"{L.name}/{i}", expo.name, False,
                        None, detail,
                    )
                )
    return results, {"cases": total, "failures": len(results)}


def run_fp_induction_exhaustive(pairs=None):
    results = []
    total = 0
    premises = 0
    for L, Larg in pairs or abstraction_pairs():
        expo = exponential_model(Larg, L)
        for i, f in enumerate(FN.enumerate_fn_tables((L, Larg), L)):
            total += 1
            ok, detail = check_fp_induction(f, expo)
            premises += (detail or {}).get("premises", 0)
            if not ok:
                results.append(
                    _result(
                        "induction", f"{L.name}/{i}", expo.name, False,
                        None, detail,
                    )
                )
    return results, {
        "cases": total, "failures": len(results), "premises": premises,
    }
