import itertools

import pytest

from stratfix import axioms as A
from stratfix import models as M
from stratfix.models import _bits


# --- independent brute-force oracle (tiny carriers only) ---------------------

def brute_lub_axiom(m, dual=False):
    """Literal subset quantification; cross-validates the closure method."""
    for alpha in range(m.kappa):
        classes = m.class_below(alpha)
        seen = set()
        for x in range(m.n):
            cls = classes[x]
            if (alpha, cls) in seen:
                continue
            seen.add((alpha, cls))
            members = list(_bits(cls))
            rel = (lambda a, b: m.sq_idx(b, a, alpha)) if dual else (
                lambda a, b: m.sq_idx(a, b, alpha)
            )
            lat = (lambda a, b: m.leq_idx(b, a)) if dual else m.leq_idx
            for r in range(len(members) + 1):
                for X in itertools.combinations(members, r):
                    bounds = [
                        y for y in members if all(rel(v, y) for v in X)
                    ]
                    ok = any(
                        all(rel(v, z) for v in X)
                        and all(rel(z, y) and lat(z, y) for y in bounds)
                        for z in members
                    )
                    if not ok:
                        return False, (alpha, X)
    return True, None


def brute_join_stability(m):
    for alpha in range(m.kappa):
        for y in range(m.n):
            members = [v for v in range(m.n) if m.eq_idx(v, y, alpha)]
            for r in range(1, len(members) + 1):
                for X in itertools.combinations(members, r):
                    if not m.eq_idx(m.join(X), y, alpha):
                        return False, (alpha, y, X)
    return True, None


# --- validated structures pass ------------------------------------------------

TRUTH_MODELS = [
    M.truncated_truth_model(0, ["p"]),
    M.truncated_truth_model(1, ["p"]),
    M.truncated_truth_model(0, ["p", "q"]),
]


@pytest.mark.parametrize("model", TRUTH_MODELS, ids=lambda m: m.name)
def test_truth_models_pass_everything(model):
    report = A.check_axioms(model)
    assert report.holds(), report.failing()


def test_lattice_models_pass_everything():
    for model in M.lattice_catalog(4, (1, 2, 3)):
        report = A.check_axioms(model)
        assert report.holds(), (model.name, report.failing())


def test_two_order_aligned_chain_passes():
    carrier = ["a", "b", "c"]
    leq = [("a", "b"), ("b", "c"), ("a", "c")]
    m = M.two_order_model(carrier, leq, leq)
    assert A.check_axioms(m).holds()


# --- closure method agrees with literal subset enumeration --------------------

SMALL = [
    M.chain_model(3, 2),
    M.diamond_model(2),
    M.truncated_truth_model(0, ["p"]),
    M.truncated_truth_model(1, ["p"]),
    M.twisted_bit_model(),
]


@pytest.mark.parametrize("model", SMALL, ids=lambda m: m.name)
def test_lub_axiom_matches_brute_force(model):
    expect, _ = brute_lub_axiom(model)
    report = A.check_axioms(model, ["lub"])
    assert report.holds("lub") == expect


@pytest.mark.parametrize("model", SMALL, ids=lambda m: m.name)
def test_glb_axiom_matches_brute_force(model):
    expect, _ = brute_lub_axiom(model, dual=True)
    report = A.check_axioms(model, ["glb"])
    assert report.holds("glb") == expect


@pytest.mark.parametrize("model", SMALL, ids=lambda m: m.name)
def test_join_stability_matches_brute_force(model):
    expect, _ = brute_join_stability(model)
    report = A.check_axioms(model, ["join-stable"])
    assert report.holds("join-stable") == expect


# --- the twisted-bit structure -------------------------------------------------

def test_twisted_bit_axiom_profile():
    """The reversed second stratum breaks the lub axiom on the upper
    class while the other core axioms survive."""
    m = M.twisted_bit_model()
    report = A.check_axioms(m, ["refine", "separate", "lub", "join-stable"])
    assert report.holds("refine", "separate", "join-stable")
    assert not report.holds("lub")
    witness = report.witnesses["lub"]
    assert witness["alpha"] == 1
    assert sorted(witness["class"]) == ["10", "11"]
    assert A.replay_witness(m, "lub", witness)


def test_twisted_bit_matches_brute_force():
    m = M.twisted_bit_model()
    ok, (alpha, _) = brute_lub_axiom(m)
    assert not ok and alpha == 1


# --- corruption is detected -----------------------------------------------------

def test_corrupted_stratum_is_caught():
    base = M.truncated_truth_model(1, ["p"])
    # drop one non-reflexive stratum-1 edge
    rows = list(base.sq_up[1])
    x = next(
        i for i in range(base.n)
        if rows[i] & ~(1 << i)
    )
    y = next(b for b in _bits(rows[x]) if b != x)
    rows[x] &= ~(1 << y)
    # removing one edge may break transitivity of the stratum preorder
    # itself; repair by re-closing transitively so the checker sees a
    # well-formed but wrong table
    changed = True
    while changed:
        changed = False
        for a in range(base.n):
            for b in _bits(rows[a]):
                if rows[b] & ~rows[a]:
                    rows[a] &= ~(1 << b) if a != b else rows[a]
                    changed = True
    corrupted = M.FiniteModel(
        base.ids, base.kappa, base.leq_up, [base.sq_up[0], rows],
        name="corrupted",
    )
    report = A.check_axioms(corrupted, ["refine", "lub"])
    assert not report.holds()
    for name in report.failing():
        assert A.replay_witness(corrupted, name, report.witnesses[name])


# --- products preserve the optional axioms exactly -------------------------------

def test_product_preserves_optional_axioms_iff_factors_do():
    axs = ("join-monotone", "exchange", "aligned", "restrict-monotone")
    factors = [
        M.chain_model(2, 2),
        M.twisted_bit_model(),  # fails join-monotone/exchange (and lub)
    ]
    reports = {m.name: A.check_axioms(m, axs) for m in factors}
    for m1, m2 in itertools.product(factors, repeat=2):
        prod = M.product(m1, m2)
        got = A.check_axioms(prod, axs)
        for ax in axs:
            expect = reports[m1.name].holds(ax) and reports[m2.name].holds(ax)
            assert got.holds(ax) == expect, (m1.name, m2.name, ax)


def test_twisted_bit_fails_join_monotonicity():
    report = A.check_axioms(M.twisted_bit_model(), ["join-monotone"])
    assert not report.holds("join-monotone")
    assert A.replay_witness(
        M.twisted_bit_model(), "join-monotone", report.witnesses["join-monotone"]
    )


# --- report plumbing ---------------------------------------------------------------

def test_report_json_and_selection():
    m = M.chain_model(2, 2)
    report = A.check_axioms(m, ["refine", "exchange"])
    blob = report.to_json()
    assert blob["axioms"]["refine"]["holds"]
    assert "coverage" in blob["axioms"]["exchange"]
    with pytest.raises(ValueError):
        A.check_axioms(m, ["no-such-axiom"])
