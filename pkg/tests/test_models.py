import itertools

import pytest

from stratfix import models as M
from stratfix import values as V
from stratfix.errors import (
    ConditionViolated,
    KappaMismatch,
    NotALattice,
    NotAlphaCompatible,
)


def test_chain_model_shape():
    m = M.chain_model(2, 2)
    assert m.n == 2 and m.kappa == 2
    b, t = m.bottom(), m.top()
    assert m.leq_idx(b, t)
    assert m.sq_idx(b, t, 0)          # stratum 0 is the lattice order
    assert not m.sq_idx(b, t, 1)      # stratum 1 is equality
    assert m.sq_idx(t, t, 1)


def test_one_element_model_is_trivial():
    m = M.lattice_as_model(["x"], [("x", "x")], 1)
    assert m.bottom() == m.top() == 0
    assert m.stratum_lub([0], 0) == 0


def test_not_a_lattice_rejected():
    # two maximal elements, no top
    carrier = ["b", "x", "y"]
    leq = [("b", "x"), ("b", "y")]
    with pytest.raises(NotALattice):
        M.lattice_as_model(carrier, leq, 1)


def test_non_transitive_rejected():
    carrier = ["a", "b", "c"]
    leq = [("a", "b"), ("b", "c")]  # missing (a, c)
    with pytest.raises(NotALattice):
        M.FiniteModel(carrier, 1, leq, [leq])


def test_join_meet_tables_on_diamond():
    m = M.diamond_model(1)
    i = m.index
    jt = m.join_table()
    mt = m.meet_table()
    assert jt[i["a"]][i["b"]] == i["top"]
    assert mt[i["a"]][i["b"]] == i["bot"]
    assert m.join([i["a"], i["b"], i["bot"]]) == i["top"]


def test_two_order_model_accepts_aligned():
    carrier = ["a", "b", "c"]
    leq = [("a", "b"), ("b", "c"), ("a", "c")]
    m = M.two_order_model(carrier, leq, leq)
    assert m.kappa == 2
    assert m.sq_idx(m.index["a"], m.index["c"], 0)


def test_two_order_model_equality_stratum_needs_singleton():
    # equality is a complete lattice order only on one element
    m = M.two_order_model(["x"], [("x", "x")], [("x", "x")])
    assert m.n == 1
    with pytest.raises(NotALattice):
        M.two_order_model(
            ["a", "b"], [("a", "b")], []
        )  # equality on two elements has no joins


def test_two_order_model_rejects_reversed():
    carrier = ["a", "b"]
    leq = [("a", "b")]
    rev = [("b", "a")]
    with pytest.raises(ConditionViolated) as err:
        M.two_order_model(carrier, leq, rev)
    assert err.value.witness == ("b", "a")
    assert any("pointwise" in c for c in err.value.failed_conditions)


def test_two_order_model_reports_all_three_conditions():
    # the three formulations are equivalent, so a reversed 3-chain breaks
    # every one of them and the report says so
    carrier = ["a", "b", "c"]
    leq = [("a", "b"), ("b", "c"), ("a", "c")]
    rev = [("c", "b"), ("b", "a"), ("c", "a")]
    with pytest.raises(ConditionViolated) as err:
        M.two_order_model(carrier, leq, rev)
    kinds = {c.split(":")[0] for c in err.value.failed_conditions}
    assert kinds == {"pointwise", "joins", "bounds"}


def test_truncated_truth_model_sizes():
    m0 = M.truncated_truth_model(0, ["p"])
    assert m0.n == 3 and m0.kappa == 1
    m1 = M.truncated_truth_model(1, ["p"])
    assert m1.n == 5 and m1.kappa == 2
    m2 = M.truncated_truth_model(2, ["p", "q"])
    assert m2.n == 49 and m2.kappa == 3


def test_truncated_truth_model_orders_match_pointwise_defs():
    m = M.truncated_truth_model(1, ["p"])
    interps = m.extra["interpretations"]
    for x, ix in enumerate(interps):
        for y, iy in enumerate(interps):
            assert m.leq_idx(x, y) == ix.leq(iy)
            for alpha in range(m.kappa):
                assert m.sq_idx(x, y, alpha) == V.stratum_le(ix, iy, alpha)


def test_truncated_restriction_matches_value_formula_below_boundary():
    m = M.truncated_truth_model(2, ["p"])
    interps = m.extra["interpretations"]
    idx = m.extra["interp_index"]
    for x, ix in enumerate(interps):
        # below the top stratum the table search and the value formula agree
        for alpha in range(m.kappa - 1):
            assert m.restrict(x, alpha) == idx[V.restrict(ix, alpha)]


def test_stratum_lub_on_tables_examples():
    m = M.truncated_truth_model(1, ["p"])
    idx = m.extra["interp_index"]

    def at(text):
        return idx[V.Interpretation(("p",), (V.tv(text),))]

    assert m.stratum_lub([at("F0"), at("F0")], 0) == at("F0")
    assert m.stratum_lub([at("F1"), at("T1")], 0) == at("F1")
    # at the top stratum the in-between level is gone and 0 serves as lub
    assert m.stratum_lub([at("F1"), at("0")], 1) == at("0")
    with pytest.raises(NotAlphaCompatible):
        m.stratum_lub([at("F0"), at("T0")], 1)


def test_twisted_bit_model_maxima():
    m = M.twisted_bit_model()
    assert m.leq_max_id() == "11"
    assert m.stratified_max_id() == "10"


def test_truth_model_maxima_coincide():
    # unlike the twisted fixture, the truth domain tops out at all-T0 in
    # both orders
    m = M.truncated_truth_model(1, ["p", "q"])
    assert m.leq_max_id() == m.stratified_max_id() == "p=T0,q=T0"


def test_global_order_on_lattice_models_is_leq():
    m = M.diamond_model(3)
    for x in range(m.n):
        for y in range(m.n):
            assert m.stratified_le(x, y) == m.leq_idx(x, y)


def test_global_order_is_partial_order_with_bottom():
    for m in [
        M.truncated_truth_model(1, ["p"]),
        M.twisted_bit_model(),
        M.diamond_model(2),
    ]:
        b = m.bottom()
        for x in range(m.n):
            assert m.stratified_le(b, x)
            assert m.stratified_le(x, x)
        for x, y in itertools.permutations(range(m.n), 2):
            if m.stratified_le(x, y) and m.stratified_le(y, x):
                raise AssertionError("antisymmetry broken")
        for x, y, z in itertools.product(range(m.n), repeat=3):
            if m.stratified_le(x, y) and m.stratified_le(y, z):
                assert m.stratified_le(x, z)


def stratified_sup(m, members):
    up = m.stratified_up()
    ub = m._full
    for x in members:
        ub &= up[x]
    for z in M._bits(ub):
        if ub & ~up[z] == 0:
            return z
    return None


def test_global_order_is_finitely_complete_on_valid_models():
    # every subset has a stratified supremum (checked pairwise + extremes)
    for m in [M.truncated_truth_model(1, ["p"]), M.diamond_model(2)]:
        for x in range(m.n):
            for y in range(m.n):
                assert stratified_sup(m, [x, y]) is not None
        assert stratified_sup(m, []) is not None
        assert stratified_sup(m, list(range(m.n))) is not None


def test_product_of_chains_is_diamond_like():
    c = M.chain_model(2, 2)
    p = M.product(c, c)
    assert p.n == 4
    i = p.index
    bot = i[("c0", "c0")]
    top = i[("c1", "c1")]
    a, b = i[("c0", "c1")], i[("c1", "c0")]
    assert p.join([a, b]) == top and p.meet([a, b]) == bot
    assert not p.leq_idx(a, b)


def test_product_kappa_mismatch():
    with pytest.raises(KappaMismatch):
        M.product(M.chain_model(2, 1), M.chain_model(2, 2))


def test_power_one_is_isomorphic():
    m = M.truncated_truth_model(0, ["p"])
    p = M.power(m, 1)
    assert p.n == m.n
    for x in range(m.n):
        for y in range(m.n):
            assert p.leq_idx(x, y) == m.leq_idx(x, y)
            for alpha in range(m.kappa):
                assert p.sq_idx(x, y, alpha) == m.sq_idx(x, y, alpha)


def test_product_global_order_matches_componentwise_formula():
    m1 = M.truncated_truth_model(0, ["p"])
    m2 = M.chain_model(2, 1)
    p = M.product(m1, m2)
    for xi, x in enumerate(p.ids):
        for yi, y in enumerate(p.ids):
            if xi == yi:
                continue
            x1, x2 = m1.index[x[0]], m2.index[x[1]]
            y1, y2 = m1.index[y[0]], m2.index[y[1]]
            formula = any(
                m1.sq_idx(x1, y1, a)
                and m2.sq_idx(x2, y2, a)
                and (
                    (m1.sq_idx(x1, y1, a) and not m1.sq_idx(y1, x1, a))
                    or (m2.sq_idx(x2, y2, a) and not m2.sq_idx(y2, x2, a))
                )
                for a in range(p.kappa)
            )
            assert p.stratified_le(xi, yi) == formula


def test_all_lattices_counts():
    # known counts of lattices up to isomorphism: 1, 1, 1, 2, 5
    sizes = [len([1 for c, _ in M.all_lattices(k) if len(c) == k]) for k in (1, 2, 3, 4, 5)]
    assert sizes == [1, 1, 1, 2, 5]


def test_json_round_trip():
    for m in [M.twisted_bit_model(), M.chain_model(3, 2), M.product(M.chain_model(2, 1), M.chain_model(2, 1))]:
        again = M.FiniteModel.from_json_dict(m.to_json_dict())
        assert again.ids == m.ids
        assert again.leq_up == m.leq_up
        assert again.sq_up == m.sq_up
