import time
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratfix import programs as P
from stratfix import values as V
from stratfix.errors import ProgramSyntaxError
from stratfix.fixpoint import inner_fix, InterpretationOps
from stratfix.values import F, T, ZERO, Interpretation

FIVE_RULE = """
% negation chain feeding an oscillator, plus one plain fact
p :- not q.
q :- not r.
s :- p.
s :- not s.
t.
"""


def model_dict(text, **kw):
    result = P.solve(P.parse_program(text), P.SolveOptions(**kw))
    return result.model.as_dict(), result


# --- parsing ------------------------------------------------------------------

def test_parse_fact():
    prog = P.parse_program("t.")
    assert prog.atoms == ("t",)
    assert prog.rules == (P.Rule("t"),)


def test_parse_negation():
    prog = P.parse_program("p :- not q.")
    assert prog.rules[0] == P.Rule("p", (("q", True),))
    assert prog.atoms == ("p", "q")


def test_parse_missing_comma():
    with pytest.raises(ProgramSyntaxError) as err:
        P.parse_program("p :- q not r.")
    assert err.value.line == 1
    assert err.value.column == 8


def test_parse_error_positions():
    with pytest.raises(ProgramSyntaxError) as err:
        P.parse_program("p :- q.\nq :- Not r.\n")
    assert err.value.line == 2


def test_parse_comments_and_crlf():
    prog = P.parse_program("% header\r\nt. % trailing\r\np :- t.\r\n")
    assert prog.atoms == ("t", "p")
    assert len(prog.rules) == 2


def test_parse_duplicate_rules_normalized():
    prog = P.parse_program("t. t. p :- t. p :- t.")
    assert len(prog.rules) == 2


def test_parse_rejects_garbage():
    with pytest.raises(ProgramSyntaxError):
        P.parse_program("p :- q,. ")
    with pytest.raises(ProgramSyntaxError):
        P.parse_program("P :- q.")
    with pytest.raises(ProgramSyntaxError):
        P.parse_program("p : - q.")


def test_round_trip_text():
    prog = P.parse_program(FIVE_RULE)
    assert P.parse_program(prog.to_text()) == prog


# --- one-step consequence ------------------------------------------------------

def test_consequence_fact():
    prog = P.parse_program("t.")
    f = P.immediate_consequence(prog)
    assert f(Interpretation.bottom(("t",)))["t"] == T(0)


def test_consequence_negation_shift():
    prog = P.parse_program("q :- not r.")
    f = P.immediate_consequence(prog)
    i = Interpretation(("q", "r"), (F(0), F(0)))
    assert f(i)["q"] == T(1)


def test_consequence_ruleless_atom_is_false():
    prog = P.parse_program("q :- not r.")
    f = P.immediate_consequence(prog)
    i = Interpretation(("q", "r"), (T(0), T(0)))
    assert f(i)["r"] == F(0)


def test_consequence_is_stratum_monotone_on_samples():
    prog = P.parse_program(FIVE_RULE)
    f = P.immediate_consequence(prog)
    rng = Random(11)
    values = [F(0), F(1), F(2), ZERO, T(2), T(1), T(0)]
    bound = 4
    for _ in range(800):
        a = Interpretation(prog.atoms, tuple(rng.choice(values) for _ in prog.atoms))
        b = Interpretation(prog.atoms, tuple(rng.choice(values) for _ in prog.atoms))
        for alpha in range(bound):
            if V.stratum_le(a, b, alpha):
                assert V.stratum_le(f(a), f(b), alpha)


def test_first_inner_stage_of_the_five_rule_program():
    prog = P.parse_program(FIVE_RULE)
    f = P.immediate_consequence(prog)
    ops = InterpretationOps(prog.atoms)
    z, _ = inner_fix(f, ops.bottom(), None, 0, ops)
    assert z.as_dict() == {
        "p": F(1), "q": F(1), "r": F(0), "s": F(1), "t": T(0)
    }


# --- the solver -------------------------------------------------------------------

def test_five_rule_program_minimum_model():
    got, result = model_dict(FIVE_RULE)
    assert got == {"p": F(2), "q": T(1), "r": F(0), "s": ZERO, "t": T(0)}
    assert result.settled_at == {
        "p": 2, "q": 1, "r": 0, "s": "limit", "t": 0
    }
    assert result.stop_reason == "settlement"


def test_self_negation_is_unknown():
    got, result = model_dict("p :- not p.")
    assert got == {"p": ZERO}


def test_negation_free_program_is_classical():
    got, result = model_dict("q. p :- q.")
    assert got == {"q": T(0), "p": T(0)}
    assert result.stop_reason == "fixpoint"


def test_negation_free_programs_use_only_level_zero():
    rng = Random(3)
    for _ in range(60):
        prog = P.random_program(rng, density_range=(0.0, 0.0))
        model = P.solve(prog).model
        assert all(
            v in (F(0), T(0)) for v in model.values
        )
        true_set = {a for a, v in model.as_dict().items() if v == T(0)}
        classical = P._reduct_least_model(
            [(r.head, r.body) for r in prog.rules], frozenset()
        )
        assert true_set == set(classical)


def test_empty_program():
    result = P.solve(P.parse_program("% nothing\n"))
    assert result.model.atoms == ()


def test_solver_result_is_exact_fixed_point():
    rng = Random(17)
    for _ in range(80):
        prog = P.random_program(rng)
        result = P.solve(prog)
        f = P.immediate_consequence(prog)
        assert f(result.model) == result.model


def test_solve_is_rule_order_insensitive():
    rng = Random(23)
    for _ in range(30):
        prog = P.random_program(rng)
        if len(prog.rules) < 2:
            continue
        rules = list(prog.rules)
        rng.shuffle(rules)
        permuted = P.Program.from_rules(rules, extra_atoms=prog.atoms)
        assert P.solve(permuted).model.as_dict() == P.solve(prog).model.as_dict()


def test_solve_is_atom_order_insensitive():
    prog = P.parse_program(FIVE_RULE)
    reordered = P.Program(tuple(reversed(prog.atoms)), prog.rules)
    assert P.solve(reordered).model.as_dict() == P.solve(prog).model.as_dict()


def test_settled_levels_match_value_levels():
    rng = Random(31)
    for _ in range(40):
        result = P.solve(P.random_program(rng))
        for a, v in result.model.as_dict().items():
            if v.polarity == "0":
                assert result.settled_at[a] == "limit"
            else:
                assert result.settled_at[a] == v.level


def test_deep_negation_chain_fits_the_default_budget():
    # a0. a1 :- not a0. ... a7 :- not a6. needs eight strata; the default
    # budget 4*atoms+4 leaves plenty of room
    lines = ["a0."] + [f"a{i} :- not a{i-1}." for i in range(1, 8)]
    result = P.solve(P.parse_program("\n".join(lines)))
    assert result.model["a7"].level == 7
    assert result.strata_used <= 4 * 8 + 4


def test_trace_records_strata():
    result = P.solve(
        P.parse_program(FIVE_RULE), P.SolveOptions(trace=True)
    )
    assert result.strata_used == len(result.trace.records)
    assert result.trace.inner  # chains retained under trace


# --- three-valued collapse and oracle ------------------------------------------------

def test_collapse_examples():
    assert P.collapse_wfs(Interpretation(("p",), (F(2),))) == {"p": "false"}
    assert P.collapse_wfs(Interpretation(("s",), (ZERO,))) == {"s": "undefined"}


def test_oracle_on_the_five_rule_program():
    prog = P.parse_program(FIVE_RULE)
    expect = {"p": "false", "q": "true", "r": "false", "s": "undefined", "t": "true"}
    assert P.wfs_oracle(prog) == expect
    assert P.collapse_wfs(P.solve(prog).model) == expect


def test_oracle_self_negation():
    assert P.wfs_oracle(P.parse_program("p :- not p.")) == {"p": "undefined"}


def test_oracle_negation_free():
    assert P.wfs_oracle(P.parse_program("q. p :- q.")) == {
        "q": "true", "p": "true"
    }


def test_solver_agrees_with_oracle_on_random_programs():
    rng = Random(41)
    for _ in range(150):
        prog = P.random_program(rng)
        assert P.collapse_wfs(P.solve(prog).model) == P.wfs_oracle(prog)


def test_five_rule_program_is_fast():
    start = time.perf_counter()
    model_dict(FIVE_RULE)
    assert time.perf_counter() - start < 1.0


# --- generated-program properties ----------------------------------------------------

atom_names = st.sampled_from([f"a{i}" for i in range(6)])
literals = st.tuples(atom_names, st.booleans())
rules = st.builds(
    P.Rule, atom_names, st.tuples(*[literals for _ in range(2)]) | st.just(())
)
programs = st.lists(rules, max_size=10).map(P.Program.from_rules)


@settings(max_examples=120, deadline=None)
@given(programs)
def test_generated_programs_round_trip_and_agree(prog):
    assert P.parse_program(prog.to_text()) == prog
    result = P.solve(prog)
    assert P.immediate_consequence(prog)(result.model) == result.model
    assert P.collapse_wfs(result.model) == P.wfs_oracle(prog)
