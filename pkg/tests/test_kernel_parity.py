"""The compiled kernel and its pure-Python twin must agree exactly."""

from random import Random

import pytest

from stratfix import _kernel_py as pure
from stratfix import functions as FN
from stratfix import models as M

compiled = pytest.importorskip(
    "stratfix._kernel", reason="compiled kernel not built"
)

MODELS = [
    M.chain_model(3, 2),
    M.diamond_model(3),
    M.truncated_truth_model(0, ["p"]),
    M.truncated_truth_model(1, ["p"]),
    M.twisted_bit_model(),
]


@pytest.mark.parametrize("m", MODELS, ids=lambda m: m.name)
def test_enum_monotone_parity(m):
    pack = m.kernel_pack()
    dom = FN.domain_pack((m,))
    a = compiled.enum_monotone(m.n, m.n, m.kappa, dom, pack["sq"])
    b = pure.enum_monotone(m.n, m.n, m.kappa, dom, pack["sq"])
    assert a == b


def test_enum_monotone_parity_binary():
    m = M.truncated_truth_model(0, ["p"])
    dom = FN.domain_pack((m, m))
    pack = m.kernel_pack()
    a = compiled.enum_monotone(m.n * m.n, m.n, m.kappa, dom, pack["sq"])
    b = pure.enum_monotone(m.n * m.n, m.n, m.kappa, dom, pack["sq"])
    assert a == b


@pytest.mark.parametrize("m", MODELS[:4], ids=lambda m: m.name)
def test_check_monotone_parity_on_random_tables(m):
    rng = Random(21)
    pack = m.kernel_pack()
    dom = FN.domain_pack((m,))
    for _ in range(300):
        table = bytes(rng.randrange(m.n) for _ in range(m.n))
        assert compiled.check_monotone(
            table, m.n, m.n, m.kappa, dom, pack["sq"]
        ) == pure.check_monotone(table, m.n, m.n, m.kappa, dom, pack["sq"])


@pytest.mark.parametrize("m", MODELS[:4], ids=lambda m: m.name)
def test_dagger_parity(m):
    pack = m.kernel_pack()
    for fn in FN.enumerate_monotonic_fns(m, 1):
        args = (
            fn.table, m.n, 1, m.kappa,
            pack["sq"], pack["join"], pack["restrict"], pack["bottom"],
        )
        assert compiled.dagger_table(*args) == pure.dagger_table(*args)


def test_dagger_parity_parametrized():
    L = M.truncated_truth_model(0, ["p"])
    P = M.chain_model(3, 1)
    pack = L.kernel_pack()
    for fn in FN.enumerate_fn_tables((L, P), L):
        args = (
            fn.table, L.n, P.n, L.kappa,
            pack["sq"], pack["join"], pack["restrict"], pack["bottom"],
        )
        assert compiled.dagger_table(*args) == pure.dagger_table(*args)
