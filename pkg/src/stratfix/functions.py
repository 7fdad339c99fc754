"""Functions between finite models, with stratum-monotonicity evidence.

A :class:`StratifiedFn` is a table over the flattened cartesian product of
its argument carriers.  It comes with provenance: enumerated functions are
monotone by construction of the search, table-checked ones were verified
against every stratum preorder, term-generated ones are built from
operations that preserve the preorders and are verified again after
compilation.

Term generation over level-truncated interpretation spaces excludes
negation wherever a subterm could already reach the top level: negation
bumps levels by one, and the truncated domain has nothing above its cap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from random import Random

from stratfix import kernel
from stratfix import values as V
from stratfix.errors import ArityMismatch, KappaMismatch, TooLarge
from stratfix.models import FiniteModel

#: flattened domains above this size are not enumerable here
DOMAIN_GUARD = 125

#: relation packs are quadratic in the domain; single-table checks allow
#: larger domains than enumeration does
PACK_GUARD = 4096


def _dom_size(doms) -> int:
    size = 1
    for m in doms:
        size *= m.n
    return size


def _require_same_kappa(models):
    kappas = {m.kappa for m in models}
    if len(kappas) != 1:
        raise KappaMismatch(f"mixed stratum counts: {sorted(kappas)}")


def domain_pack(doms: tuple[FiniteModel, ...]) -> bytes:
    """Pointwise stratum relations on the flattened product domain."""
    _require_same_kappa(doms)
    anchor = doms[0]
    key = ("dompack", doms[1:])
    cached = anchor._caches.get(key)
    if cached is not None:
        return cached

    kappa = anchor.kappa
    points = list(itertools.product(*[range(m.n) for m in doms]))
    d = len(points)
    if d > PACK_GUARD:
        raise TooLarge(f"flattened domain has {d} points (pack guard {PACK_GUARD})")
    out = bytearray(kappa * d * d)
    for alpha in range(kappa):
        base = alpha * d * d
        rows = [m.sq_up[alpha] for m in doms]
        for i, xs in enumerate(points):
            for j, ys in enumerate(points):
                if all(r[x] >> y & 1 for r, x, y in zip(rows, xs, ys)):
                    out[base + i * d + j] = 1
    packed = bytes(out)
    anchor._caches[key] = packed
    return packed


@dataclass(frozen=True)
class StratifiedFn:
    """A function between finite models given by its (flattened) graph."""

    doms: tuple[FiniteModel, ...]
    cod: FiniteModel
    table: bytes
    provenance: str = "table-checked"

    def __post_init__(self):
        if len(self.table) != _dom_size(self.doms):
            raise ArityMismatch(
                f"table length {len(self.table)} does not match domain "
                f"size {_dom_size(self.doms)}"
            )
        _require_same_kappa((*self.doms, self.cod))

    @property
    def arity(self) -> int:
        return len(self.doms)

    def flat_index(self, *idx: int) -> int:
        if len(idx) != len(self.doms):
            raise ArityMismatch(f"expected {len(self.doms)} arguments")
        pos = 0
        for m, i in zip(self.doms, idx):
            pos = pos * m.n + i
        return pos

    def __call__(self, *idx: int) -> int:
        return self.table[self.flat_index(*idx)]

    def is_stratum_monotone(self) -> bool:
        return kernel.check_monotone(
            self.table,
            _dom_size(self.doms),
            self.cod.n,
            self.cod.kappa,
            domain_pack(self.doms),
            self.cod.kernel_pack()["sq"],
        )

    def checked(self) -> "StratifiedFn":
        if not self.is_stratum_monotone():
            raise ArityMismatch("table is not stratum-monotone")
        return self


def enumerate_monotonic_fns(model: FiniteModel, arity: int,
                            codomain: FiniteModel | None = None):
    """Every function ``model^arity -> codomain`` preserving all stratum
    preorders, in deterministic order."""
    return enumerate_fn_tables((model,) * arity, codomain or model)


def enumerate_fn_tables(doms: tuple[FiniteModel, ...], cod: FiniteModel):
    _require_same_kappa((*doms, cod))
    d = _dom_size(doms)
    if d > DOMAIN_GUARD:
        raise TooLarge(f"flattened domain has {d} points (guard {DOMAIN_GUARD})")
    tables = kernel.enum_monotone(
        d, cod.n, cod.kappa, domain_pack(doms), cod.kernel_pack()["sq"]
    )
    return [
        StratifiedFn(doms, cod, t, provenance="enumerated") for t in tables
    ]


# --- term-generated functions over truncated interpretation spaces -----------


@dataclass(frozen=True)
class TermFn:
    """A tuple of value-level terms, one per output atom.

    Arguments and output are interpretations; the term language is join,
    meet, negation, constants and coordinate projections.
    """

    arg_atoms: tuple[tuple[str, ...], ...]
    out_atoms: tuple[str, ...]
    exprs: tuple  # one scalar expression per output atom
    maxlevel: int

    def eval(self, args: tuple[V.Interpretation, ...]) -> V.Interpretation:
        if len(args) != len(self.arg_atoms):
            raise ArityMismatch(f"expected {len(self.arg_atoms)} arguments")
        vals = tuple(_eval_scalar(e, args) for e in self.exprs)
        return V.Interpretation(self.out_atoms, vals)

    def compile(self, doms: tuple[FiniteModel, ...], cod: FiniteModel) -> StratifiedFn:
        """Tabulate over truncated interpretation models and re-check."""
        spaces = [m.extra["interpretations"] for m in doms]
        out_index = cod.extra["interp_index"]
        table = bytearray(_dom_size(doms))
        pos = 0
        for combo in itertools.product(*spaces):
            table[pos] = out_index[self.eval(combo)]
            pos += 1
        fn = StratifiedFn(doms, cod, bytes(table), provenance="term-generated")
        return fn.checked()


def _eval_scalar(expr, args):
    op = expr[0]
    if op == "proj":
        _, k, atom = expr
        return args[k][atom]
    if op == "const":
        return expr[1]
    if op == "neg":
        return V.tv_neg(_eval_scalar(expr[1], args))
    a = _eval_scalar(expr[1], args)
    b = _eval_scalar(expr[2], args)
    return V.tv_join(a, b) if op == "join" else V.tv_meet(a, b)


def _gen_scalar(rng: Random, arg_atoms, maxlevel: int, depth: int):
    """Returns (expression, level-cap): the cap bounds every finite level
    the expression can produce, gating negation away from the boundary."""
    leaf_only = depth <= 0
    roll = rng.random()
    if leaf_only or roll < 0.35:
        if rng.random() < 0.65:
            k = rng.randrange(len(arg_atoms))
            atom = rng.choice(arg_atoms[k])
            return ("proj", k, atom), maxlevel
        value = rng.choice(_level_values(maxlevel))
        cap = -1 if value.polarity == "0" else value.level
        return ("const", value), cap
    if roll < 0.80:
        op = "join" if rng.random() < 0.5 else "meet"
        a, ca = _gen_scalar(rng, arg_atoms, maxlevel, depth - 1)
        b, cb = _gen_scalar(rng, arg_atoms, maxlevel, depth - 1)
        return (op, a, b), max(ca, cb)
    sub, cap = _gen_scalar(rng, arg_atoms, maxlevel, depth - 1)
    if cap + 1 <= maxlevel:
        new_cap = cap + 1 if cap >= 0 else -1
        return ("neg", sub), new_cap
    return sub, cap


def _level_values(maxlevel: int):
    return (
        [V.F(k) for k in range(maxlevel + 1)]
        + [V.ZERO]
        + [V.T(k) for k in range(maxlevel + 1)]
    )


def random_term_fn(rng: Random, arg_atoms, out_atoms, maxlevel: int,
                   depth: int = 3) -> TermFn:
    exprs = tuple(
        _gen_scalar(rng, tuple(map(tuple, arg_atoms)), maxlevel, depth)[0]
        for _ in out_atoms
    )
    return TermFn(tuple(map(tuple, arg_atoms)), tuple(out_atoms), exprs, maxlevel)
