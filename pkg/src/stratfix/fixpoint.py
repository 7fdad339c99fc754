"""The two-level stratified least fixed point construction.

The engine is generic over any domain exposing bottom, finite joins, the
per-stratum preorders and restriction: finite tables
(:class:`stratfix.models.FiniteModel`) and interpretation spaces
(:class:`InterpretationOps`) both qualify.

Inner level (:func:`inner_fix`): from a start point below its own image,
iterate the function until the chain repeats up to stratum equivalence,
then return the restriction of the plateau point.  On finite tables the
plateau test is exact; on interpretation spaces the restriction must hold
still for a configurable window of consecutive steps and the result is
re-checked against the function (failures raise, never pass silently).

Outer level (:func:`stratified_fix`): stage the inner results stratum by
stratum, starting each stage from the join of the earlier ones.  The
staging policy decides when to stop: a fixed stratum count for finite
models, stop-on-fixed-point or a caller-supplied policy otherwise.

Once a stage satisfies f(z) = z every later stage returns z again: z is
the least element of its own equivalence class at every higher stratum,
so each later inner chain is constant and its restriction is z itself.
That is why early stopping is sound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from stratfix import kernel
from stratfix import values as V
from stratfix.errors import (
    ArityMismatch,
    InnerNotConverged,
    NotConverged,
    PreconditionViolated,
)
from stratfix.functions import StratifiedFn, _dom_size
from stratfix.models import FiniteModel


@dataclass(frozen=True)
class InnerTrace:
    alpha: int
    steps: int
    stabilized_at: int
    result: object
    chain: tuple = ()


@dataclass(frozen=True)
class StratumRecord:
    alpha: int
    start: object
    result: object
    inner_steps: int


@dataclass(frozen=True)
class OuterTrace:
    records: tuple[StratumRecord, ...]
    value: object
    strata_used: int
    stop_reason: str = "exact"
    inner: tuple = ()


def inner_fix(f, x, y, alpha: int, ops, *, budget: int | None = None,
              keep_chain: bool = False):
    """Least stratum-``alpha`` stage of ``f`` above ``x``.

    Requires x to be below f(x, y) at the stratum.  Returns the
    restriction of the chain's plateau point together with a trace, and
    verifies the result is equivalent to its own image before returning.
    """
    fx = f(x, y)
    if not ops.stratum_le(x, fx, alpha):
        raise PreconditionViolated(
            f"start point is not below its image at stratum {alpha}"
        )
    window = getattr(ops, "inner_plateau_window", 1)
    if budget is None:
        budget = ops.chain_budget()

    chain = [x] if keep_chain else None
    c = x
    prev = ops.restrict(x, alpha)
    plateau = 0
    steps = 0
    stabilized = 0
    while True:
        cn = f(c, y)
        if keep_chain:
            chain.append(cn)
        steps += 1
        r = ops.restrict(cn, alpha)
        if ops.equal(r, prev):
            plateau += 1
            if plateau >= window:
                z = r
                break
        else:
            plateau = 0
            prev = r
            stabilized = steps
        c = cn
        if steps > budget:
            raise InnerNotConverged(
                f"no stratum-{alpha} plateau within {budget} steps; raise "
                "the budget or the plateau window"
            )
    if not ops.stratum_eq(z, f(z, y), alpha):
        raise InnerNotConverged(
            f"plateau value is not equivalent to its image at stratum "
            f"{alpha}; the plateau window is too small"
        )
    return z, InnerTrace(
        alpha, steps, stabilized, z, tuple(chain) if keep_chain else ()
    )


class ExactStrata:
    """Run every stratum below ``kappa`` and join the stages."""

    def __init__(self, kappa: int):
        self.kappa = kappa

    def finished(self, alpha: int) -> bool:
        return alpha >= self.kappa

    def after_stratum(self, alpha, z, f, y, ops):
        return None


class StopOnFixpoint:
    """Stop at the first stage that is an exact fixed point; give up
    loudly after ``budget`` strata."""

    def __init__(self, budget: int):
        self.budget = budget

    def finished(self, alpha: int) -> bool:
        if alpha > self.budget:
            raise NotConverged(
                f"no fixed point within {self.budget} strata"
            )
        return False

    def after_stratum(self, alpha, z, f, y, ops):
        if ops.equal(f(z, y), z):
            return z
        return None


def stratified_fix(f, y, ops, policy, *, trace: bool = False,
                   inner_budget: int | None = None):
    """Stratified least fixed point of ``f(., y)`` over ``ops``.

    ``policy`` is an integer (exact stratum count) or an object with
    ``finished(alpha)`` and ``after_stratum(alpha, z, f, y, ops)``; the
    latter may return a final value to stop early.
    """
    if isinstance(policy, int):
        policy = ExactStrata(policy)
    records = []
    inner_traces = []
    zs = []
    alpha = 0
    while not policy.finished(alpha):
        x = ops.join(zs) if zs else ops.bottom()
        z, itrace = inner_fix(
            f, x, y, alpha, ops, budget=inner_budget, keep_chain=trace
        )
        records.append(StratumRecord(alpha, x, z, itrace.steps))
        if trace:
            inner_traces.append(itrace)
        zs.append(z)
        final = policy.after_stratum(alpha, z, f, y, ops)
        if final is not None:
            return final, OuterTrace(
                tuple(records), final, alpha + 1, "early-fixpoint",
                tuple(inner_traces),
            )
        alpha += 1
    value = ops.join(zs) if zs else ops.bottom()
    return value, OuterTrace(
        tuple(records), value, alpha, "exact", tuple(inner_traces)
    )


# --- finite-model front ends ---------------------------------------------------


def dagger(fn: StratifiedFn) -> StratifiedFn | int:
    """Parametrized stratified least fixed point of a table function.

    ``fn`` must map L x P1 x ... x Pk back into its first argument model
    L.  With parameters the result is the table P1 x ... x Pk -> L; with
    none it is a single element index.  This is the kernel fast path; it
    agrees with :func:`stratified_fix` over the model (tested, not
    assumed).
    """
    model = fn.doms[0] if fn.doms else None
    if model is None or fn.cod is not model:
        raise ArityMismatch(
            "dagger needs a function from L x params back into L"
        )
    params = fn.doms[1:]
    n_param = _dom_size(params)
    pack = model.kernel_pack()
    result = kernel.dagger_table(
        fn.table, model.n, n_param, model.kappa,
        pack["sq"], pack["join"], pack["restrict"], pack["bottom"],
    )
    if not params:
        return result[0]
    return StratifiedFn(params, model, result, provenance="dagger")


def dagger_reference(fn: StratifiedFn) -> StratifiedFn | int:
    """Same contract as :func:`dagger` through the generic engine; used to
    cross-check the kernel."""
    model = fn.doms[0]
    params = fn.doms[1:]
    n_param = _dom_size(params)
    if not params:
        value, _ = stratified_fix(
            lambda x, _y: fn.table[x], None, model, model.kappa
        )
        return value
    out = bytearray(n_param)
    for p in range(n_param):
        value, _ = stratified_fix(
            lambda x, _y, p=p: fn.table[x * n_param + p],
            None, model, model.kappa,
        )
        out[p] = value
    return StratifiedFn(params, model, bytes(out), provenance="dagger")


def least_prefix_check(model: FiniteModel, f: Callable[[int], int],
                       v: int) -> bool:
    """Ground-truth oracle: v is below every pre-fixed point of f in the
    global stratified order, by full enumeration."""
    for w in range(model.n):
        if model.stratified_le(f(w), w) and not model.stratified_le(v, w):
            return False
    return True


def knaster_tarski_lfp(model: FiniteModel, f: Callable[[int], int]) -> int:
    """Classical least fixed point by plain lattice iteration from bottom;
    independent of the stratified machinery."""
    x = model.bottom()
    for _ in range(model.n + 1):
        fx = f(x)
        if fx == x:
            return x
        x = fx
    raise NotConverged("lattice iteration did not close; f is not monotone")


# --- interpretation spaces -------------------------------------------------------


class InterpretationOps:
    """Engine adapter for the full interpretation space over an atom tuple."""

    def __init__(self, atoms, *, plateau_window: int | None = None,
                 level_cap: int = V.DEFAULT_LEVEL_CAP):
        self.atoms = tuple(atoms)
        self.level_cap = level_cap
        # the chain itself need not settle (levels keep climbing); its
        # restriction ranges over a finite set, so a plateau of this many
        # consecutive steps is the stop signal
        self.inner_plateau_window = (
            plateau_window if plateau_window else len(self.atoms) + 2
        )

    def bottom(self) -> V.Interpretation:
        return V.Interpretation.bottom(self.atoms)

    def join(self, items):
        items = list(items)
        return V.interp_join(items) if items else self.bottom()

    def stratum_le(self, a, b, alpha):
        return V.stratum_le(a, b, alpha)

    def stratum_eq(self, a, b, alpha):
        return V.stratum_eq(a, b, alpha)

    def stratum_lub(self, members, alpha, witness=None):
        return V.stratum_lub(list(members), alpha, witness)

    def restrict(self, a, alpha):
        return V.restrict(a, alpha)

    def equal(self, a, b):
        return a == b

    def chain_budget(self) -> int:
        return 200 + 50 * len(self.atoms)
