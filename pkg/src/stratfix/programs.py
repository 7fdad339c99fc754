"""Propositional logic programs with negation, and their level-valued
minimum models.

The solver runs the stratified fixed point of the program's one-step
consequence operator over the full interpretation space with the
SETTLEMENT policy: each stratum pins the atoms whose value lands exactly
at that level; the first stratum that pins nothing sends every remaining
atom to the unknown value.  The candidate is then re-checked to be an
exact fixed point (a mismatch raises, it is never returned), and an
independent alternating-fixpoint oracle for the classical three-valued
semantics is available for cross-checking.

Zero-filling at the first idle stratum stands in for a limit stage: once
a stratum pins nothing, every value an idle atom could still reach is
built from negations and bounds of already-pinned lower-level values, so
no later finite stratum can pin it either.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from random import Random

from stratfix import values as V
from stratfix.errors import (
    FixpointCheckFailed,
    NotConverged,
    ProgramSyntaxError,
)
from stratfix.fixpoint import InterpretationOps, OuterTrace, stratified_fix


@dataclass(frozen=True)
class Rule:
    """head :- body, with the body a tuple of (atom, negated) literals."""

    head: str
    body: tuple[tuple[str, bool], ...] = ()

    def to_text(self) -> str:
        if not self.body:
            return f"{self.head}."
        lits = ", ".join(
            f"not {a}" if neg else a for a, neg in self.body
        )
        return f"{self.head} :- {lits}."


@dataclass(frozen=True)
class Program:
    atoms: tuple[str, ...]
    rules: tuple[Rule, ...]

    @classmethod
    def from_rules(cls, rules, extra_atoms=()) -> "Program":
        seen = dict()
        for r in rules:
            seen.setdefault(r.head, None)
            for a, _ in r.body:
                seen.setdefault(a, None)
        for a in extra_atoms:
            seen.setdefault(a, None)
        unique = tuple(dict.fromkeys(rules))  # drop duplicate rules
        return cls(tuple(seen), unique)

    def to_text(self) -> str:
        return "\n".join(r.to_text() for r in self.rules) + ("\n" if self.rules else "")


# --- parsing -------------------------------------------------------------------

_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message):
        raise ProgramSyntaxError(message, self.line, self.col)

    def _advance(self, k: int):
        for ch in self.text[self.pos : self.pos + k]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += k

    def skip_space(self):
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "%":
                end = self.text.find("\n", self.pos)
                self._advance((end if end != -1 else len(self.text)) - self.pos)
            elif ch in " \t\r\n":
                self._advance(1)
            else:
                return

    def next_token(self):
        self.skip_space()
        if self.pos >= len(self.text):
            return ("eof", None, self.line, self.col)
        line, col = self.line, self.col
        ch = self.text[self.pos]
        if ch == ".":
            self._advance(1)
            return ("dot", ".", line, col)
        if ch == ",":
            self._advance(1)
            return ("comma", ",", line, col)
        if self.text.startswith(":-", self.pos):
            self._advance(2)
            return ("arrow", ":-", line, col)
        m = _ATOM.match(self.text, self.pos)
        if m:
            word = m.group(0)
            self._advance(len(word))
            kind = "not" if word == "not" else "atom"
            return (kind, word, line, col)
        self.error(f"unexpected character {ch!r}")


def parse_program(text: str) -> Program:
    """Parse rules of the form ``head.`` or ``head :- lit, lit, ...``.

    Literals are atoms or ``not`` atom; ``%`` starts a comment; ``not``
    is reserved.  Errors carry 1-based line and column.
    """
    sc = _Scanner(text)
    rules = []
    while True:
        kind, word, line, col = sc.next_token()
        if kind == "eof":
            break
        if kind != "atom":
            raise ProgramSyntaxError(
                f"expected a rule head, got {word!r}", line, col
            )
        head = word
        kind, word, line, col = sc.next_token()
        if kind == "dot":
            rules.append(Rule(head))
            continue
        if kind != "arrow":
            raise ProgramSyntaxError(
                f"expected ':-' or '.' after head, got {word!r}", line, col
            )
        body = []
        while True:
            kind, word, line, col = sc.next_token()
            negated = False
            if kind == "not":
                negated = True
                kind, word, line, col = sc.next_token()
            if kind != "atom":
                raise ProgramSyntaxError(
                    f"expected an atom, got {word!r}", line, col
                )
            body.append((word, negated))
            kind, word, line, col = sc.next_token()
            if kind == "dot":
                break
            if kind != "comma":
                raise ProgramSyntaxError(
                    f"expected ',' or '.' in rule body, got {word!r}",
                    line, col,
                )
        rules.append(Rule(head, tuple(body)))
    return Program.from_rules(rules)


# --- one-step consequence --------------------------------------------------------


class ConsequenceFn:
    """One step of rule application over the level-valued domain.

    Per atom: the join over its rules of the meet of the body literal
    values, with negation shifting levels up by one.  A fact contributes
    T_0 (the empty meet) and a ruleless atom gets F_0 (the empty join).
    """

    def __init__(self, program: Program, level_cap: int = V.DEFAULT_LEVEL_CAP):
        self.program = program
        self.atoms = program.atoms
        self.level_cap = level_cap
        pos = {a: k for k, a in enumerate(self.atoms)}
        self._bodies = [[] for _ in self.atoms]
        for rule in program.rules:
            self._bodies[pos[rule.head]].append(
                tuple((pos[a], neg) for a, neg in rule.body)
            )

    def __call__(self, interp: V.Interpretation, _param=None) -> V.Interpretation:
        vals = interp.values
        t0 = V.T(0)
        out = []
        for bodies in self._bodies:
            best = V.F(0)
            for body in bodies:
                cur = t0
                for j, negated in body:
                    v = vals[j]
                    if negated:
                        v = V.tv_neg(v, self.level_cap)
                    if v.rank < cur.rank:
                        cur = v
                if cur.rank > best.rank:
                    best = cur
            out.append(best)
        return V.Interpretation(self.atoms, tuple(out))


def immediate_consequence(program: Program,
                          level_cap: int = V.DEFAULT_LEVEL_CAP) -> ConsequenceFn:
    return ConsequenceFn(program, level_cap)


# --- the solver --------------------------------------------------------------------


@dataclass
class SolveOptions:
    stratum_budget: int | None = None  # default 4 * atoms + 4
    plateau_window: int | None = None  # default atoms + 2
    inner_budget: int | None = None
    level_cap: int = V.DEFAULT_LEVEL_CAP
    trace: bool = False


@dataclass(frozen=True)
class SolveResult:
    model: V.Interpretation
    trace: OuterTrace
    strata_used: int
    settled_at: dict
    stop_reason: str

    def wfs(self) -> dict:
        return collapse_wfs(self.model)


class _SettlementPolicy:
    """Stop policy: zero-fill every idle atom at the first stratum that
    pins nothing, re-checking the candidate before accepting it."""

    def __init__(self, budget: int, atoms: tuple[str, ...]):
        self.budget = budget
        self.atoms = atoms
        self.pinned = set()
        self.stop_reason = None

    def finished(self, alpha: int) -> bool:
        if alpha > self.budget:
            raise NotConverged(
                f"no settlement within {self.budget} strata; raise the budget"
            )
        return False

    def after_stratum(self, alpha, z, f, y, ops):
        fresh = [
            a
            for a, v in zip(z.atoms, z.values)
            if a not in self.pinned and v.level_or_inf() <= alpha
        ]
        self.pinned.update(fresh)
        if ops.equal(f(z, y), z):
            self.stop_reason = "fixpoint"
            return z
        if fresh:
            return None
        candidate = V.Interpretation(
            z.atoms,
            tuple(
                v if a in self.pinned else V.ZERO
                for a, v in zip(z.atoms, z.values)
            ),
        )
        if not ops.equal(f(candidate, y), candidate):
            raise FixpointCheckFailed(
                "zero-filled candidate is not a fixed point; this is a "
                "solver bug, not an answer"
            )
        self.stop_reason = "settlement"
        return candidate


def solve(program: Program, options: SolveOptions | None = None) -> SolveResult:
    """Minimum level-valued model of the program.

    The returned interpretation is always an exact fixed point of the
    consequence operator; failure modes raise instead of degrading.
    """
    options = options or SolveOptions()
    atoms = program.atoms
    if not atoms:
        empty = V.Interpretation((), ())
        return SolveResult(empty, OuterTrace((), empty, 0, "empty", ()), 0, {}, "empty")

    f = ConsequenceFn(program, options.level_cap)
    ops = InterpretationOps(
        atoms,
        plateau_window=options.plateau_window,
        level_cap=options.level_cap,
    )
    budget = (
        options.stratum_budget
        if options.stratum_budget is not None
        else 4 * len(atoms) + 4
    )
    policy = _SettlementPolicy(budget, atoms)
    value, trace = stratified_fix(
        f, None, ops, policy,
        trace=options.trace, inner_budget=options.inner_budget,
    )
    if f(value) != value:
        raise FixpointCheckFailed("solver returned a non-fixed-point")
    settled_at = {
        a: ("limit" if v.polarity == "0" else v.level)
        for a, v in zip(value.atoms, value.values)
    }
    return SolveResult(
        value, trace, trace.strata_used, settled_at,
        policy.stop_reason or trace.stop_reason,
    )


# --- classical three-valued collapse and its independent oracle ---------------------


def collapse_wfs(model: V.Interpretation) -> dict:
    """F levels read as false, T levels as true, unknown stays undefined."""
    out = {}
    for a, v in zip(model.atoms, model.values):
        out[a] = {"F": "false", "T": "true", "0": "undefined"}[v.polarity]
    return out


def _reduct_least_model(rules, true_atoms: frozenset) -> frozenset:
    """Least model of the program reduct relative to an atom set.

    Rules with a negated atom inside the set are dropped, remaining
    negative literals are erased, and positive consequences are iterated
    to closure.  Deliberately shares nothing with the solver above.
    """
    applicable = []
    for head, body in rules:
        if any(neg and a in true_atoms for a, neg in body):
            continue
        applicable.append((head, [a for a, neg in body if not neg]))
    model = set()
    changed = True
    while changed:
        changed = False
        for head, pos in applicable:
            if head not in model and all(p in model for p in pos):
                model.add(head)
                changed = True
    return frozenset(model)


def wfs_oracle(program: Program) -> dict:
    """Well-founded semantics by the alternating fixpoint: true atoms are
    the least fixed point of the squared reduct operator, false atoms the
    complement of its greatest fixed point."""
    rules = [(r.head, r.body) for r in program.rules]

    def step2(s: frozenset) -> frozenset:
        return _reduct_least_model(rules, _reduct_least_model(rules, s))

    lo = frozenset()
    while True:
        nxt = step2(lo)
        if nxt == lo:
            break
        lo = nxt
    hi = frozenset(program.atoms)
    while True:
        nxt = step2(hi)
        if nxt == hi:
            break
        hi = nxt
    out = {}
    for a in program.atoms:
        if a in lo:
            out[a] = "true"
        elif a not in hi:
            out[a] = "false"
        else:
            out[a] = "undefined"
    return out


# --- corpus generation ----------------------------------------------------------------


def random_program(rng: Random, max_atoms: int = 8, max_rules: int = 15,
                   density_range=(0.0, 0.7)) -> Program:
    """Seeded random program for fuzzing: bounded atoms and rules, with a
    per-program negation density drawn from the given range."""
    n_atoms = rng.randint(1, max_atoms)
    atoms = [f"a{i}" for i in range(n_atoms)]
    density = rng.uniform(*density_range)
    rules = []
    for _ in range(rng.randint(0, max_rules)):
        head = rng.choice(atoms)
        body = tuple(
            (rng.choice(atoms), rng.random() < density)
            for _ in range(rng.randint(0, 3))
        )
        rules.append(Rule(head, body))
    return Program.from_rules(rules)
