"""Game solving for 2-CNF matrices with a clause cover.

The prefix is consumed outermost-in. At each variable a unit look-ahead
into the width-2 part decides the node:

* both values falsify the width-2 game: the formula is false;
* one value falsifies it: an existential player is forced, a universal
  opponent wins outright;
* a value whose propagation touches no remaining covered variable is a
  free move: take it if the variable is ours, assume the opponent shuns
  it otherwise;
* failing all that, branch. Every branch assigns a covered variable in
  both arms, so a cover with k variables yields at most 2^k leaves.

Once every covered clause is satisfied the residual width-2 game is
decided directly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .backdoor import BaseClass, verify_partition
from .errors import DomainError, InternalError
from .formula import QbfFormula, apply_assignment
from .twocnf import eval_q2cnf, look_ahead

ACCEPT = "accept"
REJECT = "reject"
FOLLOW = "follow"
BRANCH = "branch"


@dataclass(frozen=True)
class StepDecision:
    """One solver decision: what to do at the current outermost variable.

    FOLLOW carries the assignment U to apply; BRANCH carries both arms'
    assignments as `arms`. ACCEPT/REJECT are terminal.
    """

    kind: str
    rationale: str
    pivot: int = None
    U: dict = None
    arms: tuple = None


@dataclass
class SolveStats:
    branch_nodes: int = 0
    leaves: int = 0
    max_depth: int = 0
    initial_k: int = 0


def _validate(formula: QbfFormula) -> None:
    verify_partition(formula, BaseClass("2cnf"))
    unbound = formula.matrix.variables() - set(formula.prefix.variables())
    if unbound:
        raise DomainError(f"matrix variables {sorted(unbound)} not quantified")


def _decision(formula: QbfFormula) -> StepDecision:
    back = formula.matrix.backdoor
    if any(not c for c in back):
        return StepDecision(REJECT, "a covered clause is already falsified")
    if not back:
        if eval_q2cnf(formula.prefix, formula.matrix.tractable):
            return StepDecision(ACCEPT, "covered clauses exhausted and the width-2 game is true")
        return StepDecision(REJECT, "covered clauses exhausted and the width-2 game is false")
    if not formula.prefix.entries:
        raise InternalError("covered clauses left but no variables to play")
    pivot = formula.prefix.entries[0][0]
    exist = formula.prefix.is_existential(pivot)
    la0, la1 = look_ahead(formula.prefix, formula.matrix.tractable, pivot)
    las = (la0, la1)
    if not la0.status and not la1.status:
        return StepDecision(
            REJECT, f"both values of x{pivot} falsify the width-2 part", pivot
        )
    if la0.status != la1.status:
        b = 1 if la1.status else 0
        if exist:
            return StepDecision(
                FOLLOW,
                f"only x{pivot}={b} keeps the width-2 part true",
                pivot,
                las[b].U,
            )
        return StepDecision(
            REJECT,
            f"the opponent falsifies the width-2 part with x{pivot}={1 - b}",
            pivot,
        )
    cover_vars = formula.matrix.backdoor_variables()
    free = [b for b in (1, 0) if not (las[b].D & cover_vars)]
    if free:
        b = free[0]
        if exist:
            return StepDecision(
                FOLLOW,
                f"x{pivot}={b} forces no covered variable",
                pivot,
                las[b].U,
            )
        return StepDecision(
            FOLLOW,
            f"x{pivot}={b} forces no covered variable; the opponent is held to x{pivot}={1 - b}",
            pivot,
            las[1 - b].U,
        )
    return StepDecision(
        BRANCH,
        f"both values of x{pivot} force covered variables",
        pivot,
        arms=(la0.U, la1.U),
    )


def step(formula: QbfFormula) -> StepDecision:
    """The solver's decision at the current state, without recursing."""
    _validate(formula)
    return _decision(formula)


def solve(formula: QbfFormula):
    """Decide the formula; returns (value, SolveStats)."""
    _validate(formula)
    stats = SolveStats(initial_k=len(formula.matrix.backdoor_variables()))

    def go(f: QbfFormula, depth: int) -> bool:
        if depth > stats.max_depth:
            stats.max_depth = depth
        d = _decision(f)
        if d.kind == ACCEPT:
            stats.leaves += 1
            return True
        if d.kind == REJECT:
            stats.leaves += 1
            return False
        if d.kind == FOLLOW:
            return go(apply_assignment(f, d.U), depth + 1)
        stats.branch_nodes += 1
        exist = f.prefix.is_existential(d.pivot)
        first = go(apply_assignment(f, d.arms[0]), depth + 1)
        if exist == first:
            # an existential branch already won, or a universal one lost
            return first
        return go(apply_assignment(f, d.arms[1]), depth + 1)

    return go(formula, 0), stats
