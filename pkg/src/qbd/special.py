"""Engines for sign-uniform matrices, and the algorithm dispatcher.

A matrix of positive clauses plus negative units (or its mirror image) is
solved by unit propagation followed by dominant moves: once no units are
left, a variable with only positive occurrences is best set to 1 by its
owner and to 0 by the opponent, so every uncovered variable's move is known
in advance. What survives lives entirely on covered variables and is
enumerated, at most 2^k plays.

dispatch() picks an engine: a forced one, or the smallest detected cover
among the solvable classes, with brute force as the fallback when no cover
beats plain enumeration.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass

from .backdoor import SOLVABLE, BaseClass, detect_cc_backdoor, verify_partition
from .errors import CapError, ClassError, DomainError
from .formula import QbfFormula, apply_assignment
from .oracle import eval_bruteforce
from .affine import solve_aff
from .solver2cnf import SolveStats
from .solver2cnf import solve as solve_2cnf

DEFAULT_BRUTE_CAP = 24


@dataclass(frozen=True)
class Verdict:
    """Outcome of dispatch: the truth value, which engine decided it, and
    that engine's counters."""

    value: bool
    algorithm: str
    stats: SolveStats


def _solve_sign(formula: QbfFormula, kind: str, good: int):
    verify_partition(formula, BaseClass(kind))
    unbound = formula.matrix.variables() - set(formula.prefix.variables())
    if unbound:
        raise DomainError(f"matrix variables {sorted(unbound)} not quantified")
    cover = formula.matrix.backdoor_variables()
    stats = SolveStats(initial_k=len(cover))
    f = formula
    while True:
        unit = None
        for atom in f.matrix.atoms():
            if len(atom) == 0:
                stats.leaves = 1
                return False, stats
            if len(atom) == 1 and unit is None:
                unit = atom
        if unit is None:
            break
        (l,) = unit
        v = abs(l)
        if f.prefix.is_universal(v):
            stats.leaves = 1
            return False, stats
        f = apply_assignment(f, {v: 1 if l > 0 else 0})
    dominant = {}
    for v in f.prefix.variables():
        if v not in cover:
            dominant[v] = good if f.prefix.is_existential(v) else 1 - good
    if dominant:
        f = apply_assignment(f, dominant)
    rest = len(f.prefix)
    stats.branch_nodes = rest
    stats.max_depth = rest
    stats.leaves = 1 << rest
    return eval_bruteforce(f, cap=None), stats


def solve_posneg(formula: QbfFormula):
    """Decide a formula whose tractable part holds positive clauses and
    negative units; returns (value, SolveStats)."""
    return _solve_sign(formula, "posneg", 1)


def solve_dual_posneg(formula: QbfFormula):
    """Mirror engine: negative clauses plus positive units."""
    return _solve_sign(formula, "dual-posneg", 0)


_ENGINES = {
    "2cnf": solve_2cnf,
    "aff": solve_aff,
    "posneg": solve_posneg,
    "dual-posneg": solve_dual_posneg,
}


def _env_int(name: str, fallback: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise CapError(f"{name} must be an integer, got {raw!r}") from None


def _brute(formula: QbfFormula, cap) -> Verdict:
    n = len(formula.prefix)
    value = eval_bruteforce(formula, cap=cap)
    stats = SolveStats(branch_nodes=0, leaves=1 << n, max_depth=n, initial_k=n)
    return Verdict(value, "brute", stats)


def dispatch(formula: QbfFormula, algorithm: str = None, brute_cap: int = None,
             fallback: bool = True) -> Verdict:
    """Decide the formula with the best available engine.

    `algorithm` forces one of 2cnf, aff, posneg, dual-posneg, or brute; a
    formula declaring a different class is refused. Otherwise every
    solvable class is tried and the smallest cover wins, the declared
    class breaking ties. A cover as large as the variable count buys
    nothing: such formulas fall back to brute force under `brute_cap`
    (default from QBD_BRUTE_CAP, else 24), run the covered engine anyway
    with a warning above it, or raise CapError when `fallback` is off.
    """
    if brute_cap is None:
        brute_cap = _env_int("QBD_BRUTE_CAP", DEFAULT_BRUTE_CAP)
    n = len(formula.prefix)
    if algorithm is not None:
        if algorithm == "brute":
            return _brute(formula, brute_cap)
        if algorithm not in _ENGINES:
            raise ClassError(f"no engine named {algorithm!r}")
        if formula.base_class is not None and formula.base_class.tag != algorithm:
            raise ClassError(
                f"formula declares {formula.base_class.tag}, cannot force {algorithm}"
            )
        bd = detect_cc_backdoor(formula, algorithm)
        value, stats = _ENGINES[algorithm](bd.formula)
        return Verdict(value, algorithm, stats)
    candidates = list(SOLVABLE)
    declared = formula.base_class.kind if formula.base_class is not None else None
    if declared in candidates:
        candidates.remove(declared)
        candidates.insert(0, declared)
    best = None
    for tag in candidates:
        try:
            bd = detect_cc_backdoor(formula, tag)
        except ClassError:
            continue
        if best is None or bd.k < best.k:
            best = bd
    if best is None or best.k >= n > 0:
        if fallback and n <= brute_cap:
            return _brute(formula, brute_cap)
        if not fallback:
            raise CapError(
                f"no cover smaller than the {n} variables and fallback is disabled"
            )
        if best is None:
            raise CapError(f"{n} variables exceed the brute-force cap {brute_cap}")
        warnings.warn(
            f"no cover smaller than the {n} variables; running {best.base_class.tag} "
            f"with k={best.k} anyway",
            stacklevel=2,
        )
    value, stats = _ENGINES[best.base_class.kind](best.formula)
    return Verdict(value, best.base_class.tag, stats)
