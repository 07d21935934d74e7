"""Shared test utilities.

naive_eval is the reference point for everything else in the suite: a
textbook recursion over the prefix with no closures, no bit tricks and no
sharing. Keep it slow and obvious.
"""

import random

from qbd.formula import AffineEquation, EXISTS, FORALL, Matrix, Prefix, QbfFormula, clause
from qbd.reductions import PartitionedGraph


def naive_eval(formula):
    entries = formula.prefix.entries
    atoms = formula.matrix.atoms()

    def sat(atom, tau):
        if isinstance(atom, AffineEquation):
            parity = 0
            for v in atom.vars:
                parity ^= tau[v]
            return parity == atom.rhs
        return any(tau[abs(l)] == (1 if l > 0 else 0) for l in atom)

    def play(i, tau):
        if i == len(entries):
            return all(sat(a, tau) for a in atoms)
        v, q = entries[i]
        zero = play(i + 1, {**tau, v: 0})
        if q == EXISTS:
            return zero or play(i + 1, {**tau, v: 1})
        return zero and play(i + 1, {**tau, v: 1})

    return play(0, {})


def running_example():
    """Five variables, four binary clauses, one wide covered clause; TRUE."""
    prefix = Prefix.from_string("e1 a2 e3 e4 e5")
    matrix = Matrix(
        tractable=(clause(1, 3), clause(-1, 4), clause(3, 4), clause(2, 5)),
        backdoor=(clause(-3, -4, -5),),
    )
    return QbfFormula(prefix, matrix)


RUNNING_EXAMPLE_TEXT = """c class 2cnf
p cnf 5 5
e 1 0
a 2 0
e 3 4 5 0
1 3 0
-1 4 0
3 4 0
2 5 0
c backdoor-begin
-3 -4 -5 0
"""


def random_prefix(rng: random.Random, n: int) -> Prefix:
    return Prefix(tuple((v, rng.choice((EXISTS, FORALL))) for v in range(1, n + 1)))


def random_clause(rng: random.Random, n: int, max_width: int = 3):
    w = rng.randint(1, min(max_width, n))
    vs = rng.sample(range(1, n + 1), w)
    return frozenset(v if rng.random() < 0.5 else -v for v in vs)


def random_mixed(rng: random.Random, max_n: int = 6, equations: bool = True) -> QbfFormula:
    """A small arbitrary instance; equations stay on the tractable side so
    the result always passes validate()."""
    n = rng.randint(1, max_n)
    tract = []
    back = []
    for _ in range(rng.randint(0, 2 * n)):
        if equations and rng.random() < 0.35:
            w = rng.randint(1, min(3, n))
            tract.append(
                AffineEquation(frozenset(rng.sample(range(1, n + 1), w)), rng.randint(0, 1))
            )
        else:
            (back if rng.random() < 0.3 else tract).append(random_clause(rng, n))
    return QbfFormula(random_prefix(rng, n), Matrix(tuple(tract), tuple(back)))


def random_graph(rng: random.Random, max_vertices: int = 8, k: int = 2) -> PartitionedGraph:
    """A partitioned graph with k nonempty parts and random edges."""
    total = rng.randint(k, max_vertices)
    names = [f"v{i}" for i in range(1, total + 1)]
    rng.shuffle(names)
    cuts = sorted(rng.sample(range(1, total), k - 1)) if k > 1 else []
    parts = []
    lo = 0
    for hi in cuts + [total]:
        parts.append(tuple(names[lo:hi]))
        lo = hi
    edges = set()
    for i in range(total):
        for j in range(i + 1, total):
            if rng.random() < 0.35:
                edges.add(frozenset((names[i], names[j])))
    return PartitionedGraph(tuple(parts), frozenset(edges))
