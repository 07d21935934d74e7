"""Reading and writing the QDIMACS dialect, plus relation tables.

The dialect extends plain QDIMACS with three things:

* ``x <lits> 0`` lines state GF(2) equations: the XOR of the listed
  variables equals 1, flipped once per negative literal.
* a ``c class <tag>`` comment declares the base class of the matrix.
* a ``c backdoor-begin`` comment marks the start of the covered clauses;
  everything after it must be a plain clause.

Relation tables use one line per relation: ``name arity : tuples`` with
comma-separated 0/1 strings, ``#`` starting a comment.
"""

from __future__ import annotations

import warnings

from .backdoor import BaseClass
from .errors import ParseError, TautologyError, UnknownTag
from .formula import EXISTS, FORALL, AffineEquation, Matrix, Prefix, QbfFormula, clause


def _ints(tokens, lineno):
    out = []
    for tok in tokens:
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"expected an integer, got {tok!r}", line=lineno) from None
    return out


def _body(tokens, lineno):
    """Literal tokens of a 0-terminated line, with the terminator checked."""
    lits = _ints(tokens, lineno)
    if not lits or lits[-1] != 0:
        raise ParseError("line must end with 0", line=lineno)
    lits = lits[:-1]
    if 0 in lits:
        raise ParseError("stray 0 before the line terminator", line=lineno)
    return lits


def parse_qdimacs(text: str, base_class=None) -> QbfFormula:
    """Parse dialect text into a formula.

    A ``base_class`` argument overrides any ``c class`` comment. Matrix
    variables missing from the prefix are appended to it, innermost and
    existential, with a warning; a wrong clause count in the header only
    warns as well.
    """
    nvars = None
    nclauses = None
    entries = []
    seen = set()
    declared = None
    in_backdoor = False
    tractable = []
    covered = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "c":
            if len(tokens) >= 2 and tokens[1] == "class":
                if len(tokens) != 3:
                    raise ParseError("class comment takes exactly one tag", line=lineno)
                try:
                    declared = BaseClass.parse(tokens[2])
                except UnknownTag as exc:
                    raise ParseError(str(exc), line=lineno) from None
            elif len(tokens) >= 2 and tokens[1] == "backdoor-begin":
                in_backdoor = True
            continue
        if head == "p":
            if nvars is not None:
                raise ParseError("duplicate header", line=lineno)
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise ParseError("header must read 'p cnf <vars> <clauses>'", line=lineno)
            nvars, nclauses = _ints(tokens[2:], lineno)
            if nvars < 0 or nclauses < 0:
                raise ParseError("header counts must be nonnegative", line=lineno)
            continue
        if nvars is None:
            raise ParseError("matrix or prefix line before the header", line=lineno)
        if head in (EXISTS, FORALL):
            if tractable or covered:
                raise ParseError("quantifier line after the matrix began", line=lineno)
            for v in _body(tokens[1:], lineno):
                if v < 0:
                    raise ParseError(f"quantified variable must be positive, got {v}", line=lineno)
                if v > nvars:
                    raise ParseError(f"variable {v} exceeds the declared count {nvars}", line=lineno)
                if v in seen:
                    raise ParseError(f"variable {v} quantified twice", line=lineno)
                seen.add(v)
                entries.append((v, head))
            continue
        if head == "x":
            if in_backdoor:
                raise ParseError("equation after backdoor-begin; covers hold clauses only", line=lineno)
            lits = _body(tokens[1:], lineno)
            for l in lits:
                if abs(l) > nvars:
                    raise ParseError(f"variable {abs(l)} exceeds the declared count {nvars}", line=lineno)
            eq = AffineEquation.from_literals(lits, rhs=1)
            if not eq.is_trivial:
                tractable.append(eq)
            continue
        lits = _body(tokens, lineno)
        for l in lits:
            if abs(l) > nvars:
                raise ParseError(f"variable {abs(l)} exceeds the declared count {nvars}", line=lineno)
        try:
            c = clause(*lits)
        except TautologyError as exc:
            raise ParseError(str(exc), line=lineno) from None
        (covered if in_backdoor else tractable).append(c)
    if nvars is None:
        raise ParseError("missing 'p cnf' header")
    got = len(tractable) + len(covered)
    if nclauses != got:
        warnings.warn(f"header declares {nclauses} matrix lines, found {got}", stacklevel=2)
    matrix = Matrix(tuple(tractable), tuple(covered))
    free = sorted(matrix.variables() - seen)
    if free:
        warnings.warn(
            "unquantified variable(s) "
            + " ".join(str(v) for v in free)
            + " appended to the prefix as innermost existentials",
            stacklevel=2,
        )
        entries.extend((v, EXISTS) for v in free)
    bc = base_class if base_class is not None else declared
    if isinstance(bc, str):
        bc = BaseClass.parse(bc)
    return QbfFormula(prefix=Prefix(tuple(entries)), matrix=matrix, base_class=bc)


def _clause_line(c) -> str:
    lits = sorted(c, key=lambda l: (abs(l), l < 0))
    return " ".join(str(l) for l in lits + [0])


def _equation_line(eq: AffineEquation) -> str:
    vs = sorted(eq.vars)
    lits = list(vs)
    if eq.rhs == 0:
        # carry parity 0 on the smallest variable
        lits[0] = -lits[0]
    return "x " + " ".join(str(l) for l in lits + [0])


def write_qdimacs(formula: QbfFormula) -> str:
    """Serialize a formula in the dialect; parse_qdimacs inverts this."""
    lines = []
    if formula.base_class is not None:
        lines.append(f"c class {formula.base_class.tag}")
    all_vars = set(formula.prefix.variables()) | set(formula.matrix.variables())
    nvars = max(all_vars, default=0)
    lines.append(f"p cnf {nvars} {len(formula.matrix.atoms())}")
    run_q = None
    run = []
    for v, q in formula.prefix:
        if q != run_q and run:
            lines.append(f"{run_q} " + " ".join(str(u) for u in run + [0]))
            run = []
        run_q = q
        run.append(v)
    if run:
        lines.append(f"{run_q} " + " ".join(str(u) for u in run + [0]))
    for atom in formula.matrix.tractable:
        if isinstance(atom, AffineEquation):
            if atom.is_trivial:
                continue
            lines.append(_equation_line(atom))
        else:
            lines.append(_clause_line(atom))
    if formula.matrix.backdoor:
        lines.append("c backdoor-begin")
        for c in formula.matrix.backdoor:
            lines.append(_clause_line(c))
    return "\n".join(lines) + "\n"


def parse_relations(text: str) -> dict:
    """Parse a relation table into name -> Relation, in file order.

    Duplicate tuples collapse silently; duplicate names are an error.
    """
    from .algebra import Relation

    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError("relation line needs a ':'", line=lineno)
        head, _, body = line.partition(":")
        parts = head.split()
        if len(parts) != 2:
            raise ParseError("expected '<name> <arity> :' before the tuples", line=lineno)
        name, arity_tok = parts
        try:
            arity = int(arity_tok)
        except ValueError:
            raise ParseError(f"arity must be an integer, got {arity_tok!r}", line=lineno) from None
        if arity <= 0:
            raise ParseError(f"arity must be positive, got {arity}", line=lineno)
        if name in out:
            raise ParseError(f"relation {name!r} defined twice", line=lineno)
        tuples = set()
        for chunk in body.split(","):
            bits = chunk.strip()
            if not bits:
                continue
            if len(bits) != arity or any(ch not in "01" for ch in bits):
                raise ParseError(
                    f"tuple {bits!r} is not a 0/1 string of length {arity}", line=lineno
                )
            tuples.add(tuple(int(ch) for ch in bits))
        out[name] = Relation(name=name, arity=arity, tuples=frozenset(tuples))
    return out


def write_relations(relations) -> str:
    """Serialize relations (any iterable or the dict parse_relations returns)."""
    if isinstance(relations, dict):
        relations = relations.values()
    lines = []
    for r in relations:
        rows = sorted(r.tuples)
        body = ",".join("".join(str(b) for b in row) for row in rows)
        lines.append(f"{r.name} {r.arity} : {body}")
    return "\n".join(lines) + "\n"
