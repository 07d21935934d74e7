import random
from itertools import combinations, product

import pytest

from qbd.errors import ArityError, ClassError, DomainError, InternalError
from qbd.formula import AffineEquation, Prefix, clause
from qbd.twocnf import EMPTY, LookAhead, Prop2Cnf, eval_q2cnf, look_ahead, prop


def fs(*lits):
    return frozenset(lits)


def naive_closure(cs):
    """Unit and binary consequences of a width-2 clause set, by truth table.

    Returns (contradiction, units, binaries) with unit-subsumed binaries
    dropped, mirroring what prop() promises.
    """
    vs = sorted({abs(l) for c in cs for l in c})
    models = []
    for bits in product((0, 1), repeat=len(vs)):
        tau = dict(zip(vs, bits))
        if all(any(tau[abs(l)] == (l > 0) for l in c) for c in cs):
            models.append(tau)
    if not models:
        return True, frozenset(), frozenset()
    lits = [l for v in vs for l in (v, -v)]
    units = frozenset(
        l for l in lits if all(m[abs(l)] == (l > 0) for m in models)
    )
    binaries = set()
    for a, b in combinations(lits, 2):
        if abs(a) == abs(b) or a in units or b in units:
            continue
        if all(m[abs(a)] == (a > 0) or m[abs(b)] == (b > 0) for m in models):
            binaries.add(fs(a, b))
    return False, units, frozenset(binaries)


class TestProp:
    def test_transitive_implication_appears(self):
        got = prop([fs(-1, 2), fs(-2, 3)])
        assert not got.contradiction
        assert got.units == frozenset()
        assert got.binaries == {fs(-1, 2), fs(-2, 3), fs(-1, 3)}

    def test_units_spread_and_subsume(self):
        got = prop([fs(1), fs(-1, 2)])
        assert got.units == {1, 2}
        assert got.binaries == frozenset()
        assert got.clauses == {fs(1), fs(2)}

    def test_contradiction_collapses_to_the_empty_clause(self):
        got = prop([fs(1, 2), fs(1, -2), fs(-1, 2), fs(-1, -2)])
        assert got.contradiction
        assert got.clauses == {EMPTY}

    def test_empty_input_clause(self):
        assert prop([fs()]).contradiction

    def test_equivalence_pair_stays(self):
        got = prop([fs(1, 2), fs(-1, -2)])
        assert got.units == frozenset()
        assert got.binaries == {fs(1, 2), fs(-1, -2)}

    def test_prop_of_a_closure_is_a_passthrough(self):
        got = prop([fs(-1, 2), fs(-2, 3)])
        assert prop(got) is got

    def test_idempotent(self):
        rng = random.Random(11)
        for _ in range(200):
            cs = [frozenset(v if rng.random() < 0.5 else -v
                            for v in rng.sample(range(1, 6), rng.randint(1, 2)))
                  for _ in range(rng.randint(0, 8))]
            cs = [c for c in cs if not any(-l in c for l in c)]
            once = prop(cs)
            again = prop(once.clauses)
            assert once == again

    def test_matches_the_truth_table_closure(self):
        rng = random.Random(7)
        for _ in range(400):
            cs = []
            for _ in range(rng.randint(0, 9)):
                w = rng.randint(1, 2)
                vs = rng.sample(range(1, 6), w)
                c = frozenset(v if rng.random() < 0.5 else -v for v in vs)
                if not any(-l in c for l in c):
                    cs.append(c)
            contradiction, units, binaries = naive_closure(cs)
            got = prop(cs)
            assert got.contradiction == contradiction
            assert got.units == units
            assert got.binaries == binaries

    def test_rejects_wide_clauses_and_equations(self):
        with pytest.raises(ArityError):
            prop([fs(1, 2, 3)])
        with pytest.raises(ClassError):
            prop([AffineEquation(frozenset({1, 2}), 1)])


class TestEvalQ2Cnf:
    def test_contradiction_is_false(self):
        p = Prefix.from_string("e1 e2")
        assert not eval_q2cnf(p, [fs(1, 2), fs(1, -2), fs(-1, 2), fs(-1, -2)])

    def test_universal_unit_is_false(self):
        assert not eval_q2cnf(Prefix.from_string("a1"), [fs(1)])
        assert eval_q2cnf(Prefix.from_string("e1"), [fs(1)])

    def test_universal_pair_is_false(self):
        assert not eval_q2cnf(Prefix.from_string("a1 a2"), [fs(1, 2)])
        assert eval_q2cnf(Prefix.from_string("e1 a2"), [fs(1, 2)])
        assert eval_q2cnf(Prefix.from_string("a2 e1"), [fs(1, 2)])

    def test_complementary_pair_depends_on_nesting(self):
        xor_ish = [fs(1, 2), fs(-1, -2)]
        # universal inside the existential: too late to mirror it
        assert not eval_q2cnf(Prefix.from_string("e1 a2"), xor_ish)
        # universal outside: the existential answers
        assert eval_q2cnf(Prefix.from_string("a2 e1"), xor_ish)
        assert eval_q2cnf(Prefix.from_string("e1 e2"), xor_ish)
        assert not eval_q2cnf(Prefix.from_string("a1 a2"), xor_ish)

    def test_accepts_a_precomputed_closure(self):
        p = Prefix.from_string("e1 a2")
        closure = prop([fs(1, 2), fs(-1, -2)])
        assert eval_q2cnf(p, closure) == eval_q2cnf(p, [fs(1, 2), fs(-1, -2)])

    def test_empty_matrix_is_true(self):
        assert eval_q2cnf(Prefix.from_string("a1 e2"), [])

    def test_unquantified_variable_rejected(self):
        with pytest.raises(DomainError):
            eval_q2cnf(Prefix.from_string("e1"), [fs(1, 2)])


RUNNING_PREFIX = Prefix.from_string("e1 a2 e3 e4 e5")
RUNNING_CLAUSES = [fs(1, 3), fs(-1, 4), fs(3, 4), fs(2, 5)]


class TestLookAhead:
    def test_running_example_pivot(self):
        la0, la1 = look_ahead(RUNNING_PREFIX, RUNNING_CLAUSES, 1)
        assert la0.status and la1.status
        assert la0.units == {-1, 3}
        assert la0.U == {1: 0, 3: 1}
        assert la0.D == {1, 3}
        assert la1.units == {1, 4}
        assert la1.U == {1: 1, 4: 1}
        assert la1.D == {1, 4}

    def test_universal_forcings_stay_out_of_u(self):
        p = Prefix.from_string("e1 a2")
        la0, la1 = look_ahead(p, [fs(1, 2)], 1)
        # pivot to 0 forces the universal x2, which U must not assign
        assert la0.units == {-1, 2}
        assert la0.U == {1: 0}
        assert not la0.status  # remaining game is a universal unit
        assert la1.U == {1: 1}
        assert la1.status

    def test_pivot_already_forced(self):
        p = Prefix.from_string("e1 e2")
        la0, la1 = look_ahead(p, [fs(1)], 1)
        assert la0 == LookAhead(False, frozenset(), {}, frozenset())
        assert la1.status and la1.units == frozenset() and la1.U == {1: 1}

    def test_contradictory_base_is_dead_on_both_sides(self):
        p = Prefix.from_string("e1 e2 e3")
        square = [fs(1, 2), fs(1, -2), fs(-1, 2), fs(-1, -2)]
        la0, la1 = look_ahead(p, square, 3)
        assert la0 == la1 == LookAhead(False, frozenset(), {}, frozenset())

    def test_unknown_pivot_rejected(self):
        with pytest.raises(DomainError):
            look_ahead(Prefix.from_string("e1"), [fs(1)], 9)

    def test_stale_closure_is_reported(self):
        # a hand-built "closure" missing its transitive binary
        stale = Prop2Cnf(
            frozenset({fs(-1, 2), fs(-2, 3)}),
            False,
            frozenset(),
            frozenset({fs(-1, 2), fs(-2, 3)}),
        )
        p = Prefix.from_string("e1 e2 e3 e4")
        with pytest.raises(InternalError):
            look_ahead(p, stale, 4)
