import itertools

import pytest

from oracles import NaiveMatcher, bits_value
from pdabisim.bisim import Bisimilar, decide
from pdabisim.counters import canonical_counter, omega, omega_upto, sym, tow
from pdabisim.fsa import cat, cls, star, star_of
from pdabisim.lts import Config, reachable
from pdabisim.reduction import (MachineError, ReductionError, TransducerMachine, build_reduction,
                                check_zero_dead_end, format_machine, make_inc_transducers,
                                parse_machine, simulate_machine, toy_machines)
from pdabisim.reduction.incr import testdec_transducers as dec_transducers
from pdabisim.reduction.machine import stateless
from pdabisim.transducer import make_transducer


# -- increment transducers -------------------------------------------------------

def test_increment_examples():
    p0, p1 = make_inc_transducers(0)
    assert p1(("1_0", "0_0", "0_1")) == ("0", "1", "a")
    assert p0(("0_0", "1_0", "0_1")) == ("0", "1", "a")
    assert p1(("1_0", "1_0", "1_1")) == ("0", "0", "b")
    assert p0.letter_to_letter and p1.letter_to_letter
    assert len(p0.states) == 2 and len(p1.states) == 3


@pytest.mark.parametrize("n", [1, 2, 3])
def test_increment_relation(n):
    t0, t1 = dec_transducers(0)
    for b1, b2 in itertools.product(itertools.product((0, 1), repeat=n), repeat=2):
        for s1, s2 in itertools.product(sorted(omega(1)), repeat=2):
            w1 = tuple(sym(b, 0) for b in b1) + (s1,)
            w2 = tuple(sym(b, 0) for b in b2) + (s2,)
            assert (t0(w1) == t1(w2)) == (bits_value(b1) == bits_value(b2) + 1)


def test_increment_ignores_lower_levels():
    t0, t1 = dec_transducers(1)
    # lower-level symbols become a, level-1 bits are incremented
    w = ("0_0", "1_1", "1_0", "0_1", "0_2")
    assert t1(w) == ("a", "0", "a", "1", "a")


# -- transducer machines ---------------------------------------------------------

def test_toy_runs():
    tm = toy_machines(2)
    run = simulate_machine(tm["bisimilar"])
    assert run.trace == ("11", "00") and run.status == "dead-end" and run.last == "00"
    run = simulate_machine(tm["non-bisimilar"])
    assert run.trace == ("11",) and run.last == "11"
    assert check_zero_dead_end(tm["bisimilar"]) and check_zero_dead_end(tm["non-bisimilar"])


def test_constant_machine_is_not_deterministic():
    const = TransducerMachine(2, stateless({"0": "c", "1": "c"}), stateless({"0": "c", "1": "c"}))
    run = simulate_machine(const)
    assert run.status == "non-unique-successor" and run.at == 0


def test_identity_machine_zero_is_not_a_dead_end():
    ident = TransducerMachine(2, stateless({"0": "u", "1": "v"}), stateless({"0": "u", "1": "v"}))
    assert not check_zero_dead_end(ident)
    assert simulate_machine(ident, max_steps=5).status == "step-budget-exceeded"


def test_machine_validation_and_bounds():
    with pytest.raises(MachineError):
        TransducerMachine(0, stateless({"0": "u", "1": "v"}), stateless({"0": "u", "1": "v"}))
    wide = make_transducer({(0, "0"): (0, ("u", "u")), (0, "1"): (0, "v")}, 0)
    with pytest.raises(MachineError):
        TransducerMachine(2, wide, wide)
    with pytest.raises(MachineError):
        simulate_machine(TransducerMachine(21, stateless({"0": "u", "1": "v"}),
                                           stateless({"0": "u", "1": "v"})))


def test_machine_text_round_trip():
    tm = toy_machines(2)["bisimilar"]
    back = parse_machine(format_machine(tm))
    assert back.ell == 2
    assert simulate_machine(back).trace == simulate_machine(tm).trace
    with pytest.raises(MachineError):
        parse_machine("T1:\nstates: 0\n")
    with pytest.raises(MachineError):
        parse_machine("ell: x\n")


# -- the rule system ---------------------------------------------------------------

def test_build_checks_inputs():
    tm = toy_machines(4)["bisimilar"]
    with pytest.raises(ReductionError):
        build_reduction(tm, 1, 1)
    clash = TransducerMachine(2, stateless({"0": "a", "1": "p"}), stateless({"0": "p", "1": "y"}))
    with pytest.raises(ReductionError):
        build_reduction(clash, 1, 1)


def test_build_is_deterministic():
    tm = toy_machines(2)["bisimilar"]
    a, b = build_reduction(tm, 1, 1), build_reduction(tm, 1, 1)
    assert a.pda == b.pda
    assert a.pda.stack_alphabet == omega_upto(2)
    assert {".start", "start."} <= a.pda.states


def test_test_fin_spots():
    # <testFin> w $ holds iff the top-level bits of w are all zero
    red = build_reduction(None, 1, 1, roots=("testFin",))
    for v in range(tow(2, 1)):
        stack = canonical_counter(1, 1, v) + (red.dollar,)
        got = decide(red.pda, Config(".testFin", stack), Config("testFin.", stack), max_cap=16)
        assert isinstance(got, Bisimilar) == (v == 0), v


@pytest.mark.parametrize("normed", [False, True])
def test_stop_pairs(normed):
    red = build_reduction(None, 1, 1, normed=normed, roots=("stop_0",))
    w = canonical_counter(0, 1, 1) + ("1_1",)
    for x in (canonical_counter(0, 1, 0) + ("0_1",), canonical_counter(0, 1, 1) + ("1_1", "0_2")):
        v = decide(red.pda, Config(".stop_0", x), Config("stop_0.", w + x), max_cap=16)
        assert isinstance(v, Bisimilar)


def test_dec_pair_small():
    red = build_reduction(None, 1, 2, roots=("testDec_0",))
    w3 = canonical_counter(0, 2, 0)
    for v1, v2 in [(1, 0), (2, 1), (2, 0), (0, 3), (3, 3)]:
        st = (w3 + ("0_1",) + canonical_counter(0, 2, v2) + ("0_1",)
              + canonical_counter(0, 2, v1) + ("0_1",))
        got = decide(red.pda, Config(".testDec_0", st), Config("testDec_0.", st), max_cap=20)
        assert isinstance(got, Bisimilar) == (v1 == v2 + 1)


def test_normed_stack_shape():
    tm = toy_machines(2)["bisimilar"]
    red = build_reduction(tm, 1, 1, normed=True)
    shape = star(cat(star(cat(star_of(omega_upto(0)), cls(omega(1)))), cls({red.dollar})))
    match = NaiveMatcher(shape, omega_upto(2))
    seen, _ = reachable(red.pda, [red.left_start(), red.right_start()], stack_cap=20)
    assert len(seen) > 500
    # every reachable stack is a suffix of a word of the given shape
    ok = NaiveMatcher(cat(star_of(omega_upto(1)), shape), omega_upto(2))
    assert all(ok(c.stack) for c in seen)
    assert any(match(c.stack) and c.stack for c in seen)


def test_rule_count_grows_slowly():
    counts = [len(build_reduction(toy_machines(tow(1, n))["bisimilar"], 1, n).pda.rules)
              for n in range(1, 5)]
    steps = [b - a for a, b in zip(counts, counts[1:])]
    assert all(s > 0 for s in steps) and max(steps) - min(steps) <= max(steps) // 2
