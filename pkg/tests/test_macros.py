import random

import pytest

from helpers import gadget_table, guarded_pop_trial
from pdabisim.fsa import cls
from pdabisim.lts import Config, left, reachable, right, step
from pdabisim.macros import (AttChoice, Chain, DefChoice, GuardedPop, MacroError, PairPush, expand,
                             expand_all, format_macro, parse_macros, sources)
from pdabisim.transducer import homomorphism_transducer


@pytest.mark.parametrize("kind", ["or", "and"])
def test_gadget_truth_tables(kind):
    for s1, s2, got, want in gadget_table(kind):
        assert got == want, (kind, s1, s2)


def test_chain_reads_actions_in_order():
    pda = expand_all([Chain("p", "x", ("a", "b", "c"), "q")], {"x"})
    c, acts = Config("p", ("x", "x")), []
    while c.state != "q":
        (a, c), = step(pda, c)
        acts.append(a)
    assert acts == ["a", "b", "c"] and c == Config("q", ("x",))
    with pytest.raises(MacroError):
        expand(Chain("p", "x", (), "q"))


def test_pair_push_order():
    pda = expand_all([PairPush("s", "t", ("x", "y"))], {"x", "y"})
    for pol in (left, right):
        c = Config(pol("s"), ("z",))
        while c.state != pol("t"):
            (a, c), = step(pda, c)
            assert a == "a"
        assert c.stack == ("x", "y", "z")


def test_choice_with_pushed_words_reaches_all_options():
    m = DefChoice("s", (("t", ("x", "y")), ("u", ("x",)), ("v", ())))
    pda = expand_all([m], {"x", "y"})
    seen, _ = reachable(pda, [Config(left("s")), Config(right("s"))], stack_cap=3)
    for pol in (left, right):
        assert Config(pol("t"), ("x", "y")) in seen
        assert Config(pol("u"), ("x",)) in seen
        assert Config(pol("v")) in seen


def test_att_choice_single_option_is_a_push():
    rules = expand(AttChoice("s", (("t", ("x",)),))).rules
    assert len(rules) == 4


def test_guarded_pop_rejects_foreign_guards():
    t = homomorphism_transducer({"x"}, "a")
    with pytest.raises(MacroError):
        expand(GuardedPop("p", cls({"y"}), t, "q"), {"x", "y"})
    t2 = homomorphism_transducer({"x", "z"}, "a")
    with pytest.raises(MacroError):
        expand(GuardedPop("p", cls({"z"}), t2, "q"), {"x"})


def test_guarded_pop_random_runs():
    rng = random.Random(7)
    for _ in range(50):
        assert guarded_pop_trial(rng) is None


def test_expand_all_rejects_duplicates():
    with pytest.raises(MacroError):
        expand_all([PairPush("s", "t"), DefChoice("s", (("t", ()), ("u", ())))], ())
    # distinct popped symbols may share a source
    expand_all([Chain("p", "x", ("a",), "q"), Chain("p", "y", ("a",), "q")], {"x", "y"})


def test_fresh_names_are_deterministic():
    m = DefChoice("s", (("t", ("x", "y")), ("u", ()), ("v", ())))
    a, b = expand(m), expand(m)
    assert a.rules == b.rules and a.fresh == b.fresh
    assert sources(m) == {left("s"), right("s")}


MACRO_TEXT = """\
stack: 0_0 1_0 0_1 1_1
class O0 = 0_0 1_0
class O1 = 0_1 1_1
hom H O0 O1 -> a
chain p 0_0 a b -> q
guarded g (O0* O1) / H -> h
pairpush s -> t 1_0 1_0
def d -> t 0_0 ; u 1_0
att e -> t ; u 0_1
"""


def test_macro_file_parses_and_expands():
    mf = parse_macros(MACRO_TEXT)
    assert len(mf.macros) == 5
    pda = mf.to_pda()
    c = Config("g", ("0_0", "1_0", "0_1", "1_1"))
    acts = []
    while c.state != "h":
        (a, c), = step(pda, c)
        acts.append(a)
    assert acts == ["#", "a", "a", "a", "#"] and c.stack == ("1_1",)
    lines = [format_macro(m, {frozenset({"0_0", "1_0"}): "O0", frozenset({"0_1", "1_1"}): "O1"})
             for m in mf.macros]
    assert lines[0] == "chain p 0_0 a b -> q"
    assert lines[2] == "pairpush s -> t 1_0 1_0"
    assert lines[3] == "def d -> t 0_0 ; u 1_0"


def test_macro_file_errors():
    with pytest.raises(MacroError, match="line 1"):
        parse_macros("frob x\n")
    with pytest.raises(MacroError):
        parse_macros("transducer T\nstates: 0\n")
    with pytest.raises(MacroError, match="line 1"):
        parse_macros("guarded g x / Missing -> h\n")
