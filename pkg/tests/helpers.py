"""Shared builders for the gadget and guarded-pop checks."""
from __future__ import annotations

import itertools
import random

from oracles import NaiveMatcher
from pdabisim.bisim import finite_lts_bisim
from pdabisim.fsa import Cat, Star, Union, cls
from pdabisim.lts import Config, Pda, flatten, internal, left, reachable, right, step
from pdabisim.macros import AttChoice, DefChoice, GuardedPop, expand, expand_all
from pdabisim.transducer import make_transducer


def target_rules(t: str, same: bool):
    """``.t`` and ``t.`` are bisimilar iff ``same``."""
    return [internal(left(t), "c", "end"), internal(right(t), "c" if same else "d", "end")]


def gadget_verdict(kind, same1: bool, same2: bool) -> bool:
    cls_ = DefChoice if kind == "or" else AttChoice
    m = cls_("s", (("t1", ()), ("t2", ())))
    extra = target_rules("t1", same1) + target_rules("t2", same2)
    pda = expand_all([m], (), extra)
    roots = [Config(left("s")), Config(right("s"))]
    seen, closed = reachable(pda, roots, stack_cap=0)
    assert closed
    return finite_lts_bisim(flatten(pda, seen), *roots)


def gadget_table(kind):
    rows = []
    for s1, s2 in itertools.product((False, True), repeat=2):
        want = (s1 or s2) if kind == "or" else (s1 and s2)
        rows.append((s1, s2, gadget_verdict(kind, s1, s2), want))
    return rows


def random_regex(rng: random.Random, alphabet, depth=3):
    if depth == 0 or rng.random() < 0.3:
        return cls(rng.sample(sorted(alphabet), rng.randint(1, len(alphabet))))
    op = rng.choice(("cat", "cat", "union", "star"))
    if op == "star":
        return Star(random_regex(rng, alphabet, depth - 1))
    a, b = random_regex(rng, alphabet, depth - 1), random_regex(rng, alphabet, depth - 1)
    return Cat(a, b) if op == "cat" else Union(a, b)


def random_transducer(rng: random.Random, inputs, outputs=("a", "b", "c")):
    states = range(rng.randint(1, 3))
    table = {}
    for q in states:
        for s in inputs:
            table[(q, s)] = (rng.choice(states), tuple(rng.choice(outputs) for _ in range(rng.randint(1, 2))))
    return make_transducer(table, 0, inputs, outputs)


def guarded_pop_trial(rng: random.Random, alphabet=("p", "q", "r", "s")):
    """One random GuardedPop run; returns None on success or a description of the violation."""
    guard = random_regex(rng, alphabet[:3])
    match = NaiveMatcher(guard, alphabet)
    while True:
        stack = tuple(rng.choice(alphabet) for _ in range(rng.randint(0, 8)))
        cut = match.shortest_prefix(stack)
        if cut is not None:
            break
    used = set(alphabet[:3]) | ({"s"} if rng.random() < 0.5 else set())
    trans = random_transducer(rng, sorted(used))
    m = GuardedPop("src", guard, trans, "dst")
    pda = Pda.from_rules(expand(m, alphabet).rules, stack_alphabet=alphabet)
    # oracle output: # T(w) #, letters outside the transducer alphabet give the filler
    q, out = trans.initial, ["#"]
    for a in stack[:cut]:
        q, w = trans.delta[(q, a)] if a in trans.inputs else (q, ("a",))
        out.extend(w)
    out.append("#")
    c, trace = Config("src", stack), []
    while c.state != "dst":
        succ = step(pda, c)
        if len(succ) != 1:
            return f"{len(succ)} successors at {c}"
        (a, c), = succ
        trace.append(a)
    if trace != out:
        return f"read {trace}, expected {out}"
    if c != Config("dst", stack[cut:]):
        return f"ended in {c}, expected dst with {stack[cut:]}"
    if step(pda, c):
        return "dst has moves"
    return None
