"""Independent reference implementations used as test oracles."""
from __future__ import annotations

import itertools
import re

from pdabisim.fsa import Cat, Cls, Eps, Star, Union


def to_python_regex(r, char: dict) -> str:
    """Translate a regex tree to a Python pattern over one character per symbol."""
    if isinstance(r, Cls):
        return "[" + "".join(re.escape(char[s]) for s in sorted(r.symbols)) + "]"
    if isinstance(r, Eps):
        return "(?:)"
    if isinstance(r, Star):
        return "(?:" + to_python_regex(r.inner, char) + ")*"
    if isinstance(r, Cat):
        return "(?:" + to_python_regex(r.first, char) + to_python_regex(r.second, char) + ")"
    if isinstance(r, Union):
        return "(?:" + to_python_regex(r.first, char) + "|" + to_python_regex(r.second, char) + ")"
    raise TypeError(r)


class NaiveMatcher:
    def __init__(self, r, alphabet):
        self.char = {s: chr(ord("A") + i) for i, s in enumerate(sorted(alphabet))}
        self.pattern = re.compile(to_python_regex(r, self.char))

    def __call__(self, word) -> bool:
        return self.pattern.fullmatch("".join(self.char[s] for s in word)) is not None

    def shortest_prefix(self, word):
        for i in range(len(word) + 1):
            if self(word[:i]):
                return i
        return None


def words(alphabet, max_len):
    for k in range(max_len + 1):
        yield from itertools.product(sorted(alphabet), repeat=k)


def nerode_classes(accepts, alphabet, prefix_len: int, suffix_len: int) -> int:
    """Number of distinct residuals among prefixes, told apart by short suffixes."""
    suffixes = list(words(alphabet, suffix_len))
    sigs = {tuple(accepts(p + s) for s in suffixes) for p in words(alphabet, prefix_len)}
    return len(sigs)


def naive_bisim(states, edges):
    """Largest bisimulation by removing violating pairs until stable."""
    succ = {s: [] for s in states}
    for s, a, t in edges:
        succ[s].append((a, t))
    rel = {(p, q) for p in states for q in states}

    def matched(p, q):
        return all(any(b == a and (t, u) in rel for b, u in succ[q]) for a, t in succ[p])

    changed = True
    while changed:
        changed = False
        for p, q in list(rel):
            if not (matched(p, q) and matched(q, p)):
                rel.discard((p, q))
                changed = True
    return rel


def bits_value(bits) -> int:
    return sum(b << i for i, b in enumerate(bits))


def naive_approx(states, edges, rounds: int):
    """The ``rounds``-step bisimulation approximant, one simultaneous update per round."""
    succ = {s: [] for s in states}
    for s, a, t in edges:
        succ[s].append((a, t))
    rel = {(p, q) for p in states for q in states}
    for _ in range(rounds):
        def ok(p, q):
            return all(any(b == a and (t, u) in rel for b, u in succ[q]) for a, t in succ[p])
        rel = {(p, q) for p, q in rel if ok(p, q) and ok(q, p)}
    return rel
