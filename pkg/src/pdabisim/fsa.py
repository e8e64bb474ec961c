"""Regular expressions over symbol classes and complete minimal DFAs."""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class EmptyClassError(ValueError):
    pass


# -- regex trees --------------------------------------------------------------

@dataclass(frozen=True)
class Cls:
    symbols: frozenset

    def __post_init__(self):
        if not self.symbols:
            raise EmptyClassError("class literal must be nonempty")


@dataclass(frozen=True)
class Eps:
    pass


@dataclass(frozen=True)
class Cat:
    first: object
    second: object


@dataclass(frozen=True)
class Union:
    first: object
    second: object


@dataclass(frozen=True)
class Star:
    inner: object


def cls(symbols: Iterable[str]):
    return Cls(frozenset(symbols))


def cat(*parts):
    parts = [p for p in parts if not isinstance(p, Eps)]
    if not parts:
        return Eps()
    out = parts[0]
    for p in parts[1:]:
        out = Cat(out, p)
    return out


def star(r):
    return Eps() if isinstance(r, Eps) else Star(r)


def maybe_cls(symbols: Iterable[str]):
    """``cls(symbols)``, or ``None`` when the set is empty (for ``∅*`` = ε)."""
    symbols = frozenset(symbols)
    return Cls(symbols) if symbols else None


def star_of(symbols: Iterable[str]):
    """``C*`` for a possibly empty class ``C``."""
    c = maybe_cls(symbols)
    return Eps() if c is None else Star(c)


def regex_classes(r) -> list[frozenset]:
    if isinstance(r, Cls):
        return [r.symbols]
    if isinstance(r, Eps):
        return []
    if isinstance(r, Star):
        return regex_classes(r.inner)
    return regex_classes(r.first) + regex_classes(r.second)


def regex_symbols(r) -> frozenset:
    return frozenset().union(*regex_classes(r)) if regex_classes(r) else frozenset()


_TOKEN = re.compile(r"\s*(?:(\()|(\))|(\*)|(\|)|(\.)|([^\s()*|.]+))")


def parse_regex(text: str, classes: Mapping[str, Iterable[str]]):
    """Parse ``(O0* O1)* O2``-style text; names resolve through ``classes``.

    Juxtaposition (or ``.``) is concatenation, ``|`` union, postfix ``*``
    star.  A name not in ``classes`` stands for the singleton class of
    that symbol.
    """
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ValueError(f"bad regex near {text[pos:]!r}")
            break
        pos = m.end()
        kind = m.lastindex
        toks.append(({1: "(", 2: ")", 3: "*", 4: "|", 5: "."}.get(kind, "name"), m.group(kind)))
    toks.append(("end", ""))
    i = 0

    def peek():
        return toks[i][0]

    def union():
        nonlocal i
        r = concat()
        while peek() == "|":
            i += 1
            r = Union(r, concat())
        return r

    def concat():
        nonlocal i
        parts = [postfix()]
        while peek() in ("(", "name", "."):
            if peek() == ".":
                i += 1
            parts.append(postfix())
        return cat(*parts)

    def postfix():
        nonlocal i
        r = atom()
        while peek() == "*":
            i += 1
            r = star(r)
        return r

    def atom():
        nonlocal i
        kind, val = toks[i]
        if kind == "(":
            i += 1
            r = union()
            if peek() != ")":
                raise ValueError(f"unbalanced parentheses in {text!r}")
            i += 1
            return r
        if kind == "name":
            i += 1
            if val == "eps":
                return Eps()
            return cls(classes[val]) if val in classes else cls([val])
        raise ValueError(f"unexpected {val or kind!r} in regex {text!r}")

    r = union()
    if peek() != "end":
        raise ValueError(f"trailing input in regex {text!r}")
    return r


def regex_to_text(r, names: Mapping[frozenset, str] | None = None) -> str:
    names = names or {}
    if isinstance(r, Cls):
        if r.symbols in names:
            return names[r.symbols]
        if len(r.symbols) == 1:
            return next(iter(r.symbols))
        return "(" + "|".join(sorted(r.symbols)) + ")"
    if isinstance(r, Eps):
        return "eps"
    if isinstance(r, Star):
        inner = regex_to_text(r.inner, names)
        return (inner if isinstance(r.inner, Cls) else f"({inner})") + "*"
    if isinstance(r, Cat):
        return f"{regex_to_text(r.first, names)} {regex_to_text(r.second, names)}"
    return f"({regex_to_text(r.first, names)}|{regex_to_text(r.second, names)})"


# -- automata -----------------------------------------------------------------

@dataclass(frozen=True)
class Dfa:
    """Complete DFA; states are ``0..n-1``."""
    n_states: int
    initial: int
    finals: frozenset
    alphabet: frozenset
    delta: Mapping[tuple[int, str], int]

    @property
    def states(self) -> range:
        return range(self.n_states)

    def run(self, word: Sequence[str], state: int | None = None) -> int:
        q = self.initial if state is None else state
        for sym in word:
            q = self.delta[(q, sym)]
        return q

    def accepts(self, word: Sequence[str]) -> bool:
        return self.run(word) in self.finals

    def is_complete(self) -> bool:
        return all((q, a) in self.delta for q in self.states for a in self.alphabet)

    def dead_states(self) -> frozenset:
        """States from which no final state is reachable."""
        rev = defaultdict(set)
        for (q, _), r in self.delta.items():
            rev[r].add(q)
        live = set(self.finals)
        todo = list(live)
        while todo:
            for p in rev[todo.pop()]:
                if p not in live:
                    live.add(p)
                    todo.append(p)
        return frozenset(q for q in self.states if q not in live)


def _nfa(r, alphabet):
    """Thompson-style NFA: returns (start, accept, eps-edges, sym-edges)."""
    eps = defaultdict(set)
    edges = defaultdict(lambda: defaultdict(set))
    counter = [0]

    def new():
        counter[0] += 1
        return counter[0] - 1

    def build(node):
        s, t = new(), new()
        if isinstance(node, Cls):
            for a in node.symbols:
                edges[s][a].add(t)
        elif isinstance(node, Eps):
            eps[s].add(t)
        elif isinstance(node, Cat):
            s1, t1 = build(node.first)
            s2, t2 = build(node.second)
            eps[s].add(s1)
            eps[t1].add(s2)
            eps[t2].add(t)
        elif isinstance(node, Union):
            for part in (node.first, node.second):
                s1, t1 = build(part)
                eps[s].add(s1)
                eps[t1].add(t)
        elif isinstance(node, Star):
            s1, t1 = build(node.inner)
            eps[s].update((s1, t))
            eps[t1].update((s1, t))
        else:
            raise TypeError(f"not a regex node: {node!r}")
        return s, t

    start, accept = build(r)
    return start, accept, eps, edges


def _closure(states, eps):
    seen = set(states)
    todo = list(states)
    while todo:
        for t in eps[todo.pop()]:
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return frozenset(seen)


def regex_to_dfa(r, alphabet: Iterable[str]) -> Dfa:
    """Subset construction, completed with a dead state; not minimized."""
    alphabet = frozenset(alphabet)
    extra = regex_symbols(r) - alphabet
    if extra:
        raise ValueError(f"regex uses symbols outside the alphabet: {sorted(extra)}")
    start, accept, eps, edges = _nfa(r, alphabet)
    init = _closure({start}, eps)
    index = {init: 0}
    order = [init]
    delta = {}
    i = 0
    while i < len(order):
        S = order[i]
        for a in sorted(alphabet):
            T = _closure({t for s in S for t in edges[s][a]}, eps)
            if T not in index:
                index[T] = len(order)
                order.append(T)
            delta[(i, a)] = index[T]
        i += 1
    finals = frozenset(j for j, S in enumerate(order) if accept in S)
    return Dfa(len(order), 0, finals, alphabet, delta)


def minimize_dfa(a: Dfa) -> Dfa:
    """Hopcroft partition refinement on the reachable part of a complete DFA.

    States of the result are numbered in breadth-first order from the
    initial state (symbols visited in sorted order), so two minimal DFAs
    for the same language come out identical.
    """
    if not a.is_complete():
        raise ValueError("minimize_dfa needs a complete DFA")
    syms = sorted(a.alphabet)
    reach = {a.initial}
    todo = [a.initial]
    while todo:
        q = todo.pop()
        for s in syms:
            r = a.delta[(q, s)]
            if r not in reach:
                reach.add(r)
                todo.append(r)
    inv = defaultdict(lambda: defaultdict(set))
    for q in reach:
        for s in syms:
            inv[a.delta[(q, s)]][s].add(q)
    F = frozenset(q for q in reach if q in a.finals)
    N = frozenset(reach - F)
    partition = [b for b in (F, N) if b]
    work = [min(partition, key=len)] if len(partition) == 2 else list(partition)
    while work:
        splitter = work.pop()
        for s in syms:
            X = {p for q in splitter for p in inv[q][s]}
            if not X:
                continue
            nxt = []
            for Y in partition:
                inter = Y & X
                diff = Y - X
                if inter and diff:
                    nxt.extend((inter, diff))
                    if Y in work:
                        work.remove(Y)
                        work.extend((inter, diff))
                    else:
                        work.append(min(inter, diff, key=len))
                else:
                    nxt.append(Y)
            partition = nxt
    block_of = {q: i for i, B in enumerate(partition) for q in B}
    # canonical renumbering
    start = block_of[a.initial]
    rep = {i: next(iter(B)) for i, B in enumerate(partition)}
    number = {start: 0}
    order = [start]
    i = 0
    while i < len(order):
        b = order[i]
        for s in syms:
            c = block_of[a.delta[(rep[b], s)]]
            if c not in number:
                number[c] = len(order)
                order.append(c)
        i += 1
    delta = {(number[b], s): number[block_of[a.delta[(rep[b], s)]]] for b in order for s in syms}
    finals = frozenset(number[block_of[q]] for q in F)
    return Dfa(len(order), 0, finals, a.alphabet, delta)


def regex_to_min_dfa(r, alphabet: Iterable[str]) -> Dfa:
    """The complete minimal DFA of ``L(r)`` over ``alphabet`` (dead state kept)."""
    return minimize_dfa(regex_to_dfa(r, alphabet))


def isomorphic(a: Dfa, b: Dfa) -> bool:
    if a.alphabet != b.alphabet or a.n_states != b.n_states:
        return False
    m = {a.initial: b.initial}
    todo = [a.initial]
    while todo:
        q = todo.pop()
        if (q in a.finals) != (m[q] in b.finals):
            return False
        for s in a.alphabet:
            x, y = a.delta[(q, s)], b.delta[(m[q], s)]
            if x in m:
                if m[x] != y:
                    return False
            else:
                m[x] = y
                todo.append(x)
    return len(set(m.values())) == len(m)
