"""Macro rules and their expansion into concrete pushdown rules.

Pair macros act on state pairs: a pair named ``alpha`` stands for the two
control states ``.alpha`` and ``alpha.``.  Fresh names are derived from the
macro's source, so expanding the same macros twice gives the same rules
and two macros with different sources never share a fresh state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .fsa import Dfa, regex_symbols, regex_to_min_dfa, parse_regex, regex_to_text
from .lts import Pda, Rule, internal, left, pop, push, right
from .transducer import Transducer, homomorphism_transducer, parse_transducer, shuffle


class MacroError(ValueError):
    pass


class Expansion(NamedTuple):
    rules: list[Rule]
    fresh: set[str]


@dataclass(frozen=True)
class Chain:
    src: str
    popped: str
    actions: tuple[str, ...]
    dst: str


@dataclass(frozen=True)
class GuardedPop:
    src: str
    guard: object
    trans: Transducer
    dst: str
    filler: str = "a"       # output for stack symbols the transducer does not read


@dataclass(frozen=True)
class PairPush:
    src: str
    dst: str
    pushed: tuple[str, ...] = ()


@dataclass(frozen=True)
class DefChoice:
    src: str
    options: tuple[tuple[str, tuple[str, ...]], ...]


@dataclass(frozen=True)
class AttChoice:
    src: str
    options: tuple[tuple[str, tuple[str, ...]], ...]


def option(dst: str, *pushed: str) -> tuple[str, tuple[str, ...]]:
    return (dst, tuple(pushed))


# -- single-state macros ------------------------------------------------------

def expand_chain(m: Chain) -> Expansion:
    if not m.actions:
        raise MacroError("chain needs at least one action")
    k = len(m.actions)
    mids = [f"{m.src}~{m.popped}~{i}" for i in range(1, k)]
    path = mids + [m.dst]
    rules = [pop(m.src, m.popped, m.actions[0], path[0])]
    for i in range(1, k):
        rules.append(internal(path[i - 1], m.actions[i], path[i]))
    return Expansion(rules, set(mids))


def _state_order(states) -> list:
    return sorted(states, key=repr)


def expand_guarded_pop(m: GuardedPop, alphabet: Iterable[str], dfa: Dfa | None = None) -> Expansion:
    """Product of the guard's minimal DFA with the transducer.

    From ``src w x`` with ``w`` the shortest prefix in the guard language
    this pops ``w``, reads ``# T(w) #`` and lands in ``dst x``.
    """
    alphabet = frozenset(alphabet)
    used = regex_symbols(m.guard)
    if not used <= m.trans.inputs:
        raise MacroError(f"guard uses symbols the transducer does not read: "
                         f"{sorted(used - m.trans.inputs)}")
    if not used <= alphabet:
        raise MacroError(f"guard uses symbols outside the stack alphabet: {sorted(used - alphabet)}")
    dfa = dfa or regex_to_min_dfa(m.guard, alphabet)
    tindex = {q: i for i, q in enumerate(_state_order(m.trans.states))}

    def name(qa, qt):
        return f"{m.src}~g{qa}.{tindex[qt]}"

    start = (dfa.initial, m.trans.initial)
    rules = [internal(m.src, "#", name(*start))]
    fresh = {name(*start)}
    seen = {start}
    todo = [start]
    syms = sorted(alphabet)
    while todo:
        qa, qt = todo.pop()
        here = name(qa, qt)
        if qa in dfa.finals:
            rules.append(internal(here, "#", m.dst))
            continue
        for s in syms:
            if s in m.trans.inputs:
                rt, out = m.trans.delta[(qt, s)]
            else:
                rt, out = qt, (m.filler,)
            nxt = (dfa.delta[(qa, s)], rt)
            if nxt not in seen:
                seen.add(nxt)
                fresh.add(name(*nxt))
                todo.append(nxt)
            sub = expand_chain(Chain(here, s, tuple(out), name(*nxt)))
            rules.extend(sub.rules)
            fresh |= sub.fresh
    return Expansion(rules, fresh)


# -- pair macros --------------------------------------------------------------

def expand_pair_push(m: PairPush) -> Expansion:
    k = len(m.pushed)
    names = [m.src] + [f"{m.src}~p{i}" for i in range(k - 1, -1, -1)]
    # names[j] pushes pushed[k-1-j]; names[k] is q_0
    rules = []
    for pol in (left, right):
        for j in range(k):
            rules.append(push(pol(names[j]), "a", pol(names[j + 1]), m.pushed[k - 1 - j]))
        rules.append(internal(pol(names[k]), "a", pol(m.dst)))
    fresh = {pol(n) for n in names[1:] for pol in (left, right)}
    return Expansion(rules, fresh)


def _edge(src: str, action: str, dst: str, sym: str | None) -> Rule:
    return internal(src, action, dst) if sym is None else push(src, action, dst, sym)


def _targets(src: str, idx: int, opt, out: Expansion) -> tuple[str, str | None]:
    """Pair to enter plus the single symbol the gadget edge pushes."""
    dst, word = opt
    if len(word) <= 1:
        return dst, (word[0] if word else None)
    mid = f"{src}~m{idx}"
    sub = expand_pair_push(PairPush(mid, dst, word[:-1]))
    out.rules.extend(sub.rules)
    out.fresh.update(sub.fresh | {left(mid), right(mid)})
    return mid, word[-1]


def _or_gadget(src: str, o1, o2, out: Expansion) -> None:
    t, s1 = _targets(src, 1, o1, out)
    tt, s2 = _targets(src, 2, o2, out)
    u1, u2, u3 = (f"{src}~u{i}" for i in (1, 2, 3))
    out.fresh.update((u1, u2, u3))
    out.rules.extend([
        internal(left(src), "a", u1),
        internal(left(src), "a", u2),
        internal(left(src), "a", u3),
        internal(right(src), "a", u2),
        internal(right(src), "a", u3),
        _edge(u1, "a", left(t), s1),
        _edge(u1, "b", left(tt), s2),
        _edge(u2, "a", left(t), s1),
        _edge(u2, "b", right(tt), s2),
        _edge(u3, "a", right(t), s1),
        _edge(u3, "b", left(tt), s2),
    ])


def _and_gadget(src: str, o1, o2, out: Expansion) -> None:
    t, s1 = _targets(src, 1, o1, out)
    tt, s2 = _targets(src, 2, o2, out)
    out.rules.extend([
        _edge(left(src), "a", left(t), s1),
        _edge(left(src), "b", left(tt), s2),
        _edge(right(src), "a", right(t), s1),
        _edge(right(src), "b", right(tt), s2),
    ])


def _expand_choice(src: str, options, gadget) -> Expansion:
    options = [(d, tuple(w)) for d, w in options]
    if not options:
        raise MacroError("choice needs at least one option")
    if len(options) == 1:
        return expand_pair_push(PairPush(src, options[0][0], options[0][1]))
    out = Expansion([], set())
    here = src
    for i, first in enumerate(options[:-2]):
        nested = f"{src}~o{i + 1}"
        out.fresh.update((left(nested), right(nested)))
        gadget(here, first, (nested, ()), out)
        here = nested
    gadget(here, options[-2], options[-1], out)
    return out


def expand_def_choice(m: DefChoice) -> Expansion:
    """Defender picks the continuation: a right-nested chain of Or-gadgets."""
    return _expand_choice(m.src, m.options, _or_gadget)


def expand_att_choice(m: AttChoice) -> Expansion:
    """Attacker picks the continuation: a right-nested chain of And-gadgets."""
    return _expand_choice(m.src, m.options, _and_gadget)


def expand(m, alphabet: Iterable[str] = ()) -> Expansion:
    if isinstance(m, Chain):
        return expand_chain(m)
    if isinstance(m, GuardedPop):
        return expand_guarded_pop(m, alphabet)
    if isinstance(m, PairPush):
        return expand_pair_push(m)
    if isinstance(m, DefChoice):
        return expand_def_choice(m)
    if isinstance(m, AttChoice):
        return expand_att_choice(m)
    raise TypeError(f"not a macro: {m!r}")


def sources(m) -> set[str]:
    """Concrete control states a macro defines rules for (its left-hand sides)."""
    if isinstance(m, (Chain, GuardedPop)):
        return {m.src}
    return {left(m.src), right(m.src)}


def expand_all(macros: Sequence, alphabet: Iterable[str], extra_rules: Iterable[Rule] = (),
               states: Iterable[str] = (), actions: Iterable[str] = ()) -> Pda:
    """Expand a macro list into one PDA, checking that expansions do not collide."""
    alphabet = frozenset(alphabet)
    rules = list(extra_rules)
    owner: dict[str, int] = {}
    defined: dict[object, int] = {}
    for i, m in enumerate(macros):
        key = (m.src, m.popped) if isinstance(m, Chain) else m.src
        if key in defined:
            raise MacroError(f"two macros define rules for {key!r}")
        defined[key] = i
        exp = expand(m, alphabet)
        for s in exp.fresh:
            if s in owner and owner[s] != i:
                raise MacroError(f"fresh state {s!r} produced by two expansions")
            owner[s] = i
        rules.extend(exp.rules)
    return Pda.from_rules(rules, states, alphabet, actions)


# -- text format --------------------------------------------------------------

@dataclass
class MacroFile:
    alphabet: set = field(default_factory=set)
    classes: dict = field(default_factory=dict)
    transducers: dict = field(default_factory=dict)
    macros: list = field(default_factory=list)

    def to_pda(self) -> Pda:
        return expand_all(self.macros, self.alphabet)


def _words(text: str) -> tuple[str, ...]:
    return tuple(text.split())


def _options(text: str, lineno: int):
    opts = []
    for part in text.split(";"):
        toks = part.split()
        if not toks:
            raise MacroError(f"line {lineno}: empty option")
        opts.append((toks[0], tuple(toks[1:])))
    return tuple(opts)


def parse_macros(text: str) -> MacroFile:
    """Parse a macro file.

    Directives, one per line (``#`` starts a comment line)::

        stack: 0_0 1_0 0_1 1_1
        class O0 = 0_0 1_0
        transducer T          (transducer text follows, closed by ``end``)
        hom H O0 O1 -> a a    (homomorphism over the union of the classes)
        shuffle S = T H
        chain p 0_0 a b -> q
        guarded p (O0* O1)* / S -> q
        pairpush s -> t 1_0 1_0
        def s -> t 0_0 ; t 1_0
        att s -> t ; u 0_1
    """
    mf = MacroFile()
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        lineno = i + 1
        line = lines[i].strip()
        i += 1
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "stack:":
                mf.alphabet.update(rest.split())
            elif head == "class":
                name, _, syms = rest.partition("=")
                mf.classes[name.strip()] = frozenset(syms.split())
            elif head == "transducer":
                body = []
                while i < len(lines) and lines[i].strip() != "end":
                    body.append(lines[i])
                    i += 1
                if i == len(lines):
                    raise MacroError("transducer block without 'end'")
                i += 1
                mf.transducers[rest] = parse_transducer("\n".join(body))
            elif head == "hom":
                lhs, _, img = rest.partition("->")
                name, *cls_names = lhs.split()
                dom = frozenset().union(*(mf.classes.get(c, {c}) for c in cls_names))
                mf.transducers[name] = homomorphism_transducer(dom, _words(img))
            elif head == "shuffle":
                name, _, parts = rest.partition("=")
                a, b = parts.split()
                mf.transducers[name.strip()] = shuffle(mf.transducers[a], mf.transducers[b])
            elif head == "chain":
                lhs, _, dst = rest.partition("->")
                src, sym, *acts = lhs.split()
                mf.macros.append(Chain(src, sym, tuple(acts), dst.strip()))
            elif head == "guarded":
                lhs, _, dst = rest.partition("->")
                src, _, body = lhs.strip().partition(" ")
                regex, _, tname = body.rpartition("/")
                mf.macros.append(GuardedPop(src, parse_regex(regex, mf.classes),
                                            mf.transducers[tname.strip()], dst.strip()))
            elif head in ("pairpush", "def", "att"):
                src, _, body = rest.partition("->")
                if head == "pairpush":
                    dst, *word = body.split()
                    mf.macros.append(PairPush(src.strip(), dst, tuple(word)))
                else:
                    cls = DefChoice if head == "def" else AttChoice
                    mf.macros.append(cls(src.strip(), _options(body, lineno)))
            else:
                raise MacroError(f"unknown directive {head!r}")
        except (KeyError, ValueError) as e:
            if isinstance(e, MacroError) and str(e).startswith("line "):
                raise
            raise MacroError(f"line {lineno}: {e}") from e
    return mf


def format_macro(m, names: dict | None = None, tnames: dict | None = None) -> str:
    """One macro as a line of the macro format (transducers by name)."""
    if isinstance(m, Chain):
        return f"chain {m.src} {m.popped} {' '.join(m.actions)} -> {m.dst}"
    if isinstance(m, GuardedPop):
        tname = (tnames or {}).get(id(m.trans), "T")
        return f"guarded {m.src} {regex_to_text(m.guard, names)} / {tname} -> {m.dst}"
    if isinstance(m, PairPush):
        return f"pairpush {m.src} -> {' '.join((m.dst,) + m.pushed)}"
    kw = "def" if isinstance(m, DefChoice) else "att"
    opts = " ; ".join(" ".join((d,) + w) for d, w in m.options)
    return f"{kw} {m.src} -> {opts}"
