"""Pushdown systems and the labelled transition systems they induce.

Stacks are written top-first: the configuration ``Config("p", ("a", "b"))``
has ``a`` on top.  Control states, stack symbols and actions are plain
strings; the reduction names its states ``.alpha`` / ``alpha.`` for the
left and right member of a state pair.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

INTERNAL = "internal"
PUSH = "push"
POP = "pop"

DEFAULT_NODE_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """Raised when an exploration visits more nodes than its budget allows."""

    def __init__(self, budget: int, what: str = "configurations"):
        super().__init__(f"node budget of {budget} {what} exceeded")
        self.budget = budget


class PdaFormatError(ValueError):
    """Malformed PDA text; carries the 1-based line and column."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + msg)
        self.line = line
        self.col = col


# -- control state naming -----------------------------------------------------

def left(name: str) -> str:
    return "." + name


def right(name: str) -> str:
    return name + "."


def polarity(state: str) -> str:
    """``'left'``, ``'right'`` or ``'plain'`` for a control state name."""
    if state.startswith(".") and len(state) > 1:
        return "left"
    if state.endswith(".") and len(state) > 1:
        return "right"
    return "plain"


def pair_name(state: str) -> str:
    pol = polarity(state)
    if pol == "left":
        return state[1:]
    if pol == "right":
        return state[:-1]
    raise ValueError(f"{state!r} is not a member of a state pair")


# -- core types ---------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Rule:
    kind: str
    source: str
    action: str
    target: str
    popped: str | None = None
    pushed: str | None = None

    def __post_init__(self):
        if self.kind == INTERNAL:
            ok = self.popped is None and self.pushed is None
        elif self.kind == PUSH:
            ok = self.popped is None and self.pushed is not None
        elif self.kind == POP:
            ok = self.popped is not None and self.pushed is None
        else:
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if not ok:
            raise ValueError(f"malformed {self.kind} rule: {self}")

    def to_line(self) -> str:
        if self.kind == INTERNAL:
            return f"internal {self.source} {self.action} {self.target}"
        if self.kind == PUSH:
            return f"push {self.source} {self.action} {self.target} {self.pushed}"
        return f"pop {self.source} {self.popped} {self.action} {self.target}"


def internal(src: str, action: str, dst: str) -> Rule:
    return Rule(INTERNAL, src, action, dst)


def push(src: str, action: str, dst: str, sym: str) -> Rule:
    return Rule(PUSH, src, action, dst, pushed=sym)


def pop(src: str, sym: str, action: str, dst: str) -> Rule:
    return Rule(POP, src, action, dst, popped=sym)


class Config(NamedTuple):
    state: str
    stack: tuple[str, ...] = ()

    def __str__(self) -> str:
        return format_config(self)


@dataclass(frozen=True)
class Pda:
    states: frozenset[str]
    stack_alphabet: frozenset[str]
    actions: frozenset[str]
    rules: tuple[Rule, ...]

    def __post_init__(self):
        for r in self.rules:
            missing = [s for s in (r.source, r.target) if s not in self.states]
            if missing:
                raise ValueError(f"rule {r.to_line()!r} uses undeclared state {missing[0]!r}")
            if r.action not in self.actions:
                raise ValueError(f"rule {r.to_line()!r} uses undeclared action {r.action!r}")
            for sym in (r.popped, r.pushed):
                if sym is not None and sym not in self.stack_alphabet:
                    raise ValueError(f"rule {r.to_line()!r} uses undeclared stack symbol {sym!r}")

    @classmethod
    def from_rules(cls, rules: Iterable[Rule], states: Iterable[str] = (),
                   stack_alphabet: Iterable[str] = (), actions: Iterable[str] = ()) -> "Pda":
        """Build a PDA whose declarations are the given ones plus everything the rules use."""
        rules = tuple(sorted(set(rules)))
        st, gamma, act = set(states), set(stack_alphabet), set(actions)
        for r in rules:
            st.update((r.source, r.target))
            act.add(r.action)
            gamma.update(s for s in (r.popped, r.pushed) if s is not None)
        return cls(frozenset(st), frozenset(gamma), frozenset(act), rules)

    @property
    def size(self) -> int:
        """|Gamma| + |Act| + |rules|."""
        return len(self.stack_alphabet) + len(self.actions) + len(self.rules)

    @cached_property
    def _index(self):
        free = defaultdict(list)        # state -> [(action, target, pushed-or-None)]
        pops = defaultdict(list)        # (state, symbol) -> [(action, target)]
        for r in self.rules:
            if r.kind == POP:
                pops[(r.source, r.popped)].append((r.action, r.target))
            else:
                free[r.source].append((r.action, r.target, r.pushed))
        return dict(free), dict(pops)

    def with_rules(self, rules: Iterable[Rule]) -> "Pda":
        return Pda.from_rules(list(self.rules) + list(rules), self.states,
                              self.stack_alphabet, self.actions)


def step(pda: Pda, c: Config) -> set[tuple[str, Config]]:
    """All one-step successors ``(action, config)`` of ``c`` in the induced LTS."""
    free, pops = pda._index
    out = set()
    for action, target, pushed in free.get(c.state, ()):
        stack = c.stack if pushed is None else (pushed,) + c.stack
        out.add((action, Config(target, stack)))
    if c.stack:
        for action, target in pops.get((c.state, c.stack[0]), ()):
            out.add((action, Config(target, c.stack[1:])))
    return out


# -- interned exploration -----------------------------------------------------

class Explorer:
    """Successor oracle over hash-consed stacks.

    A stack is an integer id; id 0 is the empty stack.  Configurations are
    ``(state, stack_id)`` tuples, which hash in constant time no matter how
    tall the stack grows.
    """

    def __init__(self, pda: Pda):
        self.pda = pda
        self._free, self._pops = pda._index
        self.top: list[str | None] = [None]
        self.below: list[int] = [0]
        self.height: list[int] = [0]
        self._intern: dict[tuple[str, int], int] = {}
        self._succ: dict[tuple[str, int], tuple[tuple[str, tuple[str, int]], ...]] = {}

    def push(self, sym: str, sid: int) -> int:
        key = (sym, sid)
        got = self._intern.get(key)
        if got is None:
            got = len(self.top)
            self.top.append(sym)
            self.below.append(sid)
            self.height.append(self.height[sid] + 1)
            self._intern[key] = got
        return got

    def stack_id(self, stack: Iterable[str]) -> int:
        sid = 0
        for sym in reversed(tuple(stack)):
            sid = self.push(sym, sid)
        return sid

    def stack_of(self, sid: int) -> tuple[str, ...]:
        out = []
        while sid:
            out.append(self.top[sid])
            sid = self.below[sid]
        return tuple(out)

    def node(self, c: Config) -> tuple[str, int]:
        return (c.state, self.stack_id(c.stack))

    def config(self, node: tuple[str, int]) -> Config:
        return Config(node[0], self.stack_of(node[1]))

    def successors(self, node: tuple[str, int]):
        got = self._succ.get(node)
        if got is not None:
            return got
        state, sid = node
        out = []
        for action, target, pushed in self._free.get(state, ()):
            out.append((action, (target, sid if pushed is None else self.push(pushed, sid))))
        if sid:
            for action, target in self._pops.get((state, self.top[sid]), ()):
                out.append((action, (target, self.below[sid])))
        got = tuple(out)
        self._succ[node] = got
        return got


def reachable(pda: Pda, roots: Iterable[Config], stack_cap: int,
              budget: int = DEFAULT_NODE_BUDGET) -> tuple[set[Config], bool]:
    """Breadth-first closure of ``roots`` under :func:`step`, cut at ``stack_cap``.

    Returns the explored configurations and whether the exploration is
    closed, i.e. no explored configuration has a successor above the cap.
    """
    ex = Explorer(pda)
    seen, closed = _explore(ex, [ex.node(c) for c in roots], stack_cap, budget)
    return {ex.config(n) for n in seen}, closed


def _explore(ex: Explorer, roots, stack_cap: int, budget: int):
    for state, sid in roots:
        if ex.height[sid] > stack_cap:
            raise ValueError("stack_cap is below the height of a root configuration")
    seen = set(roots)
    queue = deque(seen)
    closed = True
    while queue:
        n = queue.popleft()
        for _, m in ex.successors(n):
            if m in seen:
                continue
            if ex.height[m[1]] > stack_cap:
                closed = False
                continue
            seen.add(m)
            if len(seen) > budget:
                raise BudgetExceeded(budget)
            queue.append(m)
    return seen, closed


@dataclass
class FiniteLts:
    states: set = field(default_factory=set)
    edges: set = field(default_factory=set)     # (src, action, dst)

    def add(self, src, action, dst) -> None:
        self.states.update((src, dst))
        self.edges.add((src, action, dst))

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], states: Iterable = ()) -> "FiniteLts":
        lts = cls(set(states))
        for e in edges:
            lts.add(*e)
        return lts

    def successors(self) -> dict:
        out = {s: [] for s in self.states}
        for s, a, t in self.edges:
            out[s].append((a, t))
        return out


def flatten(pda: Pda, configs: Iterable[Config]) -> FiniteLts:
    """The sub-LTS induced on ``configs`` (edges leaving the set are dropped)."""
    configs = set(configs)
    lts = FiniteLts(set(configs))
    for c in configs:
        for a, d in step(pda, c):
            if d in configs:
                lts.edges.add((c, a, d))
    return lts


# -- text formats -------------------------------------------------------------

_DECLS = {"states": "states", "stack": "stack_alphabet", "actions": "actions"}


def parse_pda(text: str) -> Pda:
    """Parse the line-oriented PDA format.

    Optional declaration lines ``states: ...``, ``stack: ...`` and
    ``actions: ...`` switch on checking for that category; every rule must
    then only use declared names.
    """
    decls: dict[str, set[str]] = {}
    rules = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        head = stripped.split()[0]
        if head.endswith(":") and head[:-1] in _DECLS:
            decls[head[:-1]] = set(stripped.split()[1:])
            continue
        toks = _tokens(line)
        kind = toks[0][1]
        want = {"internal": 4, "push": 5, "pop": 5}.get(kind)
        if want is None:
            raise PdaFormatError(f"unknown directive {kind!r}", lineno, toks[0][0])
        if len(toks) > want and toks[want][1].startswith("#"):
            toks = toks[:want]          # trailing comment
        if len(toks) != want:
            raise PdaFormatError(f"{kind} rule needs {want - 1} fields, got {len(toks) - 1}",
                                 lineno, toks[0][0])
        if kind == "internal":
            (_, src), (_, act), (_, dst) = toks[1:]
            rule, roles = internal(src, act, dst), [("states", 1), ("actions", 2), ("states", 3)]
        elif kind == "push":
            (_, src), (_, act), (_, dst), (_, sym) = toks[1:]
            rule, roles = push(src, act, dst, sym), [("states", 1), ("actions", 2), ("states", 3), ("stack", 4)]
        else:
            (_, src), (_, sym), (_, act), (_, dst) = toks[1:]
            rule, roles = pop(src, sym, act, dst), [("states", 1), ("stack", 2), ("actions", 3), ("states", 4)]
        for cat, i in roles:
            if cat in decls and toks[i][1] not in decls[cat]:
                noun = {"states": "state", "stack": "stack symbol", "actions": "action"}[cat]
                raise PdaFormatError(f"undeclared {noun} {toks[i][1]!r}", lineno, toks[i][0])
        rules.append(rule)
    return Pda.from_rules(rules, decls.get("states", ()), decls.get("stack", ()),
                          decls.get("actions", ()))


def _tokens(line: str) -> list[tuple[int, str]]:
    toks, i = [], 0
    for tok in line.split():
        i = line.index(tok, i)
        toks.append((i + 1, tok))
        i += len(tok)
    return toks


def format_pda(pda: Pda) -> str:
    lines = [
        "states: " + " ".join(sorted(pda.states)),
        "stack: " + " ".join(sorted(pda.stack_alphabet)),
        "actions: " + " ".join(sorted(pda.actions)),
    ]
    lines.extend(r.to_line() for r in sorted(pda.rules))
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> Config:
    """``"p | a b"`` is state ``p`` with ``a`` on top of ``b``."""
    state, _, rest = text.partition("|")
    state = state.strip()
    if not state or len(state.split()) != 1:
        raise PdaFormatError(f"bad configuration literal {text!r}")
    return Config(state, tuple(rest.split()))


def format_config(c: Config) -> str:
    return f"{c.state} | {' '.join(c.stack)}".rstrip()
