"""Bisimilarity: finite partition refinement, stratified ranks and a game solver.

Configurations of a PDA are handled as interned nodes ``(state, stack_id)``
of an :class:`Explorer`.  A pair of nodes is a position of the bisimulation
game; pairs are normalized (sorted) because bisimilarity is symmetric.
"""
from __future__ import annotations

import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .lts import (DEFAULT_NODE_BUDGET, BudgetExceeded, Config, Explorer, FiniteLts, Pda,
                  _explore, POP)

INF = float("inf")


# -- verdicts -----------------------------------------------------------------

@dataclass(frozen=True)
class Bisimilar:
    certificate: int                         # number of related pairs
    relation: frozenset | None = field(default=None, compare=False, repr=False)   # Config pairs

    def __str__(self) -> str:
        return "Bisimilar"


@dataclass(frozen=True)
class NotBisimilar:
    round: int | None
    witness: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"NotBisimilar(r={self.round if self.round is not None else '?'})"


@dataclass(frozen=True)
class Unknown:
    reason: str                              # cap-hit | budget | rounds

    def __str__(self) -> str:
        return f"Unknown({self.reason})"


Verdict = Bisimilar | NotBisimilar | Unknown


def _norm(x, y):
    return (x, y) if x <= y else (y, x)


def _group(succ) -> dict:
    out = defaultdict(list)
    for a, d in succ:
        if d not in out[a]:
            out[a].append(d)
    return dict(out)


# -- finite LTSs --------------------------------------------------------------

def refine(states: Iterable, succ) -> list[dict]:
    """Naive partition refinement.

    ``succ(s)`` yields ``(action, t)``.  Returns the block maps of rounds
    0, 1, ...; round ``r`` is the r-step approximant, and the last map is
    bisimilarity itself.
    """
    states = list(states)
    moves = {s: list(succ(s)) for s in states}
    block = {s: 0 for s in states}
    history = [block]
    count = 1
    while True:
        sigs = {}
        nxt = {}
        for s in states:
            sig = (block[s], frozenset((a, block[t]) for a, t in moves[s]))
            nxt[s] = sigs.setdefault(sig, len(sigs))
        history.append(nxt)
        if len(sigs) == count:
            return history
        count = len(sigs)
        block = nxt


def _rank(history: list[dict], s, t) -> int | None:
    for r, block in enumerate(history):
        if block[s] != block[t]:
            return r
    return None


def _witness(history, moves, s, t) -> tuple[str, ...]:
    """Attacker moves of an optimal distinguishing play, as ``side:action``."""
    out = []
    r = _rank(history, s, t)
    sides = ("L", "R")
    while r is not None and r > 0:
        prev = history[r - 1]
        found = None
        for side, (x, y) in enumerate(((s, t), (t, s))):
            for a, d in moves[x]:
                resp = [e for b, e in moves[y] if b == a]
                if all(prev[d] != prev[e] for e in resp):
                    found = (side, a, d, resp)
                    break
            if found:
                break
        if found is None:       # should not happen for a consistent history
            break
        side, a, d, resp = found
        out.append(f"{sides[side]}:{a}")
        if not resp:
            break
        e = max(resp, key=lambda e: _rank(history, d, e) or 0)
        s, t = (d, e) if side == 0 else (e, d)
        r = _rank(history, s, t)
    return tuple(out)


def finite_lts_bisim(lts: FiniteLts, s, t) -> bool:
    if s not in lts.states or t not in lts.states:
        raise KeyError(f"unknown state {s if s not in lts.states else t!r}")
    table = lts.successors()
    final = refine(lts.states, lambda x: table[x])[-1]
    return final[s] == final[t]


def finite_lts_verdict(lts: FiniteLts, s, t) -> Verdict:
    table = lts.successors()
    history = refine(lts.states, lambda x: table[x])
    r = _rank(history, s, t)
    if r is None:
        final = history[-1]
        size = sum(1 for x in lts.states for y in lts.states if final[x] == final[y])
        return Bisimilar(size)
    return NotBisimilar(r, _witness(history, table, s, t))


# -- stratified approximants --------------------------------------------------

class _PairGame:
    """Successor bookkeeping shared by the pushdown game algorithms."""

    def __init__(self, pda: Pda, explorer: Explorer | None = None):
        self.ex = explorer or Explorer(pda)
        self._moves: dict = {}

    def moves(self, node) -> dict:
        got = self._moves.get(node)
        if got is None:
            got = self._moves[node] = _group(self.ex.successors(node))
        return got

    def height(self, node) -> int:
        return self.ex.height[node[1]]


class RankBall:
    """Exact ranks of the pairs within a growing number of rounds of a root pair.

    :meth:`extend` explores breadth-first up to the given depth (keeping
    earlier work); :meth:`sweep` then assigns ranks backwards in increasing
    order: a move is resolved once all its Defender responses are ranked
    and its value is one more than the largest of them.  A rank found this
    way is exact whenever it is at most ``depth + 1``.
    """

    def __init__(self, game: _PairGame, root, budget: int, stack_cap: int | None = None):
        self.game, self.root, self.budget, self.cap = game, root, budget, stack_cap
        self.dist = {root: 0}
        self.order = [root]
        self.pending = deque([root])        # explored but not yet expanded
        self.edges: dict = {}
        self.base: dict = {}                # pairs with rank 1
        self.depth = -1

    def extend(self, depth: int) -> None:
        game = self.game
        later = deque()
        while self.pending:
            p = self.pending.popleft()
            if self.dist[p] >= depth:
                later.append(p)
                continue
            x, y = p
            if x == y or p in self.base or p in self.edges:
                continue
            mx, my = game.moves(x), game.moves(y)
            if mx.keys() != my.keys():
                self.base[p] = 1
                continue
            if self.cap is not None and max(game.height(x), game.height(y)) > self.cap:
                continue
            ms = []
            for src, other in ((mx, my), (my, mx)):
                for a, ds in src.items():
                    for d in ds:
                        resp = []
                        for e in other[a]:
                            if d == e:
                                resp = None
                                break
                            resp.append(_norm(d, e))
                        if resp is None:
                            continue
                        ms.append(resp)
                        for q in resp:
                            if q not in self.dist:
                                self.dist[q] = self.dist[p] + 1
                                self.order.append(q)
                                self.pending.append(q)
                                if len(self.order) > self.budget:
                                    raise BudgetExceeded(self.budget, "game positions")
            self.edges[p] = ms
        # unexpanded pairs may still have rank 1
        for p in later:
            x, y = p
            if x != y and p not in self.base and self.game.moves(x).keys() != self.game.moves(y).keys():
                self.base[p] = 1
        self.pending = later
        self.depth = depth

    def sweep(self) -> dict:
        rank = dict(self.base)
        waiting = defaultdict(list)
        left = {}
        for p, ms in self.edges.items():
            for j, resp in enumerate(ms):
                uniq = set(resp)
                left[(p, j)] = len(uniq)
                for q in uniq:
                    waiting[q].append((p, j))
        frontier = list(rank)
        r = 1
        while frontier:
            nxt = []
            for q in frontier:
                for p, j in waiting.get(q, ()):
                    left[(p, j)] -= 1
                    if left[(p, j)] == 0 and p not in rank:
                        rank[p] = r + 1
                        nxt.append(p)
            frontier = nxt
            r += 1
        return rank


def _ball_witness(game: _PairGame, rank: dict, x, y) -> tuple[str, ...]:
    out = []
    while True:
        p = _norm(x, y)
        r = rank.get(p)
        if r is None:
            break
        mx, my = game.moves(x), game.moves(y)
        found = None
        for side, (src, other) in enumerate(((mx, my), (my, mx))):
            for a, ds in src.items():
                if a not in other:
                    out.append(f"{'LR'[side]}:{a}")
                    return tuple(out)
                for d in ds:
                    resp = other[a]
                    if all(d != e and rank.get(_norm(d, e), INF) <= r - 1 for e in resp):
                        found = (side, a, d, resp)
                        break
                if found:
                    break
            if found:
                break
        if found is None:
            break
        side, a, d, resp = found
        out.append(f"{'LR'[side]}:{a}")
        e = max(resp, key=lambda e: rank[_norm(d, e)])
        x, y = (d, e) if side == 0 else (e, d)
    return tuple(out)


def approx_distinguish(pda: Pda, c1: Config, c2: Config, max_rounds: int,
                       budget: int = DEFAULT_NODE_BUDGET, stack_cap: int | None = None,
                       game: _PairGame | None = None) -> Verdict:
    """Least ``r <= max_rounds`` with ``c1`` and ``c2`` not in the r-step approximant."""
    if max_rounds < 0:
        raise ValueError("max_rounds must be >= 0")
    game = game or _PairGame(pda)
    x, y = game.ex.node(c1), game.ex.node(c2)
    if x == y or max_rounds == 0:
        return Unknown("rounds")
    ball = RankBall(game, _norm(x, y), budget, stack_cap)
    ball.extend(max_rounds - 1)
    rank = ball.sweep()
    r = rank.get(_norm(x, y))
    if r is None or r > max_rounds:
        return Unknown("rounds")
    return NotBisimilar(r, _ball_witness(game, rank, x, y))


def exact_rank(pda: Pda, c1: Config, c2: Config, budget: int = DEFAULT_NODE_BUDGET,
               start: int = 8, growth: float = 1.1, game: _PairGame | None = None) -> Verdict:
    """The non-bisimilarity rank, searching ever more rounds until found or out of budget."""
    game = game or _PairGame(pda)
    x, y = game.ex.node(c1), game.ex.node(c2)
    if x == y:
        return Unknown("rounds")
    ball = RankBall(game, _norm(x, y), budget)
    r = start
    while True:
        try:
            ball.extend(r - 1)
        except BudgetExceeded:
            return Unknown("budget")
        rank = ball.sweep()
        got = rank.get(_norm(x, y))
        if got is not None and got <= r:
            return NotBisimilar(got, _ball_witness(game, rank, x, y))
        if not ball.pending:
            return Unknown("rounds")
        r = max(r + 1, int(r * growth))


# -- game solver ---------------------------------------------------------------

class GameSolver:
    """Local greatest-fixpoint solver for the bisimulation game.

    ``boundary`` is the value of pairs with a configuration above the
    stack cap: ``False`` to prove bisimilarity (any answer ``True`` is then
    backed by a bisimulation inside the cap), ``True`` to prove
    non-bisimilarity (an answer ``False`` is then sound).

    False results are final.  A True result that leaned on a pair still
    being solved is kept tentative until that pair finishes; if it fails,
    every tentative result recorded since it started is dropped.
    """

    def __init__(self, game: _PairGame, stack_cap: int, boundary: bool,
                 budget: int = DEFAULT_NODE_BUDGET):
        self.game = game
        self.cap = stack_cap
        self.boundary = boundary
        self.budget = budget
        self.true: set = set()
        self.false: set = set()
        self.tent: dict = {}
        self.log: list = []
        self.visited = 0
        self.boundary_hits = 0

    def _over(self, p) -> bool:
        return self.game.height(p[0]) > self.cap or self.game.height(p[1]) > self.cap

    def _eval(self, p):
        x, y = p
        mx, my = self.game.moves(x), self.game.moves(y)
        if mx.keys() != my.keys():
            return False, INF
        low = INF
        for src, other in ((mx, my), (my, mx)):
            for a, ds in src.items():
                es = other[a]
                for d in ds:
                    ok = False
                    cands = []
                    for e in es:
                        if d == e:
                            ok = True
                            break
                        q = _norm(d, e)
                        if q in self.true:
                            ok = True
                            break
                        t = self.tent.get(q)
                        if t is not None:
                            ok = True
                            low = min(low, t)
                            break
                        if q not in self.false:
                            cands.append(q)
                    if ok:
                        continue
                    for q in cands:
                        v, l = yield q
                        if v:
                            ok = True
                            low = min(low, l)
                            break
                    if not ok:
                        return False, INF
        return True, low

    def solve(self, x, y) -> bool:
        if x == y:
            return True
        root = _norm(x, y)
        on_stack: dict = {}
        frames: list = []
        counter = 0

        def lookup(q):
            if q in self.true:
                return True, INF
            if q in self.false:
                return False, INF
            t = self.tent.get(q)
            if t is not None:
                return True, t
            i = on_stack.get(q)
            if i is not None:
                return True, i
            if self._over(q):
                self.boundary_hits += 1
                return self.boundary, INF
            return None

        def push(q):
            nonlocal counter
            counter += 1
            self.visited += 1
            if self.visited > self.budget:
                raise BudgetExceeded(self.budget, "game positions")
            on_stack[q] = counter
            frames.append([q, counter, self._eval(q), len(self.log)])

        got = lookup(root)
        if got is not None:
            return got[0]
        push(root)
        send = None
        while True:
            frame = frames[-1]
            try:
                q = frame[2].send(send)
            except StopIteration as stop:
                v, low = stop.value
                p, ident, _, mark = frames.pop()
                del on_stack[p]
                if not v:
                    self.false.add(p)
                    self._drop(mark)
                    res = (False, INF)
                elif low >= ident:
                    for t in self.log[mark:]:
                        self.true.add(t)
                        del self.tent[t]
                    del self.log[mark:]
                    self.true.add(p)
                    res = (True, INF)
                else:
                    self.tent[p] = low
                    self.log.append(p)
                    res = (True, low)
                if not frames:
                    return res[0]
                send = res
                continue
            got = lookup(q)
            if got is not None:
                send = got
            else:
                push(q)
                send = None

    def _drop(self, mark: int) -> None:
        for t in self.log[mark:]:
            del self.tent[t]
        del self.log[mark:]


def verify_bisimulation(game: _PairGame, relation: Iterable, stack_cap: int | None = None) -> bool:
    """Check that ``relation`` plus the identity is a bisimulation (within the cap).

    Pairs may be configurations or nodes of ``game``'s explorer.
    """
    def as_node(c):
        return game.ex.node(c) if isinstance(c, Config) else c

    rel = {_norm(as_node(x), as_node(y)) for x, y in relation}
    for x, y in rel:
        if stack_cap is not None and max(game.height(x), game.height(y)) > stack_cap:
            return False
        mx, my = game.moves(x), game.moves(y)
        if mx.keys() != my.keys():
            return False
        for src, other in ((mx, my), (my, mx)):
            for a, ds in src.items():
                for d in ds:
                    if not any(d == e or _norm(d, e) in rel for e in other[a]):
                        return False
    return True


# -- capped checking ----------------------------------------------------------

@dataclass
class CheckStats:
    cap: int = 0
    closed: bool = False
    explored: int = 0
    positions: int = 0
    seconds: float = 0.0
    caps: list = field(default_factory=list)
    history: list = field(default_factory=list)   # (cap, explored, positions) per attempt


CLOSURE_BUDGET = 200_000


def capped_bisim(pda: Pda, c1: Config, c2: Config, stack_cap: int,
                 budget: int = DEFAULT_NODE_BUDGET, stats: CheckStats | None = None,
                 game: _PairGame | None = None, closure_budget: int = CLOSURE_BUDGET) -> Verdict:
    """Bisimilarity of two configurations, exploring stacks up to ``stack_cap``.

    A closed reachable region is decided exactly by partition refinement.
    Closure is only attempted up to ``closure_budget`` configurations.
    Otherwise the game solver answers Bisimilar only with a verified
    bisimulation inside the cap, NotBisimilar only with an Attacker win
    that never needs the region above the cap, and Unknown otherwise.
    """
    stats = stats if stats is not None else CheckStats()
    t0 = time.perf_counter()
    game = game or _PairGame(pda)
    ex = game.ex
    x, y = ex.node(c1), ex.node(c2)
    stats.cap = stack_cap
    if x == y:
        stats.closed = True
        stats.seconds = time.perf_counter() - t0
        return Bisimilar(1, frozenset({(c1, c1)}))
    if max(ex.height[x[1]], ex.height[y[1]]) > stack_cap:
        raise ValueError("stack_cap is below the height of a root configuration")
    try:
        seen, closed = _explore(ex, [x, y], stack_cap, min(budget, closure_budget))
    except BudgetExceeded:
        seen, closed = None, False
    stats.explored = len(seen) if seen is not None else min(budget, closure_budget)
    if closed:
        stats.closed = True
        history = refine(seen, ex.successors)
        r = _rank(history, x, y)
        stats.seconds = time.perf_counter() - t0
        if r is None:
            final = history[-1]
            blocks = defaultdict(list)
            for n in seen:
                blocks[final[n]].append(n)
            return Bisimilar(sum(len(b) ** 2 for b in blocks.values()))
        moves = {n: ex.successors(n) for n in seen}
        return NotBisimilar(r, _witness(history, moves, x, y))
    # refuting first is cheap on bisimilar pairs: boundary pairs count as
    # Defender wins, so hopeless Defender strategies are cut at the cap
    refute = GameSolver(game, stack_cap, boundary=True, budget=budget)
    prove = GameSolver(game, stack_cap, boundary=False, budget=budget)
    try:
        if not refute.solve(x, y):
            stats.positions = refute.visited
            v = exact_rank(pda, c1, c2, budget, game=game)
            stats.seconds = time.perf_counter() - t0
            return v if isinstance(v, NotBisimilar) else NotBisimilar(None)
        if prove.solve(x, y):
            stats.positions = refute.visited + prove.visited
            if not verify_bisimulation(game, prove.true, stack_cap):
                raise AssertionError("game solver produced an invalid certificate")
            stats.closed = True
            stats.seconds = time.perf_counter() - t0
            cfg = ex.config
            return Bisimilar(len(prove.true), frozenset((cfg(a), cfg(b)) for a, b in prove.true))
        stats.positions = refute.visited + prove.visited
    except BudgetExceeded:
        stats.seconds = time.perf_counter() - t0
        return Unknown("budget")
    stats.seconds = time.perf_counter() - t0
    return Unknown("cap-hit")


def decide(pda: Pda, c1: Config, c2: Config, start_cap: int = 8, max_cap: int = 128,
           budget: int = DEFAULT_NODE_BUDGET, stats: CheckStats | None = None,
           growth: float = 1.25) -> Verdict:
    """``capped_bisim`` with a geometrically growing cap until a definite answer or ``max_cap``.

    The solvers' cost grows exponentially with the cap, so the factor is
    kept small.
    """
    stats = stats if stats is not None else CheckStats()
    game = _PairGame(pda)
    base = max(len(c1.stack), len(c2.stack))
    cap = max(start_cap, base)
    t0 = time.perf_counter()
    while True:
        stats.caps.append(cap)
        stats.positions = 0
        v = capped_bisim(pda, c1, c2, cap, budget, stats, game)
        stats.history.append((cap, stats.explored, stats.positions))
        if not isinstance(v, Unknown) or v.reason == "budget" or cap >= max_cap:
            stats.seconds = time.perf_counter() - t0
            return v
        cap = min(max(cap + 1, int(cap * growth)), max_cap)


# -- normedness ---------------------------------------------------------------

BOTTOM = "⊥"


class NormedVerdict(NamedTuple):
    status: str                      # normed | not-normed | unknown
    witness: Config | None = None


def _free_states(pda: Pda) -> set:
    return {r.source for r in pda.rules if r.kind != POP}


def _pre_star(pda: Pda, trans: set, finals: set) -> dict:
    """Saturate a P-automaton under the PDA rules (stack words end in ``BOTTOM``).

    ``trans`` are the initial automaton transitions ``(state, symbol, state)``;
    the control states of the PDA are its initial states and must have no
    incoming transitions.  Returns ``out[state] -> set of (symbol, state)``.
    """
    internal_into = defaultdict(set)        # q -> {p}: <p,g> -> <q,g> for every g
    push_into = defaultdict(set)            # (q, s) -> {p}: <p,g> -> <q,s g>
    for r in pda.rules:
        if r.kind == "internal":
            internal_into[r.target].add(r.source)
        elif r.kind == "push":
            push_into[(r.target, r.pushed)].add(r.source)
    work = list(trans) + [(r.source, r.popped, r.target) for r in pda.rules if r.kind == POP]
    rel = set()
    out = defaultdict(set)
    while work:
        t = work.pop()
        if t in rel:
            continue
        rel.add(t)
        q, g, q2 = t
        out[q].add((g, q2))
        for p in list(internal_into[q]):
            work.append((p, g, q2))
        for p in push_into.get((q, g), ()):
            if p not in internal_into[q2]:
                internal_into[q2].add(p)
                for g2, q3 in list(out[q2]):
                    work.append((p, g2, q3))
    return out


def _accepts(out: dict, finals: set, state, word) -> bool:
    cur = {state}
    for g in word:
        cur = {q2 for q in cur for (h, q2) in out.get(q, ()) if h == g}
        if not cur:
            return False
    return bool(cur & finals)


def can_empty(pda: Pda):
    """Automaton for the configurations that reach an empty-stack deadlock."""
    free = _free_states(pda)
    dead = [q for q in pda.states if q not in free]
    out = _pre_star(pda, {(q, BOTTOM, "F") for q in dead}, {"F"})
    return out, {"F"}


def check_normed(pda: Pda, root: Config, stack_cap: int | None = None,
                 budget: int = DEFAULT_NODE_BUDGET, explicit: bool = False) -> NormedVerdict:
    """Is every configuration reachable from ``root`` able to reach an empty-stack deadlock?

    The default mode is exact: with ``G`` the configurations that can reach
    an empty-stack deadlock (computed by saturation), ``root`` is normed iff
    it cannot reach the complement of ``G``.  ``explicit=True`` instead
    inspects the reachable set cut at ``stack_cap`` and answers ``unknown``
    when that set is not closed.
    """
    if explicit:
        return _check_normed_explicit(pda, root, stack_cap, budget)
    good, gf = can_empty(pda)
    gamma = sorted(pda.stack_alphabet) + [BOTTOM]
    # complement of G as a P-automaton: subset construction from each control state
    trans = set()
    index: dict = {}
    todo = []

    def subset_state(S):
        key = ("S", S)
        if key not in index:
            index[key] = True
            todo.append(S)
        return key

    def step_set(S, g):
        return frozenset(q2 for q in S for (h, q2) in good.get(q, ()) if h == g)

    for p in pda.states | {root.state}:
        for g in gamma:
            S = step_set(frozenset({p}), g)
            if g == BOTTOM:
                if not (S & gf):
                    trans.add((p, g, "ACC"))
            else:
                trans.add((p, g, subset_state(S)))
    while todo:
        S = todo.pop()
        for g in gamma:
            T = step_set(S, g)
            if g == BOTTOM:
                if not (T & gf):
                    trans.add((("S", S), g, "ACC"))
            else:
                trans.add((("S", S), g, subset_state(T)))
    bad = _pre_star(pda, trans, {"ACC"})
    if not _accepts(bad, {"ACC"}, root.state, root.stack + (BOTTOM,)):
        return NormedVerdict("normed")
    # find a concrete witness by breadth-first search
    ex = Explorer(pda)
    start = ex.node(root)
    seen = {start}
    queue = deque([start])
    cap = stack_cap if stack_cap is not None else INF
    while queue:
        n = queue.popleft()
        c = ex.config(n)
        if not _accepts(good, gf, c.state, c.stack + (BOTTOM,)):
            return NormedVerdict("not-normed", c)
        for _, m in ex.successors(n):
            if m not in seen and ex.height[m[1]] <= cap:
                seen.add(m)
                if len(seen) > budget:
                    raise BudgetExceeded(budget)
                queue.append(m)
    return NormedVerdict("not-normed", None)


def _check_normed_explicit(pda, root, stack_cap, budget) -> NormedVerdict:
    if stack_cap is None:
        raise ValueError("explicit mode needs a stack cap")
    ex = Explorer(pda)
    r = ex.node(root)
    seen, closed = _explore(ex, [r], stack_cap, budget)
    pred = defaultdict(list)
    ok = set()
    for n in seen:
        succ = ex.successors(n)
        if not succ and n[1] == 0:
            ok.add(n)
        for _, m in succ:
            if m in seen:
                pred[m].append(n)
    todo = list(ok)
    while todo:
        for p in pred[todo.pop()]:
            if p not in ok:
                ok.add(p)
                todo.append(p)
    if len(ok) == len(seen):
        return NormedVerdict("normed") if closed else NormedVerdict("unknown")
    if not closed:
        return NormedVerdict("unknown")
    bad = min((n for n in seen if n not in ok), key=lambda n: (ex.height[n[1]], n))
    return NormedVerdict("not-normed", ex.config(bad))
