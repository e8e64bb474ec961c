"""The rule system that simulates a transducer machine by a bisimulation game.

A control-state pair is named by a word over basic symbols; the word is
written with ``+`` between symbols, e.g. ``dec_0+ones1_1+fin``.  The head
symbol says what the pair does, the rest is its continuation.  Pairs are
instantiated lazily from the roots, so only names the rules can reach
are ever built.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..counters import omega, omega_upto, sym, tow
from ..fsa import cat, cls, star, star_of
from ..lts import Config, Pda, left, right
from ..macros import AttChoice, Chain, DefChoice, GuardedPop, PairPush, expand_all
from ..transducer import homomorphism_transducer, rename_inputs, shuffle
from .incr import counter_block, flat_blocks, testdec_transducers
from .machine import TransducerMachine

BASE_ACTIONS = frozenset({"0", "1", "#", "a", "b"})


class ReductionError(ValueError):
    pass


def name(*parts: str) -> str:
    return "+".join(parts)


def split(n: str) -> tuple[str, ...]:
    return tuple(n.split("+"))


def _sym_name(base: str, level: int) -> str:
    return f"{base}_{level}"


def _head(h: str) -> tuple[str, int | None]:
    base, sep, lvl = h.rpartition("_")
    if sep and lvl.isdigit():
        return base, int(lvl)
    return h, None


@dataclass
class Reduction:
    pda: Pda
    k: int
    n: int
    normed: bool
    macros: list = field(default_factory=list)
    names: list = field(default_factory=list)

    @property
    def dollar(self) -> str:
        return sym(0, self.k + 1)

    def left_start(self) -> Config:
        return Config(left("start"))

    def right_start(self) -> Config:
        return Config(right("start"))


class _Builder:
    def __init__(self, tm: TransducerMachine | None, k: int, n: int, normed: bool):
        if k < 1 or n < 1:
            raise ReductionError("need k >= 1 and n >= 1")
        self.tm, self.k, self.n, self.normed = tm, k, n, normed
        self.dollar = sym(0, k + 1)
        self.alphabet = omega_upto(k + 1)
        if tm is not None:
            clash = tm.upsilon & BASE_ACTIONS
            if clash:
                raise ReductionError(f"output letters collide with the base actions: {sorted(clash)}")

    def two_blocks(self, level: int) -> bool:
        """True when an l-counter has exactly two blocks (Tow(l, n) = 2)."""
        return level >= 1 and tow(level, self.n) == 2

    # every method returns a list of macros for the pair (or state) it is given
    def rules(self, pair: str) -> list:
        parts = split(pair)
        base, lvl = _head(parts[0])
        alpha = parts[1:]
        meth = getattr(self, "r_" + base.replace("(", "_").replace(")", ""), None)
        if meth is None and base.startswith("dec(") and lvl == 0:
            return self.r_deci(pair, int(base[4:-1]), alpha)
        if meth is None:
            raise ReductionError(f"no rules for pair {pair!r}")
        return meth(pair, lvl, alpha)

    # -- top level ------------------------------------------------------------
    def r_start(self, pair, lvl, alpha):
        k, d = self.k, self.dollar
        if self.normed:
            return [PairPush(pair, name(_sym_name("ones", k), "start0"), (d,))]
        return [PairPush(pair, name(_sym_name("ones", k), "fin"), (d,))]

    def r_start0(self, pair, lvl, alpha):
        return [PairPush(pair, name(_sym_name("ones", self.k), "fin"), (self.dollar,))]

    def r_fin(self, pair, lvl, alpha):
        return [DefChoice(pair, (("testFin", ()), ("next", (self.dollar,))))]

    def r_testFin(self, pair, lvl, alpha):
        k = self.k
        one = sym(1, k)
        guard = cat(star(cat(star_of(omega_upto(k - 1)), cls(omega(k)))), cls({self.dollar}))
        tl = shuffle(homomorphism_transducer({one}, "b"),
                     homomorphism_transducer(self.alphabet - {one}, "a"))
        tr = homomorphism_transducer(self.alphabet, "a")
        return [GuardedPop(left(pair), guard, tl, left("popAll")),
                GuardedPop(right(pair), guard, tr, right("popAll"))]

    def r_popAll(self, pair, lvl, alpha):
        return [Chain(pol(pair), s, ("a",), pol(pair))
                for pol in (left, right) for s in sorted(self.alphabet)]

    def r_next(self, pair, lvl, alpha):
        k = self.k
        after = "next0" if self.normed else "next1"
        return [DefChoice(pair, tuple((name(_sym_name("ones", k - 1), after), (s,))
                                      for s in sorted(omega(k))))]

    def r_next0(self, pair, lvl, alpha):
        k = self.k
        after = "tran" if self.two_blocks(k) else "next1"
        return [DefChoice(pair, tuple((name(_sym_name("zOnes", k - 1), after), (s,))
                                      for s in sorted(omega(k))))]

    def r_next1(self, pair, lvl, alpha):
        k = self.k
        opts = []
        for s in sorted(omega(k)):
            opts.append((name(_sym_name("dec", k - 1), "next1"), (s,)))
            opts.append((name(_sym_name("zero", k - 1), "tran"), (s,)))
        return [DefChoice(pair, tuple(opts))]

    def r_tran(self, pair, lvl, alpha):
        return [AttChoice(pair, ((name(_sym_name("ones", self.k), "testTran"), (self.dollar,)),
                                 ("fin", ())))]

    def r_testTran(self, pair, lvl, alpha):
        k, a = self.k, self.alphabet
        d = cls({self.dollar})
        low = star_of(omega_upto(k))
        return [GuardedPop(left(pair), cat(low, d, low, d), homomorphism_transducer(a, "a"),
                           left("testTran1")),
                GuardedPop(right(pair), cat(low, d), homomorphism_transducer(a, ("a", "a")),
                           right("testTran1"))]

    def r_testTran1(self, pair, lvl, alpha):
        if self.tm is None:
            raise ReductionError("testTran1 needs a transducer machine")
        k = self.k
        guard = cat(star(cat(star_of(omega_upto(k - 1)), cls(omega(k)))), cls({self.dollar}))
        ren = {"0": sym(0, k), "1": sym(1, k)}
        rest = homomorphism_transducer(self.alphabet - omega(k), "a")
        t1 = shuffle(rename_inputs(self.tm.t1, ren), rest)
        t2 = shuffle(rename_inputs(self.tm.t2, ren), rest)
        stop = _sym_name("stop", k)
        return [GuardedPop(left(pair), guard, t1, left(stop)),
                GuardedPop(right(pair), guard, t2, right(stop))]

    # -- checking counters ----------------------------------------------------
    def r_stop(self, pair, lvl, alpha):
        if not self.normed:
            return []
        a = self.alphabet
        return [GuardedPop(left(pair), flat_blocks(lvl, 1), homomorphism_transducer(a, ("a", "a")),
                           left("popAll")),
                GuardedPop(right(pair), flat_blocks(lvl, 2), homomorphism_transducer(a, "a"),
                           right("popAll"))]

    def r_testDec(self, pair, lvl, alpha):
        a = self.alphabet
        nxt = _sym_name("testDec1", lvl)
        return [GuardedPop(left(pair), flat_blocks(lvl, 2), homomorphism_transducer(a, "a"), left(nxt)),
                GuardedPop(right(pair), flat_blocks(lvl, 1), homomorphism_transducer(a, ("a", "a")),
                           right(nxt))]

    def r_testDec1(self, pair, lvl, alpha):
        t0, t1 = testdec_transducers(lvl)
        stop = _sym_name("stop", lvl)
        g = counter_block(lvl)
        return [GuardedPop(left(pair), g, t0, left(stop)),
                GuardedPop(right(pair), g, t1, right(stop))]

    # -- building counters ----------------------------------------------------
    def r_ones(self, pair, lvl, alpha):
        if lvl == 0:
            return [PairPush(pair, name(*alpha), (sym(1, 0),) * self.n)]
        after = "ones0" if self.normed else "ones1"
        return [PairPush(pair, name(_sym_name("ones", lvl - 1), _sym_name(after, lvl), *alpha),
                         (sym(1, lvl),))]

    def r_ones0(self, pair, lvl, alpha):
        if self.two_blocks(lvl):
            return [PairPush(pair, name(_sym_name("zOnes", lvl - 1), *alpha), (sym(1, lvl),))]
        return [PairPush(pair, name(_sym_name("zOnes", lvl - 1), _sym_name("ones1", lvl), *alpha),
                         (sym(1, lvl),))]

    def r_ones1(self, pair, lvl, alpha):
        one = (sym(1, lvl),)
        return [DefChoice(pair, ((name(_sym_name("dec", lvl - 1), _sym_name("ones1", lvl), *alpha), one),
                                 (name(_sym_name("zero", lvl - 1), *alpha), one)))]

    def r_decOk(self, pair, lvl, alpha):
        if lvl == 0:
            test = (_sym_name("testDec", 0), (sym(0, 0),) * self.n + (sym(0, 1),))
        else:
            test = (name(_sym_name("ones", lvl), _sym_name("testDec", lvl)), (sym(0, lvl + 1),))
        return [AttChoice(pair, ((name(*alpha), ()), test))]

    def r_zero(self, pair, lvl, alpha):
        if lvl == 0:
            return [PairPush(pair, name(_sym_name("decOk", 0), *alpha), (sym(0, 0),) * self.n)]
        after = "zero0" if self.normed else "zero1"
        return [PairPush(pair, name(_sym_name("ones", lvl - 1), _sym_name(after, lvl), *alpha),
                         (sym(0, lvl),))]

    def r_zero0(self, pair, lvl, alpha):
        nxt = _sym_name("decOk" if self.two_blocks(lvl) else "zero1", lvl)
        return [PairPush(pair, name(_sym_name("zOnes", lvl - 1), nxt, *alpha), (sym(0, lvl),))]

    def r_zero1(self, pair, lvl, alpha):
        z = (sym(0, lvl),)
        return [DefChoice(pair, (
            (name(_sym_name("dec", lvl - 1), _sym_name("zero1", lvl), *alpha), z),
            (name(_sym_name("zero", lvl - 1), _sym_name("decOk", lvl), *alpha), z)))]

    def r_dec(self, pair, lvl, alpha):
        if lvl == 0:
            nxt = name("dec(1)_0", *alpha)
            return [DefChoice(pair, tuple((nxt, (s,)) for s in sorted(omega(0))))]
        after = "dec0" if self.normed else "dec1"
        return [DefChoice(pair, tuple(
            (name(_sym_name("ones", lvl - 1), _sym_name(after, lvl), *alpha), (s,))
            for s in sorted(omega(lvl))))]

    def r_deci(self, pair, i, alpha):
        if i == self.n:
            return [PairPush(pair, name("decOk_0", *alpha))]
        nxt = name(f"dec({i + 1})_0", *alpha)
        return [DefChoice(pair, tuple((nxt, (s,)) for s in sorted(omega(0))))]

    def r_dec0(self, pair, lvl, alpha):
        nxt = _sym_name("decOk" if self.two_blocks(lvl) else "dec1", lvl)
        return [DefChoice(pair, tuple((name(_sym_name("zOnes", lvl - 1), nxt, *alpha), (s,))
                                      for s in sorted(omega(lvl))))]

    def r_dec1(self, pair, lvl, alpha):
        opts = []
        for s in sorted(omega(lvl)):
            opts.append((name(_sym_name("dec", lvl - 1), _sym_name("dec1", lvl), *alpha), (s,)))
            opts.append((name(_sym_name("zero", lvl - 1), _sym_name("decOk", lvl), *alpha), (s,)))
        return [DefChoice(pair, tuple(opts))]

    def r_zOnes(self, pair, lvl, alpha):
        if lvl == 0:
            return [PairPush(pair, name(*alpha), (sym(0, 0),) + (sym(1, 0),) * (self.n - 1))]
        return [PairPush(pair, name(_sym_name("ones", lvl - 1), _sym_name("zOnes0", lvl), *alpha),
                         (sym(1, lvl),))]

    def r_zOnes0(self, pair, lvl, alpha):
        if self.two_blocks(lvl):
            return [PairPush(pair, name(_sym_name("zOnes", lvl - 1), *alpha), (sym(0, lvl),))]
        return [PairPush(pair, name(_sym_name("zOnes", lvl - 1), _sym_name("zOnes1", lvl), *alpha),
                         (sym(1, lvl),))]

    def r_zOnes1(self, pair, lvl, alpha):
        return [DefChoice(pair, (
            (name(_sym_name("dec", lvl - 1), _sym_name("zOnes1", lvl), *alpha), (sym(1, lvl),)),
            (name(_sym_name("zero", lvl - 1), *alpha), (sym(0, lvl),))))]


def _targets(m) -> list[str]:
    """Pair names a macro leads into (left/right states reduced to their pair)."""
    if isinstance(m, (DefChoice, AttChoice)):
        return [d for d, _ in m.options]
    if isinstance(m, PairPush):
        return [m.dst]
    if isinstance(m, (GuardedPop, Chain)):
        return [m.dst[1:] if m.dst.startswith(".") else m.dst[:-1]]
    return []


def build_macros(tm: TransducerMachine | None, k: int, n: int, normed: bool = False,
                 roots: tuple[str, ...] = ("start",)) -> tuple[list, list[str]]:
    """All macros reachable from ``roots`` (pair names), plus the pair names in visit order."""
    b = _Builder(tm, k, n, normed)
    seen = set(roots)
    order = list(roots)
    macros = []
    i = 0
    while i < len(order):
        pair = order[i]
        i += 1
        if len(split(pair)) > k + 2:
            raise ReductionError(f"pair name {pair!r} is longer than k + 2 symbols")
        for m in b.rules(pair):
            macros.append(m)
            for t in _targets(m):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
    return macros, order


def build_reduction(tm: TransducerMachine | None, k: int, n: int, normed: bool = False,
                    roots: tuple[str, ...] = ("start",), check_ell: bool = True) -> Reduction:
    """The PDA whose start pair is bisimilar iff the machine's run ends in ``0^l``.

    ``roots`` other than ``start`` build a fragment (no machine needed unless
    ``testTran1`` is reachable).
    """
    if tm is not None and check_ell and tm.ell != tow(k, n):
        raise ReductionError(f"machine has ell = {tm.ell}, but tow({k}, {n}) = {tow(k, n)}")
    macros, names = build_macros(tm, k, n, normed, roots)
    actions = set(BASE_ACTIONS) | (set(tm.upsilon) if tm is not None else set())
    pda = expand_all(macros, omega_upto(k + 1))
    pda = Pda(pda.states, omega_upto(k + 1), frozenset(actions | pda.actions), pda.rules)
    return Reduction(pda, k, n, normed, macros, names)
