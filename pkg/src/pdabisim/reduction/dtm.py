"""Space-bounded deterministic Turing machines encoded as transducer machines.

A configuration is ``(state, head, tape)``.  Each cell is written as a block of
``B = n + m`` bits (``m`` = number of states plus tape symbols); a cell holding
the head carries the pair ``(state, symbol)``.  Trailing padding bits are 1,
or 0 when the state is accepting.  Codes are chosen per cell so that the
initial configuration is ``1^l`` and the final accepting one is ``0^l``.

``T1`` reads ``enc(c)`` and writes ``enc(succ(c))``; ``T2`` re-writes its input.
Both delay their output by ``D`` bits: ``D - 1`` dummies, then bits, then one
packed symbol holding the last ``D`` bits.  ``T1`` ends in ``yh`` on halting or
malformed input and ``T2`` ends in ``yx`` on malformed input, so neither end
can be matched by the other.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterator, Mapping

from ..counters import tow
from ..transducer import Transducer
from .machine import BITS, TransducerMachine

MOVES = {"L": -1, "R": 1, "S": 0}
DUMMY, HALT, MALFORMED = "yd", "yh", "yx"


class DtmError(ValueError):
    pass


Cell = tuple  # (state or None, symbol)


@dataclass(frozen=True)
class DtmConfig:
    state: str
    head: int
    tape: tuple[str, ...]


@dataclass(frozen=True)
class DtmSpec:
    states: tuple[str, ...]
    tape: tuple[str, ...]
    blank: str
    init: str
    accept: str
    reject: str
    space: int
    final: tuple[str, ...]
    delta: Mapping[tuple[str, str], tuple[str, str, str]] = field(hash=False)

    def __post_init__(self):
        if len(set(self.states)) != len(self.states) or len(set(self.tape)) != len(self.tape):
            raise DtmError("duplicate state or tape symbol")
        for q in (self.init, self.accept, self.reject):
            if q not in self.states:
                raise DtmError(f"unknown state {q!r}")
        if self.accept == self.reject:
            raise DtmError("accept and reject states must differ")
        if self.blank not in self.tape:
            raise DtmError("blank is not a tape symbol")
        if self.space < 1:
            raise DtmError("space bound must be positive")
        if len(self.final) != self.space or any(a not in self.tape for a in self.final):
            raise DtmError("final tape must list one tape symbol per cell")
        if any(a == self.blank for a in self.final[1:]):
            raise DtmError("final tape must be non-blank outside cell 0")
        for (q, a), (r, b, d) in self.delta.items():
            if q in self.halting:
                raise DtmError(f"halting state {q!r} has a transition")
            if q not in self.states or r not in self.states or a not in self.tape or b not in self.tape:
                raise DtmError(f"transition {q} {a} mentions an unknown name")
            if d not in MOVES:
                raise DtmError(f"bad head move {d!r}")
        for q in self.states:
            if q in self.halting:
                continue
            for a in self.tape:
                if (q, a) not in self.delta:
                    raise DtmError(f"no transition for {q} {a}")

    @property
    def halting(self) -> frozenset:
        return frozenset((self.accept, self.reject))

    @property
    def m(self) -> int:
        return len(self.states) + len(self.tape)

    def initial(self) -> DtmConfig:
        return DtmConfig(self.init, 0, (self.blank,) * self.space)

    def accepting(self) -> DtmConfig:
        return DtmConfig(self.accept, 0, self.final)

    def configs(self) -> Iterator[DtmConfig]:
        for q in self.states:
            for h in range(self.space):
                for t in product(self.tape, repeat=self.space):
                    yield DtmConfig(q, h, t)

    def successor(self, c: DtmConfig) -> DtmConfig | None:
        """Next configuration; the head is clamped at both tape ends."""
        if c.state in self.halting:
            return None
        r, b, d = self.delta[(c.state, c.tape[c.head])]
        tape = list(c.tape)
        tape[c.head] = b
        h = min(max(c.head + MOVES[d], 0), self.space - 1)
        return DtmConfig(r, h, tuple(tape))

    def run(self, max_steps: int = 10_000) -> list[DtmConfig]:
        trace = [self.initial()]
        for _ in range(max_steps):
            nxt = self.successor(trace[-1])
            if nxt is None:
                break
            trace.append(nxt)
        return trace


# -- encoding ------------------------------------------------------------------

def _symbols(m: DtmSpec) -> list[Cell]:
    return [(None, a) for a in m.tape] + [(q, a) for q in m.states for a in m.tape]


@dataclass(frozen=True)
class Encoding:
    dtm: DtmSpec
    n: int
    ell: int

    @property
    def block(self) -> int:
        return self.n + self.dtm.m

    @property
    def delay(self) -> int:
        return min(2 * self.block, self.ell)

    @property
    def padding(self) -> int:
        return self.ell - self.dtm.space * self.block

    @cached_property
    def codes(self) -> tuple[dict, ...]:
        """Per cell: symbol -> bit string, with the initial and final symbols fixed."""
        m, b = self.dtm, self.block
        syms = _symbols(m)
        if len(syms) > 1 << b:
            raise DtmError(f"block of {b} bits cannot hold {len(syms)} cell symbols")
        ones, zeros = "1" * b, "0" * b
        tables = []
        for c in range(m.space):
            first = (m.init, m.blank) if c == 0 else (None, m.blank)
            last = (m.accept, m.final[0]) if c == 0 else (None, m.final[c])
            free = (format(v, f"0{b}b") for v in range(1, (1 << b) - 1))
            table = {first: ones, last: zeros}
            for s in syms:
                if s not in table:
                    table[s] = next(free)
            tables.append(table)
        return tuple(tables)

    @cached_property
    def decodes(self) -> tuple[dict, ...]:
        return tuple({v: k for k, v in t.items()} for t in self.codes)

    @cached_property
    def prefixes(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(w[:i] for w in t.values() for i in range(len(w) + 1))
                     for t in self.codes)

    def pad(self, state: str) -> str:
        return ("0" if state == self.dtm.accept else "1") * self.padding

    def enc(self, c: DtmConfig) -> str:
        cells = [((c.state if i == c.head else None), a) for i, a in enumerate(c.tape)]
        return "".join(self.codes[i][s] for i, s in enumerate(cells)) + self.pad(c.state)

    def dec(self, word: str) -> DtmConfig | None:
        b, s = self.block, self.dtm.space
        if len(word) != self.ell:
            return None
        cells = [self.decodes[i].get(word[i * b:(i + 1) * b]) for i in range(s)]
        if any(x is None for x in cells):
            return None
        heads = [i for i, (q, _) in enumerate(cells) if q is not None]
        if len(heads) != 1:
            return None
        q = cells[heads[0]][0]
        if word[s * b:] != self.pad(q):
            return None
        return DtmConfig(q, heads[0], tuple(a for _, a in cells))

    # cell-local successor: new content of cell c from old cells c-1, c, c+1
    def new_cell(self, c: int, cells: tuple) -> Cell:
        m = self.dtm
        q, a = cells[c]
        if q is not None:
            if q in m.halting:
                return cells[c]
            r, b, d = m.delta[(q, a)]
            h = min(max(c + MOVES[d], 0), m.space - 1)
            return (r, b) if h == c else (None, b)
        for nb, d in ((c - 1, "R"), (c + 1, "L")):
            if 0 <= nb < m.space:
                p, x = cells[nb]
                if p is not None and p not in m.halting and m.delta[(p, x)][2] == d:
                    return (m.delta[(p, x)][0], a)
        return cells[c]


# -- transducer construction ----------------------------------------------------
#
# A state is ``(i, cells, partial, bad)``: bits read, decoded cells, bits of the
# current cell, and a flag for malformed input.  A bad state forgets the rest.

def _advance(e: Encoding, st, bit: str):
    i, cells, partial, bad = st
    i += 1
    if bad:
        return (i, (), "", True)
    b, s = e.block, e.dtm.space
    if len(cells) < s:
        partial += bit
        if partial not in e.prefixes[len(cells)]:
            return (i, (), "", True)
        if len(partial) == b:
            sym = e.decodes[len(cells)].get(partial)
            if sym is None:
                return (i, (), "", True)
            cells, partial = cells + (sym,), ""
            if len(cells) == s and sum(q is not None for q, _ in cells) != 1:
                return (i, (), "", True)
        return (i, cells, partial, False)
    head = next(q for q, _ in cells if q is not None)
    if bit != ("0" if head == e.dtm.accept else "1"):
        return (i, (), "", True)
    return (i, cells, partial, False)


def _bit_of(e: Encoding, cells: tuple, j: int, successor: bool) -> str:
    b, s = e.block, e.dtm.space
    c = j // b
    if c < s:
        sym = e.new_cell(c, cells) if successor else cells[c]
        return e.codes[c][sym][j % b]
    if successor:
        states = [e.new_cell(x, cells)[0] for x in range(s)]
        head = next(q for q in states if q is not None)
    else:
        head = next(q for q, _ in cells if q is not None)
    return "0" if head == e.dtm.accept else "1"


def _output(e: Encoding, st, successor: bool) -> str:
    i, cells, _, bad = st
    pos, d, ell = i - 1, e.delay, e.ell
    if pos < d - 1:
        return DUMMY
    if pos < ell - 1:
        return "y0" if bad else "y" + _bit_of(e, cells, pos - d + 1, successor)
    if bad:
        return HALT if successor else MALFORMED
    if successor and any(q in e.dtm.halting for q, _ in cells if q is not None):
        return HALT
    return "yp" + "".join(_bit_of(e, cells, j, successor) for j in range(ell - d, ell))


def _build(e: Encoding, successor: bool) -> Transducer:
    start = (0, (), "", False)
    names = {start: 0}
    delta = {}
    todo = deque([start])
    while todo:
        st = todo.popleft()
        for bit in BITS:
            nxt = _advance(e, st, bit)
            if nxt[0] == e.ell:  # past the end: collapse into one sink
                nxt_key = ("end",)
            else:
                nxt_key = nxt
            if nxt_key not in names:
                names[nxt_key] = len(names)
                if nxt_key != ("end",):
                    todo.append(nxt)
            delta[(names[st], bit)] = (names[nxt_key], (_output(e, nxt, successor),))
    sink = names.get(("end",))
    if sink is not None:
        for bit in BITS:
            delta[(sink, bit)] = (sink, (DUMMY,))
    outputs = {w[0] for _, w in delta.values()}
    return Transducer(frozenset(names.values()), 0, frozenset(BITS), frozenset(outputs), delta)


def encode_dtm(m: DtmSpec, k: int, n: int) -> tuple[TransducerMachine, Encoding]:
    """The machine ``(tow(k, n), T1, T2)`` together with its configuration encoding."""
    ell = tow(k, n)
    e = Encoding(m, n, ell)
    if m.space * e.block > ell:
        raise DtmError(f"space {m.space} needs {m.space * e.block} bits but l = {ell}")
    _ = e.codes  # validates the block size
    return TransducerMachine(ell, _build(e, True), _build(e, False)), e


# -- text format ---------------------------------------------------------------

_KEYS = ("states", "tape", "blank", "init", "accept", "reject", "space", "final")


def parse_dtm(text: str) -> DtmSpec:
    """``key: value`` header lines and ``q s -> q' s' L|R|S`` transitions."""
    head: dict[str, str] = {}
    delta: dict[tuple[str, str], tuple[str, str, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            lhs, rhs = (p.split() for p in line.split("->", 1))
            if len(lhs) != 2 or len(rhs) != 3:
                raise DtmError(f"line {lineno}: expected 'q s -> q2 s2 L|R|S'")
            if tuple(lhs) in delta:
                raise DtmError(f"line {lineno}: second transition for {lhs[0]} {lhs[1]}")
            delta[tuple(lhs)] = tuple(rhs)
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in _KEYS:
            raise DtmError(f"line {lineno}: unknown directive {key!r}")
        if key in head:
            raise DtmError(f"line {lineno}: duplicate {key!r}")
        head[key] = value.strip()
    missing = [k for k in _KEYS if k not in head]
    if missing:
        raise DtmError(f"missing {', '.join(missing)}")
    try:
        space = int(head["space"])
    except ValueError:
        raise DtmError("space must be an integer") from None
    return DtmSpec(tuple(head["states"].split()), tuple(head["tape"].split()), head["blank"],
                   head["init"], head["accept"], head["reject"], space,
                   tuple(head["final"].split()), delta)


def format_dtm(m: DtmSpec) -> str:
    lines = [f"states: {' '.join(m.states)}", f"tape: {' '.join(m.tape)}", f"blank: {m.blank}",
             f"init: {m.init}", f"accept: {m.accept}", f"reject: {m.reject}",
             f"space: {m.space}", f"final: {' '.join(m.final)}"]
    lines += [f"{q} {a} -> {r} {b} {d}" for (q, a), (r, b, d) in sorted(m.delta.items())]
    return "\n".join(lines) + "\n"


TOY_DTM = """\
# fills both cells with F, walks back and accepts
states: q0 q1 qa qr
tape: _ F
blank: _
init: q0
accept: qa
reject: qr
space: 2
final: F F
q0 _ -> q0 F R
q0 F -> q1 F L
q1 F -> qa F S
q1 _ -> qr _ S
"""


def toy_dtm() -> DtmSpec:
    return parse_dtm(TOY_DTM)
