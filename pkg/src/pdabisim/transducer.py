"""Real-time, non-erasing, deterministic finite-state transducers."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class TransducerError(ValueError):
    pass


@dataclass(frozen=True)
class Transducer:
    states: frozenset
    initial: object
    inputs: frozenset
    outputs: frozenset
    delta: Mapping[tuple[object, str], tuple[object, tuple[str, ...]]]

    def __post_init__(self):
        if self.initial not in self.states:
            raise TransducerError(f"initial state {self.initial!r} not among states")
        for q in self.states:
            for a in self.inputs:
                got = self.delta.get((q, a))
                if got is None:
                    raise TransducerError(f"no transition for ({q!r}, {a!r})")
                r, w = got
                if r not in self.states:
                    raise TransducerError(f"transition ({q!r}, {a!r}) leads to unknown state {r!r}")
                if not w:
                    raise TransducerError(f"transition ({q!r}, {a!r}) has empty output")
                bad = [x for x in w if x not in self.outputs]
                if bad:
                    raise TransducerError(f"output symbol {bad[0]!r} not in output alphabet")

    @cached_property
    def letter_to_letter(self) -> bool:
        return all(len(w) == 1 for _, w in self.delta.values())

    @property
    def size(self) -> int:
        """|Q| + |Sigma| + |Upsilon| + total length of all outputs."""
        return (len(self.states) + len(self.inputs) + len(self.outputs)
                + sum(len(w) for _, w in self.delta.values()))

    def step(self, q, a: str):
        try:
            return self.delta[(q, a)]
        except KeyError:
            raise TransducerError(f"unknown input symbol {a!r}") from None

    def run_from(self, q, word: Sequence[str]):
        out: list[str] = []
        for a in word:
            q, w = self.step(q, a)
            out.extend(w)
        return q, tuple(out)

    def __call__(self, word: Sequence[str]) -> tuple[str, ...]:
        return run_transducer(self, word)


def run_transducer(t: Transducer, w: Sequence[str]) -> tuple[str, ...]:
    return t.run_from(t.initial, w)[1]


def make_transducer(table: Mapping[tuple[object, str], tuple[object, Iterable[str] | str]],
                    initial, inputs: Iterable[str] | None = None,
                    outputs: Iterable[str] | None = None) -> Transducer:
    """Convenience constructor; a ``str`` output is a one-letter word."""
    delta = {}
    for (q, a), (r, w) in table.items():
        delta[(q, a)] = (r, (w,) if isinstance(w, str) else tuple(w))
    states = {initial} | {q for q, _ in delta} | {r for r, _ in delta.values()}
    ins = set(inputs) if inputs is not None else {a for _, a in delta}
    outs = set(outputs) if outputs is not None else {x for _, w in delta.values() for x in w}
    return Transducer(frozenset(states), initial, frozenset(ins), frozenset(outs), delta)


def homomorphism_transducer(alphabet: Iterable[str], w: Sequence[str] | str) -> Transducer:
    """Single-state transducer sending every letter of ``alphabet`` to ``w``."""
    w = (w,) if isinstance(w, str) else tuple(w)
    if not w:
        raise TransducerError("homomorphism image must be nonempty")
    alphabet = frozenset(alphabet)
    return Transducer(frozenset({0}), 0, alphabet, frozenset(w),
                      {(0, a): (0, w) for a in alphabet})


def shuffle(t1: Transducer, t2: Transducer) -> Transducer:
    """Product transducer over the disjoint union of the input alphabets.

    Each letter drives the component owning it; the other component's
    state is carried along unchanged.
    """
    if t1.inputs & t2.inputs:
        raise TransducerError(f"input alphabets overlap on {sorted(t1.inputs & t2.inputs)}")
    delta = {}
    for q1 in t1.states:
        for q2 in t2.states:
            for a in t1.inputs:
                r, w = t1.delta[(q1, a)]
                delta[((q1, q2), a)] = ((r, q2), w)
            for a in t2.inputs:
                r, w = t2.delta[(q2, a)]
                delta[((q1, q2), a)] = ((q1, r), w)
    states = frozenset((q1, q2) for q1 in t1.states for q2 in t2.states)
    return Transducer(states, (t1.initial, t2.initial), t1.inputs | t2.inputs,
                      t1.outputs | t2.outputs, delta)


def rename_inputs(t: Transducer, mapping: Mapping[str, str]) -> Transducer:
    delta = {(q, mapping[a]): v for (q, a), v in t.delta.items()}
    return Transducer(t.states, t.initial, frozenset(mapping[a] for a in t.inputs), t.outputs, delta)


def trim(t: Transducer) -> Transducer:
    """Restrict to states reachable from the initial state."""
    seen = {t.initial}
    todo = [t.initial]
    while todo:
        q = todo.pop()
        for a in t.inputs:
            r = t.delta[(q, a)][0]
            if r not in seen:
                seen.add(r)
                todo.append(r)
    delta = {(q, a): v for (q, a), v in t.delta.items() if q in seen}
    return Transducer(frozenset(seen), t.initial, t.inputs, t.outputs, delta)


# -- text format --------------------------------------------------------------

def parse_transducer(text: str) -> Transducer:
    """Header keys ``states:``, ``init:``, ``in:``, ``out:`` then ``q a -> r w...`` lines."""
    header: dict[str, list[str]] = {}
    table = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "->" in line:
            lhs, rhs = line.split("->", 1)
            lhs, rhs = lhs.split(), rhs.split()
            if len(lhs) != 2 or len(rhs) < 2:
                raise TransducerError(f"line {lineno}: expected 'q a -> r out...'")
            if (lhs[0], lhs[1]) in table:
                raise TransducerError(f"line {lineno}: duplicate transition for {tuple(lhs)}")
            table[(lhs[0], lhs[1])] = (rhs[0], tuple(rhs[1:]))
            continue
        key = None
        for tok in line.split():
            if tok.endswith(":") and tok[:-1] in ("states", "init", "in", "out"):
                key = tok[:-1]
                header[key] = []
            elif key is None:
                raise TransducerError(f"line {lineno}: unexpected {tok!r}")
            else:
                header[key].append(tok)
    for key in ("states", "init", "in", "out"):
        if key not in header:
            raise TransducerError(f"missing header field {key!r}")
    if len(header["init"]) != 1:
        raise TransducerError("init: needs exactly one state")
    return Transducer(frozenset(header["states"]), header["init"][0], frozenset(header["in"]),
                      frozenset(header["out"]), table)


def format_transducer(t: Transducer) -> str:
    names = {q: _state_token(q) for q in t.states}
    lines = [
        "states: " + " ".join(sorted(names.values())),
        "init: " + names[t.initial],
        "in: " + " ".join(sorted(t.inputs)),
        "out: " + " ".join(sorted(t.outputs)),
    ]
    for (q, a), (r, w) in sorted(t.delta.items(), key=lambda kv: (names[kv[0][0]], kv[0][1])):
        lines.append(f"{names[q]} {a} -> {names[r]} {' '.join(w)}")
    return "\n".join(lines) + "\n"


def _state_token(q) -> str:
    if isinstance(q, tuple):
        return "(" + ",".join(_state_token(x) for x in q) + ")"
    return str(q)
