"""Transducer machines ``(l, T1, T2)`` and their deterministic runs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from ..transducer import Transducer, TransducerError, format_transducer, make_transducer, parse_transducer

MAX_ENUM_ELL = 20
BITS = ("0", "1")


class MachineError(ValueError):
    pass


@dataclass(frozen=True)
class TransducerMachine:
    ell: int
    t1: Transducer
    t2: Transducer

    def __post_init__(self):
        if self.ell < 1:
            raise MachineError("ell must be at least 1")
        for name, t in (("T1", self.t1), ("T2", self.t2)):
            if t.inputs != frozenset(BITS):
                raise MachineError(f"{name} must read exactly the bits 0 and 1")
            if not t.letter_to_letter:
                raise MachineError(f"{name} is not letter-to-letter")

    @property
    def upsilon(self) -> frozenset:
        return self.t1.outputs | self.t2.outputs


@dataclass(frozen=True)
class MachineRun:
    trace: tuple[str, ...]
    status: str                  # dead-end | non-unique-successor | step-budget-exceeded
    at: int | None = None        # index of the word with several successors

    @property
    def last(self) -> str:
        return self.trace[-1]


def preimages(t: Transducer, target, limit: int | None = None) -> Iterator[str]:
    """All words ``z`` with ``t(z) == target`` (``t`` letter-to-letter), in lexicographic order."""
    target = tuple(target)
    # forward layers of states consistent with the target, then prune dead ones
    layers = [{t.initial}]
    for sym in target:
        layers.append({r for q in layers[-1] for b in BITS
                       for r, out in (t.delta[(q, b)],) if out[0] == sym})
    live = [set() for _ in layers]
    live[-1] = layers[-1]
    for i in range(len(target) - 1, -1, -1):
        live[i] = {q for q in layers[i] for b in BITS
                   if t.delta[(q, b)][1][0] == target[i] and t.delta[(q, b)][0] in live[i + 1]}
    found = 0
    stack = [(t.initial, 0, "")] if t.initial in live[0] else []
    while stack:
        q, i, word = stack.pop()
        if i == len(target):
            yield word
            found += 1
            if limit is not None and found >= limit:
                return
            continue
        for bit in reversed(BITS):
            r, out = t.delta[(q, bit)]
            if out[0] == target[i] and r in live[i + 1]:
                stack.append((r, i + 1, word + bit))


def successors(tm: TransducerMachine, z: str, limit: int | None = 2) -> list[str]:
    return list(preimages(tm.t2, tm.t1(z), limit))


def _check_size(tm: TransducerMachine, max_ell: int) -> None:
    if tm.ell > max_ell:
        raise MachineError(f"ell = {tm.ell} exceeds the enumeration bound {max_ell}")


def simulate_machine(tm: TransducerMachine, max_steps: int = 10_000,
                     max_ell: int = MAX_ENUM_ELL) -> MachineRun:
    """Run from ``1^l`` until a dead end, a non-unique successor or the step budget."""
    _check_size(tm, max_ell)
    trace = ["1" * tm.ell]
    for _ in range(max_steps):
        nxt = successors(tm, trace[-1])
        if not nxt:
            return MachineRun(tuple(trace), "dead-end")
        if len(nxt) > 1:
            return MachineRun(tuple(trace), "non-unique-successor", len(trace) - 1)
        trace.append(nxt[0])
    return MachineRun(tuple(trace), "step-budget-exceeded")


def check_zero_dead_end(tm: TransducerMachine, max_ell: int = MAX_ENUM_ELL) -> bool:
    _check_size(tm, max_ell)
    return not successors(tm, "0" * tm.ell, limit=1)


def stateless(mapping: dict[str, str]) -> Transducer:
    """One-state letter-to-letter transducer from a bit -> letter map."""
    return make_transducer({(0, b): (0, mapping[b]) for b in BITS}, 0, BITS)


def toy_machines(ell: int = 2) -> dict[str, TransducerMachine]:
    """The two bundled machines: one ends in ``0^l``, the other does not."""
    return {
        "bisimilar": TransducerMachine(ell, stateless({"1": "p", "0": "x"}),
                                       stateless({"0": "p", "1": "y"})),
        "non-bisimilar": TransducerMachine(ell, stateless({"1": "p", "0": "q"}),
                                           stateless({"0": "z", "1": "z"})),
    }


# -- text format --------------------------------------------------------------

def parse_machine(text: str) -> TransducerMachine:
    """``ell: <int>`` then ``T1:`` and ``T2:`` blocks in the transducer format."""
    ell = None
    blocks: dict[str, list[str]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("ell:"):
            try:
                ell = int(line[4:].strip())
            except ValueError:
                raise MachineError(f"line {lineno}: bad ell value") from None
            current = None
        elif line in ("T1:", "T2:"):
            current = line[:-1]
            if current in blocks:
                raise MachineError(f"line {lineno}: duplicate {current} block")
            blocks[current] = []
        elif current is None:
            raise MachineError(f"line {lineno}: text outside a T1:/T2: block")
        else:
            blocks[current].append(line)
    if ell is None:
        raise MachineError("missing 'ell:' line")
    if set(blocks) != {"T1", "T2"}:
        raise MachineError("need both T1: and T2: blocks")
    try:
        t1, t2 = (parse_transducer("\n".join(blocks[k])) for k in ("T1", "T2"))
    except TransducerError as e:
        raise MachineError(str(e)) from e
    return TransducerMachine(ell, t1, t2)


def format_machine(tm: TransducerMachine) -> str:
    return (f"ell: {tm.ell}\nT1:\n{format_transducer(tm.t1)}"
            f"T2:\n{format_transducer(tm.t2)}")
