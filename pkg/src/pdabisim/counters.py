"""Stockmeyer (l, n)-counters.

An (0, n)-counter is a word of ``n`` symbols from ``{0_0, 1_0}``, least
significant bit first.  For l >= 1 an (l, n)-counter is
``c_0 s_0 c_1 s_1 ... c_m s_m`` with ``m = tow(l, n) - 1``, where ``c_i`` is
the (l-1, n)-counter of value ``i`` and ``s_i`` in ``{0_l, 1_l}`` is bit ``i``.
"""
from __future__ import annotations

from typing import Sequence

MAX_TOW_BITS = 1 << 20


class CounterError(ValueError):
    pass


def sym(bit: int, level: int) -> str:
    return f"{bit}_{level}"


def parse_sym(s: str) -> tuple[int, int]:
    """``'1_3'`` -> ``(1, 3)``."""
    bit, sep, level = s.partition("_")
    if not sep or bit not in ("0", "1") or not level.isdigit():
        raise CounterError(f"{s!r} is not a counter symbol")
    return int(bit), int(level)


def omega(level: int) -> frozenset[str]:
    return frozenset((sym(0, level), sym(1, level)))


def omega_upto(level: int) -> frozenset[str]:
    """All symbols of levels ``0..level`` (empty for ``level < 0``)."""
    return frozenset(s for i in range(level + 1) for s in omega(i))


def tow(level: int, n: int, max_bits: int = MAX_TOW_BITS) -> int:
    if level < 0 or n < 0:
        raise ValueError("tow needs level, n >= 0")
    v = n
    for _ in range(level):
        if v > max_bits:
            raise OverflowError(f"tow({level}, {n}) exceeds the magnitude bound")
        v = 1 << v
    return v


def counter_length(level: int, n: int, max_bits: int = MAX_TOW_BITS) -> int:
    if level < 0 or n < 1:
        raise ValueError("counter_length needs level >= 0, n >= 1")
    length = n
    for l in range(1, level + 1):
        length = tow(l, n, max_bits) * (length + 1)
    return length


def canonical_counter(level: int, n: int, value: int) -> tuple[str, ...]:
    if not 0 <= value < tow(level + 1, n):
        raise CounterError(f"value {value} out of range for a ({level},{n})-counter")
    if level == 0:
        return tuple(sym((value >> i) & 1, 0) for i in range(n))
    out: list[str] = []
    for i in range(tow(level, n)):
        out.extend(canonical_counter(level - 1, n, i))
        out.append(sym((value >> i) & 1, level))
    return tuple(out)


def zero_counter(level: int, n: int) -> tuple[str, ...]:
    return canonical_counter(level, n, 0)


def ones_counter(level: int, n: int) -> tuple[str, ...]:
    return canonical_counter(level, n, tow(level + 1, n) - 1)


def counter_value(word: Sequence[str], level: int, n: int) -> int:
    """Validate ``word`` as an (level, n)-counter and return its value.

    Raises :class:`CounterError` naming the first offending position.
    """
    word = tuple(word)
    value, end = _parse(word, 0, level, n)
    if end != len(word):
        raise CounterError(f"position {end}: trailing symbols after a ({level},{n})-counter")
    return value


def _parse(word, pos: int, level: int, n: int) -> tuple[int, int]:
    if level == 0:
        value = 0
        for i in range(n):
            _expect(word, pos + i, 0)
            value |= parse_sym(word[pos + i])[0] << i
        return value, pos + n
    value = 0
    for i in range(tow(level, n)):
        inner, nxt = _parse(word, pos, level - 1, n)
        if inner != i:
            raise CounterError(f"position {pos}: inner ({level - 1},{n})-counter has value "
                               f"{inner}, expected {i}")
        _expect(word, nxt, level)
        value |= parse_sym(word[nxt])[0] << i
        pos = nxt + 1
    return value, pos


def _expect(word, pos: int, level: int) -> None:
    if pos >= len(word):
        raise CounterError(f"position {pos}: word ends inside a counter")
    try:
        _, got = parse_sym(word[pos])
    except CounterError:
        raise CounterError(f"position {pos}: {word[pos]!r} is not a counter symbol") from None
    if got != level:
        raise CounterError(f"position {pos}: expected a level-{level} symbol, got {word[pos]!r}")


def eta(word: Sequence[str], level: int) -> tuple[int, ...]:
    """The bits carried by the level-``level`` symbols of ``word``."""
    out = []
    for s in word:
        bit, l = parse_sym(s)
        if l == level:
            out.append(bit)
    return tuple(out)


def counter_from_bits(bits: Sequence[int], level: int, n: int) -> tuple[str, ...]:
    """The (level, n)-counter whose level bits are ``bits`` (first bit least significant)."""
    if len(bits) != (n if level == 0 else tow(level, n)):
        raise CounterError(f"need {tow(level, n) if level else n} bits, got {len(bits)}")
    return canonical_counter(level, n, sum(b << i for i, b in enumerate(bits)))
