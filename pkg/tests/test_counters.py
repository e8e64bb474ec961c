import itertools

import pytest

from oracles import bits_value
from pdabisim.counters import (CounterError, canonical_counter, counter_from_bits, counter_length,
                               counter_value, eta, ones_counter, parse_sym, sym, tow, zero_counter)


def test_tow():
    assert [tow(0, 3), tow(1, 3), tow(2, 3)] == [3, 8, 256]
    assert tow(2, 2) == 16 and tow(3, 1) == 16
    with pytest.raises(OverflowError):
        tow(5, 5)


def test_symbols():
    assert sym(1, 2) == "1_2"
    assert parse_sym("0_3") == (0, 3)
    with pytest.raises(CounterError):
        parse_sym("2_0")


def test_canonical_examples():
    assert canonical_counter(1, 1, 0) == ("0_0", "0_1", "1_0", "0_1")
    assert canonical_counter(0, 2, 2) == ("0_0", "1_0")


@pytest.mark.parametrize("level,n", [(l, n) for l in range(3) for n in (1, 2)])
def test_round_trip_and_length(level, n):
    values = range(tow(level + 1, n)) if tow(level + 1, n) <= 256 else range(0, tow(level + 1, n), 4099)
    for v in values:
        w = canonical_counter(level, n, v)
        assert len(w) == counter_length(level, n)
        assert counter_value(w, level, n) == v
        assert bits_value(eta(w, level)) == v
        assert counter_from_bits(eta(w, level), level, n) == w


def test_zero_and_ones():
    assert len(zero_counter(2, 2)) == 208
    for level, n in itertools.product(range(3), (1, 2)):
        assert set(eta(zero_counter(level, n), level)) == {0}
        assert set(eta(ones_counter(level, n), level)) == {1}


def test_invalid_counters_name_position():
    w = list(canonical_counter(1, 1, 0))
    w[2] = "0_0"  # inner counter out of order
    with pytest.raises(CounterError, match="position"):
        counter_value(w, 1, 1)
    with pytest.raises(CounterError, match="trailing"):
        counter_value(tuple(w[:2]) + ("1_0", "0_1", "0_0"), 1, 1)
    with pytest.raises(CounterError, match="ends inside"):
        counter_value(("0_0",), 0, 2)
    with pytest.raises(CounterError):
        canonical_counter(0, 2, 4)
