"""The increment transducers T+0 and T+1 and the guard languages built from them."""
from __future__ import annotations

from functools import lru_cache

from ..counters import omega, omega_upto, sym
from ..fsa import cat, cls, star, star_of
from ..transducer import Transducer, homomorphism_transducer, make_transducer, shuffle


@lru_cache(maxsize=None)
def make_inc_transducers(level: int) -> tuple[Transducer, Transducer]:
    """``(T+0, T+1)`` over ``Omega_l | Omega_{l+1}``, outputs in ``{0,1,a,b}``.

    Both read the level-``l`` bits least significant first.  ``T+0`` copies
    them; ``T+1`` copies the incremented number and answers ``b`` instead of
    ``a`` at the closing level-``l+1`` symbol when the input was all ones.
    """
    z, o = sym(0, level), sym(1, level)
    ends = sorted(omega(level + 1))
    ins = (z, o, *ends)
    plus0 = {("copy", z): ("copy", "0"), ("copy", o): ("copy", "1")}
    plus1 = {("carry", o): ("carry", "0"), ("carry", z): ("copy", "1"),
             ("copy", z): ("copy", "0"), ("copy", o): ("copy", "1")}
    for e in ends:
        plus0[("copy", e)] = ("sink", "a")
        plus1[("carry", e)] = ("sink", "b")
        plus1[("copy", e)] = ("sink", "a")
    for a in ins:
        plus0[("sink", a)] = ("sink", "a")
        plus1[("sink", a)] = ("sink", "a")
    outs = ("0", "1", "a", "b")
    return (make_transducer(plus0, "copy", ins, outs),
            make_transducer(plus1, "carry", ins, outs))


def counter_block(level: int):
    """``(Omega_{<=l-1}* Omega_l)* Omega_{l+1}``: one l-counter and its separator."""
    return cat(star(cat(star_of(omega_upto(level - 1)), cls(omega(level)))), cls(omega(level + 1)))


def flat_blocks(level: int, count: int):
    """``(Omega_{<=l}* Omega_{l+1})^count``."""
    one = cat(star_of(omega_upto(level)), cls(omega(level + 1)))
    return cat(*([one] * count))


@lru_cache(maxsize=None)
def testdec_transducers(level: int) -> tuple[Transducer, Transducer]:
    """``T+0 (shuffle) Omega_{<=l-1} -> a`` and the same for ``T+1``."""
    lower = homomorphism_transducer(omega_upto(level - 1), "a")
    p0, p1 = make_inc_transducers(level)
    return shuffle(p0, lower), shuffle(p1, lower)
