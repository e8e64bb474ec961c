"""Acceptance criteria 1-9; each check prints one PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for the summary alone.
"""
from __future__ import annotations

import itertools
import random
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

from helpers import gadget_table, guarded_pop_trial  # noqa: E402
from oracles import bits_value  # noqa: E402
from pdabisim.bisim import (Bisimilar, CheckStats, NotBisimilar, Unknown, _PairGame,  # noqa: E402
                            capped_bisim, check_normed, decide, verify_bisimulation)
from pdabisim.counters import (canonical_counter, counter_from_bits, counter_length,  # noqa: E402
                               counter_value, eta, ones_counter, omega, sym, tow, zero_counter)
from pdabisim.lts import Config  # noqa: E402
from pdabisim.reduction import build_reduction, encode_dtm, toy_dtm, toy_machines  # noqa: E402
from pdabisim.reduction.incr import testdec_transducers as dec_transducers  # noqa: E402

SEED = 20240601


def report(n: int, ok: bool, detail: str) -> bool:
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def criterion_1() -> bool:
    t = time.perf_counter()
    rows = gadget_table("or") + gadget_table("and")
    good = sum(got == want for _, _, got, want in rows)
    dt = time.perf_counter() - t
    return report(1, good == 8 and dt < 1, f"gadget truth tables {good}/8 in {dt:.2f}s")


def criterion_2() -> bool:
    t = time.perf_counter()
    t0, t1 = dec_transducers(0)
    cases = bad = 0
    for n in range(1, 5):
        for b1, b2 in itertools.product(itertools.product((0, 1), repeat=n), repeat=2):
            for s1, s2 in itertools.product(sorted(omega(1)), repeat=2):
                w1 = tuple(sym(b, 0) for b in b1) + (s1,)
                w2 = tuple(sym(b, 0) for b in b2) + (s2,)
                cases += 1
                bad += (t0(w1) == t1(w2)) != (bits_value(b1) == bits_value(b2) + 1)
    dt = time.perf_counter() - t
    return report(2, cases == 1360 and bad == 0 and dt < 1,
                  f"increment relation {cases} cases, {bad} mismatches in {dt:.2f}s")


def criterion_3() -> bool:
    t = time.perf_counter()
    red = build_reduction(None, 1, 2, roots=("testDec_0",))
    w3 = canonical_counter(0, 2, 0)
    bad = unknown = open_ = 0
    for v1, v2 in itertools.product(range(4), repeat=2):
        st = (w3 + ("0_1",) + canonical_counter(0, 2, v2) + ("0_1",)
              + canonical_counter(0, 2, v1) + ("0_1",))
        stats = CheckStats()
        v = capped_bisim(red.pda, Config(".testDec_0", st), Config("testDec_0.", st), 20, stats=stats)
        unknown += isinstance(v, Unknown)
        open_ += not stats.closed
        bad += isinstance(v, Bisimilar) != (v1 == v2 + 1)
    dt = time.perf_counter() - t
    return report(3, bad == 0 and unknown == 0 and open_ == 0 and dt < 30,
                  f"decrement pairs 16 cases, {bad} wrong, {unknown} unknown, {open_} open in {dt:.2f}s")


def criterion_4() -> bool:
    t = time.perf_counter()
    checks = fails = 0
    for level, n in itertools.product(range(3), (1, 2)):
        top = tow(level + 1, n)
        values = range(top) if top <= 256 else sorted({0, 1, top - 1, *range(0, top, 1021)})
        for v in values:
            w = canonical_counter(level, n, v)
            ok = (len(w) == counter_length(level, n) and counter_value(w, level, n) == v
                  and bits_value(eta(w, level)) == v and counter_from_bits(eta(w, level), level, n) == w)
            checks += 1
            fails += not ok
        z, o = zero_counter(level, n), ones_counter(level, n)
        checks += 1
        fails += not (set(eta(z, level)) == {0} and set(eta(o, level)) == {1}
                      and counter_value(o, level, n) == top - 1)
    checks += 1
    fails += len(zero_counter(2, 2)) != 208
    dt = time.perf_counter() - t
    return report(4, fails == 0 and dt < 1, f"counter suite {checks - fails}/{checks} in {dt:.2f}s")


def criterion_5() -> bool:
    rng = random.Random(SEED)
    errors = [e for e in (guarded_pop_trial(rng) for _ in range(200)) if e is not None]
    return report(5, not errors, f"guarded pops 200 runs, {len(errors)} violations"
                  + (f" (first: {errors[0]})" if errors else ""))


def _end_to_end(normed: bool):
    out = {}
    for key in ("bisimilar", "non-bisimilar"):
        red = build_reduction(toy_machines(tow(1, 1))[key], 1, 1, normed=normed)
        stats = CheckStats()
        v = decide(red.pda, red.left_start(), red.right_start(), max_cap=128, stats=stats)
        out[key] = (v, stats, red)
    return out


def _end_to_end_ok(res) -> tuple[bool, str]:
    (vb, sb, rb), (vn, sn, _) = res["bisimilar"], res["non-bisimilar"]
    certified = (isinstance(vb, Bisimilar) and sb.closed and sb.cap <= 128
                 and (vb.relation is None or verify_bisimulation(_PairGame(rb.pda), vb.relation, sb.cap)))
    refuted = isinstance(vn, NotBisimilar) and vn.round is not None
    return certified and refuted, f"{vb} at cap {sb.cap}, {vn} at cap {sn.cap}"


def criterion_6() -> bool:
    t = time.perf_counter()
    ok, detail = _end_to_end_ok(_end_to_end(False))
    dt = time.perf_counter() - t
    return report(6, ok and dt < 300, f"end to end {detail} in {dt:.1f}s")


def criterion_7() -> bool:
    t = time.perf_counter()
    res = _end_to_end(True)
    ok, detail = _end_to_end_ok(res)
    normed = []
    for key in ("bisimilar", "non-bisimilar"):
        red = res[key][2]
        normed += [check_normed(red.pda, c).status for c in (red.left_start(), red.right_start())]
    dt = time.perf_counter() - t
    ok = ok and all(s == "normed" for s in normed) and dt < 600
    return report(7, ok, f"normed build {detail}, start configs {sorted(set(normed))} in {dt:.1f}s")


def criterion_8() -> bool:
    t = time.perf_counter()
    m = toy_dtm()
    tm, enc = encode_dtm(m, 2, 2)
    cs = list(m.configs())
    bad = 0
    for c in cs:
        out, succ = tm.t1(enc.enc(c)), m.successor(c)
        bad += sum((out == tm.t2(enc.enc(d))) != (d == succ) for d in cs)
    fixed = enc.enc(m.initial()) == "1" * tm.ell and enc.enc(m.accepting()) == "0" * tm.ell
    dt = time.perf_counter() - t
    return report(8, bad == 0 and fixed and dt < 30,
                  f"DTM encoding {len(cs)}x{len(cs)} pairs, {bad} mismatches, fixed codes {fixed} in {dt:.2f}s")


def criterion_9() -> bool:
    ns = np.arange(1, 7)
    counts = np.array([len(build_reduction(toy_machines(tow(1, n))["bisimilar"], 1, n).pda.rules)
                       for n in ns], dtype=float)
    fit = np.polyval(np.polyfit(ns, counts, 3), ns)
    resid = float(np.max(np.abs(fit - counts) / counts))
    grows = bool(np.all(np.diff(counts) > 0))
    return report(9, grows and resid < 0.05,
                  f"rule counts {counts.astype(int).tolist()}, cubic fit residual {resid:.2%}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


def test_criterion_1_gadget_truth_tables():
    assert criterion_1()


def test_criterion_2_increment_relation():
    assert criterion_2()


def test_criterion_3_decrement_pairs():
    assert criterion_3()


def test_criterion_4_counter_suite():
    assert criterion_4()


def test_criterion_5_guarded_pop_determinism():
    assert criterion_5()


def test_criterion_6_end_to_end():
    assert criterion_6()


def test_criterion_7_normed_end_to_end():
    assert criterion_7()


def test_criterion_8_dtm_encoding():
    assert criterion_8()


def test_criterion_9_rule_growth():
    assert criterion_9()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
