import math
import random
from fractions import Fraction

import pytest

from extforge.bitcore import BitString
from extforge.epsbias import bias_bit
from extforge.raz import (
    bias_exponent,
    constraint_report,
    make_raz,
    max_output,
    raz_extract,
    raz_index,
    raz_plan,
    test_size_factor as size_factor,
)
from extforge.statlab import sample_flat_supports, worst_case_ext_error


def test_bias_exponent_formula():
    assert bias_exponent(64, 4096) == 2048 - 3 * 12 - 6
    assert bias_exponent(1, 16) == 8 - 12


def test_test_size_cases():
    assert size_factor(100, 100, 10) == 2
    assert size_factor(100, 90, 41) == 2
    t = size_factor(100, 90, 20)
    assert t % 2 == 0 and t >= 8 * 10 / 20


FROZEN_TOY_ERROR = Fraction(69, 1024)


def test_plan_admits_output():
    # n2 = 4096, n1 = 64, k2 = 0.9 n2, k1 = 1024, delta = 0.1
    p = raz_plan(64, 1024, 4096, 0.9 * 4096, 0.1)
    assert p.ok and p.params.m >= 1
    assert p.params.m == max_output(4096, 1024, 0.1) == 5
    assert p.params.seed_len <= 4096


def test_uniform_right_source():
    p = raz_plan(64, 1024, 4096, 4096, 0.1)
    assert p.ok
    rows = {r["predicate"]: r for r in p.report}
    assert rows["k1 >= 12 log(n2 - k2) + 15"]["rhs"] == 15
    assert rows["m >= omega min(n2, k1)"]["satisfied"]


def test_violation_named():
    p = raz_plan(1 << 20, 1024, 40, 40, 0.1, variant="thm1")
    assert not p.ok and p.params is None
    assert "n2 >= 6 log n2 + 2 log n1" in p.violations()


def test_report_lists_every_constraint():
    rows = constraint_report(8, 8, 16, 16, 1, 0.25)
    names = [r["predicate"] for r in rows]
    assert "k1 >= 64" in names and "m <= delta min(n2/4, k1/16) - 1" in names
    assert all(set(r) == {"predicate", "lhs", "rhs", "satisfied"} for r in rows)
    with pytest.raises(ValueError):
        constraint_report(8, 8, 16, 16, 1, 0.25, variant="nope")


def test_index_injective():
    p = make_raz(4, 16, 3, k1=4, k2=16, delta=0.25)
    idx = {raz_index(p, i, BitString(4, x)) for i in range(p.m) for x in range(16)}
    assert len(idx) == p.m * 16 and min(idx) >= 1 and max(idx) <= p.bias.N


def test_extract_is_bias_lookup():
    p = make_raz(5, 20, 2, k1=5, k2=20, delta=0.25)
    rng = random.Random(4)
    for _ in range(20):
        x, y = BitString(5, rng.getrandbits(5)), BitString(20, rng.getrandbits(20))
        seed = y[: p.seed_len]
        want = [bias_bit(p.bias, seed, raz_index(p, i, x)) for i in range(p.m)]
        assert list(raz_extract(p, x, y)) == want


def test_unused_suffix_ignored():
    # odd n2: the generator uses an even number of seed bits
    p = make_raz(3, 17, 1, k1=3, k2=17, delta=0.25)
    assert p.unused_suffix == 1
    for xv in range(8):
        x = BitString(3, xv)
        for yv in range(0, 1 << 17, 997):
            y = BitString(17, yv)
            assert raz_extract(p, x, y) == raz_extract(p, x, y ^ BitString(17, 1))


def test_toy_regime_flagged_and_measured():
    p = make_raz(3, 12, 1, k1=2, k2=8, delta=0.25)
    assert not p.in_regime
    right = sample_flat_supports(12, 8, 12, random.Random(0))
    rep = worst_case_ext_error(lambda x, y: raz_extract(p, x, y), 3, 2, 12, 8, 1, right_supports=right)
    assert rep.mode == "partial" and rep.pairs == 70 * 12
    # every (3,2) flat source against the sampled right sources; frozen measured artifact
    assert rep.value == FROZEN_TOY_ERROR
    assert 0 <= rep.value <= Fraction(1, 2)


def test_length_checks():
    p = make_raz(3, 12, 1, k1=2, k2=8, delta=0.25)
    with pytest.raises(ValueError):
        raz_extract(p, BitString.zeros(4), BitString.zeros(12))
    with pytest.raises(ValueError):
        raz_extract(p, BitString.zeros(3), BitString.zeros(11))
    with pytest.raises(ValueError):
        make_raz(0, 12, 1, k1=0, k2=8, delta=0.25)


def test_desk_scale_never_in_regime():
    for n1, n2 in [(4, 16), (8, 32), (16, 64)]:
        p = make_raz(n1, n2, 1, k1=n1, k2=n2, delta=0.25)
        assert not p.in_regime
        assert p.seed_len <= n2
    assert math.isfinite(bias_exponent(16, 64))
