import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extforge.bitcore import BitString
from extforge.statlab import (
    Distribution,
    EnumerationCapError,
    JointDistribution,
    TamperFunction,
    all_fixed_point_free,
    avg_cond_min_entropy,
    collision_probability,
    cond_stat_dist,
    enumerate_flat_sources,
    flat_source_count,
    min_entropy,
    rejection_bound,
    rejection_sample,
    stat_dist,
    worst_case_ext_error,
    xor_test_bias,
)
from oracles import sd

B = BitString.from_bits


def dists(n=3):
    weights = st.lists(st.integers(0, 6), min_size=1 << n, max_size=1 << n).filter(any)

    def build(ws):
        tot = sum(ws)
        return Distribution(n, {BitString(n, i): Fraction(w, tot) for i, w in enumerate(ws) if w})

    return weights.map(build)


def test_distribution_validation():
    with pytest.raises(ValueError):
        Distribution(1, {B("0"): Fraction(1, 2)})
    with pytest.raises(ValueError):
        Distribution(2, {B("0"): 1})
    d = Distribution(1, {B("0"): 0.5, B("1"): 0.5 + 1e-13}, exact=False)
    assert len(d.support()) == 2


def test_json_round_trip():
    d = Distribution(2, {B("00"): Fraction(1, 3), B("11"): Fraction(2, 3)})
    e = Distribution.from_json(d.to_json())
    assert e.pmf == d.pmf and e.length == 2


def test_stat_dist_examples():
    u = Distribution.uniform(2)
    assert stat_dist(u, u) == 0
    assert stat_dist(Distribution.point(B("0")), Distribution.point(B("1"))) == 1
    assert stat_dist(u, Distribution.point(B("00"))) == Fraction(3, 4)


@given(dists(), dists())
def test_stat_dist_matches_oracle(p, q):
    assert stat_dist(p, q) == sd(p.pmf, q.pmf)
    assert stat_dist(p, q) == stat_dist(q, p)


def test_cond_stat_dist_examples():
    u1 = Distribution.uniform(1)
    same = JointDistribution(
        [1, 1], {(B("0"), B("0")): Fraction(1, 2), (B("1"), B("1")): Fraction(1, 2)}
    )
    indep = JointDistribution.product(u1, u1)
    assert cond_stat_dist(same, same) == 0
    assert cond_stat_dist(indep, indep) == 0
    # four atoms: two of mass 1/2 against four of mass 1/4
    assert cond_stat_dist(same, indep) == Fraction(1, 2)


def test_min_entropy_examples():
    assert min_entropy(Distribution.uniform(5)) == 5
    assert min_entropy(Distribution.point(B("101"))) == 0
    d = Distribution(2, {B("00"): Fraction(1, 2), B("01"): Fraction(1, 4), B("10"): Fraction(1, 4)})
    assert min_entropy(d) == 1


def test_avg_cond_min_entropy_examples():
    u = Distribution.uniform(3)
    assert avg_cond_min_entropy(JointDistribution.product(u, Distribution.uniform(2))) == 3
    eq = JointDistribution.from_samples_fn(u, lambda x: (x, x), [3, 3])
    assert avg_cond_min_entropy(eq) == 0


@settings(max_examples=60)
@given(st.lists(st.integers(0, 5), min_size=16, max_size=16).filter(any))
def test_chain_rule(ws):
    tot = sum(ws)
    pmf = {(BitString(2, i >> 2), BitString(2, i & 3)): Fraction(w, tot) for i, w in enumerate(ws) if w}
    j = JointDistribution([2, 2], pmf)
    joint = Distribution(4, {a + b: p for (a, b), p in pmf.items()})
    assert avg_cond_min_entropy(j) >= min_entropy(joint) - 2 - 1e-12


# --- rejection sampling ------------------------------------------------------


def test_rejection_identity():
    u = Distribution.uniform(2)
    assert rejection_bound(u, u) == 1
    for v in range(4):
        assert rejection_sample(u, u, BitString(2, v), Fraction(999, 1000)) == BitString(2, v)


def test_rejection_point_mass():
    target = Distribution.point(B("0"))
    prop = Distribution.uniform(1)
    assert rejection_bound(target, prop) == 2
    for coin in (Fraction(0), Fraction(1, 2), Fraction(99, 100)):
        assert rejection_sample(target, prop, B("0"), coin) == B("0")
        assert rejection_sample(target, prop, B("1"), coin) is None


def test_rejection_support_violation():
    with pytest.raises(ValueError):
        rejection_bound(Distribution.uniform(1), Distribution.point(B("0")))


def test_rejection_monte_carlo_rate():
    target = Distribution(2, {B("00"): Fraction(1, 2), B("01"): Fraction(1, 2)})
    prop = Distribution.uniform(2)
    d = rejection_bound(target, prop)
    rng = random.Random(1)
    n = 10**5
    atoms = sorted(prop.pmf)
    acc = sum(rejection_sample(target, prop, rng.choice(atoms), rng.random()) is not None for _ in range(n))
    p = 1 / float(d)
    assert abs(acc / n - p) <= 3 * math.sqrt(p * (1 - p) / n)


# --- flat sources and extractor error ---------------------------------------


def test_flat_counts():
    assert sorted(sorted(int(b) for b in s.support) for s in enumerate_flat_sources(1, 0)) == [[0], [1]]
    assert len(list(enumerate_flat_sources(2, 1))) == 6
    assert flat_source_count(3, 2) == 70
    assert len(list(enumerate_flat_sources(3, 2))) == 70


def test_flat_cap():
    with pytest.raises(EnumerationCapError):
        list(enumerate_flat_sources(4, 2, cap=10))


def _xor(x, y):
    return BitString(1, x.value ^ y.value)


def _ip(x, y):
    return BitString(1, bin(x.value & y.value).count("1") & 1)


def test_ext_error_examples():
    assert worst_case_ext_error(_xor, 1, 1, 1, 1, 1).value == 0
    # uniform 2-bit inputs: 10 of the 16 pairs have inner product 0, so the error is 1/8, not 0
    ip_err = worst_case_ext_error(_ip, 2, 2, 2, 2, 1).value
    zeros = sum(1 for x in range(4) for y in range(4) if not bin(x & y).count("1") & 1)
    assert ip_err == abs(Fraction(zeros, 16) - Fraction(1, 2)) == Fraction(1, 8)
    # point-mass sources fix the output bit
    const = worst_case_ext_error(lambda x, y: BitString(1, x.value & y.value & 1), 1, 0, 1, 0, 1)
    assert const.value == Fraction(1, 2)


def test_ext_error_sampling_required():
    with pytest.raises(EnumerationCapError):
        worst_case_ext_error(_ip, 4, 2, 4, 2, 1, cap=10)
    rep = worst_case_ext_error(_ip, 4, 2, 4, 2, 1, cap=10, samples=30)
    assert rep.mode == "sampled" and rep.radius is not None


# --- tampering -----------------------------------------------------------------


def test_tamper_families():
    f = TamperFunction.bitflip(3, 5)
    assert f.is_fixed_point_free()
    assert TamperFunction.increment(3).is_fixed_point_free()
    assert TamperFunction.identity(2).fixed_points() == [0, 1, 2, 3]
    assert sum(1 for _ in all_fixed_point_free(2)) == 3**4


def test_collision_examples():
    u1 = Distribution.uniform(1)
    flip = TamperFunction.bitflip(1, 1)
    assert collision_probability(lambda x, y: x, flip, u1, u1) == 0
    assert collision_probability(lambda x, y: BitString(1, 0), flip, u1, u1) == 1
    with pytest.raises(ValueError):
        collision_probability(lambda x, y: x, TamperFunction.identity(1), u1, u1)


def test_xor_test_bias():
    # bits over four seeds: columns x0 = 0011, x1 = 0101
    words = [0b00, 0b01, 0b10, 0b11]
    assert xor_test_bias(words, 0b01) == 0
    assert xor_test_bias([0b11] * 4, 0b11) == Fraction(1, 2)
