import math
import random
from fractions import Fraction

import pytest

from extforge.bitcore import BitString
from extforge.codes import WeakDesign, encode, hadamard_code
from extforge.statlab import TamperFunction, worst_case_ext_error
from extforge.trevisan import (
    CrTreParams,
    TrevisanParams,
    crtre_collision,
    crtre_collision_bruteforce,
    crtre_extract,
    plan_crtre,
    plan_trevisan,
    tre_extract,
    truncation_amount,
)


def _tre_oracle(p, x, z):
    # read the full codeword, then index it by the restricted seed
    cw = list(encode(p.code, x))
    zb = list(z)
    out = []
    for s in p.design.sets:
        pos = 0
        for e in s:
            pos = 2 * pos + zb[e]
        out.append(cw[pos])
    return out


def test_plan_shape():
    p = plan_trevisan(16, 8, 3, 0.25)
    assert p.design.m == 3 and p.design.d == p.d
    assert p.l == p.code.log_n_hat
    assert p.code.delta <= Fraction(1, 4) / (2 * 3)
    assert p.d <= p.seed_bound()


@pytest.mark.parametrize("design", ["disjoint", "greedy"])
def test_extract_matches_oracle(design):
    p = plan_trevisan(12, 6, 4, 0.25, design=design)
    rng = random.Random(5)
    for _ in range(30):
        x = BitString(p.n, rng.getrandbits(p.n))
        z = BitString(p.d, rng.getrandbits(p.d))
        assert list(tre_extract(p, x, z)) == _tre_oracle(p, x, z)


def test_zero_source_gives_zero():
    p = plan_trevisan(10, 5, 3, 0.5)
    for v in (0, 1, (1 << p.d) - 1):
        assert tre_extract(p, BitString.zeros(10), BitString(p.d, v)).weight() == 0


def test_seed_bits_outside_design_ignored():
    # seed positions 2 and 5 belong to no set
    design = WeakDesign(2, 2, 6, 2.0, ((0, 1), (3, 4)))
    p = TrevisanParams(2, 2, 2, 0.5, hadamard_code(2), design)
    assert design.verify()
    for xv in range(4):
        x = BitString(2, xv)
        for zv in range(64):
            z = BitString(6, zv)
            for i in (2, 5):
                flipped = z ^ BitString(6, 1 << (5 - i))
                assert tre_extract(p, x, flipped) == tre_extract(p, x, z)


def test_hadamard_toy_strong_error():
    # m = 1, disjoint design, Hadamard code at n = 2: exact error over every (2,1) flat source
    p = plan_trevisan(2, 1, 1, 0.5, code=hadamard_code(2))
    rep = worst_case_ext_error(lambda x, z: tre_extract(p, x, z), 2, 1, p.d, p.d, 1, "right")
    assert rep.mode == "exhaustive"
    assert rep.value == Fraction(1, 4)  # frozen value of the oracle
    assert rep.value <= p.epsilon


def test_length_checks():
    p = plan_trevisan(8, 4, 2, 0.5)
    with pytest.raises(ValueError):
        tre_extract(p, BitString.zeros(7), BitString.zeros(p.d))
    with pytest.raises(ValueError):
        tre_extract(p, BitString.zeros(8), BitString.zeros(p.d + 1))


def test_params_round_trip():
    p = plan_trevisan(16, 8, 2, 0.25, design="greedy")
    assert TrevisanParams.from_dict(p.to_dict()) == p
    c = plan_crtre(6, 6, 6, 0.5)
    assert CrTreParams.from_dict(c.to_dict()) == c


# --- collision-resistant variant ------------------------------------------------


def test_truncation_amount():
    assert truncation_amount(0.25) == 5
    assert truncation_amount(2.0**-10) == 25
    assert truncation_amount(1.0) == 0
    for e in (0.3, 0.01, 1e-5):
        t = truncation_amount(e)
        assert t % 5 == 0 and 4 * t / 5 >= 2 * math.log2(1 / e) - 1e-9


def test_crtre_lengths():
    p = plan_crtre(6, 6, 6, 0.5)
    assert p.out_len == p.base.m - p.t + 4 * p.t // 5
    assert p.seed_len == p.base.d + p.blocks * p.code2.log_n_hat
    x, s = BitString(6, 9), BitString(p.seed_len, 12345)
    assert len(crtre_extract(p, x, s)) == p.out_len


def test_degenerate_truncation_is_tre_prefix():
    base = plan_trevisan(6, 6, 4, 0.5)
    p = CrTreParams(base, 0, hadamard_code(6), 1.0, 0.5)
    rng = random.Random(2)
    for _ in range(10):
        x = BitString(6, rng.getrandbits(6))
        s = BitString(p.seed_len, rng.getrandbits(p.seed_len))
        assert crtre_extract(p, x, s) == tre_extract(base, x, s)


def test_collision_bound_formula():
    p = plan_crtre(6, 6, 6, 0.5)
    eps_T, eps_C, m = p.eps_T, p.eps_collision, p.base.m
    bound = (0.5 + eps_T / (4 * m)) ** (2 * math.log2(1 / eps_C))
    assert p.delta2 <= Fraction(eps_T) / (4 * m)
    assert float(p.agreement_bound()) <= bound <= eps_C


def test_collision_complement_n6():
    p = plan_crtre(6, 6, 6, 0.5)
    comp = TamperFunction.bitflip(6, 63)
    avg, mx = crtre_collision(p, comp)
    assert avg == mx == Fraction(20160657, 536870912)  # frozen exact count
    assert avg <= p.eps_collision


def test_collision_exact_matches_full_enumeration():
    # n = 1, Hadamard codes: 9 seed bits, small enough to enumerate everything
    base = plan_trevisan(1, 1, 5, 0.5, code=hadamard_code(1))
    p = CrTreParams(base, 5, hadamard_code(1), 0.5, 0.5)
    flip = TamperFunction.bitflip(1, 1)
    assert crtre_collision(p, flip)[0] == crtre_collision_bruteforce(p, flip) == Fraction(1, 16)


def test_collision_exact_matches_sampling_n6():
    p = plan_crtre(6, 6, 6, 0.5)
    f = TamperFunction.increment(6)
    exact = float(crtre_collision(p, f)[0])
    rng = random.Random(11)
    n = 4000
    hits = 0
    for _ in range(n):
        x = BitString(6, rng.getrandbits(6))
        s = BitString(p.seed_len, rng.getrandbits(p.seed_len))
        hits += crtre_extract(p, x, s) == crtre_extract(p, f(x), s)
    sigma = math.sqrt(exact * (1 - exact) / n)
    assert abs(hits / n - exact) <= 4 * sigma


def test_fixed_point_rejected():
    p = plan_crtre(6, 6, 6, 0.5)
    with pytest.raises(ValueError):
        crtre_collision(p, TamperFunction.identity(6))


def test_plan_rejects_large_truncation():
    with pytest.raises(ValueError):
        plan_crtre(64, 32, 8, 0.01)
