"""Fixed desk-scale experiments shared by the CLI, the scripts and the tests."""

from __future__ import annotations

import random
import warnings
from dataclasses import replace
from fractions import Fraction

from .bitcore import BitString
from .nmcompile import (
    bruteforce_nm_substitute,
    compile as nm_compile,
    compile_error,
    measured_collision,
    measured_ext_error,
    nm_probe,
    table_extractor,
)
from .statlab import Distribution, acceptance_probability, rejection_bound, worst_case_ext_error

XOR_TABLE = [[0, 1], [1, 0]]


def xor_collision_extractor():
    """C(x, z) = x xor z on single bits: error 0 with a fixed seed, collision 0."""
    return table_extractor("xor", XOR_TABLE, 1, 1, 1, k1=1, k2=0, eps=0)


def compiler_shadow(trials: int = 40, rng_seed: int = 0) -> dict:
    """Compile a brute-force E with the XOR C and compare the probe to the bound.

    E is (3, 0) x (1, 1) -> 1, C is (1, 1) x (1, 0) -> 1, n4 = 1 and tau = 1/2,
    which makes the required second-source entropy exactly 3 = n1.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        E = bruteforce_nm_substitute(3, 0, 1, 1, trials, rng_seed, n2=1)
    C = xor_collision_extractor()
    eE = nm_probe(E, table=E.meta["table"]).value
    eC = measured_ext_error(C, "right")
    col = measured_collision(C)
    E.params = replace(E.params, eps=eE)
    C.params = replace(C.params, eps=eC, eps_collision=col)
    tau = Fraction(1, 2)
    comp = nm_compile(E, C, 1, tau)
    probe = nm_probe(comp, mode="plain")
    probe_left = nm_probe(comp, mode="left")
    probe_right = nm_probe(comp, mode="right")
    rhs = compile_error(tau, eE, eC, col)
    return {
        "probe": max(probe.value, probe_left.value, probe_right.value),
        "probe_plain": probe.value,
        "probe_left": probe_left.value,
        "probe_right": probe_right.value,
        "rhs": rhs,
        "eps_E": eE,
        "eps_C": eC,
        "collision_C": col,
        "tau": tau,
        "k2_star": comp.params.k2,
        "report": comp.meta["report"],
    }


def ip_table(n: int) -> list[list[int]]:
    return [[bin(x & y).count("1") & 1 for y in range(1 << n)] for x in range(1 << n)]


def entropy_lowering(n: int = 4, k2: int = 3, deltas=(1, 2)) -> dict:
    """Inner product mod 2 with a uniform left source; strong in the right source."""
    tab = ip_table(n)
    fn = lambda x, y: BitString(1, tab[x.value][y.value])  # noqa: E731
    base = worst_case_ext_error(fn, n, n, n, k2, 1, "right", table=tab).value
    rows, ok, ratio = [], True, Fraction(0)
    for d in deltas:
        low = worst_case_ext_error(fn, n, n, n, k2 - d, 1, "right", table=tab).value
        bound = (1 << d) * base
        rows.append({"delta": d, "k2": k2 - d, "error": low, "bound": bound})
        ok &= low <= bound
        ratio = max(ratio, low / bound)
    return {"base_error": base, "rows": rows, "pass": ok, "worst_ratio": ratio}


def _random_distribution(n: int, support: list[int], rng: random.Random) -> Distribution:
    weights = [rng.randint(1, 9) for _ in support]
    total = sum(weights)
    return Distribution(n, {BitString(n, v): Fraction(w, total) for v, w in zip(support, weights)})


def rejection_check(pairs: int = 20, n: int = 4, seed: int = 0) -> dict:
    """Exact conditional-on-accept law and acceptance rate for random pairs."""
    rng = random.Random(seed)
    mismatches, rows = 0, []
    for _ in range(pairs):
        prop_support = sorted(rng.sample(range(1 << n), rng.randint(2, 1 << n)))
        tgt_support = sorted(rng.sample(prop_support, rng.randint(1, len(prop_support))))
        proposal = _random_distribution(n, prop_support, rng)
        target = _random_distribution(n, tgt_support, rng)
        d = rejection_bound(target, proposal)
        joint = {y: proposal(y) * acceptance_probability(target, proposal, y) for y in proposal.pmf}
        accept = sum(joint.values(), Fraction(0))
        cond = {y: p / accept for y, p in joint.items() if p}
        same = cond == dict(target.pmf) and accept == 1 / d
        mismatches += not same
        rows.append({"d": d, "accept": accept})
    return {"mismatches": mismatches, "pairs": pairs, "rows": rows}
