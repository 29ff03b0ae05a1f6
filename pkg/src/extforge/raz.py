"""Raz's two-source extractor on top of the small-bias generator.

Output bit ``i`` of ``Raz(x, y)`` is variable ``i * 2^n1 + int(x) + 1`` of
a small-bias generator seeded with a prefix of ``y``.  The planner encodes
the constraint lists of the original theorem and of the collision-resistant
strengthening as predicates, and picks the largest admissible ``m``.

Parameters that no desk-scale instance can satisfy are still executable:
``make_raz`` builds any instance and marks whether it is in regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .bitcore import BitString
from .epsbias import BiasSpec, bias_bits_at, plan_bias, plan_bias_for_seed

DEFAULT_OMEGA = 1.0 / 256


def _log2(v: float) -> float:
    # log of values below 1 is taken as 0 so that k2 = n2 stays well defined
    return math.log2(v) if v > 1 else 0.0


def bias_exponent(n1: int, n2: int) -> float:
    """``r`` with eps = 2^-r: ``n2/2 - 3 log n2 - log n1``."""
    return n2 / 2 - 3 * _log2(n2) - _log2(n1)


def test_size_factor(n2: int, k2: float, k1: float) -> int:
    """Even t from the two-case rule: 2 if k1 > 4(n2-k2), else smallest even t >= 8(n2-k2)/k1."""
    gap = n2 - k2
    if k1 > 4 * gap:
        return 2
    t = math.ceil(8 * gap / k1 - 1e-12)
    t = max(t, 2)
    return t + (t % 2)


def max_output(n2: int, k1: float, delta: float) -> int:
    return math.floor(delta * min(n2 / 4, k1 / 16) - 1 + 1e-12)


@dataclass(frozen=True)
class RazParams:
    n1: int
    k1: float
    n2: int
    k2: float
    m: int
    delta: float
    bias: BiasSpec
    t_case: int
    test_budget: int
    variant: str = "collision"
    report: tuple = field(default=(), compare=False)

    @property
    def in_regime(self) -> bool:
        return bool(self.report) and all(r["satisfied"] for r in self.report)

    @property
    def seed_len(self) -> int:
        return self.bias.seed_len

    @property
    def unused_suffix(self) -> int:
        return self.n2 - self.bias.seed_len

    def to_dict(self) -> dict:
        return {
            "n1": self.n1,
            "k1": self.k1,
            "n2": self.n2,
            "k2": self.k2,
            "m": self.m,
            "delta": self.delta,
            "t_case": self.t_case,
            "test_budget": self.test_budget,
            "variant": self.variant,
            "bias": self.bias.to_dict(),
            "in_regime": self.in_regime,
            "report": list(self.report),
        }


def _row(name: str, lhs: float, op: str, rhs: float) -> dict:
    ok = {">=": lhs >= rhs, "<=": lhs <= rhs, "<": lhs < rhs, ">": lhs > rhs}[op]
    return {"predicate": name, "lhs": lhs, "rhs": rhs, "satisfied": bool(ok)}


def constraint_report(
    n1: int, k1: float, n2: int, k2: float, m: int, delta: float, *, variant: str = "collision", omega: float = DEFAULT_OMEGA, seed_len: Optional[int] = None
) -> list[dict]:
    ln1, ln2, lgap = _log2(n1), _log2(n2), _log2(n2 - k2)
    if variant == "thm1":
        rows = [
            _row("k1 >= 5 log(n2 - k2)", k1, ">=", 5 * lgap),
            _row("n2 >= 6 log n2 + 2 log n1", n2, ">=", 6 * ln2 + 2 * ln1),
            _row("k2 >= (1/2 + delta) n2 + 3 log n2 + log n1", k2, ">=", (0.5 + delta) * n2 + 3 * ln2 + ln1),
        ]
    elif variant == "collision":
        rows = [
            _row("k1 >= 12 log(n2 - k2) + 15", k1, ">=", 12 * lgap + 15),
            _row("n2 >= 6 log n2 + 2 log n1 + 4", n2, ">=", 6 * ln2 + 2 * ln1 + 4),
            _row("k2 >= (1/2 + delta) n2 + 3 log n2 + log n1 + 4", k2, ">=", (0.5 + delta) * n2 + 3 * ln2 + ln1 + 4),
            _row("n2 >= 16", n2, ">=", 16),
            _row("k1 >= 64", k1, ">=", 64),
        ]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    rows += [
        _row("0 < delta", delta, ">", 0),
        _row("delta < 1/2", delta, "<", 0.5),
        _row("m >= omega min(n2, k1)", m, ">=", omega * min(n2, k1)),
        _row("m <= delta min(n2/4, k1/16) - 1", m, "<=", delta * min(n2 / 4, k1 / 16) - 1),
        _row("m >= 1", m, ">=", 1),
    ]
    if seed_len is not None:
        rows.append(_row("seed_len <= n2", seed_len, "<=", n2))
    return rows


def make_raz(
    n1: int,
    n2: int,
    m: int,
    *,
    k1: float,
    k2: float,
    delta: float,
    variant: str = "collision",
    omega: float = DEFAULT_OMEGA,
    test_budget: Optional[int] = None,
) -> RazParams:
    """Build an instance for any sizes.

    If the planned generator needs more than ``n2`` seed bits (always the
    case at desk scale) the generator is shrunk to the ``n2``-bit budget and
    the instance is reported out of regime.
    """
    if n1 < 1 or n2 < 2 or m < 1:
        raise ValueError("need n1 >= 1, n2 >= 2, m >= 1")
    t_case = test_size_factor(n2, k2, k1)
    budget = 2 * m * t_case if test_budget is None else test_budget
    num_vars = m << n1
    # tests larger than the variable count are all tests
    budget = min(budget, (1 << max(1, num_vars.bit_length())) - 1)
    r = bias_exponent(n1, n2)
    planned = plan_bias(num_vars, budget, log2_inv_eps=r) if r > 0 else None
    bias = planned
    if bias is None or bias.seed_len > n2:
        bias = plan_bias_for_seed(num_vars, budget, n2)
    report = constraint_report(
        n1, k1, n2, k2, m, delta, variant=variant, omega=omega, seed_len=planned.seed_len if planned else None
    )
    if planned is None:
        report.append(_row("n2/2 - 3 log n2 - log n1 > 0", r, ">", 0))
    return RazParams(n1, k1, n2, k2, m, delta, bias, t_case, budget, variant, tuple(report))


@dataclass
class RazPlan:
    params: Optional[RazParams]
    report: list

    @property
    def ok(self) -> bool:
        return self.params is not None and all(r["satisfied"] for r in self.report)

    def violations(self) -> list[str]:
        return [r["predicate"] for r in self.report if not r["satisfied"]]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "report": self.report, "params": self.params.to_dict() if self.params else None}


def raz_plan(n1: int, k1: float, n2: int, k2: float, delta: float, *, variant: str = "collision", omega: float = DEFAULT_OMEGA, m: Optional[int] = None) -> RazPlan:
    """Largest m meeting every predicate, or the report of what fails.

    The generator itself is only planned as numbers (its field may be far
    beyond what can be evaluated); the seed-length predicate is included.
    """
    m = max_output(n2, k1, delta) if m is None else m
    mm = max(m, 1)
    t_case = test_size_factor(n2, k2, k1) if k1 > 0 else 2
    r = bias_exponent(n1, n2)
    seed_len = None
    bias = None
    if r > 0:
        num_vars = mm << n1
        budget = min(2 * mm * t_case, (1 << max(1, num_vars.bit_length())) - 1)
        bias = plan_bias(num_vars, budget, log2_inv_eps=r)
        seed_len = bias.seed_len
    report = constraint_report(n1, k1, n2, k2, m, delta, variant=variant, omega=omega, seed_len=seed_len)
    if r <= 0:
        report.append(_row("n2/2 - 3 log n2 - log n1 > 0", r, ">", 0))
    ok = all(row["satisfied"] for row in report)
    params = RazParams(n1, k1, n2, k2, m, delta, bias, t_case, budget, variant, tuple(report)) if ok else None
    return RazPlan(params, report)


def raz_index(p: RazParams, i: int, x: BitString) -> int:
    return i * (1 << p.n1) + int(x) + 1


def raz_extract(p: RazParams, x: BitString, y: BitString) -> BitString:
    if len(x) != p.n1:
        raise ValueError(f"left source must have {p.n1} bits, got {len(x)}")
    if len(y) != p.n2:
        raise ValueError(f"right source must have {p.n2} bits, got {len(y)}")
    seed = y[: p.bias.seed_len]
    return BitString.from_bits(bias_bits_at(p.bias, seed, [raz_index(p, i, x) for i in range(p.m)]))
