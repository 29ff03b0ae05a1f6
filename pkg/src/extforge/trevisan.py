"""Trevisan's strong seeded extractor and its collision-resistant variant.

``tre_extract`` reads one codeword bit per design set:
bit i is the codeword of x at the position spelled by the seed bits in S_i.

``crtre_extract`` keeps the first ``m - t`` bits of a Trevisan output and
appends ``4t/5`` bits of a second, longer code, each read at a position
given by its own disjoint block of extra seed bits.  Two inputs x != x'
then agree on all appended bits with probability at most
``(1/2 + delta2)^(4t/5)`` over the blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .bitcore import BitString
from .codes import CodeSpec, WeakDesign, codeword_bit, disjoint_design, encode, greedy_weak_design, plan_code

DEFAULT_SEED_CONSTANT = 64.0


@dataclass(frozen=True)
class TrevisanParams:
    n: int
    k: float
    m: int
    epsilon: float
    code: CodeSpec
    design: WeakDesign

    def __post_init__(self):
        if self.code.n != self.n:
            raise ValueError("code message length differs from n")
        if self.design.m != self.m:
            raise ValueError("design has the wrong number of sets")
        if self.design.l != self.code.log_n_hat:
            raise ValueError("design set size must equal log2(n_hat)")

    @property
    def d(self) -> int:
        return self.design.d

    @property
    def l(self) -> int:
        return self.code.log_n_hat

    def seed_bound(self, c: float = DEFAULT_SEED_CONSTANT) -> float:
        return c * max(1.0, math.log2(self.n)) ** 2 * max(1.0, math.log2(1 / self.epsilon))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "epsilon": self.epsilon,
            "code": self.code.to_dict(),
            "design": self.design.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> TrevisanParams:
        return cls(d["n"], d["k"], d["m"], d["epsilon"], CodeSpec.from_dict(d["code"]), WeakDesign.from_dict(d["design"]))


def plan_trevisan(
    n: int,
    k: float,
    m: int,
    epsilon: float,
    *,
    design: str = "disjoint",
    rho: float = 2.0,
    code: Optional[CodeSpec] = None,
) -> TrevisanParams:
    """Code with slack eps/(2m) (unless given) and a disjoint or greedy design."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if code is None:
        code = plan_code(n, Fraction(epsilon).limit_denominator(1 << 40) / (2 * m))
    l = code.log_n_hat
    if design == "disjoint":
        wd = disjoint_design(m, l)
    elif design == "greedy":
        wd = greedy_weak_design(m, l, rho)
    else:
        raise ValueError(f"unknown design kind {design!r}")
    return TrevisanParams(n, k, m, epsilon, code, wd)


def tre_extract(p: TrevisanParams, x: BitString, z: BitString) -> BitString:
    if len(x) != p.n:
        raise ValueError(f"source must have {p.n} bits, got {len(x)}")
    if len(z) != p.d:
        raise ValueError(f"seed must have {p.d} bits, got {len(z)}")
    bits = [codeword_bit(p.code, x, int(z.restrict(s))) for s in p.design.sets]
    return BitString.from_bits(bits)


@dataclass(frozen=True)
class CrTreParams:
    base: TrevisanParams
    t: int
    code2: CodeSpec
    eps_collision: float
    eps_T: float

    def __post_init__(self):
        if self.t % 5:
            raise ValueError("t must be a multiple of 5")
        if self.t > self.base.m:
            raise ValueError("truncation exceeds the base output length")
        if self.code2.n != self.base.n:
            raise ValueError("second code has the wrong message length")

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def blocks(self) -> int:
        return 4 * self.t // 5

    @property
    def block_len(self) -> int:
        return self.code2.log_n_hat

    @property
    def z(self) -> int:
        return self.blocks * self.block_len

    @property
    def seed_len(self) -> int:
        return self.base.d + self.z

    @property
    def out_len(self) -> int:
        return self.base.m - self.t + self.blocks

    @property
    def delta2(self) -> Fraction:
        return self.code2.delta

    def agreement_bound(self) -> Fraction:
        """``(1/2 + delta2)^(4t/5)``, the per-pair collision bound of the appended part."""
        return (Fraction(1, 2) + self.delta2) ** self.blocks

    def report(self) -> list[dict]:
        """Planner predicates; the residual-entropy one is advisory."""
        k = self.base.k
        return [
            _pred("(1/2 + delta2)^(4t/5) <= eps_C", float(self.agreement_bound()), "<=", self.eps_collision),
            _pred("k - m + t >= 4t/5", k - self.base.m + self.t, ">=", self.blocks),
        ]

    @property
    def residual_ok(self) -> bool:
        return self.base.k - self.base.m + self.t >= self.blocks

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "t": self.t,
            "code2": self.code2.to_dict(),
            "eps_collision": self.eps_collision,
            "eps_T": self.eps_T,
        }

    @classmethod
    def from_dict(cls, d: dict) -> CrTreParams:
        return cls(TrevisanParams.from_dict(d["base"]), d["t"], CodeSpec.from_dict(d["code2"]), d["eps_collision"], d["eps_T"])


_OPS = {"==": lambda a, b: a == b, "<=": lambda a, b: a <= b, ">=": lambda a, b: a >= b}


def _pred(name: str, lhs, op: str, rhs) -> dict:
    return {"predicate": name, "lhs": lhs, "rhs": rhs, "satisfied": bool(_OPS[op](lhs, rhs))}


def truncation_amount(eps_collision: float) -> int:
    """``ceil(5/2 log2(1/eps_C))`` rounded up to a multiple of 5."""
    if not 0 < eps_collision <= 1:
        raise ValueError("eps_collision must lie in (0, 1]")
    t = math.ceil(2.5 * math.log2(1 / eps_collision) - 1e-12)
    return -(-t // 5) * 5


def plan_crtre(
    n: int,
    k: float,
    m: int,
    eps_T: float,
    eps_collision: Optional[float] = None,
    *,
    design: str = "disjoint",
    rho: float = 2.0,
    base_code: Optional[CodeSpec] = None,
) -> CrTreParams:
    """Plan crTre with base output ``m``; eps_collision defaults to eps_T^2."""
    eps_c = eps_T * eps_T if eps_collision is None else eps_collision
    t = truncation_amount(eps_c)
    if t > m:
        raise ValueError(f"truncation t={t} exceeds base output length m={m}")
    base = plan_trevisan(n, k, m, eps_T, design=design, rho=rho, code=base_code)
    code2 = plan_code(n, Fraction(eps_T).limit_denominator(1 << 40) / (4 * m))
    return CrTreParams(base, t, code2, eps_c, eps_T)


def crtre_extract(p: CrTreParams, x: BitString, seed: BitString) -> BitString:
    if len(x) != p.n:
        raise ValueError(f"source must have {p.n} bits, got {len(x)}")
    if len(seed) != p.seed_len:
        raise ValueError(f"seed must have {p.seed_len} bits, got {len(seed)}")
    s, zs = seed[: p.base.d], seed[p.base.d :]
    head = tre_extract(p.base, x, s)[: p.base.m - p.t]
    lb = p.block_len
    tail = [codeword_bit(p.code2, x, int(zs[j * lb : (j + 1) * lb])) for j in range(p.blocks)]
    return head + BitString.from_bits(tail)


# --- exact collision accounting ----------------------------------------------


def _used_positions(p: CrTreParams) -> list[int]:
    used = set()
    for s in p.base.design.sets[: p.base.m - p.t]:
        used.update(s)
    return sorted(used)


def crtre_pair_collision(p: CrTreParams, x: BitString, fx: BitString) -> Fraction:
    """Exact ``Pr_seed[crTre(x, S) = crTre(fx, S)]``.

    The head and each appended block read disjoint seed bits, so the
    probability factors as ``p_head * p_block^blocks``.  The head is
    enumerated over the seed bits its sets actually touch.
    """
    if x == fx:
        return Fraction(1)
    used = _used_positions(p)
    sets = p.base.design.sets[: p.base.m - p.t]
    if len(used) > 22:
        raise ValueError("head seed support too large to enumerate")
    idx = {pos: i for i, pos in enumerate(used)}
    diff = encode(p.base.code, x) ^ encode(p.base.code, fx)
    agree = 0
    for v in range(1 << len(used)):
        ok = True
        for s in sets:
            pos = 0
            for e in s:
                pos = (pos << 1) | ((v >> (len(used) - 1 - idx[e])) & 1)
            if diff[pos]:
                ok = False
                break
        agree += ok
    p_head = Fraction(agree, 1 << len(used))
    if p.blocks:
        cx, cf = encode(p.code2, x), encode(p.code2, fx)
        p_block = Fraction(p.code2.n_hat - (cx ^ cf).weight(), p.code2.n_hat)
    else:
        p_block = Fraction(1)
    return p_head * p_block ** p.blocks


def crtre_collision(p: CrTreParams, f: Callable[[BitString], BitString], xs: Optional[Sequence[BitString]] = None) -> tuple[Fraction, Fraction]:
    """(average over uniform x in ``xs``, max over x) of the pairwise collision probability."""
    if xs is None:
        xs = [BitString(p.n, v) for v in range(1 << p.n)]
    vals = []
    for x in xs:
        fx = f(x)
        if fx == x:
            raise ValueError(f"tamper function has a fixed point at {x!r}")
        vals.append(crtre_pair_collision(p, x, fx))
    return sum(vals, Fraction(0)) / len(vals), max(vals)


def crtre_collision_bruteforce(p: CrTreParams, f: Callable[[BitString], BitString]) -> Fraction:
    """Same average by full enumeration of sources and seeds (tiny instances only)."""
    if p.n + p.seed_len > 22:
        raise ValueError("instance too large for full enumeration")
    hits = 0
    for xv in range(1 << p.n):
        x = BitString(p.n, xv)
        fx = f(x)
        for sv in range(1 << p.seed_len):
            s = BitString(p.seed_len, sv)
            hits += crtre_extract(p, x, s) == crtre_extract(p, fx, s)
    return Fraction(hits, 1 << (p.n + p.seed_len))
