"""Binary codes with relative distance 1/2 - delta, and weak designs.

The code is Reed-Solomon over GF(2^r) concatenated with Hadamard.  A
message is cut into ``K = ceil(n / r)`` r-bit symbols (zero padded on the
right) which are the coefficients ``m_0 .. m_{K-1}`` of
``p(z) = sum m_c z^c``.  The outer codeword evaluates ``p`` at every field
element ``beta_j`` (integer encoding ``j``), and each symbol is replaced by
its ``2^r`` inner products.  Codeword position ``pos`` splits as
``j = pos >> r`` (outer block) and ``u = pos & (2^r - 1)`` (Hadamard mask),
so ``n_hat = 2^(2r)`` and positions are ``2r``-bit strings.

Distinct messages give polynomials agreeing on at most ``K - 1`` points,
hence relative distance at least ``(1 - (K-1)/q) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .bitcore import BitString, field, parity

MAX_SYMBOL_BITS = 32


@dataclass(frozen=True)
class CodeSpec:
    n: int
    r: int
    kind: str = "rs-hadamard"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("message length must be >= 1")
        if self.kind not in ("rs-hadamard", "hadamard"):
            raise ValueError(f"unknown code kind {self.kind!r}")
        if self.kind == "rs-hadamard":
            if not 1 <= self.r <= MAX_SYMBOL_BITS:
                raise ValueError(f"symbol size must be in 1..{MAX_SYMBOL_BITS}")
            if (1 << self.r) < self.symbols:
                raise ValueError("field too small for the message")

    @property
    def symbols(self) -> int:
        return -(-self.n // self.r) if self.kind == "rs-hadamard" else 1

    @property
    def log_n_hat(self) -> int:
        return 2 * self.r if self.kind == "rs-hadamard" else self.n

    @property
    def n_hat(self) -> int:
        return 1 << self.log_n_hat

    @property
    def delta(self):
        """Distance slack guaranteed by construction: distance >= (1/2 - delta) n_hat."""
        from fractions import Fraction

        if self.kind == "hadamard":
            return Fraction(0)
        return Fraction(self.symbols - 1, 2 << self.r)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "r": self.r}

    @classmethod
    def from_dict(cls, d: dict) -> CodeSpec:
        return cls(d["n"], d.get("r", 0), d.get("kind", "rs-hadamard"))


def hadamard_code(n: int) -> CodeSpec:
    return CodeSpec(n, 0, "hadamard")


def plan_code(n: int, delta) -> CodeSpec:
    """Smallest field size r with q >= K and (K - 1)/(2q) <= delta."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    for r in range(1, MAX_SYMBOL_BITS + 1):
        K = -(-n // r)
        q = 1 << r
        if q >= K and (K - 1) <= 2 * q * delta:
            return CodeSpec(n, r)
    raise ValueError(f"no code with symbol size <= {MAX_SYMBOL_BITS} for n={n}, delta={delta}")


def _symbols(spec: CodeSpec, msg: BitString) -> list[int]:
    if len(msg) != spec.n:
        raise ValueError(f"message must have {spec.n} bits, got {len(msg)}")
    pad = spec.symbols * spec.r - spec.n
    v = msg.value << pad
    mask = (1 << spec.r) - 1
    K = spec.symbols
    return [(v >> (spec.r * (K - 1 - c))) & mask for c in range(K)]


def _eval(spec: CodeSpec, coeffs: Sequence[int], point: int) -> int:
    f = field(spec.r)
    acc = 0
    for c in reversed(coeffs):
        acc = f.mul_int(acc, point) ^ c
    return acc


def codeword_bit(spec: CodeSpec, msg: BitString, pos: int) -> int:
    if not 0 <= pos < spec.n_hat:
        raise ValueError(f"position {pos} outside [0, {spec.n_hat})")
    if spec.kind == "hadamard":
        if len(msg) != spec.n:
            raise ValueError(f"message must have {spec.n} bits, got {len(msg)}")
        return parity(msg.value & pos)
    coeffs = _symbols(spec, msg)
    return parity(_eval(spec, coeffs, pos >> spec.r) & (pos & ((1 << spec.r) - 1)))


def encode(spec: CodeSpec, msg: BitString) -> BitString:
    if spec.kind == "hadamard":
        if len(msg) != spec.n:
            raise ValueError(f"message must have {spec.n} bits, got {len(msg)}")
        bits = [parity(msg.value & u) for u in range(spec.n_hat)]
        return BitString.from_bits(bits)
    coeffs = _symbols(spec, msg)
    q = 1 << spec.r
    v = 0
    for j in range(q):
        s = _eval(spec, coeffs, j)
        for u in range(q):
            v = (v << 1) | parity(s & u)
    return BitString(spec.n_hat, v)


def min_distance(spec: CodeSpec) -> int:
    """Exhaustive minimum distance via linearity: least weight of a nonzero codeword."""
    if spec.n > 12:
        raise ValueError("exhaustive distance limited to n <= 12")
    return min(encode(spec, BitString(spec.n, v)).weight() for v in range(1, 1 << spec.n))


# --- weak designs ----------------------------------------------------------


class DesignError(RuntimeError):
    def __init__(self, msg: str, best_d: Optional[int] = None):
        super().__init__(msg)
        self.best_d = best_d


@dataclass(frozen=True)
class WeakDesign:
    m: int
    l: int
    d: int
    rho: float
    sets: tuple = dc_field(default_factory=tuple)

    def overlap_sums(self) -> list[int]:
        return [sum(1 << len(set(self.sets[i]) & set(self.sets[j])) for j in range(i)) for i in range(self.m)]

    def verify(self) -> bool:
        if len(self.sets) != self.m:
            return False
        for s in self.sets:
            if len(set(s)) != self.l or any(not 0 <= e < self.d for e in s):
                return False
        bound = self.rho * (self.m - 1)
        return all(v <= bound for v in self.overlap_sums())

    def to_dict(self) -> dict:
        return {"m": self.m, "l": self.l, "d": self.d, "rho": self.rho, "sets": [list(s) for s in self.sets]}

    @classmethod
    def from_dict(cls, d: dict) -> WeakDesign:
        return cls(d["m"], d["l"], d["d"], d["rho"], tuple(tuple(s) for s in d["sets"]))


def disjoint_design(m: int, l: int, rho: float = 1.0) -> WeakDesign:
    sets = tuple(tuple(range(i * l, (i + 1) * l)) for i in range(m))
    return WeakDesign(m, l, m * l, rho, sets)


def _greedy(m: int, l: int, d: int, rho: float, max_steps: int) -> Optional[tuple]:
    budget = rho * (m - 1)
    sets: list[tuple] = []
    members: list[set] = []
    steps = 0
    for _ in range(m):
        chosen: list[int] = []
        inter = [0] * len(sets)
        for _ in range(l):
            best, best_cost = None, None
            for e in range(d):
                steps += 1
                if steps > max_steps:
                    return None
                if e in chosen:
                    continue
                cost = sum(1 << (inter[j] + (e in mem)) for j, mem in enumerate(members))
                if best_cost is None or cost < best_cost:
                    best, best_cost = e, cost
            chosen.append(best)
            for j, mem in enumerate(members):
                if best in mem:
                    inter[j] += 1
        if sum(1 << v for v in inter) > budget:
            return None
        sets.append(tuple(sorted(chosen)))
        members.append(set(chosen))
    return tuple(sets)


def greedy_weak_design(m: int, l: int, rho: float, max_steps: int = 10**7) -> WeakDesign:
    """Greedy element-by-element packing; d is the smallest universe for which it succeeds.

    Falls back to the disjoint design (always valid) when nothing smaller works.
    """
    if rho < 1:
        raise ValueError("rho must be >= 1")
    if m == 1:
        return disjoint_design(1, l, rho)
    steps_left = max_steps
    for d in range(l, m * l):
        sets = _greedy(m, l, d, rho, steps_left)
        steps_left -= d * l * m
        if sets is not None:
            design = WeakDesign(m, l, d, rho, sets)
            if design.verify():
                return design
        if steps_left <= 0:
            raise DesignError(f"greedy search exhausted its step cap below d={d}", best_d=m * l)
    design = disjoint_design(m, l, rho)
    assert design.verify()
    return design
