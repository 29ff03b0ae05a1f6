"""k-wise small-bias bits with pointwise access.

The generator combines two classical pieces:

* a powering sample space over GF(2^m): the seed is a pair ``(a, b)`` and
  bit ``j`` of the intermediate string is ``r_j = <a^j, b>``.  Any nonzero
  XOR test on ``L`` such bits has bias at most ``(L - 1) / 2^(m+1)``;
* the dual of a binary BCH code over GF(2^t): variable ``i`` in ``[1, N]``
  (``N = 2^t - 1``) is ``Z_i = <h_i, r>`` with
  ``h_i = (1, a_i, a_i^3, ..., a_i^(k-2))`` and ``a_i`` the field element
  whose integer encoding is ``i``.  Any ``k`` of the ``h_i`` are linearly
  independent, so each XOR of at most ``k`` variables is a nonzero test on
  ``r`` and inherits its bias.

The intermediate string has length ``L = 1 + t (k - 1) / 2``, which is what
keeps the seed within the usual ``2 log(1/eps) + 2 log log N + 2 log k``
budget.  Plain powering over GF(2^t) with a 2t-bit seed cannot reach a
prescribed eps in general (for t=4, k=3 its bias is 3/16 > 1/8).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from .bitcore import MAX_TABLE_BITS, BitString, field, field_powers, parity

Real = Union[float, Fraction, int]


def _log2_ceil_exact(v: int) -> int:
    return (v - 1).bit_length() if v > 1 else 0


@dataclass(frozen=True)
class BiasSpec:
    """Parameters of one generator; ``epsilon`` is the guaranteed bias bound."""

    t: int
    k: int
    m: int
    epsilon: Fraction
    requested: float

    @property
    def N(self) -> int:
        return (1 << self.t) - 1

    @property
    def L(self) -> int:
        return 1 + self.t * (self.k - 1) // 2

    @property
    def seed_len(self) -> int:
        return 2 * self.m

    @property
    def lemma_seed_bound(self) -> int:
        return lemma_seed_bound(self.N, self.k, self.requested)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "N": self.N,
            "k": self.k,
            "m": self.m,
            "L": self.L,
            "seed_len": self.seed_len,
            "epsilon": str(self.epsilon),
            "requested_log2_inv_eps": self.requested,
        }


def lemma_seed_bound(num_vars: int, k: int, log2_inv_eps: float) -> int:
    """``2 ceil(log 1/eps + log log N + log k) + 1``; the log log term is 0 for N < 2."""
    loglog = math.log2(math.log2(num_vars)) if num_vars > 2 else 0.0
    return 2 * math.ceil(log2_inv_eps + loglog + math.log2(k)) + 1


def _odd_up(k: int) -> int:
    return k if k % 2 else k + 1


def _bound(L: int, m: int) -> Fraction:
    return Fraction(L - 1, 1 << (m + 1))


def plan_bias(num_vars: int, k: int, epsilon: Optional[Real] = None, *, log2_inv_eps: Optional[float] = None) -> BiasSpec:
    """Smallest generator with at least ``num_vars`` variables, k-wise bias <= epsilon.

    ``epsilon`` may be given directly or as ``log2_inv_eps`` when it is too
    small for a float.  The seed length is minimal for this construction.
    """
    if num_vars < 1:
        raise ValueError("num_vars must be >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    if (epsilon is None) == (log2_inv_eps is None):
        raise ValueError("give exactly one of epsilon, log2_inv_eps")
    if epsilon is not None:
        if not 0 < epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
        log2_inv_eps = -math.log2(epsilon)
    elif log2_inv_eps <= 0:
        raise ValueError("epsilon must be < 1")
    t = max(1, (num_vars).bit_length())  # smallest t with 2^t - 1 >= num_vars
    k = _odd_up(k)
    L = 1 + t * (k - 1) // 2
    if L == 1:
        m = 1
    else:
        m = max(1, math.ceil(math.log2(L - 1) + log2_inv_eps) - 1)
        if epsilon is not None:
            eps = Fraction(epsilon)
            while m > 1 and _bound(L, m - 1) <= eps:
                m -= 1
            while _bound(L, m) > eps:
                m += 1
    return BiasSpec(t, k, m, _bound(L, m), log2_inv_eps)


def plan_bias_for_seed(num_vars: int, k: int, seed_len: int) -> BiasSpec:
    """Generator using at most ``seed_len`` seed bits; epsilon is whatever that achieves."""
    m = seed_len // 2
    if m < 1:
        raise ValueError("seed budget below 2 bits")
    t = max(1, num_vars.bit_length())
    k = _odd_up(k)
    L = 1 + t * (k - 1) // 2
    eps = _bound(L, m)
    req = -math.log2(eps) if eps else math.inf
    return BiasSpec(t, k, m, eps, req)


@lru_cache(maxsize=8192)
def _r_vector(m: int, L: int, a: int, b: int) -> int:
    """Bit j of the result is <a^j, b> over GF(2^m), for j < L."""
    fm = field(m)
    r = 0
    p = 1
    for j in range(L):
        r |= parity(p & b) << j
        p = fm.mul_int(p, a)
    return r


def _column(spec: BiasSpec, index: int) -> int:
    ft = field(spec.t)
    h = 1
    sq = ft.mul_int(index, index)
    p = index
    for u in range((spec.k - 1) // 2):
        h |= p << (1 + u * spec.t)
        p = ft.mul_int(p, sq)
    return h


def split_seed(spec: BiasSpec, seed: BitString) -> tuple[int, int]:
    if len(seed) != spec.seed_len:
        raise ValueError(f"seed must have {spec.seed_len} bits, got {len(seed)}")
    a, b = seed.split(spec.m, spec.m)
    return int(a), int(b)


def bias_bit(spec: BiasSpec, seed: BitString, index: int) -> int:
    """Variable ``index`` (1-based) of the generator under ``seed``."""
    if not 1 <= index <= spec.N:
        raise ValueError(f"index {index} outside [1, {spec.N}]")
    a, b = split_seed(spec, seed)
    return parity(_column(spec, index) & _r_vector(spec.m, spec.L, a, b))


def bias_bits_at(spec: BiasSpec, seed: BitString, indices) -> list[int]:
    """Variables at the given 1-based indices in one vectorized pass.

    Uses log tables, so both fields must have at most MAX_TABLE_BITS bits;
    otherwise falls back to ``bias_bit`` per index.
    """
    import numpy as np

    idx = [int(i) for i in indices]
    if spec.t > MAX_TABLE_BITS or spec.m > MAX_TABLE_BITS:
        return [bias_bit(spec, seed, i) for i in idx]
    if any(not 1 <= i <= spec.N for i in idx):
        raise ValueError(f"index outside [1, {spec.N}]")
    a, b = split_seed(spec, seed)
    pw = field_powers(spec.m, [a], np.arange(spec.L))[0]
    r = np.bitwise_count(pw & b) & 1
    U = (spec.k - 1) // 2
    if U == 0:
        return [int(r[0])] * len(idx)
    weights = np.int64(1) << np.arange(spec.t, dtype=np.int64)
    blocks = r[1:].reshape(U, spec.t) @ weights
    odd = field_powers(spec.t, idx, 2 * np.arange(U) + 1)
    z = (np.bitwise_count(odd & blocks[None, :]) & 1).sum(axis=1) & 1
    return [int(v) for v in z ^ r[0]]


def bias_bits(spec: BiasSpec, seed: BitString, count: Optional[int] = None) -> list[int]:
    """Variables 1..count (default N), computed in one pass by the naive route."""
    count = spec.N if count is None else count
    a, b = split_seed(spec, seed)
    fm = field(spec.m)
    r = []
    p = 1
    for _ in range(spec.L):
        r.append(parity(p & b))
        p = fm.mul_int(p, a)
    ft = field(spec.t)
    out = []
    for i in range(1, count + 1):
        acc = r[0]
        for u in range((spec.k - 1) // 2):
            e = ft.pow_int(i, 2 * u + 1)
            for j in range(spec.t):
                if (e >> j) & 1:
                    acc ^= r[1 + u * spec.t + j]
        out.append(acc)
    return out


def exhaustive_bias(spec: BiasSpec, k: Optional[int] = None) -> tuple[Fraction, Optional[int]]:
    """Exact max over nonempty tests of size <= k of ``|Pr[XOR = 0] - 1/2|``.

    Returns (max bias, worst test mask with bit i-1 for variable i).
    """
    import itertools

    k = spec.k if k is None else k
    N = spec.N
    if spec.seed_len > 16 or N > 63:
        raise ValueError("exhaustive bias check limited to seed_len <= 16 and N <= 63")
    words = []
    for s in range(1 << spec.seed_len):
        bits = bias_bits(spec, BitString(spec.seed_len, s))
        words.append(sum(b << i for i, b in enumerate(bits)))
    total = len(words)
    best, arg = Fraction(-1), None
    for size in range(1, min(k, N) + 1):
        for combo in itertools.combinations(range(N), size):
            mask = sum(1 << i for i in combo)
            zeros = sum(1 for w in words if not parity(w & mask))
            bias = abs(Fraction(zeros, total) - Fraction(1, 2))
            if bias > best:
                best, arg = bias, mask
    return best, arg
