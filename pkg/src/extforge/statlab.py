"""Brute-force statistical oracle.

Explicit distributions over bit strings, statistical distance, min-entropy
and its average-conditional variant, rejection sampling and exhaustive
worst-case error of two-source extractors over flat sources.

Two numeric backends are offered: exact ``Fraction`` probabilities (the
default for small domains, used by every acceptance check) and plain
floats.  The worst-case error routines always compute with integers and
return exact Fractions.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence, Union

from .bitcore import BitString

Prob = Union[Fraction, float]

DEFAULT_CAP = 10**7
EXACT_ATOM_LIMIT = 2**20
FLOAT_TOL = 1e-12


class EnumerationCapError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed the configured cap."""


def enumeration_cap() -> int:
    env = os.environ.get("EXTFORGE_CAP")
    return int(env) if env else DEFAULT_CAP


# --- distributions ---------------------------------------------------------


class Distribution:
    """Probability mass function over ``length``-bit strings.

    Atoms with probability zero are dropped.  ``exact=True`` stores Fractions
    and requires the masses to sum to exactly 1.
    """

    def __init__(self, length: int, pmf: Mapping[BitString, Prob], exact: bool = True):
        self.length = length
        self.exact = exact
        clean: dict[BitString, Prob] = {}
        for a, p in pmf.items():
            if len(a) != length:
                raise ValueError(f"atom {a!r} has length {len(a)}, expected {length}")
            p = Fraction(p) if exact else float(p)
            if p < 0:
                raise ValueError("negative probability")
            if p:
                clean[a] = clean.get(a, 0) + p
        total = sum(clean.values())
        if exact and total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if not exact and abs(total - 1) > FLOAT_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        self.pmf = clean

    # constructors

    @classmethod
    def uniform(cls, length: int, exact: bool = True) -> Distribution:
        if exact and length > 20:
            raise ValueError("exact uniform distribution over more than 2^20 atoms")
        p = Fraction(1, 1 << length) if exact else 1.0 / (1 << length)
        return cls(length, {BitString(length, v): p for v in range(1 << length)}, exact)

    @classmethod
    def point(cls, bs: BitString) -> Distribution:
        return cls(len(bs), {bs: Fraction(1)})

    @classmethod
    def flat(cls, length: int, support: Iterable[BitString]) -> Distribution:
        support = set(support)
        if not support:
            raise ValueError("empty support")
        p = Fraction(1, len(support))
        return cls(length, {a: p for a in support})

    @classmethod
    def from_counts(cls, length: int, counts: Mapping[BitString, int]) -> Distribution:
        total = sum(counts.values())
        return cls(length, {a: Fraction(c, total) for a, c in counts.items()})

    @classmethod
    def pushforward(cls, source: Distribution, fn: Callable[[BitString], BitString], length: int) -> Distribution:
        out: dict[BitString, Prob] = defaultdict(int)
        for a, p in source.pmf.items():
            out[fn(a)] += p
        return cls(length, out, source.exact)

    # accessors

    def __call__(self, a: BitString) -> Prob:
        return self.pmf.get(a, 0)

    def support(self) -> set[BitString]:
        return set(self.pmf)

    def __repr__(self) -> str:
        return f"Distribution(len={self.length}, atoms={len(self.pmf)})"

    # serialization

    def to_json(self) -> str:
        atoms = [{"bits": a.to_bits(), "p": str(p) if self.exact else p} for a, p in sorted(self.pmf.items())]
        return json.dumps({"len": self.length, "atoms": atoms}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> Distribution:
        obj = json.loads(text)
        atoms = obj["atoms"]
        exact = all(isinstance(a["p"], str) for a in atoms)
        pmf = {BitString.from_bits(a["bits"]): (Fraction(a["p"]) if exact else a["p"]) for a in atoms}
        return cls(obj["len"], pmf, exact)


class JointDistribution:
    """Joint pmf over tuples of bit strings with lengths ``lens``."""

    def __init__(self, lens: Sequence[int], pmf: Mapping[tuple, Prob], exact: bool = True):
        self.lens = tuple(lens)
        self.exact = exact
        clean: dict[tuple, Prob] = {}
        for key, p in pmf.items():
            if tuple(len(a) for a in key) != self.lens:
                raise ValueError(f"atom {key!r} does not match lengths {self.lens}")
            p = Fraction(p) if exact else float(p)
            if p < 0:
                raise ValueError("negative probability")
            if p:
                clean[tuple(key)] = clean.get(tuple(key), 0) + p
        total = sum(clean.values())
        if (exact and total != 1) or (not exact and abs(total - 1) > FLOAT_TOL):
            raise ValueError(f"probabilities sum to {total}, not 1")
        self.pmf = clean

    @classmethod
    def product(cls, *parts: Distribution) -> JointDistribution:
        pmf = {}
        for combo in itertools.product(*(p.pmf.items() for p in parts)):
            key = tuple(a for a, _ in combo)
            pmf[key] = math.prod(p for _, p in combo)
        return cls([p.length for p in parts], pmf, all(p.exact for p in parts))

    @classmethod
    def from_samples_fn(cls, source: Distribution, fn: Callable[[BitString], tuple], lens: Sequence[int]) -> JointDistribution:
        pmf: dict[tuple, Prob] = defaultdict(int)
        for a, p in source.pmf.items():
            pmf[tuple(fn(a))] += p
        return cls(lens, pmf, source.exact)

    def marginal(self, i: int) -> Distribution:
        out: dict[BitString, Prob] = defaultdict(int)
        for key, p in self.pmf.items():
            out[key[i]] += p
        return Distribution(self.lens[i], out, self.exact)


@dataclass(frozen=True)
class FlatSource:
    length: int
    support: frozenset

    @property
    def k(self) -> float:
        return math.log2(len(self.support))

    def distribution(self) -> Distribution:
        return Distribution.flat(self.length, self.support)


# --- distances and entropies -----------------------------------------------


def stat_dist(p: Distribution, q: Distribution) -> Prob:
    if p.length != q.length:
        raise ValueError(f"length mismatch: {p.length} vs {q.length}")
    keys = set(p.pmf) | set(q.pmf)
    return sum(abs(p(a) - q(a)) for a in keys) / 2


def cond_stat_dist(pj: JointDistribution, qj: JointDistribution) -> Prob:
    """Distance between the joints; ``Delta(A; B | C)`` is ``cond_stat_dist((A,C), (B,C))``."""
    if pj.lens != qj.lens:
        raise ValueError(f"length mismatch: {pj.lens} vs {qj.lens}")
    keys = set(pj.pmf) | set(qj.pmf)
    return sum(abs(pj.pmf.get(a, 0) - qj.pmf.get(a, 0)) for a in keys) / 2


def min_entropy(p: Distribution) -> float:
    return -math.log2(max(p.pmf.values()))


def guessing_probability(j: JointDistribution) -> Prob:
    """``E_z max_x Pr[X=x | Z=z]`` for a joint (X, Z)."""
    best: dict[BitString, Prob] = defaultdict(int)
    for (x, z), p in j.pmf.items():
        if p > best[z]:
            best[z] = p
    return sum(best.values())


def avg_cond_min_entropy(j: JointDistribution) -> float:
    if len(j.lens) != 2:
        raise ValueError("avg_cond_min_entropy expects a joint (X, Z)")
    return -math.log2(guessing_probability(j))


def conditional_min_entropies(j: JointDistribution) -> dict[BitString, tuple[Prob, float]]:
    """``z -> (Pr[Z=z], H_inf(X | Z=z))``."""
    pz: dict[BitString, Prob] = defaultdict(int)
    mx: dict[BitString, Prob] = defaultdict(int)
    for (x, z), p in j.pmf.items():
        pz[z] += p
        mx[z] = max(mx[z], p)
    return {z: (pz[z], -math.log2(mx[z] / pz[z])) for z in pz}


# --- rejection sampling ----------------------------------------------------


def rejection_bound(target: Distribution, proposal: Distribution) -> Prob:
    """``d = max_y target(y) / proposal(y)``; checks the support condition."""
    if target.length != proposal.length:
        raise ValueError("length mismatch")
    missing = [y for y in target.pmf if proposal(y) == 0]
    if missing:
        raise ValueError(f"target support not contained in proposal support (e.g. {missing[0]!r})")
    return max(target(y) / proposal(y) for y in target.pmf)


def acceptance_probability(target: Distribution, proposal: Distribution, draw: BitString) -> Prob:
    d = rejection_bound(target, proposal)
    if proposal(draw) == 0:
        raise ValueError(f"draw {draw!r} outside the proposal support")
    return target(draw) / (d * proposal(draw))


def rejection_sample(target: Distribution, proposal: Distribution, draw: BitString, coin: Prob) -> Optional[BitString]:
    """Return ``draw`` if ``coin < target/(d*proposal)`` at ``draw``, else None (reject)."""
    if not 0 <= coin < 1:
        raise ValueError("coin must lie in [0, 1)")
    return draw if coin < acceptance_probability(target, proposal, draw) else None


# --- flat sources ----------------------------------------------------------


def _check_flat_args(n: int, k: int):
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")


def flat_source_count(n: int, k: int) -> int:
    _check_flat_args(n, k)
    return math.comb(1 << n, 1 << k)


def _flat_supports(n: int, k: int, cap: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    cap = enumeration_cap() if cap is None else cap
    count = flat_source_count(n, k)
    if count > cap:
        raise EnumerationCapError(f"C(2^{n}, 2^{k}) = {count} flat sources exceed the cap {cap}")
    return itertools.combinations(range(1 << n), 1 << k)


def enumerate_flat_sources(n: int, k: int, cap: Optional[int] = None) -> Iterator[FlatSource]:
    for supp in _flat_supports(n, k, cap):
        yield FlatSource(n, frozenset(BitString(n, v) for v in supp))


def sample_flat_supports(n: int, k: int, count: int, rng: random.Random) -> list[tuple[int, ...]]:
    _check_flat_args(n, k)
    return [tuple(sorted(rng.sample(range(1 << n), 1 << k))) for _ in range(count)]


# --- extractor error -------------------------------------------------------

ExtFn = Callable[[BitString, BitString], BitString]


def ext_table(ext: ExtFn, n1: int, n2: int) -> list[list[int]]:
    """``T[x][y] = int(ext(x, y))`` for every input pair."""
    if n1 + n2 > 22:
        raise EnumerationCapError(f"refusing to tabulate 2^{n1 + n2} extractor evaluations")
    xs = [BitString(n1, v) for v in range(1 << n1)]
    ys = [BitString(n2, v) for v in range(1 << n2)]
    return [[int(ext(x, y)) for y in ys] for x in xs]


def _sd_from_counts(counts: Iterable[int], total: int, m: int) -> Fraction:
    """SD between the empirical law ``counts/total`` on m-bit outputs and U_m."""
    size = 1 << m
    seen = 0
    acc = 0
    for c in counts:
        seen += 1
        acc += abs(c * size - total)
    acc += (size - seen) * total
    return Fraction(acc, 2 * total * size)


def pair_error(table: Sequence[Sequence[int]], xs: Sequence[int], ys: Sequence[int], m: int, strong_side: str = "none") -> Fraction:
    """Exact distance from uniform of E(X, Y) for flat X on ``xs``, Y on ``ys``.

    ``strong_side='right'`` conditions on Y, ``'left'`` on X.
    """
    if strong_side == "none":
        cnt = Counter(table[x][y] for x in xs for y in ys)
        return _sd_from_counts(cnt.values(), len(xs) * len(ys), m)
    if strong_side == "right":
        parts = [_sd_from_counts(Counter(table[x][y] for x in xs).values(), len(xs), m) for y in ys]
        return sum(parts, Fraction(0)) / len(ys)
    if strong_side == "left":
        parts = [_sd_from_counts(Counter(table[x][y] for y in ys).values(), len(ys), m) for x in xs]
        return sum(parts, Fraction(0)) / len(xs)
    raise ValueError(f"strong_side must be none/left/right, got {strong_side!r}")


@dataclass
class ErrorReport:
    value: Fraction
    argmax: Optional[tuple] = None
    mode: str = "exhaustive"
    pairs: int = 0
    radius: Optional[float] = None
    details: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        return {
            "value": float(self.value),
            "exact": str(self.value),
            "mode": self.mode,
            "pairs": self.pairs,
            "radius": self.radius,
        }


def sampled_radius(samples: int, confidence: float = 0.95) -> float:
    """Mass of source pairs that may exceed a sampled maximum, at the given confidence."""
    return math.log(1 / (1 - confidence)) / samples


def worst_case_ext_error(
    ext: ExtFn,
    n1: int,
    k1: int,
    n2: int,
    k2: int,
    m: int,
    strong_side: str = "none",
    *,
    cap: Optional[int] = None,
    samples: Optional[int] = None,
    rng_seed: int = 0,
    left_supports: Optional[Sequence[Sequence[int]]] = None,
    right_supports: Optional[Sequence[Sequence[int]]] = None,
    table: Optional[Sequence[Sequence[int]]] = None,
) -> ErrorReport:
    """Max over flat (n1,k1) x (n2,k2) source pairs of the extractor's error.

    Either side may be given explicitly (e.g. a sampled list of supports).
    If the exhaustive pair count exceeds the cap, ``samples`` must be given;
    the sources on each enumerated-too-large side are then drawn at random.
    """
    cap = enumeration_cap() if cap is None else cap
    rng = random.Random(rng_seed)
    mode = "exhaustive"
    if left_supports is None and right_supports is None:
        total = flat_source_count(n1, k1) * flat_source_count(n2, k2)
        if total > cap:
            if samples is None:
                raise EnumerationCapError(f"{total} source pairs exceed the cap {cap}; pass samples=")
            left_supports = sample_flat_supports(n1, k1, samples, rng)
            right_supports = sample_flat_supports(n2, k2, samples, rng)
            pairs = list(zip(left_supports, right_supports))
            mode = "sampled"
        else:
            pairs = None
    else:
        if left_supports is None:
            left_supports = list(_flat_supports(n1, k1, cap))
        if right_supports is None:
            right_supports = list(_flat_supports(n2, k2, cap))
        pairs = None
        mode = "partial"
    if pairs is None:
        xs_all = left_supports if left_supports is not None else _flat_supports(n1, k1, cap)
        ys_all = list(right_supports) if right_supports is not None else list(_flat_supports(n2, k2, cap))
        pairs = ((xs, ys) for xs in xs_all for ys in ys_all)
    if table is None:
        table = ext_table(ext, n1, n2)
    best = Fraction(-1)
    arg = None
    count = 0
    for xs, ys in pairs:
        count += 1
        e = pair_error(table, xs, ys, m, strong_side)
        if e > best:
            best, arg = e, (tuple(xs), tuple(ys))
    radius = sampled_radius(count) if mode == "sampled" else None
    return ErrorReport(best, arg, mode, count, radius)


# --- tampering functions and collisions -------------------------------------


class TamperFunction:
    """A function on n-bit strings, held as a lookup table over ints."""

    def __init__(self, n: int, table: Sequence[int], name: str = "table"):
        if len(table) != 1 << n:
            raise ValueError(f"table must have 2^{n} entries")
        if any(not 0 <= v < (1 << n) for v in table):
            raise ValueError("table entry out of range")
        self.n = n
        self.table = tuple(table)
        self.name = name

    @classmethod
    def bitflip(cls, n: int, mask: int) -> TamperFunction:
        return cls(n, [x ^ mask for x in range(1 << n)], f"xor-{mask:x}")

    @classmethod
    def increment(cls, n: int) -> TamperFunction:
        return cls(n, [(x + 1) % (1 << n) for x in range(1 << n)], "inc")

    @classmethod
    def identity(cls, n: int) -> TamperFunction:
        return cls(n, list(range(1 << n)), "id")

    def __call__(self, x: BitString) -> BitString:
        return BitString(self.n, self.table[x.value])

    def fixed_points(self, domain: Optional[Iterable[int]] = None) -> list[int]:
        dom = range(1 << self.n) if domain is None else domain
        return [x for x in dom if self.table[x] == x]

    def is_fixed_point_free(self, domain: Optional[Iterable[int]] = None) -> bool:
        return not self.fixed_points(domain)

    def __repr__(self) -> str:
        return f"TamperFunction({self.name}, n={self.n})"


def bitflip_family(n: int) -> list[TamperFunction]:
    return [TamperFunction.bitflip(n, c) for c in range(1, 1 << n)]


def all_fixed_point_free(n: int) -> Iterator[TamperFunction]:
    """Every fixed-point-free table on n bits (use only for n <= 2)."""
    size = 1 << n
    choices = [[v for v in range(size) if v != x] for x in range(size)]
    for tab in itertools.product(*choices):
        yield TamperFunction(n, tab)


def collision_probability(
    ext: ExtFn,
    f: TamperFunction,
    x_dist: Distribution,
    y_dist: Distribution,
) -> Prob:
    """Exact ``Pr[ext(X,Y) = ext(f(X),Y)]`` for independent X, Y."""
    if f.n != x_dist.length:
        raise ValueError("tamper function width does not match the X source")
    fixed = f.fixed_points() if f.n <= 20 else f.fixed_points(a.value for a in x_dist.pmf)
    if fixed:
        raise ValueError(f"tamper function {f.name} has fixed point(s), e.g. {fixed[0]}")
    total: Prob = 0
    for x, px in x_dist.pmf.items():
        fx = f(x)
        for y, py in y_dist.pmf.items():
            if ext(x, y) == ext(fx, y):
                total += px * py
    return total


def collision_probability_table(table: Sequence[Sequence[int]], f: TamperFunction, xs: Sequence[int], ys: Sequence[int]) -> Fraction:
    """Collision probability for flat X on ``xs`` and Y on ``ys``, from an extractor table."""
    if not f.is_fixed_point_free():
        raise ValueError(f"tamper function {f.name} has fixed points")
    hits = sum(1 for x in xs for y in ys if table[x][y] == table[f.table[x]][y])
    return Fraction(hits, len(xs) * len(ys))


# --- helpers for tests and campaigns ----------------------------------------


def bits_distribution(samples: Iterable[BitString], length: int) -> Distribution:
    return Distribution.from_counts(length, Counter(samples))


def xor_test_bias(bits_by_seed: Sequence[int], subset_mask: int) -> Fraction:
    """``|Pr_seed[parity(bits & mask) = 0] - 1/2|`` over equiprobable seeds."""
    zeros = sum(1 for b in bits_by_seed if not bin(b & subset_mask).count("1") & 1)
    return abs(Fraction(zeros, len(bits_by_seed)) - Fraction(1, 2))
