"""Bit strings and GF(2^t) arithmetic.

Bit order convention, used everywhere in the package: index 0 of a
``BitString`` is its leftmost bit, which is also the most significant bit
of ``int(bs)`` and of the hex encoding.  Prefixes ``bs[:i]`` are therefore
the first ``i`` bits read left to right.

Field elements store their polynomial as an int whose bit ``j`` is the
coefficient of ``x^j``.  When a field element is built from a BitString,
position ``j`` of the BitString is the coefficient of ``x^j`` (so
``coeffs[0]`` is the constant term).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

__all__ = [
    "BitString",
    "concat",
    "FieldSpec",
    "FieldElement",
    "field",
    "gf_mul",
    "gf_pow",
    "gf_add",
    "gf_inv",
    "parity",
    "clmul",
    "poly_mod",
    "IRREDUCIBLE_LOW",
]


def parity(v: int) -> int:
    return bin(v).count("1") & 1


@dataclass(frozen=True, order=True)
class BitString:
    """Immutable finite bit sequence; ``value`` holds the bits MSB-first."""

    length: int
    value: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("negative length")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value {self.value} does not fit in {self.length} bits")

    # constructors

    @classmethod
    def from_int(cls, value: int, length: int) -> BitString:
        return cls(length, value)

    @classmethod
    def from_bits(cls, bits: Union[str, Iterable[int]]) -> BitString:
        if isinstance(bits, str):
            if bits and set(bits) - {"0", "1"}:
                raise ValueError(f"not a bit string: {bits!r}")
            return cls(len(bits), int(bits, 2) if bits else 0)
        v = 0
        n = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bit must be 0 or 1, got {b!r}")
            v = (v << 1) | b
            n += 1
        return cls(n, v)

    @classmethod
    def zeros(cls, length: int) -> BitString:
        return cls(length, 0)

    @classmethod
    def ones(cls, length: int) -> BitString:
        return cls(length, (1 << length) - 1)

    @classmethod
    def from_hex(cls, text: str) -> BitString:
        """Parse ``"len:hex"`` (or bare hex, meaning 4 bits per digit)."""
        text = text.strip()
        if ":" in text:
            n_txt, h = text.split(":", 1)
            if not n_txt.isdigit():
                raise ValueError(f"malformed length field in {text!r}")
            n = int(n_txt)
        else:
            h = text
            n = 4 * len(h)
        if not re.fullmatch(r"[0-9a-fA-F]*", h):
            raise ValueError(f"malformed hex {text!r}")
        if len(h) != (n + 3) // 4:
            raise ValueError(f"{len(h)} hex digits cannot hold exactly {n} bits")
        raw = int(h, 16) if h else 0
        pad = 4 * len(h) - n
        if raw & ((1 << pad) - 1):
            raise ValueError(f"nonzero padding bits in {text!r}")
        return cls(n, raw >> pad)

    # encodings

    def to_hex(self) -> str:
        """``"len:hex"``; the bits are left-aligned and zero-padded to a nibble."""
        digits = (self.length + 3) // 4
        pad = 4 * digits - self.length
        h = format(self.value << pad, f"0{digits}x") if digits else ""
        return f"{self.length}:{h}"

    def to_bits(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""

    def __str__(self) -> str:
        return self.to_bits()

    def __repr__(self) -> str:
        return f"BitString({self.to_bits()!r})"

    # sequence protocol

    def __len__(self) -> int:
        return self.length

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __iter__(self) -> Iterator[int]:
        for i in range(self.length):
            yield (self.value >> (self.length - 1 - i)) & 1

    def __getitem__(self, key):
        if isinstance(key, slice):
            start, stop, step = key.indices(self.length)
            if step != 1:
                return BitString.from_bits(list(self)[key])
            return self.slice(start, max(start, stop))
        i = key + self.length if key < 0 else key
        if not 0 <= i < self.length:
            raise IndexError("bit index out of range")
        return (self.value >> (self.length - 1 - i)) & 1

    def slice(self, i: int, j: int) -> BitString:
        """Bits ``i..j-1``; requires ``0 <= i <= j <= len``."""
        if not 0 <= i <= j <= self.length:
            raise ValueError(f"bad slice [{i}:{j}] of length {self.length}")
        width = j - i
        return BitString(width, (self.value >> (self.length - j)) & ((1 << width) - 1))

    def __add__(self, other: BitString) -> BitString:
        return concat(self, other)

    def __xor__(self, other: BitString) -> BitString:
        if other.length != self.length:
            raise ValueError("xor of bit strings of different lengths")
        return BitString(self.length, self.value ^ other.value)

    def __and__(self, other: BitString) -> BitString:
        if other.length != self.length:
            raise ValueError("and of bit strings of different lengths")
        return BitString(self.length, self.value & other.value)

    def weight(self) -> int:
        return bin(self.value).count("1")

    def split(self, *widths: int) -> tuple[BitString, ...]:
        if sum(widths) != self.length:
            raise ValueError(f"widths {widths} do not sum to {self.length}")
        out = []
        pos = 0
        for w in widths:
            out.append(self.slice(pos, pos + w))
            pos += w
        return tuple(out)

    def restrict(self, positions: Iterable[int]) -> BitString:
        """The bits at ``positions``, in the given order."""
        v = 0
        n = 0
        for p in positions:
            v = (v << 1) | self[p]
            n += 1
        return BitString(n, v)


def concat(a: BitString, b: BitString) -> BitString:
    return BitString(a.length + b.length, (a.value << b.length) | b.value)


# --- GF(2)[x] helpers on int-encoded polynomials ---------------------------


def clmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def _poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _mulmod(a: int, b: int, m: int, t: int) -> int:
    top = 1 << t
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= m
    return r


def _irreducible_trial(poly: int) -> bool:
    t = poly.bit_length() - 1
    for d in range(2, 1 << (t // 2 + 1)):
        if poly_mod(poly, d) == 0:
            return False
    return True


def _irreducible_rabin(poly: int) -> bool:
    t = poly.bit_length() - 1
    prime_factors = [q for q in range(2, t + 1) if t % q == 0 and all(q % r for r in range(2, q))]

    def x_pow_2k(k):
        x = 2 if t > 1 else poly_mod(2, poly)
        for _ in range(k):
            x = _mulmod(x, x, poly, t)
        return x

    if x_pow_2k(t) != poly_mod(2, poly):
        return False
    return all(_poly_gcd(poly, x_pow_2k(t // q) ^ 2) == 1 for q in prime_factors)


# Low-order part of the lexicographically first irreducible polynomial
# x^t + ... of each degree (t = 1 uses x + 1 so every modulus has constant 1).
IRREDUCIBLE_LOW = {
    1: 0x1, 2: 0x3, 3: 0x3, 4: 0x3, 5: 0x5, 6: 0x3,
    7: 0x3, 8: 0x1b, 9: 0x3, 10: 0x9, 11: 0x5, 12: 0x9,
    13: 0x1b, 14: 0x21, 15: 0x3, 16: 0x2b, 17: 0x9, 18: 0x9,
    19: 0x27, 20: 0x9, 21: 0x5, 22: 0x3, 23: 0x21, 24: 0x1b,
    25: 0x9, 26: 0x1b, 27: 0x27, 28: 0x3, 29: 0x5, 30: 0x3,
    31: 0x9, 32: 0x8d, 33: 0x4b, 34: 0x1b, 35: 0x5, 36: 0x35,
    37: 0x3f, 38: 0x63, 39: 0x11, 40: 0x39, 41: 0x9, 42: 0x27,
    43: 0x59, 44: 0x21, 45: 0x1b, 46: 0x3, 47: 0x21, 48: 0x2d,
    49: 0x71, 50: 0x1d, 51: 0x4b, 52: 0x9, 53: 0x47, 54: 0x7d,
    55: 0x47, 56: 0x95, 57: 0x11, 58: 0x63, 59: 0x7b, 60: 0x3,
    61: 0x27, 62: 0x69, 63: 0x3, 64: 0x1b,
}

MAX_FIELD_BITS = 64
_TRIAL_DIVISION_MAX_T = 16


@dataclass(frozen=True)
class FieldSpec:
    """GF(2^t) = GF(2)[x] / (irreducible).  ``irreducible`` includes the x^t term."""

    t: int
    irreducible: int

    def __post_init__(self):
        if not 1 <= self.t <= MAX_FIELD_BITS:
            raise ValueError(f"field exponent must be in 1..{MAX_FIELD_BITS}, got {self.t}")
        if self.irreducible.bit_length() != self.t + 1:
            raise ValueError("modulus degree does not match t")
        if not self.irreducible & 1:
            raise ValueError("modulus has zero constant term")
        check = _irreducible_trial if self.t <= _TRIAL_DIVISION_MAX_T else _irreducible_rabin
        if not check(self.irreducible):
            raise ValueError(f"x-polynomial {self.irreducible:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.t

    @property
    def zero(self) -> FieldElement:
        return FieldElement(0, self)

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, self)

    def __call__(self, value: Union[int, BitString]) -> FieldElement:
        if isinstance(value, BitString):
            return self.from_bits(value)
        return FieldElement(value, self)

    def from_bits(self, bs: BitString) -> FieldElement:
        """Position j of ``bs`` is the coefficient of x^j."""
        if len(bs) != self.t:
            raise ValueError(f"need {self.t} bits, got {len(bs)}")
        v = 0
        for j, b in enumerate(bs):
            v |= b << j
        return FieldElement(v, self)

    def elements(self) -> Iterator[FieldElement]:
        for v in range(self.order):
            yield FieldElement(v, self)

    def mul_int(self, a: int, b: int) -> int:
        return _mulmod(a, b, self.irreducible, self.t)

    def pow_int(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = _mulmod(r, a, self.irreducible, self.t)
            a = _mulmod(a, a, self.irreducible, self.t)
            e >>= 1
        return r


_FIELDS: dict[int, FieldSpec] = {}


def field(t: int) -> FieldSpec:
    """The package's standard GF(2^t), using the shipped modulus table."""
    f = _FIELDS.get(t)
    if f is None:
        if t not in IRREDUCIBLE_LOW:
            raise ValueError(f"no shipped modulus for t={t} (supported: 1..{MAX_FIELD_BITS})")
        f = _FIELDS[t] = FieldSpec(t, (1 << t) | IRREDUCIBLE_LOW[t])
    return f


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: FieldSpec

    def __post_init__(self):
        if not 0 <= self.value < self.field.order:
            raise ValueError(f"{self.value} is not an element of GF(2^{self.field.t})")

    @property
    def coeffs(self) -> BitString:
        """Coefficients low-to-high: position 0 is the constant term."""
        return BitString.from_bits([(self.value >> j) & 1 for j in range(self.field.t)])

    def _check(self, other: FieldElement):
        if other.field != self.field:
            raise ValueError("field elements from different fields")

    def __add__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.value ^ other.value, self.field)

    __sub__ = __add__

    def __mul__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.field.mul_int(self.value, other.value), self.field)

    def __pow__(self, e: int) -> FieldElement:
        if e < 0:
            return gf_inv(self) ** (-e)
        return FieldElement(self.field.pow_int(self.value, e), self.field)

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"GF(2^{self.field.t})({self.value:#x})"

    def dot(self, other: FieldElement) -> int:
        """GF(2) inner product of the coefficient vectors."""
        self._check(other)
        return parity(self.value & other.value)


def gf_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def gf_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def gf_pow(a: FieldElement, e: int) -> FieldElement:
    if e < 0:
        raise ValueError("negative exponent")
    return a ** e


def gf_inv(a: FieldElement) -> FieldElement:
    if not a:
        raise ZeroDivisionError("zero has no inverse")
    return FieldElement(a.field.pow_int(a.value, a.field.order - 2), a.field)


# --- vectorized powers via log tables (small fields only) --------------------

MAX_TABLE_BITS = 22


def _prime_factors(v: int) -> list[int]:
    out, p = [], 2
    while p * p <= v:
        if v % p == 0:
            out.append(p)
            while v % p == 0:
                v //= p
        p += 1
    if v > 1:
        out.append(v)
    return out


def primitive_element(t: int) -> int:
    """Smallest integer-encoded generator of GF(2^t)^*."""
    f = field(t)
    n = f.order - 1
    qs = _prime_factors(n)
    for g in range(2, f.order) if t > 1 else [1]:
        if all(f.pow_int(g, n // q) != 1 for q in qs):
            return g
    raise AssertionError("multiplicative group has no generator")


def _mul_const_vec(f: FieldSpec, c: int, arr):
    import numpy as np

    out = np.zeros_like(arr)
    for j in range(f.t):
        img = f.mul_int(c, 1 << j)
        if img:
            out ^= ((arr >> j) & 1) * arr.dtype.type(img)
    return out


_LOG_TABLES: dict = {}


def log_tables(t: int):
    """(exp, log) arrays for GF(2^t) with ``exp[i] = g^i``; ``log[0]`` is unused."""
    import numpy as np

    hit = _LOG_TABLES.get(t)
    if hit is not None:
        return hit
    if not 1 <= t <= MAX_TABLE_BITS:
        raise ValueError(f"log tables limited to t <= {MAX_TABLE_BITS}")
    f = field(t)
    n = f.order - 1
    g = primitive_element(t)
    block = min(n, 2048)
    head = np.empty(block, dtype=np.uint32)
    v = 1
    for i in range(block):
        head[i] = v
        v = f.mul_int(v, g)
    exp = np.empty(n, dtype=np.uint32)
    step = f.pow_int(g, block)
    c = 1
    for start in range(0, n, block):
        stop = min(n, start + block)
        exp[start:stop] = _mul_const_vec(f, c, head)[: stop - start]
        c = f.mul_int(c, step)
    log = np.zeros(f.order, dtype=np.uint32)
    log[exp] = np.arange(n, dtype=np.uint32)
    _LOG_TABLES[t] = (exp, log)
    return exp, log


def field_powers(t: int, bases, exponents):
    """``bases[i] ** exponents[j]`` as an int64 array of shape (len(bases), len(exponents))."""
    import numpy as np

    exp, log = log_tables(t)
    n = (1 << t) - 1
    b = np.atleast_1d(np.asarray(bases, dtype=np.int64))
    e = np.atleast_1d(np.asarray(exponents, dtype=np.int64))
    idx = (log[b].astype(np.int64)[:, None] * (e % n)[None, :]) % n
    out = exp[idx].astype(np.int64)
    zero = b == 0
    if zero.any():
        out[zero, :] = np.where(e == 0, 1, 0)[None, :]
    return out
