"""Naive reference implementations used only by the tests.

These deliberately avoid the package's own arithmetic: polynomials are
lists of coefficients and field elements are reduced by long division.
"""

from fractions import Fraction
from itertools import product


def poly_mul_list(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] ^= x & y
    return out


def poly_divmod_list(a, m):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] ^= c
        while a and a[-1] == 0:
            a.pop()
    return a


def int_to_coeffs(v, t):
    return [(v >> j) & 1 for j in range(t)]


def coeffs_to_int(c):
    return sum(b << j for j, b in enumerate(c))


def gf_mul_naive(a, b, modulus, t):
    m = int_to_coeffs(modulus, t + 1)
    r = poly_divmod_list(poly_mul_list(int_to_coeffs(a, t), int_to_coeffs(b, t)), m)
    return coeffs_to_int(r)


def is_irreducible_naive(modulus, t):
    # no factor of degree 1..t//2, checked against every polynomial of that degree
    m = int_to_coeffs(modulus, t + 1)
    for d in range(1, t // 2 + 1):
        for low in range(1 << d):
            f = int_to_coeffs(low | (1 << d), d + 1)
            if not poly_divmod_list(m, f):
                return False
    return True


def sd(p: dict, q: dict) -> Fraction:
    keys = set(p) | set(q)
    return sum((abs(Fraction(p.get(k, 0)) - Fraction(q.get(k, 0))) for k in keys), Fraction(0)) / 2


def hamming(a: int, b: int) -> int:
    return bin(a ^ b).count("1")


def parity(v: int) -> int:
    return bin(v).count("1") & 1


def all_bitstrings(n):
    return [tuple(b) for b in product((0, 1), repeat=n)]
