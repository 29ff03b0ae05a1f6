"""Non-malleability compiler, its compositions, and desk-scale substitutes.

``compile(E, C)`` evaluates ``E(y, C(x, y[:n4]))``.  Given a non-malleable
``E`` and a strong collision-resistant ``C`` it is left and right strong
non-malleable with error ``3 tau + 3 dE + 2 dC + 2 sqrt(eps_col)`` whenever
the second source has min-entropy
``log(1/tau) + max(k4 + (n1 - n4), k1 + 2 n4)``.

All extractors here share one small interface, ``NmExtractor``: a callable
on two BitStrings plus a parameter bundle and flags.  Flags are claims; the
``nm_probe`` oracle measures them exhaustively at toy sizes.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .bitcore import BitString, field as gf
from .raz import RazParams, make_raz, raz_extract
from .statlab import (
    EnumerationCapError,
    _flat_supports,
    enumeration_cap,
    ext_table,
    flat_source_count,
    sampled_radius,
    sample_flat_supports,
)
from .trevisan import CrTreParams, TrevisanParams, crtre_extract, plan_crtre, tre_extract

Number = Union[int, float, Fraction]


# --- exact helpers -----------------------------------------------------------


def exact_log2(v: Number) -> Number:
    """log2 as an int when ``v`` is a power of two (as a Fraction), else float."""
    f = Fraction(v)
    if f > 0:
        n, d = f.numerator, f.denominator
        if n & (n - 1) == 0 and d & (d - 1) == 0:
            return (n.bit_length() - 1) - (d.bit_length() - 1)
    return math.log2(v)


def exact_sqrt(v: Number) -> Number:
    f = Fraction(v)
    if f >= 0:
        rn, rd = math.isqrt(f.numerator), math.isqrt(f.denominator)
        if rn * rn == f.numerator and rd * rd == f.denominator:
            return Fraction(rn, rd)
    return math.sqrt(v)


def compile_error(tau: Number, delta_E: Number, delta_C: Number, eps_collision: Number) -> Number:
    """``3 tau + 3 dE + 2 dC + 2 sqrt(eps_col)``, exact for dyadic inputs with square eps_col."""
    root = exact_sqrt(eps_collision)
    if isinstance(root, Fraction) and all(isinstance(v, (int, Fraction)) for v in (tau, delta_E, delta_C)):
        return 3 * Fraction(tau) + 3 * Fraction(delta_E) + 2 * Fraction(delta_C) + 2 * root
    return 3 * float(tau) + 3 * float(delta_E) + 2 * float(delta_C) + 2 * float(root)


def compile_entropy(tau: Number, k4: Number, n1: int, n4: int, k1: Number) -> Number:
    """``log(1/tau) + max(k4 + (n1 - n4), k1 + 2 n4)``."""
    return exact_log2(1 / Fraction(tau)) + max(k4 + (n1 - n4), k1 + 2 * n4)


def _num(v):
    """JSON-friendly number: Fractions become strings."""
    return str(v) if isinstance(v, Fraction) else v


def _unnum(v):
    return Fraction(v) if isinstance(v, str) else v


# --- the shared interface ----------------------------------------------------


@dataclass(frozen=True)
class ExtractorParams:
    """(n1, k1), (n2, k2) -> m with error eps; eps_collision for C-side extractors."""

    n1: int
    k1: Number
    n2: int
    k2: Number
    m: int
    eps: Number
    eps_collision: Optional[Number] = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("output length must be >= 1")
        if not (0 <= self.k1 <= self.n1 and 0 <= self.k2 <= self.n2):
            raise ValueError(f"entropies must satisfy 0 <= k <= n: {self}")

    def to_dict(self) -> dict:
        d = {k: _num(getattr(self, k)) for k in ("n1", "k1", "n2", "k2", "m", "eps", "eps_collision")}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ExtractorParams:
        return cls(d["n1"], _unnum(d["k1"]), d["n2"], _unnum(d["k2"]), d["m"], _unnum(d["eps"]), _unnum(d.get("eps_collision")))


class NmExtractor:
    """Two-source extractor handle: ``ext(x, y) -> BitString(m)`` plus claims."""

    def __init__(
        self,
        name: str,
        params: ExtractorParams,
        fn: Callable[[BitString, BitString], BitString],
        *,
        left_strong: bool = False,
        right_strong: bool = False,
        non_malleable: bool = False,
        in_regime: bool = True,
        meta: Optional[dict] = None,
    ):
        self.name = name
        self.params = params
        self._fn = fn
        self.left_strong = left_strong
        self.right_strong = right_strong
        self.non_malleable = non_malleable
        self.in_regime = in_regime
        self.meta = dict(meta or {})

    def extract(self, x: BitString, y: BitString) -> BitString:
        p = self.params
        if len(x) != p.n1 or len(y) != p.n2:
            raise ValueError(f"{self.name}: inputs must have lengths ({p.n1}, {p.n2}), got ({len(x)}, {len(y)})")
        out = self._fn(x, y)
        if len(out) != p.m:
            raise RuntimeError(f"{self.name}: produced {len(out)} bits, expected {p.m}")
        return out

    __call__ = extract

    def flags(self) -> dict:
        return {
            "left_strong": self.left_strong,
            "right_strong": self.right_strong,
            "non_malleable": self.non_malleable,
            "in_regime": self.in_regime,
        }

    def describe(self) -> dict:
        return {"name": self.name, "params": self.params.to_dict(), "flags": self.flags()}

    def table(self) -> list[list[int]]:
        return ext_table(self.extract, self.params.n1, self.params.n2)

    def __repr__(self) -> str:
        p = self.params
        return f"NmExtractor({self.name}: ({p.n1},{p.k1}) x ({p.n2},{p.k2}) -> {p.m}, eps={p.eps})"


def table_extractor(name: str, table: Sequence[Sequence[int]], n1: int, n2: int, m: int, *, k1=None, k2=None, eps: Number = 1, **flags) -> NmExtractor:
    tab = tuple(tuple(int(v) for v in row) for row in table)

    def fn(x: BitString, y: BitString) -> BitString:
        return BitString(m, tab[x.value][y.value])

    p = ExtractorParams(n1, n1 if k1 is None else k1, n2, n2 if k2 is None else k2, m, eps)
    ext = NmExtractor(name, p, fn, **flags)
    ext.meta["table"] = tab
    return ext


# --- adapters for the concrete extractors -------------------------------------


def tre_iface(p: TrevisanParams) -> NmExtractor:
    ep = ExtractorParams(p.n, p.k, p.d, p.d, p.m, p.epsilon)
    return NmExtractor("tre", ep, lambda x, z: tre_extract(p, x, z), right_strong=True, meta={"params": p.to_dict()})


def crtre_iface(p: CrTreParams) -> NmExtractor:
    """crTre as a C-side extractor; its error is taken as eps_T."""
    ep = ExtractorParams(p.n, p.base.k, p.seed_len, p.seed_len, p.out_len, p.eps_T, p.eps_collision)
    return NmExtractor(
        "crtre",
        ep,
        lambda x, z: crtre_extract(p, x, z),
        right_strong=True,
        in_regime=p.residual_ok,
        meta={"params": p.to_dict()},
    )


def raz_iface(p: RazParams) -> NmExtractor:
    """Raz with its in-regime guarantees eps = 2^(-3m/2), collision 2^(-m+1)."""
    ep = ExtractorParams(p.n1, p.k1, p.n2, p.k2, p.m, 2.0 ** (-1.5 * p.m), 2.0 ** (1 - p.m))
    return NmExtractor(
        "raz",
        ep,
        lambda x, y: raz_extract(p, x, y),
        left_strong=True,
        right_strong=True,
        in_regime=p.in_regime,
        meta={"params": p.to_dict()},
    )


def ip_substitute(n1: int, n2: int, m: int, *, k1=None, k2=None) -> NmExtractor:
    """Plumbing stand-in for an NM extractor; not non-malleable.

    ``y`` is cut into n2-bit symbols y_0, y_1, ... (zero padded) and the
    output is the leading m bits of ``sum_i y_i c^(i+1)`` over GF(2^n2),
    an inner product of y with the powers of ``c``.
    """
    if not 1 <= m <= n2:
        raise ValueError("need 1 <= m <= n2")
    f = gf(n2)
    L = -(-n1 // n2)
    pad = L * n2 - n1

    def fn(y: BitString, c: BitString) -> BitString:
        v = y.value << pad
        acc = 0
        p = c.value
        for i in range(L):
            sym = (v >> (n2 * (L - 1 - i))) & ((1 << n2) - 1)
            acc ^= f.mul_int(sym, p)
            p = f.mul_int(p, c.value)
        return BitString(m, acc >> (n2 - m))

    eps = Fraction(L, 1 << n2) * (1 << m)
    ep = ExtractorParams(n1, n1 if k1 is None else k1, n2, n2 if k2 is None else k2, m, min(Fraction(1), eps))
    return NmExtractor("ip-substitute", ep, fn, right_strong=True, non_malleable=False, in_regime=False)


# --- the compiler --------------------------------------------------------------


def _pred(name: str, lhs, op: str, rhs) -> dict:
    ok = {">=": lhs >= rhs, "<=": lhs <= rhs, "<": lhs < rhs, "==": lhs == rhs, ">": lhs > rhs}[op]
    return {"predicate": name, "lhs": _num(lhs), "rhs": _num(rhs), "satisfied": bool(ok)}


@dataclass(frozen=True)
class CompileParams:
    """Outer E: (n1,k1),(n2,k2) -> m, dE.  Inner C: (n3,k3),(n4,k4) -> n2, dC, eps_col."""

    outer: ExtractorParams
    inner: ExtractorParams
    n4: int
    tau: Number
    k1_star: Optional[Number] = None
    k2_star: Optional[Number] = None

    @property
    def k1_required(self) -> Number:
        return self.inner.k1

    @property
    def k2_required(self) -> Number:
        return compile_entropy(self.tau, self.inner.k2, self.outer.n1, self.n4, self.outer.k1)

    @property
    def k1(self) -> Number:
        return self.k1_required if self.k1_star is None else self.k1_star

    @property
    def k2(self) -> Number:
        return self.k2_required if self.k2_star is None else self.k2_star

    @property
    def eps(self) -> Number:
        col = self.inner.eps_collision if self.inner.eps_collision is not None else 1
        return compile_error(self.tau, self.outer.eps, self.inner.eps, col)

    def report(self) -> list[dict]:
        o, i = self.outer, self.inner
        rows = [
            _pred("k1* >= k3", self.k1, ">=", i.k1),
            _pred("k2* >= log(1/tau) + max(k4 + (n1 - n4), k1 + 2 n4)", self.k2, ">=", self.k2_required),
            _pred("n4 < n1", self.n4, "<", o.n1),
            _pred("C output length = n2", i.m, "==", o.n2),
            _pred("C seed length = n4", i.n2, "==", self.n4),
            _pred("k2* <= n1", self.k2, "<=", o.n1),
            _pred("tau > 0", self.tau, ">", 0),
        ]
        if i.eps_collision is None:
            rows.append({"predicate": "C has a collision bound", "lhs": None, "rhs": None, "satisfied": False})
        return rows

    def derived(self) -> dict:
        return {"k1*": _num(self.k1), "k2*": _num(self.k2), "eps*": _num(self.eps)}

    def to_dict(self) -> dict:
        return {
            "outer": self.outer.to_dict(),
            "inner": self.inner.to_dict(),
            "n4": self.n4,
            "tau": _num(self.tau),
            "k1_star": _num(self.k1_star),
            "k2_star": _num(self.k2_star),
            "derived": self.derived(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> CompileParams:
        return cls(
            ExtractorParams.from_dict(d["outer"]),
            ExtractorParams.from_dict(d["inner"]),
            d["n4"],
            _unnum(d["tau"]),
            _unnum(d.get("k1_star")),
            _unnum(d.get("k2_star")),
        )


def default_tau(delta_E: Number, delta_C: Number) -> Number:
    return delta_E + delta_C


def compile(
    outer: NmExtractor,
    inner: NmExtractor,
    n4: Optional[int] = None,
    tau: Optional[Number] = None,
    *,
    k1_star: Optional[Number] = None,
    k2_star: Optional[Number] = None,
) -> NmExtractor:
    """``2NMExt(x, y) = outer(y, inner(x, y[:n4]))`` with the derived parameters.

    Raises ValueError on interface length mismatches; entropy shortfalls are
    reported in ``meta['report']`` and clear ``in_regime``.
    """
    o, i = outer.params, inner.params
    n4 = i.n2 if n4 is None else n4
    if i.m != o.n2:
        raise ValueError(f"inner output length {i.m} differs from outer second-source length {o.n2}")
    if i.n2 != n4:
        raise ValueError(f"inner seed length {i.n2} differs from n4={n4}")
    if not n4 < o.n1:
        raise ValueError(f"need n4 < n1, got n4={n4}, n1={o.n1}")
    tau = default_tau(o.eps, i.eps) if tau is None else tau
    cp = CompileParams(o, i, n4, tau, k1_star, k2_star)
    report = cp.report()
    ok = all(r["satisfied"] for r in report)

    def fn(x: BitString, y: BitString) -> BitString:
        return outer.extract(y, inner.extract(x, y[:n4]))

    k2 = min(cp.k2, o.n1) if not ok else cp.k2
    ep = ExtractorParams(i.n1, cp.k1, o.n1, max(0, k2), o.m, cp.eps)
    return NmExtractor(
        f"compile({outer.name},{inner.name})",
        ep,
        fn,
        left_strong=True,
        right_strong=True,
        non_malleable=outer.non_malleable and i.eps_collision is not None,
        in_regime=ok and outer.in_regime and inner.in_regime,
        meta={"recipe": {"outer": outer.name, "inner": inner.name, **cp.to_dict()}, "report": report, "compile": cp},
    )


# --- compositions --------------------------------------------------------------


def fnm_compose(
    nx: int,
    kx: float,
    eps_T: float,
    inner_nm: Union[NmExtractor, Callable[[int, int], NmExtractor]],
    *,
    d: Optional[int] = None,
    gamma: float = 0.1,
    eps_collision: Optional[float] = None,
    tau: Optional[Number] = None,
    seed_constant: float = 64.0,
    relaxed: bool = False,
) -> NmExtractor:
    """``FNMExt(X, Y_l o Y_r) = Li(Y, crTre(X, Y_l))`` with ``|Y_l| = s``, ``|Y_r| = d``.

    ``inner_nm`` is either a ready extractor with ``n1 = s + d`` and
    ``n2 = d`` or a factory called as ``inner_nm(s + d, d)``.
    """
    if isinstance(inner_nm, NmExtractor):
        d = inner_nm.params.n2 if d is None else d
    elif d is None:
        raise ValueError("give d when inner_nm is a factory")
    cr = plan_crtre(nx, kx, d + truncation_for(eps_T, eps_collision) // 5, eps_T, eps_collision)
    s = cr.seed_len
    if cr.out_len != d:
        raise RuntimeError("crTre output length does not match d")
    li = inner_nm if isinstance(inner_nm, NmExtractor) else inner_nm(s + d, d)
    if li.params.n1 != s + d or li.params.n2 != d:
        raise ValueError(f"inner NM extractor must be ({s + d}, .) x ({d}, .), got ({li.params.n1}, {li.params.n2})")
    c = crtre_iface(cr)
    if relaxed:
        # entropy s + d - 1 costs a factor 2 on the crTre error and collision bound
        c.params = replace(c.params, k2=s - 1, eps=2 * c.params.eps, eps_collision=2 * c.params.eps_collision)
    out = compile(li, c, s, tau)
    li_k = li.params.k1
    k2_star = s + d - (1 if relaxed else 0)
    rows = [
        _pred("k2* = d + s >= (gamma/2) d + (1 - gamma) d + 2 s" if not relaxed else "k2* = s + d - 1 >= (gamma/2) d + (1 - gamma) d + 2 s - 1",
              k2_star, ">=", gamma / 2 * d + (1 - gamma) * d + 2 * s - (1 if relaxed else 0)),
        _pred("s <= c log^2(nx) log^2(1/eps_T)", s, "<=", seed_constant * max(1.0, math.log2(nx)) ** 2 * math.log2(1 / eps_T) ** 2),
        _pred("d < kx", d, "<", kx),
        _pred("Li first-source entropy (1-gamma)(s+d) <= k2*", li_k, "<=", k2_star),
    ]
    bound = (12 if relaxed else 10) * eps_T
    out.name = "fnm"
    out.meta.update(
        {
            "s": s,
            "d": d,
            "eps_T": eps_T,
            "fnm_bound": bound,
            "fnm_report": rows,
            "crtre": cr.to_dict(),
            "inner_nm": li.describe(),
        }
    )
    out.in_regime = out.in_regime and all(r["satisfied"] for r in rows) and li.non_malleable
    return out


def truncation_for(eps_T: float, eps_collision: Optional[float]) -> int:
    from .trevisan import truncation_amount

    return truncation_amount(eps_T * eps_T if eps_collision is None else eps_collision)


def nmraz_split(ny: int, gamma: float) -> tuple[int, int]:
    """``n_l = floor((2/5 - gamma) n_y)`` and ``n_r = n_y - n_l``."""
    nl = math.floor((0.4 - gamma) * ny + 1e-9)
    return nl, ny - nl


def nmraz_report(nx: int, kx: float, ny: int, ky: float, gamma: float) -> list[dict]:
    lg = lambda v: math.log2(v) if v > 1 else 0.0  # noqa: E731
    return [
        _pred("k_x >= 12 log(n_y - k_y) + 15", kx, ">=", 12 * lg(ny - ky) + 15),
        _pred("n_y >= 30 log(n_y) + 10 log(n_x) + 20", ny, ">=", 30 * lg(ny) + 10 * lg(nx) + 20),
        _pred("k_y >= (4/5 + gamma) n_y + 3 log(n_y) + log(n_x) + 4", ky, ">=", (0.8 + gamma) * ny + 3 * lg(ny) + lg(nx) + 4),
        _pred("0 < gamma", gamma, ">", 0),
        _pred("gamma < 2/5", gamma, "<", 0.4),
    ]


def nmraz_bound(ny: int, gamma: float, eps_T: float) -> float:
    return 3 * 2.0 ** (-0.9 * gamma * ny) + 40 * eps_T


def nmraz_compose(nx: int, kx: float, ny: int, ky: float, gamma: float, fnm: NmExtractor, *, tau: Optional[Number] = None) -> NmExtractor:
    """``nmRaz(X, Y_l o Y_r) = FNMExt(Y, Raz(X, Y_l))``."""
    nl, nr = nmraz_split(ny, gamma)
    if fnm.params.n1 != ny:
        raise ValueError(f"FNM source length {fnm.params.n1} differs from n_y={ny}")
    d = fnm.params.n2
    kl = max(0.0, min(nl, ky - nr))
    rz = make_raz(nx, nl, d, k1=kx, k2=kl, delta=gamma)
    c = raz_iface(rz)
    out = compile(fnm, c, nl, tau)
    rows = nmraz_report(nx, kx, ny, ky, gamma)
    eps_T = fnm.meta.get("eps_T", fnm.params.eps)
    out.name = "nmraz"
    out.meta.update({"n_l": nl, "n_r": nr, "nmraz_report": rows, "nmraz_bound": nmraz_bound(ny, gamma, eps_T), "raz": rz.to_dict()})
    out.in_regime = out.in_regime and all(r["satisfied"] for r in rows)
    return out


def rate_half_compose(nm: NmExtractor, sext: NmExtractor) -> NmExtractor:
    """``SExt(X, NM(X, Y))``: error eps1 + eps2; never advertised as strong."""
    p, q = nm.params, sext.params
    if q.n1 != p.n1:
        raise ValueError(f"seeded extractor source length {q.n1} differs from {p.n1}")
    if q.n2 != p.m:
        raise ValueError(f"seeded extractor seed length {q.n2} differs from NM output length {p.m}")

    def fn(x: BitString, y: BitString) -> BitString:
        return sext.extract(x, nm.extract(x, y))

    eps = p.eps + q.eps
    ep = ExtractorParams(p.n1, p.k1, p.n2, p.k2, q.m, eps)
    rows = [_pred("l < k1/2", q.m, "<", p.k1 / 2)]
    return NmExtractor(
        f"rate-half({nm.name},{sext.name})",
        ep,
        fn,
        left_strong=False,
        right_strong=False,
        non_malleable=nm.non_malleable,
        in_regime=nm.in_regime and sext.in_regime and rows[0]["satisfied"],
        meta={"report": rows, "rate": q.m / (p.k1 + p.k2) if p.k1 + p.k2 else 0.0},
    )


# --- exhaustive non-malleability measurement -----------------------------------


MODES = ("plain", "left", "right")
_SIGN_CAP = 1 << 16


def _sign_matrix(K: int) -> np.ndarray:
    return np.array(list(itertools.product((1, -1), repeat=K)), dtype=np.int64)


def _option_vectors(T: np.ndarray, xs: np.ndarray, ys: np.ndarray, fx: np.ndarray, M: int, mode: str) -> np.ndarray:
    """Scaled signed counts ``a[F, y, y', k]`` with ``SD = |sum_y a|_1 / (2 N M)``.

    ``fx`` has shape (F, X): the tampered value of each support point under
    each candidate f.  Coordinates k index (o, o') in plain/right mode and
    (x, o, o') in left mode.
    """
    F, X = fx.shape
    Yp = T.shape[1]
    o = T[np.ix_(xs, ys)]  # (X, Y)
    op = T[fx]  # (F, X, Y')
    pair = o[None, :, :, None] * M + op[:, :, None, :]  # (F, X, Y, Y')
    K = M * M
    if mode == "left":
        pair = pair + (np.arange(X) * K)[None, :, None, None]
        K = K * X
    Y = len(ys)
    base = ((np.arange(F)[:, None, None, None] * Y + np.arange(Y)[None, None, :, None]) * Yp + np.arange(Yp)[None, None, None, :]) * K
    flat = np.bincount((base + pair).ravel(), minlength=F * Y * Yp * K)
    onehot = flat.reshape(F, Y, Yp, K)
    c = onehot.reshape(F, len(ys), Yp, -1, M, M)  # (..., blocks, o, o')
    marg = c.sum(axis=4, keepdims=True)
    a = M * c - marg
    return a.reshape(F, len(ys), Yp, K)


def _worst_plain(a: np.ndarray, ys: np.ndarray, g_fpf: bool, signs: np.ndarray) -> int:
    """max over f (axis 0) and g of ``|sum_y a[f, y, g(y)]|_1``."""
    vals = np.einsum("sk,fyzk->fsyz", signs, a)
    if g_fpf:
        vals[:, :, np.arange(len(ys)), ys] = np.iinfo(np.int64).min // 4
    return int(vals.max(axis=3).sum(axis=2).max())


def _worst_right(a: np.ndarray, ys: np.ndarray, g_fpf: bool) -> int:
    """Right-strong: per-y terms are independent, each maximized over g(y)."""
    per = np.abs(a).sum(axis=3)  # (F, Y, Y')
    if g_fpf:
        per[:, np.arange(len(ys)), ys] = -1
    return int(per.max(axis=2).sum(axis=1).max())


def nm_error_pair(T: np.ndarray, xs: Sequence[int], ys: Sequence[int], m: int, mode: str = "plain") -> Fraction:
    """Exact worst NM error for flat X on ``xs`` and Y on ``ys`` over all tamperings.

    f ranges over all maps supp(X) -> {0,1}^n1 and g over supp(Y) -> {0,1}^n2,
    with at least one of them fixed-point free on its support.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    T = np.asarray(T, dtype=np.int64)
    xs, ys = np.asarray(xs), np.asarray(ys)
    X, Y = len(xs), len(ys)
    Xp = T.shape[0]
    M = 1 << m
    count = Xp ** X
    if 2 * count > enumeration_cap():
        raise EnumerationCapError(f"{count} tamper tables for f exceed the cap")
    K = M * M * (X if mode == "left" else 1)
    signs = None
    if mode != "right":
        if K > 16:
            raise EnumerationCapError(f"sign enumeration over {K} coordinates exceeds the cap")
        signs = _sign_matrix(K)
    S = 1 if signs is None else len(signs)
    f_batch = max(1, (1 << 22) // (S * Y * T.shape[1] * max(X, K)))
    best = 0
    for g_fpf in (False, True):
        choices = [[v for v in range(Xp) if v != x] if not g_fpf else list(range(Xp)) for x in xs]
        it = itertools.product(*choices)
        while True:
            chunk = list(itertools.islice(it, f_batch))
            if not chunk:
                break
            a = _option_vectors(T, xs, ys, np.array(chunk, dtype=np.int64), M, mode)
            if mode == "right":
                best = max(best, _worst_right(a, ys, g_fpf))
            else:
                best = max(best, _worst_plain(a, ys, g_fpf, signs))
    # plain: |sum_y a|_1 / (2 N M); right and left average per-y / per-x
    # distances, which gives the same normalisation
    return Fraction(best, 2 * X * Y * M)


def _tamper_pairs_error(T: np.ndarray, xs, ys, m: int, pairs, mode: str) -> Fraction:
    """NM error with explicit (f, g) pairs; a list of pairs conditions on all tamperings."""
    from collections import Counter

    M = 1 << m
    N = len(xs) * len(ys)
    group = list(pairs) if isinstance(pairs, (list, tuple)) and pairs and isinstance(pairs[0], (list, tuple)) else [pairs]
    cnt = Counter()
    for x in xs:
        for y in ys:
            cond = tuple(int(T[f.table[x]][g.table[y]]) for f, g in group)
            side = x if mode == "left" else (y if mode == "right" else None)
            cnt[(int(T[x][y]), cond, side)] += 1
    marg = Counter()
    for (o, cond, side), c in cnt.items():
        marg[(cond, side)] += c
    total = 0
    for (cond, side), cm in marg.items():
        for o in range(M):
            total += abs(M * cnt.get((o, cond, side), 0) - cm)
    return Fraction(total, 2 * N * M)


@dataclass
class ProbeReport:
    value: Fraction
    mode: str
    argmax: Optional[tuple] = None
    pairs: int = 0
    sampled: bool = False
    radius: Optional[float] = None

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        return {"value": float(self.value), "exact": str(self.value), "mode": self.mode, "pairs": self.pairs, "sampled": self.sampled, "radius": self.radius}


def _source_pairs(p: ExtractorParams, sources, samples: Optional[int], rng_seed: int):
    if sources is not None and sources != "flat":
        return list(sources), False
    cap = enumeration_cap()
    total = flat_source_count(p.n1, int(p.k1)) * flat_source_count(p.n2, int(p.k2))
    if total <= cap:
        lx = list(_flat_supports(p.n1, int(p.k1), cap))
        ly = list(_flat_supports(p.n2, int(p.k2), cap))
        return [(a, b) for a in lx for b in ly], False
    if samples is None:
        raise EnumerationCapError(f"{total} source pairs exceed the cap; pass samples=")
    import random

    rng = random.Random(rng_seed)
    return list(zip(sample_flat_supports(p.n1, int(p.k1), samples, rng), sample_flat_supports(p.n2, int(p.k2), samples, rng))), True


def nm_probe(
    cand: NmExtractor,
    tamper_family="all",
    source_family="flat",
    *,
    mode: str = "plain",
    samples: Optional[int] = None,
    rng_seed: int = 0,
    table=None,
) -> ProbeReport:
    """Measured NM error of ``cand``: max over sources and tamperings.

    ``tamper_family='all'`` is exhaustive over table tamper functions with at
    least one side fixed-point free; otherwise it is an iterable whose items
    are (f, g) TamperFunction pairs or lists of such pairs.
    """
    p = cand.params
    T = np.asarray(table if table is not None else cand.table(), dtype=np.int64)
    pairs, sampled = _source_pairs(p, source_family, samples, rng_seed)
    fams = None if tamper_family == "all" else list(tamper_family)
    if fams is not None:
        for item in fams:
            group = item if isinstance(item[0], (list, tuple)) else [item]
            for f, g in group:
                if f.is_fixed_point_free() is False and g.is_fixed_point_free() is False:
                    raise ValueError(f"tamper pair ({f.name}, {g.name}) has fixed points on both sides")
    best, arg = Fraction(-1), None
    for xs, ys in pairs:
        if fams is None:
            e = nm_error_pair(T, xs, ys, p.m, mode)
        else:
            e = max(_tamper_pairs_error(T, xs, ys, p.m, item, mode) for item in fams)
        if e > best:
            best, arg = e, (tuple(xs), tuple(ys))
    return ProbeReport(best, mode, arg, len(pairs), sampled, sampled_radius(len(pairs)) if sampled else None)


# --- extractor and collision measurements for the compiler shadow ----------------


def measured_ext_error(ext: NmExtractor, strong_side: str = "right", table=None) -> Fraction:
    """Exhaustive worst error over flat sources at the declared entropies."""
    from .statlab import worst_case_ext_error

    p = ext.params
    tab = table if table is not None else ext.table()
    return worst_case_ext_error(ext.extract, p.n1, int(p.k1), p.n2, int(p.k2), p.m, strong_side, table=tab).value


def measured_collision(ext: NmExtractor, table=None) -> Fraction:
    """Max over flat sources and fixed-point-free f of ``Pr[C(X,Z) = C(f(X),Z)]``.

    For fixed sources the worst f picks, for each x, the x' != x with most
    agreement, so the maximum is a per-x maximum averaged over supp(X).
    """
    p = ext.params
    T = np.asarray(table if table is not None else ext.table(), dtype=np.int64)
    best = Fraction(-1)
    for zs in _flat_supports(p.n2, int(p.k2)):
        sub = T[:, list(zs)]  # (X', Z)
        agree = (sub[:, None, :] == sub[None, :, :]).sum(axis=2)  # (X, X')
        np.fill_diagonal(agree, -1)
        per_x = agree.max(axis=1)
        for xs in _flat_supports(p.n1, int(p.k1)):
            val = Fraction(int(per_x[list(xs)].sum()), len(xs) * len(zs))
            best = max(best, val)
    return best


# --- brute-force NM substitute ---------------------------------------------------


def bruteforce_nm_substitute(
    n: int,
    k1: int,
    k2: int,
    m: int,
    trials: int,
    rng_seed: int = 0,
    *,
    n2: Optional[int] = None,
    target_eps: Optional[Number] = None,
    mode: str = "plain",
) -> NmExtractor:
    """Random-table search for a small two-source NM extractor.

    Each candidate is measured exactly with ``nm_probe`` over all flat
    sources and all table tamperings.  The best measured table wins (ties go
    to the lexicographically smallest table); the search stops early once
    ``target_eps`` is met.
    """
    n1 = n
    n2 = n if n2 is None else n2
    if n1 > 5 or n2 > 5:
        raise ValueError("brute-force substitute limited to n <= 5")
    rng = np.random.default_rng(rng_seed)
    best = None
    best_eps = None
    used = 0
    for _ in range(trials):
        used += 1
        tab = rng.integers(0, 1 << m, size=(1 << n1, 1 << n2), dtype=np.int64)
        cand = table_extractor("bf", tab, n1, n2, m, k1=k1, k2=k2)
        eps = nm_probe(cand, mode=mode, table=tab).value
        key = (eps, tuple(tab.ravel().tolist()))
        if best is None or key < (best_eps, tuple(best.ravel().tolist())):
            best, best_eps = tab, eps
        if target_eps is not None and best_eps <= target_eps:
            break
    out = table_extractor(
        "bruteforce-nm",
        best,
        n1,
        n2,
        m,
        k1=k1,
        k2=k2,
        eps=best_eps,
        non_malleable=True,
        left_strong=mode == "left",
        right_strong=mode == "right",
    )
    out.meta.update({"trials_used": used, "rng_seed": rng_seed, "mode": mode, "target_eps": _num(target_eps)})
    if target_eps is not None and best_eps > target_eps:
        msg = f"no candidate reached eps <= {target_eps} in {trials} trials; best measured {best_eps}"
        out.meta["warning"] = msg
        warnings.warn(msg)
    return out
