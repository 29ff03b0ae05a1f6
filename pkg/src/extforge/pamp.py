"""Privacy amplification against memory-tampering adversaries.

Six rounds between Alice ``(W, A1, A2)`` and Bob ``(W, B1, B2)``:

1. Alice sends A1.
2. Bob sends B1.  Both compute ``R = nm(A1 . B1', W)`` with their views.
3. Alice sends ``R[0:a]``; Bob compares with his own and aborts on mismatch.
4. Bob sends ``R[a:2a]``; Alice compares.
5. Alice sends ``A2 . MAC(A2, R[2a:3a])``; Bob verifies.
6. Bob sends ``B2 . MAC(B2, R[3a:4a])``; Alice verifies.

A party that accepts outputs ``SExt(W, A2 xor B2)`` with its own view of
the two halves.  An aborting party sends ``SILENT`` from then on and its
peer treats silence as a reason to abort.

Eve sits on the channel.  Before the first round she may rewrite one party's
memory with a function ``F(W, A) -> (W~, A~)``; afterwards she may replace
each message by another of the same length, or by silence.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .bitcore import BitString, field as gf
from .codes import CodeSpec, greedy_weak_design
from .nmcompile import NmExtractor, ExtractorParams, compile as nm_compile, ip_substitute, raz_iface
from .raz import make_raz
from .statlab import Distribution, stat_dist
from .trevisan import TrevisanParams, tre_extract

ROUNDS = 6
ALICE, BOB = "alice", "bob"


class _Silent:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "SILENT"


SILENT = _Silent()
Message = Union[BitString, _Silent]


class ProtocolViolation(RuntimeError):
    """Raised when a strategy breaks the round discipline."""


# --- one-time MAC ----------------------------------------------------------------


@dataclass(frozen=True)
class MacSpec:
    """Polynomial-evaluation MAC: key (a, b) in GF(2^delta)^2, tag = b + sum m_i a^i."""

    gamma: int
    delta: int

    def __post_init__(self):
        if self.gamma < 1 or self.delta < 1:
            raise ValueError("gamma and delta must be >= 1")

    @property
    def tau(self) -> int:
        return 2 * self.delta

    @property
    def symbols(self) -> int:
        return -(-self.gamma // self.delta)

    @property
    def mu(self) -> Fraction:
        """Forgery bound: a nonzero difference polynomial of degree <= symbols has that many roots."""
        return Fraction(self.symbols, 1 << self.delta)

    @property
    def mu_shape(self) -> Fraction:
        """``(gamma / delta) 2^-delta``; equals ``mu`` when delta divides gamma."""
        return Fraction(self.gamma, self.delta) / (1 << self.delta)

    def lemma_ok(self) -> bool:
        """delta <= log gamma + log(1/mu) and tau <= 2 delta."""
        return self.delta <= math.log2(self.gamma) - math.log2(self.mu) + 1e-12 and self.tau <= 2 * self.delta

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "delta": self.delta, "tau": self.tau, "mu": str(self.mu)}


def _mac_symbols(spec: MacSpec, msg: BitString) -> list[int]:
    pad = spec.symbols * spec.delta - spec.gamma
    v = msg.value << pad
    mask = (1 << spec.delta) - 1
    return [(v >> (spec.delta * (spec.symbols - 1 - i))) & mask for i in range(spec.symbols)]


def mac_tag(spec: MacSpec, key: BitString, msg: BitString) -> BitString:
    if len(key) != spec.tau:
        raise ValueError(f"MAC key must have {spec.tau} bits, got {len(key)}")
    if len(msg) != spec.gamma:
        raise ValueError(f"MAC message must have {spec.gamma} bits, got {len(msg)}")
    f = gf(spec.delta)
    a, b = key.split(spec.delta, spec.delta)
    a, acc = int(a), int(b)
    p = 1
    for s in _mac_symbols(spec, msg):
        p = f.mul_int(p, a)
        acc ^= f.mul_int(s, p)
    return BitString(spec.delta, acc)


def mac_verify(spec: MacSpec, msg: BitString, tag: BitString, key: BitString) -> bool:
    return len(tag) == spec.delta and mac_tag(spec, key, msg) == tag


def mac_tag_table(spec: MacSpec) -> np.ndarray:
    """``T[key, msg]`` for every key and message (tiny specs only)."""
    if spec.tau + spec.gamma > 20:
        raise ValueError("tag table limited to tau + gamma <= 20")
    T = np.empty((1 << spec.tau, 1 << spec.gamma), dtype=np.int64)
    for k in range(1 << spec.tau):
        key = BitString(spec.tau, k)
        for m in range(1 << spec.gamma):
            T[k, m] = mac_tag(spec, key, BitString(spec.gamma, m)).value
    return T


def mac_forgery_exhaustive(spec: MacSpec) -> tuple[Fraction, tuple]:
    """Exact ``max over m != m', t, t'`` of ``Pr_k[MAC(m) = t | MAC(m') = t']``.

    Returns (value, (m, t, m', t')) for one maximizer.
    """
    T = mac_tag_table(spec)
    Q = 1 << spec.delta
    best, arg = Fraction(-1), None
    for mp in range(T.shape[1]):
        for tp in range(Q):
            keys = np.nonzero(T[:, mp] == tp)[0]
            if not len(keys):
                continue
            sub = T[keys]  # (|keys|, msgs)
            onehot = np.zeros((sub.shape[1], Q), dtype=np.int64)
            np.add.at(onehot, (np.broadcast_to(np.arange(sub.shape[1]), sub.shape), sub), 1)
            onehot[mp] = 0
            m, t = np.unravel_index(int(onehot.argmax()), onehot.shape)
            v = Fraction(int(onehot[m, t]), len(keys))
            if v > best:
                best, arg = v, (int(m), int(t), mp, tp)
    return best, arg


# --- protocol parameters -----------------------------------------------------------


@dataclass(frozen=True)
class PAConfig:
    """Sizes and constants of one protocol instance.

    ``gamma`` is the entropy slack and ``rate`` the placeholder constant in
    the output length ``rate * (k1 - |A| - gamma)``; both are free inputs.
    ``eps_nm`` is the error charged to the NM extractor in the budget.
    """

    l1: int
    k1: float
    l2: int
    alpha: int
    gamma: float = 5.0
    rate: float = 0.999
    key_len: Optional[int] = None
    eps_nm: float = 0.0
    tail: Optional[int] = None

    @property
    def l2_tail(self) -> int:
        """Length of A2 and B2; equal to l2 unless set."""
        return self.l2 if self.tail is None else self.tail

    @property
    def revealed(self) -> int:
        return self.l2 + self.l2_tail

    def default_key_len(self) -> int:
        return max(1, math.floor(self.rate * (self.k1 - self.revealed - self.gamma) + 1e-12))

    def to_dict(self) -> dict:
        return {
            "l1": self.l1,
            "k1": self.k1,
            "l2": self.l2,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "rate": self.rate,
            "key_len": self.key_len,
            "eps_nm": self.eps_nm,
            "tail": self.l2_tail,
        }


def _pred(name: str, lhs, op: str, rhs) -> dict:
    ok = {"<=": lhs <= rhs, ">=": lhs >= rhs, "==": lhs == rhs}[op]
    return {"predicate": name, "lhs": lhs, "rhs": rhs, "satisfied": bool(ok)}


@dataclass
class PAParams:
    config: PAConfig
    nm: NmExtractor
    sext: NmExtractor
    mac: MacSpec
    key_len: int

    def __post_init__(self):
        c, p = self.config, self.nm.params
        problems = []
        if c.alpha % 2:
            problems.append("alpha must be even (the MAC key is two alpha/2-bit field elements)")
        if (p.n1, p.n2) != (2 * c.l2, c.l1):
            problems.append(f"nm must take (2 l2, l1) = ({2 * c.l2}, {c.l1}) bits, takes ({p.n1}, {p.n2})")
        if p.m != 4 * c.alpha:
            problems.append(f"nm output must have 4 alpha = {4 * c.alpha} bits, has {p.m}")
        if (self.sext.params.n1, self.sext.params.n2) != (c.l1, c.l2_tail):
            problems.append("sext must take (l1, |A2|) bits")
        if self.sext.params.m != self.key_len:
            problems.append("sext output length differs from key_len")
        if self.mac.gamma != c.l2_tail or self.mac.tau != c.alpha:
            problems.append("MAC must authenticate |A2|-bit messages with alpha-bit keys")
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def alpha(self) -> int:
        return self.config.alpha

    def budget(self) -> dict:
        """Terms of ``eps + 2^-alpha + 2 * 2^-gamma + forgery``; forgery is 2 mu for the two MACs."""
        c = self.config
        terms = {
            "eps_nm": c.eps_nm,
            "guess": 2.0 ** -c.alpha,
            "entropy": 2 * 2.0 ** -c.gamma,
            "forgery": float(2 * self.mac.mu),
        }
        terms["delta"] = sum(terms.values())
        return terms

    def report(self) -> list[dict]:
        """Interface predicates of the protocol theorem; advisory at toy scale."""
        c, p = self.config, self.nm.params
        return [
            _pred("nm W-side entropy <= k1 - |A| - 2 gamma - 1", p.k2, "<=", c.k1 - c.revealed - 2 * c.gamma - 1),
            _pred("nm randomness-side entropy <= l2 - gamma - 1", p.k1, "<=", c.l2 - c.gamma - 1),
            _pred("key_len <= rate (k1 - |A| - gamma)", self.key_len, "<=", c.rate * (c.k1 - c.revealed - c.gamma)),
            _pred("MAC delta <= log gamma + log 1/mu", self.mac.delta, "<=", math.log2(self.mac.gamma) - math.log2(self.mac.mu)),
            _pred("MAC tau <= 2 delta", self.mac.tau, "<=", 2 * self.mac.delta),
        ]

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "key_len": self.key_len,
            "mac": self.mac.to_dict(),
            "nm": self.nm.describe(),
            "sext": self.sext.describe(),
            "budget": self.budget(),
            "report": self.report(),
        }


def sext_trevisan(l1: int, l2: int, key_len: int) -> NmExtractor:
    """Trevisan with seed at most l2 bits; extra seed bits are ignored.

    Uses the largest symbol size whose design fits the seed, with a
    greedy design whose sets overlap in fewer than ``l`` places on average.
    """
    for r in range(l2 // 2, 0, -1):
        if (1 << r) < -(-l1 // r):
            continue
        code = CodeSpec(l1, r)
        l = code.log_n_hat
        design = greedy_weak_design(key_len, l, rho=float(1 << (l - 1)))
        if design.d <= l2:
            break
    else:
        raise ValueError(f"no Trevisan code and design for a {l1}-bit source with a {l2}-bit seed")
    tp = TrevisanParams(l1, l1, key_len, 0.5, code, design)
    ep = ExtractorParams(l1, l1, l2, l2, key_len, 0.5)
    return NmExtractor(
        "sext-trevisan",
        ep,
        lambda w, s: tre_extract(tp, w, s[: tp.d]),
        right_strong=True,
        in_regime=False,
        meta={"params": tp.to_dict()},
    )


def toy_nm(l1: int, l2: int, alpha: int, n4: Optional[int] = None) -> NmExtractor:
    """compile(ip substitute, out-of-regime Raz): (2 l2) x (l1) -> 4 alpha bits."""
    out = 4 * alpha
    n4 = l1 - 4 if n4 is None else n4
    inner = raz_iface(make_raz(2 * l2, n4, out, k1=2 * l2, k2=n4, delta=0.25))
    outer = ip_substitute(l1, out, out)
    return nm_compile(outer, inner, n4)


def toy_params(
    l1: int = 32,
    k1: float = 32,
    l2: int = 8,
    alpha: int = 8,
    gamma: float = 6.0,
    *,
    tail: Optional[int] = 12,
    key_len: Optional[int] = 1,
    rate: float = 0.999,
    eps_nm: float = 0.0,
) -> PAParams:
    """Desk-scale instance.

    A2 and B2 default to 12 bits so the Trevisan key bit, read at a 12-bit
    codeword position, has bias 2^-7; with 8 bits it would be 2^-5.
    """
    cfg = PAConfig(l1, k1, l2, alpha, gamma, rate, key_len, eps_nm, tail)
    kl = cfg.default_key_len() if key_len is None else key_len
    return PAParams(cfg, toy_nm(l1, l2, alpha), sext_trevisan(l1, cfg.l2_tail, kl), MacSpec(cfg.l2_tail, alpha // 2), kl)


# --- parties ---------------------------------------------------------------------


_PHASES = ("start", "sent-A1", "got-B1", "sent-RA", "got-RB", "sent-A2", "done")


@dataclass
class PartyState:
    role: str
    params: PAParams
    w: BitString
    r1: BitString
    r2: BitString
    round: int = 0
    peer_r1: Optional[BitString] = None
    peer_r2: Optional[BitString] = None
    R: Optional[BitString] = None
    outcome: str = "pending"
    key: Optional[BitString] = None

    @property
    def aborted(self) -> bool:
        return self.outcome == "abort"

    @property
    def phase(self) -> str:
        return "abort" if self.aborted else _PHASES[min(self.round, 6)]

    def slices(self) -> tuple[BitString, ...]:
        a = self.params.alpha
        return self.R.split(a, a, a, a)

    def _abort(self):
        self.outcome = "abort"
        self.key = None

    def _derive(self):
        a1, b1 = (self.r1, self.peer_r1) if self.role == ALICE else (self.peer_r1, self.r1)
        self.R = self.params.nm(a1 + b1, self.w)

    # rounds are 1-based; odd rounds are Alice's
    def send(self, rnd: int) -> Message:
        if rnd != self.round + 1:
            raise ProtocolViolation(f"{self.role} asked to send round {rnd} at round {self.round}")
        self.round = rnd
        if self.outcome != "pending":
            return SILENT
        p = self.params
        if rnd in (1, 2):
            return self.r1
        s = self.slices()
        if rnd == 3:
            return s[0]
        if rnd == 4:
            return s[1]
        key = s[2] if rnd == 5 else s[3]
        msg = self.r2 + mac_tag(p.mac, key, self.r2)
        if rnd == 6:
            self._finish()
        return msg

    def receive(self, rnd: int, msg: Message):
        if rnd != self.round + 1:
            raise ProtocolViolation(f"{self.role} asked to receive round {rnd} at round {self.round}")
        self.round = rnd
        if self.outcome != "pending":
            return
        if msg is SILENT:
            self._abort()
            return
        p = self.params
        if rnd in (1, 2):
            self.peer_r1 = msg
            self._derive()
            return
        s = self.slices()
        if rnd in (3, 4):
            if msg != s[rnd - 3]:
                self._abort()
            return
        peer, tag = msg.split(p.config.l2_tail, p.mac.delta)
        key = s[2] if rnd == 5 else s[3]
        if not mac_verify(p.mac, peer, tag, key):
            self._abort()
            return
        self.peer_r2 = peer
        if rnd == 6:
            self._finish()

    def _finish(self):
        if self.outcome == "pending" and self.peer_r2 is not None:
            self.outcome = "key"
            self.key = self.params.sext(self.w, self.r2 ^ self.peer_r2)


def message_length(params: PAParams, rnd: int) -> int:
    c = params.config
    if rnd in (1, 2):
        return c.l2
    if rnd in (3, 4):
        return c.alpha
    return c.l2_tail + params.mac.delta


# --- Eve --------------------------------------------------------------------


Corruption = tuple[str, Callable[[BitString, BitString, random.Random], tuple[BitString, BitString]]]


class EveStrategy:
    """Base strategy: no corruption, every message forwarded."""

    name = "passive"
    active = False

    def pre_corrupt(self, params: PAParams, rng: random.Random) -> Optional[Corruption]:
        return None

    def on_message(self, rnd: int, history: list, msg: Message, rng: random.Random) -> Message:
        return msg


class FlipRound(EveStrategy):
    """Flip one uniformly chosen bit of the round's message (within [lo, hi) if given)."""

    active = True

    def __init__(self, rnd: int, name: Optional[str] = None, span: Optional[tuple] = None):
        self.rnd = rnd
        self.span = span
        self.name = name or f"flip-round-{rnd}"

    def on_message(self, rnd, history, msg, rng):
        if rnd != self.rnd or msg is SILENT:
            return msg
        lo, hi = self.span or (0, len(msg))
        i = lo + rng.randrange(hi - lo)
        return msg ^ BitString(len(msg), 1 << (len(msg) - 1 - i))


class Reflect(EveStrategy):
    """Replay each of Alice's messages back to her as Bob's next one."""

    name = "replay"
    active = True

    def on_message(self, rnd, history, msg, rng):
        if rnd % 2 == 0 and history:
            prev = history[-1][1]
            if prev is not SILENT and msg is not SILENT and len(prev) == len(msg):
                return prev
        return msg


class MemoryTamper(EveStrategy):
    """W~ = W xor c for a random nonzero c; optionally also replace the randomness."""

    active = True

    def __init__(self, party: str = ALICE, *, change_w: bool = True, fresh_randomness: bool = False, replace_r1: bool = False, name: Optional[str] = None):
        self.party = party
        self.change_w = change_w
        self.fresh_randomness = fresh_randomness
        self.replace_r1 = replace_r1
        self.name = name or "memory-tamper"

    def pre_corrupt(self, params, rng):
        l1 = params.config.l1
        c = BitString(l1, rng.randrange(1, 1 << l1)) if self.change_w else BitString.zeros(l1)
        n = params.config.revealed
        fresh = BitString(n, rng.getrandbits(n))

        def F(w: BitString, a: BitString, _rng=None):
            return w ^ c, fresh if self.fresh_randomness else a

        return self.party, F

    def on_message(self, rnd, history, msg, rng):
        first = 1 if self.party == ALICE else 2
        if self.replace_r1 and rnd == first and msg is not SILENT:
            return BitString(len(msg), rng.getrandbits(len(msg)))
        return msg


def eve_library(params: Optional[PAParams] = None) -> list[EveStrategy]:
    l2 = params.config.l2_tail if params is not None else None
    lib: list[EveStrategy] = [EveStrategy()]
    lib += [FlipRound(r) for r in range(1, ROUNDS + 1)]
    lib.append(FlipRound(5, "flip-A2", (0, l2) if l2 else None))
    lib.append(FlipRound(6, "flip-B2", (0, l2) if l2 else None))
    lib.append(Reflect())
    lib.append(MemoryTamper(ALICE))
    lib.append(MemoryTamper(BOB, name="memory-tamper-bob"))
    lib.append(MemoryTamper(ALICE, change_w=False, fresh_randomness=True, name="tamper-randomness-only"))
    lib.append(MemoryTamper(ALICE, fresh_randomness=True, replace_r1=True, name="combined"))
    return lib


def strategy(name: str, params: Optional[PAParams] = None) -> EveStrategy:
    for s in eve_library(params):
        if s.name == name:
            return s
    raise KeyError(f"unknown strategy {name!r}")


# --- sessions ------------------------------------------------------------------


def _enc(msg: Message) -> str:
    return "SILENT" if msg is SILENT else msg.to_hex()


@dataclass
class Transcript:
    seed: str
    strategy: str
    corruption: Optional[dict]
    rounds: list = field(default_factory=list)
    outcome_a: Optional[BitString] = None
    outcome_b: Optional[BitString] = None
    w_tampered: bool = False
    slices_agree: Optional[bool] = None

    @property
    def both_accept(self) -> bool:
        return self.outcome_a is not None and self.outcome_b is not None

    @property
    def aborted(self) -> bool:
        return not self.both_accept

    @property
    def key_mismatch(self) -> bool:
        return self.both_accept and self.outcome_a != self.outcome_b

    @property
    def failure(self) -> bool:
        """Both accept and either the keys differ or a tampered W went unnoticed."""
        return self.both_accept and (self.outcome_a != self.outcome_b or self.w_tampered)

    @property
    def faithful(self) -> bool:
        return all(sent == got for _, sent, got in self.rounds)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "strategy": self.strategy,
            "corruption": self.corruption,
            "rounds": [{"round": r, "sent": _enc(s), "delivered": _enc(d)} for r, s, d in self.rounds],
            "S_A": None if self.outcome_a is None else self.outcome_a.to_hex(),
            "S_B": None if self.outcome_b is None else self.outcome_b.to_hex(),
            "both_accept": self.both_accept,
            "failure": self.failure,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_delivery(params: PAParams, rnd: int, msg) -> Message:
    if msg is SILENT:
        return msg
    if not isinstance(msg, BitString) or len(msg) != message_length(params, rnd):
        raise ProtocolViolation(f"round {rnd}: delivered {msg!r}, expected {message_length(params, rnd)} bits or SILENT")
    return msg


def run_session(
    params: PAParams,
    w: Union[BitString, Distribution, None],
    eve: EveStrategy,
    coins: Union[random.Random, str, int],
    *,
    a: Optional[BitString] = None,
    b: Optional[BitString] = None,
) -> Transcript:
    """One session.  Coins are drawn as W (if sampled), A, B, then Eve's choices."""
    seed = coins if not isinstance(coins, random.Random) else "external"
    rng = coins if isinstance(coins, random.Random) else random.Random(str(coins))
    c = params.config
    if w is None:
        w = BitString(c.l1, rng.getrandbits(c.l1))
    elif isinstance(w, Distribution):
        w = _sample(w, rng)
    if len(w) != c.l1:
        raise ValueError(f"W must have {c.l1} bits")
    n = c.revealed
    a = BitString(n, rng.getrandbits(n)) if a is None else a
    b = BitString(n, rng.getrandbits(n)) if b is None else b
    wa, wb = w, w
    record = None
    corrupt = eve.pre_corrupt(params, rng)
    tampered = False
    if corrupt is not None:
        who, F = corrupt
        if who == ALICE:
            wa, a2 = F(w, a)
            record = {"party": who, "w_changed": wa != w, "r_changed": a2 != a}
            tampered, a = wa != w, a2
        elif who == BOB:
            wb, b2 = F(w, b)
            record = {"party": who, "w_changed": wb != w, "r_changed": b2 != b}
            tampered, b = wb != w, b2
        else:
            raise ProtocolViolation(f"cannot corrupt {who!r}")
        if len(a) != n or len(b) != n or len(wa) != c.l1 or len(wb) != c.l1:
            raise ProtocolViolation("memory corruption changed a length")
    alice = PartyState(ALICE, params, wa, *a.split(c.l2, c.l2_tail))
    bob = PartyState(BOB, params, wb, *b.split(c.l2, c.l2_tail))
    tr = Transcript(str(seed), eve.name, record, w_tampered=tampered)
    for rnd in range(1, ROUNDS + 1):
        sender, receiver = (alice, bob) if rnd % 2 else (bob, alice)
        sent = sender.send(rnd)
        got = _check_delivery(params, rnd, eve.on_message(rnd, list(tr.rounds), sent, rng))
        receiver.receive(rnd, got)
        tr.rounds.append((rnd, sent, got))
    if alice.R is not None and bob.R is not None:
        tr.slices_agree = alice.slices()[2:] == bob.slices()[2:]
    tr.outcome_a, tr.outcome_b = alice.key, bob.key
    return tr


def _sample(d: Distribution, rng: random.Random) -> BitString:
    u = rng.random()
    acc = 0.0
    atoms = sorted(d.pmf.items(), key=lambda kv: kv[0].value)
    for bs, p in atoms:
        acc += float(p)
        if u < acc:
            return bs
    return atoms[-1][0]


# --- aggregation ---------------------------------------------------------------


@dataclass
class SimReport:
    strategy: str
    sessions: int
    both_accept: int
    aborts: int
    key_mismatches: int
    failures: int
    budget: dict
    radius: float
    measured_key_sd: Optional[float]
    seed: str

    @property
    def measured_delta(self) -> float:
        return self.failures / self.sessions if self.sessions else 0.0

    @property
    def within_budget(self) -> bool:
        return self.measured_delta <= self.budget["delta"] + self.radius

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "sessions": self.sessions,
            "both_accept": self.both_accept,
            "aborts": self.aborts,
            "key_mismatches": self.key_mismatches,
            "failures": self.failures,
            "measured_delta": self.measured_delta,
            "budget": self.budget,
            "radius": self.radius,
            "within_budget": self.within_budget,
            "measured_key_sd": self.measured_key_sd,
            "seed": self.seed,
        }


def key_sd(keys: list[BitString], length: int) -> Optional[float]:
    """SD of the empirical key distribution from uniform."""
    if not keys:
        return None
    counts: dict[BitString, int] = {}
    for k in keys:
        counts[k] = counts.get(k, 0) + 1
    emp = Distribution.from_counts(length, counts)
    return float(stat_dist(emp, Distribution.uniform(length)))


def simulate(
    params: PAParams,
    eve: Union[EveStrategy, str],
    sessions: int,
    seed: Union[int, str] = 0,
    *,
    w_dist: Optional[Distribution] = None,
    transcripts: Optional[list] = None,
) -> SimReport:
    """Run independent sessions; session i uses coins seeded by ``f"{seed}/{i}"``.

    The radius is three standard deviations of a Bernoulli(delta) mean over
    ``sessions`` draws.
    """
    eve = strategy(eve, params) if isinstance(eve, str) else eve
    acc = ab = mism = fail = 0
    keys = []
    for i in range(sessions):
        tr = run_session(params, w_dist, eve, f"{seed}/{i}")
        if transcripts is not None:
            transcripts.append(tr)
        if tr.both_accept:
            acc += 1
            keys.append(tr.outcome_a)
        else:
            ab += 1
        mism += tr.key_mismatch
        fail += tr.failure
    budget = params.budget()
    d = min(1.0, budget["delta"])
    radius = 3 * math.sqrt(d * (1 - d) / sessions) if sessions else 0.0
    return SimReport(eve.name, sessions, acc, ab, mism, fail, budget, radius, key_sd(keys, params.key_len), str(seed))
