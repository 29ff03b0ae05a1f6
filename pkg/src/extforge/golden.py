"""Golden vectors: fixed parameters and inputs for every extractor.

``build(name)`` recomputes a vector file from scratch; ``render`` gives the
exact bytes that are committed under ``tests/golden``.  The inputs are drawn
from a seeded ``random.Random`` so that the files depend only on the code.
"""

from __future__ import annotations

import json
import random

from .bitcore import BitString

VECTORS = 8

# parameter files consumed by ``extforge extract``
PARAMS = {
    "raz": {"n1": 8, "k1": 8, "n2": 16, "k2": 16, "m": 2, "delta": 0.25},
    "nmraz-toy": {"nx": 8, "kx": 8, "ny": 16, "ky": 16, "gamma": 0.1, "fnm": {"nx": 16, "kx": 16, "eps_T": 0.5, "d": 4}},
    "rate-half-toy": {"n1": 16, "k1": 16, "n2": 20, "l": 2, "eps": 0.25},
}


def extractor_params(algo: str) -> dict:
    from .trevisan import plan_crtre, plan_trevisan

    if algo == "tre":
        return plan_trevisan(16, 8, 2, 0.25).to_dict()
    if algo == "crtre":
        return plan_crtre(6, 6, 6, 0.5).to_dict()
    return json.loads(json.dumps(PARAMS[algo]))


def extractor_vectors(algo: str, count: int = VECTORS) -> dict:
    from .cli import build_extractor

    p = extractor_params(algo)
    fn, n1, n2, ok, _ = build_extractor(algo, p)
    rng = random.Random(f"golden/{algo}")
    rows = []
    for _ in range(count):
        x = BitString(n1, rng.getrandbits(n1))
        y = BitString(n2, rng.getrandbits(n2))
        rows.append({"x": x.to_hex(), "y": y.to_hex(), "out": fn(x, y).to_hex()})
    return {"kind": "extractor", "algo": algo, "in_regime": bool(ok), "params": p, "vectors": rows}


def aghp_vectors(t: int = 3, k: int = 3) -> dict:
    from fractions import Fraction

    from .epsbias import bias_bits, plan_bias

    spec = plan_bias((1 << t) - 1, k, Fraction(1, 8))
    rng = random.Random(f"golden/aghp/{t}")
    rows = []
    for _ in range(VECTORS):
        s = BitString(spec.seed_len, rng.getrandbits(spec.seed_len))
        rows.append({"seed": s.to_hex(), "out": BitString.from_bits(bias_bits(spec, s)).to_hex()})
    return {"kind": "small-bias", "spec": spec.to_dict(), "vectors": rows}


def pa_vectors(strategy: str = "flip-round-5", sessions: int = 4) -> dict:
    from . import pamp

    params = pamp.toy_params()
    trs: list = []
    pamp.simulate(params, strategy, sessions, 7, transcripts=trs)
    return {"kind": "pa-transcripts", "strategy": strategy, "config": params.config.to_dict(), "transcripts": [t.to_dict() for t in trs]}


def _default(v):
    from fractions import Fraction

    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, BitString):
        return v.to_hex()
    if hasattr(v, "item"):
        return v.item()
    raise TypeError(type(v).__name__)


NAMES = ("tre", "crtre", "raz", "nmraz-toy", "rate-half-toy", "aghp", "pa-passive", "pa-flip-round-5")


def build(name: str) -> dict:
    if name == "aghp":
        return aghp_vectors()
    if name.startswith("pa-"):
        return pa_vectors(name[3:])
    return extractor_vectors(name)


def render(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=_default) + "\n"
