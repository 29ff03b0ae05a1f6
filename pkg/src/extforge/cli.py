"""Command-line front end.

Subcommands ``extract``, ``plan``, ``verify`` and ``pa-sim``.  Reports are
JSON on stdout (sorted keys, so identical inputs give identical bytes);
one-line human summaries go to stderr.

Exit codes: 0 success, 1 a verification failed, 2 malformed input or
unknown name, 3 regime violation, 4 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import __version__
from .bitcore import BitString
from .statlab import EnumerationCapError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_REGIME, EXIT_CAP = 0, 1, 2, 3, 4

ALGOS = ("tre", "crtre", "raz", "nmraz-toy", "rate-half-toy")
CAMPAIGNS = ("aghp-bias", "xor-lemma", "code-distance", "crtre-collision", "mac-forgery", "nm-probe", "entropy-lowering", "rejection")


class UsageError(Exception):
    pass


class RegimeError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    params: Optional[str] = None
    seed: int = 0
    cap: Optional[int] = None
    report: Optional[str] = None


def _json_default(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, BitString):
        return v.to_hex()
    if hasattr(v, "item"):
        return v.item()
    raise TypeError(f"not serializable: {type(v).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default)


def _load_params(path: Optional[str]) -> dict:
    if path is None:
        raise UsageError("--params is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read parameter file {path}: {e}") from e


def _hex(text: Optional[str], length: int, what: str) -> BitString:
    """Parse ``len:hex`` or bare hex with exactly ceil(length/4) digits."""
    if text is None:
        raise UsageError(f"--{what} is required")
    try:
        # bare hex carries the declared length; bits are left-aligned as in to_hex
        bs = BitString.from_hex(text if ":" in text else f"{length}:{text}")
    except ValueError as e:
        raise UsageError(f"malformed hex for --{what}: {e}") from e
    if len(bs) != length:
        raise UsageError(f"--{what} must encode {length} bits, got {len(bs)}")
    return bs


# --- extractor builders (shared with the golden vectors) ---------------------------


def build_extractor(algo: str, p: dict):
    """Return ``(fn(x, y) -> BitString, n1, n2, in_regime, description)``."""
    from . import nmcompile as nc
    from .raz import make_raz, raz_extract
    from .trevisan import CrTreParams, TrevisanParams, crtre_extract, plan_trevisan, tre_extract

    try:
        if algo == "tre":
            tp = TrevisanParams.from_dict(p)
            return (lambda x, z: tre_extract(tp, x, z)), tp.n, tp.d, True, tp.to_dict()
        if algo == "crtre":
            cp = CrTreParams.from_dict(p)
            return (lambda x, z: crtre_extract(cp, x, z)), cp.n, cp.seed_len, cp.residual_ok, cp.to_dict()
        if algo == "raz":
            rp = make_raz(
                p["n1"], p["n2"], p["m"], k1=p["k1"], k2=p["k2"], delta=p["delta"],
                variant=p.get("variant", "collision"), test_budget=p.get("test_budget"),
                **({"omega": p["omega"]} if "omega" in p else {}),
            )
            return (lambda x, y: raz_extract(rp, x, y)), rp.n1, rp.n2, rp.in_regime, rp.to_dict()
        if algo == "nmraz-toy":
            f = p["fnm"]
            fnm = nc.fnm_compose(f["nx"], f["kx"], f["eps_T"], lambda a, b: nc.ip_substitute(a, b, b), d=f["d"], gamma=f.get("gamma", 0.1))
            ext = nc.nmraz_compose(p["nx"], p["kx"], p["ny"], p["ky"], p["gamma"], fnm)
            return ext.extract, ext.params.n1, ext.params.n2, ext.in_regime, ext.describe()
        if algo == "rate-half-toy":
            tp = plan_trevisan(p["n1"], p["k1"], p["l"], p["eps"])
            sext = nc.tre_iface(tp)
            nm = nc.ip_substitute(p["n1"], p["n2"], tp.d, k1=p["k1"], k2=p.get("k2"))
            ext = nc.rate_half_compose(nm, sext)
            return ext.extract, ext.params.n1, ext.params.n2, ext.in_regime, ext.describe()
    except (KeyError, TypeError) as e:
        raise UsageError(f"parameter file for {algo} is missing or has bad field: {e}") from e
    raise UsageError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGOS)}")


def cmd_extract(args) -> int:
    fn, n1, n2, ok, _ = build_extractor(args.algo, _load_params(args.params))
    if not ok and not args.allow_out_of_regime:
        raise RegimeError(f"{args.algo} instance is out of regime (pass --allow-out-of-regime to run it anyway)")
    x = _hex(args.x, n1, "x")
    y = _hex(args.seed if args.seed is not None else args.y, n2, "seed")
    out = fn(x, y)
    print(out.to_hex())
    return EXIT_OK


# --- plan ----------------------------------------------------------------------


def plan_report(p: dict) -> dict:
    from . import nmcompile as nc
    from .raz import raz_plan
    from .trevisan import plan_crtre

    kind = p.get("kind")
    try:
        if kind == "raz":
            rp = raz_plan(p["n1"], p["k1"], p["n2"], p["k2"], p["delta"], variant=p.get("variant", "collision"), m=p.get("m"))
            derived = {"m": rp.params.m if rp.params else None, "seed_len": rp.params.seed_len if rp.params else None}
            return {"kind": kind, "report": rp.report, "derived": derived}
        if kind == "compile":
            cp = nc.CompileParams.from_dict(p)
            return {"kind": kind, "report": cp.report(), "derived": cp.derived()}
        if kind == "crtre":
            cr = plan_crtre(p["n"], p["k"], p["m"], p["eps_T"], p.get("eps_collision"))
            derived = {"t": cr.t, "blocks": cr.blocks, "seed_len": cr.seed_len, "out_len": cr.out_len, "agreement_bound": str(cr.agreement_bound())}
            return {"kind": kind, "report": cr.report(), "derived": derived}
        if kind == "nmraz":
            nl, nr = nc.nmraz_split(p["ny"], p["gamma"])
            rows = nc.nmraz_report(p["nx"], p["kx"], p["ny"], p["ky"], p["gamma"])
            derived = {"n_l": nl, "n_r": nr}
            if "eps_T" in p:
                derived["bound"] = nc.nmraz_bound(p["ny"], p["gamma"], p["eps_T"])
            return {"kind": kind, "report": rows, "derived": derived}
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"bad {kind} parameter file: {e}") from e
    raise UsageError(f"unknown plan kind {kind!r}; choose from raz, compile, crtre, nmraz")


def cmd_plan(args) -> int:
    out = plan_report(_load_params(args.params))
    out["ok"] = all(r["satisfied"] for r in out["report"])
    emit(out, args)
    bad = [r["predicate"] for r in out["report"] if not r["satisfied"]]
    print(f"plan {out['kind']}: {'ok' if out['ok'] else 'violated: ' + '; '.join(bad)}", file=sys.stderr)
    return EXIT_OK if out["ok"] else EXIT_REGIME


# --- verify --------------------------------------------------------------------


def campaign_aghp_bias(args) -> dict:
    from .epsbias import exhaustive_bias, plan_bias

    eps = Fraction(args.eps) if args.eps else Fraction(1, 8)
    spec = plan_bias((1 << args.t) - 1, args.k, eps)
    measured, mask = exhaustive_bias(spec, args.k)
    return {"measured": measured, "bound": spec.epsilon, "pass": measured <= spec.epsilon, "details": {"spec": spec.to_dict(), "worst_mask": mask}}


def campaign_xor_lemma(args) -> dict:
    from .epsbias import bias_bits, plan_bias

    eps = Fraction(args.eps) if args.eps else Fraction(1, 8)
    spec = plan_bias((1 << args.t) - 1, args.k, eps)
    words = [bias_bits(spec, BitString(spec.seed_len, s)) for s in range(1 << spec.seed_len)]
    worst, ratio = Fraction(0), Fraction(0)
    for size in range(1, min(3, spec.N, args.k) + 1):
        for combo in itertools.combinations(range(spec.N), size):
            counts = {}
            for w in words:
                key = tuple(w[i] for i in combo)
                counts[key] = counts.get(key, 0) + 1
            total = len(words)
            cells = 1 << size
            sd = sum(abs(Fraction(counts.get(k, 0), total) - Fraction(1, cells)) for k in itertools.product((0, 1), repeat=size)) / 2
            worst = max(worst, sd)
            # sd <= eps 2^(m/2) compared on squares to stay exact
            ratio = max(ratio, sd * sd / (spec.epsilon**2 * cells))
    ok = ratio <= 1
    return {"measured": worst, "bound": "eps * 2^(m/2)", "pass": ok, "details": {"spec": spec.to_dict(), "max_ratio": float(ratio) ** 0.5}}


def campaign_code_distance(args) -> dict:
    from .codes import min_distance, plan_code

    delta = Fraction(args.delta) if args.delta else Fraction(1, 4)
    rows, ok = [], True
    sizes = [args.n] if args.n else range(1, 9)
    for n in sizes:
        spec = plan_code(n, delta)
        d = min_distance(spec)
        need = (Fraction(1, 2) - spec.delta) * spec.n_hat
        rows.append({"n": n, "r": spec.r, "n_hat": spec.n_hat, "min_distance": d, "required": need})
        ok &= d >= need
    return {"measured": min(Fraction(r["min_distance"], r["n_hat"]) for r in rows), "bound": f"1/2 - delta with delta <= {delta}", "pass": ok, "details": rows}


def campaign_crtre_collision(args) -> dict:
    from .statlab import TamperFunction
    from .trevisan import crtre_collision, plan_crtre

    n = args.n or 6
    p = plan_crtre(n, n, n, 0.5)
    worst, rows = Fraction(0), []
    fams = [TamperFunction.bitflip(n, mask) for mask in range(1, 1 << n)] + [TamperFunction.increment(n)]
    for f in fams:
        avg, mx = crtre_collision(p, f)
        worst = max(worst, avg)
        rows.append({"f": f.name, "collision": avg})
    bound = Fraction(p.eps_collision).limit_denominator(1 << 30)
    return {"measured": worst, "bound": bound, "pass": worst <= bound, "details": {"params": {"t": p.t, "seed_len": p.seed_len, "out_len": p.out_len}, "functions": len(rows)}}


def campaign_mac_forgery(args) -> dict:
    from .pamp import MacSpec, mac_forgery_exhaustive, mac_tag_table, mac_verify

    delta = args.delta_bits or 4
    gamma = args.gamma_bits or 2 * delta
    spec = MacSpec(gamma, delta)
    T = mac_tag_table(spec)
    complete = all(
        mac_verify(spec, BitString(gamma, m), BitString(delta, int(T[k, m])), BitString(spec.tau, k))
        for k in range(T.shape[0])
        for m in range(T.shape[1])
    )
    forged, arg = mac_forgery_exhaustive(spec)
    return {"measured": forged, "bound": spec.mu_shape, "pass": complete and forged <= spec.mu_shape, "details": {"spec": spec.to_dict(), "argmax": arg, "keys": int(T.shape[0])}}


def campaign_nm_probe(args) -> dict:
    from .experiments import compiler_shadow

    r = compiler_shadow()
    return {"measured": r["probe"], "bound": r["rhs"], "pass": r["probe"] <= r["rhs"], "details": {k: v for k, v in r.items() if k not in ("probe", "rhs")}}


def campaign_entropy_lowering(args) -> dict:
    from .experiments import entropy_lowering

    r = entropy_lowering()
    return {"measured": r["worst_ratio"], "bound": 1, "pass": r["pass"], "details": r["rows"]}


def campaign_rejection(args) -> dict:
    from .experiments import rejection_check

    r = rejection_check(pairs=20, seed=args.rng_seed)
    return {"measured": r["mismatches"], "bound": 0, "pass": r["mismatches"] == 0, "details": r}


_CAMPAIGNS = {
    "aghp-bias": campaign_aghp_bias,
    "xor-lemma": campaign_xor_lemma,
    "code-distance": campaign_code_distance,
    "crtre-collision": campaign_crtre_collision,
    "mac-forgery": campaign_mac_forgery,
    "nm-probe": campaign_nm_probe,
    "entropy-lowering": campaign_entropy_lowering,
    "rejection": campaign_rejection,
}


def cmd_verify(args) -> int:
    fn = _CAMPAIGNS.get(args.campaign)
    if fn is None:
        raise UsageError(f"unknown campaign {args.campaign!r}; choose from {', '.join(CAMPAIGNS)}")
    out = fn(args)
    out["campaign"] = args.campaign
    out["pass"] = bool(out["pass"])
    emit(out, args)
    print(f"verify {args.campaign}: {'pass' if out['pass'] else 'FAIL'} (measured {out['measured']}, bound {out['bound']})", file=sys.stderr)
    return EXIT_OK if out["pass"] else EXIT_FAIL


# --- pa-sim --------------------------------------------------------------------


def _eve_from_file(path: str, params):
    from .pamp import ALICE, BOB, EveStrategy

    spec = _load_params(path)

    class Scripted(EveStrategy):
        name = spec.get("name", "scripted")
        active = True

        def pre_corrupt(self, prm, rng):
            c = spec.get("corrupt")
            if not c:
                return None
            party = c.get("party", ALICE)
            if party not in (ALICE, BOB):
                raise UsageError(f"cannot corrupt {party!r}")
            mask = BitString.from_hex(c["xor_w"]) if "xor_w" in c else BitString.zeros(prm.config.l1)
            fresh = bool(c.get("fresh_randomness"))
            n = prm.config.revealed
            new = BitString(n, rng.getrandbits(n))
            return party, lambda w, a: (w ^ mask, new if fresh else a)

        def on_message(self, rnd, history, msg, rng):
            x = spec.get("xor", {}).get(str(rnd))
            if x is None or not isinstance(msg, BitString):
                return msg
            return msg ^ BitString.from_hex(x)

    return Scripted()


def cmd_pa_sim(args) -> int:
    from . import pamp

    params = pamp.toy_params(l1=args.l1, k1=args.k1 if args.k1 is not None else args.l1, l2=args.l2, alpha=args.alpha, gamma=args.gamma, tail=args.tail)
    if args.strategy_file:
        try:
            eve = _eve_from_file(args.strategy_file, params)
        except (KeyError, ValueError) as e:
            raise UsageError(f"bad strategy file: {e}") from e
    else:
        try:
            eve = pamp.strategy(args.strategy, params)
        except KeyError as e:
            names = ", ".join(s.name for s in pamp.eve_library(params))
            raise UsageError(f"unknown strategy {args.strategy!r}; choose from {names}") from e
    trs = [] if args.transcripts else None
    rep = pamp.simulate(params, eve, args.sessions, args.rng_seed, transcripts=trs)
    out = rep.to_dict()
    out["params"] = params.config.to_dict()
    out.pop("seed", None)
    if trs is not None:
        with open(args.transcripts, "w") as fh:
            fh.write(json.dumps({"header": {"seed": args.rng_seed, "strategy": eve.name, "config": params.config.to_dict()}}, sort_keys=True) + "\n")
            for t in trs:
                fh.write(t.to_json() + "\n")
    emit(out, args)
    print(f"pa-sim {eve.name}: {rep.sessions} sessions, {rep.both_accept} both-accept, {rep.failures} failures", file=sys.stderr)
    return EXIT_OK


# --- plumbing ------------------------------------------------------------------


def emit(obj: dict, args):
    cfg = getattr(args, "config", None)
    if cfg is not None:
        obj.setdefault("rng_seed", cfg.seed)
    text = dumps(obj)
    print(text)
    if getattr(args, "report", None):
        with open(args.report, "w") as fh:
            fh.write(text + "\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="extforge", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--params", help="JSON parameter file")
        p.add_argument("--rng-seed", type=int, default=0)
        p.add_argument("--cap", type=int, help="enumeration cap (overrides EXTFORGE_CAP)")
        p.add_argument("--report", help="also write the JSON report here")

    p = sub.add_parser("extract", help="run one extractor on hex inputs")
    common(p)
    p.add_argument("--algo", required=True, choices=ALGOS)
    p.add_argument("--x")
    p.add_argument("--seed", help="second input (seed or second source)")
    p.add_argument("--y", help="alias of --seed")
    p.add_argument("--allow-out-of-regime", action="store_true")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("plan", help="constraint report for a parameter file")
    common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("verify", help="run a verification campaign")
    common(p)
    p.add_argument("--campaign", required=True)
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--eps")
    p.add_argument("--n", type=int)
    p.add_argument("--delta", dest="delta_bits", type=int, help="MAC tag bits")
    p.add_argument("--gamma", dest="gamma_bits", type=int, help="MAC message bits")
    p.add_argument("--code-delta", dest="delta", help="code distance slack")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pa-sim", help="Monte-Carlo privacy amplification sessions")
    common(p)
    p.add_argument("--strategy", default="passive")
    p.add_argument("--strategy-file")
    p.add_argument("--sessions", type=int, default=1000)
    p.add_argument("--alpha", type=int, default=8)
    p.add_argument("--l1", type=int, default=32)
    p.add_argument("--k1", type=float)
    p.add_argument("--l2", type=int, default=8)
    p.add_argument("--tail", type=int, default=12)
    p.add_argument("--gamma", type=float, default=6.0)
    p.add_argument("--transcripts", help="write JSON-lines transcripts here")
    p.set_defaults(func=cmd_pa_sim)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    args.config = RunConfig(args.subcommand, args.params, args.rng_seed, args.cap, args.report)
    saved = os.environ.get("EXTFORGE_CAP")
    if args.cap is not None:
        os.environ["EXTFORGE_CAP"] = str(args.cap)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RegimeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_REGIME
    except EnumerationCapError as e:
        print(f"error: enumeration cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    finally:
        # the flag applies to this call only
        if args.cap is not None:
            if saved is None:
                os.environ.pop("EXTFORGE_CAP", None)
            else:
                os.environ["EXTFORGE_CAP"] = saved


if __name__ == "__main__":
    sys.exit(main())
