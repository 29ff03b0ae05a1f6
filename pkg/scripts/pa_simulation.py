"""Run every strategy of the attack library against the toy protocol.

Prints one row per strategy and optionally writes the reports as JSON.
"""

import argparse
import json

from extforge.pamp import eve_library, simulate, toy_params


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sessions", type=int, default=10_000)
    ap.add_argument("--passive-sessions", type=int, default=1000)
    ap.add_argument("--alpha", type=int, default=8)
    ap.add_argument("--seed", default="0")
    ap.add_argument("--out", help="write the reports here as JSON")
    args = ap.parse_args()

    params = toy_params(alpha=args.alpha)
    budget = params.budget()
    print(f"budget delta = {budget['delta']:.6f}  ({', '.join(f'{k}={v:.4g}' for k, v in budget.items() if k != 'delta')})")
    print(f"{'strategy':24s} {'sessions':>8s} {'accept':>7s} {'fail':>6s} {'delta':>8s} {'radius':>7s}  ok")
    reports = []
    for eve in eve_library(params):
        n = args.sessions if eve.active else args.passive_sessions
        rep = simulate(params, eve, n, args.seed)
        reports.append(rep.to_dict())
        print(f"{eve.name:24s} {n:8d} {rep.both_accept:7d} {rep.failures:6d} {rep.measured_delta:8.4f} {rep.radius:7.4f}  {'yes' if rep.within_budget else 'NO'}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"params": params.config.to_dict(), "reports": reports}, fh, indent=1, sort_keys=True)


if __name__ == "__main__":
    main()
