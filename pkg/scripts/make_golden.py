"""Regenerate tests/golden/*.json and the sample parameter files in params/.

Only needed when an algorithm changes on purpose; the test suite checks
that a fresh build matches the committed bytes.
"""

import argparse
import json
from pathlib import Path

from extforge import golden

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare instead of writing")
    args = ap.parse_args()
    bad = 0
    for name in golden.NAMES:
        path = ROOT / "tests" / "golden" / f"{name}.json"
        text = golden.render(golden.build(name))
        if args.check:
            same = path.exists() and path.read_text() == text
            bad += not same
            print(f"{name}: {'ok' if same else 'DIFFERS'}")
        else:
            path.write_text(text)
            print(f"wrote {path.relative_to(ROOT)}")
    if not args.check:
        for algo in ("tre", "crtre", "raz", "nmraz-toy", "rate-half-toy"):
            path = ROOT / "params" / f"{algo}.json"
            path.write_text(json.dumps(golden.extractor_params(algo), sort_keys=True, indent=1) + "\n")
            print(f"wrote {path.relative_to(ROOT)}")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
