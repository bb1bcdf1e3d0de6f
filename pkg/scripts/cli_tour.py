"""Run every CLI command on generated fixtures and list the files written.

    python3 scripts/cli_tour.py --out out/tour
"""

import argparse
import sys
from pathlib import Path

from cohmatch.cli import main as cli


def run(argv):
    print("$ cohmatch " + " ".join(argv))
    code = cli(argv)
    if code:
        sys.exit(code)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/tour")
    args = ap.parse_args()
    out = Path(args.out)
    fx = out / "fixtures"
    run(["gen-fixture", "crossing", "--out", str(fx / "crossing")])
    run(["gen-fixture", "monodromy", "--out", str(fx / "monodromy")])
    f = str(fx / "crossing" / "f.txt")
    run(["diagram", f, "--a", "0.5", "--b", "0.25", "--out", str(out / "diagram")])
    run(["singular", f, "--out", str(out / "singular")])
    run(["vineyard", f, "--path", "0.3,-0.5;0.7,0.5", "--out", str(out / "vineyard")])
    run(["monodromy", f, "--out", str(out / "monodromy")])
    mf, mg = str(fx / "monodromy" / "f.txt"), str(fx / "monodromy" / "g.txt")
    run(["dmatch", mf, mg, "--grid", "16", "--out", str(out / "dmatch")])
    run(["cdmatch", mf, mg, "--grid", "16", "--words", "1", "--out", str(out / "cdmatch")])
    run(["check", "--seed", "3", "--grid", "16", "--out", str(out / "check")])
    for p in sorted(out.rglob("*")):
        if p.is_file():
            print(p)


if __name__ == "__main__":
    main()
