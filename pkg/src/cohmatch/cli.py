"""Command-line interface.

Every command writes its outputs under ``--out`` and a ``report.json`` (or
``check.json``) holding no timings or absolute paths, so identical arguments
give byte-identical reports. Failures print a JSON object to stderr and exit
with status 2; ``check`` exits with status 1 when an invariant fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import io as cio
from .coherent import (
    CoherentConfig,
    compare_distances,
    estimate_cdmatch,
    estimate_dmatch,
    per_slice_contraction,
    stability_check,
    transport_laws,
)
from .foliation import Region, default_region, detect_singular_pairs, slice_diagram
from .transport import ParameterPath, TransportConfig, loop_permutation, vineyard

log = logging.getLogger(__name__)

COMMANDS = ("diagram", "singular", "vineyard", "monodromy", "dmatch", "cdmatch", "check", "gen-fixture")
N_INPUTS = {"diagram": 1, "singular": 1, "vineyard": 1, "monodromy": 1, "dmatch": 2, "cdmatch": 2, "check": 0, "gen-fixture": 0}
FIXTURES = ("octahedron", "octahedron-random", "perturbation", "trio", "crossing", "monodromy", "coincident")


class ArgumentError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    out: str = "out"
    a: float = 0.5
    b: float = 0.0
    normalized: bool = True
    region: Optional[tuple] = None  # (a_min, a_max, b_min, b_max)
    resolution: int = 32
    tol: float = 1e-3
    word_length: int = 2
    limit: int = 6
    budget: int = 20000
    p: int = 2
    seed: int = 0
    eps: float = 0.05
    fixture: str = "trio"
    path: Optional[tuple] = None  # waypoints
    center: Optional[tuple] = None
    radius: float = 0.1
    segments: int = 64
    max_step: float = 0.25
    workers: Optional[int] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ArgumentError(f"unknown command {self.command!r}")
        need = N_INPUTS[self.command]
        if len(self.inputs) != need:
            raise ArgumentError(f"{self.command} takes {need} input file(s), got {len(self.inputs)}")
        if not 0.0 < self.a < 1.0:
            raise ArgumentError(f"a must lie in the open interval (0, 1), got {self.a}")
        for name in ("resolution", "tol", "limit", "budget", "radius", "segments", "max_step", "eps"):
            if not getattr(self, name) > 0:
                raise ArgumentError(f"{name} must be positive")
        if self.word_length < 0:
            raise ArgumentError("word length must be non-negative")
        if self.p < 2 or any(self.p % k == 0 for k in range(2, int(math.isqrt(self.p)) + 1)):
            raise ArgumentError(f"field characteristic must be prime, got {self.p}")
        if self.fixture not in FIXTURES:
            raise ArgumentError(f"unknown fixture {self.fixture!r}; choose from {', '.join(FIXTURES)}")
        if self.workers is not None and self.workers < 1:
            raise ArgumentError("workers must be at least 1")

    @property
    def transport(self) -> TransportConfig:
        return TransportConfig(max_step=self.max_step, p=self.p)

    @property
    def coherent(self) -> CoherentConfig:
        return CoherentConfig(
            resolution=self.resolution, word_length=self.word_length, limit=self.limit,
            tol=self.tol, budget=self.budget, transport=self.transport,
        )

    def get_region(self, f, g=None) -> Region:
        return Region(*self.region) if self.region else default_region(f, g)

    def to_json(self) -> dict:
        d = asdict(self)
        # output location and parallelism do not change results
        d.pop("out")
        d.pop("workers")
        d["inputs"] = [Path(x).name for x in self.inputs]
        return d


def _load(cfg: RunConfig):
    K, f = cio.read_input(cfg.inputs[0])
    if len(cfg.inputs) == 1:
        return K, f
    K2, g = cio.read_input(cfg.inputs[1])
    if K2.simplices != K.simplices:
        raise ArgumentError("both inputs must carry the same complex")
    return K, f, g


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _finish(cfg, report, name="report.json"):
    report = {"command": cfg.command, "config": cfg.to_json(), **report}
    cio.write_json(_outdir(cfg) / name, report)
    return report


# ----------------------------------------------------------------- commands


def cmd_diagram(cfg: RunConfig):
    from .plots import plot_diagram

    K, f = _load(cfg)
    D = slice_diagram(K, f, (cfg.a, cfg.b), normalized=cfg.normalized, p=cfg.p)
    out = _outdir(cfg)
    cio.write_diagram(out, D)
    plot_diagram(D, out / "diagram.svg", f"a={cfg.a:g}, b={cfg.b:g}")
    return _finish(cfg, {"diagram": cio.diagram_json(D)}), 0


def cmd_singular(cfg: RunConfig):
    from .plots import plot_separation

    K, f = _load(cfg)
    S = detect_singular_pairs(K, f, cfg.get_region(f), cfg.resolution, p=cfg.p, budget=cfg.budget)
    out = _outdir(cfg)
    cio.write_singular(out, S)
    plot_separation(S.grid, S.region, S, out / "separation.svg")
    return _finish(cfg, {"pairs": [list(s.center) for s in S], "min_separation": S.min_separation, "warnings": S.warnings}), 0


def _path(cfg: RunConfig) -> ParameterPath:
    if cfg.path:
        return ParameterPath(tuple(tuple(p) for p in cfg.path))
    return ParameterPath.straight((0.3, -0.5), (0.7, 0.5))


def cmd_vineyard(cfg: RunConfig):
    from .plots import plot_vineyard

    K, f = _load(cfg)
    c = _path(cfg)
    rows, end = vineyard(K, f, c, cfg.transport)
    out = _outdir(cfg)
    cio.write_tracks(out / "tracks.csv", rows)
    plot_vineyard(rows, out / "vineyard.svg")
    ends = {}
    for d in end.where:
        ends[str(d)] = []
        for l in range(len(end.where[d])):
            u, v, on = end.position(d, l)
            ends[str(d)].append({"label": l + 1, "end": None if on else [u, v], "on_diagonal": bool(on)})
    report = {
        "path": [list(w) for w in c.waypoints],
        "tracks": ends,
        "births": end.births,
        "deaths": end.deaths,
        "end_diagram": cio.diagram_json(end.diagram),
    }
    return _finish(cfg, report), 0


def cmd_monodromy(cfg: RunConfig):
    K, f = _load(cfg)
    if cfg.center is not None:
        centers = [tuple(cfg.center)]
        warnings = []
    else:
        S = detect_singular_pairs(K, f, cfg.get_region(f), cfg.resolution, p=cfg.p, budget=cfg.budget)
        centers, warnings = S.centers(), S.warnings
    loops = []
    for s in centers:
        r = loop_permutation(K, f, s, cfg.radius, cfg=cfg.transport, n_segments=cfg.segments)
        loops.append({
            "center": list(s),
            "radius": cfg.radius,
            "basepoint": list(r.basepoint),
            "segments": r.n_segments,
            "stable": r.stable,
            "identity": r.is_identity(),
            "permutation": {str(d): r.cycles(d) for d in sorted(r.maps)},
        })
    return _finish(cfg, {"loops": loops, "warnings": warnings}), 0


def _estimate_json(e):
    return {"lower": e.lower, "upper": e.upper, "exact": e.exact, "witness": e.witness}


def cmd_dmatch(cfg: RunConfig):
    K, f, g = _load(cfg)
    e = estimate_dmatch(K, f, g, cfg.get_region(f, g), cfg.tol, cfg.resolution, cfg.budget, cfg.p)
    return _finish(cfg, {**_estimate_json(e), "diagnostics": e.diagnostics}), 0


def cmd_cdmatch(cfg: RunConfig):
    K, f, g = _load(cfg)
    e = estimate_cdmatch(K, f, g, region=cfg.get_region(f, g), config=cfg.coherent)
    diag = {k: v for k, v in e.diagnostics.items()}
    return _finish(cfg, {**_estimate_json(e), "estimate": e.value, "diagnostics": diag}), 0


def run_checks(K, f, g, h, config: CoherentConfig) -> list:
    """Invariant suite on one trio of bifiltrations on a common complex."""
    eta = g.values - f.values
    results = [stability_check(K, f, eta, config)]
    results.append(compare_distances(K, f, g, config))
    self_est = estimate_cdmatch(K, f, f, config=config)
    from .coherent import CheckResult

    results.append(CheckResult("cdmatch_self_zero", self_est.value == 0.0, self_est.value, 0.0, {}))
    region = default_region(f, g)
    rng = np.random.default_rng(0)
    pts = list(zip(rng.uniform(region.a_min, region.a_max, 200), rng.uniform(region.b_min, region.b_max, 200)))
    ok = per_slice_contraction(f, g, pts) and per_slice_contraction(f, h, pts)
    results.append(CheckResult("per_slice_contraction", ok, 0.0, 0.0, {"points": len(pts)}))
    bp = tuple(self_est.witness["basepoint"])
    c1 = ParameterPath((bp, (0.7, -0.6), (0.8, 0.8)))
    c2 = ParameterPath(((0.8, 0.8), (0.2, 1.2), (0.35, 2.0)))
    results.append(transport_laws(K, f, g, h, c1, c2, config.transport))
    return results


def cmd_check(cfg: RunConfig):
    from .fixtures import perturbation_trio

    K, f, g, h = perturbation_trio(cfg.seed, cfg.eps)
    results = run_checks(K, f, g, h, cfg.coherent)
    passed = all(r.passed for r in results)
    report = {"seed": cfg.seed, "passed": passed, "checks": [r.to_json() for r in results]}
    return _finish(cfg, report, "check.json"), 0 if passed else 1


def cmd_gen_fixture(cfg: RunConfig):
    from . import fixtures as fx

    out = _outdir(cfg)
    kind = cfg.fixture
    extra = {}
    if kind == "octahedron":
        K, f = fx.octahedron_height()
        funcs = {"f": f}
    elif kind == "octahedron-random":
        K, f = fx.octahedron_random(cfg.seed)
        funcs = {"f": f}
    elif kind == "perturbation":
        K, f, g = fx.perturbation_pair(cfg.seed, cfg.eps)
        funcs = {"f": f, "g": g}
    elif kind == "trio":
        K, f, g, h = fx.perturbation_trio(cfg.seed, cfg.eps)
        funcs = {"f": f, "g": g, "h": h}
    elif kind == "crossing":
        K, f, s = fx.crossing_fixture()
        funcs, extra = {"f": f}, {"singular": list(s)}
    elif kind == "monodromy":
        K, f, g, sf, sg = fx.monodromy_pair()
        funcs, extra = {"f": f, "g": g}, {"singular_f": list(sf), "singular_g": list(sg)}
    else:
        K, f = fx.coincident_fixture(cfg.eps)
        funcs = {"f": f}
    files = []
    for name, F in funcs.items():
        cio.write_input(out / f"{name}.txt", K, F)
        files.append(f"{name}.txt")
    return _finish(cfg, {"fixture": kind, "files": files, **extra}), 0


HANDLERS = {
    "diagram": cmd_diagram,
    "singular": cmd_singular,
    "vineyard": cmd_vineyard,
    "monodromy": cmd_monodromy,
    "dmatch": cmd_dmatch,
    "cdmatch": cmd_cdmatch,
    "check": cmd_check,
    "gen-fixture": cmd_gen_fixture,
}


def run(cfg: RunConfig):
    if cfg.workers is not None:
        os.environ["COHMATCH_WORKERS"] = str(cfg.workers)
    return HANDLERS[cfg.command](cfg)


# ----------------------------------------------------------------- parsing


def _floats(n):
    def parse(text):
        try:
            vals = tuple(float(x) for x in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}") from None
        if len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
        return vals

    return parse


def _waypoints(text):
    try:
        pts = tuple(tuple(float(x) for x in w.split(",")) for w in text.split(";"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot read waypoints {text!r}") from None
    if not pts or any(len(p) != 2 for p in pts):
        raise argparse.ArgumentTypeError("waypoints are 'a,b;a,b;...'")
    return pts


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=None, help="process count (default: $COHMATCH_WORKERS or 1)")
    common.add_argument("--field", dest="p", type=int, default=2, help="prime field characteristic")
    common.add_argument("--region", type=_floats(4), default=None, help="a_min,a_max,b_min,b_max")
    common.add_argument("--grid", dest="resolution", type=int, default=32)
    common.add_argument("--tol", type=float, default=1e-3)
    common.add_argument("--budget", type=int, default=20000)
    common.add_argument("--max-step", type=float, default=0.25)

    parser = _Parser(prog="cohmatch", description="Matching and coherent matching distances of bifiltered complexes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("diagram", parents=[common], help="normalized slice diagram at (a, b)")
    p.add_argument("input")
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--raw", dest="normalized", action="store_false", help="skip the min(a, 1-a) normalization")

    p = sub.add_parser("singular", parents=[common], help="locate singular parameter pairs")
    p.add_argument("input")

    p = sub.add_parser("vineyard", parents=[common], help="track cornerpoints along a path")
    p.add_argument("input")
    p.add_argument("--path", type=_waypoints, default=None, help="waypoints 'a,b;a,b;...'")

    p = sub.add_parser("monodromy", parents=[common], help="permutation after a loop around singular pairs")
    p.add_argument("input")
    p.add_argument("--center", type=_floats(2), default=None, help="loop centre a,b (default: every detected pair)")
    p.add_argument("--radius", type=float, default=0.1)
    p.add_argument("--segments", type=int, default=64)

    for name, text in (("dmatch", "matching distance bounds"), ("cdmatch", "coherent matching distance estimate")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("f")
        p.add_argument("g")
        if name == "cdmatch":
            p.add_argument("--words", dest="word_length", type=int, default=2, help="maximum loop word length")
            p.add_argument("--limit", type=int, default=6, help="exhaustive matching enumeration limit")

    p = sub.add_parser("check", parents=[common], help="invariant suite on a seeded perturbation trio")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--words", dest="word_length", type=int, default=2)

    p = sub.add_parser("gen-fixture", parents=[common], help="write fixture inputs")
    p.add_argument("fixture", choices=FIXTURES)
    p.add_argument("--eps", type=float, default=0.05)
    return parser


def config_from_args(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    cmd = ns.pop("command")
    inputs = [ns.pop(k) for k in ("input", "f", "g") if k in ns]
    if ns.get("path") is not None and len(ns["path"]) < 1:
        raise ArgumentError("path needs at least one waypoint")
    return RunConfig(command=cmd, inputs=inputs, **ns)


def _error_json(exc) -> dict:
    out = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("line", "where"):
        if getattr(exc, attr, None) is not None:
            out[attr] = getattr(exc, attr)
    return out


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    argv = sys.argv[1:] if argv is None else argv
    if argv in ([], ["-h"], ["--help"]):
        build_parser().print_help()
        return 0
    try:
        cfg = config_from_args(argv)
        report, status = run(cfg)
    except SystemExit as e:  # --help inside a subcommand
        return int(e.code or 0)
    except (ValueError, RuntimeError, OSError) as e:
        sys.stderr.write(json.dumps(cio.jsonable(_error_json(e)), sort_keys=True) + "\n")
        return 2
    return status


if __name__ == "__main__":
    sys.exit(main())
